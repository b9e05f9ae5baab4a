#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dtss/bitword.hpp"
#include "dtss/errors.hpp"

namespace dtss {

// Bitmask state of the row under construction. With W = M+1:
//   nat       marks placed so far (bit 0 always set)
//   rev       mirror image: bit i set iff nat has bit (largest - i)
//   distances the row's own distance set, kept so the row can later be
//             committed and removed in O(1)
template <class Word>
struct RowState {
  Word nat;
  Word rev;
  Word distances;
  int largest = 0;
  int mark_count = 1;

  // The row {0}.
  static RowState fresh(std::size_t width) {
    RowState r;
    r.nat = Word(width);
    r.nat.set(0);
    r.rev = r.nat;
    r.distances = Word(width);
    return r;
  }

  int max_mark() const noexcept { return static_cast<int>(nat.width()) - 1; }

  friend bool operator==(const RowState&, const RowState&) = default;
};

// Distances consumed by the partial DTS. `used` is the union of every
// committed row's mask plus the distances of the row under construction;
// per-row masks are pairwise disjoint.
template <class Word>
struct SharedDistances {
  Word used;
  std::vector<Word> per_row;

  SharedDistances() = default;
  explicit SharedDistances(std::size_t width) : used(width) {}

  friend bool operator==(const SharedDistances&, const SharedDistances&) = default;
};

enum class InsertOutcome { Inserted, Rejected };

// Inserts `mark` into `row` iff doing so creates no repeated distance, either
// within the row or against `shared.used`. On rejection nothing is modified.
// A mark already present (including 0) is rejected by the bisection test.
template <class Word>
InsertOutcome try_insert_mark(RowState<Word>& row, SharedDistances<Word>& shared, int mark) {
  if (mark < 1 || mark > row.max_mark()) {
    throw UsageError("mark " + std::to_string(mark) + " outside [1, " + std::to_string(row.max_mark()) + "]");
  }
  if (mark > row.largest) {
    // Every existing mark lies to the left; rightDistances is empty.
    Word left = row.rev << static_cast<std::size_t>(mark - row.largest);
    if (shared.used.intersects(left)) return InsertOutcome::Rejected;
    row.nat.set(static_cast<std::size_t>(mark));
    row.distances |= left;
    shared.used |= left;
    row.rev = std::move(left);
    row.rev.set(0);
    row.largest = mark;
  } else {
    Word left = row.rev >> static_cast<std::size_t>(row.largest - mark);
    const Word right = row.nat >> static_cast<std::size_t>(mark);
    if (left.intersects(right)) return InsertOutcome::Rejected;  // bisection
    left |= right;
    if (shared.used.intersects(left)) return InsertOutcome::Rejected;
    row.nat.set(static_cast<std::size_t>(mark));
    row.rev.set(static_cast<std::size_t>(row.largest - mark));
    row.distances |= left;
    shared.used |= left;
  }
  ++row.mark_count;
  return InsertOutcome::Inserted;
}

// Records a completed row's distance mask. `used` already contains it.
template <class Word>
void commit_row(SharedDistances<Word>& shared, const Word& row_distances) {
  if (row_distances.width() != shared.used.width()) throw UsageError("commit_row: width mismatch");
  for (const auto& other : shared.per_row) {
    if (other.intersects(row_distances)) {
      throw InvariantError("commit_row: distances overlap a committed row");
    }
  }
  if ((row_distances & shared.used) != row_distances) {
    throw InvariantError("commit_row: distances missing from used set");
  }
  shared.per_row.push_back(row_distances);
}

// Drops committed row `index` and frees its distances. Only valid while no
// row is under construction.
template <class Word>
Word remove_row(SharedDistances<Word>& shared, std::size_t index) {
  if (index >= shared.per_row.size()) {
    throw UsageError("remove_row: index " + std::to_string(index) + " out of range");
  }
  Word mask = std::move(shared.per_row[index]);
  shared.per_row.erase(shared.per_row.begin() + static_cast<std::ptrdiff_t>(index));
  shared.used.clear(mask);
  return mask;
}

// Inverse of remove_row: puts `mask` back at `index`.
template <class Word>
void restore_row(SharedDistances<Word>& shared, std::size_t index, Word mask) {
  if (index > shared.per_row.size()) {
    throw UsageError("restore_row: index " + std::to_string(index) + " out of range");
  }
  if (shared.used.intersects(mask)) throw InvariantError("restore_row: distances already in use");
  shared.used |= mask;
  shared.per_row.insert(shared.per_row.begin() + static_cast<std::ptrdiff_t>(index), std::move(mask));
}

// Returns the in-progress row's distances to the pool, e.g. after the row is
// abandoned.
template <class Word>
void discard_row(SharedDistances<Word>& shared, const RowState<Word>& row) {
  shared.used.clear(row.distances);
}

}  // namespace dtss
