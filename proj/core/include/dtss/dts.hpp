#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dtss {

// One row of a difference triangle set. A normalized ruler starts at 0 and is
// strictly increasing; rows loaded from untrusted input may not be, which is
// what verify() reports.
struct Ruler {
  std::vector<int> marks;

  bool is_normalized() const noexcept;
  // Largest within-row difference (max - min); the largest mark when normalized.
  int length() const noexcept;

  friend bool operator==(const Ruler&, const Ruler&) = default;
};

// n rows of k+1 marks each. Only the shape is enforced here; distinctness of
// distances is checked by verify().
class Dts {
 public:
  Dts(int n, int k, std::vector<Ruler> rows);

  // Infers n and k from the rows; all rows must have the same non-zero length.
  static Dts from_rows(std::vector<std::vector<int>> rows);

  int n() const noexcept { return n_; }
  int k() const noexcept { return k_; }
  const std::vector<Ruler>& rows() const noexcept { return rows_; }
  const Ruler& row(std::size_t i) const { return rows_.at(i); }

  friend bool operator==(const Dts&, const Dts&) = default;

 private:
  int n_;
  int k_;
  std::vector<Ruler> rows_;
};

// Sorts and translates so the smallest mark becomes 0. Throws UsageError on an
// empty input or repeated marks.
Ruler normalize(std::span<const int> raw_marks);

// Largest difference over all rows.
int scope(const Dts& d) noexcept;

// Every positive within-row difference, ascending. (k+1)k/2 entries.
std::vector<int> distances(const Ruler& r);

struct DuplicateDistance {
  int distance;
  std::size_t first_row;   // row where the distance was first seen
  std::size_t second_row;  // row that repeats it (may equal first_row)

  friend bool operator==(const DuplicateDistance&, const DuplicateDistance&) = default;
};

struct VerifyReport {
  bool valid = false;
  int scope = 0;
  std::vector<DuplicateDistance> duplicate_distances;
  std::vector<std::size_t> normalization_errors;
};

VerifyReport verify(const Dts& d);

// True iff the distance set is exactly {1, ..., n k (k+1) / 2}. Requires a
// valid DTS (UsageError otherwise).
bool is_perfect(const Dts& d);

// n k (k+1) / 2, the number of distances in an (n,k)-DTS.
constexpr long long distance_count(long long n, long long k) noexcept { return n * k * (k + 1) / 2; }

}  // namespace dtss
