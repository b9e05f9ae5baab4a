#pragma once

#include <cstddef>
#include <numeric>
#include <optional>
#include <stop_token>
#include <vector>

#include "dtss/dts.hpp"
#include "dtss/errors.hpp"
#include "dtss/insertion.hpp"
#include "dtss/sampling.hpp"
#include "dtss/search.hpp"

namespace dtss {

// Greedy row-by-row construction with row-replacement backtracking over the
// bitmask insertion kernel. One engine per worker; Word must be wide enough
// for M+1 bits.
//
// A run starts from an empty partial DTS. Each outer iteration builds a fresh
// row from {0} with at most thresh2 mark attempts. A completed row is
// committed. Otherwise every committed row is tried for replacement in random
// order: it is removed, a fresh row is built against the freed distances, and
// the first success takes its place; a failed attempt puts the removed row
// back bit-identically. The run is abandoned after thresh1 outer iterations.
template <class Word>
class SearchEngine {
 public:
  enum class RunOutcome { Complete, Abandoned, Cancelled };

  SearchEngine(int n, int k, int max_scope, const InverseCdfTable& table, Lfsr& rng, bool debug_checks = false,
               SearchProgress* progress = nullptr)
      : n_(n),
        k_(k),
        width_(static_cast<std::size_t>(max_scope) + 1),
        table_(table),
        rng_(rng),
        debug_checks_(debug_checks),
        progress_(progress),
        shared_(width_),
        current_(RowState<Word>::fresh(width_)) {
    if (width_ > Word::kMaxWidth) throw UsageError("scope too large for this bit word");
    if (table.k() != k || table.max_mark() != max_scope) throw UsageError("sampling table does not match (k, M)");
  }

  // Empties the partial DTS.
  void reset() {
    rows_.clear();
    shared_ = SharedDistances<Word>(width_);
    current_ = RowState<Word>::fresh(width_);
  }

  // Builds a fresh row from {0} with at most thresh2 insertion attempts. On
  // success the row's distances stay in the used set and the caller must
  // commit() it; on failure the partial DTS is left as it was.
  std::optional<Ruler> complete_row(int thresh2) {
    current_ = RowState<Word>::fresh(width_);
    const int target = k_ + 1;
    std::uint64_t attempts = 0;
    const int bits = table_.precision_bits();
    while (current_.mark_count < target && attempts < static_cast<std::uint64_t>(std::max(thresh2, 0))) {
      ++attempts;
      const auto u = static_cast<std::uint32_t>(rng_.next_bits(bits));
      const int mark = table_.lookup_unchecked(current_.mark_count, u);
      if (try_insert_mark(current_, shared_, mark) == InsertOutcome::Inserted && debug_checks_) check_state();
    }
    stats_.mark_attempts += attempts;
    if (progress_) progress_->mark_attempts.fetch_add(attempts, std::memory_order_relaxed);
    if (current_.mark_count < target) {
      discard_row(shared_, current_);
      current_ = RowState<Word>::fresh(width_);
      return std::nullopt;
    }
    return Ruler{current_.nat.marks()};
  }

  // Commits the row just returned by complete_row().
  void commit() {
    commit_row(shared_, current_.distances);
    rows_.push_back(current_.nat);
    current_ = RowState<Word>::fresh(width_);
  }

  RunOutcome run(int thresh1, int thresh2, std::stop_token stop = {}) {
    reset();
    bump(stats_.restarts, progress_ ? &progress_->restarts : nullptr);
    for (int iters1 = 0; rows_.size() < static_cast<std::size_t>(n_) && iters1 < thresh1; ++iters1) {
      if (stop.stop_requested()) return RunOutcome::Cancelled;
      bump(stats_.outer_iterations, progress_ ? &progress_->outer_iterations : nullptr);
      if (complete_row(thresh2)) {
        commit();
        continue;
      }
      for (std::size_t index : random_order(rows_.size())) {
        if (stop.stop_requested()) return RunOutcome::Cancelled;
        Word removed_mask = remove_row(shared_, index);
        Word removed_row = std::move(rows_[index]);
        rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(index));
        if (complete_row(thresh2)) {
          commit();
          bump(stats_.row_replacements, progress_ ? &progress_->row_replacements : nullptr);
          break;
        }
        restore_row(shared_, index, std::move(removed_mask));
        rows_.insert(rows_.begin() + static_cast<std::ptrdiff_t>(index), std::move(removed_row));
      }
    }
    return rows_.size() == static_cast<std::size_t>(n_) ? RunOutcome::Complete : RunOutcome::Abandoned;
  }

  std::size_t completed_rows() const noexcept { return rows_.size(); }

  // The committed rows as a DTS; requires all n rows.
  Dts dts() const {
    if (rows_.size() != static_cast<std::size_t>(n_)) throw UsageError("partial DTS is incomplete");
    std::vector<Ruler> rows;
    rows.reserve(rows_.size());
    for (const auto& r : rows_) rows.push_back(Ruler{r.marks()});
    return Dts(n_, k_, std::move(rows));
  }

  const SearchStats& stats() const noexcept { return stats_; }
  const SharedDistances<Word>& shared() const noexcept { return shared_; }
  const RowState<Word>& current() const noexcept { return current_; }

 private:
  static void bump(std::uint64_t& counter, std::atomic<std::uint64_t>* live) {
    ++counter;
    if (live) live->fetch_add(1, std::memory_order_relaxed);
  }

  std::vector<std::size_t> random_order(std::size_t count) {
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = count; i > 1; --i) {
      std::swap(order[i - 1], order[rng_.below(static_cast<std::uint32_t>(i))]);
    }
    return order;
  }

  // Slow consistency check against distances recomputed from the marks.
  void check_state() const {
    Word expected(width_);
    auto add = [&](const std::vector<int>& marks) {
      for (int d : distances(Ruler{marks})) expected.set(static_cast<std::size_t>(d));
    };
    for (const auto& r : rows_) add(r.marks());
    add(current_.nat.marks());
    if (!(expected == shared_.used)) {
      throw InvariantError("used distances " + shared_.used.to_string() + " != recomputed " + expected.to_string());
    }
    Word mirror(width_);
    for (int m : current_.nat.marks()) mirror.set(static_cast<std::size_t>(current_.largest - m));
    if (!(mirror == current_.rev) || current_.nat.highest() != current_.largest || !current_.nat.test(0)) {
      throw InvariantError("row state lost its mirror invariant");
    }
  }

  int n_;
  int k_;
  std::size_t width_;
  const InverseCdfTable& table_;
  Lfsr& rng_;
  bool debug_checks_;
  SearchProgress* progress_;

  SharedDistances<Word> shared_;
  std::vector<Word> rows_;  // committed rows, aligned with shared_.per_row
  RowState<Word> current_;
  SearchStats stats_;
};

}  // namespace dtss
