#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <stop_token>

#include "dtss/dts.hpp"
#include "dtss/sampling.hpp"

namespace dtss {

inline constexpr int kDefaultThresh2 = 4096;
inline constexpr int kThresh1PerRow = 64;

struct SearchOptions {
  int thresh1 = 0;  // outer iterations per run; 0 selects 64 n
  int thresh2 = kDefaultThresh2;  // mark attempts per row
  std::uint64_t restarts = 0;     // runs before giving up; 0 = until cancelled
  std::uint64_t seed = 1;
  // Absent means uniform sampling. A distribution trained for another scope
  // is rescaled to the search scope.
  std::optional<MarkDistribution> distribution;
  int precision_bits = kDefaultPrecisionBits;
  // Re-derives the used-distance set from scratch after every accepted
  // insertion and throws InvariantError on mismatch. Slow.
  bool debug_checks = false;
};

// Validated search parameters for an (n,k)-DTS of scope <= max_scope.
// Construction throws UsageError when max_scope is below lower_bound(n,k),
// exceeds the bit-word ceiling, or a threshold is < 1.
class SearchConfig {
 public:
  SearchConfig(int n, int k, int max_scope, SearchOptions options = {});

  int n() const noexcept { return n_; }
  int k() const noexcept { return k_; }
  int max_scope() const noexcept { return max_scope_; }
  int thresh1() const noexcept { return options_.thresh1; }
  int thresh2() const noexcept { return options_.thresh2; }
  std::uint64_t restarts() const noexcept { return options_.restarts; }
  std::uint64_t seed() const noexcept { return options_.seed; }
  const MarkDistribution& distribution() const noexcept { return *options_.distribution; }
  int precision_bits() const noexcept { return options_.precision_bits; }
  bool debug_checks() const noexcept { return options_.debug_checks; }

 private:
  int n_;
  int k_;
  int max_scope_;
  SearchOptions options_;
};

struct SearchStats {
  std::uint64_t outer_iterations = 0;
  std::uint64_t mark_attempts = 0;
  std::uint64_t row_replacements = 0;
  std::uint64_t restarts = 0;  // runs started, the first one included
  std::chrono::duration<double> wall_time{0};

  SearchStats& operator+=(const SearchStats& o) noexcept {
    outer_iterations += o.outer_iterations;
    mark_attempts += o.mark_attempts;
    row_replacements += o.row_replacements;
    restarts += o.restarts;
    return *this;
  }
};

struct SearchResult {
  std::optional<Dts> dts;  // verified, scope <= M, when found
  SearchStats stats;
  bool cancelled = false;

  bool found() const noexcept { return dts.has_value(); }
};

// Live counters for progress reporting; workers add to them as they go.
struct SearchProgress {
  std::atomic<std::uint64_t> outer_iterations{0};
  std::atomic<std::uint64_t> mark_attempts{0};
  std::atomic<std::uint64_t> row_replacements{0};
  std::atomic<std::uint64_t> restarts{0};
};

// Single-threaded search drawing randomness from `rng`. Deterministic for a
// given config and rng state when not cancelled.
SearchResult search_dts(const SearchConfig& config, Lfsr& rng, std::stop_token stop = {},
                        SearchProgress* progress = nullptr);

// Same, with rng = Lfsr::for_stream(config.seed(), 0).
SearchResult search_dts(const SearchConfig& config);

// Runs `worker_count` independent searches (stream i seeded from (seed, i))
// and returns the first DTS found; the rest are cancelled. Stats are summed
// over workers, wall_time is the elapsed time of the whole run.
SearchResult run_workers(const SearchConfig& config, int worker_count, std::stop_token stop = {},
                         SearchProgress* progress = nullptr);

}  // namespace dtss
