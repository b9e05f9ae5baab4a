#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dtss/dts.hpp"

namespace dtss {

// Fibonacci linear-feedback shift register of width L <= 64. Taps are given
// as polynomial exponents in [1, L] and must include L; tap t feeds bit
// (L - t) of the state into the feedback XOR. Each step shifts the state
// right by one, emits the bit shifted out and inserts the feedback at the top.
// A primitive feedback polynomial yields period 2^L - 1.
class Lfsr {
 public:
  Lfsr(int width, std::vector<int> taps, std::uint64_t state);

  // 64-bit register with taps {64, 63, 61, 60}; the seed is mixed so that
  // nearby seeds give unrelated (and never all-zero) states.
  static Lfsr default64(std::uint64_t seed);

  // Independent stream `stream` derived from `seed`, used per worker.
  static Lfsr for_stream(std::uint64_t seed, std::uint64_t stream);

  int width() const noexcept { return width_; }
  const std::vector<int>& taps() const noexcept { return taps_; }
  std::uint64_t state() const noexcept { return state_; }

  // One step; returns the emitted bit.
  int next() noexcept;

  // `count` (<= 64) steps at once; the first emitted bit lands in bit 0.
  std::uint64_t next_bits(int count) noexcept;

  // Approximately uniform integer in [0, bound), bound >= 1.
  std::uint32_t below(std::uint32_t bound) noexcept;

  friend bool operator==(const Lfsr&, const Lfsr&) = default;

 private:
  int width_;
  std::vector<int> taps_;
  std::vector<int> shifts_;  // L - t per tap
  int chunk_;                // steps that can be computed in one word operation
  std::uint64_t mask_;
  std::uint64_t state_;
};

enum class SamplingMode { Uniform, Gaussian };

inline constexpr double kSigmaFloor = 1.0;
inline constexpr int kDefaultPrecisionBits = 16;

// Per-position mark model: the j-th mark of a row (j = 1..k) is drawn from
// Normal(mean[j-1], stddev[j-1]) rounded to an integer, or uniformly from
// [1, M] in uniform mode.
class MarkDistribution {
 public:
  static MarkDistribution uniform(int k, int max_mark);
  // Requires every stddev > 0 and every mean in (0, max_mark].
  static MarkDistribution gaussian(int max_mark, std::vector<double> means, std::vector<double> stddevs);

  SamplingMode mode() const noexcept { return mode_; }
  int k() const noexcept { return k_; }
  int max_mark() const noexcept { return max_mark_; }
  const std::vector<double>& means() const noexcept { return means_; }
  const std::vector<double>& stddevs() const noexcept { return stddevs_; }

  // Means and stddevs multiplied by new_max / max_mark().
  MarkDistribution rescaled(int new_max) const;

  friend bool operator==(const MarkDistribution&, const MarkDistribution&) = default;

 private:
  MarkDistribution() = default;

  SamplingMode mode_ = SamplingMode::Uniform;
  int k_ = 0;
  int max_mark_ = 0;
  std::vector<double> means_;
  std::vector<double> stddevs_;
};

// Quantized inverse CDF: for each position a monotone table from a P-bit
// uniform integer to a mark in [1, M].
class InverseCdfTable {
 public:
  int k() const noexcept { return k_; }
  int max_mark() const noexcept { return max_mark_; }
  int precision_bits() const noexcept { return precision_bits_; }

  // position in [1, k], u in [0, 2^P).
  int lookup(int position, std::uint32_t u) const;

  // Unchecked variant for the search loop.
  int lookup_unchecked(int position, std::uint32_t u) const noexcept {
    return tables_[tables_.size() == 1 ? 0 : static_cast<std::size_t>(position - 1)][u];
  }

 private:
  friend InverseCdfTable build_inverse_cdf(const MarkDistribution&, int, int);

  int k_ = 0;
  int max_mark_ = 0;
  int precision_bits_ = 0;
  std::vector<std::vector<std::uint16_t>> tables_;  // one shared table in uniform mode
};

// Gaussian mode: u -> round(quantile((u + 1/2) / 2^P)) clipped to [1, M].
// Uniform mode:  u -> 1 + floor(u M / 2^P).
InverseCdfTable build_inverse_cdf(const MarkDistribution& dist, int max_mark,
                                  int precision_bits = kDefaultPrecisionBits);

// Draws P bits from rng and looks up `position` (1-based).
int sample_mark(const InverseCdfTable& table, Lfsr& rng, int position);

// Per-position sample mean and standard deviation of the sorted marks of
// `rows` (found at scope relaxed_scope), scaled by target_scope/relaxed_scope,
// with stddevs floored at sigma_floor.
MarkDistribution fit_distribution(std::span<const Ruler> rows, int k, int relaxed_scope, int target_scope,
                                  double sigma_floor = kSigmaFloor);

struct TrainingConfig {
  int rows = 0;           // n', may be below the target n
  int k = 0;
  int relaxed_scope = 0;  // M'
  int target_scope = 0;   // M
  int sample_count = 0;   // DTSs to collect, >= 2
  // Total Algorithm-2 runs (restarts) the sample searches may consume.
  std::uint64_t budget = 100000;
  int thresh1 = 0;  // 0 selects the search default
  int thresh2 = 0;
};

// Finds sample_count (n', k) DTSs of scope <= M' with uniform sampling and
// fits a distribution for scope M. Throws TrainingError when the budget runs
// out first, UsageError on bad parameters.
MarkDistribution train(const TrainingConfig& config, Lfsr& rng);

// {"k": .., "M": .., "means": [..], "stddevs": [..]}
std::string distribution_to_json(const MarkDistribution& dist, int indent = -1);
MarkDistribution distribution_from_json(std::string_view text);

}  // namespace dtss
