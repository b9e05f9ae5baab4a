#include "dtss/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dtss/errors.hpp"
#include "dtss/search.hpp"
#include "json.hpp"

namespace dtss {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t low_mask(int bits) noexcept {
  return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

}  // namespace

Lfsr::Lfsr(int width, std::vector<int> taps, std::uint64_t state)
    : width_(width), taps_(std::move(taps)), chunk_(0), mask_(0), state_(0) {
  if (width < 2 || width > 64) throw UsageError("LFSR width must be in [2, 64]");
  if (taps_.empty()) throw UsageError("LFSR needs at least one tap");
  std::sort(taps_.begin(), taps_.end(), std::greater<>());
  taps_.erase(std::unique(taps_.begin(), taps_.end()), taps_.end());
  if (taps_.front() != width || taps_.back() < 1) {
    throw UsageError("LFSR taps must lie in [1, width] and include the width");
  }
  mask_ = low_mask(width);
  state_ = state & mask_;
  if (state_ == 0) throw UsageError("LFSR state must be non-zero");
  int max_shift = 0;
  for (int t : taps_) {
    shifts_.push_back(width - t);
    max_shift = std::max(max_shift, width - t);
  }
  chunk_ = width - max_shift;
}

Lfsr Lfsr::default64(std::uint64_t seed) {
  std::uint64_t state = splitmix64(seed);
  if (state == 0) state = 1;
  return Lfsr(64, {64, 63, 61, 60}, state);
}

Lfsr Lfsr::for_stream(std::uint64_t seed, std::uint64_t stream) {
  return default64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

int Lfsr::next() noexcept { return static_cast<int>(next_bits(1)); }

std::uint64_t Lfsr::next_bits(int count) noexcept {
  std::uint64_t out = 0;
  int produced = 0;
  while (produced < count) {
    // Feedback for step i only reads original state bits i + shift < L, so
    // up to chunk_ steps can be evaluated in parallel.
    const int r = std::min(count - produced, chunk_);
    std::uint64_t fb = 0;
    for (int s : shifts_) fb ^= state_ >> s;
    fb &= low_mask(r);
    out |= (state_ & low_mask(r)) << produced;
    state_ = r >= 64 ? fb : ((state_ >> r) | (fb << (width_ - r))) & mask_;
    produced += r;
  }
  return out;
}

std::uint32_t Lfsr::below(std::uint32_t bound) noexcept {
  return static_cast<std::uint32_t>((next_bits(32) * bound) >> 32);
}

MarkDistribution MarkDistribution::uniform(int k, int max_mark) {
  if (k < 1 || max_mark < 1) throw UsageError("uniform distribution needs k >= 1 and M >= 1");
  MarkDistribution d;
  d.mode_ = SamplingMode::Uniform;
  d.k_ = k;
  d.max_mark_ = max_mark;
  return d;
}

MarkDistribution MarkDistribution::gaussian(int max_mark, std::vector<double> means, std::vector<double> stddevs) {
  if (means.empty() || means.size() != stddevs.size()) {
    throw UsageError("gaussian distribution needs matching, non-empty means and stddevs");
  }
  if (max_mark < 1) throw UsageError("gaussian distribution needs M >= 1");
  for (std::size_t j = 0; j < means.size(); ++j) {
    if (!(stddevs[j] > 0.0) || !std::isfinite(stddevs[j])) {
      throw UsageError("stddev for position " + std::to_string(j + 1) + " must be positive");
    }
    if (!(means[j] > 0.0) || means[j] > max_mark) {
      throw UsageError("mean for position " + std::to_string(j + 1) + " outside (0, M]");
    }
  }
  MarkDistribution d;
  d.mode_ = SamplingMode::Gaussian;
  d.k_ = static_cast<int>(means.size());
  d.max_mark_ = max_mark;
  d.means_ = std::move(means);
  d.stddevs_ = std::move(stddevs);
  return d;
}

MarkDistribution MarkDistribution::rescaled(int new_max) const {
  if (new_max < 1) throw UsageError("rescaled: M must be >= 1");
  if (mode_ == SamplingMode::Uniform) return uniform(k_, new_max);
  const double factor = static_cast<double>(new_max) / max_mark_;
  auto means = means_;
  auto stddevs = stddevs_;
  for (auto& m : means) m = std::min(m * factor, static_cast<double>(new_max));
  for (auto& s : stddevs) s *= factor;
  return gaussian(new_max, std::move(means), std::move(stddevs));
}

int InverseCdfTable::lookup(int position, std::uint32_t u) const {
  if (position < 1 || position > k_) {
    throw UsageError("position " + std::to_string(position) + " outside [1, " + std::to_string(k_) + "]");
  }
  if (u >> precision_bits_ != 0) throw UsageError("uniform input exceeds table precision");
  return lookup_unchecked(position, u);
}

InverseCdfTable build_inverse_cdf(const MarkDistribution& dist, int max_mark, int precision_bits) {
  if (max_mark < 1 || max_mark > std::numeric_limits<std::uint16_t>::max()) {
    throw UsageError("inverse CDF: M outside [1, 65535]");
  }
  if (precision_bits < 1 || precision_bits > 16) throw UsageError("inverse CDF: precision must be in [1, 16]");

  InverseCdfTable t;
  t.k_ = dist.k();
  t.max_mark_ = max_mark;
  t.precision_bits_ = precision_bits;
  const std::uint64_t size = std::uint64_t{1} << precision_bits;

  if (dist.mode() == SamplingMode::Uniform) {
    std::vector<std::uint16_t> table(size);
    for (std::uint64_t u = 0; u < size; ++u) {
      table[u] = static_cast<std::uint16_t>(1 + (u * static_cast<std::uint64_t>(max_mark)) / size);
    }
    t.tables_.push_back(std::move(table));
    return t;
  }

  // round(quantile(p)) clipped to [1, M] equals 1 + #{m in [1, M-1] : p >= cdf(m + 1/2)},
  // so the table is filled from M-1 CDF breakpoints instead of 2^P quantiles.
  for (int j = 0; j < dist.k(); ++j) {
    const double mean = dist.means()[static_cast<std::size_t>(j)];
    const double sigma = dist.stddevs()[static_cast<std::size_t>(j)];
    auto cdf = [&](double x) { return 0.5 * std::erfc(-(x - mean) / (sigma * std::sqrt(2.0))); };
    std::vector<std::uint16_t> table(size);
    int mark = 1;
    double next_cut = cdf(1.5);
    for (std::uint64_t u = 0; u < size; ++u) {
      const double p = (static_cast<double>(u) + 0.5) / static_cast<double>(size);
      while (mark < max_mark && p >= next_cut) {
        ++mark;
        next_cut = cdf(mark + 0.5);
      }
      table[u] = static_cast<std::uint16_t>(mark);
    }
    t.tables_.push_back(std::move(table));
  }
  return t;
}

int sample_mark(const InverseCdfTable& table, Lfsr& rng, int position) {
  return table.lookup(position, static_cast<std::uint32_t>(rng.next_bits(table.precision_bits())));
}

MarkDistribution fit_distribution(std::span<const Ruler> rows, int k, int relaxed_scope, int target_scope,
                                  double sigma_floor) {
  if (rows.size() < 2) throw UsageError("fit_distribution needs at least two rows");
  if (k < 1 || relaxed_scope < 1 || target_scope < 1) throw UsageError("fit_distribution: bad parameters");
  if (!(sigma_floor > 0.0)) throw UsageError("fit_distribution: sigma floor must be positive");

  const auto k_size = static_cast<std::size_t>(k);
  std::vector<double> sum(k_size, 0.0);
  std::vector<double> sum_sq(k_size, 0.0);
  for (const auto& row : rows) {
    if (row.marks.size() != k_size + 1) throw UsageError("fit_distribution: row with wrong mark count");
    auto marks = row.marks;
    std::sort(marks.begin(), marks.end());
    for (std::size_t j = 0; j < k_size; ++j) {
      const double x = marks[j + 1] - marks[0];
      sum[j] += x;
      sum_sq[j] += x * x;
    }
  }

  const double count = static_cast<double>(rows.size());
  const double factor = static_cast<double>(target_scope) / relaxed_scope;
  std::vector<double> means(k_size);
  std::vector<double> stddevs(k_size);
  for (std::size_t j = 0; j < k_size; ++j) {
    const double mean = sum[j] / count;
    const double var = std::max(0.0, (sum_sq[j] - count * mean * mean) / (count - 1.0));
    means[j] = std::min(mean * factor, static_cast<double>(target_scope));
    stddevs[j] = std::max(std::sqrt(var) * factor, sigma_floor);
  }
  return MarkDistribution::gaussian(target_scope, std::move(means), std::move(stddevs));
}

MarkDistribution train(const TrainingConfig& config, Lfsr& rng) {
  if (config.sample_count < 2) throw UsageError("training needs at least 2 samples");
  if (config.relaxed_scope < config.target_scope) throw UsageError("relaxed scope must be >= target scope");
  if (config.budget == 0) throw UsageError("training budget must be positive");

  SearchOptions options;
  options.thresh1 = config.thresh1;
  if (config.thresh2 > 0) options.thresh2 = config.thresh2;

  std::vector<Ruler> pool;
  std::uint64_t remaining = config.budget;
  for (int s = 0; s < config.sample_count; ++s) {
    if (remaining == 0) {
      throw TrainingError("training budget exhausted after " + std::to_string(s) + " of " +
                          std::to_string(config.sample_count) + " samples");
    }
    options.restarts = remaining;
    // Validates n', k and M' against the lower bound.
    const SearchConfig search(config.rows, config.k, config.relaxed_scope, options);
    const SearchResult result = search_dts(search, rng);
    remaining -= std::min(remaining, result.stats.restarts);
    if (!result.dts) {
      throw TrainingError("training budget exhausted after " + std::to_string(s) + " of " +
                          std::to_string(config.sample_count) + " samples");
    }
    for (const auto& row : result.dts->rows()) pool.push_back(row);
  }
  return fit_distribution(pool, config.k, config.relaxed_scope, config.target_scope);
}

std::string distribution_to_json(const MarkDistribution& dist, int indent) {
  nlohmann::json j = {{"k", dist.k()}, {"M", dist.max_mark()}, {"means", dist.means()}, {"stddevs", dist.stddevs()}};
  return j.dump(indent);
}

MarkDistribution distribution_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const int k = j.at("k").get<int>();
    const int max_mark = j.at("M").get<int>();
    auto means = j.at("means").get<std::vector<double>>();
    auto stddevs = j.at("stddevs").get<std::vector<double>>();
    if (static_cast<int>(means.size()) != k) throw ParseError("`means` must have k entries");
    return MarkDistribution::gaussian(max_mark, std::move(means), std::move(stddevs));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid distribution JSON: ") + e.what());
  } catch (const UsageError& e) {
    throw ParseError(std::string("invalid distribution JSON: ") + e.what());
  }
}

}  // namespace dtss
