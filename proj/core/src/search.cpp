#include "dtss/search.hpp"

#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "dtss/bitword.hpp"
#include "dtss/bounds.hpp"
#include "dtss/errors.hpp"
#include "dtss/search_engine.hpp"

namespace dtss {

SearchConfig::SearchConfig(int n, int k, int max_scope, SearchOptions options)
    : n_(n), k_(k), max_scope_(max_scope), options_(std::move(options)) {
  if (n < 1 || k < 1) throw UsageError("search needs n >= 1 and k >= 1");
  const int bound = lower_bound(n, k);
  if (max_scope < bound) {
    throw UsageError("scope below lower bound " + std::to_string(bound) + " (requested " + std::to_string(max_scope) +
                     ")");
  }
  if (static_cast<std::size_t>(max_scope) + 1 > kMaxBitWidth) {
    throw UsageError("scope " + std::to_string(max_scope) + " exceeds the supported maximum " +
                     std::to_string(kMaxBitWidth - 1));
  }
  if (options_.thresh1 == 0) options_.thresh1 = kThresh1PerRow * n;
  if (options_.thresh1 < 1 || options_.thresh2 < 1) throw UsageError("thresh1 and thresh2 must be >= 1");
  if (!options_.distribution) {
    options_.distribution = MarkDistribution::uniform(k, max_scope);
  } else {
    if (options_.distribution->k() != k) {
      throw UsageError("distribution has k = " + std::to_string(options_.distribution->k()) + ", search has k = " +
                       std::to_string(k));
    }
    if (options_.distribution->max_mark() != max_scope) {
      options_.distribution = options_.distribution->rescaled(max_scope);
    }
  }
  if (options_.precision_bits < 1 || options_.precision_bits > 16) {
    throw UsageError("precision bits must be in [1, 16]");
  }
}

namespace {

template <class Word>
SearchResult search_with(const SearchConfig& config, const InverseCdfTable& table, Lfsr& rng, std::stop_token stop,
                         SearchProgress* progress) {
  const auto start = std::chrono::steady_clock::now();
  SearchEngine<Word> engine(config.n(), config.k(), config.max_scope(), table, rng, config.debug_checks(), progress);
  SearchResult result;
  while (config.restarts() == 0 || engine.stats().restarts < config.restarts()) {
    const auto outcome = engine.run(config.thresh1(), config.thresh2(), stop);
    if (outcome == SearchEngine<Word>::RunOutcome::Complete) {
      Dts dts = engine.dts();
      const auto report = verify(dts);
      if (!report.valid || report.scope > config.max_scope()) {
        throw InvariantError("search produced a DTS that fails verification");
      }
      result.dts = std::move(dts);
      break;
    }
    if (outcome == SearchEngine<Word>::RunOutcome::Cancelled) {
      result.cancelled = true;
      break;
    }
  }
  result.stats = engine.stats();
  result.stats.wall_time = std::chrono::steady_clock::now() - start;
  return result;
}

SearchResult dispatch(const SearchConfig& config, const InverseCdfTable& table, Lfsr& rng, std::stop_token stop,
                      SearchProgress* progress) {
  const auto width = static_cast<std::size_t>(config.max_scope()) + 1;
  if (width <= 64) return search_with<BasicBitWord<1>>(config, table, rng, stop, progress);
  if (width <= 128) return search_with<BasicBitWord<2>>(config, table, rng, stop, progress);
  if (width <= 256) return search_with<BasicBitWord<4>>(config, table, rng, stop, progress);
  if (width <= 512) return search_with<BasicBitWord<8>>(config, table, rng, stop, progress);
  return search_with<BitWord>(config, table, rng, stop, progress);
}

InverseCdfTable table_for(const SearchConfig& config) {
  return build_inverse_cdf(config.distribution(), config.max_scope(), config.precision_bits());
}

}  // namespace

SearchResult search_dts(const SearchConfig& config, Lfsr& rng, std::stop_token stop, SearchProgress* progress) {
  return dispatch(config, table_for(config), rng, stop, progress);
}

SearchResult search_dts(const SearchConfig& config) {
  Lfsr rng = Lfsr::for_stream(config.seed(), 0);
  return search_dts(config, rng);
}

SearchResult run_workers(const SearchConfig& config, int worker_count, std::stop_token stop,
                         SearchProgress* progress) {
  if (worker_count < 1) throw UsageError("worker count must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  const InverseCdfTable table = table_for(config);

  std::stop_source cancel;
  std::stop_callback forward(stop, [&cancel] { cancel.request_stop(); });

  std::mutex mutex;
  SearchResult combined;
  std::exception_ptr failure;
  {
    std::vector<std::jthread> workers;
    workers.reserve(static_cast<std::size_t>(worker_count));
    for (int i = 0; i < worker_count; ++i) {
      workers.emplace_back([&, i] {
        try {
          Lfsr rng = Lfsr::for_stream(config.seed(), static_cast<std::uint64_t>(i));
          SearchResult mine = dispatch(config, table, rng, cancel.get_token(), progress);
          std::scoped_lock lock(mutex);
          combined.stats += mine.stats;
          if (mine.dts && !combined.dts) {
            combined.dts = std::move(mine.dts);
            cancel.request_stop();
          }
        } catch (...) {
          std::scoped_lock lock(mutex);
          if (!failure) failure = std::current_exception();
          cancel.request_stop();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  combined.cancelled = !combined.dts && stop.stop_requested();
  combined.stats.wall_time = std::chrono::steady_clock::now() - start;
  return combined;
}

}  // namespace dtss
