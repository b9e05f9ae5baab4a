#include "dtss/search.hpp"

#include <set>
#include <thread>

#include "doctest.h"
#include "dtss/bitword.hpp"
#include "dtss/bounds.hpp"
#include "dtss/errors.hpp"
#include "dtss/search_engine.hpp"
#include "oracles.hpp"

using namespace dtss;

namespace {

using Word = BasicBitWord<1>;

struct Harness {
  Harness(int n, int k, int m, std::uint64_t seed = 3)
      : table(build_inverse_cdf(MarkDistribution::uniform(k, m), m)), rng(Lfsr::default64(seed)),
        engine(n, k, m, table, rng, true) {}
  InverseCdfTable table;
  Lfsr rng;
  SearchEngine<Word> engine;
};

}  // namespace

TEST_CASE("complete_row with no attempts fails and leaves no trace") {
  Harness h(1, 2, 5);
  const auto before = h.engine.shared();
  CHECK_FALSE(h.engine.complete_row(0).has_value());
  CHECK(h.engine.shared() == before);
  CHECK(h.engine.current().mark_count == 1);
}

TEST_CASE("complete_row small cases") {
  {
    Harness h(1, 1, 1);
    const auto row = h.engine.complete_row(kDefaultThresh2);
    REQUIRE(row.has_value());
    CHECK(row->marks == std::vector<int>{0, 1});
  }
  std::set<std::vector<int>> seen;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    Harness h(1, 2, 3, seed);
    const auto row = h.engine.complete_row(kDefaultThresh2);
    REQUIRE(row.has_value());
    seen.insert(row->marks);
  }
  CHECK(seen == std::set<std::vector<int>>{{0, 1, 3}, {0, 2, 3}});
}

TEST_CASE("a failed row discards its distances") {
  // (1,3) at scope 6 with a single attempt can never finish the row.
  Harness h(2, 3, 12);
  h.engine.complete_row(kDefaultThresh2);
  h.engine.commit();
  const auto committed = h.engine.shared();
  CHECK_FALSE(h.engine.complete_row(1).has_value());
  CHECK(h.engine.shared() == committed);
}

TEST_CASE("search finds small optimal DTSs") {
  {
    const auto r = search_dts(SearchConfig(2, 2, 7));
    REQUIRE(r.found());
    CHECK(verify(*r.dts).valid);
    CHECK(scope(*r.dts) <= 7);
  }
  {
    const auto r = search_dts(SearchConfig(1, 3, 6));
    REQUIRE(r.found());
    const auto marks = r.dts->row(0).marks;
    CHECK((marks == std::vector<int>{0, 1, 4, 6} || marks == std::vector<int>{0, 2, 5, 6}));
  }
  {
    const auto r = search_dts(SearchConfig(1, 4, 11));
    REQUIRE(r.found());
    CHECK(scope(*r.dts) == 11);
  }
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_WITH_AS(SearchConfig(2, 2, 6), "scope below lower bound 7 (requested 6)", UsageError);
  CHECK_THROWS_AS(SearchConfig(0, 2, 6), UsageError);
  CHECK_THROWS_AS(SearchConfig(2, 2, 2000), UsageError);
  SearchOptions bad;
  bad.thresh2 = 0;
  CHECK_THROWS_AS(SearchConfig(2, 2, 7, bad), UsageError);
  SearchOptions wrong_k;
  wrong_k.distribution = MarkDistribution::gaussian(7, {2.0, 5.0, 7.0}, {1.0, 1.0, 1.0});
  CHECK_THROWS_AS(SearchConfig(2, 2, 7, wrong_k), UsageError);
  CHECK_THROWS_AS(run_workers(SearchConfig(2, 2, 7), 0), UsageError);
}

TEST_CASE("default thresholds") {
  const SearchConfig c(5, 3, 32);
  CHECK(c.thresh1() == 5 * kThresh1PerRow);
  CHECK(c.thresh2() == kDefaultThresh2);
  CHECK(c.distribution().mode() == SamplingMode::Uniform);
}

TEST_CASE("trained distributions are rescaled to the search scope") {
  SearchOptions o;
  o.distribution = MarkDistribution::gaussian(100, {20.0, 60.0, 100.0}, {5.0, 5.0, 5.0});
  const SearchConfig c(2, 3, 50, o);
  CHECK(c.distribution().max_mark() == 50);
  CHECK(c.distribution().means()[1] == doctest::Approx(30.0));
  CHECK(c.distribution().stddevs()[0] == doctest::Approx(2.5));
}

TEST_CASE("single-worker runs are deterministic") {
  SearchOptions o;
  o.seed = 77;
  const SearchConfig c(3, 3, 20, o);
  const auto a = run_workers(c, 1);
  const auto b = run_workers(c, 1);
  REQUIRE(a.found());
  REQUIRE(b.found());
  CHECK(*a.dts == *b.dts);
  CHECK(a.stats.outer_iterations == b.stats.outer_iterations);
  CHECK(a.stats.mark_attempts == b.stats.mark_attempts);
  CHECK(a.stats.row_replacements == b.stats.row_replacements);
  CHECK(a.stats.restarts == b.stats.restarts);

  Lfsr rng = Lfsr::for_stream(77, 0);
  const auto direct = search_dts(c, rng);
  CHECK(*direct.dts == *a.dts);
}

TEST_CASE("many workers return one valid DTS") {
  const auto r = run_workers(SearchConfig(3, 3, 20), 8);
  REQUIRE(r.found());
  CHECK(verify(*r.dts).valid);
  CHECK(scope(*r.dts) <= 20);
  CHECK(r.stats.restarts >= 1);
}

TEST_CASE("bounded restarts give up without a result") {
  SearchOptions o;
  o.restarts = 1;
  o.thresh1 = 1;
  o.thresh2 = 1;
  const auto r = search_dts(SearchConfig(15, 7, 523, o));
  CHECK_FALSE(r.found());
  CHECK_FALSE(r.cancelled);
  CHECK(r.stats.restarts == 1);
  CHECK(r.stats.outer_iterations == 1);
}

TEST_CASE("cancellation") {
  std::stop_source source;
  source.request_stop();
  // Far beyond reach: only cancellation can end this.
  const auto r = run_workers(SearchConfig(8, 5, 120), 2, source.get_token());
  CHECK_FALSE(r.found());
  CHECK(r.cancelled);

  std::stop_source later;
  std::jthread stopper([&] {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    later.request_stop();
  });
  SearchProgress progress;
  const auto r2 = run_workers(SearchConfig(8, 5, 120), 2, later.get_token(), &progress);
  CHECK(r2.cancelled);
  CHECK(progress.mark_attempts.load() == r2.stats.mark_attempts);
  CHECK(progress.restarts.load() == r2.stats.restarts);
}

TEST_CASE("debug checks stay quiet on a correct kernel") {
  SearchOptions o;
  o.debug_checks = true;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    o.seed = seed;
    const auto r = search_dts(SearchConfig(3, 3, 22, o));
    CHECK(r.found());
  }
}

TEST_CASE("every returned DTS is valid and within scope") {
  for (int n = 1; n <= 3; ++n) {
    for (int k = 1; k <= 3; ++k) {
      for (int slack : {0, 2, 5}) {
        const int m = lower_bound(n, k) + slack;
        if (n == 2 && k == 3 && slack == 0) continue;  // m(2,3) = 15 > bound 12
        if (n == 3 && k == 3 && slack < 5) continue;
        SearchOptions o;
        o.seed = static_cast<std::uint64_t>(100 * n + 10 * k + slack);
        o.restarts = 2000;
        const auto r = search_dts(SearchConfig(n, k, m, o));
        if (!r.found()) continue;
        CAPTURE(n);
        CAPTURE(k);
        CHECK(verify(*r.dts).valid);
        CHECK(scope(*r.dts) <= m);
        for (const auto& row : r.dts->rows()) CHECK(row.is_normalized());
      }
    }
  }
}

TEST_CASE("search never beats exhaustive search") {
  // At scope m(n,k) - 1 no DTS exists, so search with bounded restarts must fail.
  for (auto [n, k] : {std::pair{1, 3}, std::pair{1, 4}, std::pair{2, 2}}) {
    const int best = testing::brute_force_min_scope(n, k, lower_bound(n, k));
    if (best - 1 < lower_bound(n, k)) continue;
    SearchOptions o;
    o.restarts = 50;
    CHECK_FALSE(search_dts(SearchConfig(n, k, best - 1, o)).found());
  }
}
