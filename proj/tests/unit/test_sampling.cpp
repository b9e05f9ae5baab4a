#include "dtss/sampling.hpp"

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "dtss/errors.hpp"

using namespace dtss;

namespace {

// Period by stepping one bit at a time until the start state recurs.
std::uint64_t period(Lfsr r) {
  const auto start = r.state();
  std::uint64_t steps = 0;
  do {
    r.next();
    ++steps;
  } while (r.state() != start && steps < (std::uint64_t{1} << 20));
  return steps;
}

}  // namespace

TEST_CASE("LFSR x^4 + x^3 + 1 visits all 15 non-zero states") {
  Lfsr r(4, {4, 3}, 0b0001);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 15; ++i) {
    REQUIRE(r.state() != 0);
    seen.insert(r.state());
    r.next();
  }
  CHECK(seen.size() == 15);
  CHECK(r.state() == 0b0001);
}

TEST_CASE("LFSR maximal periods") {
  CHECK(period(Lfsr(3, {3, 2}, 1)) == 7);
  CHECK(period(Lfsr(5, {5, 3}, 1)) == 31);
  CHECK(period(Lfsr(8, {8, 6, 5, 4}, 1)) == 255);
  CHECK(period(Lfsr(16, {16, 14, 13, 11}, 1)) == 65535);
  // Non-primitive x^4 + x^2 + 1 falls short.
  CHECK(period(Lfsr(4, {4, 2}, 1)) < 15);
}

TEST_CASE("LFSR construction errors and determinism") {
  CHECK_THROWS_AS(Lfsr(4, {4, 3}, 0), UsageError);
  CHECK_THROWS_AS(Lfsr(4, {4, 3}, 0x10), UsageError);  // masked to zero
  CHECK_THROWS_AS(Lfsr(4, {3}, 1), UsageError);
  CHECK_THROWS_AS(Lfsr(65, {65}, 1), UsageError);

  auto a = Lfsr::default64(42);
  auto b = Lfsr::default64(42);
  for (int i = 0; i < 100; ++i) REQUIRE(a.next_bits(37) == b.next_bits(37));
  CHECK_FALSE(Lfsr::for_stream(42, 0) == Lfsr::for_stream(42, 1));
  CHECK(Lfsr::default64(0).state() != 0);
}

TEST_CASE("word-parallel stepping equals single steps") {
  for (const auto& [width, taps] : std::vector<std::pair<int, std::vector<int>>>{
           {4, {4, 3}}, {8, {8, 6, 5, 4}}, {64, {64, 63, 61, 60}}, {33, {33, 20}}}) {
    Lfsr fast(width, taps, 0x5a5a5a5a5a5a5a5bULL);
    Lfsr slow = fast;
    for (int count : {1, 3, 16, 7, 64, 60, 2, 33}) {
      std::uint64_t expected = 0;
      for (int i = 0; i < count; ++i) expected |= static_cast<std::uint64_t>(slow.next()) << i;
      REQUIRE(fast.next_bits(count) == expected);
      REQUIRE(fast.state() == slow.state());
    }
  }
}

TEST_CASE("uniform inverse CDF") {
  const auto t = build_inverse_cdf(MarkDistribution::uniform(3, 4), 4, 2);
  for (int j = 1; j <= 3; ++j) {
    CHECK(t.lookup(j, 0) == 1);
    CHECK(t.lookup(j, 1) == 2);
    CHECK(t.lookup(j, 2) == 3);
    CHECK(t.lookup(j, 3) == 4);
  }
  CHECK_THROWS_AS(t.lookup(0, 0), UsageError);
  CHECK_THROWS_AS(t.lookup(4, 0), UsageError);
  CHECK_THROWS_AS(t.lookup(1, 4), UsageError);
}

TEST_CASE("degenerate variance collapses to the rounded mean") {
  const auto d = MarkDistribution::gaussian(50, {10.4, 20.6}, {1e-6, 1e-6});
  const auto t = build_inverse_cdf(d, 50, 16);
  for (std::uint32_t u = 0; u < (1U << 16); u += 97) {
    REQUIRE(t.lookup(1, u) == 10);
    REQUIRE(t.lookup(2, u) == 21);
  }
  // Clipping to [1, M].
  const auto clipped = build_inverse_cdf(MarkDistribution::gaussian(50, {50.0}, {1e-6}), 30, 16);
  CHECK(clipped.lookup(1, 123) == 30);
}

TEST_CASE("gaussian tables are monotone, in range and match the quantile definition") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 5 + static_cast<int>(rng() % 500);
    const double mean = 1.0 + std::uniform_real_distribution<double>(0.0, m - 1.0)(rng);
    const double sd = std::uniform_real_distribution<double>(0.5, m / 2.0)(rng);
    const int bits = 4 + static_cast<int>(rng() % 13);
    const auto t = build_inverse_cdf(MarkDistribution::gaussian(m, {mean}, {sd}), m, bits);
    int prev = 1;
    for (std::uint32_t u = 0; u < (1U << bits); ++u) {
      const int x = t.lookup(1, u);
      REQUIRE(x >= prev);
      REQUIRE(x >= 1);
      REQUIRE(x <= m);
      prev = x;
    }
    // Spot-check against cdf bracketing: x is the output iff
    // cdf(x - 1/2) <= p < cdf(x + 1/2) away from the clip range.
    auto cdf = [&](double v) { return 0.5 * std::erfc(-(v - mean) / (sd * std::sqrt(2.0))); };
    for (int probe = 0; probe < 50; ++probe) {
      const auto u = static_cast<std::uint32_t>(rng() % (1U << bits));
      const double p = (u + 0.5) / (1U << bits);
      const int x = t.lookup(1, u);
      if (x > 1) REQUIRE(p >= cdf(x - 0.5) - 1e-12);
      if (x < m) REQUIRE(p < cdf(x + 0.5) + 1e-12);
    }
  }
}

TEST_CASE("sample_mark") {
  auto rng = Lfsr::default64(1);
  const auto constant = build_inverse_cdf(MarkDistribution::gaussian(40, {17.2}, {1e-6}), 40);
  for (int i = 0; i < 100; ++i) REQUIRE(sample_mark(constant, rng, 1) == 17);
  CHECK_THROWS_AS(sample_mark(constant, rng, 2), UsageError);
  CHECK_THROWS_AS(sample_mark(constant, rng, 0), UsageError);
}

TEST_CASE("uniform sampling frequencies") {
  constexpr int kM = 20;
  constexpr int kDraws = 400000;
  const auto t = build_inverse_cdf(MarkDistribution::uniform(1, kM), kM);
  auto rng = Lfsr::default64(99);
  std::vector<int> counts(kM + 1, 0);
  for (int i = 0; i < kDraws; ++i) ++counts[static_cast<std::size_t>(sample_mark(t, rng, 1))];
  CHECK(counts[0] == 0);
  const double expected = static_cast<double>(kDraws) / kM;
  const double sigma = std::sqrt(kDraws * (1.0 / kM) * (1.0 - 1.0 / kM));
  double chi2 = 0.0;
  for (int m = 1; m <= kM; ++m) {
    CHECK(std::abs(counts[static_cast<std::size_t>(m)] - expected) < 5 * sigma);
    chi2 += std::pow(counts[static_cast<std::size_t>(m)] - expected, 2) / expected;
  }
  // 19 degrees of freedom; 0.999 quantile is about 43.8.
  CHECK(chi2 < 43.8);
}

TEST_CASE("fit_distribution") {
  // Position means 5/15/25 and stddevs sqrt(2)... from three rows at M' = 30.
  const std::vector<Ruler> rows = {Ruler{{0, 4, 14, 24}}, Ruler{{0, 5, 15, 25}}, Ruler{{0, 6, 16, 26}}};
  const auto same = fit_distribution(rows, 3, 30, 30);
  CHECK(same.means()[0] == doctest::Approx(5.0));
  CHECK(same.means()[1] == doctest::Approx(15.0));
  CHECK(same.means()[2] == doctest::Approx(25.0));
  CHECK(same.stddevs()[0] == doctest::Approx(1.0));

  // Rows are sorted before positions are read.
  const std::vector<Ruler> unsorted = {Ruler{{0, 14, 4, 24}}, Ruler{{0, 5, 25, 15}}, Ruler{{0, 6, 16, 26}}};
  CHECK(fit_distribution(unsorted, 3, 30, 30) == same);

  CHECK_THROWS_AS(fit_distribution(std::vector<Ruler>{rows[0]}, 3, 30, 30), UsageError);
  CHECK_THROWS_AS(fit_distribution(rows, 2, 30, 30), UsageError);
}

TEST_CASE("scaling by M / M'") {
  // Raw mean 50, stddev 10 at M' = 100 scaled to M = 70.
  const std::vector<Ruler> rows = {Ruler{{0, 40, 100}}, Ruler{{0, 60, 100}}};
  const auto d = fit_distribution(rows, 2, 100, 70);
  CHECK(d.means()[0] == doctest::Approx(35.0));
  CHECK(d.stddevs()[0] == doctest::Approx(10.0 * std::sqrt(2.0) * 0.7));
  CHECK(d.max_mark() == 70);

  const std::vector<Ruler> exact = {Ruler{{0, 40, 90}}, Ruler{{0, 60, 90}}, Ruler{{0, 50, 95}}, Ruler{{0, 50, 85}}};
  const auto e = fit_distribution(exact, 2, 100, 70);
  // sample stddev of {40, 60, 50, 50} is sqrt(200/3).
  CHECK(e.means()[0] == doctest::Approx(35.0));
  CHECK(e.stddevs()[0] == doctest::Approx(std::sqrt(200.0 / 3.0) * 0.7));
}

TEST_CASE("fit is scale-equivariant") {
  std::mt19937_64 rng(13);
  std::vector<Ruler> pool;
  for (int i = 0; i < 30; ++i) {
    std::vector<int> marks{0};
    for (int j = 0; j < 4; ++j) marks.push_back(marks.back() + 5 + static_cast<int>(rng() % 20));
    pool.push_back(Ruler{marks});
  }
  const auto base = fit_distribution(pool, 4, 120, 80);
  for (int c : {2, 3, 5}) {
    // Stretching the training rows and M' together changes nothing.
    std::vector<Ruler> stretched;
    for (const auto& r : pool) {
      auto marks = r.marks;
      for (auto& m : marks) m *= c;
      stretched.push_back(Ruler{marks});
    }
    const auto same = fit_distribution(stretched, 4, 120 * c, 80);
    // Scaling the target scales means and stddevs.
    const auto wider = fit_distribution(pool, 4, 120, 80 * c);
    // Stretched rows at (cM', cM) give the base output scaled by c.
    const auto both = fit_distribution(stretched, 4, 120 * c, 80 * c);
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(same.means()[j] == doctest::Approx(base.means()[j]));
      CHECK(same.stddevs()[j] == doctest::Approx(base.stddevs()[j]));
      CHECK(wider.means()[j] == doctest::Approx(base.means()[j] * c));
      CHECK(wider.stddevs()[j] == doctest::Approx(base.stddevs()[j] * c));
      CHECK(both.means()[j] == doctest::Approx(base.means()[j] * c));
      CHECK(both.stddevs()[j] == doctest::Approx(base.stddevs()[j] * c));
    }
  }
}

TEST_CASE("sigma floor") {
  const std::vector<Ruler> rows = {Ruler{{0, 5, 9}}, Ruler{{0, 5, 9}}};
  const auto d = fit_distribution(rows, 2, 9, 9);
  CHECK(d.stddevs()[0] == kSigmaFloor);
  CHECK(d.stddevs()[1] == kSigmaFloor);
}

TEST_CASE("train") {
  auto rng = Lfsr::default64(5);
  SUBCASE("identity scale") {
    TrainingConfig cfg{.rows = 2, .k = 3, .relaxed_scope = 20, .target_scope = 20, .sample_count = 10};
    const auto d = train(cfg, rng);
    CHECK(d.k() == 3);
    CHECK(d.max_mark() == 20);
    for (std::size_t j = 0; j + 1 < 3; ++j) CHECK(d.means()[j] < d.means()[j + 1]);
    for (double s : d.stddevs()) CHECK(s >= kSigmaFloor);
  }
  SUBCASE("preconditions") {
    TrainingConfig cfg{.rows = 2, .k = 3, .relaxed_scope = 20, .target_scope = 15, .sample_count = 0};
    CHECK_THROWS_AS(train(cfg, rng), UsageError);
    cfg.sample_count = 5;
    cfg.relaxed_scope = 14;
    CHECK_THROWS_AS(train(cfg, rng), UsageError);
    cfg.relaxed_scope = 11;  // below lower bound 12
    cfg.target_scope = 11;
    CHECK_THROWS_AS(train(cfg, rng), UsageError);
  }
  SUBCASE("budget exhaustion") {
    // (4,4) at its lower bound is far out of reach in one tiny run.
    TrainingConfig cfg{.rows = 4, .k = 4, .relaxed_scope = 41, .target_scope = 41, .sample_count = 3,
                       .budget = 1, .thresh1 = 1, .thresh2 = 1};
    CHECK_THROWS_AS(train(cfg, rng), TrainingError);
  }
}

TEST_CASE("distribution JSON") {
  const auto d = MarkDistribution::gaussian(30, {5.5, 20.0}, {2.0, 3.25});
  const auto json = distribution_to_json(d);
  CHECK(json == R"({"M":30,"k":2,"means":[5.5,20.0],"stddevs":[2.0,3.25]})");
  CHECK(distribution_from_json(json) == d);
  CHECK_THROWS_AS(distribution_from_json(R"({"k":3,"M":30,"means":[1,2],"stddevs":[1,1]})"), ParseError);
  CHECK_THROWS_AS(distribution_from_json("not json"), ParseError);

  const auto r = d.rescaled(60);
  CHECK(r.means()[0] == doctest::Approx(11.0));
  CHECK(r.stddevs()[1] == doctest::Approx(6.5));
}
