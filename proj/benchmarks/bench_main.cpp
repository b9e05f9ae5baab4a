#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "dtss/bitword.hpp"
#include "dtss/dts.hpp"
#include "dtss/insertion.hpp"
#include "dtss/sampling.hpp"
#include "dtss/search.hpp"

namespace {

using namespace dtss;

// Insertion attempts into a row that already holds a few marks, against a
// used-distance set about a third full.
template <class Word>
void BM_TryInsert(benchmark::State& state) {
  const auto width = static_cast<std::size_t>(state.range(0));
  const int max_mark = static_cast<int>(width) - 1;
  std::mt19937_64 rng(1);
  SharedDistances<Word> shared(width);
  for (std::size_t d = 1; d < width; ++d) {
    if (rng() % 3 == 0) shared.used.set(d);
  }
  auto row = RowState<Word>::fresh(width);
  std::vector<int> marks(4096);
  for (auto& m : marks) m = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_mark));
  std::size_t i = 0;
  for (auto _ : state) {
    auto r = row;
    auto s = shared;
    benchmark::DoNotOptimize(try_insert_mark(r, s, marks[i++ & 4095]));
  }
}
BENCHMARK(BM_TryInsert<BasicBitWord<1>>)->Arg(64);
BENCHMARK(BM_TryInsert<BasicBitWord<2>>)->Arg(128);
BENCHMARK(BM_TryInsert<BasicBitWord<4>>)->Arg(256);
BENCHMARK(BM_TryInsert<BasicBitWord<9>>)->Arg(524);

void BM_LfsrBits(benchmark::State& state) {
  auto rng = Lfsr::default64(3);
  const int bits = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rng.next_bits(bits));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_LfsrBits)->Arg(1)->Arg(16)->Arg(64);

void BM_SampleMark(benchmark::State& state) {
  const auto table = build_inverse_cdf(MarkDistribution::gaussian(200, {40.0, 110.0, 180.0}, {12.0, 15.0, 9.0}), 200);
  auto rng = Lfsr::default64(4);
  int j = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(table.lookup_unchecked(1 + j, static_cast<std::uint32_t>(rng.next_bits(16))));
    j = (j + 1) % 3;
  }
}
BENCHMARK(BM_SampleMark);

void BM_BuildGaussianTable(benchmark::State& state) {
  const auto dist = MarkDistribution::gaussian(523, std::vector<double>(7, 200.0), std::vector<double>(7, 40.0));
  for (auto _ : state) benchmark::DoNotOptimize(build_inverse_cdf(dist, 523));
}
BENCHMARK(BM_BuildGaussianTable)->Unit(benchmark::kMillisecond);

void BM_Search(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int k = static_cast<int>(state.range(1));
  const int m = static_cast<int>(state.range(2));
  std::uint64_t seed = 1;
  std::uint64_t attempts = 0;
  for (auto _ : state) {
    SearchOptions o;
    o.seed = seed++;
    const auto r = search_dts(SearchConfig(n, k, m, o));
    attempts += r.stats.mark_attempts;
    benchmark::DoNotOptimize(r.found());
  }
  state.counters["attempts/s"] = benchmark::Counter(static_cast<double>(attempts), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Search)->Args({2, 2, 7})->Args({5, 3, 32})->Args({5, 3, 30})->Unit(benchmark::kMillisecond);

void BM_Verify(benchmark::State& state) {
  std::vector<Ruler> rows;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 15; ++i) {
    std::vector<int> marks{0};
    for (int j = 0; j < 7; ++j) marks.push_back(marks.back() + 1 + static_cast<int>(rng() % 70));
    rows.push_back(Ruler{marks});
  }
  const Dts d(15, 7, rows);
  for (auto _ : state) benchmark::DoNotOptimize(verify(d));
}
BENCHMARK(BM_Verify);

}  // namespace

BENCHMARK_MAIN();
