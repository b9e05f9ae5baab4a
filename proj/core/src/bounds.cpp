#include "dtss/bounds.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "dtss/errors.hpp"

namespace dtss {

int lower_bound(int n, int k) {
  if (n < 1 || k < 1) {
    throw UsageError("lower_bound needs n >= 1 and k >= 1, got (" + std::to_string(n) + "," +
                     std::to_string(k) + ")");
  }
  switch (k) {
    case 1:
      return n;
    case 2:
      // Parity of the distance sum rules out 3n when n = 2, 3 (mod 4).
      return (n % 4 == 0 || n % 4 == 1) ? 3 * n : 3 * n + 1;
    case 3:
      return 6 * n;
    case 4:
      return n % 2 == 0 ? 10 * n : 10 * n + 1;
    default:
      return n * k * (k + 1) / 2;
  }
}

namespace {

struct Improvement {
  int n, k, upper, prior;
};

// (n, k, improved upper bound, previous best)
constexpr std::array<Improvement, 36> kImprovements = {{
    {12, 4, 120, 122}, {13, 4, 131, 133}, {14, 4, 140, 143}, {15, 4, 151, 154},

    {7, 5, 112, 113},  {8, 5, 128, 129},  {9, 5, 145, 146},  {10, 5, 163, 164}, {11, 5, 180, 181},
    {12, 5, 196, 197}, {13, 5, 213, 214}, {14, 5, 230, 231}, {15, 5, 249, 250},

    {5, 6, 118, 119},  {6, 6, 144, 145},  {7, 6, 170, 171},  {8, 6, 196, 197},  {9, 6, 221, 222},
    {10, 6, 247, 248}, {11, 6, 273, 274}, {12, 6, 298, 299}, {13, 6, 322, 324}, {14, 6, 351, 352},
    {15, 6, 373, 374},

    {4, 7, 134, 135},  {5, 7, 170, 171},  {6, 7, 208, 210},  {7, 7, 249, 251},  {8, 7, 281, 282},
    {9, 7, 317, 318},  {10, 7, 351, 352}, {11, 7, 391, 393}, {12, 7, 430, 431}, {13, 7, 461, 464},
    {14, 7, 498, 499}, {15, 7, 523, 524},
}};

const std::array<BoundEntry, kImprovements.size()>& registry() {
  static const auto table = [] {
    std::array<BoundEntry, kImprovements.size()> out{};
    for (std::size_t i = 0; i < kImprovements.size(); ++i) {
      const auto& e = kImprovements[i];
      out[i] = BoundEntry{e.n, e.k, lower_bound(e.n, e.k), e.upper, BoundSource::Improved, e.prior};
    }
    return out;
  }();
  return table;
}

}  // namespace

std::optional<BoundEntry> best_known(int n, int k) {
  const auto& table = registry();
  auto it = std::find_if(table.begin(), table.end(), [&](const BoundEntry& e) { return e.n == n && e.k == k; });
  if (it == table.end()) return std::nullopt;
  return *it;
}

std::span<const BoundEntry> known_bounds() { return registry(); }

bool is_provably_optimal(int n, int k, int scope) {
  if (n < 1 || k < 1 || scope < 1) return false;
  return scope == lower_bound(n, k);
}

}  // namespace dtss
