#include "dtss/dts.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "dtss/errors.hpp"

namespace dtss {

bool Ruler::is_normalized() const noexcept {
  if (marks.empty() || marks.front() != 0) return false;
  return std::adjacent_find(marks.begin(), marks.end(), std::greater_equal<>()) == marks.end();
}

int Ruler::length() const noexcept {
  if (marks.empty()) return 0;
  const auto [lo, hi] = std::minmax_element(marks.begin(), marks.end());
  return *hi - *lo;
}

Dts::Dts(int n, int k, std::vector<Ruler> rows) : n_(n), k_(k), rows_(std::move(rows)) {
  if (n < 1 || k < 0) {
    throw UsageError("invalid DTS shape (" + std::to_string(n) + "," + std::to_string(k) + ")");
  }
  if (rows_.size() != static_cast<std::size_t>(n)) {
    throw UsageError("expected " + std::to_string(n) + " rows, got " + std::to_string(rows_.size()));
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].marks.size() != static_cast<std::size_t>(k) + 1) {
      throw UsageError("row " + std::to_string(i) + " has " + std::to_string(rows_[i].marks.size()) +
                       " marks, expected " + std::to_string(k + 1));
    }
  }
}

Dts Dts::from_rows(std::vector<std::vector<int>> rows) {
  if (rows.empty() || rows.front().empty()) throw UsageError("DTS needs at least one non-empty row");
  const int k = static_cast<int>(rows.front().size()) - 1;
  std::vector<Ruler> rulers;
  rulers.reserve(rows.size());
  for (auto& r : rows) rulers.push_back(Ruler{std::move(r)});
  const int n = static_cast<int>(rulers.size());
  return Dts(n, k, std::move(rulers));
}

Ruler normalize(std::span<const int> raw_marks) {
  if (raw_marks.empty()) throw UsageError("cannot normalize an empty ruler");
  std::vector<int> marks(raw_marks.begin(), raw_marks.end());
  std::sort(marks.begin(), marks.end());
  if (std::adjacent_find(marks.begin(), marks.end()) != marks.end()) {
    throw UsageError("invalid ruler: repeated mark");
  }
  const int base = marks.front();
  for (int& m : marks) m -= base;
  return Ruler{std::move(marks)};
}

int scope(const Dts& d) noexcept {
  int s = 0;
  for (const auto& r : d.rows()) s = std::max(s, r.length());
  return s;
}

std::vector<int> distances(const Ruler& r) {
  std::vector<int> out;
  const auto& m = r.marks;
  out.reserve(m.size() * (m.size() - (m.empty() ? 0 : 1)) / 2);
  for (std::size_t j = 0; j < m.size(); ++j) {
    for (std::size_t i = 0; i < j; ++i) out.push_back(std::abs(m[j] - m[i]));
  }
  std::sort(out.begin(), out.end());
  return out;
}

VerifyReport verify(const Dts& d) {
  VerifyReport report;
  report.scope = scope(d);

  // owner[dist] = row that first produced dist, or npos.
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> owner(static_cast<std::size_t>(report.scope) + 1, npos);

  for (std::size_t row = 0; row < d.rows().size(); ++row) {
    const auto& r = d.rows()[row];
    if (!r.is_normalized()) report.normalization_errors.push_back(row);
    for (int dist : distances(r)) {
      auto& slot = owner[static_cast<std::size_t>(dist)];
      if (dist == 0 || slot != npos) {
        report.duplicate_distances.push_back({dist, slot == npos ? row : slot, row});
      } else {
        slot = row;
      }
    }
  }
  report.valid = report.duplicate_distances.empty() && report.normalization_errors.empty();
  return report;
}

bool is_perfect(const Dts& d) {
  if (!verify(d).valid) throw UsageError("is_perfect requires a valid DTS");
  // Distances are distinct, so the set is {1..T} exactly when none exceeds T.
  return scope(d) <= distance_count(d.n(), d.k());
}

}  // namespace dtss
