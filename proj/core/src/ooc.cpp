#include "dtss/ooc.hpp"

#include <algorithm>
#include <fstream>
#include <string>

#include "dtss/errors.hpp"
#include "text_lines.hpp"

namespace dtss {

namespace {

// Empty string when the support is acceptable, otherwise the reason.
std::string support_problem(const std::vector<int>& support, int length, int weight) {
  if (static_cast<int>(support.size()) != weight) {
    return "expected weight " + std::to_string(weight) + ", found " + std::to_string(support.size());
  }
  for (int x : support) {
    if (x < 0 || x >= length) return "position " + std::to_string(x) + " outside [0, " + std::to_string(length) + ")";
  }
  auto sorted = support;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return "repeated position";
  return {};
}

}  // namespace

OocCode::OocCode(int length, int weight, std::vector<std::vector<int>> codewords)
    : length_(length), weight_(weight), codewords_(std::move(codewords)) {
  if (length < 1 || weight < 1) throw UsageError("OOC needs N >= 1 and w >= 1");
  for (std::size_t i = 0; i < codewords_.size(); ++i) {
    if (auto problem = support_problem(codewords_[i], length, weight); !problem.empty()) {
      throw UsageError("codeword " + std::to_string(i) + ": " + problem);
    }
    std::sort(codewords_[i].begin(), codewords_[i].end());
  }
}

OocCode dts_to_sooc(const Dts& d) {
  const auto report = verify(d);
  if (!report.valid) throw UsageError("dts_to_sooc requires a valid DTS");
  std::vector<std::vector<int>> words;
  words.reserve(d.rows().size());
  for (const auto& r : d.rows()) words.push_back(r.marks);
  return OocCode(2 * report.scope + 1, d.k() + 1, std::move(words));
}

OocReport verify_ooc(const OocCode& code) {
  OocReport report;
  const int n = code.length();
  std::vector<int> count(static_cast<std::size_t>(n), 0);
  std::vector<int> touched;

  // Tallies (b - a) mod N over a in x, b in y, reports shifts above 1 and
  // clears the tally.
  auto correlate = [&](const std::vector<int>& x, const std::vector<int>& y, CorrelationKind kind, std::size_t i,
                       std::size_t j) {
    for (int a : x) {
      for (int b : y) {
        const int shift = ((b - a) % n + n) % n;
        if (kind == CorrelationKind::Auto && shift == 0) continue;
        if (count[static_cast<std::size_t>(shift)]++ == 0) touched.push_back(shift);
      }
    }
    std::sort(touched.begin(), touched.end());
    for (int shift : touched) {
      auto& c = count[static_cast<std::size_t>(shift)];
      if (c > 1) report.violations.push_back({kind, i, j, shift, c});
      c = 0;
    }
    touched.clear();
  };

  const auto& words = code.codewords();
  for (std::size_t i = 0; i < words.size(); ++i) {
    correlate(words[i], words[i], CorrelationKind::Auto, i, i);
  }
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t j = i + 1; j < words.size(); ++j) {
      correlate(words[i], words[j], CorrelationKind::Cross, i, j);
    }
  }
  report.valid = report.violations.empty();
  return report;
}

OocCode read_ooc_text(std::istream& in) {
  detail::LineReader reader(in);
  auto header = reader.next_tokens();
  if (!header) throw ParseError("missing header line");
  const std::size_t header_line = reader.line_number();
  if (header->size() != 2) throw ParseError("header must be `N w`", header_line);
  const int length = detail::parse_int((*header)[0], header_line);
  const int weight = detail::parse_int((*header)[1], header_line);
  if (length < 1 || weight < 1) throw ParseError("header needs N >= 1 and w >= 1", header_line);

  std::vector<std::vector<int>> words;
  while (auto tokens = reader.next_tokens()) {
    std::vector<int> support;
    for (const auto& t : *tokens) support.push_back(detail::parse_int(t, reader.line_number()));
    if (auto problem = support_problem(support, length, weight); !problem.empty()) {
      throw ParseError(problem, reader.line_number());
    }
    words.push_back(std::move(support));
  }
  return OocCode(length, weight, std::move(words));
}

void write_ooc_text(std::ostream& out, const OocCode& code) {
  out << code.length() << ' ' << code.weight() << '\n';
  for (const auto& w : code.codewords()) {
    for (std::size_t i = 0; i < w.size(); ++i) out << (i ? " " : "") << w[i];
    out << '\n';
  }
}

OocCode load_ooc(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_ooc_text(in);
}

void save_ooc(const std::filesystem::path& path, const OocCode& code) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  write_ooc_text(out, code);
}

}  // namespace dtss
