#include "dtss/dts_io.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "dtss/errors.hpp"
#include "json.hpp"
#include "text_lines.hpp"

namespace dtss {

namespace {

Dts check_declared_scope(Dts d, int declared, std::size_t line) {
  const int actual = scope(d);
  if (actual != declared) {
    throw ParseError("declared scope " + std::to_string(declared) + " but rows have scope " +
                         std::to_string(actual),
                     line);
  }
  return d;
}

}  // namespace

Dts read_dts_text(std::istream& in) {
  detail::LineReader reader(in);
  auto header = reader.next_tokens();
  if (!header) throw ParseError("missing header line");
  const std::size_t header_line = reader.line_number();
  if (header->size() != 3 && header->size() != 4) {
    throw ParseError("header must be `n k scope [omit-zero]`", header_line);
  }
  const int n = detail::parse_int((*header)[0], header_line);
  const int k = detail::parse_int((*header)[1], header_line);
  const int declared = detail::parse_int((*header)[2], header_line);
  bool omit_zero = false;
  if (header->size() == 4) {
    if ((*header)[3] != "omit-zero") throw ParseError("unknown header flag `" + (*header)[3] + "`", header_line);
    omit_zero = true;
  }
  if (n < 1 || k < 0) throw ParseError("header needs n >= 1 and k >= 0", header_line);

  const std::size_t per_row = static_cast<std::size_t>(k) + (omit_zero ? 0 : 1);
  std::vector<Ruler> rows;
  rows.reserve(static_cast<std::size_t>(n));
  while (rows.size() < static_cast<std::size_t>(n)) {
    auto tokens = reader.next_tokens();
    if (!tokens) {
      throw ParseError("expected " + std::to_string(n) + " rows, found " + std::to_string(rows.size()),
                       reader.line_number());
    }
    if (tokens->size() != per_row) {
      throw ParseError("expected " + std::to_string(per_row) + " marks, found " + std::to_string(tokens->size()),
                       reader.line_number());
    }
    Ruler r;
    if (omit_zero) r.marks.push_back(0);
    for (const auto& t : *tokens) r.marks.push_back(detail::parse_int(t, reader.line_number()));
    rows.push_back(std::move(r));
  }
  if (reader.next_tokens()) throw ParseError("unexpected content after last row", reader.line_number());
  return check_declared_scope(Dts(n, k, std::move(rows)), declared, header_line);
}

void write_dts_text(std::ostream& out, const Dts& d) {
  out << d.n() << ' ' << d.k() << ' ' << scope(d) << '\n';
  for (const auto& r : d.rows()) {
    for (std::size_t j = 0; j < r.marks.size(); ++j) out << (j ? " " : "") << r.marks[j];
    out << '\n';
  }
}

std::string dts_to_json(const Dts& d, int indent) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : d.rows()) rows.push_back(r.marks);
  nlohmann::json j = {{"n", d.n()}, {"k", d.k()}, {"scope", scope(d)}, {"rows", rows}};
  return j.dump(indent);
}

Dts dts_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    const int n = j.at("n").get<int>();
    const int k = j.at("k").get<int>();
    const int declared = j.at("scope").get<int>();
    std::vector<Ruler> rows;
    for (const auto& row : j.at("rows")) rows.push_back(Ruler{row.get<std::vector<int>>()});
    return check_declared_scope(Dts(n, k, std::move(rows)), declared, 0);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid DTS JSON: ") + e.what());
  } catch (const UsageError& e) {
    throw ParseError(std::string("invalid DTS JSON: ") + e.what());
  }
}

Dts load_dts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return dts_from_json(text);
  std::istringstream is(text);
  return read_dts_text(is);
}

void save_dts(const std::filesystem::path& path, const Dts& d, bool json) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  if (json) {
    out << dts_to_json(d, 2) << '\n';
  } else {
    write_dts_text(out, d);
  }
}

}  // namespace dtss
