#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "dtss/dts.hpp"

namespace dtss {

// Text format:
//
//   # comment lines start with '#'
//   n k scope [omit-zero]
//   0 a1 ... ak        (n rows)
//
// With the optional `omit-zero` header flag each row lists only a1..ak and the
// leading zero is restored on load. The declared scope must match the rows.
Dts read_dts_text(std::istream& in);
void write_dts_text(std::ostream& out, const Dts& d);

// JSON mirror: {"n": .., "k": .., "scope": .., "rows": [[0, ..], ..]}
std::string dts_to_json(const Dts& d, int indent = -1);
Dts dts_from_json(std::string_view text);

// Picks the format from the first non-blank character ('{' means JSON).
Dts load_dts(const std::filesystem::path& path);
void save_dts(const std::filesystem::path& path, const Dts& d, bool json = false);

}  // namespace dtss
