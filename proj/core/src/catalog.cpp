#include "dtss/catalog.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <sstream>
#include <string>

#include <openssl/evp.h>

#include "catalog_data.hpp"
#include "dtss/bounds.hpp"
#include "dtss/dts_io.hpp"
#include "dtss/errors.hpp"

namespace dtss {

namespace {

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int size = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &size, EVP_sha256(), nullptr) != 1) {
    throw IntegrityError("SHA-256 computation failed");
  }
  std::string hex;
  hex.reserve(size * 2);
  char buf[3];
  for (unsigned int i = 0; i < size; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

CatalogEntry load_entry(const detail::EmbeddedFile& file) {
  const std::string name(file.name);
  if (sha256_hex(file.text) != file.sha256) throw IntegrityError("catalog file " + name + " digest mismatch");

  std::istringstream in{std::string(file.text)};
  Dts dts = [&] {
    try {
      return read_dts_text(in);
    } catch (const ParseError& e) {
      throw IntegrityError("catalog file " + name + ": " + e.what());
    }
  }();

  const auto report = verify(dts);
  if (!report.valid) throw IntegrityError("catalog file " + name + " is not a valid DTS");
  const auto bound = best_known(dts.n(), dts.k());
  if (!bound || !bound->best_upper) throw IntegrityError("catalog file " + name + " has no registry entry");
  if (report.scope != *bound->best_upper) {
    throw IntegrityError("catalog file " + name + " has scope " + std::to_string(report.scope) + ", registry claims " +
                         std::to_string(*bound->best_upper));
  }
  return CatalogEntry{dts.n(), dts.k(), *bound->best_upper, bound->prior_value, std::move(dts)};
}

}  // namespace

const std::vector<CatalogEntry>& load_catalog() {
  static const std::vector<CatalogEntry> entries = [] {
    std::vector<CatalogEntry> out;
    for (const auto& file : detail::embedded_catalog_files()) out.push_back(load_entry(file));
    std::sort(out.begin(), out.end(),
              [](const CatalogEntry& a, const CatalogEntry& b) { return std::pair(a.k, a.n) < std::pair(b.k, b.n); });
    return out;
  }();
  return entries;
}

const CatalogEntry* lookup(int n, int k) {
  const auto& entries = load_catalog();
  auto it = std::find_if(entries.begin(), entries.end(), [&](const CatalogEntry& e) { return e.n == n && e.k == k; });
  return it == entries.end() ? nullptr : &*it;
}

}  // namespace dtss
