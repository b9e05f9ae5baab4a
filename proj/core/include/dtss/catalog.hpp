#pragma once

#include <optional>
#include <vector>

#include "dtss/dts.hpp"

namespace dtss {

// A record DTS shipped with the library, with the scope the improved-bounds
// registry claims for it.
struct CatalogEntry {
  int n = 0;
  int k = 0;
  int claimed_scope = 0;
  std::optional<int> prior_scope;  // previous best upper bound
  Dts dts;
};

// All embedded entries, ordered by (k, n). Parsed and checked once on first
// use: every file must match its compiled-in SHA-256 digest, verify() as
// valid and have exactly the claimed scope; otherwise IntegrityError.
const std::vector<CatalogEntry>& load_catalog();

// nullptr when (n, k) is not in the catalog.
const CatalogEntry* lookup(int n, int k);

}  // namespace dtss
