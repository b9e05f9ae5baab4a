#pragma once

#include <optional>
#include <span>

namespace dtss {

// Lower bound on m(n,k): exact values for k = 1 and k = 2, the parity-
// strengthened bounds for k = 3 and k = 4, and n k (k+1) / 2 beyond that.
// Throws UsageError unless n >= 1 and k >= 1.
int lower_bound(int n, int k);

enum class BoundSource {
  Improved,  // improved value with a DTS in the embedded catalog or cited work
  Prior,
};

struct BoundEntry {
  int n = 0;
  int k = 0;
  int lower = 0;
  std::optional<int> best_upper;
  BoundSource source = BoundSource::Prior;
  std::optional<int> prior_value;  // previous best upper bound, when known
};

// Registry lookup; absent outside the covered (n,k) range.
std::optional<BoundEntry> best_known(int n, int k);

// All registry entries, ordered by (k, n).
std::span<const BoundEntry> known_bounds();

// A DTS meeting a valid lower bound is optimal whatever its k.
bool is_provably_optimal(int n, int k, int scope);

}  // namespace dtss
