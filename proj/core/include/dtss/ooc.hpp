#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "dtss/dts.hpp"

namespace dtss {

// (N, w) constant-weight code with codewords stored as support sets: each
// codeword is a sorted list of w distinct positions in [0, N).
class OocCode {
 public:
  // Throws UsageError if any support set is out of range, has repeats or the
  // wrong size. Supports are sorted on construction.
  OocCode(int length, int weight, std::vector<std::vector<int>> codewords);

  int length() const noexcept { return length_; }
  int weight() const noexcept { return weight_; }
  const std::vector<std::vector<int>>& codewords() const noexcept { return codewords_; }

  friend bool operator==(const OocCode&, const OocCode&) = default;

 private:
  int length_;
  int weight_;
  std::vector<std::vector<int>> codewords_;
};

// Code of length 2 m(A) + 1 and weight k+1 whose supports are the rows.
// Throws UsageError for an invalid DTS.
OocCode dts_to_sooc(const Dts& d);

enum class CorrelationKind { Auto, Cross };

struct CorrelationViolation {
  CorrelationKind kind;
  std::size_t first;   // codeword index
  std::size_t second;  // equal to first for autocorrelation
  int shift;           // cyclic shift tau
  int value;           // correlation at that shift, > 1

  friend bool operator==(const CorrelationViolation&, const CorrelationViolation&) = default;
};

struct OocReport {
  bool valid = true;
  std::vector<CorrelationViolation> violations;
};

// Checks autocorrelation <= 1 for every codeword and shift in [1, N) and
// cross-correlation <= 1 for every unordered pair and shift in [0, N).
// Correlations are counted from support differences modulo N.
OocReport verify_ooc(const OocCode& code);

// Text format: header `N w`, then one line of w positions per codeword.
// '#' starts a comment.
OocCode read_ooc_text(std::istream& in);
void write_ooc_text(std::ostream& out, const OocCode& code);
OocCode load_ooc(const std::filesystem::path& path);
void save_ooc(const std::filesystem::path& path, const OocCode& code);

}  // namespace dtss
