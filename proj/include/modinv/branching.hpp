#pragma once

#include "modinv/cyclotomic.hpp"
#include "modinv/rational.hpp"

#include <string>
#include <vector>

namespace modinv {

/// Branching coefficients b_{tau,l} of an extension, optionally with an automorphism omega of
/// the extended labels (empty means identity).
struct BranchingTable {
  std::string name;
  /// Model spec of the base theory, e.g. "su2:10".
  std::string base_model;
  std::vector<std::string> extended_labels;
  std::vector<Rational> extended_h;
  /// (#extended) x rank.
  IntMatrix b;
  std::vector<int> omega;
  std::string source;

  int extended_rank() const { return static_cast<int>(b.rows()); }
};

}  // namespace modinv
