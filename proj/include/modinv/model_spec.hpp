#pragma once

// Model specs of the form family:params, e.g. su2:10, sun:3,5, so16l:1, zn:10,9, ising:3.

#include "modinv/modular_data.hpp"

#include <string>
#include <vector>

namespace modinv {

struct ModelSpec {
  /// One of su2, sun, so16l, zn, ising.
  std::string family;
  std::vector<int> params;

  /// Canonical text form ("so16l_level1:2" normalizes to "so16l:2").
  std::string to_string() const;
};

/// Throws std::invalid_argument on a malformed spec or unknown family.
ModelSpec parse_model_spec(const std::string& text);

ModularData build_model(const ModelSpec& spec);
ModularData build_model(const std::string& text);

/// Grammar summary for --help.
std::string model_spec_grammar();

}  // namespace modinv
