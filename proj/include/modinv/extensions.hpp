#pragma once

// Simple currents, Z_n invariants, branching tables and type I block fits.

#include "modinv/branching.hpp"
#include "modinv/modular_data.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace modinv {

struct SimpleCurrent {
  int label = 0;
  int order = 1;
  Rational h;
  /// h is a multiple of 1/order.
  bool rehren = false;
  /// Every power of the current has integer weight.
  bool local = false;
};

struct SimpleCurrentGroup {
  /// Labels with d = 1, ascending.
  std::vector<int> members;
  /// Generators of a direct-product decomposition into cyclic factors.
  std::vector<SimpleCurrent> generators;
  /// product[a][b] = label of a x b for members a, b (indices into members).
  std::vector<std::vector<int>> product;

  int order() const { return static_cast<int>(members.size()); }
  std::vector<int> factor_orders() const;
};

SimpleCurrentGroup simple_current_group(const ModularData& md);

/// n-tilde: n for odd n, n/2 for even n.
int zn_tilde(int n);

/// Z^(delta) for the Z_n theory; rejects delta not dividing n-tilde. The a parameter only
/// selects the model and is validated.
IntMatrix zn_invariant(int n, int a, int delta);

struct ZnInvariant {
  int delta = 1;
  IntMatrix z;
};

/// One invariant per divisor of n-tilde, in ascending divisor order.
std::vector<ZnInvariant> zn_classify_all(int n, int a);

/// Raised when b^T Zext b fails verification on the base model.
class BranchingInconsistent : public std::runtime_error {
 public:
  BranchingInconsistent(const std::string& what, IntMatrix z) : std::runtime_error(what), z(std::move(z)) {}
  IntMatrix z;
};

/// Z = b^T Zext b, verified against the base model.
IntMatrix restrict_invariant(const ModularData& base, const BranchingTable& bt, const IntMatrix& zext);

/// Permutation matrix delta_{tau, omega(tau')} on the extended labels (empty omega = identity).
IntMatrix extended_permutation(const BranchingTable& bt, const std::vector<int>& omega);

/// Structural problems of a table against its base model: vacuum row, weights, dimension scale.
std::vector<std::string> branching_violations(const ModularData& base, const BranchingTable& bt);

class FitLimitExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lexicographically least decomposition Z = sum_tau b_tau b_tau^T with b_0 the vacuum row.
std::optional<BranchingTable> fit_type1_blocks(const ModularData& md, const IntMatrix& z,
                                               std::int64_t node_limit = 1'000'000);

/// Branching table fixture plus the extended conjugation and any named sector multisets.
struct EmbeddingFixture {
  BranchingTable table;
  /// Extended charge conjugation (identity when absent).
  std::vector<int> ext_conj;
  /// Named automorphisms of the extended labels, e.g. the E7 twist of D10.
  std::map<std::string, std::vector<int>> automorphisms;
  /// Expected restricted matrices, keyed by extended invariant name.
  std::map<std::string, IntMatrix> expected;
};

/// A multiset of base labels (e.g. a dual canonical endomorphism sector).
struct SectorMultiset {
  std::string name;
  std::string base_model;
  /// (label index, multiplicity)
  std::vector<std::pair<int, int>> sectors;
  std::string source;
};

struct FixtureLibrary {
  std::map<std::string, EmbeddingFixture> embeddings;
  std::map<std::string, SectorMultiset> multisets;
};

/// Directory holding the shipped fixtures; MODINV_FIXTURES overrides the build-time default.
std::filesystem::path fixture_dir();

/// Loads every fixture under fixture_dir()/embeddings; cached after the first call.
const FixtureLibrary& builtin_fixtures();

std::map<std::string, BranchingTable> builtin_embeddings();

}  // namespace modinv
