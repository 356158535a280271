#pragma once

// Physical modular invariants: bounds, the commutant of S and T, two independent
// exhaustive searches, verification and classification.

#include "modinv/branching.hpp"
#include "modinv/modular_data.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace modinv {

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct Bounds {
  /// floor(d_l d_m) on unmasked cells, 0 where h_l != h_m mod 1.
  IntMatrix bound;
  /// true where h_l == h_m mod 1.
  BoolMatrix mask;
  /// Global budget w = 1 / S_00^2.
  double w = 1.0;
};

Bounds bound_matrix(const ModularData& md);

struct CommutantBasis {
  /// Cells (row, col) carrying the unknowns, in the order used by the vectors below.
  std::vector<std::pair<int, int>> cells;
  /// Pivot cell indices (into `cells`); basis vector i is 1 at pivot i and 0 at the other pivots.
  std::vector<int> pivots;
  /// Rational basis vectors (valid when exact_rational).
  std::vector<std::vector<Rational>> rational;
  /// Floating basis vectors, always populated.
  std::vector<Eigen::VectorXd> numeric;
  /// All vectors rationalized and re-verified.
  bool exact_rational = false;

  int dimension() const { return static_cast<int>(numeric.size()); }
  /// Basis vector as a rank x rank matrix.
  Eigen::MatrixXd matrix(int i, int rank) const;
};

CommutantBasis commutant_basis(const ModularData& md, double tol = 1e-8);

struct SearchLimits {
  /// Node budget per root branch of the search tree.
  std::int64_t max_nodes = 200'000'000;
  int jobs = 1;
  double tolerance = 1e-8;
  /// Cap on sum of entries; defaults to w.
  std::optional<double> max_budget;
};

struct SearchResult {
  std::vector<IntMatrix> invariants;
  std::int64_t nodes = 0;
  bool truncated = false;
  /// Root branches that hit the node limit, described as "pivot=value".
  std::vector<std::string> frontier;
  /// Set when the model is degenerate, so commutation certifies less.
  bool commutant_only = false;
};

/// Node-limit exhaustion; carries the partial (still verified) result.
class SearchTruncated : public std::runtime_error {
 public:
  SearchTruncated(const std::string& what, SearchResult partial)
      : std::runtime_error(what), partial(std::move(partial)) {}
  SearchResult partial;
};

/// Commutant-lattice search. Throws SearchTruncated on node-limit exhaustion.
SearchResult enumerate_physical(const ModularData& md, const SearchLimits& limits = {});

/// Independent DFS over the masked bound box (used as an oracle).
SearchResult enumerate_oracle(const ModularData& md, const SearchLimits& limits = {});

struct InvariantCheck {
  std::string name;
  bool passed = true;
  double residual = 0.0;
  int row = -1;
  int col = -1;
};

struct InvariantReport {
  std::vector<InvariantCheck> checks;
  bool passed() const;
  const InvariantCheck* find(const std::string& name) const;
  /// First failed check, or nullptr.
  const InvariantCheck* first_failure() const;
};

InvariantReport verify_invariant(const ModularData& md, const IntMatrix& z, double tol = 1e-8);

/// True when Z commutes with S and T (exactly in exact mode).
bool commutes_with_st(const ModularData& md, const IntMatrix& z, double tol = 1e-8);

struct Classification {
  bool is_permutation = false;
  /// omega(l) for permutation invariants.
  std::vector<int> permutation;
  std::vector<std::int64_t> vacuum_row;
  std::vector<std::int64_t> vacuum_column;
  bool is_heterotic = false;
  bool is_symmetric = false;
  std::optional<BranchingTable> type1_fit;
  /// Vacuum coupling involves a label of dimension != 1, or a non-permutation twist without a block form.
  bool exceptional = false;
  std::int64_t trace = 0;
  std::vector<std::int64_t> diagonal;

  /// "I", "II" or "heterotic".
  std::string type() const;
};

Classification classify(const ModularData& md, const IntMatrix& z, std::int64_t fit_node_limit = 1'000'000);

struct GlobalIndices {
  double w = 0.0;
  double w_plus = 0.0;
  double w_minus = 0.0;
  double w_alpha = 0.0;
  double w_zero = 0.0;
  /// sum_l d_l Z_{l,0} and sum_l Z_{0,l} d_l.
  double column_weight = 0.0;
  double row_weight = 0.0;
};

GlobalIndices chiral_global_indices(const ModularData& md, const IntMatrix& z, double tol = 1e-8);

/// Lexicographic order on the row-major flattening.
bool lex_less(const IntMatrix& a, const IntMatrix& b);

}  // namespace modinv
