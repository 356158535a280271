#pragma once

// Nimreps: verification, search and induction; A-D-E diagrams; orbifold quotients; DOT/JSON export.

#include "modinv/fusion_verlinde.hpp"
#include "modinv/modular_data.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace modinv {

struct Nimrep {
  int dim = 0;
  /// Label -> dim x dim matrix; at least a generating set.
  std::map<int, IntMatrix> g;
  std::vector<std::string> names;
  std::vector<int> grade;
  int grade_modulus = 0;
};

struct NimrepCheck {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct NimrepReport {
  std::vector<NimrepCheck> checks;
  bool passed() const;
  const NimrepCheck* find(const std::string& name) const;
};

/// Fills in every label reachable from the given matrices through the fusion rules.
Nimrep complete_nimrep(const ModularData& md, Nimrep nim);

/// Representation axioms on the completed matrices, dim = tr(Z), and the spectral condition for every
/// supplied label.
NimrepReport verify_nimrep(const ModularData& md, const IntMatrix& z, const Nimrep& nim, double tol = 1e-8);

/// Smallest label l such that polynomials in N_l and N_{conj l} span the fusion ring, if any.
std::optional<int> single_generator(const ModularData& md);

class NimrepCapExceeded : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NimrepSearchTruncated : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// All connected nimreps (up to relabelling) whose generator spectrum matches the diagonal of Z.
/// Root branches run on `jobs` threads; max_nodes applies per branch.
std::vector<Nimrep> search_nimrep(const ModularData& md, const IntMatrix& z, int generator, int dim_cap = 12,
                                  std::int64_t max_nodes = 20'000'000, int jobs = 1);

struct DynkinDiagram {
  std::string name;
  IntMatrix adjacency;
  int coxeter = 0;
  /// Exponents m - 1, i.e. su2 labels at level coxeter - 2.
  std::vector<int> exponents;
};

DynkinDiagram dynkin(const std::string& name);
/// A_1..A_max, D_4..D_max, E_6, E_7, E_8.
std::map<std::string, DynkinDiagram> ade_library(int max_rank = 30);

/// Graph of a single nimrep matrix.
FusionGraph nimrep_graph(const Nimrep& nim, int label);

struct InducedSystem {
  Nimrep nim;
  /// labels x vertices: <iota lambda, v>.
  IntMatrix x;
};

/// Nimrep on the irreducible summands of iota lambda for a dual canonical sector theta (multiplicity per label).
InducedSystem induced_nimrep(const ModularData& md, const std::vector<int>& theta, std::int64_t node_limit = 1'000'000);

/// Vertex permutation of the given order sending vertex 0 to the vertex whose column of x is `marked`,
/// commuting with every nimrep matrix. Throws std::invalid_argument if none exists.
std::vector<int> translation_action(const InducedSystem& sys, const std::vector<std::int64_t>& marked, int order);

struct OrbifoldResult {
  FusionGraph graph;
  /// Dual cyclic action on the result: cycles split copies, fixes orbit nodes.
  std::vector<int> dual_action;
  int order = 1;
  bool grading_kept = false;
  double pf_in = 0.0;
  double pf_out = 0.0;
};

/// Quotient by a cyclic automorphism: a free orbit becomes one node, a fixed point splits into `order` nodes.
/// Throws std::invalid_argument if the action is not an automorphism or has orbits of intermediate length.
OrbifoldResult orbifold_graph(const FusionGraph& g, const std::vector<int>& action);

/// Directed multigraph isomorphism, optionally respecting grades.
bool graphs_isomorphic(const FusionGraph& a, const FusionGraph& b, bool respect_grade);

std::string export_dot(const FusionGraph& g, const std::string& name = "G");
nlohmann::json graph_to_json(const FusionGraph& g);
FusionGraph graph_from_json(const nlohmann::json& j);

}  // namespace modinv
