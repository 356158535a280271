// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "modinv/cli.hpp"
#include "modinv/extensions.hpp"
#include "modinv/fusion_verlinde.hpp"
#include "modinv/graphs_nimreps.hpp"
#include "modinv/invariant_engine.hpp"
#include "modinv/model_spec.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

using namespace modinv;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

// Collects failures; the first few are reported.
class Tally {
 public:
  void expect(bool cond, const std::string& what) {
    ++checks_;
    if (cond) return;
    if (failures_.size() < 3) failures_.push_back(what);
    ++failed_;
  }
  Outcome outcome(const std::string& summary) const {
    std::ostringstream os;
    os << summary << "; " << checks_ << " checks";
    if (failed_) {
      os << ", " << failed_ << " failed:";
      for (const auto& f : failures_) os << " [" << f << "]";
    }
    return {failed_ == 0, os.str()};
  }

 private:
  int checks_ = 0;
  int failed_ = 0;
  std::vector<std::string> failures_;
};

void add_block(IntMatrix& z, std::initializer_list<int> u, std::initializer_list<int> v, std::int64_t mult = 1) {
  for (int a : u) {
    for (int b : v) z(a, b) += mult;
  }
}

IntMatrix from_rows(int r, std::initializer_list<std::int64_t> v) {
  IntMatrix m(r, r);
  auto it = v.begin();
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) m(i, j) = *it++;
  }
  return m;
}

IntMatrix z_e6() {
  IntMatrix z = IntMatrix::Zero(11, 11);
  add_block(z, {0, 6}, {0, 6});
  add_block(z, {4, 10}, {4, 10});
  add_block(z, {3, 7}, {3, 7});
  return z;
}

IntMatrix z_e7() {
  IntMatrix z = IntMatrix::Zero(17, 17);
  add_block(z, {0, 16}, {0, 16});
  add_block(z, {4, 12}, {4, 12});
  add_block(z, {6, 10}, {6, 10});
  add_block(z, {8}, {8});
  add_block(z, {2, 14}, {8});
  add_block(z, {8}, {2, 14});
  return z;
}

IntMatrix z_d10() {
  IntMatrix z = IntMatrix::Zero(17, 17);
  add_block(z, {0, 16}, {0, 16});
  add_block(z, {2, 14}, {2, 14});
  add_block(z, {4, 12}, {4, 12});
  add_block(z, {6, 10}, {6, 10});
  add_block(z, {8}, {8}, 2);
  return z;
}

bool contains(const std::vector<IntMatrix>& v, const IntMatrix& z) {
  return std::find(v.begin(), v.end(), z) != v.end();
}

std::vector<IntMatrix> sorted(std::vector<IntMatrix> v) {
  std::sort(v.begin(), v.end(), lex_less);
  return v;
}

IntMatrix matrix_from(const nlohmann::json& j) {
  IntMatrix m(j.size(), j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    for (std::size_t k = 0; k < j.size(); ++k) m(i, k) = j[i][k].get<std::int64_t>();
  }
  return m;
}

std::vector<std::pair<int, int>> zn_parameters(int max_n) {
  std::vector<std::pair<int, int>> out;
  for (int n = 1; n <= max_n; ++n) {
    for (int a = 0; a < 2 * n; ++a) {
      if (std::gcd(a, n) == 1 && (n % 2 == 0 || a % 2 == 0)) out.emplace_back(n, a);
    }
  }
  return out;
}

std::vector<std::string> builtin_models() {
  std::vector<std::string> m;
  for (int k = 1; k <= 28; ++k) m.push_back("su2:" + std::to_string(k));
  for (int k = 1; k <= 9; ++k) m.push_back("sun:3," + std::to_string(k));
  m.push_back("sun:4,6");
  for (int l = 1; l <= 3; ++l) m.push_back("so16l:" + std::to_string(l));
  for (auto [n, a] : zn_parameters(24)) m.push_back("zn:" + std::to_string(n) + "," + std::to_string(a));
  for (int nu = 1; nu < 16; nu += 2) m.push_back("ising:" + std::to_string(nu));
  return m;
}

struct Enumerated {
  ModularData md;
  std::vector<IntMatrix> invariants;
};

const std::vector<Enumerated>& all_enumerated() {
  static const std::vector<Enumerated> cache = [] {
    std::vector<Enumerated> out;
    for (const auto& spec : builtin_models()) {
      ModularData md = build_model(spec);
      std::vector<IntMatrix> inv = enumerate_physical(md).invariants;
      out.push_back({std::move(md), std::move(inv)});
    }
    return out;
  }();
  return cache;
}

Outcome so16_classification() {
  Tally t;
  const IntMatrix one = IntMatrix::Identity(4, 4);
  const IntMatrix w = from_rows(4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0});
  const IntMatrix xs = from_rows(4, {1, 0, 1, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0});
  const IntMatrix xc = from_rows(4, {1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1});
  const IntMatrix q = from_rows(4, {1, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0});
  const IntMatrix qt = q.transpose();
  const CommandResult r = cmd_classify("so16l:1", RunOptions{});
  t.expect(r.exit_code == kExitOk, "classify exit code " + std::to_string(r.exit_code));
  if (r.exit_code != kExitOk) return t.outcome("classify failed: " + r.error);
  const auto& invs = r.document["result"]["invariants"];
  std::vector<IntMatrix> got;
  int heterotic = 0;
  for (const auto& inv : invs) {
    const IntMatrix z = matrix_from(inv["matrix"]);
    got.push_back(z);
    const bool het = inv["heterotic"].get<bool>();
    heterotic += het;
    t.expect(het == (z == q || z == qt), "heterotic flag on a matrix");
  }
  t.expect(sorted(got) == sorted({one, w, xs, xc, q, qt}), "invariant set equals {1, W, X_s, X_c, Q, Q^T}");
  return t.outcome(std::to_string(invs.size()) + " invariants, " + std::to_string(heterotic) + " heterotic");
}

Outcome su2_10() {
  Tally t;
  const ModularData md = build_su2(10);
  const SearchResult r = enumerate_physical(md);
  t.expect(contains(r.invariants, z_e6()), "E6 matrix present");
  const Classification c = classify(md, z_e6());
  t.expect(c.type() == "I", "E6 type I");
  std::vector<std::vector<int>> blocks;
  if (c.type1_fit) {
    const IntMatrix& b = c.type1_fit->b;
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
      std::vector<int> support;
      for (int l = 0; l < md.rank(); ++l) {
        t.expect(b(i, l) == 0 || b(i, l) == 1, "block multiplicity 1");
        if (b(i, l)) support.push_back(l);
      }
      blocks.push_back(support);
    }
  }
  std::sort(blocks.begin(), blocks.end());
  t.expect(blocks == std::vector<std::vector<int>>{{0, 6}, {3, 7}, {4, 10}}, "blocks {0,6},{4,10},{3,7}");
  const auto& f = builtin_fixtures().embeddings.at("su2_10_so5_1");
  t.expect(restrict_invariant(md, f.table, IntMatrix::Identity(3, 3)) == z_e6(), "SO(5)_1 restriction");
  const SearchResult oracle = enumerate_oracle(md);
  t.expect(oracle.invariants.size() == r.invariants.size(), "count equals DFS oracle");
  t.expect(sorted(oracle.invariants) == sorted(r.invariants), "set equals DFS oracle");
  return t.outcome(std::to_string(r.invariants.size()) + " invariants, oracle " +
                   std::to_string(oracle.invariants.size()));
}

Outcome su2_16() {
  Tally t;
  const ModularData md = build_su2(16);
  const SearchResult r = enumerate_physical(md);
  t.expect(contains(r.invariants, z_e7()), "E7 matrix present");
  t.expect(!fit_type1_blocks(md, z_e7()), "no type I fit of E7");
  t.expect(classify(md, z_e7()).type() == "II", "E7 type II");
  t.expect(z_e7().trace() == 7, "tr E7 = 7");
  const std::vector<Nimrep> nims = search_nimrep(md, z_e7(), 1);
  t.expect(nims.size() == 1, "one nimrep for E7");
  FusionGraph e7;
  e7.adjacency = dynkin("E7").adjacency;
  for (const auto& n : nims) t.expect(graphs_isomorphic(nimrep_graph(n, 1), e7, false), "nimrep is E7");
  t.expect(contains(r.invariants, z_d10()), "D10 matrix present");
  for (const auto& z : r.invariants) {
    if (z == z_d10()) t.expect(z.trace() == 10, "tr D10 = 10");
  }
  return t.outcome(std::to_string(r.invariants.size()) + " invariants, " + std::to_string(nims.size()) + " E7 nimrep");
}

Outcome zn_classification() {
  Tally t;
  int models = 0, invariants = 0;
  for (auto [n, a] : zn_parameters(24)) {
    const std::string tag = "n=" + std::to_string(n) + " a=" + std::to_string(a);
    const ModularData md = build_zn_theory(n, a);
    const int nt = n % 2 == 0 ? n / 2 : n;
    const int eps = n % 2 == 0 ? 2 : 1;
    std::vector<IntMatrix> zs;
    for (const auto& [delta, z] : zn_classify_all(n, a)) {
      zs.push_back(z);
      t.expect(nt % delta == 0, tag + " delta divides n-tilde");
      t.expect(z.trace() == eps * delta, tag + " trace");
      for (int l = 0; l < n; ++l) {
        t.expect(z(l, l) == (l % (nt / delta) == 0 ? 1 : 0), tag + " diagonal");
      }
    }
    int divisors = 0;
    for (int d = 1; d <= nt; ++d) divisors += nt % d == 0;
    t.expect(static_cast<int>(zs.size()) == divisors, tag + " one invariant per divisor");
    t.expect(sorted(zs) == sorted(enumerate_physical(md).invariants), tag + " equals commutant search");
    ++models;
    invariants += static_cast<int>(zs.size());
  }
  return t.outcome(std::to_string(models) + " models, " + std::to_string(invariants) + " invariants");
}

Outcome modular_algebra() {
  Tally t;
  double worst_axiom = 0.0, worst_gauss = 0.0;
  int models = 0;
  for (const auto& spec : builtin_models()) {
    const ModularData md = build_model(spec);
    const AxiomReport ax = verify_modular_axioms(md);
    t.expect(ax.partial_ok(), spec + " partial axioms");
    for (const auto& c : ax.checks) {
      worst_axiom = std::max(worst_axiom, c.residual);
      t.expect(c.residual < 1e-8, spec + " " + c.relation + " residual");
    }
    std::vector<Rational> h;
    for (const auto& l : md.labels) h.push_back(l.h);
    const GaussSum g = gauss_sum(md.fusion, h);
    const double gap = std::abs(std::norm(g.z) - md.w);
    worst_gauss = std::max(worst_gauss, gap);
    t.expect(gap < 1e-8, spec + " |z|^2 = w");
    const FusionRing back = verlinde_fusion(md.s);
    bool same = back.rank() == md.fusion.rank();
    for (int l = 0; same && l < md.rank(); ++l) same = back.matrix(l) == md.fusion.matrix(l);
    t.expect(same, spec + " Verlinde round trip");
    if (md.exact()) t.expect(verlinde_exact_check(md.fusion, md.s_exact), spec + " exact Verlinde check");
    ++models;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d models, max residual %.1e, max ||z|^2 - w| %.1e", models, worst_axiom, worst_gauss);
  return t.outcome(buf);
}

Outcome global_indices() {
  Tally t;
  const ModularData su = build_su2(10);
  const GlobalIndices e6 = chiral_global_indices(su, z_e6());
  const double target = e6.w / (3.0 + std::sqrt(3.0));
  t.expect(std::abs(e6.w_plus - target) < 1e-9, "E6 w_+ = w/(3+sqrt3)");
  int permutations = 0, total = 0;
  for (const auto& [md, invs] : all_enumerated()) {
    for (const auto& z : invs) {
      const GlobalIndices g = chiral_global_indices(md, z);
      ++total;
      const double rel = std::abs(g.w_zero * g.w_alpha - g.w_plus * g.w_plus) / (g.w_plus * g.w_plus);
      t.expect(rel < 1e-9, md.model + " w_0 w_alpha = w_+^2");
      if (classify(md, z).is_permutation) {
        ++permutations;
        t.expect(g.w_plus == g.w && g.w_minus == g.w, md.model + " permutation w_+- = w");
      }
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "E6 |w_+ - w/(3+sqrt3)| = %.1e; %d invariants, %d permutations",
                std::abs(e6.w_plus - target), total, permutations);
  return t.outcome(buf);
}

std::vector<std::int64_t> block_row(const BranchingTable& t, int j) {
  std::vector<std::int64_t> out;
  for (int l = 0; l < t.b.cols(); ++l) out.push_back(t.b(j, l));
  return out;
}

Outcome orbifolds() {
  Tally t;
  std::ostringstream summary;
  {
    const ModularData su = build_sun(3, 5);
    const auto& f = builtin_fixtures().embeddings.at("su3_5_su6_1");
    std::vector<int> theta(su.rank(), 0);
    for (int l = 0; l < su.rank(); ++l) theta[l] = static_cast<int>(f.table.b(0, l));
    const InducedSystem e8 = induced_nimrep(su, theta);
    const int fund = su.find("1,0");
    const OrbifoldResult orb = orbifold_graph(nimrep_graph(e8.nim, fund), translation_action(e8, block_row(f.table, 2), 3));
    t.expect(orb.graph.size() == 4, "E(8)/Z3 has 4 vertices");
    t.expect(std::abs(orb.pf_out - orb.pf_in) < 1e-10, "E(8)/Z3 PF");
    Nimrep star;
    star.dim = orb.graph.size();
    star.g[fund] = orb.graph.adjacency;
    const IntMatrix zc = restrict_invariant(su, f.table, extended_permutation(f.table, f.ext_conj));
    t.expect(verify_nimrep(su, zc, star).passed(), "E(8)* is a nimrep of the conjugated E(8) invariant");
    summary << "E(8) " << e8.nim.dim << " -> " << orb.graph.size();
  }
  {
    const ModularData su = build_su2(4);
    const auto& f = builtin_fixtures().embeddings.at("su2_4_su3_1");
    std::vector<int> theta(su.rank(), 0);
    for (int l = 0; l < su.rank(); ++l) theta[l] = static_cast<int>(f.table.b(0, l));
    const InducedSystem d4 = induced_nimrep(su, theta);
    const FusionGraph g = nimrep_graph(d4.nim, 1);
    const OrbifoldResult orb = orbifold_graph(g, translation_action(d4, block_row(f.table, 1), 3));
    FusionGraph ref;
    ref.adjacency = dynkin("D4").adjacency;
    t.expect(graphs_isomorphic(g, ref, false), "induced system is D4");
    t.expect(graphs_isomorphic(orb.graph, ref, false), "D4/Z3 is D4");
    t.expect(std::abs(orb.pf_out - orb.pf_in) < 1e-10, "D4/Z3 PF");
    summary << ", D4 " << g.size() << " -> " << orb.graph.size();
  }
  {
    const ModularData su = build_sun(4, 6);
    const auto& f = builtin_fixtures().embeddings.at("su4_6_su10_1");
    std::vector<int> theta(su.rank(), 0);
    for (int l = 0; l < su.rank(); ++l) theta[l] = static_cast<int>(f.table.b(0, l));
    const InducedSystem pz = induced_nimrep(su, theta);
    const int fund = su.find("1,0,0");
    const OrbifoldResult orb = orbifold_graph(nimrep_graph(pz.nim, fund), translation_action(pz, block_row(f.table, 2), 5));
    t.expect(orb.graph.size() == 16, "SU(4)_6 descent has 16 vertices");
    t.expect(std::abs(orb.pf_out - orb.pf_in) < 1e-10, "SU(4)_6 descent PF");
    char buf[64];
    std::snprintf(buf, sizeof buf, ", SU(4)_6 %d -> %d (PF gap %.1e)", pz.nim.dim, orb.graph.size(),
                  std::abs(orb.pf_out - orb.pf_in));
    summary << buf;
  }
  return t.outcome(summary.str());
}

Outcome entry_bounds() {
  Tally t;
  int total = 0;
  for (const auto& [md, invs] : all_enumerated()) {
    for (const auto& z : invs) {
      ++total;
      for (int i = 0; i < md.rank(); ++i) {
        for (int j = 0; j < md.rank(); ++j) {
          const auto cap = static_cast<std::int64_t>(std::floor(md.d[i] * md.d[j] + 1e-9));
          t.expect(z(i, j) <= cap, md.model + " entry bound");
        }
      }
      t.expect(static_cast<double>(z.sum()) <= md.w + 1e-9, md.model + " sum bound");
    }
  }
  return t.outcome(std::to_string(all_enumerated().size()) + " models, " + std::to_string(total) + " invariants");
}

Outcome oracle_equivalence() {
  Tally t;
  int models = 0;
  for (const auto& [md, invs] : all_enumerated()) {
    if (md.rank() > 12) continue;
    ++models;
    t.expect(sorted(enumerate_oracle(md).invariants) == sorted(invs), md.model + " oracle set");
  }
  return t.outcome(std::to_string(models) + " models of rank <= 12");
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "SO(16)_1 classification", 1.0, so16_classification},
      {2, "SU(2)_10 E6", 30.0, su2_10},
      {3, "SU(2)_16 E7 and D10", 120.0, su2_16},
      {4, "Z_n classification", 60.0, zn_classification},
      {5, "modular algebra suite", 0.0, modular_algebra},
      {6, "global indices", 0.0, global_indices},
      {7, "orbifold fixtures", 0.0, orbifolds},
      {8, "entrywise bounds", 0.0, entry_bounds},
      {9, "oracle equivalence", 0.0, oracle_equivalence},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0 && secs >= c.limit_s) {
      o.passed = false;
      o.detail += "; over the " + std::to_string(static_cast<int>(c.limit_s)) + " s limit";
    }
    failed += !o.passed;
    std::printf("%s %d %s: %s (%.2f s)\n", o.passed ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
