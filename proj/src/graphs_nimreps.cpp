#include "modinv/graphs_nimreps.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

namespace modinv {
namespace {

using cd = std::complex<double>;
using IntVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

std::string join_complex(const std::vector<cd>& v) {
  std::ostringstream os;
  os.precision(10);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i].real() << (v[i].imag() < 0 ? "-" : "+") << std::abs(v[i].imag()) << "i";
  return os.str();
}

std::vector<cd> eigenvalues(const IntMatrix& a) {
  std::vector<cd> out;
  if (a.rows() == 0) return out;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(a.cast<cd>(), false);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()[i]);
  return out;
}

std::vector<cd> expected_spectrum(const ModularData& md, const IntMatrix& z, int label) {
  std::vector<cd> out;
  for (int r = 0; r < md.rank(); ++r) {
    for (std::int64_t k = 0; k < z(r, r); ++k) out.push_back(md.s(label, r) / md.s(0, r));
  }
  return out;
}

// Greedy matching within tol; empty string when the multisets agree.
std::string spectrum_diff(const std::vector<cd>& found, const std::vector<cd>& expected, double tol) {
  std::vector<bool> used(expected.size(), false);
  std::vector<cd> extra;
  for (const cd& f : found) {
    bool hit = false;
    for (std::size_t k = 0; k < expected.size(); ++k) {
      if (!used[k] && std::abs(f - expected[k]) <= tol * (1.0 + std::abs(f))) {
        used[k] = hit = true;
        break;
      }
    }
    if (!hit) extra.push_back(f);
  }
  std::vector<cd> missing;
  for (std::size_t k = 0; k < expected.size(); ++k) {
    if (!used[k]) missing.push_back(expected[k]);
  }
  if (extra.empty() && missing.empty()) return {};
  return "unexpected {" + join_complex(extra) + "}, missing {" + join_complex(missing) + "}";
}

// Perron-Frobenius vector of a normal nonnegative matrix, normalised to unit length.
Eigen::VectorXd pf_vector(const IntMatrix& a) {
  const Eigen::MatrixXd sym = (a + a.transpose()).cast<double>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  return es.eigenvectors().col(sym.rows() - 1).cwiseAbs();
}

IntMatrix permute(const IntMatrix& a, const std::vector<int>& image) {
  IntMatrix out(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) out(image[i], image[j]) = a(i, j);
  }
  return out;
}

// Backtracking search for bijections phi with B_k(phi i, phi j) = A_k(i, j) for all k.
class Matcher {
 public:
  Matcher(std::vector<IntMatrix> a, std::vector<IntMatrix> b, std::vector<int> ga, std::vector<int> gb)
      : a_(std::move(a)), b_(std::move(b)), ga_(std::move(ga)), gb_(std::move(gb)), n_(static_cast<int>(a_[0].rows())) {
    sig_a_ = signatures(a_, ga_);
    sig_b_ = signatures(b_, gb_);
  }

  bool run(std::vector<int> init, const std::function<bool(const std::vector<int>&)>& accept) {
    if (b_[0].rows() != n_) return false;
    phi_ = std::move(init);
    used_.assign(n_, false);
    for (int i = 0; i < n_; ++i) {
      if (phi_[i] >= 0) {
        if (used_[phi_[i]] || sig_a_[i] != sig_b_[phi_[i]]) return false;
        used_[phi_[i]] = true;
      }
    }
    for (int i = 0; i < n_; ++i) {
      if (phi_[i] >= 0 && !consistent(i, phi_[i])) return false;
    }
    order_ = visit_order();
    accept_ = &accept;
    return step(0);
  }

 private:
  static std::vector<std::vector<std::int64_t>> signatures(const std::vector<IntMatrix>& m, const std::vector<int>& g) {
    const int n = static_cast<int>(m[0].rows());
    std::vector<std::vector<std::int64_t>> out(n);
    for (int i = 0; i < n; ++i) {
      out[i].push_back(g.empty() ? 0 : g[i]);
      for (const auto& a : m) {
        std::vector<std::int64_t> r, c;
        for (int j = 0; j < n; ++j) {
          r.push_back(a(i, j));
          c.push_back(a(j, i));
        }
        std::sort(r.begin(), r.end());
        std::sort(c.begin(), c.end());
        out[i].push_back(a(i, i));
        out[i].insert(out[i].end(), r.begin(), r.end());
        out[i].insert(out[i].end(), c.begin(), c.end());
      }
    }
    return out;
  }

  std::vector<int> visit_order() const {
    std::vector<int> order;
    std::vector<bool> seen(n_, false);
    std::vector<int> queue;
    for (int i = 0; i < n_; ++i) {
      if (phi_[i] >= 0) {
        seen[i] = true;
        queue.push_back(i);
      }
    }
    auto bfs = [&](std::size_t head) {
      for (; head < queue.size(); ++head) {
        const int u = queue[head];
        if (phi_[u] < 0) order.push_back(u);
        for (int v = 0; v < n_; ++v) {
          bool adj = false;
          for (const auto& a : a_) adj = adj || a(u, v) != 0 || a(v, u) != 0;
          if (adj && !seen[v]) {
            seen[v] = true;
            queue.push_back(v);
          }
        }
      }
      return head;
    };
    std::size_t head = bfs(0);
    for (int i = 0; i < n_; ++i) {
      if (!seen[i]) {
        seen[i] = true;
        queue.push_back(i);
        head = bfs(head);
      }
    }
    return order;
  }

  bool consistent(int i, int w) const {
    for (int j = 0; j < n_; ++j) {
      if (phi_[j] < 0) continue;
      for (std::size_t k = 0; k < a_.size(); ++k) {
        if (a_[k](i, j) != b_[k](w, phi_[j]) || a_[k](j, i) != b_[k](phi_[j], w)) return false;
      }
    }
    return true;
  }

  bool step(std::size_t pos) {
    if (pos == order_.size()) return (*accept_)(phi_);
    const int i = order_[pos];
    for (int w = 0; w < n_; ++w) {
      if (used_[w] || sig_a_[i] != sig_b_[w] || !consistent(i, w)) continue;
      phi_[i] = w;
      used_[w] = true;
      if (step(pos + 1)) return true;
      used_[w] = false;
      phi_[i] = -1;
    }
    return false;
  }

  std::vector<IntMatrix> a_, b_;
  std::vector<int> ga_, gb_;
  int n_;
  std::vector<std::vector<std::int64_t>> sig_a_, sig_b_;
  std::vector<int> phi_;
  std::vector<bool> used_;
  std::vector<int> order_;
  const std::function<bool(const std::vector<int>&)>* accept_ = nullptr;
};

// Grades with generator edges raising the grade by grade(f); empty if inconsistent.
std::vector<int> infer_grades(const IntMatrix& g, int step, int modulus) {
  const int n = static_cast<int>(g.rows());
  std::vector<int> grade(n, -1);
  if (n == 0 || modulus <= 1) return {};
  grade[0] = 0;
  std::vector<int> queue = {0};
  for (std::size_t h = 0; h < queue.size(); ++h) {
    const int u = queue[h];
    for (int v = 0; v < n; ++v) {
      for (const auto& [src, dst, s] : {std::tuple{u, v, step}, std::tuple{v, u, -step}}) {
        if (g(src, dst) == 0) continue;
        const int want = ((grade[u] + s) % modulus + modulus) % modulus;
        if (grade[v] < 0) {
          grade[v] = want;
          queue.push_back(v);
        } else if (grade[v] != want) {
          return {};
        }
      }
    }
  }
  if (std::find(grade.begin(), grade.end(), -1) != grade.end()) return {};
  return grade;
}

// Polynomials in G_l and G_l^T span the representation iff rho -> S_{l,rho}/S_{0,rho} is injective.
bool generates(const ModularData& md, int l) {
  for (int r = 0; r < md.rank(); ++r) {
    for (int q = r + 1; q < md.rank(); ++q) {
      if (std::abs(md.s(l, r) / md.s(0, r) - md.s(l, q) / md.s(0, q)) < 1e-8) return false;
    }
  }
  return true;
}

// For a normal G_l with {l, conj l} generating, the Schur vectors of G_l diagonalise the whole
// representation: G_nu = U diag(S_{nu,rho}/S_{0,rho}) U^*, rho matched per eigenvalue.
void spectral_completion(const ModularData& md, Nimrep& nim) {
  const FusionRing& fr = md.fusion;
  for (const auto& [l, gl] : nim.g) {
    if (l == 0 || !generates(md, l) || gl * gl.transpose() != gl.transpose() * gl) continue;
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(gl.cast<cd>());
    const Eigen::MatrixXcd& u = schur.matrixU();
    std::vector<int> rho(nim.dim, -1);
    for (int k = 0; k < nim.dim; ++k) {
      const cd t = schur.matrixT()(k, k);
      double best = 1e300;
      for (int r = 0; r < md.rank(); ++r) {
        const double dist = std::abs(t - md.s(l, r) / md.s(0, r));
        if (dist < best) {
          best = dist;
          rho[k] = r;
        }
      }
      if (best > 1e-6) return;
    }
    for (int nu = 0; nu < fr.rank(); ++nu) {
      if (nim.g.count(nu)) continue;
      Eigen::VectorXcd diag(nim.dim);
      for (int k = 0; k < nim.dim; ++k) diag[k] = md.s(nu, rho[k]) / md.s(0, rho[k]);
      const Eigen::MatrixXcd g = u * diag.asDiagonal() * u.adjoint();
      IntMatrix out(nim.dim, nim.dim);
      for (int i = 0; i < nim.dim; ++i) {
        for (int j = 0; j < nim.dim; ++j) {
          if (std::abs(g(i, j).imag()) > 1e-6 || std::abs(g(i, j).real() - std::round(g(i, j).real())) > 1e-6) return;
          out(i, j) = std::llround(g(i, j).real());
        }
      }
      nim.g.emplace(nu, out);
    }
    return;
  }
}

}  // namespace

bool NimrepReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const NimrepCheck& c) { return c.passed; });
}

const NimrepCheck* NimrepReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

Nimrep complete_nimrep(const ModularData& md, Nimrep nim) {
  const FusionRing& fr = md.fusion;
  const auto& conj = fr.conj();
  const int dim = nim.dim;
  nim.g.emplace(0, IntMatrix::Identity(dim, dim));
  for (const auto& [l, m] : std::map<int, IntMatrix>(nim.g)) nim.g.emplace(conj[l], m.transpose());
  // Each product of known matrices is a linear equation sum_nu N_ab^nu G_nu = G_a G_b in the unknown G_nu,
  // with the same coefficients for every matrix entry.
  while (static_cast<int>(nim.g.size()) < fr.rank()) {
    std::vector<int> unknown;
    std::vector<int> slot(fr.rank(), -1);
    for (int nu = 0; nu < fr.rank(); ++nu) {
      if (!nim.g.count(nu)) {
        slot[nu] = static_cast<int>(unknown.size());
        unknown.push_back(nu);
      }
    }
    std::vector<std::pair<int, int>> pairs;
    for (auto i = nim.g.begin(); i != nim.g.end(); ++i) {
      for (auto j = i; j != nim.g.end(); ++j) {
        for (int u : unknown) {
          if (fr(i->first, j->first, u) != 0) {
            pairs.push_back({i->first, j->first});
            break;
          }
        }
      }
    }
    if (pairs.empty()) break;
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(pairs.size()), static_cast<Eigen::Index>(unknown.size()));
    Eigen::MatrixXd rhs(static_cast<Eigen::Index>(pairs.size()), dim * dim);
    for (std::size_t r = 0; r < pairs.size(); ++r) {
      const auto [a, b] = pairs[r];
      IntMatrix prod = nim.g.at(a) * nim.g.at(b);
      for (int nu = 0; nu < fr.rank(); ++nu) {
        const std::int64_t n = fr(a, b, nu);
        if (n == 0) continue;
        if (slot[nu] >= 0) {
          c(static_cast<Eigen::Index>(r), slot[nu]) = static_cast<double>(n);
        } else {
          prod -= n * nim.g.at(nu);
        }
      }
      rhs.row(static_cast<Eigen::Index>(r)) = Eigen::Map<const Eigen::RowVectorXd>(prod.cast<double>().eval().data(), dim * dim);
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(c);
    const Eigen::MatrixXd sol = qr.solve(rhs);
    const Eigen::MatrixXd kernel = Eigen::FullPivLU<Eigen::MatrixXd>(c).kernel();
    const bool full_rank = qr.rank() == static_cast<Eigen::Index>(unknown.size());
    bool progress = false;
    for (std::size_t k = 0; k < unknown.size(); ++k) {
      const auto row = static_cast<Eigen::Index>(k);
      if (!full_rank && kernel.row(row).cwiseAbs().maxCoeff() > 1e-9) continue;
      IntMatrix g(dim, dim);
      bool integral = true;
      for (int e = 0; e < dim * dim; ++e) {
        const double v = sol(row, e);
        integral = integral && std::abs(v - std::round(v)) < 1e-6;
        g.data()[e] = std::llround(v);
      }
      if (!integral) continue;
      nim.g.emplace(unknown[k], g);
      progress = true;
    }
    if (!progress) break;
  }
  if (static_cast<int>(nim.g.size()) < fr.rank()) spectral_completion(md, nim);
  return nim;
}

NimrepReport verify_nimrep(const ModularData& md, const IntMatrix& z, const Nimrep& nim, double tol) {
  NimrepReport rep;
  auto add = [&](const std::string& name, bool ok, const std::string& detail = {}) {
    rep.checks.push_back({name, ok, ok ? std::string() : detail});
  };
  const FusionRing& fr = md.fusion;
  add("dimension", nim.dim == z.trace(),
      "nimrep dimension " + std::to_string(nim.dim) + " != tr(Z) = " + std::to_string(z.trace()));
  for (const auto& [l, m] : nim.g) {
    if (l < 0 || l >= md.rank() || m.rows() != nim.dim || m.cols() != nim.dim) {
      add("shape", false, "matrix for label " + std::to_string(l) + " has the wrong shape or label");
      return rep;
    }
  }
  if (auto it = nim.g.find(0); it != nim.g.end()) {
    add("identity", it->second == IntMatrix::Identity(nim.dim, nim.dim), "G_0 is not the identity");
  }
  const Nimrep full = complete_nimrep(md, nim);
  std::string neg;
  for (const auto& [l, m] : full.g) {
    if (neg.empty() && (m.array() < 0).any()) neg = "G_" + md.labels[l].descriptor + " has a negative entry";
  }
  add("nonnegative", neg.empty(), neg);
  add("complete", static_cast<int>(full.g.size()) == fr.rank(),
      "only " + std::to_string(full.g.size()) + " of " + std::to_string(fr.rank()) + " labels are determined by the supplied matrices");
  std::string conj_bad;
  for (const auto& [l, m] : full.g) {
    auto it = full.g.find(fr.conj()[l]);
    if (conj_bad.empty() && it != full.g.end() && it->second != m.transpose()) {
      conj_bad = "G_" + md.labels[fr.conj()[l]].descriptor + " != G_" + md.labels[l].descriptor + "^T";
    }
  }
  add("conjugation", conj_bad.empty(), conj_bad);
  std::string rep_bad;
  for (auto i = full.g.begin(); i != full.g.end() && rep_bad.empty(); ++i) {
    for (auto j = i; j != full.g.end() && rep_bad.empty(); ++j) {
      IntMatrix r = i->second * j->second;
      bool all_known = true;
      for (int nu = 0; nu < fr.rank(); ++nu) {
        const std::int64_t c = fr(i->first, j->first, nu);
        if (c == 0) continue;
        auto k = full.g.find(nu);
        if (k == full.g.end()) {
          all_known = false;
          break;
        }
        r -= c * k->second;
      }
      if (all_known && !r.isZero()) {
        rep_bad = "G_" + md.labels[i->first].descriptor + " G_" + md.labels[j->first].descriptor + " != sum N G";
      }
    }
  }
  add("representation", rep_bad.empty(), rep_bad);
  if (rep_bad.empty()) {
    for (auto i = full.g.begin(); i != full.g.end(); ++i) {
      const IntMatrix& a = i->second;
      for (auto j = std::next(i); j != full.g.end(); ++j) {
        if ((a * j->second - j->second * a).any()) {
          rep_bad = "G_" + md.labels[i->first].descriptor + " and G_" + md.labels[j->first].descriptor + " do not commute";
          break;
        }
      }
      if (!rep_bad.empty()) break;
    }
    add("commutative", rep_bad.empty(), rep_bad);
  }
  if (z.rows() == md.rank() && nim.dim == z.trace()) {
    for (const auto& [l, m] : nim.g) {
      if (l == 0) continue;
      const std::string diff = spectrum_diff(eigenvalues(m), expected_spectrum(md, z, l), tol);
      add("spectrum " + md.labels[l].descriptor, diff.empty(), diff);
    }
  }
  return rep;
}

std::optional<int> single_generator(const ModularData& md) {
  const FusionRing& fr = md.fusion;
  if (fr.rank() == 1) return 0;
  for (int l = 1; l < fr.rank(); ++l) {
    if (generates(md, l)) return l;
  }
  return std::nullopt;
}

namespace {

struct SearchSetup {
  const ModularData* md = nullptr;
  const IntMatrix* z = nullptr;
  int f = 0, fbar = 0, n = 0;
  bool sym = false;
  std::vector<cd> spectrum;
  std::int64_t trace_target = 0, trace2_target = 0, trace3_target = 0, square_target = 0, quartic_target = 0;
  std::int64_t bound = 0, norm_cap = 0;
  int period = 0;
  double df = 0.0;
  std::vector<std::pair<int, int>> cells;
  std::size_t split = 0;
};

// Backtracking over generator entries. Rows are filled in BFS order along out-edges: vertex i must already
// be reached when its row starts, and the new out-neighbours of a row form a contiguous block at the first
// unreached index. With period h (eigenvalues of modulus d_f) the graph is h-cyclic, so edges go from class
// c to c + 1 mod h. Row and column norms are bounded by sum_nu N_{f fbar}^nu floor(d_nu).
class NimrepSearch {
 public:
  NimrepSearch(const SearchSetup& s, std::int64_t max_nodes) : s_(&s), max_nodes_(max_nodes) {
    g_ = IntMatrix::Zero(s.n, s.n);
    cls_.assign(s.n, -1);
    cls_[0] = 0;
    row_sq_.assign(s.n, 0);
    col_sq_.assign(s.n, 0);
    remaining_diag_ = s.n;
  }

  // States reached at the split position, in search order.
  std::vector<NimrepSearch> branches() {
    collect_ = true;
    step(0, 0, 0, 0);
    collect_ = false;
    return std::move(pending_);
  }

  void resume() { step(s_->split, squares_, trace_, trace2_); }

  std::vector<IntMatrix> found;

 private:
  // Prunes when a Collatz-Wielandt lower bound on the leading block's spectral radius exceeds d_f.
  bool row_end_ok(int i) {
    if (!g_.row(i).any()) return false;
    if (!s_->sym) {
      // Normality: partial (G^T G)_{ab} over rows 0..i cannot exceed the now known (G G^T)_{ab}.
      const auto rows = g_.topRows(i + 1);
      const IntMatrix ggt = rows.leftCols(s_->n) * rows.transpose();
      const IntMatrix gtg = rows.leftCols(i + 1).transpose() * rows.leftCols(i + 1);
      if (((gtg - ggt).array() > 0).any()) return false;
    }
    const Eigen::MatrixXd block = g_.topLeftCorner(i + 1, i + 1).cast<double>();
    Eigen::VectorXd x = Eigen::VectorXd::Ones(i + 1);
    for (int it = 0; it < 12; ++it) {
      const Eigen::VectorXd y = block * x + x;
      const double lower = (y.array() / x.array()).minCoeff() - 1.0;
      if (lower > s_->df + 1e-9) return false;
      x = y / y.maxCoeff();
    }
    return true;
  }

  void step(std::size_t pos, std::int64_t squares, std::int64_t trace, std::int64_t trace2) {
    const SearchSetup& s = *s_;
    if (++nodes_ > max_nodes_) {
      throw NimrepSearchTruncated("nimrep search exceeded " + std::to_string(max_nodes_) + " nodes in one branch");
    }
    if (collect_ && pos == s.split) {
      NimrepSearch copy = *this;
      copy.collect_ = false;
      copy.pending_.clear();
      copy.nodes_ = 0;
      copy.squares_ = squares;
      copy.trace_ = trace;
      copy.trace2_ = trace2;
      pending_.push_back(std::move(copy));
      return;
    }
    if (pos == s.cells.size()) {
      if (squares == s.square_target && trace == s.trace_target && (s.sym || trace2 == s.trace2_target)) leaf();
      return;
    }
    const auto [i, j] = s.cells[pos];
    if (j == (s.sym ? i : 0) && i >= reached_) return;
    const bool diag = i == j;
    const std::int64_t weight = diag || !s.sym ? 1 : 2;
    const int reached_before = reached_;
    for (std::int64_t v = 0; v <= s.bound; ++v) {
      const std::int64_t sq = squares + weight * v * v;
      const std::int64_t tr = trace + (diag ? v : 0);
      if (sq > s.square_target) break;
      if (v > 0 && j > reached_before) break;
      if (v > 0 && j < reached_before && cls_[j] != (cls_[i] + 1) % s.period) break;
      if (row_sq_[i] + v * v > s.norm_cap || col_sq_[j] + v * v > s.norm_cap) break;
      const std::int64_t t2 = s.sym ? 0 : trace2 + (j == i ? v * v : j < i ? 2 * v * g_(j, i) : 0);
      if (!s.sym && t2 > s.trace2_target) break;
      if (diag) {
        --remaining_diag_;
        const bool ok = tr <= s.trace_target && tr + remaining_diag_ * s.bound >= s.trace_target;
        if (!ok) {
          ++remaining_diag_;
          if (tr > s.trace_target) break;
          continue;
        }
      }
      reached_ = v > 0 && j == reached_before ? reached_before + 1 : reached_before;
      if (reached_ != reached_before) cls_[j] = (cls_[i] + 1) % s.period;
      set(i, j, v);
      const bool row_done = j == s.n - 1;
      if (!row_done || row_end_ok(i)) step(pos + 1, sq, tr, t2);
      set(i, j, 0);
      if (diag) ++remaining_diag_;
    }
    reached_ = reached_before;
  }

  void set(int i, int j, std::int64_t v) {
    const std::int64_t d = v * v - g_(i, j) * g_(i, j);
    row_sq_[i] += d;
    col_sq_[j] += d;
    g_(i, j) = v;
    if (s_->sym && i != j) {
      row_sq_[j] += d;
      col_sq_[i] += d;
      g_(j, i) = v;
    }
  }

  void leaf() {
    const SearchSetup& s = *s_;
    const IntMatrix ggt = g_ * g_.transpose();
    if (ggt != g_.transpose() * g_ || (g_ * g_ * g_).trace() != s.trace3_target ||
        (ggt * ggt).trace() != s.quartic_target) {
      return;
    }
    if (!spectrum_diff(eigenvalues(g_), s.spectrum, 1e-6).empty()) return;
    Nimrep nim;
    nim.dim = s.n;
    nim.g[s.f] = g_;
    if (!s.sym) nim.g[s.fbar] = g_.transpose();
    if (!verify_nimrep(*s.md, *s.z, nim).passed()) return;
    for (const auto& other : found) {
      if (graphs_isomorphic(FusionGraph{other, {}, {}, 0, {}}, FusionGraph{g_, {}, {}, 0, {}}, false)) return;
    }
    found.push_back(g_);
  }

  const SearchSetup* s_;
  std::int64_t max_nodes_;
  std::int64_t nodes_ = 0;
  IntMatrix g_;
  std::vector<int> cls_;
  std::vector<std::int64_t> row_sq_, col_sq_;
  int reached_ = 1;
  int remaining_diag_ = 0;
  bool collect_ = false;
  std::vector<NimrepSearch> pending_;
  std::int64_t squares_ = 0, trace_ = 0, trace2_ = 0;
};

// Descending Perron-Frobenius weight, then lexicographic row.
Nimrep canonical_nimrep(const ModularData& md, const SearchSetup& s, const IntMatrix& g) {
  const Eigen::VectorXd pf = pf_vector(g);
  std::vector<int> order(s.n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (std::abs(pf[a] - pf[b]) > 1e-9) return pf[a] > pf[b];
    return std::lexicographical_compare(g.row(a).begin(), g.row(a).end(), g.row(b).begin(), g.row(b).end());
  });
  std::vector<int> image(s.n);
  for (int k = 0; k < s.n; ++k) image[order[k]] = k;
  Nimrep out;
  out.dim = s.n;
  out.g[s.f] = permute(g, image);
  if (!s.sym) out.g[s.fbar] = out.g[s.f].transpose();
  for (int k = 0; k < s.n; ++k) out.names.push_back("v" + std::to_string(k));
  if (md.grading) {
    out.grade = infer_grades(out.g[s.f], md.grading->grade[s.f], md.grading->modulus);
    if (!out.grade.empty()) out.grade_modulus = md.grading->modulus;
  }
  return out;
}

}  // namespace

std::vector<Nimrep> search_nimrep(const ModularData& md, const IntMatrix& z, int generator, int dim_cap,
                                  std::int64_t max_nodes, int jobs) {
  if (dim_cap > 12) throw NimrepCapExceeded("nimrep dimension cap " + std::to_string(dim_cap) + " exceeds the maximum of 12");
  if (z.rows() != md.rank() || z.cols() != md.rank()) throw std::invalid_argument("invariant has the wrong shape");
  if (z.trace() > dim_cap) {
    throw NimrepCapExceeded("tr(Z) = " + std::to_string(z.trace()) + " exceeds the nimrep dimension cap " + std::to_string(dim_cap));
  }
  if (generator < 0 || generator >= md.rank()) throw std::invalid_argument("generator label out of range");
  if (!generates(md, generator)) {
    throw std::invalid_argument("label " + md.labels[generator].descriptor + " does not generate the fusion ring");
  }
  if (z.trace() == 0) return {};

  SearchSetup s;
  s.md = &md;
  s.z = &z;
  s.f = generator;
  s.fbar = md.fusion.conj()[generator];
  s.n = static_cast<int>(z.trace());
  s.sym = s.f == s.fbar;
  s.spectrum = expected_spectrum(md, z, generator);
  s.df = md.d[generator];
  cd p1 = 0.0, q2 = 0.0, q3 = 0.0;
  double p2 = 0.0, p4 = 0.0;
  for (const cd& g : s.spectrum) {
    p1 += g;
    q2 += g * g;
    q3 += g * g * g;
    p2 += std::norm(g);
    p4 += std::norm(g) * std::norm(g);
    if (std::abs(g) > s.df - 1e-9) ++s.period;
  }
  s.trace_target = std::llround(p1.real());
  s.trace2_target = std::llround(q2.real());
  s.square_target = std::llround(p2);
  s.trace3_target = std::llround(q3.real());
  s.quartic_target = std::llround(p4);
  if (std::abs(static_cast<double>(s.trace_target) - p1.real()) > 1e-6 ||
      std::abs(static_cast<double>(s.square_target) - p2) > 1e-6) {
    return {};
  }
  s.bound = static_cast<std::int64_t>(std::floor(s.df + 1e-9));
  for (int nu = 0; nu < md.rank(); ++nu) {
    s.norm_cap += md.fusion(s.f, s.fbar, nu) * static_cast<std::int64_t>(std::floor(md.d[nu] + 1e-9));
  }
  for (int i = 0; i < s.n; ++i) {
    for (int j = s.sym ? i : 0; j < s.n; ++j) s.cells.push_back({i, j});
  }
  // Root branches: every admissible first row.
  s.split = std::min<std::size_t>(s.cells.size(), static_cast<std::size_t>(s.n));

  std::vector<NimrepSearch> tasks = NimrepSearch(s, max_nodes).branches();
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(tasks.size());
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      try {
        tasks[t].resume();
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min(jobs, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<IntMatrix> unique;
  for (const auto& task : tasks) {
    for (const auto& g : task.found) {
      bool dup = false;
      for (const auto& u : unique) {
        dup = dup || graphs_isomorphic(FusionGraph{u, {}, {}, 0, {}}, FusionGraph{g, {}, {}, 0, {}}, false);
      }
      if (!dup) unique.push_back(g);
    }
  }
  std::vector<Nimrep> out;
  for (const auto& g : unique) out.push_back(canonical_nimrep(md, s, g));
  return out;
}

DynkinDiagram dynkin(const std::string& name) {
  if (name.size() < 2 || (name[0] != 'A' && name[0] != 'D' && name[0] != 'E')) {
    throw std::invalid_argument("unknown Dynkin diagram '" + name + "'");
  }
  int n = 0;
  try {
    std::size_t used = 0;
    n = std::stoi(name.substr(1), &used);
    if (used != name.size() - 1) throw std::invalid_argument(name);
  } catch (const std::exception&) {
    throw std::invalid_argument("unknown Dynkin diagram '" + name + "'");
  }
  DynkinDiagram d;
  d.name = name;
  IntMatrix a = IntMatrix::Zero(n, n);
  auto edge = [&](int i, int j) { a(i, j) = a(j, i) = 1; };
  std::vector<int> m;
  if (name[0] == 'A' && n >= 1) {
    for (int i = 0; i + 1 < n; ++i) edge(i, i + 1);
    d.coxeter = n + 1;
    for (int k = 1; k <= n; ++k) m.push_back(k);
  } else if (name[0] == 'D' && n >= 4) {
    for (int i = 0; i + 3 < n; ++i) edge(i, i + 1);
    edge(n - 3, n - 2);
    edge(n - 3, n - 1);
    d.coxeter = 2 * n - 2;
    for (int k = 1; k <= 2 * n - 3; k += 2) m.push_back(k);
    m.push_back(n - 1);
  } else if (name[0] == 'E' && n >= 6 && n <= 8) {
    for (int i = 0; i + 2 < n; ++i) edge(i, i + 1);
    edge(2, n - 1);
    static const std::vector<int> e6 = {1, 4, 5, 7, 8, 11}, e7 = {1, 5, 7, 9, 11, 13, 17},
                                  e8 = {1, 7, 11, 13, 17, 19, 23, 29};
    d.coxeter = n == 6 ? 12 : n == 7 ? 18 : 30;
    m = n == 6 ? e6 : n == 7 ? e7 : e8;
  } else {
    throw std::invalid_argument("unknown Dynkin diagram '" + name + "'");
  }
  std::sort(m.begin(), m.end());
  for (int e : m) d.exponents.push_back(e - 1);
  d.adjacency = a;
  return d;
}

std::map<std::string, DynkinDiagram> ade_library(int max_rank) {
  std::map<std::string, DynkinDiagram> out;
  for (int n = 1; n <= max_rank; ++n) out.emplace("A" + std::to_string(n), dynkin("A" + std::to_string(n)));
  for (int n = 4; n <= max_rank; ++n) out.emplace("D" + std::to_string(n), dynkin("D" + std::to_string(n)));
  for (int n = 6; n <= std::min(8, max_rank); ++n) out.emplace("E" + std::to_string(n), dynkin("E" + std::to_string(n)));
  return out;
}

FusionGraph nimrep_graph(const Nimrep& nim, int label) {
  FusionGraph g;
  g.adjacency = nim.g.at(label);
  g.names = nim.names;
  if (g.names.empty()) {
    for (int i = 0; i < nim.dim; ++i) g.names.push_back("v" + std::to_string(i));
  }
  g.grade = nim.grade;
  g.grade_modulus = nim.grade_modulus;
  g.generator = std::to_string(label);
  return g;
}

namespace {

// Nonnegative integer vectors c with X c = t, i.e. decompositions of t into vertex columns.
class ColumnSplitter {
 public:
  ColumnSplitter(const IntMatrix& x, std::int64_t& nodes, std::int64_t limit) : x_(x), nodes_(nodes), limit_(limit) {
    last_.assign(x.rows(), -1);
    for (int v = 0; v < x.cols(); ++v) {
      for (int l = 0; l < x.rows(); ++l) {
        if (x(l, v) > 0) last_[l] = v;
      }
    }
  }

  std::vector<IntVector> split(const IntVector& t) {
    out_.clear();
    IntVector c = IntVector::Zero(x_.cols());
    IntVector rest = t;
    step(0, rest, c);
    return std::move(out_);
  }

 private:
  void step(int u, IntVector& rest, IntVector& c) {
    if (++nodes_ > limit_) throw ResourceLimit("induced decomposition exceeded " + std::to_string(limit_) + " nodes");
    for (int l = 0; l < rest.size(); ++l) {
      if (rest[l] > 0 && last_[l] < u) return;
    }
    if (u == x_.cols()) {
      out_.push_back(c);
      return;
    }
    std::int64_t cap = std::numeric_limits<std::int64_t>::max();
    for (int l = 0; l < rest.size(); ++l) {
      if (x_(l, u) > 0) cap = std::min(cap, rest[l] / x_(l, u));
    }
    for (std::int64_t v = cap; v >= 0; --v) {
      c[u] = v;
      rest -= v * x_.col(u);
      step(u + 1, rest, c);
      rest += v * x_.col(u);
    }
    c[u] = 0;
  }

  const IntMatrix& x_;
  std::vector<int> last_;
  std::int64_t& nodes_;
  std::int64_t limit_;
  std::vector<IntVector> out_;
};

// Labels, by increasing dimension, until rho -> (S_{l,rho}/S_{0,rho})_l is injective; empty if never.
std::vector<int> generating_labels(const ModularData& md) {
  if (const auto f = single_generator(md)) return {*f};
  const int n = md.rank();
  std::vector<int> by_dim(n - 1);
  std::iota(by_dim.begin(), by_dim.end(), 1);
  std::stable_sort(by_dim.begin(), by_dim.end(), [&](int a, int b) { return md.d[a] < md.d[b] - 1e-9; });
  std::vector<std::pair<int, int>> clashes;
  for (int r = 0; r < n; ++r) {
    for (int q = r + 1; q < n; ++q) clashes.push_back({r, q});
  }
  std::vector<int> out;
  for (int l : by_dim) {
    if (clashes.empty()) break;
    if (std::find(out.begin(), out.end(), md.fusion.conj()[l]) != out.end()) continue;
    std::vector<std::pair<int, int>> left;
    for (const auto& [r, q] : clashes) {
      if (std::abs(md.s(l, r) / md.s(0, r) - md.s(l, q) / md.s(0, q)) < 1e-8) left.push_back({r, q});
    }
    if (left.size() < clashes.size()) {
      out.push_back(l);
      clashes = std::move(left);
    }
  }
  if (!clashes.empty()) return {};
  return out;
}

// When the vertex columns are linearly dependent, X G = N X no longer fixes G. Each generating matrix is
// assembled from column and row decompositions; the combination is completed and accepted only if every
// solution agrees up to permutations of vertices with equal columns.
class DegenerateResolver {
 public:
  DegenerateResolver(const ModularData& md, const IntMatrix& x, std::vector<int> labels, std::int64_t& nodes,
                     std::int64_t limit)
      : md_(md), x_(x), k_(static_cast<int>(x.cols())), labels_(std::move(labels)), nodes_(nodes), limit_(limit) {
    classes_.assign(k_, -1);
    int next = 0;
    for (int v = 0; v < k_; ++v) {
      for (int u = 0; u < v && classes_[v] < 0; ++u) {
        if (x.col(u) == x.col(v)) classes_[v] = classes_[u];
      }
      if (classes_[v] < 0) classes_[v] = next++;
    }
  }

  enum class Outcome { none, unique, ambiguous };

  Outcome run() {
    for (int l : labels_) {
      candidates_.push_back(solve_label(l));
      if (candidates_.back().empty()) return Outcome::none;
    }
    chosen_.resize(labels_.size());
    combine(0);
    if (found_.empty()) return Outcome::none;
    return ambiguous_ ? Outcome::ambiguous : Outcome::unique;
  }

  std::vector<IntMatrix> result;

 private:
  void tick() {
    if (++nodes_ > limit_) throw ResourceLimit("induced decomposition exceeded " + std::to_string(limit_) + " nodes");
  }

  std::vector<IntMatrix> solve_label(int l) {
    ColumnSplitter splitter(x_, nodes_, limit_);
    const IntMatrix nx = md_.fusion.matrix(l) * x_;
    const IntMatrix nbx = md_.fusion.matrix(md_.fusion.conj()[l]) * x_;
    cols_.assign(k_, {});
    rows_.assign(k_, {});
    for (int v = 0; v < k_; ++v) {
      cols_[v] = splitter.split(nx.col(v));
      rows_[v] = splitter.split(nbx.col(v));
      if (cols_[v].empty() || rows_[v].empty()) return {};
    }
    order_.resize(k_);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) { return cols_[a].size() < cols_[b].size(); });
    alive_.assign(k_, {});
    for (int v = 0; v < k_; ++v) alive_[v].assign(rows_[v].size(), 1);
    g_ = IntMatrix::Zero(k_, k_);
    solutions_.clear();
    assign(0);
    return std::move(solutions_);
  }

  void assign(std::size_t pos) {
    tick();
    if (pos == order_.size()) {
      if (g_ * g_.transpose() == g_.transpose() * g_) solutions_.push_back(g_);
      return;
    }
    const int w = order_[pos];
    for (const IntVector& c : cols_[w]) {
      std::vector<std::pair<int, std::size_t>> killed;
      bool ok = true;
      for (int v = 0; v < k_ && ok; ++v) {
        bool any = false;
        for (std::size_t t = 0; t < rows_[v].size(); ++t) {
          if (!alive_[v][t]) continue;
          if (rows_[v][t][w] != c[v]) {
            alive_[v][t] = 0;
            killed.push_back({v, t});
          } else {
            any = true;
          }
        }
        ok = any;
      }
      if (ok) {
        g_.col(w) = c;
        assign(pos + 1);
      }
      for (const auto& [v, t] : killed) alive_[v][t] = 1;
    }
    g_.col(w).setZero();
  }

  // Returns true once a second inequivalent solution shows up.
  bool combine(std::size_t pos) {
    tick();
    if (pos < labels_.size()) {
      for (const IntMatrix& m : candidates_[pos]) {
        bool commute = true;
        for (std::size_t q = 0; q < pos && commute; ++q) {
          commute = m * chosen_[q] == chosen_[q] * m && m * chosen_[q].transpose() == chosen_[q].transpose() * m;
        }
        if (!commute) continue;
        chosen_[pos] = m;
        if (combine(pos + 1)) return true;
      }
      return false;
    }
    Nimrep nim;
    nim.dim = k_;
    for (std::size_t q = 0; q < labels_.size(); ++q) nim.g[labels_[q]] = chosen_[q];
    try {
      nim = complete_nimrep(md_, nim);
    } catch (const std::exception&) {
      return false;
    }
    const FusionRing& fr = md_.fusion;
    if (static_cast<int>(nim.g.size()) != fr.rank()) return false;
    for (const auto& [mu, gm] : nim.g) {
      if ((gm.array() < 0).any() || x_ * gm != fr.matrix(mu) * x_) return false;
      for (int l : labels_) {
        IntMatrix r = nim.g.at(l) * gm;
        for (int nu = 0; nu < fr.rank(); ++nu) {
          if (fr(l, mu, nu)) r -= fr(l, mu, nu) * nim.g.at(nu);
        }
        if (r.any()) return false;
      }
    }
    for (const auto& other : found_) {
      Matcher match(chosen_, other, classes_, classes_);
      if (match.run(std::vector<int>(k_, -1), [](const std::vector<int>&) { return true; })) return false;
    }
    found_.push_back(chosen_);
    if (found_.size() > 1) {
      ambiguous_ = true;
      return true;
    }
    result.clear();
    for (int mu = 0; mu < fr.rank(); ++mu) result.push_back(nim.g.at(mu));
    return false;
  }

  const ModularData& md_;
  const IntMatrix& x_;
  int k_;
  std::vector<int> labels_;
  std::int64_t& nodes_;
  std::int64_t limit_;
  std::vector<int> classes_;
  std::vector<std::vector<IntVector>> cols_, rows_;
  std::vector<int> order_;
  std::vector<std::vector<char>> alive_;
  IntMatrix g_;
  std::vector<IntMatrix> solutions_;
  std::vector<std::vector<IntMatrix>> candidates_;
  std::vector<IntMatrix> chosen_;
  std::vector<std::vector<IntMatrix>> found_;
  bool ambiguous_ = false;
};

// Rank-one peeling M = X X^T with nonnegative integer columns.
class InducedDecomposer {
 public:
  InducedDecomposer(const ModularData& md, std::int64_t limit) : md_(md), n_(md.rank()), limit_(limit) {}

  bool run(const IntMatrix& r) {
    if (++nodes_ > limit_) throw ResourceLimit("induced decomposition exceeded " + std::to_string(limit_) + " nodes");
    // A unit diagonal forces its column; branch only when none is left.
    int lam = -1;
    for (int l = 0; l < n_; ++l) {
      if (r(l, l) == 1) {
        lam = l;
        break;
      }
      if (r(l, l) > 0 && lam < 0) lam = l;
    }
    if (lam < 0) return r.isZero() && accept();
    if (r(lam, lam) == 1) return try_column(r, r.row(lam).transpose(), lam);
    std::vector<int> support;
    for (int m = 0; m < n_; ++m) {
      if (r(lam, m) > 0 && m != lam) support.push_back(m);
    }
    IntVector x = IntVector::Zero(n_);
    const auto top = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(r(lam, lam))) + 1e-9));
    for (std::int64_t xl = top; xl >= 1; --xl) {
      x.setZero();
      x[lam] = xl;
      if (extend(r, x, support, 0, lam)) return true;
    }
    return false;
  }

  std::vector<IntVector> cols;
  std::vector<int> found_at;
  std::vector<IntMatrix> g;

 private:
  bool extend(const IntMatrix& r, IntVector& x, const std::vector<int>& support, std::size_t k, int lam) {
    if (k == support.size()) return try_column(r, x, lam);
    const int m = support[k];
    const auto cap = std::min(r(lam, m) / x[lam], static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(r(m, m))) + 1e-9)));
    for (std::int64_t v = cap; v >= 0; --v) {
      bool ok = true;
      for (std::size_t q = 0; q < k && ok; ++q) ok = x[support[q]] * v <= r(support[q], m);
      if (!ok) continue;
      x[m] = v;
      if (extend(r, x, support, k + 1, lam)) return true;
    }
    x[m] = 0;
    return false;
  }

  bool try_column(const IntMatrix& r, const IntVector& x, int lam) {
    const IntMatrix rest = r - x * x.transpose();
    if ((rest.array() < 0).any()) return false;
    for (int l = 0; l < n_; ++l) {
      if (rest(l, l) == 0 && rest.row(l).any()) return false;
    }
    cols.push_back(x);
    found_at.push_back(lam);
    if (run(rest)) return true;
    cols.pop_back();
    found_at.pop_back();
    return false;
  }

  bool accept() {
    const int k = static_cast<int>(cols.size());
    IntMatrix x(n_, k);
    for (int v = 0; v < k; ++v) x.col(v) = cols[v];
    const Eigen::MatrixXd xd = x.cast<double>();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(xd.transpose() * xd);
    if (lu.rank() != k) {
      std::vector<int> labels = generating_labels(md_);
      if (labels.empty()) {
        degenerate_ = true;
        return false;
      }
      DegenerateResolver res(md_, x, std::move(labels), nodes_, limit_);
      switch (res.run()) {
        case DegenerateResolver::Outcome::none:
          return false;
        case DegenerateResolver::Outcome::ambiguous:
          degenerate_ = true;
          return false;
        case DegenerateResolver::Outcome::unique:
          g = std::move(res.result);
          return true;
      }
    }
    const Eigen::MatrixXd left = lu.inverse() * xd.transpose();
    std::vector<IntMatrix> out;
    for (int mu = 0; mu < n_; ++mu) {
      const IntMatrix nx = md_.fusion.matrix(mu) * x;
      const IntMatrix gm = (left * nx.cast<double>()).array().round().cast<std::int64_t>().matrix();
      if ((gm.array() < 0).any() || x * gm != nx) return false;
      out.push_back(gm);
    }
    g = std::move(out);
    return true;
  }

 public:
  bool degenerate_ = false;

 private:
  const ModularData& md_;
  int n_;
  std::int64_t limit_;
  std::int64_t nodes_ = 0;
};

}  // namespace

InducedSystem induced_nimrep(const ModularData& md, const std::vector<int>& theta, std::int64_t node_limit) {
  const int n = md.rank();
  if (static_cast<int>(theta.size()) != n) throw std::invalid_argument("theta needs one multiplicity per label");
  if (theta[0] != 1) throw std::invalid_argument("theta must contain the vacuum exactly once");
  IntMatrix m = IntMatrix::Zero(n, n);
  for (int nu = 0; nu < n; ++nu) {
    if (theta[nu] < 0) throw std::invalid_argument("theta multiplicities must be nonnegative");
    if (theta[nu] > 0) m += theta[nu] * md.fusion.matrix(nu);
  }
  InducedDecomposer dec(md, node_limit);
  if (!dec.run(m)) {
    throw std::invalid_argument(dec.degenerate_ ? "induced system is not determined by its restriction to labels"
                                                : "theta does not induce a nonnegative integral nimrep");
  }
  InducedSystem sys;
  const int k = static_cast<int>(dec.cols.size());
  sys.x = IntMatrix(n, k);
  for (int v = 0; v < k; ++v) sys.x.col(v) = dec.cols[v];
  sys.nim.dim = k;
  for (int mu = 0; mu < n; ++mu) sys.nim.g[mu] = dec.g[mu];
  std::map<int, int> per_label;
  for (int l : dec.found_at) ++per_label[l];
  std::map<int, int> seen;
  for (int v = 0; v < k; ++v) {
    const int l = dec.found_at[v];
    std::string name = "i(" + md.labels[l].descriptor + ")";
    if (per_label[l] > 1) name += static_cast<char>('a' + seen[l]++);
    sys.nim.names.push_back(name);
  }
  if (md.grading) {
    std::vector<int> grade(k, -1);
    bool ok = true;
    for (int v = 0; v < k && ok; ++v) {
      for (int l = 0; l < n; ++l) {
        if (sys.x(l, v) == 0) continue;
        if (grade[v] < 0) grade[v] = md.grading->grade[l];
        ok = ok && grade[v] == md.grading->grade[l];
      }
    }
    if (ok) {
      sys.nim.grade = grade;
      sys.nim.grade_modulus = md.grading->modulus;
    }
  }
  return sys;
}

std::vector<int> translation_action(const InducedSystem& sys, const std::vector<std::int64_t>& marked, int order) {
  const int k = sys.nim.dim;
  int target = -1;
  for (int v = 0; v < k; ++v) {
    bool eq = static_cast<int>(marked.size()) == sys.x.rows();
    for (int l = 0; eq && l < sys.x.rows(); ++l) eq = sys.x(l, v) == marked[l];
    if (eq) {
      target = v;
      break;
    }
  }
  if (target < 0) throw std::invalid_argument("no vertex of the induced system has the marked restriction");
  std::vector<IntMatrix> mats;
  for (const auto& [l, m] : sys.nim.g) {
    if (l != 0) mats.push_back(m);
  }
  std::vector<int> init(k, -1);
  init[0] = target;
  std::vector<int> result;
  Matcher match(mats, mats, {}, {});
  const bool ok = match.run(init, [&](const std::vector<int>& phi) {
    std::vector<int> p(k);
    std::iota(p.begin(), p.end(), 0);
    for (int s = 0; s < order; ++s) {
      for (int& v : p) v = phi[v];
    }
    for (int v = 0; v < k; ++v) {
      if (p[v] != v) return false;
    }
    result = phi;
    return true;
  });
  if (!ok) throw std::invalid_argument("no automorphism of order " + std::to_string(order) + " moves vertex 0 to the marked vertex");
  return result;
}

OrbifoldResult orbifold_graph(const FusionGraph& g, const std::vector<int>& action) {
  const int n = g.size();
  if (static_cast<int>(action.size()) != n) throw std::invalid_argument("action has the wrong length");
  std::vector<bool> hit(n, false);
  for (int v : action) {
    if (v < 0 || v >= n || hit[v]) throw std::invalid_argument("action is not a permutation");
    hit[v] = true;
  }
  const IntMatrix& a = g.adjacency;
  if (permute(a, action) != a) throw std::invalid_argument("action is not a graph automorphism");
  std::vector<std::string> names = g.names;
  for (int v = static_cast<int>(names.size()); v < n; ++v) names.push_back("v" + std::to_string(v));
  std::vector<std::vector<int>> orbits;
  std::vector<int> orbit_of(n, -1);
  for (int v = 0; v < n; ++v) {
    if (orbit_of[v] >= 0) continue;
    std::vector<int> o;
    for (int u = v; orbit_of[u] < 0; u = action[u]) {
      orbit_of[u] = static_cast<int>(orbits.size());
      o.push_back(u);
    }
    orbits.push_back(o);
  }
  int m = 1;
  for (const auto& o : orbits) m = std::lcm(m, static_cast<int>(o.size()));
  for (const auto& o : orbits) {
    if (o.size() != 1 && static_cast<int>(o.size()) != m) {
      throw std::invalid_argument("orbits of intermediate length are not supported");
    }
  }
  OrbifoldResult res;
  res.order = m;
  // Nodes: (orbit, copy); free orbits have one copy, fixed points m.
  struct Node {
    int orbit;
    int copy;
  };
  std::vector<Node> nodes;
  for (int o = 0; o < static_cast<int>(orbits.size()); ++o) {
    const bool fixed = orbits[o].size() == 1 && m > 1;
    for (int c = 0; c < (fixed ? m : 1); ++c) nodes.push_back({o, c});
  }
  const int k = static_cast<int>(nodes.size());
  auto is_fixed = [&](int o) { return orbits[o].size() == 1 && m > 1; };
  IntMatrix b = IntMatrix::Zero(k, k);
  for (int p = 0; p < k; ++p) {
    for (int q = 0; q < k; ++q) {
      const auto& [op, cp] = nodes[p];
      const auto& [oq, cq] = nodes[q];
      const int i = orbits[op][0];
      if (!is_fixed(op) && !is_fixed(oq)) {
        std::int64_t s = 0;
        for (int j : orbits[oq]) s += a(i, j);
        b(p, q) = s;
      } else if (!is_fixed(op) || !is_fixed(oq)) {
        b(p, q) = a(i, orbits[oq][0]);
      } else {
        b(p, q) = cp == cq ? a(i, orbits[oq][0]) : 0;
      }
    }
  }
  res.graph.adjacency = b;
  res.graph.generator = g.generator;
  for (const auto& [o, c] : nodes) {
    if (is_fixed(o)) {
      res.graph.names.push_back(names[orbits[o][0]] + "#" + std::to_string(c));
    } else {
      std::string name = "[";
      for (std::size_t t = 0; t < orbits[o].size(); ++t) name += (t ? "," : "") + names[orbits[o][t]];
      res.graph.names.push_back(orbits[o].size() == 1 ? names[orbits[o][0]] : name + "]");
    }
  }
  res.grading_kept = !g.grade.empty();
  for (int v = 0; v < n && res.grading_kept; ++v) res.grading_kept = g.grade[action[v]] == g.grade[v];
  if (res.grading_kept) {
    for (const auto& nd : nodes) res.graph.grade.push_back(g.grade[orbits[nd.orbit][0]]);
    res.graph.grade_modulus = g.grade_modulus;
  }
  for (int p = 0; p < k; ++p) {
    const auto& [o, c] = nodes[p];
    int img = p;
    if (is_fixed(o)) img = p - c + (c + 1) % m;
    res.dual_action.push_back(img);
  }
  res.pf_in = perron_frobenius(a);
  res.pf_out = perron_frobenius(b);
  return res;
}

bool graphs_isomorphic(const FusionGraph& a, const FusionGraph& b, bool respect_grade) {
  if (a.size() != b.size()) return false;
  if (a.size() == 0) return true;
  std::vector<int> ga, gb;
  if (respect_grade) {
    if (a.grade.empty() != b.grade.empty()) return false;
    ga = a.grade;
    gb = b.grade;
  }
  Matcher match({a.adjacency}, {b.adjacency}, ga, gb);
  return match.run(std::vector<int>(a.size(), -1), [](const std::vector<int>&) { return true; });
}

std::string export_dot(const FusionGraph& g, const std::string& name) {
  const bool directed = g.oriented();
  std::ostringstream os;
  os << (directed ? "digraph" : "graph") << " \"" << name << "\" {\n";
  if (!g.generator.empty()) os << "  label=\"generator " << g.generator << "\";\n";
  os << "  node [shape=circle];\n";
  for (int v = 0; v < g.size(); ++v) {
    os << "  n" << v << " [label=\"" << (v < static_cast<int>(g.names.size()) ? g.names[v] : "v" + std::to_string(v)) << "\"";
    if (!g.grade.empty()) os << ", grade=" << g.grade[v];
    os << "];\n";
  }
  for (int i = 0; i < g.size(); ++i) {
    for (int j = directed ? 0 : i; j < g.size(); ++j) {
      const std::int64_t mult = g.adjacency(i, j);
      if (mult == 0) continue;
      os << "  n" << i << (directed ? " -> " : " -- ") << "n" << j;
      if (mult > 1) os << " [label=\"" << mult << "\", multiplicity=" << mult << "]";
      os << ";\n";
    }
  }
  os << "}\n";
  return os.str();
}

nlohmann::json graph_to_json(const FusionGraph& g) {
  nlohmann::json j;
  const bool directed = g.oriented();
  j["vertices"] = nlohmann::json::array();
  for (int v = 0; v < g.size(); ++v) {
    nlohmann::json vert;
    vert["name"] = v < static_cast<int>(g.names.size()) ? g.names[v] : "v" + std::to_string(v);
    vert["grade"] = g.grade.empty() ? nlohmann::json(nullptr) : nlohmann::json(g.grade[v]);
    j["vertices"].push_back(vert);
  }
  j["edges"] = nlohmann::json::array();
  for (int a = 0; a < g.size(); ++a) {
    for (int b = directed ? 0 : a; b < g.size(); ++b) {
      if (g.adjacency(a, b) != 0) j["edges"].push_back({a, b, g.adjacency(a, b)});
    }
  }
  j["oriented"] = directed;
  j["generator"] = g.generator;
  j["grade_modulus"] = g.grade_modulus;
  return j;
}

FusionGraph graph_from_json(const nlohmann::json& j) {
  FusionGraph g;
  const auto& verts = j.at("vertices");
  const int n = static_cast<int>(verts.size());
  g.adjacency = IntMatrix::Zero(n, n);
  bool graded = n > 0;
  for (const auto& v : verts) {
    g.names.push_back(v.at("name").get<std::string>());
    if (v.contains("grade") && v["grade"].is_number_integer()) {
      g.grade.push_back(v["grade"].get<int>());
    } else {
      graded = false;
    }
  }
  if (!graded) g.grade.clear();
  const bool directed = j.value("oriented", false);
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 3) throw std::invalid_argument("graph edges must be [i, j, multiplicity]");
    const int a = e[0].get<int>();
    const int b = e[1].get<int>();
    const std::int64_t mult = e[2].get<std::int64_t>();
    if (a < 0 || b < 0 || a >= n || b >= n || mult < 0) throw std::invalid_argument("graph edge out of range");
    g.adjacency(a, b) += mult;
    if (!directed && a != b) g.adjacency(b, a) += mult;
  }
  g.generator = j.value("generator", std::string());
  g.grade_modulus = graded ? j.value("grade_modulus", 0) : 0;
  return g;
}

}  // namespace modinv
