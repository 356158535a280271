#include "modinv/invariant_engine.hpp"

#include "modinv/extensions.hpp"
#include "modinv/fusion_verlinde.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

namespace modinv {
namespace {

constexpr double kEps = 1e-9;

std::int64_t floor_eps(double x) { return static_cast<std::int64_t>(std::floor(x + kEps)); }

// Per-cell caps used by both searches: Z_00 = 1 and d_l Z_lm d_m <= w - 1 elsewhere.
IntMatrix search_caps(const ModularData& md, const Bounds& b) {
  IntMatrix cap = b.bound;
  for (int i = 0; i < md.rank(); ++i) {
    for (int j = 0; j < md.rank(); ++j) {
      if (!b.mask(i, j)) continue;
      if (i == 0 && j == 0) {
        cap(i, j) = 1;
        continue;
      }
      const double dd = md.d[i] * md.d[j];
      cap(i, j) = std::min<std::int64_t>(cap(i, j), floor_eps((b.w - 1.0) / dd));
    }
  }
  return cap;
}

void sort_unique(std::vector<IntMatrix>& v) {
  std::sort(v.begin(), v.end(), lex_less);
  v.erase(std::unique(v.begin(), v.end(), [](const IntMatrix& a, const IntMatrix& b) { return a == b; }), v.end());
}

// Exact product of an integer matrix with a cyclotomic matrix, skipping zeros.
CyclotomicMatrix int_times(const IntMatrix& z, const CyclotomicMatrix& s) {
  const Eigen::Index r = z.rows();
  CyclotomicMatrix out = CyclotomicMatrix::Zero(r, s.cols());
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index k = 0; k < r; ++k) {
      const auto v = z(i, k);
      if (v == 0) continue;
      const Cyclotomic cv(static_cast<int>(v));
      for (Eigen::Index j = 0; j < s.cols(); ++j) out(i, j) += cv * s(k, j);
    }
  }
  return out;
}

CyclotomicMatrix times_int(const CyclotomicMatrix& s, const IntMatrix& z) {
  const Eigen::Index r = z.rows();
  CyclotomicMatrix out = CyclotomicMatrix::Zero(s.rows(), r);
  for (Eigen::Index k = 0; k < r; ++k) {
    for (Eigen::Index j = 0; j < r; ++j) {
      const auto v = z(k, j);
      if (v == 0) continue;
      const Cyclotomic cv(static_cast<int>(v));
      for (Eigen::Index i = 0; i < s.rows(); ++i) out(i, j) += s(i, k) * cv;
    }
  }
  return out;
}

double s_commutator_residual(const ModularData& md, const IntMatrix& z) {
  const ComplexMatrix zc = z.cast<double>().cast<std::complex<double>>();
  return (zc * md.s - md.s * zc).cwiseAbs().maxCoeff();
}

}  // namespace

bool lex_less(const IntMatrix& a, const IntMatrix& b) {
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (a(i, j) != b(i, j)) return a(i, j) < b(i, j);
    }
  }
  return false;
}

Bounds bound_matrix(const ModularData& md) {
  const int r = md.rank();
  Bounds b;
  b.bound = IntMatrix::Zero(r, r);
  b.mask = BoolMatrix::Constant(r, r, false);
  b.w = md.w_exact ? static_cast<double>(*md.w_exact) : md.w;
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      b.mask(i, j) = md.labels[i].h == md.labels[j].h;
      if (b.mask(i, j)) b.bound(i, j) = floor_eps(md.d[i] * md.d[j]);
    }
  }
  return b;
}

bool commutes_with_st(const ModularData& md, const IntMatrix& z, double tol) {
  const int r = md.rank();
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      if (z(i, j) != 0 && md.labels[i].h != md.labels[j].h) return false;
    }
  }
  if (md.exact()) {
    try {
      return int_times(z, md.s_exact) == times_int(md.s_exact, z);
    } catch (const CyclotomicOverflow&) {
      // fall through to the float check
    }
  }
  return s_commutator_residual(md, z) < tol;
}

Eigen::MatrixXd CommutantBasis::matrix(int i, int rank) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rank, rank);
  for (std::size_t c = 0; c < cells.size(); ++c) m(cells[c].first, cells[c].second) = numeric[i][c];
  return m;
}

CommutantBasis commutant_basis(const ModularData& md, double tol) {
  const int r = md.rank();
  const Bounds bounds = bound_matrix(md);
  CommutantBasis out;
  // Priority: vacuum cell, vacuum row and column, then ascending bound.
  std::vector<std::pair<int, int>> cells;
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      if (bounds.mask(i, j)) cells.emplace_back(i, j);
    }
  }
  auto key = [&](const std::pair<int, int>& c) {
    const int cls = (c.first == 0 && c.second == 0) ? 0 : (c.first == 0 || c.second == 0) ? 1 : 2;
    return std::make_tuple(cls, bounds.bound(c.first, c.second), c.first, c.second);
  };
  std::stable_sort(cells.begin(), cells.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
  out.cells = cells;
  const int u = static_cast<int>(cells.size());

  // Gram matrix of the real linear map Z -> ZS - SZ on the masked cells.
  Eigen::MatrixXd g(u, u);
  for (int p = 0; p < u; ++p) {
    const auto [c, d] = cells[p];
    for (int q = p; q < u; ++q) {
      const auto [c2, d2] = cells[q];
      double v = -2.0 * (std::conj(md.s(d, d2)) * md.s(c, c2)).real();
      if (p == q) v += 2.0;
      g(p, q) = v;
      g(q, p) = v;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  std::vector<int> null_cols;
  for (int i = 0; i < u; ++i) {
    if (es.eigenvalues()[i] < tol) null_cols.push_back(i);
  }
  const int k = static_cast<int>(null_cols.size());
  Eigen::MatrixXd kernel(u, k);
  for (int i = 0; i < k; ++i) kernel.col(i) = es.eigenvectors().col(null_cols[i]);

  // Greedy pivot rows in priority order.
  std::vector<int> pivots;
  Eigen::MatrixXd q(k, 0);
  for (int p = 0; p < u && static_cast<int>(pivots.size()) < k; ++p) {
    Eigen::VectorXd row = kernel.row(p).transpose();
    if (q.cols() > 0) row -= q * (q.transpose() * row);
    const double n = row.norm();
    if (n > 1e-6) {
      q.conservativeResize(k, q.cols() + 1);
      q.col(q.cols() - 1) = row / n;
      pivots.push_back(p);
    }
  }
  out.pivots = pivots;
  Eigen::MatrixXd kp(k, k);
  for (int i = 0; i < k; ++i) kp.row(i) = kernel.row(pivots[i]);
  const Eigen::MatrixXd basis = kernel * kp.inverse();

  out.numeric.resize(k);
  bool rational_ok = true;
  out.rational.assign(k, std::vector<Rational>(u, Rational(0)));
  for (int i = 0; i < k; ++i) {
    out.numeric[i] = basis.col(i);
    for (int c = 0; c < u && rational_ok; ++c) {
      const auto q = rationalize(basis(c, i), 1000, 1e-7);
      if (!q) {
        rational_ok = false;
        break;
      }
      out.rational[i][c] = *q;
    }
  }
  if (rational_ok) {
    // Re-verify each rationalized vector by clearing denominators.
    for (int i = 0; i < k && rational_ok; ++i) {
      std::int64_t l = 1;
      for (const auto& v : out.rational[i]) l = std::lcm(l, v.denominator());
      IntMatrix zi = IntMatrix::Zero(r, r);
      for (int c = 0; c < u; ++c) {
        const Rational v = out.rational[i][c] * Rational(l);
        zi(cells[c].first, cells[c].second) = v.numerator();
      }
      rational_ok = commutes_with_st(md, zi, tol * static_cast<double>(l) * 10.0);
    }
  }
  out.exact_rational = rational_ok;
  if (rational_ok) {
    for (int i = 0; i < k; ++i) {
      for (int c = 0; c < u; ++c) out.numeric[i][c] = to_double(out.rational[i][c]);
    }
  } else {
    out.rational.clear();
  }
  return out;
}

namespace {

class LatticeSearch {
 public:
  LatticeSearch(const ModularData& md, const CommutantBasis& basis, const SearchLimits& limits)
      : md_(md), basis_(basis), limits_(limits) {
    const Bounds bounds = bound_matrix(md);
    caps_ = search_caps(md, bounds);
    budget_ = limits.max_budget.value_or(bounds.w);
    k_ = basis.dimension();
    u_ = static_cast<int>(basis.cells.size());
    cell_cap_.resize(u_);
    for (int c = 0; c < u_; ++c) cell_cap_[c] = static_cast<double>(caps_(basis.cells[c].first, basis.cells[c].second));
    pivot_cap_.resize(k_);
    for (int t = 0; t < k_; ++t) pivot_cap_[t] = cell_cap_[basis.pivots[t]];
    coeff_.assign(k_, {});
    for (int t = 0; t < k_; ++t) {
      for (int c = 0; c < u_; ++c) {
        const double v = basis.numeric[t][c];
        if (std::abs(v) > 1e-12) coeff_[t].emplace_back(c, v);
      }
    }
    // Suffix ranges of the contribution of pivots >= t to each cell.
    suf_min_.assign(k_ + 1, std::vector<double>(u_, 0.0));
    suf_max_.assign(k_ + 1, std::vector<double>(u_, 0.0));
    for (int t = k_ - 1; t >= 0; --t) {
      suf_min_[t] = suf_min_[t + 1];
      suf_max_[t] = suf_max_[t + 1];
      for (const auto& [c, v] : coeff_[t]) {
        const double ext = v * pivot_cap_[t];
        suf_min_[t][c] += std::min(0.0, ext);
        suf_max_[t][c] += std::max(0.0, ext);
      }
    }
    sum_coeff_.assign(k_, 0.0);
    for (int t = 0; t < k_; ++t) {
      for (const auto& [c, v] : coeff_[t]) sum_coeff_[t] += v;
    }
    sum_suf_min_.assign(k_ + 1, 0.0);
    for (int t = k_ - 1; t >= 0; --t) sum_suf_min_[t] = sum_suf_min_[t + 1] + std::min(0.0, sum_coeff_[t] * pivot_cap_[t]);
  }

  // Root values for pivot 1 (pivot 0 is the vacuum cell, fixed to 1).
  std::vector<std::int64_t> roots() {
    reset();
    assign(0, 1);
    std::vector<std::int64_t> out;
    if (k_ == 1) return {0};
    const auto [lo, hi] = range(1);
    for (std::int64_t x = lo; x <= hi; ++x) out.push_back(x);
    return out;
  }

  struct BranchResult {
    std::vector<IntMatrix> found;
    std::int64_t nodes = 0;
    bool truncated = false;
  };

  BranchResult run_branch(std::int64_t root) {
    reset();
    result_ = {};
    assign(0, 1);
    if (k_ == 1) {
      leaf();
      return result_;
    }
    assign(1, root);
    dfs(2);
    return result_;
  }

 private:
  void reset() {
    partial_.assign(u_, 0.0);
    partial_sum_ = 0.0;
    x_.assign(k_, 0);
  }

  void assign(int t, std::int64_t x) {
    const std::int64_t old = x_[t];
    x_[t] = x;
    const double delta = static_cast<double>(x - old);
    for (const auto& [c, v] : coeff_[t]) partial_[c] += v * delta;
    partial_sum_ += sum_coeff_[t] * delta;
  }

  std::pair<std::int64_t, std::int64_t> range(int t) const {
    double lo = 0.0;
    double hi = pivot_cap_[t];
    for (const auto& [c, v] : coeff_[t]) {
      const double low_need = -partial_[c] - suf_max_[t + 1][c] - kEps;
      const double high_need = cell_cap_[c] - partial_[c] - suf_min_[t + 1][c] + kEps;
      if (v > 0) {
        lo = std::max(lo, low_need / v);
        hi = std::min(hi, high_need / v);
      } else {
        lo = std::max(lo, high_need / v);
        hi = std::min(hi, low_need / v);
      }
      if (lo > hi + kEps) return {1, 0};
    }
    // Gannon budget: sum of entries.
    const double s = sum_coeff_[t];
    const double room = budget_ - partial_sum_ - sum_suf_min_[t + 1] + kEps;
    if (s > 1e-12) hi = std::min(hi, room / s);
    return {static_cast<std::int64_t>(std::ceil(lo - 1e-7)), static_cast<std::int64_t>(std::floor(hi + 1e-7))};
  }

  void dfs(int t) {
    if (result_.truncated) return;
    if (++result_.nodes > limits_.max_nodes) {
      result_.truncated = true;
      return;
    }
    if (t == k_) {
      leaf();
      return;
    }
    const auto [lo, hi] = range(t);
    for (std::int64_t x = lo; x <= hi; ++x) {
      assign(t, x);
      dfs(t + 1);
      if (result_.truncated) break;
    }
    assign(t, 0);
  }

  void leaf() {
    const int r = md_.rank();
    IntMatrix z = IntMatrix::Zero(r, r);
    for (int c = 0; c < u_; ++c) {
      std::int64_t value = 0;
      if (basis_.exact_rational) {
        Rational acc(0);
        for (int t = 0; t < k_; ++t) {
          if (x_[t] != 0 && basis_.rational[t][c].numerator() != 0) acc += basis_.rational[t][c] * Rational(x_[t]);
        }
        if (acc.denominator() != 1) return;
        value = acc.numerator();
      } else {
        double acc = 0.0;
        for (int t = 0; t < k_; ++t) acc += basis_.numeric[t][c] * static_cast<double>(x_[t]);
        const double rounded = std::round(acc);
        if (std::abs(acc - rounded) > 1e-6) return;
        value = static_cast<std::int64_t>(rounded);
      }
      if (value < 0 || static_cast<double>(value) > cell_cap_[c]) return;
      z(basis_.cells[c].first, basis_.cells[c].second) = value;
    }
    if (static_cast<double>(z.sum()) > budget_ + kEps) return;
    if (!verify_invariant(md_, z, limits_.tolerance).passed()) return;
    result_.found.push_back(std::move(z));
  }

  const ModularData& md_;
  const CommutantBasis& basis_;
  SearchLimits limits_;
  IntMatrix caps_;
  double budget_ = 0.0;
  int k_ = 0;
  int u_ = 0;
  std::vector<double> cell_cap_;
  std::vector<double> pivot_cap_;
  std::vector<std::vector<std::pair<int, double>>> coeff_;
  std::vector<std::vector<double>> suf_min_, suf_max_;
  std::vector<double> sum_coeff_;
  std::vector<double> sum_suf_min_;
  std::vector<double> partial_;
  double partial_sum_ = 0.0;
  std::vector<std::int64_t> x_;
  BranchResult result_;
};

}  // namespace

SearchResult enumerate_physical(const ModularData& md, const SearchLimits& limits) {
  const CommutantBasis basis = commutant_basis(md, limits.tolerance);
  SearchResult out;
  out.commutant_only = !gauss_sum(md.fusion, md.twists(), limits.tolerance).nondegenerate;
  if (basis.dimension() == 0 || basis.pivots.front() != 0) {
    throw std::logic_error("commutant does not contain the vacuum cell as first pivot");
  }
  LatticeSearch probe(md, basis, limits);
  const std::vector<std::int64_t> roots = probe.roots();
  std::vector<LatticeSearch::BranchResult> results(roots.size());
  const int jobs = std::max(1, std::min<int>(limits.jobs, static_cast<int>(roots.size())));
  if (jobs == 1) {
    for (std::size_t i = 0; i < roots.size(); ++i) results[i] = probe.run_branch(roots[i]);
  } else {
    std::vector<std::thread> workers;
    std::atomic<std::size_t> next{0};
    for (int j = 0; j < jobs; ++j) {
      workers.emplace_back([&] {
        LatticeSearch local(md, basis, limits);
        for (std::size_t i = next++; i < roots.size(); i = next++) results[i] = local.run_branch(roots[i]);
      });
    }
    for (auto& w : workers) w.join();
  }
  for (std::size_t i = 0; i < roots.size(); ++i) {
    auto& r = results[i];
    out.nodes += r.nodes;
    for (auto& z : r.found) out.invariants.push_back(std::move(z));
    if (r.truncated) {
      out.truncated = true;
      const auto [pi, pj] = basis.cells[basis.pivots.size() > 1 ? basis.pivots[1] : 0];
      std::ostringstream os;
      os << "Z(" << pi << "," << pj << ")=" << roots[i];
      out.frontier.push_back(os.str());
    }
  }
  sort_unique(out.invariants);
  if (out.truncated) throw SearchTruncated("node limit reached in the commutant search", std::move(out));
  return out;
}

SearchResult enumerate_oracle(const ModularData& md, const SearchLimits& limits) {
  const int r = md.rank();
  const Bounds bounds = bound_matrix(md);
  const IntMatrix caps = search_caps(md, bounds);
  const double budget = limits.max_budget.value_or(bounds.w);
  const double w = bounds.w;
  const Eigen::VectorXd& d = md.d;

  std::vector<std::pair<int, int>> order;
  for (int j = 1; j < r; ++j) {
    if (bounds.mask(0, j)) order.emplace_back(0, j);
    if (bounds.mask(j, 0)) order.emplace_back(j, 0);
  }
  const std::size_t vacuum_cells = order.size();
  for (int j = 1; j < r; ++j) {
    for (int i = 1; i < r; ++i) {
      if (bounds.mask(i, j)) order.emplace_back(i, j);
    }
  }
  const std::size_t n = order.size();

  // Remaining capacity per row / column (d-weighted) and overall.
  std::vector<double> col_left(r, 0.0), row_left(r, 0.0);
  double dd_left = 0.0;
  double count_left = 0.0;
  for (const auto& [i, j] : order) {
    const double c = static_cast<double>(caps(i, j));
    col_left[j] += c * d[i];
    row_left[i] += c * d[j];
    dd_left += c * d[i] * d[j];
    count_left += c;
  }
  std::vector<double> col_sum(r, 0.0), row_sum(r, 0.0);
  col_sum[0] = 1.0;  // Z_00 d_0
  row_sum[0] = 1.0;
  std::vector<double> col_target(r, 0.0), row_target(r, 0.0);
  bool targets_ready = false;
  double dd_sum = 1.0;
  double count = 1.0;

  IntMatrix z = IntMatrix::Zero(r, r);
  z(0, 0) = 1;
  SearchResult out;
  const double s00 = md.s(0, 0).real();

  auto compute_targets = [&]() -> bool {
    for (int mu = 0; mu < r; ++mu) {
      std::complex<double> acc = 0;
      for (int b = 0; b < r; ++b) {
        if (z(0, b) != 0) acc += static_cast<double>(z(0, b)) * md.s(b, mu);
      }
      acc /= s00;
      if (std::abs(acc.imag()) > 1e-7 || acc.real() < -1e-7) return false;
      col_target[mu] = acc.real();
      std::complex<double> acc2 = 0;
      for (int a = 0; a < r; ++a) {
        if (z(a, 0) != 0) acc2 += md.s(mu, a) * static_cast<double>(z(a, 0));
      }
      acc2 /= s00;
      if (std::abs(acc2.imag()) > 1e-7 || acc2.real() < -1e-7) return false;
      row_target[mu] = acc2.real();
    }
    // Column 0 and row 0 are complete at this point.
    return std::abs(col_sum[0] - col_target[0]) < 1e-7 && std::abs(row_sum[0] - row_target[0]) < 1e-7;
  };
  auto line_ok = [&](int i, int j) {
    if (!targets_ready) return true;
    const double tol = 1e-7;
    if (col_sum[j] > col_target[j] + tol || col_sum[j] + col_left[j] < col_target[j] - tol) return false;
    if (row_sum[i] > row_target[i] + tol || row_sum[i] + row_left[i] < row_target[i] - tol) return false;
    return true;
  };

  auto rec = [&](auto&& self, std::size_t pos) -> void {
    if (out.truncated) return;
    if (++out.nodes > limits.max_nodes) {
      out.truncated = true;
      return;
    }
    if (pos == vacuum_cells && !targets_ready) {
      if (!compute_targets()) return;
      targets_ready = true;
      // Every line must still be reachable.
      bool ok = true;
      for (int m = 0; m < r && ok; ++m) ok = line_ok(m, m);
      if (ok) self(self, pos);
      targets_ready = false;
      return;
    }
    if (pos == n) {
      if (std::abs(dd_sum - w) > 1e-7) return;
      if (commutes_with_st(md, z, limits.tolerance) && verify_invariant(md, z, limits.tolerance).passed()) {
        out.invariants.push_back(z);
      }
      return;
    }
    const auto [i, j] = order[pos];
    const double c = static_cast<double>(caps(i, j));
    const double dd = d[i] * d[j];
    col_left[j] -= c * d[i];
    row_left[i] -= c * d[j];
    dd_left -= c * dd;
    count_left -= c;
    for (std::int64_t v = 0; v <= caps(i, j); ++v) {
      const double vd = static_cast<double>(v);
      if (dd_sum + vd * dd > w + 1e-7) break;
      if (count + vd > budget + 1e-7) break;
      z(i, j) = v;
      col_sum[j] += vd * d[i];
      row_sum[i] += vd * d[j];
      dd_sum += vd * dd;
      count += vd;
      if (dd_sum + dd_left >= w - 1e-7 && line_ok(i, j)) self(self, pos + 1);
      col_sum[j] -= vd * d[i];
      row_sum[i] -= vd * d[j];
      dd_sum -= vd * dd;
      count -= vd;
      if (out.truncated) break;
    }
    z(i, j) = 0;
    col_left[j] += c * d[i];
    row_left[i] += c * d[j];
    dd_left += c * dd;
    count_left += c;
  };
  rec(rec, 0);
  sort_unique(out.invariants);
  if (out.truncated) {
    out.frontier.push_back("oracle");
    throw SearchTruncated("node limit reached in the oracle search", std::move(out));
  }
  return out;
}

bool InvariantReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const InvariantCheck& c) { return c.passed; });
}

const InvariantCheck* InvariantReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const InvariantCheck* InvariantReport::first_failure() const {
  for (const auto& c : checks) {
    if (!c.passed) return &c;
  }
  return nullptr;
}

InvariantReport verify_invariant(const ModularData& md, const IntMatrix& z, double tol) {
  InvariantReport rep;
  const int r = md.rank();
  if (z.rows() != r || z.cols() != r) {
    rep.checks.push_back({"shape", false, 0.0, static_cast<int>(z.rows()), static_cast<int>(z.cols())});
    return rep;
  }
  const Bounds b = bound_matrix(md);
  rep.checks.push_back({"vacuum", z(0, 0) == 1, static_cast<double>(std::abs(z(0, 0) - 1)), 0, 0});
  InvariantCheck nonneg{"nonnegative", true, 0.0, -1, -1};
  InvariantCheck sparsity{"T-sparsity", true, 0.0, -1, -1};
  InvariantCheck bound{"entry bound", true, 0.0, -1, -1};
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      const auto v = z(i, j);
      if (v < 0 && nonneg.passed) nonneg = {"nonnegative", false, static_cast<double>(-v), i, j};
      if (v != 0 && !b.mask(i, j) && sparsity.passed) sparsity = {"T-sparsity", false, static_cast<double>(v), i, j};
      if (v > floor_eps(md.d[i] * md.d[j]) && bound.passed) {
        bound = {"entry bound", false, static_cast<double>(v) - md.d[i] * md.d[j], i, j};
      }
    }
  }
  rep.checks.push_back(nonneg);
  rep.checks.push_back(sparsity);
  rep.checks.push_back(bound);
  const double total = static_cast<double>(z.sum());
  rep.checks.push_back({"Gannon budget", total <= b.w + kEps, std::max(0.0, total - b.w), -1, -1});
  // ZT = TZ is equivalent to the sparsity pattern, reported separately.
  rep.checks.push_back({"ZT=TZ", sparsity.passed, sparsity.residual, sparsity.row, sparsity.col});
  InvariantCheck comm{"ZS=SZ", true, 0.0, -1, -1};
  const ComplexMatrix zc = z.cast<double>().cast<std::complex<double>>();
  const ComplexMatrix diff = zc * md.s - md.s * zc;
  Eigen::Index wi = 0, wj = 0;
  comm.residual = diff.cwiseAbs().maxCoeff(&wi, &wj);
  if (md.exact() && sparsity.passed) {
    bool ok = false;
    try {
      ok = int_times(z, md.s_exact) == times_int(md.s_exact, z);
    } catch (const CyclotomicOverflow&) {
      ok = comm.residual < tol;
    }
    comm.passed = ok;
  } else {
    comm.passed = comm.residual < tol;
  }
  if (!comm.passed) {
    comm.row = static_cast<int>(wi);
    comm.col = static_cast<int>(wj);
  }
  rep.checks.push_back(comm);
  return rep;
}

std::string Classification::type() const {
  if (is_heterotic) return "heterotic";
  return type1_fit ? "I" : "II";
}

Classification classify(const ModularData& md, const IntMatrix& z, std::int64_t fit_node_limit) {
  const int r = md.rank();
  Classification c;
  for (int l = 0; l < r; ++l) {
    c.vacuum_row.push_back(z(0, l));
    c.vacuum_column.push_back(z(l, 0));
    c.diagonal.push_back(z(l, l));
  }
  c.trace = z.trace();
  c.is_symmetric = z == z.transpose();
  auto is_delta = [](const std::vector<std::int64_t>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] != (i == 0 ? 1 : 0)) return false;
    }
    return true;
  };
  c.is_permutation = is_delta(c.vacuum_column);
  if (c.is_permutation) {
    bool perm = true;
    for (int i = 0; i < r && perm; ++i) {
      int one = -1;
      for (int j = 0; j < r; ++j) {
        if (z(i, j) == 1 && one < 0) {
          one = j;
        } else if (z(i, j) != 0) {
          perm = false;
        }
      }
      if (one < 0) perm = false;
      c.permutation.push_back(one);
    }
    if (!perm) c.permutation.clear();
  }
  c.is_heterotic = c.vacuum_row != c.vacuum_column;
  if (!c.is_heterotic && c.is_symmetric) c.type1_fit = fit_type1_blocks(md, z, fit_node_limit);
  bool large_vacuum = false;
  for (int l = 0; l < r; ++l) {
    if ((c.vacuum_row[l] != 0 || c.vacuum_column[l] != 0) && std::abs(md.d[l] - 1.0) > 1e-9) large_vacuum = true;
  }
  c.exceptional = !c.is_permutation && (large_vacuum || (!c.type1_fit && !c.is_heterotic));
  return c;
}

GlobalIndices chiral_global_indices(const ModularData& md, const IntMatrix& z, double tol) {
  const int r = md.rank();
  GlobalIndices g;
  g.w = md.w_exact ? static_cast<double>(*md.w_exact) : md.w;
  for (int l = 0; l < r; ++l) {
    g.column_weight += md.d[l] * static_cast<double>(z(l, 0));
    g.row_weight += static_cast<double>(z(0, l)) * md.d[l];
  }
  if (g.column_weight < 1.0 - tol || g.row_weight < 1.0 - tol) {
    throw std::logic_error("vacuum coupling must contain the vacuum");
  }
  if (std::abs(g.column_weight - g.row_weight) > tol * std::max(1.0, g.row_weight)) {
    throw std::logic_error("vacuum coupling balance fails");
  }
  g.w_plus = g.w / g.column_weight;
  g.w_minus = g.w / g.row_weight;
  const std::vector<int> deg = degenerate_labels(md.fusion, md.twists(), tol);
  double alpha = 0.0;
  for (int l : deg) alpha += static_cast<double>(z(0, l)) * md.d[l];
  g.w_alpha = g.w / alpha;
  g.w_zero = g.w_plus * g.w_plus / g.w_alpha;
  return g;
}

}  // namespace modinv
