#include "modinv/fusion_verlinde.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace modinv {
namespace {

template <typename Scalar>
Scalar phase(Rational q) {
  if constexpr (std::is_same_v<Scalar, Cyclotomic>) {
    return Cyclotomic::root_of_unity(q);
  } else {
    return std::polar(1.0, 2.0 * std::numbers::pi * to_double(mod1(q)));
  }
}

Eigen::MatrixXd symmetric_sum(const FusionRing& fr) {
  const int r = fr.rank();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(r, r);
  for (int l = 0; l < r; ++l) {
    const Eigen::MatrixXd n = fr.matrix(l).cast<double>();
    m += n + n.transpose();
  }
  return m;
}

// Exact quantum dimensions from rounded squares, certified by d_l d_m = sum N d.
std::vector<Cyclotomic> exact_dimensions(const FusionRing& fr, const Eigen::VectorXd& d) {
  const int r = fr.rank();
  std::vector<Cyclotomic> out;
  out.reserve(r);
  for (int l = 0; l < r; ++l) {
    const double sq = d[l] * d[l];
    const double rounded = std::round(sq);
    if (std::abs(sq - rounded) > 1e-9 || rounded < 1.0) return {};
    out.push_back(Cyclotomic::sqrt_int(static_cast<std::int64_t>(rounded)));
  }
  try {
    for (int l = 0; l < r; ++l) {
      for (int m = l; m < r; ++m) {
        Cyclotomic rhs(0);
        for (int n = 0; n < r; ++n) {
          if (fr(l, m, n) != 0) rhs += Cyclotomic(static_cast<int>(fr(l, m, n))) * out[n];
        }
        if (out[l] * out[m] != rhs) return {};
      }
    }
  } catch (const CyclotomicOverflow&) {
    return {};
  }
  return out;
}

std::optional<Rational> central_charge_from(std::complex<double> z, double tol) {
  double c = 4.0 * std::arg(z) / std::numbers::pi;
  if (c < 0) c += 8.0;
  auto q = rationalize(c, 10000, tol);
  if (!q) return std::nullopt;
  return mod_rational(*q, 8);
}

}  // namespace

template <typename Scalar>
Vector<Scalar> statistics_phases(const std::vector<Rational>& h) {
  Vector<Scalar> out(static_cast<Eigen::Index>(h.size()));
  for (std::size_t i = 0; i < h.size(); ++i) out[i] = phase<Scalar>(h[i]);
  return out;
}

template <typename Scalar>
Matrix<Scalar> y_matrix(const FusionRing& fr, const std::vector<Rational>& h, const Vector<Scalar>& d) {
  const int r = fr.rank();
  Matrix<Scalar> y = Matrix<Scalar>::Zero(r, r);
  for (int m = 0; m < r; ++m) {
    for (int n = m; n < r; ++n) {
      Scalar acc(0);
      for (int l = 0; l < r; ++l) {
        const auto mult = fr(m, n, l);
        if (mult == 0) continue;
        acc += Scalar(static_cast<int>(mult)) * phase<Scalar>(h[m] + h[n] - h[l]) * d[l];
      }
      y(m, n) = acc;
      y(n, m) = acc;
    }
  }
  return y;
}

template Vector<Cyclotomic> statistics_phases<Cyclotomic>(const std::vector<Rational>&);
template Vector<std::complex<double>> statistics_phases<std::complex<double>>(const std::vector<Rational>&);
template CyclotomicMatrix y_matrix<Cyclotomic>(const FusionRing&, const std::vector<Rational>&,
                                               const Vector<Cyclotomic>&);
template ComplexMatrix y_matrix<std::complex<double>>(const FusionRing&, const std::vector<Rational>&,
                                                      const Vector<std::complex<double>>&);

FusionRing verlinde_fusion(const ComplexMatrix& s, double tol) {
  const int r = static_cast<int>(s.rows());
  if (s.cols() != r || r == 0) throw std::invalid_argument("S must be square and nonempty");
  for (int p = 0; p < r; ++p) {
    if (std::abs(s(0, p)) < tol) throw NotVerlindeMatrix("not a Verlinde matrix: S_{0,r} vanishes", 0, 0, p, 0.0);
  }
  const ComplexMatrix sd = s.adjoint();
  std::vector<IntMatrix> mats(r, IntMatrix::Zero(r, r));
  double worst = 0.0;
  int wl = -1, wm = -1, wn = -1;
  double wv = 0.0;
  for (int l = 0; l < r; ++l) {
    Eigen::VectorXcd ratio(r);
    for (int p = 0; p < r; ++p) ratio[p] = s(l, p) / s(0, p);
    const ComplexMatrix n = s * ratio.asDiagonal() * sd;
    for (int m = 0; m < r; ++m) {
      for (int k = 0; k < r; ++k) {
        const std::complex<double> v = n(m, k);
        const double rounded = std::round(v.real());
        double err = std::max(std::abs(v.real() - rounded), std::abs(v.imag()));
        if (rounded < 0) err = std::max(err, -v.real());
        if (err > worst) {
          worst = err;
          wl = l, wm = m, wn = k, wv = v.real();
        }
        mats[l](m, k) = static_cast<std::int64_t>(rounded);
      }
    }
  }
  if (worst > tol) {
    std::ostringstream os;
    os << "not a Verlinde matrix: worst cell N_{" << wl << "," << wm << "}^" << wn << " = " << wv;
    throw NotVerlindeMatrix(os.str(), wl, wm, wn, wv);
  }
  return FusionRing(std::move(mats));
}

bool verlinde_exact_check(const FusionRing& fr, const CyclotomicMatrix& s) {
  const int r = fr.rank();
  for (int l = 0; l < r; ++l) {
    for (int m = 0; m < r; ++m) {
      for (int p = 0; p < r; ++p) {
        Cyclotomic ns(0);
        for (int n = 0; n < r; ++n) {
          if (fr(l, m, n) != 0) ns += Cyclotomic(static_cast<int>(fr(l, m, n))) * s(n, p);
        }
        if (s(0, p) * ns != s(l, p) * s(m, p)) return false;
      }
    }
  }
  return true;
}

FusionDimensions fusion_dimensions(const FusionRing& fr) {
  const int r = fr.rank();
  FusionDimensions out;
  if (r == 1) {
    out.value = Eigen::VectorXd::Ones(1);
    out.exact = {Cyclotomic(1)};
    return out;
  }
  const Eigen::MatrixXd m = symmetric_sum(fr);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  Eigen::VectorXd v = es.eigenvectors().col(r - 1);
  if (v[0] < 0) v = -v;
  // A few power steps tighten the eigenvector.
  for (int it = 0; it < 20; ++it) {
    Eigen::VectorXd next = m * v;
    next /= next.norm();
    v = next;
  }
  v /= v[0];
  double bracket = 0.0;
  for (int l = 0; l < r; ++l) {
    const Eigen::VectorXd nv = fr.matrix(l).cast<double>() * v;
    const Eigen::ArrayXd ratios = nv.array() / v.array();
    bracket = std::max(bracket, ratios.maxCoeff() - ratios.minCoeff());
  }
  out.value = v;
  out.bracket = bracket;
  out.exact = exact_dimensions(fr, v);
  return out;
}

Eigen::VectorXd quantum_dimensions(const ModularData& md) {
  Eigen::VectorXd d(md.rank());
  for (int l = 0; l < md.rank(); ++l) d[l] = (md.s(l, 0) / md.s(0, 0)).real();
  return d;
}

GaussSum gauss_sum(const FusionRing& fr, const std::vector<Rational>& h, double tol) {
  const FusionDimensions dims = fusion_dimensions(fr);
  GaussSum g;
  const int r = fr.rank();
  if (!dims.exact.empty()) {
    Cyclotomic z(0);
    std::int64_t w = 0;
    for (int l = 0; l < r; ++l) {
      const auto sq = static_cast<std::int64_t>(std::llround(dims.value[l] * dims.value[l]));
      w += sq;
      z += Cyclotomic(Rational(sq)) * Cyclotomic::root_of_unity(h[l]);
    }
    g.z_exact = z;
    g.z = z.to_complex();
    g.w_exact = w;
    g.w = static_cast<double>(w);
    g.nondegenerate = z * z.conj() == Cyclotomic(Rational(w));
  } else {
    std::complex<double> z = 0;
    double w = 0;
    for (int l = 0; l < r; ++l) {
      const double sq = dims.value[l] * dims.value[l];
      w += sq;
      z += sq * phase<std::complex<double>>(h[l]);
    }
    g.z = z;
    g.w = w;
    g.nondegenerate = std::abs(std::norm(z) - w) <= tol * std::max(1.0, w);
  }
  if (std::abs(g.z) < tol && (!g.z_exact || g.z_exact->is_zero())) {
    throw DegenerateData("central charge undefined: Gauss sum vanishes", degenerate_labels(fr, h, tol));
  }
  g.c_residue = central_charge_from(g.z, 1e-8);
  return g;
}

StData reconstruct_st(const FusionRing& fr, const std::vector<Rational>& h, std::optional<Rational> central_charge,
                      double tol) {
  const int r = fr.rank();
  if (static_cast<int>(h.size()) != r) throw std::invalid_argument("one conformal weight per label is required");
  for (int l = 0; l < r; ++l) {
    if (!congruent_mod1(h[l], h[fr.conj()[l]])) {
      throw std::invalid_argument("conformal weights are not conjugation invariant");
    }
  }
  if (!congruent_mod1(h[0], Rational(0))) throw std::invalid_argument("vacuum weight must vanish mod 1");
  const GaussSum g = gauss_sum(fr, h, tol);
  if (!g.nondegenerate) {
    throw DegenerateData("braiding is degenerate: |z|^2 != w", degenerate_labels(fr, h, tol));
  }
  if (!g.c_residue) throw std::runtime_error("Gauss sum phase is not a small-denominator root of unity");
  StData st;
  if (central_charge) {
    if (!congruent_mod1((*central_charge - *g.c_residue) / 8, Rational(0))) {
      throw std::invalid_argument("supplied central charge disagrees with the Gauss sum mod 8");
    }
    st.central_charge = *central_charge;
  } else {
    st.central_charge = *g.c_residue;
  }
  const FusionDimensions dims = fusion_dimensions(fr);
  st.d = dims.value;
  st.w = g.w;
  st.w_exact = g.w_exact;
  if (!dims.exact.empty()) {
    st.mode = ScalarMode::exact;
    st.d_exact = dims.exact;
    Vector<Cyclotomic> d(r);
    for (int l = 0; l < r; ++l) d[l] = dims.exact[l];
    const std::int64_t w = *g.w_exact;
    const Cyclotomic abs_z = Cyclotomic::sqrt_int(w);
    if (*g.z_exact != abs_z * Cyclotomic::root_of_unity(*g.c_residue / 8)) {
      throw std::runtime_error("Gauss sum phase does not match the recovered central charge");
    }
    const Cyclotomic scale = abs_z / Rational(w);
    CyclotomicMatrix y = y_matrix<Cyclotomic>(fr, h, d);
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      for (Eigen::Index j = 0; j < y.cols(); ++j) y(i, j) *= scale;
    }
    st.s_exact = std::move(y);
    st.s = to_complex(st.s_exact);
  } else {
    st.mode = ScalarMode::floating;
    const Vector<std::complex<double>> d = dims.value.cast<std::complex<double>>();
    const ComplexMatrix y = y_matrix<std::complex<double>>(fr, h, d);
    st.s = y / std::abs(g.z);
  }
  st.t.reserve(r);
  for (int l = 0; l < r; ++l) st.t.push_back(mod1(h[l] - st.central_charge / 24));
  return st;
}

std::vector<int> degenerate_labels(const FusionRing& fr, const std::vector<Rational>& h, double tol) {
  const FusionDimensions dims = fusion_dimensions(fr);
  const int r = fr.rank();
  std::vector<int> out;
  if (!dims.exact.empty()) {
    Vector<Cyclotomic> d(r);
    for (int l = 0; l < r; ++l) d[l] = dims.exact[l];
    const CyclotomicMatrix y = y_matrix<Cyclotomic>(fr, h, d);
    for (int l = 0; l < r; ++l) {
      bool deg = true;
      for (int m = 0; m < r && deg; ++m) deg = y(l, m) == d[l] * d[m];
      if (deg) out.push_back(l);
    }
    return out;
  }
  const Vector<std::complex<double>> d = dims.value.cast<std::complex<double>>();
  const ComplexMatrix y = y_matrix<std::complex<double>>(fr, h, d);
  for (int l = 0; l < r; ++l) {
    bool deg = true;
    for (int m = 0; m < r && deg; ++m) deg = std::abs(y(l, m) - d[l] * d[m]) < tol * std::max(1.0, std::abs(d[l] * d[m]));
    if (deg) out.push_back(l);
  }
  return out;
}

FusionGraph fusion_graph(const ModularData& md, int generator) {
  if (generator < 0 || generator >= md.rank()) throw std::out_of_range("generator label out of range");
  FusionGraph g;
  g.adjacency = md.fusion.matrix(generator);
  for (const auto& l : md.labels) g.names.push_back(l.descriptor);
  if (md.grading) {
    g.grade = md.grading->grade;
    g.grade_modulus = md.grading->modulus;
  }
  g.generator = md.labels[generator].descriptor;
  return g;
}

double perron_frobenius(const IntMatrix& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(a.cast<double>(), false);
  double best = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) best = std::max(best, es.eigenvalues()[i].real());
  return best;
}

}  // namespace modinv
