#include "modinv/modular_data.hpp"

#include "modinv/fusion_verlinde.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

namespace modinv {
namespace {

ModularData assemble(std::string model, std::vector<Label> labels, FusionRing fusion,
                     std::optional<Rational> c, std::optional<Grading> grading) {
  if (const auto bad = fusion_ring_violations(fusion); !bad.empty()) {
    throw std::logic_error("constructed fusion ring is invalid: " + bad.front());
  }
  std::vector<Rational> h;
  h.reserve(labels.size());
  for (const auto& l : labels) h.push_back(l.h);
  StData st = reconstruct_st(fusion, h, c);
  ModularData md;
  md.model = std::move(model);
  md.labels = std::move(labels);
  md.fusion = std::move(fusion);
  md.central_charge = st.central_charge;
  md.mode = st.mode;
  md.s_exact = std::move(st.s_exact);
  md.d_exact = std::move(st.d_exact);
  md.s = std::move(st.s);
  md.d = std::move(st.d);
  md.w = st.w;
  md.w_exact = st.w_exact;
  md.grading = std::move(grading);
  return md;
}

Label make_label(int index, std::string descriptor, Rational weight, int conj) {
  Label l;
  l.index = index;
  l.descriptor = std::move(descriptor);
  l.weight = weight;
  l.h = mod1(weight);
  l.conj = conj;
  return l;
}

FusionRing group_ring(int order, const std::function<int(int, int)>& product) {
  std::vector<IntMatrix> mats(order, IntMatrix::Zero(order, order));
  for (int a = 0; a < order; ++a) {
    for (int b = 0; b < order; ++b) mats[a](b, product(a, b)) = 1;
  }
  return FusionRing(std::move(mats));
}

template <typename Scalar>
Scalar phase(Rational q) {
  if constexpr (std::is_same_v<Scalar, Cyclotomic>) {
    return Cyclotomic::root_of_unity(q);
  } else {
    return std::polar(1.0, 2.0 * std::numbers::pi * to_double(mod1(q)));
  }
}

template <typename Scalar>
double magnitude(const Scalar& x) {
  if constexpr (std::is_same_v<Scalar, Cyclotomic>) {
    return x.is_zero() ? 0.0 : std::max(std::abs(x.to_complex()), 1e-300);
  } else {
    return std::abs(x);
  }
}

template <typename Scalar>
Matrix<Scalar> dagger(const Matrix<Scalar>& m) {
  if constexpr (std::is_same_v<Scalar, Cyclotomic>) {
    return conjugate_transpose(m);
  } else {
    return m.adjoint();
  }
}

template <typename Scalar>
double max_residual(const Matrix<Scalar>& a, const Matrix<Scalar>& b) {
  double r = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) r = std::max(r, magnitude<Scalar>(a(i, j) - b(i, j)));
  }
  return r;
}

template <typename Scalar>
AxiomReport run_axioms(const Matrix<Scalar>& s, const Matrix<Scalar>& t, const Matrix<Scalar>& c,
                       double tol, const std::vector<bool>& t_order_finite) {
  constexpr bool exact = std::is_same_v<Scalar, Cyclotomic>;
  AxiomReport rep;
  rep.exact = exact;
  const Eigen::Index r = s.rows();
  const Matrix<Scalar> id = Matrix<Scalar>::Identity(r, r);
  auto add = [&](std::string name, const Matrix<Scalar>& lhs, const Matrix<Scalar>& rhs, bool full) {
    AxiomCheck chk;
    chk.relation = std::move(name);
    chk.residual = max_residual<Scalar>(lhs, rhs);
    chk.passed = exact ? chk.residual == 0.0 : chk.residual < tol;
    chk.full_algebra = full;
    rep.checks.push_back(chk);
  };
  add("S symmetric", s, s.transpose(), false);
  add("S unitary", s * dagger<Scalar>(s), id, false);
  {
    AxiomCheck chk;
    chk.relation = "S vacuum column positive";
    double worst = 0.0;
    for (Eigen::Index l = 0; l < r; ++l) {
      std::complex<double> v;
      bool real = true;
      if constexpr (exact) {
        real = s(l, 0) == s(l, 0).conj();
        v = s(l, 0).to_complex();
        if (real) v.imag(0.0);
      } else {
        v = s(l, 0);
        real = std::abs(v.imag()) <= tol;
      }
      if (v.real() <= 0.0) worst = std::max(worst, 1.0 - v.real());
      if (!real) worst = std::max(worst, std::max(std::abs(v.imag()), 1e-300));
    }
    chk.residual = worst;
    chk.passed = worst == 0.0;
    rep.checks.push_back(chk);
  }
  add("TSTST=S", Matrix<Scalar>(t * s * t * s * t), s, false);
  add("CTC=T", Matrix<Scalar>(c * t * c), t, false);
  add("CSC=S", Matrix<Scalar>(c * s * c), s, false);
  add("T*T=1", Matrix<Scalar>(dagger<Scalar>(t) * t), id, false);
  {
    auto& chk = rep.checks.back();
    for (bool finite : t_order_finite) {
      if (!finite) {
        chk.passed = false;
        chk.residual = std::max(chk.residual, 1.0);
      }
    }
  }
  const Matrix<Scalar> st = s * t;
  const Matrix<Scalar> s2 = s * s;
  add("(ST)^3=S^2", Matrix<Scalar>(st * st * st), s2, true);
  add("S^2=C", s2, c, true);
  return rep;
}

template <typename Scalar>
Matrix<Scalar> permutation_matrix(const std::vector<int>& perm) {
  const int r = static_cast<int>(perm.size());
  Matrix<Scalar> c = Matrix<Scalar>::Zero(r, r);
  for (int i = 0; i < r; ++i) c(i, perm[i]) = Scalar(1);
  return c;
}

}  // namespace

std::vector<Rational> ModularData::twists() const {
  std::vector<Rational> h;
  h.reserve(labels.size());
  for (const auto& l : labels) h.push_back(l.h);
  return h;
}

int ModularData::find(std::string_view descriptor) const {
  for (const auto& l : labels) {
    if (l.descriptor == descriptor) return l.index;
  }
  return -1;
}

std::vector<int> ModularData::conjugation() const {
  std::vector<int> c;
  c.reserve(labels.size());
  for (const auto& l : labels) c.push_back(l.conj);
  return c;
}

template <typename Scalar>
Matrix<Scalar> s_matrix(const ModularData& md) {
  if constexpr (std::is_same_v<Scalar, Cyclotomic>) {
    if (!md.exact()) throw std::logic_error("exact S requested for floating-mode data");
    return md.s_exact;
  } else {
    return md.s;
  }
}

template <typename Scalar>
Matrix<Scalar> t_matrix(const ModularData& md) {
  const int r = md.rank();
  Matrix<Scalar> t = Matrix<Scalar>::Zero(r, r);
  for (int l = 0; l < r; ++l) t(l, l) = phase<Scalar>(md.t_exponent(l));
  return t;
}

template <typename Scalar>
Matrix<Scalar> c_matrix(const ModularData& md) {
  return permutation_matrix<Scalar>(md.conjugation());
}

template CyclotomicMatrix s_matrix<Cyclotomic>(const ModularData&);
template ComplexMatrix s_matrix<std::complex<double>>(const ModularData&);
template CyclotomicMatrix t_matrix<Cyclotomic>(const ModularData&);
template ComplexMatrix t_matrix<std::complex<double>>(const ModularData&);
template CyclotomicMatrix c_matrix<Cyclotomic>(const ModularData&);
template ComplexMatrix c_matrix<std::complex<double>>(const ModularData&);

ModularData build_su2(int k) {
  if (k < 1) throw std::invalid_argument("su2 level must be >= 1");
  const int r = k + 1;
  std::vector<IntMatrix> mats(r, IntMatrix::Zero(r, r));
  for (int a = 0; a <= k; ++a) {
    for (int b = 0; b <= k; ++b) {
      for (int c = std::abs(a - b); c <= std::min(a + b, 2 * k - a - b); c += 2) mats[a](b, c) = 1;
    }
  }
  std::vector<Label> labels;
  Grading g{2, {}};
  for (int l = 0; l <= k; ++l) {
    labels.push_back(make_label(l, std::to_string(l), Rational(l * (l + 2), 4 * (k + 2)), l));
    g.grade.push_back(l % 2);
  }
  return assemble("su2:" + std::to_string(k), std::move(labels), FusionRing(std::move(mats)),
                  Rational(3 * k, k + 2), g);
}

ModularData build_sun(int n, int k, int rank_cap) {
  if (n < 2) throw std::invalid_argument("sun rank n must be >= 2");
  if (k < 1) throw std::invalid_argument("sun level must be >= 1");
  // Alcove size is binomial(n - 1 + k, k).
  double size = 1.0;
  for (int i = 1; i < n; ++i) size = size * (k + i) / i;
  if (size > rank_cap) {
    std::ostringstream os;
    os << "SU(" << n << ")_" << k << " has " << static_cast<long>(std::llround(size))
       << " labels, above the cap of " << rank_cap;
    throw ResourceLimit(os.str());
  }
  const auto alcove = sun_alcove(n, k);
  std::map<std::vector<int>, int> index;
  for (std::size_t i = 0; i < alcove.size(); ++i) index[alcove[i]] = static_cast<int>(i);
  std::vector<Label> labels;
  Grading g{n, {}};
  for (std::size_t i = 0; i < alcove.size(); ++i) {
    const auto& lam = alcove[i];
    std::string desc;
    for (std::size_t j = 0; j < lam.size(); ++j) desc += (j ? "," : "") + std::to_string(lam[j]);
    std::vector<int> rev(lam.rbegin(), lam.rend());
    labels.push_back(make_label(static_cast<int>(i), desc, sun_weight(n, k, lam), index.at(rev)));
    int nality = 0;
    for (std::size_t j = 0; j < lam.size(); ++j) nality += static_cast<int>(j + 1) * lam[j];
    g.grade.push_back(nality % n);
  }
  std::ostringstream model;
  model << "sun:" << n << "," << k;
  return assemble(model.str(), std::move(labels), sun_fusion(n, k, alcove),
                  Rational(k * (n * n - 1), k + n), g);
}

ModularData build_so16l_level1(int l) {
  if (l < 1) throw std::invalid_argument("so16l parameter must be >= 1");
  // 0, v, s, c as elements 00, 11, 01, 10 of Z2 x Z2 (bitwise xor).
  static const int code[4] = {0, 3, 1, 2};
  auto product = [](int a, int b) {
    const int x = code[a] ^ code[b];
    for (int i = 0; i < 4; ++i) {
      if (code[i] == x) return i;
    }
    return 0;
  };
  std::vector<Label> labels = {make_label(0, "0", Rational(0), 0), make_label(1, "v", Rational(1, 2), 1),
                               make_label(2, "s", Rational(l), 2), make_label(3, "c", Rational(l), 3)};
  return assemble("so16l:" + std::to_string(l), std::move(labels), group_ring(4, product),
                  Rational(8 * l), std::nullopt);
}

ModularData build_zn_theory(int n, int a) {
  if (n < 1) throw std::invalid_argument("zn order must be >= 1");
  a = ((a % (2 * n)) + 2 * n) % (2 * n);
  if (std::gcd(a, n) != 1) throw std::invalid_argument("zn parameter a must be coprime to n");
  if (n % 2 == 1 && a % 2 != 0) throw std::invalid_argument("zn parameter a must be even for odd n");
  std::vector<Label> labels;
  Grading g{n, {}};
  for (int l = 0; l < n; ++l) {
    labels.push_back(make_label(l, std::to_string(l), Rational(a * l * l, 2 * n), (n - l) % n));
    g.grade.push_back(l);
  }
  std::ostringstream model;
  model << "zn:" << n << "," << a;
  return assemble(model.str(), std::move(labels), group_ring(n, [n](int x, int y) { return (x + y) % n; }),
                  std::nullopt, g);
}

ModularData build_ising(int nu) {
  if (nu < 1 || nu > 15 || nu % 2 == 0) throw std::invalid_argument("ising parameter must be odd in 1..15");
  std::vector<IntMatrix> mats(3, IntMatrix::Zero(3, 3));
  mats[0] = IntMatrix::Identity(3, 3);
  mats[1] << 0, 1, 0, 1, 0, 0, 0, 0, 1;
  mats[2] << 0, 0, 1, 0, 0, 1, 1, 1, 0;
  std::vector<Label> labels = {make_label(0, "b", Rational(0), 0), make_label(1, "v", Rational(1, 2), 1),
                               make_label(2, "s", Rational(nu, 16), 2)};
  const std::string model = nu == 1 ? "ising" : "ising:" + std::to_string(nu);
  return assemble(model, std::move(labels), FusionRing(std::move(mats)), Rational(nu, 2),
                  Grading{2, {0, 0, 1}});
}

bool AxiomReport::partial_ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const AxiomCheck& c) { return c.full_algebra || c.passed; });
}

bool AxiomReport::full_ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const AxiomCheck& c) { return c.passed; });
}

const AxiomCheck* AxiomReport::find(std::string_view relation) const {
  for (const auto& c : checks) {
    if (c.relation == relation) return &c;
  }
  return nullptr;
}

AxiomReport verify_modular_axioms(const ModularData& md) {
  const std::vector<bool> finite(md.rank(), true);
  if (md.exact()) {
    return run_axioms<Cyclotomic>(md.s_exact, t_matrix<Cyclotomic>(md), c_matrix<Cyclotomic>(md), 0.0, finite);
  }
  return run_axioms<std::complex<double>>(md.s, t_matrix<std::complex<double>>(md),
                                          c_matrix<std::complex<double>>(md), md.tolerance, finite);
}

AxiomReport verify_modular_axioms(const ComplexMatrix& s, const ComplexMatrix& t, const std::vector<int>& conj,
                                  double tol) {
  std::vector<bool> finite(t.rows(), true);
  for (Eigen::Index l = 0; l < t.rows(); ++l) {
    const double turns = std::arg(t(l, l)) / (2.0 * std::numbers::pi);
    finite[l] = rationalize(turns, 100000, 1e-11).has_value();
  }
  return run_axioms<std::complex<double>>(s, t, permutation_matrix<std::complex<double>>(conj), tol, finite);
}

}  // namespace modinv
