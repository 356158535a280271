#pragma once

// Verlinde formula, quantum dimensions, the Y-matrix and reconstruction of S and T
// from a fusion ring together with conformal weights.

#include "modinv/cyclotomic.hpp"
#include "modinv/modular_data.hpp"
#include "modinv/rational.hpp"

#include <Eigen/Core>

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace modinv {

/// S does not produce a nonnegative integral fusion tensor.
class NotVerlindeMatrix : public std::runtime_error {
 public:
  NotVerlindeMatrix(const std::string& what, int l, int m, int n, double value)
      : std::runtime_error(what), l(l), m(m), n(n), value(value) {}
  int l, m, n;
  double value;
};

/// Input twists are degenerate (or the Gauss sum vanishes), so S cannot be reconstructed.
class DegenerateData : public std::runtime_error {
 public:
  DegenerateData(const std::string& what, std::vector<int> labels)
      : std::runtime_error(what), labels(std::move(labels)) {}
  std::vector<int> labels;
};

/// N_{l,m}^n = sum_r S_{l,r} S_{m,r} conj(S_{n,r}) / S_{0,r}, rounded; throws NotVerlindeMatrix.
FusionRing verlinde_fusion(const ComplexMatrix& s, double tol = 1e-8);

/// Exact check of S_{0,r} (N_l S)_{m,r} = S_{l,r} S_{m,r} for every l, m, r.
bool verlinde_exact_check(const FusionRing& fr, const CyclotomicMatrix& s);

struct FusionDimensions {
  Eigen::VectorXd value;
  /// Exact values when every d^2 is an integer, else empty.
  std::vector<Cyclotomic> exact;
  /// Collatz-Wielandt bracket width over all labels.
  double bracket = 0.0;
};

/// Perron-Frobenius dimensions of a fusion ring (common eigenvector of all N_l, d_0 = 1).
FusionDimensions fusion_dimensions(const FusionRing& fr);

/// d_l = S_{l,0} / S_{0,0}.
Eigen::VectorXd quantum_dimensions(const ModularData& md);

/// omega_l = exp(2 pi i h_l).
template <typename Scalar>
Vector<Scalar> statistics_phases(const std::vector<Rational>& h);

/// Y_{m,n} = sum_l (omega_m omega_n / omega_l) N_{m,n}^l d_l.
template <typename Scalar>
Matrix<Scalar> y_matrix(const FusionRing& fr, const std::vector<Rational>& h,
                        const Vector<Scalar>& d);

struct GaussSum {
  std::complex<double> z;
  std::optional<Cyclotomic> z_exact;
  double w = 0.0;
  std::optional<std::int64_t> w_exact;
  /// 4 arg(z) / pi in [0, 8), when z != 0 and the value is rational with small denominator.
  std::optional<Rational> c_residue;
  bool nondegenerate = false;
};

/// z = sum d^2 omega; throws DegenerateData when z = 0.
GaussSum gauss_sum(const FusionRing& fr, const std::vector<Rational>& h, double tol = 1e-8);

struct StData {
  ScalarMode mode = ScalarMode::floating;
  CyclotomicMatrix s_exact;
  std::vector<Cyclotomic> d_exact;
  ComplexMatrix s;
  Eigen::VectorXd d;
  double w = 0.0;
  std::optional<std::int64_t> w_exact;
  /// Central charge used in T (the supplied representative, or the Gauss residue).
  Rational central_charge{0};
  /// T_l = exp(2 pi i t_l).
  std::vector<Rational> t;
};

/// S = Y / |z| and T = exp(-pi i c / 12) omega. A supplied central charge must agree with the
/// Gauss sum mod 8. Throws DegenerateData on degenerate input.
StData reconstruct_st(const FusionRing& fr, const std::vector<Rational>& h,
                      std::optional<Rational> central_charge = std::nullopt, double tol = 1e-9);

/// {l : Y_{l,m} = d_l d_m for all m}; always contains the vacuum.
std::vector<int> degenerate_labels(const FusionRing& fr, const std::vector<Rational>& h,
                                   double tol = 1e-8);

struct FusionGraph {
  IntMatrix adjacency;
  std::vector<std::string> names;
  /// Vertex grades mod grade_modulus; empty when ungraded.
  std::vector<int> grade;
  int grade_modulus = 0;
  std::string generator;

  int size() const { return static_cast<int>(adjacency.rows()); }
  bool oriented() const { return adjacency != adjacency.transpose(); }
};

/// Graph with adjacency N_generator on the label set.
FusionGraph fusion_graph(const ModularData& md, int generator);

/// Largest real eigenvalue of a nonnegative matrix.
double perron_frobenius(const IntMatrix& a);

}  // namespace modinv
