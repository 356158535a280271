#pragma once

// Labels, fusion rings and modular data for the built-in model families.

#include "modinv/cyclotomic.hpp"
#include "modinv/rational.hpp"

#include <Eigen/Core>

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace modinv {

/// Raised when a construction would exceed a configured size cap.
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Label {
  int index = 0;
  /// Model-specific name: a spin, comma-separated Dynkin labels, a group element, or one of 0/v/s/c.
  std::string descriptor;
  /// Conformal weight as produced by the model formula.
  Rational weight{0};
  /// weight mod 1.
  Rational h{0};
  int conj = 0;
};

/// Rank-3 tensor N_{l,m}^n stored as fusion matrices (N_l)_{m,n}.
class FusionRing {
 public:
  FusionRing() = default;
  explicit FusionRing(std::vector<IntMatrix> matrices);

  int rank() const { return static_cast<int>(n_.size()); }
  std::int64_t operator()(int l, int m, int n) const { return n_[l](m, n); }
  const IntMatrix& matrix(int l) const { return n_[l]; }
  const std::vector<IntMatrix>& matrices() const { return n_; }
  /// Conjugate of each label, read off from N_{l,m}^0.
  const std::vector<int>& conj() const { return conj_; }

  friend bool operator==(const FusionRing& a, const FusionRing& b);

 private:
  std::vector<IntMatrix> n_;
  std::vector<int> conj_;
};

/// Violated ring axioms, empty when the ring is valid.
std::vector<std::string> fusion_ring_violations(const FusionRing& fr);

/// The sub-ring spanned by `labels` (which must be closed under fusion and contain 0 first).
FusionRing fusion_subring(const FusionRing& fr, const std::vector<int>& labels);

struct Grading {
  int modulus = 1;
  std::vector<int> grade;
};

enum class ScalarMode { exact, floating };

struct ModularData {
  std::string model;
  std::vector<Label> labels;
  FusionRing fusion;
  /// A representative of the central charge; only c mod 24 enters T.
  Rational central_charge{0};
  ScalarMode mode = ScalarMode::floating;
  /// Exact S, populated in exact mode only.
  CyclotomicMatrix s_exact;
  /// Exact quantum dimensions, exact mode only.
  std::vector<Cyclotomic> d_exact;
  /// Complex embedding of S (always populated).
  ComplexMatrix s;
  /// Quantum dimensions S_{l,0}/S_{0,0}.
  Eigen::VectorXd d;
  /// Global index sum d^2.
  double w = 1.0;
  /// w as an integer when it is one.
  std::optional<std::int64_t> w_exact;
  std::optional<Grading> grading;
  /// Float tolerance declared for S in floating mode.
  double tolerance = 1e-9;

  int rank() const { return static_cast<int>(labels.size()); }
  bool exact() const { return mode == ScalarMode::exact; }
  Rational c_residue() const { return mod_rational(central_charge, 8); }
  /// T_l = exp(2 pi i t_l) with t_l = h_l - c/24 mod 1.
  Rational t_exponent(int l) const { return mod1(labels[l].h - central_charge / 24); }
  std::vector<Rational> twists() const;
  /// Index of the label with this descriptor, or -1.
  int find(std::string_view descriptor) const;
  /// Charge conjugation permutation.
  std::vector<int> conjugation() const;
};

template <typename Scalar>
Matrix<Scalar> s_matrix(const ModularData& md);
template <typename Scalar>
Matrix<Scalar> t_matrix(const ModularData& md);
template <typename Scalar>
Matrix<Scalar> c_matrix(const ModularData& md);

// Instantiated for Cyclotomic (exact mode only for S) and std::complex<double>.

/// SU(2)_k, labels are spins 0..k (Dynkin label).
ModularData build_su2(int k);

/// Default cap on the number of SU(n)_k labels.
inline constexpr int kDefaultRankCap = 120;

/// SU(n)_k with fusion from Kac-Walton folding; labels in lexicographic Dynkin order.
ModularData build_sun(int n, int k, int rank_cap = kDefaultRankCap);

/// SO(16l)_1, labels 0, v, s, c.
ModularData build_so16l_level1(int l);

/// Z_n theory with h_l = a l^2 / 2n.
ModularData build_zn_theory(int n, int a);

/// Ising-type data with h_s = nu/16 (nu odd); nu = 1 is the critical Ising model.
ModularData build_ising(int nu = 1);

// Fusion and Kac-Walton combinatorics exposed for testing.

/// Alcove of SU(n)_k as Dynkin label vectors, lexicographic order (so the vacuum comes first).
std::vector<std::vector<int>> sun_alcove(int n, int k);

/// Littlewood-Richardson coefficient c^nu_{lambda,mu} of partitions.
std::int64_t littlewood_richardson(const std::vector<int>& lambda, const std::vector<int>& mu,
                                   const std::vector<int>& nu);

/// All nu with nonzero c^nu_{lambda,mu} and at most `max_rows` rows.
std::vector<std::pair<std::vector<int>, std::int64_t>> lr_product(const std::vector<int>& lambda,
                                                                  const std::vector<int>& mu,
                                                                  int max_rows);

FusionRing sun_fusion(int n, int k, const std::vector<std::vector<int>>& alcove);

/// Conformal weight (l, l + 2 rho) / 2(k + n) of a Dynkin label vector.
Rational sun_weight(int n, int k, const std::vector<int>& dynkin);

struct AxiomCheck {
  std::string relation;
  bool passed = false;
  double residual = 0.0;
  /// Part of the full (nondegenerate) algebra rather than the partial one.
  bool full_algebra = false;
};

struct AxiomReport {
  bool exact = false;
  std::vector<AxiomCheck> checks;

  bool partial_ok() const;
  bool full_ok() const;
  const AxiomCheck* find(std::string_view relation) const;
};

AxiomReport verify_modular_axioms(const ModularData& md);

/// Same relations on raw matrices; `t` must be diagonal.
AxiomReport verify_modular_axioms(const ComplexMatrix& s, const ComplexMatrix& t,
                                  const std::vector<int>& conj, double tol);

}  // namespace modinv
