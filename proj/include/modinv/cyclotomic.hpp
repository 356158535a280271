#pragma once

// Exact arithmetic in cyclotomic fields Q(zeta_N).
//
// An element is stored as a polynomial in zeta_N of degree < phi(N) with
// rational coefficients sharing a single positive denominator. Elements of
// different conductors are lifted to the least common multiple before any
// binary operation, so mixed-conductor expressions are always well defined.

#include "modinv/rational.hpp"

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace modinv {

class CyclotomicOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

class Cyclotomic {
 public:
  Cyclotomic() : Cyclotomic(0) {}
  Cyclotomic(int value);  // NOLINT(google-explicit-constructor): Eigen needs Scalar(0), Scalar(1)
  explicit Cyclotomic(Rational value);

  /// zeta_N^k where zeta_N = exp(2 pi i / N).
  static Cyclotomic zeta(int conductor, std::int64_t k);
  /// exp(2 pi i q).
  static Cyclotomic root_of_unity(Rational q);
  /// Positive square root of a nonnegative integer, as a sum of Gauss sums.
  static Cyclotomic sqrt_int(std::int64_t m);
  /// Positive square root of a nonnegative rational.
  static Cyclotomic sqrt_rational(Rational q);

  int conductor() const { return conductor_; }
  std::int64_t denominator() const { return den_; }
  const std::vector<std::int64_t>& numerators() const { return num_; }
  /// Coefficient of zeta^i in the canonical representative.
  Rational coefficient(std::size_t i) const;

  /// The same number, written over a multiple of the current conductor.
  Cyclotomic lifted(int conductor) const;

  bool is_zero() const;
  bool is_rational() const;
  /// Only valid when is_rational().
  Rational to_rational() const;

  std::complex<double> to_complex() const;

  Cyclotomic conj() const;

  Cyclotomic& operator+=(const Cyclotomic& other);
  Cyclotomic& operator-=(const Cyclotomic& other);
  Cyclotomic& operator*=(const Cyclotomic& other);
  Cyclotomic& operator/=(Rational q);

  friend Cyclotomic operator+(Cyclotomic a, const Cyclotomic& b) { return a += b; }
  friend Cyclotomic operator-(Cyclotomic a, const Cyclotomic& b) { return a -= b; }
  friend Cyclotomic operator*(Cyclotomic a, const Cyclotomic& b) { return a *= b; }
  friend Cyclotomic operator/(Cyclotomic a, Rational q) { return a /= q; }
  Cyclotomic operator-() const;

  friend bool operator==(const Cyclotomic& a, const Cyclotomic& b);
  friend bool operator!=(const Cyclotomic& a, const Cyclotomic& b) { return !(a == b); }

  std::string to_string() const;

 private:
  Cyclotomic(int conductor, std::vector<std::int64_t> num, std::int64_t den);
  void normalize();

  int conductor_ = 1;
  std::vector<std::int64_t> num_;
  std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Cyclotomic& x);

// ADL hooks used by generic matrix code.
inline Cyclotomic conj(const Cyclotomic& x) { return x.conj(); }
inline double abs(const Cyclotomic& x) { return std::abs(x.to_complex()); }

/// Euler phi.
int euler_phi(int n);

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using CyclotomicMatrix = Matrix<Cyclotomic>;
using ComplexMatrix = Matrix<std::complex<double>>;
using IntMatrix = Matrix<std::int64_t>;

/// Entrywise complex embedding.
ComplexMatrix to_complex(const CyclotomicMatrix& m);

CyclotomicMatrix conjugate_transpose(const CyclotomicMatrix& m);

}  // namespace modinv

namespace Eigen {

template <>
struct NumTraits<modinv::Cyclotomic> : GenericNumTraits<modinv::Cyclotomic> {
  using Real = modinv::Cyclotomic;
  using NonInteger = modinv::Cyclotomic;
  using Nested = modinv::Cyclotomic;
  using Literal = modinv::Cyclotomic;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 20,
    AddCost = 40,
    MulCost = 200
  };
  static inline int digits10() { return 0; }
};

}  // namespace Eigen
