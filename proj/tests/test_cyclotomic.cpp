#include "modinv/cyclotomic.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using modinv::Cyclotomic;
using modinv::CyclotomicMatrix;
using modinv::Rational;

TEST_CASE("cyclotomic polynomial degrees") {
  CHECK(modinv::euler_phi(1) == 1);
  CHECK(modinv::euler_phi(12) == 4);
  CHECK(modinv::euler_phi(48) == 16);
  CHECK(Cyclotomic::zeta(12, 1).numerators().size() == 4);
  CHECK(Cyclotomic::zeta(30, 7).numerators().size() == 8);
}

TEST_CASE("roots of unity multiply by adding exponents") {
  const Cyclotomic a = Cyclotomic::zeta(12, 5);
  const Cyclotomic b = Cyclotomic::zeta(12, 9);
  CHECK(a * b == Cyclotomic::zeta(12, 2));
  CHECK(Cyclotomic::zeta(12, 6) == Cyclotomic(-1));
  CHECK(Cyclotomic::zeta(4, 1) * Cyclotomic::zeta(4, 1) == Cyclotomic(-1));
  // mixed conductors lift to the lcm
  CHECK(Cyclotomic::zeta(3, 1) * Cyclotomic::zeta(4, 1) == Cyclotomic::zeta(12, 7));
  CHECK(Cyclotomic::root_of_unity(Rational(-1, 3)) == Cyclotomic::zeta(3, 2));
}

TEST_CASE("sum of all N-th roots vanishes") {
  for (int n : {2, 3, 5, 8, 12, 15}) {
    Cyclotomic s(0);
    for (int k = 0; k < n; ++k) s += Cyclotomic::zeta(n, k);
    CHECK(s.is_zero());
  }
}

TEST_CASE("integer square roots square back") {
  for (std::int64_t m : {1, 2, 3, 5, 6, 7, 8, 12, 13, 24, 28, 45}) {
    const Cyclotomic r = Cyclotomic::sqrt_int(m);
    CHECK(r * r == Cyclotomic(Rational(m)));
    CHECK(r.to_complex().real() == doctest::Approx(std::sqrt(static_cast<double>(m))));
    CHECK(std::abs(r.to_complex().imag()) < 1e-12);
  }
  const Cyclotomic half = Cyclotomic::sqrt_rational(Rational(1, 2));
  CHECK(half * half == Cyclotomic(Rational(1, 2)));
}

TEST_CASE("conjugation and real parts") {
  const Cyclotomic z = Cyclotomic::zeta(24, 5);
  CHECK(z * z.conj() == Cyclotomic(1));
  const Cyclotomic two_cos = z + z.conj();
  CHECK(two_cos.to_complex().real() == doctest::Approx(2 * std::cos(5 * std::numbers::pi / 12)));
  CHECK(two_cos == two_cos.conj());
  CHECK_FALSE(two_cos.is_rational());
  CHECK((Cyclotomic::zeta(6, 1) + Cyclotomic::zeta(6, 5)).is_rational());
}

TEST_CASE("division by rationals and string form") {
  Cyclotomic x = Cyclotomic(Rational(3, 4)) + Cyclotomic::zeta(5, 2);
  x /= Rational(3);
  CHECK(x.coefficient(0) == Rational(1, 4));
  CHECK(x.coefficient(2) == Rational(1, 3));
  CHECK(Cyclotomic(0).to_string() == "0");
  CHECK(Cyclotomic::zeta(8, 3).to_string() == "z8^3");
}

TEST_CASE("Eigen products with cyclotomic scalars") {
  CyclotomicMatrix s(2, 2);
  const Cyclotomic h = Cyclotomic::sqrt_rational(Rational(1, 2));
  s << h, h, h, -h;
  const CyclotomicMatrix sq = s * s;
  CHECK(sq(0, 0) == Cyclotomic(1));
  CHECK(sq(0, 1).is_zero());
  CHECK(sq(1, 1) == Cyclotomic(1));
  const CyclotomicMatrix u = modinv::conjugate_transpose(s) * s;
  CHECK(u == CyclotomicMatrix::Identity(2, 2));
}
