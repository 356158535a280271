#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>

namespace modinv {

using Rational = boost::rational<std::int64_t>;

/// Representative of q modulo `m` in [0, m).
inline Rational mod_rational(Rational q, std::int64_t m) {
  const std::int64_t period = m * q.denominator();
  std::int64_t n = q.numerator() % period;
  if (n < 0) n += period;
  return Rational(n, q.denominator());
}

inline Rational mod1(Rational q) { return mod_rational(q, 1); }

inline bool congruent_mod1(Rational a, Rational b) { return mod1(a - b).numerator() == 0; }

inline double to_double(Rational q) {
  return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator());
}

/// "p/q", or "p" when the denominator is one.
std::string to_string(Rational q);

/// Parses "p/q" or "p".
std::optional<Rational> parse_rational(std::string_view text);

/// Best rational approximation with denominator <= max_den, accepted only when
/// it reproduces `x` to within `tol`.
std::optional<Rational> rationalize(double x, std::int64_t max_den, double tol);

}  // namespace modinv
