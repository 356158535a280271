#include "modinv/cyclotomic.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

namespace modinv {
namespace {

using i128 = __int128;

struct FieldTables {
  int conductor = 1;
  int phi = 1;
  // reduction[k] = zeta^k written in the basis 1, zeta, ..., zeta^(phi-1), k in [0, N).
  std::vector<std::vector<std::int64_t>> reduction;
};

std::vector<std::int64_t> cyclotomic_polynomial(int n);

std::vector<std::int64_t> poly_divide_exact(std::vector<std::int64_t> num,
                                            const std::vector<std::int64_t>& den) {
  // Both monic-compatible integer polynomials, coefficients low to high.
  const std::size_t dn = den.size() - 1;
  std::vector<std::int64_t> quot(num.size() - dn, 0);
  for (std::size_t i = num.size(); i-- > dn;) {
    const std::int64_t c = num[i] / den[dn];
    quot[i - dn] = c;
    for (std::size_t j = 0; j <= dn; ++j) num[i - dn + j] -= c * den[j];
  }
  return quot;
}

std::vector<std::int64_t> cyclotomic_polynomial(int n) {
  static std::map<int, std::vector<std::int64_t>> cache;
  static std::mutex mutex;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
  }
  std::vector<std::int64_t> p(static_cast<std::size_t>(n) + 1, 0);
  p[0] = -1;
  p[static_cast<std::size_t>(n)] = 1;
  for (int d = 1; d < n; ++d) {
    if (n % d == 0) p = poly_divide_exact(p, cyclotomic_polynomial(d));
  }
  std::lock_guard lock(mutex);
  cache.emplace(n, p);
  return p;
}

std::shared_ptr<const FieldTables> build_tables(int n) {
  auto t = std::make_shared<FieldTables>();
  t->conductor = n;
  const auto phi_poly = cyclotomic_polynomial(n);
  const int phi = static_cast<int>(phi_poly.size()) - 1;
  t->phi = phi;
  t->reduction.assign(static_cast<std::size_t>(n), std::vector<std::int64_t>(phi, 0));
  std::vector<std::int64_t> cur(phi, 0);
  cur[0] = 1;
  for (int k = 0; k < n; ++k) {
    t->reduction[k] = cur;
    // multiply by zeta
    const std::int64_t top = cur[phi - 1];
    for (int i = phi - 1; i > 0; --i) cur[i] = cur[i - 1];
    cur[0] = 0;
    if (top != 0) {
      for (int i = 0; i < phi; ++i) cur[i] -= top * phi_poly[i];
    }
  }
  return t;
}

const FieldTables& tables(int n) {
  thread_local int last_n = 0;
  thread_local std::shared_ptr<const FieldTables> last;
  if (n == last_n && last) return *last;
  static std::map<int, std::shared_ptr<const FieldTables>> cache;
  static std::mutex mutex;
  std::shared_ptr<const FieldTables> found;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(n); it != cache.end()) found = it->second;
  }
  if (!found) {
    found = build_tables(n);
    std::lock_guard lock(mutex);
    found = cache.emplace(n, found).first->second;
  }
  last_n = n;
  last = found;
  return *last;
}

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::int64_t narrow(i128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    throw CyclotomicOverflow("cyclotomic coefficient exceeds 64 bits");
  }
  return static_cast<std::int64_t>(v);
}

int lcm_int(int a, int b) { return std::lcm(a, b); }

int legendre(std::int64_t a, std::int64_t p) {
  a %= p;
  if (a < 0) a += p;
  if (a == 0) return 0;
  std::int64_t r = 1, base = a, e = (p - 1) / 2;
  while (e > 0) {
    if (e & 1) r = (r * base) % p;
    base = (base * base) % p;
    e >>= 1;
  }
  return r == 1 ? 1 : -1;
}

Cyclotomic sqrt_prime(std::int64_t p) {
  if (p == 2) return Cyclotomic::zeta(8, 1) + Cyclotomic::zeta(8, 7);
  Cyclotomic g(0);
  for (std::int64_t x = 1; x < p; ++x) {
    const int l = legendre(x, p);
    if (l == 1) g += Cyclotomic::zeta(static_cast<int>(p), x);
    if (l == -1) g -= Cyclotomic::zeta(static_cast<int>(p), x);
  }
  if (p % 4 == 1) return g;
  return -(Cyclotomic::zeta(4, 1) * g);
}

}  // namespace

int euler_phi(int n) {
  int result = n;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      result -= result / p;
    }
  }
  if (n > 1) result -= result / n;
  return result;
}

Cyclotomic::Cyclotomic(int value) : conductor_(1), num_{value}, den_(1) {}

Cyclotomic::Cyclotomic(Rational value)
    : conductor_(1), num_{value.numerator()}, den_(value.denominator()) {}

Cyclotomic::Cyclotomic(int conductor, std::vector<std::int64_t> num, std::int64_t den)
    : conductor_(conductor), num_(std::move(num)), den_(den) {
  normalize();
}

void Cyclotomic::normalize() {
  if (den_ < 0) {
    den_ = -den_;
    for (auto& c : num_) c = -c;
  }
  std::int64_t g = den_;
  for (auto c : num_) g = std::gcd(g, c);
  if (g > 1) {
    den_ /= g;
    for (auto& c : num_) c /= g;
  }
  bool all_zero = true;
  for (auto c : num_) all_zero = all_zero && c == 0;
  if (all_zero) den_ = 1;
}

Cyclotomic Cyclotomic::zeta(int conductor, std::int64_t k) {
  if (conductor < 1) throw std::invalid_argument("conductor must be positive");
  const auto& t = tables(conductor);
  std::int64_t e = k % conductor;
  if (e < 0) e += conductor;
  return Cyclotomic(conductor, t.reduction[static_cast<std::size_t>(e)], 1);
}

Cyclotomic Cyclotomic::root_of_unity(Rational q) {
  const Rational r = mod1(q);
  return zeta(static_cast<int>(r.denominator()), r.numerator());
}

Cyclotomic Cyclotomic::sqrt_int(std::int64_t m) {
  if (m < 0) throw std::invalid_argument("sqrt_int of negative integer");
  if (m == 0) return Cyclotomic(0);
  std::int64_t square = 1;
  Cyclotomic radical(1);
  std::int64_t rest = m;
  for (std::int64_t p = 2; p * p <= rest; ++p) {
    int e = 0;
    while (rest % p == 0) {
      rest /= p;
      ++e;
    }
    for (int i = 0; i < e / 2; ++i) square *= p;
    if (e % 2 == 1) radical *= sqrt_prime(p);
  }
  if (rest > 1) radical *= sqrt_prime(rest);
  return Cyclotomic(Rational(square)) * radical;
}

Cyclotomic Cyclotomic::sqrt_rational(Rational q) {
  if (q < 0) throw std::invalid_argument("sqrt_rational of negative value");
  // sqrt(p/q) = sqrt(p q) / q
  return sqrt_int(q.numerator() * q.denominator()) / Rational(q.denominator());
}

Rational Cyclotomic::coefficient(std::size_t i) const {
  if (i >= num_.size()) return Rational(0);
  return Rational(num_[i], den_);
}

Cyclotomic Cyclotomic::lifted(int conductor) const {
  if (conductor == conductor_) return *this;
  if (conductor % conductor_ != 0) throw std::invalid_argument("lift target must be a multiple");
  const auto& t = tables(conductor);
  const int step = conductor / conductor_;
  std::vector<i128> acc(static_cast<std::size_t>(t.phi), 0);
  for (std::size_t i = 0; i < num_.size(); ++i) {
    if (num_[i] == 0) continue;
    const auto& red = t.reduction[i * static_cast<std::size_t>(step)];
    for (int j = 0; j < t.phi; ++j) acc[j] += static_cast<i128>(num_[i]) * red[j];
  }
  std::vector<std::int64_t> out(acc.size());
  for (std::size_t j = 0; j < acc.size(); ++j) out[j] = narrow(acc[j]);
  return Cyclotomic(conductor, std::move(out), den_);
}

bool Cyclotomic::is_zero() const {
  for (auto c : num_) {
    if (c != 0) return false;
  }
  return true;
}

bool Cyclotomic::is_rational() const {
  for (std::size_t i = 1; i < num_.size(); ++i) {
    if (num_[i] != 0) return false;
  }
  return true;
}

Rational Cyclotomic::to_rational() const {
  if (!is_rational()) throw std::logic_error("cyclotomic value is not rational");
  return Rational(num_.empty() ? 0 : num_[0], den_);
}

std::complex<double> Cyclotomic::to_complex() const {
  std::complex<double> sum = 0;
  for (std::size_t i = 0; i < num_.size(); ++i) {
    if (num_[i] == 0) continue;
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / conductor_;
    sum += static_cast<double>(num_[i]) * std::polar(1.0, angle);
  }
  return sum / static_cast<double>(den_);
}

Cyclotomic Cyclotomic::conj() const {
  const auto& t = tables(conductor_);
  std::vector<i128> acc(static_cast<std::size_t>(t.phi), 0);
  for (std::size_t i = 0; i < num_.size(); ++i) {
    if (num_[i] == 0) continue;
    const std::size_t e = (static_cast<std::size_t>(conductor_) - i) % static_cast<std::size_t>(conductor_);
    const auto& red = t.reduction[e];
    for (int j = 0; j < t.phi; ++j) acc[j] += static_cast<i128>(num_[i]) * red[j];
  }
  std::vector<std::int64_t> out(acc.size());
  for (std::size_t j = 0; j < acc.size(); ++j) out[j] = narrow(acc[j]);
  return Cyclotomic(conductor_, std::move(out), den_);
}

Cyclotomic& Cyclotomic::operator+=(const Cyclotomic& other) {
  const int n = lcm_int(conductor_, other.conductor_);
  if (n != conductor_) *this = lifted(n);
  const Cyclotomic& b = other.conductor_ == n ? other : other.lifted(n);
  if (b.conductor_ != n) return *this;  // unreachable
  const i128 l = static_cast<i128>(den_) / gcd128(den_, b.den_) * b.den_;
  const i128 fa = l / den_;
  const i128 fb = l / b.den_;
  std::vector<i128> acc(num_.size());
  for (std::size_t i = 0; i < num_.size(); ++i) acc[i] = fa * num_[i] + fb * b.num_[i];
  i128 g = l;
  for (auto c : acc) g = gcd128(g, c);
  if (g == 0) g = 1;
  for (std::size_t i = 0; i < num_.size(); ++i) num_[i] = narrow(acc[i] / g);
  den_ = narrow(l / g);
  normalize();
  return *this;
}

Cyclotomic Cyclotomic::operator-() const {
  Cyclotomic r = *this;
  for (auto& c : r.num_) c = -c;
  return r;
}

Cyclotomic& Cyclotomic::operator-=(const Cyclotomic& other) { return *this += -other; }

Cyclotomic& Cyclotomic::operator*=(const Cyclotomic& other) {
  const int n = lcm_int(conductor_, other.conductor_);
  const Cyclotomic a = conductor_ == n ? *this : lifted(n);
  const Cyclotomic b = other.conductor_ == n ? other : other.lifted(n);
  const auto& t = tables(n);
  const int phi = t.phi;
  std::vector<i128> prod(static_cast<std::size_t>(2 * phi - 1), 0);
  for (int i = 0; i < phi; ++i) {
    if (a.num_[i] == 0) continue;
    for (int j = 0; j < phi; ++j) {
      if (b.num_[j] == 0) continue;
      prod[i + j] += static_cast<i128>(a.num_[i]) * b.num_[j];
    }
  }
  std::vector<i128> acc(static_cast<std::size_t>(phi), 0);
  for (int k = 0; k < 2 * phi - 1; ++k) {
    if (prod[k] == 0) continue;
    if (k < phi) {
      acc[k] += prod[k];
      continue;
    }
    const auto& red = t.reduction[static_cast<std::size_t>(k % n)];
    for (int j = 0; j < phi; ++j) acc[j] += prod[k] * red[j];
  }
  i128 den = static_cast<i128>(a.den_) * b.den_;
  i128 g = den;
  for (auto c : acc) g = gcd128(g, c);
  if (g == 0) g = 1;
  std::vector<std::int64_t> out(acc.size());
  for (int j = 0; j < phi; ++j) out[j] = narrow(acc[j] / g);
  *this = Cyclotomic(n, std::move(out), narrow(den / g));
  return *this;
}

Cyclotomic& Cyclotomic::operator/=(Rational q) {
  if (q.numerator() == 0) throw std::domain_error("division by zero");
  const i128 den = static_cast<i128>(den_) * q.numerator();
  std::vector<i128> acc(num_.size());
  for (std::size_t i = 0; i < num_.size(); ++i) acc[i] = static_cast<i128>(num_[i]) * q.denominator();
  i128 g = den;
  for (auto c : acc) g = gcd128(g, c);
  if (g == 0) g = 1;
  for (std::size_t i = 0; i < num_.size(); ++i) num_[i] = narrow(acc[i] / g);
  den_ = narrow(den / g);
  normalize();
  return *this;
}

bool operator==(const Cyclotomic& a, const Cyclotomic& b) {
  if (a.conductor_ == b.conductor_) return a.den_ == b.den_ && a.num_ == b.num_;
  if (a.is_zero() && b.is_zero()) return true;
  const int n = std::lcm(a.conductor_, b.conductor_);
  const Cyclotomic la = a.lifted(n);
  const Cyclotomic lb = b.lifted(n);
  return la.den_ == lb.den_ && la.num_ == lb.num_;
}

std::string Cyclotomic::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < num_.size(); ++i) {
    if (num_[i] == 0) continue;
    const Rational c(num_[i], den_);
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    const Rational mag = c < 0 ? -c : c;
    if (i == 0) {
      os << modinv::to_string(mag);
    } else {
      if (mag != Rational(1)) os << modinv::to_string(mag) << "*";
      os << "z" << conductor_ << "^" << i;
    }
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Cyclotomic& x) { return os << x.to_string(); }

ComplexMatrix to_complex(const CyclotomicMatrix& m) {
  ComplexMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).to_complex();
  }
  return out;
}

CyclotomicMatrix conjugate_transpose(const CyclotomicMatrix& m) {
  CyclotomicMatrix out(m.cols(), m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(j, i) = m(i, j).conj();
  }
  return out;
}

}  // namespace modinv
