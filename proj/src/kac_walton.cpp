// SU(n)_k fusion: Littlewood-Richardson products folded into the level-k alcove
// by the affine Weyl group.

#include "modinv/modular_data.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace modinv {
namespace {

std::vector<int> trimmed(std::vector<int> p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
  return p;
}

// Adds mu's rows, one label at a time, as horizontal strips obeying the lattice-word rule.
class LrFiller {
 public:
  LrFiller(const std::vector<int>& lambda, const std::vector<int>& mu, int max_rows)
      : mu_(trimmed(mu)), rows_(max_rows) {
    shape_.assign(rows_, 0);
    for (std::size_t i = 0; i < lambda.size() && i < shape_.size(); ++i) shape_[i] = lambda[i];
    const int labels = static_cast<int>(mu_.size());
    count_.assign(rows_, std::vector<int>(std::max(labels, 1), 0));
  }

  std::map<std::vector<int>, std::int64_t> run() {
    if (static_cast<int>(trimmed(shape_).size()) > rows_) return {};
    label(0);
    return result_;
  }

 private:
  void label(int i) {
    if (i == static_cast<int>(mu_.size())) {
      ++result_[trimmed(shape_)];
      return;
    }
    const std::vector<int> before = shape_;
    strip(i, 0, mu_[i], before, 0, 0);
  }

  // Place the remaining boxes of label i in rows r, r+1, ...
  // `above_i` / `above_prev` count labels i and i-1 in rows < r.
  void strip(int i, int r, int remaining, const std::vector<int>& before, int above_i, int above_prev) {
    if (remaining == 0) {
      label(i + 1);
      return;
    }
    if (r >= rows_) return;
    const int prev_count = i > 0 ? count_[r][i - 1] : 0;
    int cap = remaining;
    if (r > 0) cap = std::min(cap, before[r - 1] - before[r]);
    if (i > 0) cap = std::min(cap, above_prev - above_i);
    if (i > 0 && r < i) cap = 0;
    for (int t = cap; t >= 0; --t) {
      shape_[r] = before[r] + t;
      count_[r][i] = t;
      strip(i, r + 1, remaining - t, before, above_i + t, above_prev + prev_count);
    }
    shape_[r] = before[r];
    count_[r][i] = 0;
  }

  std::vector<int> mu_;
  int rows_;
  std::vector<int> shape_;
  std::vector<std::vector<int>> count_;
  std::map<std::vector<int>, std::int64_t> result_;
};

std::vector<int> dynkin_to_partition(const std::vector<int>& dynkin) {
  std::vector<int> p(dynkin.size(), 0);
  int acc = 0;
  for (std::size_t i = dynkin.size(); i-- > 0;) {
    acc += dynkin[i];
    p[i] = acc;
  }
  return p;
}

struct Folded {
  int sign = 0;
  std::vector<int> dynkin;
};

// Bring nu + rho into the alcove; sign 0 on a wall.
Folded fold(const std::vector<int>& nu, int n, int k) {
  const int level = k + n;
  std::vector<long> a(n), res(n);
  for (int i = 0; i < n; ++i) {
    const int part = i < static_cast<int>(nu.size()) ? nu[i] : 0;
    a[i] = part + n - 1 - i;
    res[i] = a[i] % level;
  }
  {
    std::vector<long> sorted = res;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return {};
  }
  long q = 0;
  for (int i = 0; i < n; ++i) q += (a[i] - res[i]) / level;
  const long s = q / n;
  const long j = q % n;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) { return res[x] < res[y]; });
  std::vector<long> y(n);
  for (int rank_pos = 0; rank_pos < n; ++rank_pos) {
    const int i = order[rank_pos];
    y[i] = res[i] + level * (rank_pos < j ? s + 1 : s);
  }
  int inversions = 0;
  for (int x = 0; x < n; ++x) {
    for (int z = x + 1; z < n; ++z) {
      if (y[x] < y[z]) ++inversions;
    }
  }
  std::vector<long> desc = y;
  std::sort(desc.begin(), desc.end(), std::greater<>());
  Folded f;
  f.sign = inversions % 2 == 0 ? 1 : -1;
  f.dynkin.resize(n - 1);
  for (int i = 0; i + 1 < n; ++i) f.dynkin[i] = static_cast<int>(desc[i] - desc[i + 1] - 1);
  return f;
}

}  // namespace

std::vector<std::vector<int>> sun_alcove(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(n - 1, 0);
  // Lexicographic enumeration of (n-1)-tuples with sum <= k.
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == n - 1) {
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[pos] = v;
      self(self, pos + 1, left - v);
    }
    cur[pos] = 0;
  };
  rec(rec, 0, k);
  return out;
}

std::vector<std::pair<std::vector<int>, std::int64_t>> lr_product(const std::vector<int>& lambda,
                                                                  const std::vector<int>& mu,
                                                                  int max_rows) {
  LrFiller filler(lambda, mu, max_rows);
  const auto m = filler.run();
  return {m.begin(), m.end()};
}

std::int64_t littlewood_richardson(const std::vector<int>& lambda, const std::vector<int>& mu,
                                   const std::vector<int>& nu) {
  const auto target = trimmed(nu);
  const int rows = static_cast<int>(std::max({lambda.size(), mu.size(), nu.size()})) + 1;
  for (const auto& [shape, c] : lr_product(lambda, mu, rows)) {
    if (shape == target) return c;
  }
  return 0;
}

Rational sun_weight(int n, int k, const std::vector<int>& dynkin) {
  // Inverse Cartan matrix of A_{n-1}: min(i,j) - ij/n with 1-based indices.
  Rational sum(0);
  for (int i = 1; i < n; ++i) {
    for (int j = 1; j < n; ++j) {
      const Rational g = Rational(std::min(i, j)) - Rational(i * j, n);
      sum += g * Rational(dynkin[i - 1]) * Rational(dynkin[j - 1] + 2);
    }
  }
  return sum / Rational(2 * (k + n));
}

FusionRing sun_fusion(int n, int k, const std::vector<std::vector<int>>& alcove) {
  const int r = static_cast<int>(alcove.size());
  std::map<std::vector<int>, int> index;
  for (int i = 0; i < r; ++i) index[alcove[i]] = i;
  std::vector<IntMatrix> mats(r, IntMatrix::Zero(r, r));
  std::vector<std::vector<int>> parts(r);
  for (int i = 0; i < r; ++i) parts[i] = dynkin_to_partition(alcove[i]);
  for (int a = 0; a < r; ++a) {
    for (int b = a; b < r; ++b) {
      std::vector<std::int64_t> coeff(r, 0);
      for (const auto& [nu, c] : lr_product(parts[a], parts[b], n)) {
        const Folded f = fold(nu, n, k);
        if (f.sign == 0) continue;
        coeff[index.at(f.dynkin)] += f.sign * c;
      }
      for (int c = 0; c < r; ++c) {
        if (coeff[c] < 0) throw std::logic_error("negative Kac-Walton coefficient");
        mats[a](b, c) = coeff[c];
        mats[b](a, c) = coeff[c];
      }
    }
  }
  return FusionRing(std::move(mats));
}

}  // namespace modinv
