#include "modinv/extensions.hpp"

#include "modinv/invariant_engine.hpp"
#include "modinv/model_spec.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>

#ifndef MODINV_FIXTURE_DIR
#define MODINV_FIXTURE_DIR "fixtures"
#endif

namespace modinv {
namespace {

constexpr double kEps = 1e-9;

bool unit_dimension(const ModularData& md, int l) {
  if (md.exact()) return md.d_exact[l] == Cyclotomic(1);
  return std::abs(md.d[l] - 1.0) < kEps;
}

std::int64_t pos_mod(std::int64_t x, std::int64_t m) {
  const std::int64_t r = x % m;
  return r < 0 ? r + m : r;
}

// x a + y b = gcd(a, b)
std::int64_t extended_gcd(std::int64_t a, std::int64_t b, std::int64_t& x, std::int64_t& y) {
  if (b == 0) {
    x = 1;
    y = 0;
    return a;
  }
  std::int64_t x1 = 0, y1 = 0;
  const std::int64_t g = extended_gcd(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
  return g;
}

void validate_zn(int n, int a) {
  if (n < 1) throw std::invalid_argument("zn: n must be positive");
  const int ar = static_cast<int>(pos_mod(a, 2 * n));
  if (std::gcd(ar, n) != 1) throw std::invalid_argument("zn: a and n must be coprime");
  if (n % 2 == 1 && ar % 2 == 1) throw std::invalid_argument("zn: a must be even for odd n");
}

IntMatrix zn_matrix(int n, std::int64_t alpha, std::int64_t omega) {
  const std::int64_t period = n / alpha;
  IntMatrix z = IntMatrix::Zero(n, n);
  for (int l = 0; l < n; l += static_cast<int>(alpha)) {
    for (int m = 0; m < n; m += static_cast<int>(alpha)) {
      if (pos_mod(m - omega * l, period) == 0) z(l, m) = 1;
    }
  }
  return z;
}

class BlockFitter {
 public:
  BlockFitter(const ModularData& md, std::int64_t limit) : md_(md), limit_(limit) {}

  std::optional<std::vector<std::vector<std::int64_t>>> run(const IntMatrix& z) {
    const int r = md_.rank();
    std::vector<std::int64_t> b0(r);
    for (int l = 0; l < r; ++l) b0[l] = z(0, l);
    IntMatrix res = z;
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < r; ++j) res(i, j) -= b0[i] * b0[j];
    }
    if (res.minCoeff() < 0 || !rows_consistent(res)) return std::nullopt;
    scale_ = 0.0;
    for (int l = 0; l < r; ++l) scale_ += static_cast<double>(b0[l]) * md_.d[l];
    blocks_ = {b0};
    if (!peel(res)) return std::nullopt;
    return blocks_;
  }

 private:
  // A row whose diagonal is exhausted can no longer be touched by any block.
  static bool rows_consistent(const IntMatrix& res) {
    for (Eigen::Index i = 0; i < res.rows(); ++i) {
      if (res(i, i) == 0 && (res.row(i).any() || res.col(i).any())) return false;
    }
    return true;
  }

  bool peel(const IntMatrix& res) {
    const int r = md_.rank();
    int lam = -1;
    for (int l = 0; l < r; ++l) {
      if (res(l, l) > 0) {
        lam = l;
        break;
      }
    }
    if (lam < 0) return res.isZero();
    std::vector<int> support;
    for (int m = lam; m < r; ++m) {
      if (m == lam || (res(m, m) > 0 && res(lam, m) > 0 && md_.labels[m].h == md_.labels[lam].h)) support.push_back(m);
    }
    std::vector<std::int64_t> b(r, 0);
    return choose(res, support, 0, b);
  }

  bool choose(const IntMatrix& res, const std::vector<int>& support, std::size_t pos, std::vector<std::int64_t>& b) {
    if (++nodes_ > limit_) throw FitLimitExceeded("type I block fit exceeded its node limit");
    if (pos == support.size()) return accept(res, b);
    const int m = support[pos];
    const std::int64_t top = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(res(m, m))) + kEps));
    for (std::int64_t v = pos == 0 ? 1 : 0; v <= top; ++v) {
      bool ok = true;
      for (std::size_t q = 0; q < pos && ok; ++q) {
        const int n = support[q];
        ok = b[n] * v <= res(n, m);
      }
      if (!ok) break;
      b[m] = v;
      if (choose(res, support, pos + 1, b)) return true;
    }
    b[m] = 0;
    return false;
  }

  bool accept(const IntMatrix& res, const std::vector<std::int64_t>& b) {
    const int r = md_.rank();
    double dim = 0.0;
    for (int l = 0; l < r; ++l) dim += static_cast<double>(b[l]) * md_.d[l];
    if (dim < scale_ - 1e-9 * scale_) return false;
    IntMatrix next = res;
    for (int i = 0; i < r; ++i) {
      if (b[i] == 0) continue;
      for (int j = 0; j < r; ++j) next(i, j) -= b[i] * b[j];
    }
    if (next.minCoeff() < 0 || !rows_consistent(next)) return false;
    blocks_.push_back(b);
    if (peel(next)) return true;
    blocks_.pop_back();
    return false;
  }

  const ModularData& md_;
  std::int64_t limit_;
  std::int64_t nodes_ = 0;
  double scale_ = 1.0;
  std::vector<std::vector<std::int64_t>> blocks_;
};

int resolve_label(const ModularData& md, const nlohmann::json& j, const std::string& where) {
  const std::string desc = j.is_string() ? j.get<std::string>() : std::to_string(j.get<int>());
  const int idx = md.find(desc);
  if (idx < 0) throw std::runtime_error(where + ": unknown label '" + desc + "' of " + md.model);
  return idx;
}

IntMatrix sparse_matrix(const ModularData& md, const nlohmann::json& entries, const std::string& where) {
  IntMatrix z = IntMatrix::Zero(md.rank(), md.rank());
  for (const auto& e : entries) {
    z(resolve_label(md, e.at(0), where), resolve_label(md, e.at(1), where)) += e.at(2).get<std::int64_t>();
  }
  return z;
}

EmbeddingFixture load_embedding(const nlohmann::json& j, const std::string& where) {
  EmbeddingFixture f;
  BranchingTable& t = f.table;
  t.name = j.at("name").get<std::string>();
  t.base_model = parse_model_spec(j.at("base").at("model").get<std::string>()).to_string();
  t.source = j.value("source", "");
  const auto& ext = j.at("extended");
  t.extended_labels = ext.at("labels").get<std::vector<std::string>>();
  for (const auto& h : ext.at("h")) {
    const auto q = parse_rational(h.get<std::string>());
    if (!q) throw std::runtime_error(where + ": bad weight '" + h.get<std::string>() + "'");
    t.extended_h.push_back(mod1(*q));
  }
  const int e = static_cast<int>(t.extended_labels.size());
  if (static_cast<int>(t.extended_h.size()) != e) throw std::runtime_error(where + ": labels and h differ in length");
  const ModularData md = build_model(t.base_model);
  t.b = IntMatrix::Zero(e, md.rank());
  for (const auto& entry : j.at("b")) {
    const int tau = entry.at(0).get<int>();
    if (tau < 0 || tau >= e) throw std::runtime_error(where + ": extended index out of range");
    t.b(tau, resolve_label(md, entry.at(1), where)) += entry.at(2).get<std::int64_t>();
  }
  f.ext_conj.resize(e);
  std::iota(f.ext_conj.begin(), f.ext_conj.end(), 0);
  if (ext.contains("conj")) f.ext_conj = ext.at("conj").get<std::vector<int>>();
  if (j.contains("automorphisms")) {
    for (const auto& [name, perm] : j.at("automorphisms").items()) f.automorphisms[name] = perm.get<std::vector<int>>();
  }
  if (j.contains("expected")) {
    for (const auto& [name, entries] : j.at("expected").items()) f.expected[name] = sparse_matrix(md, entries, where);
  }
  return f;
}

SectorMultiset load_multiset(const nlohmann::json& j, const std::string& where) {
  SectorMultiset s;
  s.name = j.at("name").get<std::string>();
  s.base_model = parse_model_spec(j.at("base").at("model").get<std::string>()).to_string();
  s.source = j.value("source", "");
  const ModularData md = build_model(s.base_model);
  for (const auto& e : j.at("sectors")) s.sectors.emplace_back(resolve_label(md, e.at(0), where), e.at(1).get<int>());
  return s;
}

}  // namespace

std::vector<int> SimpleCurrentGroup::factor_orders() const {
  std::vector<int> out;
  for (const auto& g : generators) out.push_back(g.order);
  return out;
}

SimpleCurrentGroup simple_current_group(const ModularData& md) {
  SimpleCurrentGroup g;
  for (int l = 0; l < md.rank(); ++l) {
    if (unit_dimension(md, l)) g.members.push_back(l);
  }
  const int m = g.order();
  std::map<int, int> index;
  for (int i = 0; i < m; ++i) index[g.members[i]] = i;
  g.product.assign(m, std::vector<int>(m, -1));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      int target = -1;
      for (int c = 0; c < md.rank(); ++c) {
        if (md.fusion(g.members[i], g.members[j], c) != 0) target = c;
      }
      if (target < 0 || !index.count(target)) throw std::logic_error("unit-dimension labels do not close under fusion");
      g.product[i][j] = index[target];
    }
  }
  auto order_of = [&](int i) {
    int k = 1;
    for (int x = i; x != 0; x = g.product[x][i]) ++k;
    return k;
  };
  auto closure = [&](std::set<int> gens) {
    std::set<int> sub{0};
    bool grew = true;
    while (grew) {
      grew = false;
      for (int a : std::vector<int>(sub.begin(), sub.end())) {
        for (int s : gens) grew |= sub.insert(g.product[a][s]).second;
      }
    }
    return sub;
  };
  std::vector<int> candidates(m);
  std::iota(candidates.begin(), candidates.end(), 0);
  std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int b) { return order_of(a) > order_of(b); });
  std::set<int> gens;
  std::size_t size = 1;
  for (int c : candidates) {
    if (size == static_cast<std::size_t>(m)) break;
    const int ord = order_of(c);
    if (ord == 1) continue;
    std::set<int> next = gens;
    next.insert(c);
    const std::size_t grown = closure(next).size();
    if (grown != size * static_cast<std::size_t>(ord)) continue;
    gens = std::move(next);
    size = grown;
    SimpleCurrent sc;
    sc.label = g.members[c];
    sc.order = ord;
    sc.h = md.labels[sc.label].h;
    sc.rehren = (sc.h * Rational(ord)).denominator() == 1;
    sc.local = true;
    for (int x = c; x != 0; x = g.product[x][c]) sc.local = sc.local && md.labels[g.members[x]].h.numerator() == 0;
    g.generators.push_back(sc);
  }
  return g;
}

int zn_tilde(int n) { return n % 2 == 0 ? n / 2 : n; }

IntMatrix zn_invariant(int n, int a, int delta) {
  validate_zn(n, a);
  const int nt = zn_tilde(n);
  if (delta < 1 || nt % delta != 0) {
    throw std::invalid_argument("zn_invariant: " + std::to_string(delta) + " does not divide " + std::to_string(nt));
  }
  const std::int64_t alpha = std::gcd(delta, nt / delta);
  const std::int64_t p = nt / (delta * alpha);
  const std::int64_t q = delta / alpha;
  // r p - s q = 1
  std::int64_t x = 0, y = 0;
  if (extended_gcd(p, q, x, y) != 1) throw std::logic_error("zn_invariant: coprimality fails");
  const std::int64_t r1 = x, s1 = -y;
  const std::int64_t r2 = r1 + q, s2 = s1 + p;
  const IntMatrix z1 = zn_matrix(n, alpha, r1 * p + s1 * q);
  const IntMatrix z2 = zn_matrix(n, alpha, r2 * p + s2 * q);
  if (z1 != z2) throw std::logic_error("zn_invariant: omega depends on the Bezout pair");
  return z1;
}

std::vector<ZnInvariant> zn_classify_all(int n, int a) {
  validate_zn(n, a);
  std::vector<ZnInvariant> out;
  const int nt = zn_tilde(n);
  for (int d = 1; d <= nt; ++d) {
    if (nt % d == 0) out.push_back({d, zn_invariant(n, a, d)});
  }
  return out;
}

IntMatrix extended_permutation(const BranchingTable& bt, const std::vector<int>& omega) {
  const int e = bt.extended_rank();
  IntMatrix p = IntMatrix::Zero(e, e);
  for (int t = 0; t < e; ++t) {
    const int w = omega.empty() ? t : omega.at(t);
    if (w < 0 || w >= e) throw std::invalid_argument("extended permutation out of range");
    p(w, t) = 1;
  }
  return p;
}

IntMatrix restrict_invariant(const ModularData& base, const BranchingTable& bt, const IntMatrix& zext) {
  if (bt.b.cols() != base.rank() || zext.rows() != bt.extended_rank() || zext.cols() != bt.extended_rank()) {
    throw std::invalid_argument("restrict_invariant: shape mismatch");
  }
  IntMatrix z = bt.b.transpose() * zext * bt.b;
  const InvariantReport rep = verify_invariant(base, z);
  if (const InvariantCheck* f = rep.first_failure()) {
    std::ostringstream os;
    os << "branching table " << bt.name << " inconsistent with " << base.model << ": " << f->name << " fails";
    if (f->row >= 0) os << " at (" << base.labels[f->row].descriptor << "," << base.labels[f->col].descriptor << ")";
    throw BranchingInconsistent(os.str(), std::move(z));
  }
  return z;
}

std::vector<std::string> branching_violations(const ModularData& base, const BranchingTable& bt) {
  std::vector<std::string> out;
  const int e = bt.extended_rank();
  if (bt.b.cols() != base.rank()) return {"column count differs from base rank"};
  for (int t = 0; t < e; ++t) {
    if (bt.b(t, 0) != (t == 0 ? 1 : 0)) out.push_back("vacuum column fails at " + bt.extended_labels[t]);
    for (int l = 0; l < base.rank(); ++l) {
      if (bt.b(t, l) < 0) out.push_back("negative coefficient at " + bt.extended_labels[t]);
      if (bt.b(t, l) != 0 && bt.extended_h[t] != base.labels[l].h) {
        out.push_back("weight mismatch " + bt.extended_labels[t] + " vs " + base.labels[l].descriptor);
      }
    }
  }
  const Eigen::VectorXd dims = bt.b.cast<double>() * base.d;
  const double scale = dims[0];
  for (int t = 0; t < e; ++t) {
    if (dims[t] < scale - kEps * scale) out.push_back("dimension below index at " + bt.extended_labels[t]);
  }
  const double w = base.w_exact ? static_cast<double>(*base.w_exact) : base.w;
  if (std::abs(dims.squaredNorm() - w) > 1e-8 * w) out.push_back("squared block dimensions do not sum to w");
  return out;
}

std::optional<BranchingTable> fit_type1_blocks(const ModularData& md, const IntMatrix& z, std::int64_t node_limit) {
  if (z != z.transpose()) return std::nullopt;
  BlockFitter fitter(md, node_limit);
  const auto blocks = fitter.run(z);
  if (!blocks) return std::nullopt;
  BranchingTable t;
  t.name = "type I fit";
  t.base_model = md.model;
  t.source = "block fit";
  const int r = md.rank();
  t.b = IntMatrix::Zero(static_cast<Eigen::Index>(blocks->size()), r);
  std::map<std::string, int> seen;
  for (std::size_t i = 0; i < blocks->size(); ++i) {
    std::string name;
    int lowest = -1;
    for (int l = 0; l < r; ++l) {
      const auto v = (*blocks)[i][l];
      t.b(static_cast<Eigen::Index>(i), l) = v;
      if (v == 0) continue;
      if (lowest < 0) lowest = l;
      if (!name.empty()) name += "+";
      if (v > 1) name += std::to_string(v) + "*";
      name += md.labels[l].descriptor;
    }
    const int rep = seen[name]++;
    if (rep > 0) name += std::string(rep, '\'');
    t.extended_labels.push_back(name);
    t.extended_h.push_back(md.labels[lowest].h);
  }
  return t;
}

std::filesystem::path fixture_dir() {
  if (const char* env = std::getenv("MODINV_FIXTURES")) return env;
  return MODINV_FIXTURE_DIR;
}

const FixtureLibrary& builtin_fixtures() {
  static std::once_flag once;
  static FixtureLibrary lib;
  std::call_once(once, [] {
    const auto dir = fixture_dir() / "embeddings";
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
      std::ifstream in(path);
      const nlohmann::json j = nlohmann::json::parse(in);
      const std::string where = path.filename().string();
      if (j.value("kind", "branching") == "sector_multiset") {
        SectorMultiset s = load_multiset(j, where);
        lib.multisets.emplace(s.name, std::move(s));
      } else {
        EmbeddingFixture f = load_embedding(j, where);
        lib.embeddings.emplace(f.table.name, std::move(f));
      }
    }
  });
  return lib;
}

std::map<std::string, BranchingTable> builtin_embeddings() {
  std::map<std::string, BranchingTable> out;
  for (const auto& [name, f] : builtin_fixtures().embeddings) out.emplace(name, f.table);
  return out;
}

}  // namespace modinv
