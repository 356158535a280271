#include "modinv/fusion_verlinde.hpp"
#include "modinv/invariant_engine.hpp"
#include "modinv/model_spec.hpp"

#include <doctest.h>

#include <Eigen/LU>

#include <algorithm>
#include <cmath>

using namespace modinv;

namespace {

IntMatrix from_rows(int r, std::initializer_list<std::int64_t> v) {
  IntMatrix m(r, r);
  auto it = v.begin();
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) m(i, j) = *it++;
  }
  return m;
}

// Sum of |sum_{l in a} chi_l|^2 style blocks: z += u v^T over label lists.
void add_block(IntMatrix& z, std::initializer_list<int> u, std::initializer_list<int> v, std::int64_t mult = 1) {
  for (int a : u) {
    for (int b : v) z(a, b) += mult;
  }
}

IntMatrix z_e6() {
  IntMatrix z = IntMatrix::Zero(11, 11);
  add_block(z, {0, 6}, {0, 6});
  add_block(z, {4, 10}, {4, 10});
  add_block(z, {3, 7}, {3, 7});
  return z;
}

IntMatrix z_d7() {
  // su2 level 10: diagonal on even labels plus the twisted odd part l <-> 10 - l.
  IntMatrix z = IntMatrix::Zero(11, 11);
  for (int l = 0; l <= 10; l += 2) z(l, l) = 1;
  for (int l = 1; l <= 9; l += 2) z(l, 10 - l) = 1;
  return z;
}

IntMatrix z_e7() {
  IntMatrix z = IntMatrix::Zero(17, 17);
  add_block(z, {0, 16}, {0, 16});
  add_block(z, {4, 12}, {4, 12});
  add_block(z, {6, 10}, {6, 10});
  add_block(z, {8}, {8});
  add_block(z, {2, 14}, {8});
  add_block(z, {8}, {2, 14});
  return z;
}

IntMatrix z_d10() {
  IntMatrix z = IntMatrix::Zero(17, 17);
  add_block(z, {0, 16}, {0, 16});
  add_block(z, {2, 14}, {2, 14});
  add_block(z, {4, 12}, {4, 12});
  add_block(z, {6, 10}, {6, 10});
  add_block(z, {8}, {8}, 2);
  return z;
}

struct So16 {
  IntMatrix one = IntMatrix::Identity(4, 4);
  IntMatrix w = from_rows(4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0});
  IntMatrix xs = from_rows(4, {1, 0, 1, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0});
  IntMatrix xc = w * xs * w;
  IntMatrix q = from_rows(4, {1, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0});
};

bool contains(const std::vector<IntMatrix>& v, const IntMatrix& z) {
  return std::find(v.begin(), v.end(), z) != v.end();
}

}  // namespace

TEST_CASE("bound matrix") {
  const Bounds so = bound_matrix(build_so16l_level1(1));
  CHECK(so.w == doctest::Approx(4.0));
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (so.mask(i, j)) CHECK(so.bound(i, j) == 1);
    }
  }
  const ModularData su = build_su2(10);
  const Bounds b = bound_matrix(su);
  CHECK(b.mask(3, 7));
  CHECK(su.labels[3].h == Rational(5, 16));
  CHECK(b.bound(3, 7) == static_cast<std::int64_t>(std::floor(su.d[3] * su.d[7] + 1e-9)));
  CHECK(b.bound(0, 0) >= 1);
  CHECK_FALSE(b.mask(0, 1));
}

TEST_CASE("commutant dimensions") {
  CHECK(commutant_basis(build_so16l_level1(1)).dimension() == 5);
  const CommutantBasis one = commutant_basis(build_zn_theory(1, 0));
  REQUIRE(one.dimension() == 1);
  CHECK(one.rational[0][0] == Rational(1));

  // The three known su2 level 10 invariants are linearly independent.
  Eigen::MatrixXd flat(121, 3);
  const IntMatrix known[3] = {IntMatrix::Identity(11, 11), z_d7(), z_e6()};
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < 121; ++i) flat(i, k) = static_cast<double>(known[k](i / 11, i % 11));
  }
  CHECK(Eigen::FullPivLU<Eigen::MatrixXd>(flat).rank() == 3);
  const CommutantBasis cb = commutant_basis(build_su2(10));
  CHECK(cb.dimension() >= 3);
  CHECK(cb.exact_rational);
}

TEST_CASE("SO(16l) level one has exactly six invariants") {
  const So16 m;
  for (int l = 1; l <= 3; ++l) {
    const ModularData md = build_so16l_level1(l);
    const SearchResult r = enumerate_physical(md);
    std::vector<IntMatrix> expect = {m.one, m.w, m.xs, m.xc, m.q, m.q.transpose()};
    std::sort(expect.begin(), expect.end(), lex_less);
    CHECK(r.invariants == expect);
    CHECK(m.q == m.xs * m.w);
    CHECK(IntMatrix(m.q.transpose()) == m.w * m.xs);
    CHECK((m.one - m.w - m.xs - m.xc + m.q + m.q.transpose()).isZero());
    CHECK(enumerate_oracle(md).invariants == r.invariants);
  }
}

TEST_CASE("su2 level 10 and 16 enumeration") {
  const SearchResult r10 = enumerate_physical(build_su2(10));
  CHECK(r10.invariants.size() == 3);
  CHECK(contains(r10.invariants, z_e6()));
  CHECK(contains(r10.invariants, z_d7()));
  CHECK(enumerate_oracle(build_su2(10)).invariants == r10.invariants);

  const ModularData md16 = build_su2(16);
  const SearchResult r16 = enumerate_physical(md16);
  CHECK(r16.invariants.size() == 3);
  CHECK(contains(r16.invariants, z_e7()));
  CHECK(contains(r16.invariants, z_d10()));
  CHECK(z_e7().trace() == 7);
  CHECK(z_d10().trace() == 10);
  CHECK(enumerate_oracle(md16).invariants == r16.invariants);
}

TEST_CASE("worker count does not change the output") {
  for (const char* spec : {"sun:3,5", "zn:24,5", "su2:16"}) {
    const ModularData md = build_model(spec);
    SearchLimits one;
    SearchLimits many;
    many.jobs = 3;
    CHECK(enumerate_physical(md, one).invariants == enumerate_physical(md, many).invariants);
  }
}

TEST_CASE("node limit reports truncation") {
  SearchLimits lim;
  lim.max_nodes = 1;
  CHECK_THROWS_AS(enumerate_physical(build_sun(3, 5), lim), SearchTruncated);
  try {
    enumerate_oracle(build_su2(10), lim);
    FAIL("expected truncation");
  } catch (const SearchTruncated& e) {
    CHECK(e.partial.truncated);
    CHECK_FALSE(e.partial.frontier.empty());
  }
}

TEST_CASE("verify_invariant") {
  const ModularData md = build_su2(10);
  CHECK(verify_invariant(md, IntMatrix::Identity(11, 11)).passed());
  CHECK(verify_invariant(md, z_e6()).passed());
  IntMatrix bad = z_e6();
  bad(3, 7) += 1;
  const InvariantReport rep = verify_invariant(md, bad);
  CHECK_FALSE(rep.passed());
  const InvariantCheck* f = rep.first_failure();
  REQUIRE(f != nullptr);
  CHECK(f->name == "ZS=SZ");
  CHECK(f->row >= 0);
  IntMatrix masked = IntMatrix::Identity(11, 11);
  masked(0, 1) = 1;
  CHECK_FALSE(verify_invariant(md, masked).find("T-sparsity")->passed);
  for (const auto& spec : {"so16l:1", "zn:7,2", "ising", "sun:3,4"}) {
    const ModularData m = build_model(spec);
    CHECK(verify_invariant(m, IntMatrix::Identity(m.rank(), m.rank())).passed());
  }
}

TEST_CASE("classification") {
  const So16 m;
  const ModularData so = build_so16l_level1(1);
  const Classification q = classify(so, m.q);
  CHECK(q.is_heterotic);
  CHECK(q.type() == "heterotic");
  CHECK_FALSE(q.type1_fit);
  CHECK(q.vacuum_row == std::vector<std::int64_t>{1, 0, 0, 1});
  CHECK(q.vacuum_column == std::vector<std::int64_t>{1, 0, 1, 0});
  const Classification w = classify(so, m.w);
  CHECK(w.is_permutation);
  CHECK(w.permutation == std::vector<int>{0, 1, 3, 2});

  const ModularData su = build_su2(10);
  const Classification e6 = classify(su, z_e6());
  CHECK(e6.type() == "I");
  CHECK(e6.exceptional);
  CHECK_FALSE(e6.is_permutation);
  REQUIRE(e6.type1_fit);
  const IntMatrix& b = e6.type1_fit->b;
  REQUIRE(b.rows() == 3);
  // Blocks come out ordered by their lowest label.
  IntMatrix expect = IntMatrix::Zero(3, 11);
  expect(0, 0) = expect(0, 6) = 1;
  expect(1, 3) = expect(1, 7) = 1;
  expect(2, 4) = expect(2, 10) = 1;
  CHECK(b == expect);
  CHECK(e6.type1_fit->extended_labels == std::vector<std::string>{"0+6", "3+7", "4+10"});
  CHECK(classify(su, z_d7()).is_permutation);
  CHECK_FALSE(classify(su, z_d7()).exceptional);

  const ModularData su16 = build_su2(16);
  const Classification e7 = classify(su16, z_e7());
  CHECK_FALSE(e7.is_permutation);
  CHECK(e7.is_symmetric);
  CHECK_FALSE(e7.type1_fit);
  CHECK(e7.type() == "II");
  CHECK(e7.trace == 7);
}

TEST_CASE("chiral global indices") {
  const ModularData su = build_su2(10);
  const GlobalIndices e6 = chiral_global_indices(su, z_e6());
  CHECK(std::abs(e6.w_plus - e6.w / (3 + std::sqrt(3.0))) < 1e-9 * e6.w);
  CHECK(e6.w_plus == doctest::Approx(e6.w_minus));
  CHECK(e6.w_zero * e6.w_alpha == doctest::Approx(e6.w_plus * e6.w_plus));
  const GlobalIndices id = chiral_global_indices(su, IntMatrix::Identity(11, 11));
  CHECK(id.w_plus == id.w);
  CHECK(id.w_alpha == id.w);
  CHECK(id.w_zero == doctest::Approx(id.w));
}

TEST_CASE("structural properties of enumerated invariants") {
  for (const char* spec : {"so16l:1", "su2:10", "su2:16", "sun:3,5", "zn:12,5", "ising", "sun:4,2"}) {
    CAPTURE(spec);
    const ModularData md = build_model(spec);
    const SearchResult r = enumerate_physical(md);
    IntMatrix c = IntMatrix::Zero(md.rank(), md.rank());
    for (int l = 0; l < md.rank(); ++l) c(l, md.conjugation()[l]) = 1;
    for (const auto& z : r.invariants) {
      double dzd = 0.0;
      for (int i = 0; i < md.rank(); ++i) {
        for (int j = 0; j < md.rank(); ++j) dzd += md.d[i] * static_cast<double>(z(i, j)) * md.d[j];
      }
      const double w = bound_matrix(md).w;
      CHECK(dzd <= w + 1e-8);
      CHECK(static_cast<double>(z.sum()) <= w + 1e-9);
      const Eigen::VectorXd d = md.d;
      CHECK((z.cast<double>() * d - z.cast<double>().transpose() * d)(0) == doctest::Approx(0.0));
      CHECK(contains(r.invariants, c * z));
      CHECK(contains(r.invariants, z * c));
      CHECK(contains(r.invariants, z.transpose()));
    }
  }
}
