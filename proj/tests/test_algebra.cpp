#include "catch_amalgamated.hpp"

#include "gaugeforge/io.hpp"
#include "gaugeforge/lp.hpp"
#include "support.hpp"

using namespace gaugeforge;
using gaugeforge::testing::random_frame;
using gaugeforge::testing::random_kvector;
using gaugeforge::testing::random_rational;

namespace {

KVectorQ e(int n, std::vector<int> idx) { return KVectorQ::basis(n, idx); }
Rational q(long p, long d = 1) {
  Rational r(p, d);
  r.canonicalize();
  return r;
}

}  // namespace

TEST_CASE("scalar literals parse exactly and format round trip", "[scalar]") {
  CHECK(parse_rational("3/5") == q(3, 5));
  CHECK(parse_rational("-6/4") == q(-3, 2));
  CHECK(parse_rational("1.25") == q(5, 4));
  CHECK(parse_rational("2e-3") == q(1, 500));
  CHECK(is_rational_literal("3/5"));
  CHECK_FALSE(is_rational_literal("0.5"));
  CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
  CHECK_THROWS_AS(parse_rational("abc"), ParseError);
  CHECK_THROWS_AS(parse_double("1.5x"), ParseError);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 200; ++i) {
    double x = u(rng) * std::pow(10.0, std::uniform_int_distribution<int>(-20, 20)(rng));
    CHECK(parse_double(format_double(x)) == x);
  }
  CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("best rational approximation and exact square roots", "[scalar]") {
  Rational pi = exact_rational(3.141592653589793);
  CHECK(best_rational_approximation(pi, Integer(7)) == q(22, 7));
  CHECK(best_rational_approximation(pi, Integer(113)) == q(355, 113));
  Rational root;
  CHECK(rational_sqrt(q(9, 16), root));
  CHECK(root == q(3, 4));
  CHECK_FALSE(rational_sqrt(q(2), root));
  SqrtSum s;
  s.add(q(1), q(8));
  s.add(q(1), q(2));
  CHECK(s == [] {
    SqrtSum t;
    t.add(q(3), q(2));
    return t;
  }());
  CHECK(s.to_double() == Catch::Approx(3 * std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("basis indices are lexicographic", "[multi_index]") {
  auto b32 = basis_indices(3, 2);
  REQUIRE(b32.size() == 3);
  CHECK(b32[0].str() == "1,2");
  CHECK(b32[1].str() == "1,3");
  CHECK(b32[2].str() == "2,3");
  CHECK(basis_indices(4, 2).size() == 6);
  auto b50 = basis_indices(5, 0);
  REQUIRE(b50.size() == 1);
  CHECK(b50[0].k() == 0);
  CHECK(b50[0].str().empty());
  CHECK_THROWS_AS(MultiIndex::from_entries(4, {2, 1}), ArgumentError);
  CHECK_THROWS_AS(MultiIndex::from_entries(4, {1, 5}), ArgumentError);
  for (int n = 0; n <= 6; ++n)
    for (int k = 0; k <= n; ++k) {
      auto idx = basis_indices(n, k);
      REQUIRE(static_cast<long long>(idx.size()) == binomial(n, k));
      for (std::size_t i = 0; i < idx.size(); ++i) CHECK(index_rank(n, idx[i].mask()) == static_cast<long long>(i));
    }
}

TEST_CASE("wedge examples", "[exterior_algebra]") {
  auto e1 = e(2, {1}), e2 = e(2, {2});
  CHECK(wedge(e1, e2) == e(2, {1, 2}));
  CHECK(wedge(e2, e1) == -e(2, {1, 2}));
  CHECK(wedge(e1 + e2, e1 - e2) == q(-2) * e(2, {1, 2}));
  CHECK_THROWS_AS(wedge(e(3, {1, 2}), e(3, {1, 3})), ArgumentError);
  CHECK_THROWS_AS(wedge(e(3, {1}), e(4, {1})), ArgumentError);
}

TEST_CASE("inner product and norm examples", "[exterior_algebra]") {
  CHECK(inner(e(4, {1, 2}), e(4, {1, 2})) == 1);
  CHECK(inner(e(4, {1, 2}), e(4, {3, 4})) == 0);
  KVectorD mix = (1.0 / std::sqrt(2.0)) * (to_double(e(4, {1, 2})) + to_double(e(4, {3, 4})));
  CHECK(inner(mix, to_double(e(4, {1, 2}))) == Catch::Approx(1 / std::sqrt(2.0)).epsilon(1e-15));
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    auto a = random_kvector(5, 2, rng);
    Rational s = 0;
    for (const auto& c : a.coords()) s += c * c;
    CHECK(inner(a, a) == s);
  }
}

TEST_CASE("Hodge star examples", "[exterior_algebra]") {
  CHECK(hodge_star(e(3, {1, 2})) == e(3, {3}));
  CHECK(hodge_star(e(4, {1, 2})) == e(4, {3, 4}));
  CHECK(hodge_star(hodge_star(e(4, {1, 2}))) == e(4, {1, 2}));
  CHECK(hodge_star(e(3, {1})) == e(3, {2, 3}));
  CHECK(hodge_star(e(3, {2})) == -e(3, {1, 3}));
}

TEST_CASE("associated space and simplicity examples", "[exterior_algebra]") {
  auto a = associated_space(e(4, {1, 2}));
  CHECK(a.size() == 2);
  KVectorQ plucker = e(4, {1, 2}) + e(4, {3, 4});
  CHECK(associated_space(plucker).empty());
  CHECK_FALSE(is_simple(plucker));
  KVectorQ v = wedge(e(3, {1}), e(3, {2}) + e(3, {3}));
  auto s = associated_space(v);
  REQUIRE(s.size() == 2);
  for (const auto& x : s) {
    KVectorQ w(3, 1, x);
    CHECK(wedge(w, v).is_zero());
  }
  CHECK(is_simple(wedge(e(3, {1}), e(3, {2}) + q(5) * e(3, {3}))));
  CHECK(is_simple(e(4, {1, 2})));
  CHECK_FALSE(is_simple(to_double(plucker)));
  CHECK_THROWS_AS(associated_space(KVectorQ(4, 2)), ArgumentError);
}

TEST_CASE("minors and induced maps", "[exterior_algebra]") {
  MatrixQ incl(4, 2);
  incl(0, 0) = 1;
  incl(1, 1) = 1;
  CHECK(minors(incl) == e(4, {1, 2}));
  MatrixD rot(3, 2);
  double c = std::cos(0.3), s = std::sin(0.3);
  rot(0, 0) = c;
  rot(1, 0) = s;
  rot(1, 1) = 0;
  rot(0, 1) = 0;
  rot(2, 1) = 1;
  CHECK(norm(minors(rot)) == Catch::Approx(1.0).epsilon(1e-14));
  std::mt19937_64 rng(5);
  auto a = random_kvector(4, 2, rng);
  CHECK(induced_map(MatrixQ::identity(4), a) == a);
  MatrixQ three = MatrixQ::identity(4);
  for (int i = 0; i < 4; ++i) three(i, i) = 3;
  CHECK(induced_map(three, a) == q(9) * a);
  MatrixQ inj(3, 2);
  inj(0, 0) = 1;
  inj(2, 1) = 1;
  CHECK(induced_map(inj, e(2, {1, 2})) == e(3, {1, 3}));
}

TEST_CASE("exterior algebra identities on random rational instances", "[exterior_algebra][property]") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 300; ++t) {
    int n = std::uniform_int_distribution<int>(1, 6)(rng);
    int j = std::uniform_int_distribution<int>(0, n)(rng);
    int l = std::uniform_int_distribution<int>(0, n - j)(rng);
    int m = std::uniform_int_distribution<int>(0, n - j - l)(rng);
    auto a = random_kvector(n, j, rng), b = random_kvector(n, l, rng), c = random_kvector(n, m, rng);
    auto b2 = random_kvector(n, l, rng);
    Rational s = random_rational(rng);
    int sign = (j * l) % 2 ? -1 : 1;
    REQUIRE(wedge(a, b) == Rational(sign) * wedge(b, a));
    REQUIRE(wedge(wedge(a, b), c) == wedge(a, wedge(b, c)));
    REQUIRE(wedge(a, b + s * b2) == wedge(a, b) + s * wedge(a, b2));
    int hs = (j * (n - j)) % 2 ? -1 : 1;
    REQUIRE(hodge_star(hodge_star(a)) == Rational(hs) * a);
    // a ^ *b = <a, b> e_1 ^ ... ^ e_n for equal degrees
    auto a2 = random_kvector(n, j, rng);
    REQUIRE(wedge(a, hodge_star(a2)) == inner(a, a2) * KVectorQ::basis(n, [&] {
              std::vector<int> all(n);
              std::iota(all.begin(), all.end(), 1);
              return all;
            }()));
  }
}

TEST_CASE("Cauchy-Binet and simplicity cross-checks", "[exterior_algebra][property]") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 200; ++t) {
    int n = std::uniform_int_distribution<int>(1, 6)(rng);
    int k = std::uniform_int_distribution<int>(1, std::min(n, 3))(rng);
    MatrixQ f(n, k);
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < k; ++c) f(i, c) = random_rational(rng);
    auto m = minors(f);
    REQUIRE(inner(m, m) == determinant(f.transposed() * f));
    if (!m.is_zero()) {
      REQUIRE(is_simple(m));
      REQUIRE(static_cast<int>(associated_space(m).size()) == k);
    }
    auto a = random_kvector(n, k, rng);
    if (!a.is_zero()) REQUIRE(is_simple(a) == (static_cast<int>(associated_space(a).size()) == k));
  }
  for (int n = 4; n <= 6; ++n) CHECK_FALSE(is_simple(e(n, {1, 2}) + e(n, {3, 4})));
}

TEST_CASE("Grassmannian points", "[exterior_algebra]") {
  CHECK_THROWS_AS(GrassmannPoint(to_double(q(2) * e(3, {1, 2}))), ArgumentError);
  CHECK_THROWS_AS(GrassmannPoint::normalized(to_double(e(4, {1, 2}) + e(4, {3, 4}))), ArgumentError);
  auto p = GrassmannPoint::from_frame(3, {{1, 1, 0}, {0, 0, 2}});
  CHECK(norm(p.vec()) == Catch::Approx(1.0).epsilon(1e-15));
  auto frame = orthonormal_frame(p);
  CHECK(distance(wedge_all<double>(3, frame), p.vec()) < 1e-12);
  auto m = -p;
  CHECK(distance(m.vec(), -p.vec()) == 0);
}

TEST_CASE("Gram-Schmidt over the rationals", "[rational_grassmannian]") {
  auto id = gram_schmidt_rational({{q(1), q(0)}, {q(0), q(1)}});
  CHECK(id == std::vector<VectorQ>{{q(1), q(0)}, {q(0), q(1)}});
  auto y = gram_schmidt_rational({{q(1), q(1)}, {q(0), q(1)}});
  CHECK(y == std::vector<VectorQ>{{q(1), q(1)}, {q(-1, 2), q(1, 2)}});
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    int n = std::uniform_int_distribution<int>(2, 5)(rng);
    auto w = random_frame(n, n, rng);
    auto g = gram_schmidt_rational(w);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) REQUIRE(dot(g[i], g[j]) == 0);
    for (int p = 1; p <= n; ++p) {
      std::vector<VectorQ> wp(w.begin(), w.begin() + p), gp(g.begin(), g.begin() + p);
      REQUIRE(wedge_all<Rational>(n, wp) == wedge_all<Rational>(n, gp));
    }
  }
}

TEST_CASE("rational simple approximation examples", "[rational_grassmannian]") {
  auto exact = rational_simple_approx(GrassmannPoint::from_exact(e(4, {1, 2})), 1e-3);
  CHECK(exact.vec() == e(4, {1, 2}));
  double r = 1 / std::sqrt(2.0);
  GrassmannPoint eta(KVectorD(3, 2, {r, r, 0}));
  for (double eps : {1e-1, 1e-3, 1e-6}) {
    auto z = rational_simple_approx(eta, eps);
    CHECK(distance(to_double(z.vec()), eta.vec()) < eps);
    CHECK(is_simple(z.vec()));
    auto w = qnk_witness(z);
    CHECK(w.residual_zero);
    CHECK(w.kernel_match);
    CHECK(w.closed_form_match);
    CHECK(z.vec() == w.t * w.xi_f());
    auto u = rational_unit_approx(eta, eps);
    CHECK(inner(u.vec(), u.vec()) == 1);
    CHECK(distance(to_double(u.vec()), eta.vec()) < eps);
  }
}

TEST_CASE("integer kernel witnesses", "[rational_grassmannian]") {
  auto z = factor_simple(e(3, {1, 2}));
  auto w = qnk_witness(z);
  REQUIRE(w.f.size() == 1);
  CHECK(w.f[0][0] == 0);
  CHECK(w.f[0][1] == 0);
  CHECK(abs(w.f[0][2]) == 1);
  CHECK((w.t == 1 || w.t == -1));
  CHECK(w.xi_f() * w.t == e(3, {1, 2}));
  auto p = has_rational_slope({{q(1), q(0), q(0), q(0)}, {q(0), q(1), q(0), q(0)}}, 4);
  REQUIRE(p.f.size() == 2);
  CHECK(p.kernel_match);
  CHECK(p.residual_zero);
  auto p2 = has_rational_slope({{q(1), q(2), q(0)}, {q(0), q(1), q(3)}}, 3);
  CHECK(p2.kernel_match);
  CHECK(p2.residual_zero);
  for (const auto& row : p2.f) {
    CHECK(row[0] * 1 + row[1] * 2 == 0);
    CHECK(row[1] * 1 + row[2] * 3 == 0);
  }
  std::mt19937_64 rng(41);
  for (int t = 0; t < 60; ++t) {
    int n = std::uniform_int_distribution<int>(2, 6)(rng);
    int k = std::uniform_int_distribution<int>(1, std::min(n, 3))(rng);
    RationalSimpleVector zeta(n, random_frame(n, k, rng));
    auto wt = qnk_witness(zeta);
    REQUIRE(wt.residual_zero);
    REQUIRE(wt.kernel_match);
    REQUIRE(hodge_star(wedge_all<Rational>(n, [&] {
              std::vector<VectorQ> rows;
              for (const auto& r : wt.f) {
                VectorQ v;
                for (const auto& z : r) v.emplace_back(z);
                rows.push_back(v);
              }
              return rows;
            }())) - Rational(1 / wt.t) * zeta.vec() ==
            KVectorQ(n, k));
  }
}

TEST_CASE("exact factorization of simple k-vectors", "[rational_grassmannian]") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 40; ++t) {
    int n = std::uniform_int_distribution<int>(2, 6)(rng);
    int k = std::uniform_int_distribution<int>(1, std::min(n, 3))(rng);
    KVectorQ v = wedge_all<Rational>(n, random_frame(n, k, rng));
    REQUIRE(factor_simple(v).vec() == v);
  }
  CHECK_THROWS(factor_simple(e(4, {1, 2}) + e(4, {3, 4})));
  auto onf = exact_orthonormal_factors(wedge_all<Rational>(3, {{q(3, 5), q(4, 5), q(0)}, {q(0), q(0), q(1)}}));
  REQUIRE(onf);
  CHECK(dot(onf->factors()[0], onf->factors()[0]) == 1);
}

TEST_CASE("dense simplex LP", "[lp]") {
  // min -x - y  s.t. x + 2y <= 4, 3x + y <= 6
  LinearProgram<Rational> lp;
  lp.cost = {q(-1), q(-1)};
  lp.a_le = {{q(1), q(2)}, {q(3), q(1)}};
  lp.b_le = {q(4), q(6)};
  auto s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.objective == q(-14, 5));
  CHECK(s.x[0] == q(8, 5));
  CHECK(s.x[1] == q(6, 5));

  LinearProgram<double> inf;
  inf.cost = {1.0};
  inf.a_eq = {{1.0}};
  inf.b_eq = {-1.0};
  CHECK(solve_lp(inf).status == LpStatus::infeasible);

  LinearProgram<double> unb;
  unb.cost = {-1.0, 0.0};
  unb.a_eq = {{1.0, -1.0}};
  unb.b_eq = {0.0};
  CHECK(solve_lp(unb).status == LpStatus::unbounded);

  // redundant equality rows
  LinearProgram<Rational> red;
  red.cost = {q(1), q(2)};
  red.a_eq = {{q(1), q(1)}, {q(2), q(2)}};
  red.b_eq = {q(1), q(2)};
  auto rs = solve_lp(red);
  REQUIRE(rs.status == LpStatus::optimal);
  CHECK(rs.objective == 1);
}

TEST_CASE("k-vector text form round trips", "[io]") {
  auto p = parse_kvector("1,2 = 3/5\n3,4 = 4/5\n", 4);
  REQUIRE(p.exact);
  CHECK(*p.exact == q(3, 5) * e(4, {1, 2}) + q(4, 5) * e(4, {3, 4}));
  CHECK(format_kvector(*p.exact) == "1,2 = 3/5\n3,4 = 4/5\n");
  auto inl = parse_kvector("1,2 = 3/5; 3,4 = 4/5", 4);
  CHECK(*inl.exact == *p.exact);
  auto d = parse_kvector("1,3 = 0.5", 3);
  CHECK_FALSE(d.exact);
  CHECK(d.value[1] == 0.5);
  CHECK_THROWS_AS(parse_kvector("1,2 = 1; 1,2 = 2", 3), ParseError);
  CHECK_THROWS_AS(parse_kvector("2,1 = 1", 3), ParseError);
  CHECK_THROWS_AS(parse_kvector("1,2 = 1; 3 = 1", 3), ParseError);
  CHECK_THROWS_AS(parse_kvector("1,2 : 1", 3), ParseError);
  std::mt19937_64 rng(17);
  for (int t = 0; t < 100; ++t) {
    int n = std::uniform_int_distribution<int>(1, 6)(rng);
    int k = std::uniform_int_distribution<int>(0, n)(rng);
    auto a = random_kvector(n, k, rng);
    REQUIRE(*parse_kvector(format_kvector(a), n, k).exact == a);
    auto ad = to_double(a);
    for (auto& x : ad.coords()) x *= 0.37;
    REQUIRE(parse_kvector(format_kvector(ad), n, k).value == ad);
  }
}
