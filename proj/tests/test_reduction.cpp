#include "catch_amalgamated.hpp"

#include "gaugeforge/io.hpp"
#include "gaugeforge/reduction.hpp"
#include "support.hpp"

using namespace gaugeforge;

namespace {

std::string data(const std::string& name) { return std::string(GAUGEFORGE_DATA) + "/" + name; }

ReductionInput dip_input(double c1 = 1.0, double c2 = 0.5) {
  return ReductionInput::make(load_integrand(data("dip.ig")), c1, c2, load_decomposition(data("viol.dec"), 4));
}

/// e1^e2 = 5/6 e1^v+ + 5/6 e1^v-, v+- = (3/5) e2 +- (4/5) e3: every atom rational.
Decomposition rational_split() {
  auto e12 = GrassmannPoint::from_exact(KVectorQ::basis(3, {1, 2}));
  auto vp = parse_grassmann_point("1,2 = 3/5; 1,3 = 4/5", 3);
  auto vm = parse_grassmann_point("1,2 = 3/5; 1,3 = -4/5", 3);
  return Decomposition{e12, {{5.0 / 6, Rational(5, 6), vp}, {5.0 / 6, Rational(5, 6), vm}}};
}

}  // namespace

TEST_CASE("epsilon from the constants", "[reduction]") {
  double s = std::sqrt(2.0);
  double expect = 0.5 * 0.5 * (s - 1) / (1.5 + 2 + 2 * std::sqrt(6.0) + 1);
  CHECK(epsilon_of(1, 2, 1, 0.5, s, 4, 2) == Catch::Approx(expect).epsilon(1e-15));
  CHECK(epsilon_of(1, 2, 1, 0.5, s, 4, 2) == Catch::Approx(0.0110175).margin(1e-7));
  CHECK_THROWS_AS(epsilon_of(1, 2, 1, 1, s, 4, 2), ArgumentError);
  CHECK_THROWS_AS(epsilon_of(1, 2, 1, 0.5, 1.0, 4, 2), ArgumentError);
  CHECK_THROWS_AS(epsilon_of(-1, 2, 1, 0.5, s, 4, 2), ArgumentError);
  CHECK_THROWS_AS(epsilon_of(1, 0, 1, 0.5, s, 4, 2), ArgumentError);
  // monotone: a larger gap c1 - c2 allows a larger tolerance
  CHECK(epsilon_of(1, 2, 2, 0.5, s, 4, 2) > epsilon_of(1, 2, 1, 0.5, s, 4, 2));
}

TEST_CASE("reduction input validation", "[reduction]") {
  CHECK_THROWS_AS(
      ReductionInput::make(load_integrand(data("dip.ig")), 0.5, 0.5, load_decomposition(data("viol.dec"), 4)),
      ArgumentError);
  // UPC(1/2) holds for this decomposition under the area, so it is no violation
  CHECK_THROWS_AS(ReductionInput::make(Integrand::area(3, 2), 1.0, 0.5, rational_split()), ArgumentError);
  auto bare = Integrand::tabulated({{GrassmannPoint::from_exact(KVectorQ::basis(4, {1, 3})), 1.0}});
  CHECK_THROWS_AS(ReductionInput::make(bare, 1.0, 0.5, load_decomposition(data("viol.dec"), 4)), ConfigurationError);
  auto in = dip_input();
  CHECK(in.sup == 1.5);
  CHECK_FALSE(in.sup_estimated);
  CHECK(in.lip == 0.5);
  CHECK_FALSE(in.verdict.holds);
  auto over = ReductionInput::make(load_integrand(data("dip.ig")), 1.0, 0.5, load_decomposition(data("viol.dec"), 4), 3.0);
  CHECK(over.sup == 3.0);
}

TEST_CASE("rational atoms need no correction", "[reduction]") {
  auto in = ReductionInput::make(Integrand::area(3, 2), 1.5, 1.2, rational_split());
  auto mt = build_mu_tilde(in);
  CHECK(mt.identity_exact);
  CHECK(mt.zeta.is_zero());
  CHECK(mt.l_set.empty());
  CHECK(mt.eta0_error == 0);
  for (double e : mt.atom_errors) CHECK(e == 0);
  CHECK(mt.sum_m_tilde == Rational(5, 3));
  auto tv = mu_tilde_tv(in, mt);
  // mu~ = mu exactly; the floating TV only sees rounding of the weights
  CHECK(tv.actual <= 1e-15);
  CHECK(tv.bound == 0);
  auto cert = verify_ledger(in, mt);
  CHECK(cert.valid);
  CHECK(cert.margin == Catch::Approx(cert.expected_margin).epsilon(1e-12));
}

TEST_CASE("mu-tilde for floating atoms", "[reduction]") {
  auto in = dip_input();
  auto mt = build_mu_tilde(in);
  CHECK(mt.identity_exact);
  CHECK(mt.zeta_norm < mt.epsilon);
  CHECK(mt.eta0_error == 0);  // eta_0 = e1^e3 is already rational
  for (std::size_t i = 0; i < mt.atom_errors.size(); ++i) CHECK(mt.atom_errors[i] <= mt.atom_tolerances[i]);
  CHECK(mt.l_set.size() <= 6);
  // m~_i is the exact dyadic value of m_i
  for (std::size_t i = 0; i < mt.atoms_tilde.size(); ++i) CHECK(mt.atoms_tilde[i].first.get_d() == in.violation.atoms[i].m);
  // the basis part accounts for zeta coordinate by coordinate
  Rational total = 0;
  for (std::size_t r = 0; r < mt.zeta.size(); ++r) total += abs(mt.zeta[r]);
  CHECK(total == mt.sum_m_lambda);
  CHECK(mt.sum_m_lambda.get_d() <= std::sqrt(6.0) * mt.zeta_norm + 1e-15);
  auto tv = mu_tilde_tv(in, mt);
  CHECK(tv.actual <= tv.bound + 1e-12);
  CHECK(tv.actual > 0);
  auto mu = mt.measure();
  CHECK(mu.total_mass() == Catch::Approx(mt.sum_m_tilde.get_d() + mt.sum_m_lambda.get_d()).epsilon(1e-15));
}

TEST_CASE("the estimate ledger closes with the expected margin", "[reduction]") {
  for (auto [c1, c2] : std::vector<std::pair<double, double>>{{1.0, 0.5}, {0.8, 0.6}, {3.0, 0.5}}) {
    auto in = dip_input(c1, c2);
    auto mt = build_mu_tilde(in);
    auto cert = verify_ledger(in, mt);
    CHECK(cert.valid);
    CHECK(cert.margin == Catch::Approx(cert.expected_margin).epsilon(1e-10));
    CHECK(cert.margin == Catch::Approx(0.5 * (c1 - c2) * (in.sum_m() - 1)).epsilon(1e-10));
    for (const auto& [name, ok] : cert.checks) {
      INFO(name);
      CHECK(ok);
    }
    CHECK(cert.est2_actual <= cert.est2_bound);
    CHECK(cert.upper_realized <= cert.upper + 1e-12);
    CHECK(cert.l_set_size == mt.l_set.size());
  }
  auto in = dip_input();
  auto cert = verify_ledger(in, build_mu_tilde(in));
  CHECK(cert.margin == Catch::Approx(0.02900635094610965).epsilon(1e-12));
}

TEST_CASE("a broken ledger raises a certificate failure carrying its values", "[reduction]") {
  auto in = dip_input();
  auto mt = build_mu_tilde(in);
  mt.zeta_norm = 2 * mt.epsilon;
  try {
    verify_ledger(in, mt);
    FAIL("expected CertificateFailure");
  } catch (const CertificateFailure& e) {
    CHECK(std::string(e.what()).find("zeta_below_epsilon") != std::string::npos);
    bool has_eps = false;
    for (const auto& [k, v] : e.values())
      if (k == "epsilon") has_eps = v == mt.epsilon;
    CHECK(has_eps);
    CHECK(e.kind() == std::string("certificate-failure"));
  }
}

TEST_CASE("oracle chains", "[reduction]") {
  auto in = dip_input();
  auto mt = build_mu_tilde(in);
  auto d = cube_at(mt);
  AtomicGrassmannMeasure point;
  point.add(1.0, mt.eta0_point());
  auto self = verify_oracle_chain(d, d, point, mt.epsilon);
  CHECK(self.both_hold());
  CHECK(self.tv == 0);
  auto fine = verify_oracle_chain(barycentric_subdivision(d), d, point, mt.epsilon);
  CHECK(fine.both_hold());
  // D~ itself is far from mu~ in total variation: at least ||mu~|| - 1
  auto far = verify_oracle_chain(d, d, mt);
  CHECK(far.boundary_holds);
  CHECK_FALSE(far.tv_holds);
  CHECK(far.tv >= mt.measure().total_mass() - 1 - 1e-12);
  // a chain with the wrong boundary
  auto doubled = verify_oracle_chain(d.scaled(2), d, point, mt.epsilon);
  CHECK_FALSE(doubled.boundary_holds);
  // the ledger with gamma_A = gamma_D~ reports the first estimate directly
  auto gamma = gaussian_measure(d).to_atomic();
  auto cert = verify_ledger(in, mt, &gamma);
  REQUIRE(cert.est1_actual);
  CHECK(*cert.est1_actual <= cert.sup * *cert.tv_gamma_mu + 1e-12);
  REQUIRE(cert.direct_margin);
  CHECK(*cert.direct_margin == Catch::Approx(*cert.direct_lhs - *cert.direct_rhs));
}
