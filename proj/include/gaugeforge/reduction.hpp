#pragma once

// From a UPC(c2) violation to an AUE(c1) contradiction certificate: the
// tolerance epsilon, rational approximants, the correction zeta, the
// measure mu-tilde and the three-part estimate ledger.

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gaugeforge/chains.hpp"
#include "gaugeforge/rational_grassmannian.hpp"
#include "gaugeforge/upc.hpp"

namespace gaugeforge {

inline constexpr int kSupSampleSize = 512;
inline constexpr double kLedgerSlack = 1e-12;

/// ((c1 - c2)(sum_m - 1) / 2) / (3L/2 + M + M sqrt(C(n,k)) + c1).
inline double epsilon_of(double lip, double sup, double c1, double c2, double sum_m, int n, int k) {
  check_degree(n, k);
  if (!(c2 > 0.0) || !(c1 > c2)) throw ArgumentError("epsilon needs 0 < c2 < c1");
  if (!(sum_m > 1.0)) throw ArgumentError("epsilon needs sum m_i > 1");
  if (!(lip >= 0.0) || !std::isfinite(lip)) throw ArgumentError("Lipschitz constant must be finite and >= 0");
  if (!(sup > 0.0) || !std::isfinite(sup)) throw ArgumentError("sup F must be finite and positive");
  double root = std::sqrt(static_cast<double>(binomial(n, k)));
  return 0.5 * (c1 - c2) * (sum_m - 1.0) / (1.5 * lip + sup + sup * root + c1);
}

struct ReductionInput {
  Integrand f;
  double lip = 0.0;
  double sup = 0.0;
  bool sup_estimated = false;
  double c1 = 0.0, c2 = 0.0;
  Decomposition violation;
  UPCVerdict verdict;  // at c2; fails by construction

  int n() const { return violation.n(); }
  int k() const { return violation.k(); }
  double sum_m() const { return violation.sum_m(); }

  static ReductionInput make(Integrand f, double c1, double c2, Decomposition dec,
                             std::optional<double> sup_override = std::nullopt, std::uint64_t seed = 0) {
    if (!(c2 > 0.0) || !(c1 > c2)) throw ArgumentError("reduction needs 0 < c2 < c1");
    if (!f.lip()) throw ConfigurationError("reduction needs a Lipschitz constant for F");
    ReductionInput in{std::move(f), 0.0, 0.0, false, c1, c2, std::move(dec), {}};
    in.lip = *in.f.lip();
    if (sup_override) {
      if (!(*sup_override > 0.0)) throw ArgumentError("sup F must be positive");
      in.sup = *sup_override;
    } else if (in.f.declared_sup()) {
      in.sup = *in.f.declared_sup();
    } else {
      auto sample = GrassmannSample::uniform(in.f.n(), in.f.k(), kSupSampleSize, seed);
      sample.points.push_back(in.violation.eta0);
      for (const auto& a : in.violation.atoms) sample.points.push_back(a.eta);
      in.sup = kSupSafetyFactor * sampled_sup(in.f, sample);
      in.sup_estimated = true;
    }
    in.verdict = certify_upc_instance(in.f, c2, in.violation);
    if (in.verdict.holds) throw ArgumentError("decomposition does not violate UPC(c2)");
    if (in.violation.d() < 2) throw InternalConsistencyError("a violation needs at least two atoms");
    if (!(in.sum_m() > 1.0)) throw InternalConsistencyError("a violation needs sum m_i > 1");
    return in;
  }
};

struct BasisAtom {
  MultiIndex lambda;
  Rational m;  // |zeta . e_lambda|
  int sign = 1;
  GrassmannPoint eta;
};

struct MuTilde {
  double epsilon = 0.0;
  RationalSimpleVector eta0_tilde;
  std::vector<std::pair<Rational, RationalSimpleVector>> atoms_tilde;  // (m~_i, eta~_i)
  KVectorQ zeta;
  std::vector<BasisAtom> basis_part;
  std::vector<MultiIndex> l_set;

  double eta0_tolerance = 0.0, eta0_error = 0.0;
  std::vector<double> atom_tolerances, atom_errors;
  double zeta_norm = 0.0;
  Rational sum_m_tilde = 0, sum_m_lambda = 0;
  bool identity_exact = false;

  GrassmannPoint eta0_point() const { return GrassmannPoint::from_exact(eta0_tilde.vec(), eta0_tilde.factors()); }

  AtomicGrassmannMeasure measure() const {
    AtomicGrassmannMeasure mu;
    for (const auto& [m, z] : atoms_tilde) mu.add(m.get_d(), GrassmannPoint::from_exact(z.vec(), z.factors()));
    for (const auto& b : basis_part) mu.add(b.m.get_d(), b.eta);
    return mu;
  }
};

inline AtomicGrassmannMeasure decomposition_measure(const Decomposition& dec) {
  AtomicGrassmannMeasure mu;
  for (const auto& a : dec.atoms) mu.add(a.m, a.eta);
  return mu;
}

/// Rational unit approximants within eps / (4 d m_i) of each eta_i and
/// eps / 4 of eta_0, m~_i the exact value of m_i, and the correction zeta
/// spread over signed basis vectors so the identity is exact.
inline MuTilde build_mu_tilde(const ReductionInput& in) {
  MuTilde mt;
  mt.epsilon = epsilon_of(in.lip, in.sup, in.c1, in.c2, in.sum_m(), in.n(), in.k());
  double eps = mt.epsilon;
  int n = in.n(), k = in.k();
  double d = static_cast<double>(in.violation.d());

  mt.eta0_tolerance = std::min(0.5, eps / 4);
  mt.eta0_tilde = rational_unit_approx(in.violation.eta0, mt.eta0_tolerance);
  mt.eta0_error = distance(to_double(mt.eta0_tilde.vec()), in.violation.eta0.vec());

  const auto& atoms = in.violation.atoms;
  std::vector<RationalSimpleVector> approx(atoms.size());
  mt.atom_tolerances.resize(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) mt.atom_tolerances[i] = std::min(0.5, eps / (4 * d * atoms[i].m));
  parallel_for(atoms.size(),
               [&](std::size_t i) { approx[i] = rational_unit_approx(atoms[i].eta, mt.atom_tolerances[i]); });

  mt.zeta = mt.eta0_tilde.vec();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    Rational m = atoms[i].m_exact ? *atoms[i].m_exact : exact_rational(atoms[i].m);
    mt.atom_errors.push_back(distance(to_double(approx[i].vec()), atoms[i].eta.vec()));
    mt.zeta -= m * approx[i].vec();
    mt.sum_m_tilde += m;
    mt.atoms_tilde.emplace_back(m, std::move(approx[i]));
  }
  mt.zeta_norm = norm(mt.zeta);

  for (std::size_t r = 0; r < mt.zeta.size(); ++r) {
    const Rational& z = mt.zeta[r];
    if (sgn(z) == 0) continue;
    MultiIndex lam = mt.zeta.index(r);
    KVectorQ eq = KVectorQ::basis(lam);
    if (sgn(z) < 0) eq = -eq;
    mt.basis_part.push_back({lam, abs(z), sgn(z), GrassmannPoint::from_exact(eq)});
    mt.l_set.push_back(lam);
    mt.sum_m_lambda += abs(z);
  }

  KVectorQ residual = mt.eta0_tilde.vec();
  for (const auto& [m, z] : mt.atoms_tilde) residual -= m * z.vec();
  for (const auto& b : mt.basis_part) residual -= (b.sign > 0 ? b.m : Rational(-b.m)) * KVectorQ::basis(b.lambda);
  mt.identity_exact = residual.is_zero();
  if (!mt.identity_exact) throw InternalConsistencyError("mu-tilde identity has a nonzero residual");
  if (!(mt.zeta_norm < eps)) throw InternalConsistencyError("|zeta| = " + format_double(mt.zeta_norm) + " is not below epsilon");
  if (static_cast<long long>(mt.l_set.size()) > binomial(n, k))
    throw InternalConsistencyError("L_set exceeds binomial(n, k)");
  return mt;
}

/// ||mu~ - mu||_TV with its bound 2 sum_{moved} m_i + sum m_lambda.
struct TvComparison {
  double actual = 0.0;
  double bound = 0.0;
};

inline TvComparison mu_tilde_tv(const ReductionInput& in, const MuTilde& mt) {
  TvComparison out;
  out.actual = tv_distance(mt.measure(), decomposition_measure(in.violation));
  for (std::size_t i = 0; i < in.violation.atoms.size(); ++i)
    if (mt.atom_errors[i] > kAtomTolerance) out.bound += 2 * in.violation.atoms[i].m;
  out.bound += mt.sum_m_lambda.get_d();
  return out;
}

struct ContradictionCertificate {
  double epsilon = 0, lip = 0, sup = 0, c1 = 0, c2 = 0, sum_m = 0;
  long long binom = 0;
  double sqrt_binom = 0;

  double est1_bound = 0;                  // M eps
  std::optional<double> est1_actual;      // |int F d(gamma_A - mu~)|
  std::optional<double> tv_gamma_mu;      // ||gamma_A - mu~||_TV

  double est2_actual = 0;    // |int F dmu~ - sum m_i F(eta_i)|
  double est2_computed = 0;  // L sum m_i |eta_i - eta~_i| + M sum m_lambda
  double est2_cs = 0;        // (L/2) eps + M sqrt(C) |zeta|
  double est2_bound = 0;     // (L/2 + M sqrt(C)) eps

  double est3_actual = 0;  // sum m_i F(eta_i) - F(eta~_0)
  double est3_bound = 0;   // c2 (sum m - 1) + L |eta_0 - eta~_0|

  double upper = 0;  // c2 (sum m - 1) + eps (3L/2 + M + M sqrt(C))
  double lower = 0;  // c1 (sum m - 1) - c1 eps
  double margin = 0;
  double expected_margin = 0;  // (c1 - c2)(sum m - 1) / 2
  double upper_realized = 0;   // est1 + est2_actual + est3_actual

  double zeta_norm = 0;
  std::size_t l_set_size = 0;
  double sum_m_lambda = 0;
  bool identity_exact = false;
  std::vector<std::pair<std::string, bool>> checks;

  std::optional<double> direct_lhs, direct_rhs, direct_margin;  // with gamma_A
  bool valid = false;

  std::vector<std::pair<std::string, double>> values() const {
    std::vector<std::pair<std::string, double>> v{
        {"epsilon", epsilon},   {"est1_bound", est1_bound}, {"est2_actual", est2_actual},
        {"est2_computed", est2_computed}, {"est2_cs", est2_cs}, {"est2_bound", est2_bound},
        {"est3_actual", est3_actual}, {"est3_bound", est3_bound}, {"upper", upper},
        {"lower", lower},       {"margin", margin},         {"zeta_norm", zeta_norm}};
    if (est1_actual) v.emplace_back("est1_actual", *est1_actual);
    if (direct_margin) v.emplace_back("direct_margin", *direct_margin);
    return v;
  }
};

/// Runs the estimate ledger. Throws CertificateFailure (carrying every
/// value) unless lower > upper and every intermediate bound holds.
inline ContradictionCertificate verify_ledger(const ReductionInput& in, const MuTilde& mt,
                                              const AtomicGrassmannMeasure* gamma_a = nullptr) {
  ContradictionCertificate c;
  c.epsilon = mt.epsilon;
  c.lip = in.lip;
  c.sup = in.sup;
  c.c1 = in.c1;
  c.c2 = in.c2;
  c.sum_m = mt.sum_m_tilde.get_d();
  c.binom = binomial(in.n(), in.k());
  c.sqrt_binom = std::sqrt(static_cast<double>(c.binom));
  double eps = c.epsilon, lip = c.lip, sup = c.sup, excess = c.sum_m - 1.0;

  const auto& f = in.f;
  const auto& atoms = in.violation.atoms;
  double original = 0.0;
  for (const auto& a : atoms) original += a.m * f(a.eta);
  AtomicGrassmannMeasure mu = mt.measure();
  double tilde = mu.integrate(f);
  double f0_tilde = f(mt.eta0_point());

  c.est1_bound = sup * eps;
  if (gamma_a) {
    c.tv_gamma_mu = tv_distance(*gamma_a, mu);
    c.est1_actual = std::fabs(gamma_a->integrate(f) - tilde);
  }

  c.est2_actual = std::fabs(tilde - original);
  double moved = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) moved += atoms[i].m * mt.atom_errors[i];
  c.sum_m_lambda = mt.sum_m_lambda.get_d();
  c.est2_computed = lip * moved + sup * c.sum_m_lambda;
  c.est2_cs = 0.5 * lip * eps + sup * c.sqrt_binom * mt.zeta_norm;
  c.est2_bound = (0.5 * lip + sup * c.sqrt_binom) * eps;

  c.est3_actual = original - f0_tilde;
  c.est3_bound = in.c2 * excess + lip * mt.eta0_error;

  c.upper = in.c2 * excess + eps * (1.5 * lip + sup + sup * c.sqrt_binom);
  c.lower = in.c1 * excess - in.c1 * eps;
  c.margin = c.lower - c.upper;
  c.expected_margin = 0.5 * (in.c1 - in.c2) * excess;
  c.upper_realized = c.est1_actual.value_or(c.est1_bound) + c.est2_actual + c.est3_actual;

  c.zeta_norm = mt.zeta_norm;
  c.l_set_size = mt.l_set.size();
  c.identity_exact = mt.identity_exact;

  auto slack = [](double x) { return kLedgerSlack * (1.0 + std::fabs(x)); };
  c.checks = {
      {"identity_exact", mt.identity_exact},
      {"zeta_below_epsilon", mt.zeta_norm < eps},
      {"l_set_cardinality", static_cast<long long>(c.l_set_size) <= c.binom},
      {"sum_m_lambda_cauchy_schwarz", c.sum_m_lambda <= c.sqrt_binom * mt.zeta_norm + slack(c.sum_m_lambda)},
      {"eta0_within_half_epsilon", mt.eta0_error < eps / 2},
      {"est2_actual_le_computed", c.est2_actual <= c.est2_computed + slack(c.est2_computed)},
      {"est2_computed_le_cs", c.est2_computed <= c.est2_cs + slack(c.est2_cs)},
      {"est2_cs_le_bound", c.est2_cs <= c.est2_bound + slack(c.est2_bound)},
      {"est3_actual_lt_bound", c.est3_actual < c.est3_bound + slack(c.est3_bound)},
      {"upper_below_lower", c.margin > 0},
  };
  if (c.est1_actual) c.checks.emplace_back("est1_actual_le_bound", *c.est1_actual <= sup * *c.tv_gamma_mu + slack(*c.est1_actual));

  if (gamma_a) {
    c.direct_lhs = gamma_a->integrate(f) - f0_tilde;
    c.direct_rhs = in.c1 * (gamma_a->total_mass() - 1.0);
    c.direct_margin = *c.direct_lhs - *c.direct_rhs;
  }

  c.valid = true;
  std::string failed;
  for (const auto& [name, ok] : c.checks)
    if (!ok) {
      c.valid = false;
      if (!failed.empty()) failed += ", ";
      failed += name;
    }
  if (!c.valid) throw CertificateFailure("ledger does not close: " + failed, c.values());
  return c;
}

struct OracleReport {
  BoundaryComparison boundary;
  double tv = 0.0;
  double epsilon = 0.0;
  bool boundary_holds = false;
  bool tv_holds = false;
  bool both_hold() const { return boundary_holds && tv_holds; }
};

/// Checks the two conclusions an externally supplied chain A must meet:
/// del A = del D~ and ||gamma_A - mu~||_TV < eps.
inline OracleReport verify_oracle_chain(const PolyhedralChain& a, const PolyhedralChain& d_tilde,
                                        const AtomicGrassmannMeasure& mu, double eps) {
  OracleReport r;
  r.epsilon = eps;
  r.boundary = boundary_equal(a, d_tilde);
  r.boundary_holds = r.boundary.equal;
  r.tv = tv_distance(gaussian_measure(a).to_atomic(), mu);
  r.tv_holds = r.tv < eps;
  return r;
}

inline OracleReport verify_oracle_chain(const PolyhedralChain& a, const PolyhedralChain& d_tilde, const MuTilde& mt) {
  return verify_oracle_chain(a, d_tilde, mt.measure(), mt.epsilon);
}

/// D~: the unit cube chain on the plane of eta~_0.
inline PolyhedralChain cube_at(const MuTilde& mt) { return unit_cube_chain(mt.eta0_tilde); }

}  // namespace gaugeforge
