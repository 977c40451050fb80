#pragma once

// Uniform polyconvexity UPC(c): certify the defining inequality on an
// explicit decomposition, and search for violations with a sampled LP.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "gaugeforge/integrands.hpp"

namespace gaugeforge {

inline constexpr double kDecompositionTolerance = 1e-10;
inline constexpr int kDefaultRestarts = 64;
inline constexpr int kDefaultSearchAtoms = 256;
inline constexpr double kDefaultMassCap = 2.0;

inline double margin_tolerance(double lhs) { return 1e-9 * (1.0 + std::fabs(lhs)); }

struct DecompositionAtom {
  double m = 0.0;
  std::optional<Rational> m_exact;
  GrassmannPoint eta;
};

/// eta0 = sum m_i eta_i with m_i > 0.
struct Decomposition {
  GrassmannPoint eta0;
  std::vector<DecompositionAtom> atoms;

  std::size_t d() const { return atoms.size(); }
  int n() const { return eta0.n(); }
  int k() const { return eta0.k(); }

  double sum_m() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.m;
    return s;
  }

  bool is_exact() const {
    if (!eta0.exact()) return false;
    for (const auto& a : atoms)
      if (!a.m_exact || !a.eta.exact()) return false;
    return true;
  }

  KVectorD residual_vector() const {
    KVectorD r = -eta0.vec();
    for (const auto& a : atoms) r += a.m * a.eta.vec();
    return r;
  }
  double residual() const { return norm(residual_vector()); }

  std::optional<KVectorQ> exact_residual() const {
    if (!is_exact()) return std::nullopt;
    KVectorQ r = -*eta0.exact();
    for (const auto& a : atoms) r += *a.m_exact * *a.eta.exact();
    return r;
  }

  /// Throws DecompositionError unless every invariant holds.
  void validate(double tol = kDecompositionTolerance) const {
    if (atoms.empty()) throw DecompositionError("decomposition has no atoms", 0.0);
    for (const auto& a : atoms) {
      if (a.eta.n() != n() || a.eta.k() != k()) throw DecompositionError("atom of wrong (n, k)", 0.0);
      if (!(a.m > 0.0) || (a.m_exact && sgn(*a.m_exact) <= 0))
        throw DecompositionError("atom weights must be positive", 0.0);
    }
    if (auto r = exact_residual()) {
      if (!r->is_zero()) throw DecompositionError("exact barycenter residual is nonzero", norm(*r));
      return;
    }
    double r = residual();
    if (!(r <= tol)) throw DecompositionError("barycenter residual exceeds tolerance", r);
  }
};

/// The same decomposition with atoms whose points coincide merged.
inline Decomposition merge_duplicates(const Decomposition& dec) {
  Decomposition out{dec.eta0, {}};
  for (const auto& a : dec.atoms) {
    bool merged = false;
    for (auto& b : out.atoms) {
      bool same = (a.eta.exact() && b.eta.exact()) ? *a.eta.exact() == *b.eta.exact()
                                                   : a.eta.vec() == b.eta.vec();
      if (same) {
        b.m += a.m;
        if (a.m_exact && b.m_exact) *b.m_exact += *a.m_exact;
        else b.m_exact.reset();
        merged = true;
        break;
      }
    }
    if (!merged) out.atoms.push_back(a);
  }
  return out;
}

struct UPCVerdict {
  double c = 0.0;
  double sum_m = 0.0;
  double lhs = 0.0;  // sum m_i F(eta_i) - F(eta_0)
  double rhs = 0.0;  // c (sum m_i - 1)
  double margin = 0.0;
  double tau_margin = 0.0;
  double residual = 0.0;
  bool holds = false;
  bool exact = false;
  std::optional<Rational> lhs_exact, rhs_exact, margin_exact;
};

/// sum m_i F(eta_i) - F(eta_0) >= c (sum m_i - 1), in rationals when the
/// decomposition, F and c all are.
inline UPCVerdict certify_upc_instance(const Integrand& f, double c, const Decomposition& dec,
                                       std::optional<Rational> c_exact = std::nullopt) {
  dec.validate();
  if (dec.n() != f.n() || dec.k() != f.k()) throw ArgumentError("decomposition and integrand differ in (n, k)");
  UPCVerdict v;
  v.c = c;
  v.residual = dec.residual();
  if (dec.is_exact()) {
    std::optional<Rational> f0 = f.exact_value(*dec.eta0.exact());
    Rational lhs = f0 ? -*f0 : Rational(0), sum = 0;
    bool ok = f0.has_value();
    for (const auto& a : dec.atoms) {
      auto fa = f.exact_value(*a.eta.exact());
      if (!fa) {
        ok = false;
        break;
      }
      lhs += *a.m_exact * *fa;
      sum += *a.m_exact;
    }
    if (ok) {
      Rational cq = c_exact ? *c_exact : exact_rational(c);
      Rational rhs = cq * (sum - 1);
      v.exact = true;
      v.lhs_exact = lhs;
      v.rhs_exact = rhs;
      v.margin_exact = lhs - rhs;
      v.sum_m = sum.get_d();
      v.lhs = lhs.get_d();
      v.rhs = rhs.get_d();
      v.margin = v.margin_exact->get_d();
      v.tau_margin = 0.0;
      v.holds = sgn(*v.margin_exact) >= 0;
      return v;
    }
  }
  double total = 0.0;
  for (const auto& a : dec.atoms) total += a.m * f(a.eta);
  v.sum_m = dec.sum_m();
  v.lhs = total - f(dec.eta0);
  v.rhs = c * (v.sum_m - 1.0);
  v.margin = v.lhs - v.rhs;
  v.tau_margin = margin_tolerance(v.lhs);
  v.holds = v.margin >= -v.tau_margin;
  return v;
}

struct SearchOptions {
  int restarts = kDefaultRestarts;
  int atoms = kDefaultSearchAtoms;
  std::uint64_t seed = 0;
  double mass_cap = kDefaultMassCap;
};

struct SearchResult {
  Decomposition best;
  UPCVerdict verdict;
  int best_restart = -1;
  bool violation = false;
  std::vector<double> restart_margins;
};

/// Seed of restart r, derived deterministically from the base seed.
inline std::uint64_t restart_seed(std::uint64_t seed, int r) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(r), 0x9e3779b9u};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (std::uint64_t(words[0]) << 32) | words[1];
}

/// One restart: random eta_0 and atoms; the LP minimizes
/// sum m_i (F(eta_i) - c) subject to sum m_i eta_i = eta_0 and
/// sum m_i <= mass_cap, with eta_0 itself among the atoms.
inline std::pair<Decomposition, double> search_restart(const Integrand& f, double c, int n, int k,
                                                       const SearchOptions& opt, int r) {
  Rng rng(restart_seed(opt.seed, r));
  GrassmannPoint eta0 = random_grassmann_point(n, k, rng);
  std::vector<GrassmannPoint> pts{eta0};
  for (int i = 0; i < opt.atoms; ++i) pts.push_back(random_grassmann_point(n, k, rng));
  LinearProgram<double> lp;
  std::size_t rows = eta0.vec().size();
  lp.a_eq.assign(rows, std::vector<double>(pts.size()));
  lp.a_le.assign(1, std::vector<double>(pts.size(), 1.0));
  lp.b_le = {opt.mass_cap};
  for (std::size_t j = 0; j < pts.size(); ++j) {
    lp.cost.push_back(f(pts[j]) - c);
    for (std::size_t t = 0; t < rows; ++t) lp.a_eq[t][j] = pts[j].vec()[t];
  }
  lp.b_eq = eta0.vec().coords();
  auto sol = solve_lp(lp);
  Decomposition dec{eta0, {}};
  if (sol.status != LpStatus::optimal) {
    dec.atoms.push_back({1.0, Rational(1), eta0});
    return {dec, 0.0};
  }
  for (std::size_t j = 0; j < sol.x.size(); ++j)
    if (sol.x[j] > 1e-14) dec.atoms.push_back({sol.x[j], std::nullopt, pts[j]});
  if (dec.atoms.empty()) dec.atoms.push_back({1.0, Rational(1), eta0});
  double margin = sol.objective - f(eta0) + c;
  return {dec, margin};
}

inline SearchResult search_upc_violation(const Integrand& f, double c, int n, int k, const SearchOptions& opt = {}) {
  if (opt.restarts <= 0 || opt.atoms <= 0) throw ArgumentError("search budget must be positive");
  if (!(opt.mass_cap > 1.0)) throw ArgumentError("mass cap must exceed 1");
  if (n != f.n() || k != f.k()) throw ArgumentError("search (n, k) differs from the integrand");
  std::vector<std::pair<Decomposition, double>> runs(opt.restarts);
  parallel_for(runs.size(), [&](std::size_t r) { runs[r] = search_restart(f, c, n, k, opt, static_cast<int>(r)); });
  SearchResult res;
  for (int r = 0; r < opt.restarts; ++r) {
    res.restart_margins.push_back(runs[r].second);
    if (res.best_restart < 0 || runs[r].second < runs[res.best_restart].second) res.best_restart = r;
  }
  res.best = runs[res.best_restart].first;
  res.verdict = certify_upc_instance(f, c, res.best);
  res.violation = !res.verdict.holds;
  return res;
}

}  // namespace gaugeforge
