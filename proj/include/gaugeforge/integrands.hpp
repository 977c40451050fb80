#pragma once

// Geometric integrands on the oriented Grassmannian, Grassmannian samples,
// the convex positively homogeneous hull Conv_F as a sampled LP, and the
// homogenization counterexample.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gaugeforge/exterior_algebra.hpp"
#include "gaugeforge/lp.hpp"
#include "gaugeforge/parallel.hpp"

namespace gaugeforge {

inline constexpr double kIntegrandFloor = 1e-9;
inline constexpr double kPolyconvexTolerance = 1e-6;
inline constexpr double kSupSafetyFactor = 1.05;

enum class IntegrandKind { area, linear_dip, tabulated, composite };

inline const char* to_string(IntegrandKind k) {
  switch (k) {
    case IntegrandKind::area: return "area";
    case IntegrandKind::linear_dip: return "linear_dip";
    case IntegrandKind::tabulated: return "tabulated";
    case IntegrandKind::composite: return "composite";
  }
  return "?";
}

struct TableEntry {
  GrassmannPoint point;
  double value = 0.0;
};

class Integrand {
 public:
  struct Part;

  static Integrand area(int n, int k) {
    check_degree(n, k);
    Integrand f(IntegrandKind::area, n, k);
    f.lip_ = 0.0;
    f.sup_ = 1.0;
    return f;
  }

  /// 1 + a (1 - |xi . omega|); a > -1 keeps it positive.
  static Integrand linear_dip(double a, GrassmannPoint omega) {
    if (!(a > -1.0) || !std::isfinite(a)) throw ArgumentError("linear_dip needs a > -1");
    Integrand f(IntegrandKind::linear_dip, omega.n(), omega.k());
    f.params_["a"] = a;
    f.omega_ = std::move(omega);
    f.lip_ = std::fabs(a);
    f.sup_ = std::max(1.0, 1.0 + a);
    return f;
  }

  /// Values at table points, extended to the Grassmannian by
  /// min_j (v_j + L |xi - eta_j|). Values below `floor` are clipped.
  static Integrand tabulated(std::vector<TableEntry> table, std::optional<double> lip = std::nullopt,
                             double floor = kIntegrandFloor) {
    if (table.empty()) throw ArgumentError("tabulated integrand needs at least one atom");
    Integrand f(IntegrandKind::tabulated, table[0].point.n(), table[0].point.k());
    for (auto& e : table) {
      if (e.point.n() != f.n_ || e.point.k() != f.k_) throw ArgumentError("table atoms of mixed (n, k)");
      if (!std::isfinite(e.value)) throw IntegrandValidityError("tabulated value is not finite");
      if (e.value < floor) {
        e.value = floor;
        ++f.clipped_;
      }
    }
    f.params_["floor"] = floor;
    f.table_ = std::move(table);
    double sup = 0.0;
    for (const auto& e : f.table_) sup = std::max(sup, e.value);
    f.sup_ = sup;
    if (lip) {
      if (!(*lip >= 0.0)) throw ArgumentError("Lipschitz constant must be nonnegative");
      f.lip_ = lip;
    } else if (f.table_.size() >= 2) {
      double est = 0.0;
      for (std::size_t i = 0; i < f.table_.size(); ++i)
        for (std::size_t j = i + 1; j < f.table_.size(); ++j) {
          double d = distance(f.table_[i].point.vec(), f.table_[j].point.vec());
          if (d > 0) est = std::max(est, std::fabs(f.table_[i].value - f.table_[j].value) / d);
        }
      f.lip_ = est;
      f.lip_estimated_ = true;
    }
    return f;
  }

  static Integrand composite(std::vector<Part> parts);

  IntegrandKind kind() const { return kind_; }
  int n() const { return n_; }
  int k() const { return k_; }
  const std::map<std::string, double>& params() const { return params_; }
  const std::optional<GrassmannPoint>& omega() const { return omega_; }
  const std::vector<TableEntry>& table() const { return table_; }
  const std::vector<Part>& parts() const { return parts_; }
  std::optional<double> lip() const { return lip_; }
  bool lip_estimated() const { return lip_estimated_; }
  std::optional<double> declared_sup() const { return sup_; }
  int clipped_count() const { return clipped_; }

  void set_lip(double lip) {
    if (!(lip >= 0.0)) throw ArgumentError("Lipschitz constant must be nonnegative");
    lip_ = lip;
    lip_estimated_ = false;
  }
  void set_sup(double sup) {
    if (!(sup > 0.0)) throw ArgumentError("sup must be positive");
    sup_ = sup;
  }

  double operator()(const GrassmannPoint& xi) const { return (*this)(xi.vec()); }

  double operator()(const KVectorD& xi) const {
    if (xi.n() != n_ || xi.k() != k_) throw ArgumentError("integrand evaluated at a k-vector of wrong (n, k)");
    double v = raw(xi);
    if (!(v > 0.0) || !std::isfinite(v))
      throw IntegrandValidityError("integrand value " + format_double(v) + " is not positive");
    return v;
  }

  /// F evaluated in rationals, when the integrand and the point allow it.
  std::optional<Rational> exact_value(const KVectorQ& xi) const;

 private:
  Integrand(IntegrandKind kind, int n, int k) : kind_(kind), n_(n), k_(k) {}

  double raw(const KVectorD& xi) const;

  IntegrandKind kind_ = IntegrandKind::area;
  int n_ = 0, k_ = 0;
  std::map<std::string, double> params_;
  std::optional<GrassmannPoint> omega_;
  std::vector<TableEntry> table_;
  std::vector<Part> parts_;
  std::optional<double> lip_;
  bool lip_estimated_ = false;
  std::optional<double> sup_;
  int clipped_ = 0;
};

struct Integrand::Part {
  double weight;
  Integrand integrand;
};

inline Integrand Integrand::composite(std::vector<Part> parts) {
  if (parts.empty()) throw ArgumentError("composite integrand needs at least one part");
  Integrand f(IntegrandKind::composite, parts[0].integrand.n(), parts[0].integrand.k());
  double lip = 0.0, sup = 0.0;
  bool lip_known = true, sup_known = true;
  for (const auto& p : parts) {
    if (!(p.weight > 0.0)) throw ArgumentError("composite weights must be positive");
    if (p.integrand.n() != f.n_ || p.integrand.k() != f.k_) throw ArgumentError("composite parts of mixed (n, k)");
    if (p.integrand.lip()) lip += p.weight * *p.integrand.lip();
    else lip_known = false;
    if (p.integrand.declared_sup()) sup += p.weight * *p.integrand.declared_sup();
    else sup_known = false;
    f.clipped_ += p.integrand.clipped_count();
    f.lip_estimated_ = f.lip_estimated_ || p.integrand.lip_estimated();
  }
  if (lip_known) f.lip_ = lip;
  if (sup_known) f.sup_ = sup;
  f.parts_ = std::move(parts);
  return f;
}

inline double Integrand::raw(const KVectorD& xi) const {
  switch (kind_) {
    case IntegrandKind::area: return 1.0;
    case IntegrandKind::linear_dip: {
      double a = params_.at("a");
      return 1.0 + a * (1.0 - std::fabs(inner(xi, omega_->vec())));
    }
    case IntegrandKind::tabulated: {
      double lip = lip_.value_or(0.0);
      double best = std::numeric_limits<double>::infinity();
      for (const auto& e : table_) best = std::min(best, e.value + lip * distance(xi, e.point.vec()));
      return best;
    }
    case IntegrandKind::composite: {
      double s = 0.0;
      for (const auto& p : parts_) s += p.weight * p.integrand(xi);
      return s;
    }
  }
  return 0.0;
}

inline std::optional<Rational> Integrand::exact_value(const KVectorQ& xi) const {
  switch (kind_) {
    case IntegrandKind::area: return Rational(1);
    case IntegrandKind::linear_dip: {
      if (!omega_->exact()) return std::nullopt;
      Rational a = exact_rational(params_.at("a"));
      return Rational(1 + a * (1 - abs(inner(xi, *omega_->exact()))));
    }
    case IntegrandKind::tabulated: {
      for (const auto& e : table_)
        if (e.point.exact() && *e.point.exact() == xi) return exact_rational(e.value);
      return std::nullopt;
    }
    case IntegrandKind::composite: {
      Rational s = 0;
      for (const auto& p : parts_) {
        auto v = p.integrand.exact_value(xi);
        if (!v) return std::nullopt;
        s += exact_rational(p.weight) * *v;
      }
      return s;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Samples

enum class SampleScheme { uniform_frame, antipodal_closed, explicit_points };

inline const char* to_string(SampleScheme s) {
  switch (s) {
    case SampleScheme::uniform_frame: return "uniform-frame";
    case SampleScheme::antipodal_closed: return "antipodal-closed";
    case SampleScheme::explicit_points: return "explicit";
  }
  return "?";
}

using Rng = std::mt19937_64;

/// Wedge of an orthonormalized Gaussian n x k frame.
inline GrassmannPoint random_grassmann_point(int n, int k, Rng& rng) {
  check_degree(n, k);
  if (k == 0) return GrassmannPoint(KVectorD::scalar(n, 1.0));
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (true) {
    std::vector<std::vector<double>> frame(k, std::vector<double>(n));
    for (auto& v : frame)
      for (auto& x : v) x = gauss(rng);
    auto w = wedge_all<double>(n, frame);
    if (norm(w) < 1e-8) continue;
    auto q = orthonormalize(frame);
    auto u = wedge_all<double>(n, q);
    if (inner(u, w) < 0) u = -u;
    return GrassmannPoint::normalized(std::move(u));
  }
}

struct GrassmannSample {
  int n = 0, k = 0;
  std::vector<GrassmannPoint> points;
  std::uint64_t seed = 0;
  SampleScheme scheme = SampleScheme::explicit_points;

  std::size_t size() const { return points.size(); }

  static GrassmannSample uniform(int n, int k, std::size_t count, std::uint64_t seed) {
    GrassmannSample s{n, k, {}, seed, SampleScheme::uniform_frame};
    Rng rng(seed);
    for (std::size_t i = 0; i < count; ++i) s.points.push_back(random_grassmann_point(n, k, rng));
    return s;
  }

  /// `count` random points followed by their antipodes. Samples drawn with
  /// the same seed are nested: a smaller count is a subset of a larger one.
  static GrassmannSample antipodal(int n, int k, std::size_t count, std::uint64_t seed) {
    GrassmannSample s = uniform(n, k, count, seed);
    s.scheme = SampleScheme::antipodal_closed;
    for (std::size_t i = 0; i < count; ++i) s.points.push_back(-s.points[i]);
    return s;
  }

  static GrassmannSample from_points(std::vector<GrassmannPoint> pts) {
    if (pts.empty()) throw ArgumentError("explicit sample must be nonempty");
    GrassmannSample s{pts[0].n(), pts[0].k(), std::move(pts), 0, SampleScheme::explicit_points};
    for (const auto& p : s.points)
      if (p.n() != s.n || p.k() != s.k) throw ArgumentError("sample points of mixed (n, k)");
    return s;
  }

  /// Appends -xi for every xi lacking its antipode.
  void close_antipodally() {
    std::size_t m = points.size();
    for (std::size_t i = 0; i < m; ++i) {
      auto neg = -points[i];
      bool present = false;
      for (const auto& q : points)
        if (distance(q.vec(), neg.vec()) <= 1e-14) present = true;
      if (!present) points.push_back(neg);
    }
    scheme = SampleScheme::antipodal_closed;
  }
};

/// Largest distance from a probe point to its nearest sample point, over
/// the probe set: an estimate of the covering radius.
inline double covering_radius(const GrassmannSample& sample, const std::vector<GrassmannPoint>& probes) {
  double r = 0.0;
  for (const auto& p : probes) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : sample.points) best = std::min(best, distance(p.vec(), q.vec()));
    r = std::max(r, best);
  }
  return r;
}

inline double sampled_sup(const Integrand& f, const GrassmannSample& sample) {
  double m = 0.0;
  for (const auto& p : sample.points) m = std::max(m, f(p));
  return m;
}

/// sup F: the declared value, else the sampled maximum times 1.05.
inline double sup_bound(const Integrand& f, const GrassmannSample& sample) {
  if (f.declared_sup()) return *f.declared_sup();
  return kSupSafetyFactor * sampled_sup(f, sample);
}

/// Largest |F(x) - F(y)| / |x - y| over consecutive pairs of the sample.
inline double sampled_lipschitz_ratio(const Integrand& f, const GrassmannSample& sample) {
  double r = 0.0;
  for (std::size_t i = 0; i + 1 < sample.size(); ++i) {
    double d = distance(sample.points[i].vec(), sample.points[i + 1].vec());
    if (d > 0) r = std::max(r, std::fabs(f(sample.points[i]) - f(sample.points[i + 1])) / d);
  }
  return r;
}

/// min_y F(y) + L |x - y| over the sample: a real-valued L-Lipschitz
/// extension of F to the whole space of k-vectors.
inline double lipschitz_extension(const Integrand& f, const KVectorD& x, const GrassmannSample& sample) {
  if (!f.lip()) throw ConfigurationError("lipschitz_extension needs a Lipschitz constant");
  if (sample.points.empty()) throw ArgumentError("empty sample");
  double lip = *f.lip();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& y : sample.points) best = std::min(best, f(y) + lip * distance(x, y.vec()));
  return best;
}

// ---------------------------------------------------------------------------
// Conv_F

template <class S>
struct HullResult {
  S value{0};
  std::vector<std::pair<std::size_t, S>> support;  // (sample index, mass)
  int lp_iterations = 0;
  S total_mass() const {
    S s(0);
    for (const auto& [i, m] : support) s += m;
    return s;
  }
};

/// min sum m_i c_i subject to sum m_i a_i = target, m >= 0.
template <class S>
HullResult<S> solve_hull(const std::vector<S>& costs, const std::vector<const std::vector<S>*>& atoms,
                         const std::vector<S>& target) {
  std::size_t rows = target.size();
  LinearProgram<S> lp;
  lp.cost = costs;
  lp.a_eq.assign(rows, std::vector<S>(atoms.size(), S(0)));
  for (std::size_t j = 0; j < atoms.size(); ++j)
    for (std::size_t r = 0; r < rows; ++r) lp.a_eq[r][j] = (*atoms[j])[r];
  lp.b_eq = target;
  auto sol = solve_lp(lp);
  if (sol.status == LpStatus::infeasible)
    throw FeasibilityError("target is not in the cone of the sample (sample too sparse)");
  if (sol.status != LpStatus::optimal)
    throw InternalConsistencyError(std::string("hull LP ended with status ") + to_string(sol.status));
  HullResult<S> h;
  h.value = sol.objective;
  h.lp_iterations = sol.iterations;
  for (std::size_t j = 0; j < sol.x.size(); ++j)
    if (!ScalarTraits<S>::is_zero(sol.x[j])) h.support.emplace_back(j, sol.x[j]);
  return h;
}

inline HullResult<double> conv_hull_value(const std::vector<double>& values, const GrassmannSample& sample,
                                          const KVectorD& xi) {
  if (sample.points.empty()) throw ArgumentError("empty sample");
  if (xi.n() != sample.n || xi.k() != sample.k) throw ArgumentError("hull target of wrong (n, k)");
  std::vector<const std::vector<double>*> atoms;
  for (const auto& p : sample.points) atoms.push_back(&p.vec().coords());
  return solve_hull(values, atoms, xi.coords());
}

inline std::vector<double> evaluate_sample(const Integrand& f, const GrassmannSample& sample) {
  std::vector<double> v(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) v[i] = f(sample.points[i]);
  return v;
}

inline HullResult<double> conv_hull_value(const Integrand& f, const KVectorD& xi, const GrassmannSample& sample) {
  return conv_hull_value(evaluate_sample(f, sample), sample, xi);
}

/// Exact hull LP when every sample point and F are rational.
inline HullResult<Rational> conv_hull_value_exact(const Integrand& f, const KVectorQ& xi,
                                                  const GrassmannSample& sample) {
  std::vector<Rational> costs;
  std::vector<const std::vector<Rational>*> atoms;
  for (const auto& p : sample.points) {
    if (!p.exact()) throw ArgumentError("exact hull needs rational sample points");
    auto v = f.exact_value(*p.exact());
    if (!v) throw ArgumentError("integrand has no exact value at a sample point");
    costs.push_back(*v);
    atoms.push_back(&p.exact()->coords());
  }
  return solve_hull(costs, atoms, xi.coords());
}

struct PolyconvexReport {
  double max_gap = -std::numeric_limits<double>::infinity();
  double max_relative_gap = -std::numeric_limits<double>::infinity();
  std::size_t witness = 0;  // index into the tested points
  KVectorD witness_point;
  double witness_value = 0.0;
  HullResult<double> witness_decomposition;
  double tol = kPolyconvexTolerance;
  std::size_t tested = 0;
  bool violation = false;
};

/// gap(xi) = F(xi) - Conv_F(xi) over the tested points (default: the
/// sample itself). A gap above tol * F(xi) is a polyconvexity violation.
inline PolyconvexReport is_polyconvex_report(const Integrand& f, const GrassmannSample& sample,
                                             double tol = kPolyconvexTolerance,
                                             const std::vector<GrassmannPoint>* tested = nullptr) {
  const auto& pts = tested ? *tested : sample.points;
  auto values = evaluate_sample(f, sample);
  std::vector<HullResult<double>> hulls(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { hulls[i] = conv_hull_value(values, sample, pts[i].vec()); });
  PolyconvexReport rep;
  rep.tol = tol;
  rep.tested = pts.size();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double fx = f(pts[i]);
    double gap = fx - hulls[i].value;
    if (gap > rep.max_gap) {
      rep.max_gap = gap;
      rep.max_relative_gap = gap / fx;
      rep.witness = i;
      rep.witness_point = pts[i].vec();
      rep.witness_value = fx;
      rep.witness_decomposition = hulls[i];
    }
    if (gap > tol * fx) rep.violation = true;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Homogenization of a convex function need not be convex.

struct NonconvexityCheck {
  double r = 0, p = 0;
  double closed_form = 0;
  double finite_difference = 0;
  double relative_error = 0;
  double step = 0;
  bool negative = false;
};

/// h(x) = |x - r e|^p on the unit sphere, homogenized to f(y) = |y| h(y/|y|);
/// returns D^2 f(-e) u u for a unit u perpendicular to e.
inline NonconvexityCheck homogenization_nonconvexity_check(double r, double p, const GrassmannPoint& e) {
  if (!(r > 1.0) || !std::isfinite(r)) throw ArgumentError("need r > 1");
  double threshold = (1 + r) * (1 + r) / r;
  if (!(p >= threshold * (1 - 1e-12)) || !std::isfinite(p)) throw ArgumentError("need p > (1+r)^2/r");
  const auto& ev = e.vec().coords();
  std::size_t dim = ev.size();
  if (dim < 2) throw ArgumentError("need an ambient space of dimension at least 2");

  // u: the first basis vector with a usable component orthogonal to e.
  std::vector<double> u(dim, 0.0);
  for (std::size_t j = 0; j < dim; ++j) {
    std::vector<double> v(dim, 0.0);
    v[j] = 1.0;
    double c = ev[j];
    for (std::size_t t = 0; t < dim; ++t) v[t] -= c * ev[t];
    double len = std::sqrt(dot(v, v));
    if (len > 0.5) {
      for (std::size_t t = 0; t < dim; ++t) u[t] = v[t] / len;
      break;
    }
  }

  auto f = [&](const std::vector<double>& y) {
    double ny = std::sqrt(dot(y, y));
    double s = 0.0;
    for (std::size_t t = 0; t < dim; ++t) {
      double d = y[t] / ny - r * ev[t];
      s += d * d;
    }
    return ny * std::pow(std::sqrt(s), p);
  };
  auto along = [&](double s) {
    std::vector<double> y(dim);
    for (std::size_t t = 0; t < dim; ++t) y[t] = -ev[t] + s * u[t];
    return f(y);
  };
  auto second = [&](double h) { return (along(h) - 2 * along(0) + along(-h)) / (h * h); };

  NonconvexityCheck out;
  out.r = r;
  out.p = p;
  out.closed_form = std::pow(1 + r, p - 2) * (-p * r + (1 + r) * (1 + r));
  // Richardson extrapolation of the central difference.
  double h = 1e-3;
  out.step = h;
  out.finite_difference = (4 * second(h / 2) - second(h)) / 3;
  double scale = std::max(std::fabs(out.closed_form), std::pow(1 + r, p - 2) * 1e-6);
  out.relative_error = std::fabs(out.finite_difference - out.closed_form) / scale;
  out.negative = out.closed_form < 0;
  return out;
}

}  // namespace gaugeforge
