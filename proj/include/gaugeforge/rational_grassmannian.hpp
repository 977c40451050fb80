#pragma once

// Rational simple k-vectors: exact Gram-Schmidt, approximation of real
// Grassmannian points by rational ones, and witnesses of rational slope.

#include <cmath>
#include <optional>
#include <vector>

#include "gaugeforge/exterior_algebra.hpp"

namespace gaugeforge {

using VectorQ = std::vector<Rational>;

/// factors[0] ^ ... ^ factors[k-1] with rational factors.
class RationalSimpleVector {
 public:
  RationalSimpleVector() = default;
  RationalSimpleVector(int n, std::vector<VectorQ> factors)
      : factors_(std::move(factors)), vec_(wedge_all<Rational>(n, factors_)) {
    if (vec_.is_zero()) throw DegeneracyError("rational factors are linearly dependent");
  }

  const std::vector<VectorQ>& factors() const { return factors_; }
  const KVectorQ& vec() const { return vec_; }
  int n() const { return vec_.n(); }
  int k() const { return vec_.k(); }

  RationalSimpleVector scaled(const Rational& c) const {
    if (sgn(c) == 0) throw ArgumentError("scaling by zero");
    auto f = factors_;
    if (f.empty()) throw ArgumentError("cannot scale a 0-vector through its factors");
    for (auto& x : f[0]) x *= c;
    return RationalSimpleVector(n(), std::move(f));
  }

 private:
  std::vector<VectorQ> factors_;
  KVectorQ vec_;
};

/// y_1 = w_1, y_j = w_j - sum_{i<j} (w_j . y_i) / |y_i|^2 y_i.
inline std::vector<VectorQ> gram_schmidt_rational(const std::vector<VectorQ>& w) {
  std::vector<VectorQ> y;
  std::vector<Rational> sq;
  for (const auto& wj : w) {
    VectorQ v = wj;
    for (std::size_t i = 0; i < y.size(); ++i) {
      Rational c = dot(wj, y[i]) / sq[i];
      for (std::size_t t = 0; t < v.size(); ++t) v[t] -= c * y[i][t];
    }
    Rational s = dot(v, v);
    if (sgn(s) == 0) throw DegeneracyError("Gram-Schmidt input is linearly dependent");
    y.push_back(std::move(v));
    sq.push_back(s);
  }
  return y;
}

/// Rational basis of asssp a, scaled so its wedge equals a exactly.
inline RationalSimpleVector factor_simple(const KVectorQ& a) {
  int n = a.n(), k = a.k();
  if (a.is_zero()) throw ArgumentError("zero k-vector has no factorization");
  auto basis = associated_space(a);
  if (static_cast<int>(basis.size()) != k) throw DegeneracyError("k-vector is not simple");
  if (k == 0) throw ArgumentError("0-vectors have no factors");
  KVectorQ w = wedge_all<Rational>(n, basis);
  std::size_t r = 0;
  while (sgn(w[r]) == 0) ++r;
  Rational c = a[r] / w[r];
  for (auto& x : basis[0]) x *= c;
  RationalSimpleVector out(n, std::move(basis));
  if (!(out.vec() == a)) throw InternalConsistencyError("factorization does not reproduce input");
  return out;
}

inline Integer max_denominator(const KVectorQ& a) {
  Integer m = 1;
  for (const auto& x : a.coords())
    if (x.get_den() > m) m = x.get_den();
  return m;
}

/// If a is exactly simple, exactly unit and has a rational orthonormal
/// frame, that frame (oriented so its wedge is a).
inline std::optional<RationalSimpleVector> exact_orthonormal_factors(const KVectorQ& a) {
  if (a.k() == 0 || a.is_zero() || inner(a, a) != 1) return std::nullopt;
  if (!is_simple(a)) return std::nullopt;
  auto y = gram_schmidt_rational(factor_simple(a).factors());
  for (auto& v : y) {
    Rational len;
    if (!rational_sqrt(dot(v, v), len)) return std::nullopt;
    for (auto& x : v) x /= len;
  }
  RationalSimpleVector out(a.n(), std::move(y));
  if (!(out.vec() == a)) {
    auto f = out.factors();
    for (auto& x : f[0]) x = -x;
    out = RationalSimpleVector(a.n(), std::move(f));
  }
  if (!(out.vec() == a)) return std::nullopt;
  return out;
}

/// If a is exactly simple (e.g. e1 ^ e2), its exact factorization.
inline std::optional<RationalSimpleVector> exact_factors(const KVectorQ& a) {
  if (a.k() == 0 || a.is_zero() || !is_simple(a)) return std::nullopt;
  return factor_simple(a);
}

/// Factor-wise rounding of an orthonormal frame of eta: each coordinate
/// is replaced by its best rational approximation with denominator at
/// most ceil(2^k / eps), tightening until |w_i - v_i| <= 2^-k eps and
/// |zeta - eta| < eps both hold.
inline RationalSimpleVector rational_simple_approx(const GrassmannPoint& eta, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("approximation tolerance must lie in (0, 1)");
  int n = eta.n(), k = eta.k();
  if (k == 0) throw ArgumentError("0-vectors are already rational (+-1)");
  double per_factor = std::ldexp(eps, -k);
  Integer den_bound(static_cast<unsigned long>(std::ceil(1.0 / per_factor)));
  KVectorQ as_rational = exact_rational(eta.vec());
  if (max_denominator(as_rational) <= den_bound)
    if (auto direct = exact_factors(as_rational)) return *direct;
  auto frame = orthonormal_frame(eta);
  for (int attempt = 0; attempt < 64; ++attempt, den_bound *= 4) {
    std::vector<VectorQ> w(k, VectorQ(n));
    bool factors_ok = true;
    for (int i = 0; i < k; ++i) {
      double err2 = 0.0;
      for (int t = 0; t < n; ++t) {
        w[i][t] = best_rational_approximation(exact_rational(frame[i][t]), den_bound);
        double d = w[i][t].get_d() - frame[i][t];
        err2 += d * d;
      }
      if (std::sqrt(err2) > per_factor) factors_ok = false;
    }
    if (!factors_ok) continue;
    RationalSimpleVector zeta(n, std::move(w));
    if (distance(to_double(zeta.vec()), eta.vec()) < eps) return zeta;
  }
  throw InternalConsistencyError("rational approximation did not converge");
}

/// A rational *unit* simple k-vector near eta: the first k columns of a
/// product of Householder reflections with integer normal vectors, so the
/// factors are exactly orthonormal and |zeta| = 1 holds in rationals.
inline RationalSimpleVector rational_unit_approx(const GrassmannPoint& eta, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("approximation tolerance must lie in (0, 1)");
  int n = eta.n(), k = eta.k();
  if (k == 0) throw ArgumentError("0-vectors are already rational (+-1)");
  int bits = static_cast<int>(std::ceil(std::log2(8.0 * k * std::sqrt(double(n)) / eps))) + 2;
  KVectorQ as_rational = exact_rational(eta.vec());
  if (max_denominator(as_rational) <= Integer(1) << bits)
    if (auto direct = exact_orthonormal_factors(as_rational)) return *direct;
  if (eta.exact())
    if (auto direct = exact_orthonormal_factors(*eta.exact())) return *direct;
  auto frame = orthonormal_frame(eta);
  for (int attempt = 0; attempt < 24; ++attempt, bits += 6) {
    // work holds the frame as columns, updated by the (rounded) reflections.
    std::vector<std::vector<double>> work = frame;
    std::vector<std::vector<Integer>> normals;
    std::vector<int> signs;
    bool ok = true;
    for (int j = 0; j < k && ok; ++j) {
      double len2 = 0.0;
      for (int t = j; t < n; ++t) len2 += work[j][t] * work[j][t];
      double len = std::sqrt(len2);
      double alpha = work[j][j] >= 0 ? -len : len;
      std::vector<double> u(n, 0.0);
      for (int t = j; t < n; ++t) u[t] = work[j][t];
      u[j] -= alpha;
      std::vector<Integer> ui(n);
      double uu = 0.0;
      for (int t = 0; t < n; ++t) {
        ui[t] = Integer(std::nearbyint(std::ldexp(u[t], bits)));
        double back = ui[t].get_d();
        uu += back * back;
      }
      if (uu == 0.0) {
        ok = false;
        break;
      }
      for (int c = 0; c < k; ++c) {
        double proj = 0.0;
        for (int t = 0; t < n; ++t) proj += ui[t].get_d() * work[c][t];
        double f = 2.0 * proj / uu;
        for (int t = 0; t < n; ++t) work[c][t] -= f * ui[t].get_d();
      }
      signs.push_back(work[j][j] >= 0 ? 1 : -1);
      normals.push_back(std::move(ui));
    }
    if (!ok) continue;
    std::vector<VectorQ> w(k);
    for (int j = 0; j < k; ++j) {
      VectorQ x(n, Rational(0));
      x[j] = signs[j];
      for (int r = j; r >= 0; --r) {
        const auto& u = normals[r];
        Integer uu = 0;
        Rational ux = 0;
        for (int t = 0; t < n; ++t) {
          uu += u[t] * u[t];
          ux += Rational(u[t]) * x[t];
        }
        Rational f = 2 * ux / Rational(uu);
        for (int t = 0; t < n; ++t) x[t] -= f * Rational(u[t]);
      }
      w[j] = std::move(x);
    }
    RationalSimpleVector zeta(n, std::move(w));
    if (inner(zeta.vec(), zeta.vec()) != 1) throw InternalConsistencyError("reflection frame is not unit");
    if (distance(to_double(zeta.vec()), eta.vec()) < eps) return zeta;
  }
  throw InternalConsistencyError("rational unit approximation did not converge");
}

/// Exact witness that zeta = t * xi_f with xi_f = *(f^*(u_1) ^ ... ^ f^*(u_{n-k}))
/// and f an integer matrix whose kernel is asssp zeta.
struct QnkWitness {
  std::vector<std::vector<Integer>> f;  // n-k rows, each f^*(u_j) in Z^n
  Rational t;
  RationalSimpleVector target;
  Integer scale_m;           // the common denominator M
  Rational orientation_s;   // y_1 ^ ... ^ y_n = s e_1 ^ ... ^ e_n
  bool residual_zero = false;       // zeta == t xi_f exactly
  bool closed_form_match = false;   // t^2 and sign(t) agree with the closed form
  bool kernel_match = false;        // ker f == span of the factors

  KVectorQ xi_f() const {
    int n = target.n();
    std::vector<VectorQ> rows;
    for (const auto& r : f) {
      VectorQ q;
      for (const auto& z : r) q.emplace_back(z);
      rows.push_back(std::move(q));
    }
    return hodge_star(wedge_all<Rational>(n, rows));
  }
};

/// Appends standard basis vectors until the list spans R^n (exact).
inline std::vector<VectorQ> extend_to_basis(const std::vector<VectorQ>& vs, int n) {
  std::vector<VectorQ> out = vs;
  for (int j = 0; j < n && static_cast<int>(out.size()) < n; ++j) {
    VectorQ e(n, Rational(0));
    e[j] = 1;
    auto trial = out;
    trial.push_back(e);
    if (rank(MatrixQ::from_rows(trial, n)) == static_cast<int>(trial.size())) out = std::move(trial);
  }
  if (static_cast<int>(out.size()) != n) throw DegeneracyError("vectors do not extend to a basis");
  return out;
}

inline QnkWitness qnk_witness(const RationalSimpleVector& zeta) {
  int n = zeta.n(), k = zeta.k();
  auto w = extend_to_basis(zeta.factors(), n);
  auto y = gram_schmidt_rational(w);
  Rational s = determinant(MatrixQ::from_rows(y, n));
  if (sgn(s) < 0 && k < n) {
    for (auto& x : w.back()) x = -x;
    y = gram_schmidt_rational(w);
    s = -s;
  }
  Integer m = 1;
  for (const auto& yi : y)
    for (const auto& x : yi) mpz_lcm(m.get_mpz_t(), m.get_mpz_t(), x.get_den_mpz_t());

  QnkWitness wit;
  wit.target = zeta;
  wit.scale_m = m;
  wit.orientation_s = s;
  for (int j = k; j < n; ++j) {
    std::vector<Integer> row(n);
    for (int t = 0; t < n; ++t) {
      Rational v = y[j][t] * Rational(m);
      if (v.get_den() != 1) throw InternalConsistencyError("scaled row is not integral");
      row[t] = v.get_num();
    }
    wit.f.push_back(std::move(row));
  }
  KVectorQ xi = wit.xi_f();
  std::size_t r = 0;
  while (r < xi.size() && sgn(xi[r]) == 0) ++r;
  if (r == xi.size()) throw InternalConsistencyError("xi_f vanished");
  wit.t = zeta.vec()[r] / xi[r];
  wit.residual_zero = (zeta.vec() - wit.t * xi).is_zero();

  // t = M^{k-n} (-1)^{k(n-k)} sgn(s) |y_1|...|y_k| / (|y_{k+1}|...|y_n|)
  Rational t2 = 1;
  for (int i = 0; i < n; ++i) {
    Rational sq = dot(y[i], y[i]);
    if (i < k) t2 *= sq;
    else t2 /= sq;
  }
  Integer mpow;
  mpz_pow_ui(mpow.get_mpz_t(), m.get_mpz_t(), 2ul * static_cast<unsigned long>(n - k));
  t2 /= Rational(mpow);
  int expected_sign = ((k * (n - k)) % 2 ? -1 : 1) * sgn(s);
  wit.closed_form_match = (wit.t * wit.t == t2) && (sgn(wit.t) == expected_sign);

  bool kernel = true;
  for (const auto& row : wit.f)
    for (const auto& fac : zeta.factors()) {
      Rational acc = 0;
      for (int t = 0; t < n; ++t) acc += Rational(row[t]) * fac[t];
      if (sgn(acc) != 0) kernel = false;
    }
  if (n > k) {
    std::vector<VectorQ> rows;
    for (const auto& row : wit.f) {
      VectorQ q;
      for (const auto& z : row) q.emplace_back(z);
      rows.push_back(std::move(q));
    }
    kernel = kernel && rank(MatrixQ::from_rows(rows, n)) == n - k;
  }
  wit.kernel_match = kernel;
  return wit;
}

/// Integer f with ker f = span(plane) exactly.
inline QnkWitness has_rational_slope(const std::vector<VectorQ>& plane, int n) {
  for (const auto& v : plane)
    if (static_cast<int>(v.size()) != n) throw ArgumentError("plane vector length differs from n");
  if (rank(MatrixQ::from_rows(plane, n)) != static_cast<int>(plane.size()))
    throw DegeneracyError("plane spanning vectors are dependent");
  return qnk_witness(RationalSimpleVector(n, plane));
}

}  // namespace gaugeforge
