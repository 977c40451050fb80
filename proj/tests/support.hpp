#pragma once

// Random generators shared by the unit and acceptance tests.

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <random>
#include <vector>

#include "gaugeforge/chains.hpp"
#include "gaugeforge/exterior_algebra.hpp"
#include "gaugeforge/integrands.hpp"
#include "gaugeforge/rational_grassmannian.hpp"

namespace gaugeforge::testing {

inline Rational random_rational(std::mt19937_64& rng, int span = 5, int max_den = 4) {
  std::uniform_int_distribution<int> num(-span, span), den(1, max_den);
  Rational q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

/// Roughly half of the coordinates nonzero.
inline KVectorQ random_kvector(int n, int k, std::mt19937_64& rng) {
  KVectorQ a(n, k);
  std::bernoulli_distribution keep(0.5);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (keep(rng)) a[i] = random_rational(rng);
  return a;
}

inline VectorQ random_vector(int n, std::mt19937_64& rng) {
  VectorQ v(n);
  for (auto& x : v) x = random_rational(rng);
  return v;
}

/// k random rational vectors that are linearly independent.
inline std::vector<VectorQ> random_frame(int n, int k, std::mt19937_64& rng) {
  while (true) {
    std::vector<VectorQ> f;
    for (int i = 0; i < k; ++i) f.push_back(random_vector(n, rng));
    if (k == 0 || !wedge_all<Rational>(n, f).is_zero()) return f;
  }
}

/// A nondegenerate rational k-simplex in R^n.
inline OrientedSimplex random_simplex(int n, int k, std::mt19937_64& rng) {
  while (true) {
    std::vector<PointQ> v;
    for (int i = 0; i <= k; ++i) v.push_back(random_vector(n, rng));
    try {
      return OrientedSimplex(v);
    } catch (const DegeneracyError&) {
    }
  }
}

/// A random chain of simplices with coefficients of either sign.
inline PolyhedralChain random_chain(int n, int k, int terms, std::mt19937_64& rng) {
  PolyhedralChain t(n, k);
  for (int i = 0; i < terms; ++i) {
    Rational a = random_rational(rng, 3, 3);
    if (sgn(a) == 0) a = 1;
    t.add(a, random_simplex(n, k, rng));
  }
  return t;
}

/// Reduced chain: positive coefficients on simplices placed in disjoint
/// unit-spaced boxes along e_1, so interiors never meet.
inline PolyhedralChain random_reduced_chain(int n, int k, int terms, std::mt19937_64& rng) {
  PolyhedralChain t(n, k);
  std::uniform_int_distribution<int> num(1, 6), den(1, 4), coord(0, 8);
  for (int i = 0; i < terms; ++i) {
    while (true) {
      std::vector<PointQ> v;
      for (int j = 0; j <= k; ++j) {
        PointQ p(n);
        for (auto& x : p) x = Rational(coord(rng), 8);
        p[0] += 2 * i;
        v.push_back(std::move(p));
      }
      try {
        Rational a(num(rng), den(rng));
        a.canonicalize();
        t.add(a, OrientedSimplex(v));
        break;
      } catch (const DegeneracyError&) {
      }
    }
  }
  return t;
}

/// Independent oracle for Conv_F: the cheapest decomposition of xi using at
/// most three of the given atoms, by enumerating every subset of size <= 3
/// and solving its least-squares system. Infinity when none reproduces xi.
inline double brute_force_three_atoms(const Integrand& f, const std::vector<GrassmannPoint>& atoms, const KVectorD& xi) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t m = atoms.size();
  std::vector<double> cost(m);
  for (std::size_t i = 0; i < m; ++i) cost[i] = f(atoms[i]);
  auto try_subset = [&](const std::vector<std::size_t>& s) {
    std::size_t d = s.size();
    Eigen::MatrixXd a(xi.size(), d);
    Eigen::VectorXd b(xi.size());
    for (std::size_t r = 0; r < xi.size(); ++r) {
      b(r) = xi[r];
      for (std::size_t j = 0; j < d; ++j) a(r, j) = atoms[s[j]].vec()[r];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < static_cast<int>(d)) return;
    Eigen::VectorXd x = qr.solve(b);
    if ((a * x - b).norm() > 1e-9) return;
    double v = 0;
    for (std::size_t j = 0; j < d; ++j) {
      if (x(j) < -1e-12) return;
      v += std::max(0.0, x(j)) * cost[s[j]];
    }
    best = std::min(best, v);
  };
  for (std::size_t i = 0; i < m; ++i) {
    try_subset({i});
    for (std::size_t j = i + 1; j < m; ++j) {
      try_subset({i, j});
      for (std::size_t l = j + 1; l < m; ++l) try_subset({i, j, l});
    }
  }
  return best;
}

}  // namespace gaugeforge::testing
