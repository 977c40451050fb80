#pragma once

// Scalar kingdoms: exact rationals (GMP) and IEEE doubles. Conversion is
// explicit and goes rational -> double, except for `exact_rational(double)`
// which reproduces the binary value of a double without rounding.

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <string_view>

#include "gaugeforge/error.hpp"

namespace gaugeforge {

using Rational = mpq_class;
using Integer = mpz_class;

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static bool is_zero(double x) { return x == 0.0; }
  static double to_double(double x) { return x; }
};

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static bool is_zero(const Rational& x) { return sgn(x) == 0; }
  static double to_double(const Rational& x) { return x.get_d(); }
};

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.get_d(); }

/// The exact dyadic rational equal to `x`.
inline Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw ArgumentError("non-finite value has no rational form");
  Rational r(x);
  r.canonicalize();
  return r;
}

inline Rational abs_value(const Rational& x) { return abs(x); }
inline double abs_value(double x) { return std::fabs(x); }

inline int sign_of(const Rational& x) { return sgn(x); }
inline int sign_of(double x) { return (x > 0) - (x < 0); }

/// `p`, `p/q`, or a decimal literal with optional exponent, read exactly.
inline Rational parse_rational(std::string_view text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  if (s.empty()) throw ParseError("empty rational literal");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Rational r;
    Integer num, den;
    if (num.set_str(s.substr(0, slash), 10) != 0 ||
        den.set_str(s.substr(slash + 1), 10) != 0)
      throw ParseError("malformed rational literal '" + s + "'");
    if (den == 0) throw ParseError("zero denominator in '" + s + "'");
    r = Rational(num, den);
    r.canonicalize();
    return r;
  }
  std::size_t pos = 0;
  bool negative = false;
  if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
  std::string digits;
  long exponent = 0;
  bool seen_digit = false, seen_point = false;
  for (; pos < s.size(); ++pos) {
    char ch = s[pos];
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      digits.push_back(ch);
      seen_digit = true;
      if (seen_point) --exponent;
    } else if (ch == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw ParseError("malformed number '" + s + "'");
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') throw ParseError("malformed number '" + s + "'");
    ++pos;
    std::size_t used = 0;
    long e = 0;
    try {
      e = std::stol(s.substr(pos), &used);
    } catch (...) {
      throw ParseError("malformed exponent in '" + s + "'");
    }
    if (pos + used != s.size()) throw ParseError("malformed number '" + s + "'");
    exponent += e;
  }
  Integer mant(digits, 10);
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
  Rational r = exponent >= 0 ? Rational(mant * scale) : Rational(mant, scale);
  r.canonicalize();
  return negative ? Rational(-r) : r;
}

inline double parse_double(std::string_view text) {
  std::string s(text);
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  while (end && *end && std::isspace(static_cast<unsigned char>(*end))) ++end;
  if (s.empty() || end == s.c_str() || (end && *end))
    throw ParseError("malformed decimal '" + s + "'");
  return v;
}

/// True when the literal carries no decimal point or exponent.
inline bool is_rational_literal(std::string_view text) {
  for (char ch : text)
    if (ch == '.' || ch == 'e' || ch == 'E') return false;
  return true;
}

inline std::string format_rational(const Rational& r) { return r.get_str(10); }

/// Shortest round-trip representation of a double.
inline std::string format_double(double x) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Closest rational with denominator at most `max_den` (continued
/// fraction convergents and the best semiconvergent).
inline Rational best_rational_approximation(const Rational& x, const Integer& max_den) {
  if (max_den < 1) throw ArgumentError("denominator bound must be positive");
  if (x.get_den() <= max_den) return x;
  Integer p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  Integer n = x.get_num(), d = x.get_den();
  while (true) {
    Integer a;
    mpz_fdiv_q(a.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
    Integer q2 = q0 + a * q1;
    if (q2 > max_den) break;
    Integer p2 = p0 + a * p1;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    Integer rem = n - a * d;
    n = d;
    d = rem;
    if (d == 0) break;
  }
  Integer kk;
  mpz_fdiv_q(kk.get_mpz_t(), Integer(max_den - q0).get_mpz_t(), q1.get_mpz_t());
  Rational bound1(p0 + kk * p1, q0 + kk * q1);
  Rational bound2(p1, q1);
  bound1.canonicalize();
  bound2.canonicalize();
  return abs(bound2 - x) <= abs(bound1 - x) ? bound2 : bound1;
}

inline bool is_perfect_square(const Integer& z) {
  return z >= 0 && mpz_perfect_square_p(z.get_mpz_t()) != 0;
}

/// If q is the square of a rational, returns its nonnegative root.
inline bool rational_sqrt(const Rational& q, Rational& root) {
  if (sgn(q) < 0) return false;
  if (!is_perfect_square(q.get_num()) || !is_perfect_square(q.get_den())) return false;
  Integer a, b;
  mpz_sqrt(a.get_mpz_t(), q.get_num_mpz_t());
  mpz_sqrt(b.get_mpz_t(), q.get_den_mpz_t());
  root = Rational(a, b);
  root.canonicalize();
  return true;
}

/// Exact value of the form sum_j r_j * sqrt(q_j) with q_j > 0 rational.
/// Radicands are reduced to integers with small square factors removed,
/// and a term whose radicand differs from an existing one by a rational
/// square joins it, so the stored radicands are pairwise independent and
/// equality is exact.
class SqrtSum {
 public:
  SqrtSum() = default;
  explicit SqrtSum(const Rational& r) { add(r, Rational(1)); }

  void add(const Rational& coeff, const Rational& radicand) {
    if (sgn(coeff) == 0) return;
    if (sgn(radicand) <= 0) throw ArgumentError("radicand must be positive");
    // sqrt(a/b) = sqrt(a b) / b, then pull out square factors p^2, p < 1000.
    Integer m = radicand.get_num() * radicand.get_den();
    Rational c = coeff / Rational(radicand.get_den());
    for (unsigned long p = 2; p < 1000 && m > 1; ++p) {
      Integer pp = p * p;
      while (mpz_divisible_p(m.get_mpz_t(), pp.get_mpz_t())) {
        m /= pp;
        c *= p;
      }
    }
    if (is_perfect_square(m)) {
      Integer root;
      mpz_sqrt(root.get_mpz_t(), m.get_mpz_t());
      c *= root;
      m = 1;
    }
    Rational q(m);
    for (const auto& [existing, value] : terms_) {
      Rational ratio_root;
      if (existing != q && rational_sqrt(q / existing, ratio_root)) {
        accumulate(c * ratio_root, existing);
        return;
      }
    }
    accumulate(c, q);
  }

  SqrtSum& operator+=(const SqrtSum& o) {
    for (const auto& [q, r] : o.terms_) add(r, q);
    return *this;
  }

  double to_double() const {
    double s = 0.0;
    for (const auto& [q, r] : terms_) s += r.get_d() * std::sqrt(q.get_d());
    return s;
  }

  bool is_rational() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == 1);
  }
  Rational rational_part() const {
    auto it = terms_.find(Rational(1));
    return it == terms_.end() ? Rational(0) : it->second;
  }
  const std::map<Rational, Rational>& terms() const { return terms_; }

  friend bool operator==(const SqrtSum& a, const SqrtSum& b) {
    SqrtSum d = a;
    for (const auto& [q, r] : b.terms_) d.add(-r, q);
    return d.terms_.empty();
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [q, r] : terms_) {
      if (!out.empty()) out += " + ";
      out += format_rational(r);
      if (q != 1) out += "*sqrt(" + format_rational(q) + ")";
    }
    return out;
  }

 private:
  void accumulate(const Rational& coeff, const Rational& radicand) {
    auto& slot = terms_[radicand];
    slot += coeff;
    if (sgn(slot) == 0) terms_.erase(radicand);
  }
  std::map<Rational, Rational> terms_;
};

}  // namespace gaugeforge
