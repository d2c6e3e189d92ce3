#pragma once

#include <string>

#include <boost/rational.hpp>

namespace modspace {

// Compare Rational only against Rational: with C++20 rewritten comparisons,
// boost 1.74 recurses forever on rational == integer.
using Rational = boost::rational<long long>;

/// Lebesgue exponent in [1, inf], stored by its reciprocal so that inf is exact.
class Exponent {
 public:
  static Exponent of(Rational p);
  static Exponent of(long long p) { return of(Rational(p)); }
  static Exponent infinity() { return Exponent(Rational(0)); }
  static Exponent from_reciprocal(Rational inv);

  Rational reciprocal() const { return inv_; }
  bool is_infinite() const { return inv_.numerator() == 0; }
  /// Throws for inf.
  Rational value() const;
  double as_double() const;
  /// Hoelder conjugate p' with 1/p + 1/p' = 1.
  Exponent conjugate() const { return Exponent(Rational(1) - inv_); }

  friend bool operator==(const Exponent& a, const Exponent& b) { return a.inv_ == b.inv_; }

 private:
  explicit Exponent(Rational inv) : inv_(inv) {}
  Rational inv_;
};

std::string to_string(const Rational& r);
double to_double(const Rational& r);

/// delta(p, r, q, alpha) = alpha - 4/r - 1/p + 1/q.
Rational delta_exponent(Exponent p, Exponent r, Exponent q, Rational alpha);
/// tau(p, r, p1, r1, alpha) = alpha - 4 - 4/r - 1/p + 4/r1 + 1/p1.
Rational tau_exponent(Exponent p, Exponent r, Exponent p1, Exponent r1, Rational alpha);

/// Floating-point versions; exponents may be +inf.
struct ScalingExponents {
  double delta;
  double tau;
};
ScalingExponents scaling_exponents(double p, double r, double q, double p1, double r1, double alpha);

/// A(p) = 3(p - 4) / (2(3p + 2)), B(p) = 2(p - 4) / (3p + 2).
Rational strichartz_a(Rational p);
Rational strichartz_b(Rational p);

/// The exponent pairs of the band-localised estimates for the fourth-order flow.
struct StrichartzExponents {
  Exponent px, rt;            // (p + 2/3, 3p + 2)
  Exponent deriv_px, deriv_rt;  // (3p + 2, (3p + 2)/(p + 1))
  Exponent dual_px, dual_rt;    // ((3p + 2)', ((3p + 2)/(p + 1))') = ((3p+2)/(3p+1), (3p+2)/(2p+1))
};
StrichartzExponents strichartz_exponents(Rational p);

}  // namespace modspace
