#include "modspace/exponents.hpp"

#include <cmath>
#include <limits>

#include "modspace/types.hpp"

namespace modspace {

Exponent Exponent::of(Rational p) {
  if (p < 1) throw InvalidArgument("Lebesgue exponent must be >= 1");
  return Exponent(Rational(1) / p);
}

Exponent Exponent::from_reciprocal(Rational inv) {
  if (inv < 0 || inv > 1) throw InvalidArgument("reciprocal exponent must lie in [0, 1]");
  return Exponent(inv);
}

Rational Exponent::value() const {
  if (is_infinite()) throw InvalidArgument("exponent is infinite");
  return Rational(1) / inv_;
}

double Exponent::as_double() const {
  return is_infinite() ? std::numeric_limits<double>::infinity() : 1.0 / to_double(inv_);
}

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

double to_double(const Rational& r) { return boost::rational_cast<double>(r); }

Rational delta_exponent(Exponent p, Exponent r, Exponent q, Rational alpha) {
  return alpha - 4 * r.reciprocal() - p.reciprocal() + q.reciprocal();
}

Rational tau_exponent(Exponent p, Exponent r, Exponent p1, Exponent r1, Rational alpha) {
  return alpha - 4 - 4 * r.reciprocal() - p.reciprocal() + 4 * r1.reciprocal() + p1.reciprocal();
}

ScalingExponents scaling_exponents(double p, double r, double q, double p1, double r1, double alpha) {
  for (double e : {p, r, q, p1, r1})
    if (!(e > 0.0)) throw InvalidArgument("exponents must be positive");
  auto inv = [](double e) { return std::isinf(e) ? 0.0 : 1.0 / e; };
  return {alpha - 4.0 * inv(r) - inv(p) + inv(q), alpha - 4.0 - 4.0 * inv(r) - inv(p) + 4.0 * inv(r1) + inv(p1)};
}

Rational strichartz_a(Rational p) { return Rational(3) * (p - 4) / (Rational(2) * (3 * p + 2)); }

Rational strichartz_b(Rational p) { return Rational(2) * (p - 4) / (3 * p + 2); }

StrichartzExponents strichartz_exponents(Rational p) {
  if (p < 4) throw InvalidArgument("Strichartz exponents need p >= 4");
  const Rational s = 3 * p + 2;
  StrichartzExponents e{Exponent::of(p + Rational(2, 3)), Exponent::of(s),   Exponent::of(s),
                        Exponent::of(s / (p + 1)),        Exponent::infinity(), Exponent::infinity()};
  e.dual_px = e.deriv_px.conjugate();
  e.dual_rt = e.deriv_rt.conjugate();
  return e;
}

}  // namespace modspace
