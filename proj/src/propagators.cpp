#include "modspace/propagators.hpp"

#include <cmath>

namespace modspace {

double SymbolSpec::dispersion(double xi) const {
  const double x2 = xi * xi;
  return kind == SymbolKind::fourth_order_schrodinger ? x2 * x2 : x2 * xi;
}

Complex SymbolSpec::multiplier(double t, double xi) const {
  // t xi^4 reaches 1e8 on the grids in use; rounding the product in double
  // would cost ~1e-8 in the phase, so form and reduce it in long double.
  const long double x = xi;
  const long double x3 = x * x * x;
  const long double phase = static_cast<long double>(t) * (kind == SymbolKind::fourth_order_schrodinger ? x3 * x : x3);
  constexpr long double two_pi = 6.283185307179586476925286766559L;
  const double reduced = static_cast<double>(std::fmod(phase, two_pi));
  return std::polar(1.0, reduced);
}

std::string to_string(SymbolKind kind) {
  return kind == SymbolKind::fourth_order_schrodinger ? "fourth_order_schrodinger" : "airy";
}

SymbolKind symbol_from_string(const std::string& name) {
  if (name == "fourth_order_schrodinger" || name == "d4nls") return SymbolKind::fourth_order_schrodinger;
  if (name == "airy" || name == "gkdv") return SymbolKind::airy;
  throw InvalidArgument("unknown symbol '" + name + "'");
}

GridFunction propagate(const GridFunction& u0, double t, SymbolSpec symbol) {
  if (!std::isfinite(t)) throw InvalidArgument("propagation time must be finite");
  if (t == 0.0) return u0;
  return u0.apply_symbol([&](double xi) { return symbol.multiplier(t, xi); });
}

FlowTable::FlowTable(const GridSpec& spec, const TimeGrid& time, SymbolSpec symbol)
    : spec_(spec), time_(time), symbol_(symbol), phases_(spec.points(), time.frames()) {
  for (Index n = 0; n < time.frames(); ++n)
    for (Index m = 0; m < spec.points(); ++m) phases_(m, n) = symbol.multiplier(time.time(n), spec.frequency(m));
}

CMatrix FlowTable::free_coeffs(const CVector& u0) const {
  if (u0.size() != spec_.points()) throw InvalidArgument("datum does not match the flow grid");
  return phases_.array().colwise() * u0.array();
}

CMatrix FlowTable::duhamel_coeffs(const CMatrix& f) const {
  if (f.rows() != phases_.rows() || f.cols() != phases_.cols())
    throw InvalidArgument("forcing does not match the flow grid");
  const Index frames = f.cols();
  const double half = 0.5 * time_.dt();
  CMatrix out(f.rows(), frames);
  CVector acc = CVector::Zero(f.rows());
  CVector prev = phases_.col(0).conjugate().cwiseProduct(f.col(0));
  out.col(0).setZero();
  for (Index n = 1; n < frames; ++n) {
    CVector cur = phases_.col(n).conjugate().cwiseProduct(f.col(n));
    acc += half * (prev + cur);
    out.col(n) = phases_.col(n).cwiseProduct(acc);
    prev.swap(cur);
  }
  return out;
}

SpaceTimeField propagate(const GridFunction& u0, const TimeGrid& time, SymbolSpec symbol) {
  const FlowTable flow(u0.spec(), time, symbol);
  return SpaceTimeField::from_coeffs(u0.spec(), time, flow.free_coeffs(u0.coeffs()));
}

SpaceTimeField duhamel(const SpaceTimeField& f, SymbolSpec symbol) {
  const FlowTable flow(f.spec(), f.time(), symbol);
  return SpaceTimeField::from_coeffs(f.spec(), f.time(), flow.duhamel_coeffs(f.coeffs()));
}

SpaceTimeField derivative(const SpaceTimeField& u) {
  CMatrix c = u.coeffs();
  for (Index m = 0; m < c.rows(); ++m) c.row(m) *= Complex(0.0, u.spec().frequency(m));
  return SpaceTimeField::from_coeffs(u.spec(), u.time(), std::move(c));
}

}  // namespace modspace
