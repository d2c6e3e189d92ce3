#include "modspace/nonlinear.hpp"

namespace modspace {

namespace {

template <typename Samples>
Samples raise(const Samples& s, int n) {
  if (n < 1) throw InvalidArgument("power must be >= 1");
  Samples out = s;
  for (int i = 1; i < n; ++i) out = out.cwiseProduct(s);
  return out;
}

}  // namespace

void dealias(const GridSpec& spec, CVector& coeffs) {
  const Index keep = spec.points() / 3;
  for (Index m = 0; m < coeffs.size(); ++m)
    if (std::abs(spec.mode(m)) > keep) coeffs[m] = 0.0;
}

void dealias(const GridSpec& spec, CMatrix& coeffs) {
  const Index keep = spec.points() / 3;
  for (Index m = 0; m < coeffs.rows(); ++m)
    if (std::abs(spec.mode(m)) > keep) coeffs.row(m).setZero();
}

CVector power_coeffs(const GridSpec& spec, const CVector& samples, int n) {
  CVector c = to_coeffs(spec, raise(samples, n));
  dealias(spec, c);
  return c;
}

CMatrix power_coeffs(const GridSpec& spec, const CMatrix& samples, int n) {
  CMatrix c = to_coeffs(spec, raise(samples, n));
  dealias(spec, c);
  return c;
}

}  // namespace modspace
