#include "modspace/freqdecomp.hpp"

#include <algorithm>
#include <cmath>

#include "modspace/modnorms.hpp"

namespace modspace {

namespace {

double h(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

void check_band(const GridSpec& spec, BandIndex band) {
  if (band.j > 0) throw OutOfRange("band scale j must be <= 0");
  if (std::abs(band.center()) > spec.xi_max()) throw OutOfRange("band center beyond the resolvable frequency range");
}

}  // namespace

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = h(t), b = h(1.0 - t);
  return a / (a + b);
}

CutoffProfile::CutoffProfile(int smoothness) : smoothness_(smoothness) {
  if (smoothness < 2) throw InvalidArgument("cutoff smoothness must be >= 2");
}

double CutoffProfile::bump(double xi) const {
  return smooth_step(4.0 * (xi + 0.75)) * smooth_step(4.0 * (0.75 - xi));
}

double CutoffProfile::operator()(double xi) const {
  if (std::abs(xi) >= kSupport) return 0.0;
  const double p = bump(xi);
  if (p == 0.0) return 0.0;
  return p / (bump(xi - 1.0) + p + bump(xi + 1.0));
}

CutoffProfile build_cutoff(int smoothness) { return CutoffProfile(smoothness); }

double BandIndex::center() const { return std::ldexp(static_cast<double>(k), j); }

double BandIndex::half_width() const { return std::ldexp(CutoffProfile::kSupport, j); }

ModeRange band_modes(const GridSpec& spec, BandIndex band) {
  const double lo = band.center() - band.half_width();
  const double hi = band.center() + band.half_width();
  const double d = spec.dxi();
  const Index half = spec.points() / 2;
  ModeRange r;
  // Clamp before converting so extreme bands cannot overflow Index.
  const double first = std::clamp(std::floor(lo / d) + 1.0, -1e18, 1e18);
  const double last = std::clamp(std::ceil(hi / d) - 1.0, -1e18, 1e18);
  r.first = std::max<Index>(static_cast<Index>(first), -half);
  r.last = std::min<Index>(static_cast<Index>(last), half - 1);
  return r;
}

std::vector<long> bands_touching(const GridSpec& spec, int j) {
  const double scale = std::ldexp(1.0, -j);
  const double lo = -spec.xi_max() * scale - CutoffProfile::kSupport;
  const double hi = spec.xi_max() * scale + CutoffProfile::kSupport;
  std::vector<long> ks;
  for (long k = static_cast<long>(std::ceil(lo)); k <= static_cast<long>(std::floor(hi)); ++k) ks.push_back(k);
  return ks;
}

CVector band_coeffs(const GridSpec& spec, const CVector& coeffs, BandIndex band, const CutoffProfile& cutoff) {
  CVector out = CVector::Zero(spec.points());
  const ModeRange r = band_modes(spec, band);
  const double scale = std::ldexp(1.0, -band.j);
  for (Index m = r.first; m <= r.last; ++m) {
    const Index s = spec.slot(m);
    out[s] = cutoff(scale * spec.frequency(s) - static_cast<double>(band.k)) * coeffs[s];
  }
  return out;
}

CMatrix band_coeffs(const GridSpec& spec, const CMatrix& coeffs, BandIndex band, const CutoffProfile& cutoff) {
  CMatrix out = CMatrix::Zero(coeffs.rows(), coeffs.cols());
  const ModeRange r = band_modes(spec, band);
  const double scale = std::ldexp(1.0, -band.j);
  for (Index m = r.first; m <= r.last; ++m) {
    const Index s = spec.slot(m);
    out.row(s) = cutoff(scale * spec.frequency(s) - static_cast<double>(band.k)) * coeffs.row(s);
  }
  return out;
}

GridFunction box_project(const GridFunction& f, BandIndex band, const CutoffProfile& cutoff) {
  check_band(f.spec(), band);
  return GridFunction::from_coeffs(f.spec(), band_coeffs(f.spec(), f.coeffs(), band, cutoff));
}

SpaceTimeField box_project(const SpaceTimeField& u, BandIndex band, const CutoffProfile& cutoff) {
  check_band(u.spec(), band);
  return SpaceTimeField::from_coeffs(u.spec(), u.time(), band_coeffs(u.spec(), u.coeffs(), band, cutoff));
}

double bernstein_ratio(const GridFunction& f, double p, double q, double radius, double center) {
  if (!(p >= 1.0) || !(q >= 1.0)) throw InvalidArgument("exponents must be >= 1");
  if (p > q) throw InvalidArgument("Bernstein ratio needs p <= q");
  if (!(radius > 0.0)) throw InvalidArgument("radius must be positive");
  const GridSpec& spec = f.spec();
  const CVector& c = f.coeffs();
  double outside = 0.0;
  for (Index m = 0; m < spec.points(); ++m)
    if (std::abs(spec.frequency(m) - center) > radius) outside += std::norm(c[m]);
  if (outside > 1e-10 * c.squaredNorm()) throw InvalidArgument("spectrum is not contained in the ball");
  const double np = lp_norm(f, p);
  if (np == 0.0) return 0.0;
  const double ip = 1.0 / p, iq = std::isinf(q) ? 0.0 : 1.0 / q;
  return lp_norm(f, q) / (std::pow(radius, ip - iq) * np);
}

int coarse_overlap_count(BandIndex fine, int coarse_j) {
  if (fine.j > coarse_j) throw InvalidArgument("coarse scale must not be finer than the band");
  // In units of 2^{fine.j}/4 the supports are integer intervals:
  // fine (4k-3, 4k+3), coarse s(4k'-3, 4k'+3) with s = 2^{coarse_j - fine.j}.
  const long s = 1L << (coarse_j - fine.j);
  const long lo = 4 * fine.k - 3, hi = 4 * fine.k + 3;
  int count = 0;
  const long kmin = (lo / s - 3) / 4 - 2, kmax = (hi / s + 3) / 4 + 2;
  for (long kp = kmin; kp <= kmax; ++kp)
    if (s * (4 * kp - 3) < hi && s * (4 * kp + 3) > lo) ++count;
  return count;
}

}  // namespace modspace
