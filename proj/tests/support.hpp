#pragma once

// Shared helpers for the unit tests: seeded generators and brute-force oracles
// that do not go through the library's transforms.

#include <cmath>
#include <complex>
#include <random>

#include "modspace/grid.hpp"

namespace testsupport {

using modspace::Complex;
using modspace::CVector;
using modspace::GridFunction;
using modspace::GridSpec;
using modspace::Index;

inline constexpr double pi = 3.14159265358979323846;

// Direct quadrature of int f(x) e^{-i x xi} dx over the grid cell.
inline Complex direct_transform(const GridSpec& spec, const CVector& samples, double xi) {
  Complex acc(0.0);
  for (Index n = 0; n < spec.points(); ++n) acc += samples[n] * std::polar(1.0, -xi * spec.position(n));
  return acc * spec.dx();
}

// Direct quadrature L^p norm.
inline double direct_lp(const GridSpec& spec, const CVector& samples, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (Index n = 0; n < samples.size(); ++n) m = std::max(m, std::abs(samples[n]));
    return m;
  }
  double acc = 0.0;
  for (Index n = 0; n < samples.size(); ++n) acc += std::pow(std::abs(samples[n]), p);
  return std::pow(acc * spec.dx(), 1.0 / p);
}

// Random trigonometric polynomial with modes |m| <= mmax (optionally mean-zero),
// coefficients complex normal.
inline GridFunction random_modes(const GridSpec& spec, std::mt19937_64& rng, Index mmax, bool mean_zero = false) {
  std::normal_distribution<double> nd;
  CVector c = CVector::Zero(spec.points());
  for (Index m = -mmax; m <= mmax; ++m) {
    if (mean_zero && m == 0) continue;
    c[spec.slot(m)] = Complex(nd(rng), nd(rng)) * spec.length();
  }
  return GridFunction::from_coeffs(spec, c);
}

// Random sum of Gaussian wave packets, centred frequencies in [lo, hi].
inline GridFunction random_packets(const GridSpec& spec, std::mt19937_64& rng, double lo, double hi, int count = 4,
                                   double width = 2.0) {
  std::uniform_real_distribution<double> freq(lo, hi), pos(-0.1 * spec.length(), 0.1 * spec.length());
  std::normal_distribution<double> nd;
  CVector s = CVector::Zero(spec.points());
  for (int i = 0; i < count; ++i) {
    const double xi = freq(rng), x0 = pos(rng);
    const Complex a(nd(rng), nd(rng));
    for (Index n = 0; n < spec.points(); ++n) {
      const double x = spec.position(n);
      s[n] += a * std::exp(-0.5 * (x - x0) * (x - x0) / (width * width)) * std::polar(1.0, xi * x);
    }
  }
  return GridFunction::from_samples(spec, s);
}

inline double rel_l2(const CVector& a, const CVector& b) { return (a - b).norm() / b.norm(); }

}  // namespace testsupport
