#pragma once

#include <cmath>
#include <vector>

#include "modspace/types.hpp"

namespace modspace {

/// Uniform periodic grid on [-L/2, L/2) with N (a power of two) points.
///
/// Sample positions are x_n = -L/2 + nL/N. Coefficients are stored in FFT
/// order: slot m holds frequency 2 pi m / L for m < N/2 and 2 pi (m - N) / L
/// otherwise, so the resolvable range is [-pi N / L, pi N / L).
class GridSpec {
 public:
  GridSpec(double length, Index points);

  double length() const { return length_; }
  Index points() const { return points_; }
  double dx() const { return length_ / static_cast<double>(points_); }
  /// Spacing 2 pi / L of the frequency nodes.
  double dxi() const { return 2.0 * kPi / length_; }
  /// Largest resolvable frequency magnitude, pi N / L.
  double xi_max() const { return kPi * static_cast<double>(points_) / length_; }

  double position(Index n) const { return -0.5 * length_ + dx() * static_cast<double>(n); }
  /// Signed integer mode number stored in FFT slot m.
  Index mode(Index slot) const { return slot < points_ / 2 ? slot : slot - points_; }
  /// FFT slot holding the signed mode number.
  Index slot(Index mode) const { return mode >= 0 ? mode : mode + points_; }
  double frequency(Index slot) const { return dxi() * static_cast<double>(mode(slot)); }

  RVector positions() const;
  RVector frequencies() const;

  /// Same length, twice the points.
  GridSpec refined() const { return GridSpec(length_, 2 * points_); }

  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.length_ == b.length_ && a.points_ == b.points_;
  }

 private:
  double length_;
  Index points_;
};

// Spectral transforms with the continuous convention
//   fhat(xi) = int f(x) e^{-i x xi} dx,  f(x) = (2 pi)^{-1} int fhat(xi) e^{i x xi} dxi
// discretised with quadrature weight L/N in x and 2 pi / L in xi.
CVector to_coeffs(const GridSpec& spec, const CVector& samples);
CVector to_samples(const GridSpec& spec, const CVector& coeffs);
/// Column-wise versions for space-time storage.
CMatrix to_coeffs(const GridSpec& spec, const CMatrix& samples);
CMatrix to_samples(const GridSpec& spec, const CMatrix& coeffs);

/// Immutable sampled function together with its cached Fourier coefficients.
class GridFunction {
 public:
  /// Throws InvalidArgument on non-finite samples or a size mismatch.
  static GridFunction from_samples(const GridSpec& spec, CVector samples);
  static GridFunction from_coeffs(const GridSpec& spec, CVector coeffs);

  /// Samples x -> f(x) at the grid positions.
  template <typename F>
  static GridFunction sample(const GridSpec& spec, F&& f) {
    CVector s(spec.points());
    for (Index n = 0; n < spec.points(); ++n) s[n] = Complex(f(spec.position(n)));
    return from_samples(spec, std::move(s));
  }

  /// Sets the coefficient of every frequency node to fhat(xi).
  template <typename F>
  static GridFunction from_spectrum(const GridSpec& spec, F&& fhat) {
    CVector c(spec.points());
    for (Index m = 0; m < spec.points(); ++m) c[m] = Complex(fhat(spec.frequency(m)));
    return from_coeffs(spec, std::move(c));
  }

  static GridFunction zero(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  const CVector& samples() const { return samples_; }
  const CVector& coeffs() const { return coeffs_; }

  /// Multiplies the coefficients by symbol(xi).
  template <typename F>
  GridFunction apply_symbol(F&& symbol) const {
    CVector c = coeffs_;
    for (Index m = 0; m < c.size(); ++m) c[m] *= symbol(spec_.frequency(m));
    return from_coeffs(spec_, std::move(c));
  }

  friend GridFunction operator+(const GridFunction& a, const GridFunction& b);
  friend GridFunction operator-(const GridFunction& a, const GridFunction& b);
  friend GridFunction operator*(Complex c, const GridFunction& f);

 private:
  GridFunction(GridSpec spec, CVector samples, CVector coeffs)
      : spec_(spec), samples_(std::move(samples)), coeffs_(std::move(coeffs)) {}

  GridSpec spec_;
  CVector samples_;
  CVector coeffs_;
};

/// Uniform time grid t_n = n T / M, n = 0..M.
class TimeGrid {
 public:
  TimeGrid(double final_time, Index steps);
  /// Accepts an explicit list of times; throws Unsupported unless it starts
  /// at zero and is uniform to 1e-12 relative.
  static TimeGrid from_times(const std::vector<double>& times);

  double final_time() const { return final_time_; }
  Index steps() const { return steps_; }
  Index frames() const { return steps_ + 1; }
  double dt() const { return final_time_ / static_cast<double>(steps_); }
  double time(Index n) const { return dt() * static_cast<double>(n); }

  /// Composite trapezoid weights on [0, T].
  RVector trapezoid_weights() const;

  TimeGrid refined() const { return TimeGrid(final_time_, 2 * steps_); }

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) {
    return a.final_time_ == b.final_time_ && a.steps_ == b.steps_;
  }

 private:
  double final_time_;
  Index steps_;
};

/// A time-indexed family of grid functions on [0, T]; column n is frame n.
class SpaceTimeField {
 public:
  static SpaceTimeField from_samples(const GridSpec& spec, const TimeGrid& time, CMatrix samples);
  static SpaceTimeField from_coeffs(const GridSpec& spec, const TimeGrid& time, CMatrix coeffs);
  static SpaceTimeField zero(const GridSpec& spec, const TimeGrid& time);
  /// Frame n is f(t_n, .).
  template <typename F>
  static SpaceTimeField sample(const GridSpec& spec, const TimeGrid& time, F&& f) {
    CMatrix s(spec.points(), time.frames());
    for (Index k = 0; k < time.frames(); ++k)
      for (Index n = 0; n < spec.points(); ++n) s(n, k) = Complex(f(time.time(k), spec.position(n)));
    return from_samples(spec, time, std::move(s));
  }

  const GridSpec& spec() const { return spec_; }
  const TimeGrid& time() const { return time_; }
  const CMatrix& samples() const { return samples_; }
  const CMatrix& coeffs() const { return coeffs_; }
  GridFunction frame(Index n) const;

  friend SpaceTimeField operator+(const SpaceTimeField& a, const SpaceTimeField& b);
  friend SpaceTimeField operator-(const SpaceTimeField& a, const SpaceTimeField& b);
  friend SpaceTimeField operator*(Complex c, const SpaceTimeField& f);

 private:
  SpaceTimeField(GridSpec spec, TimeGrid time, CMatrix samples, CMatrix coeffs)
      : spec_(spec), time_(time), samples_(std::move(samples)), coeffs_(std::move(coeffs)) {}

  GridSpec spec_;
  TimeGrid time_;
  CMatrix samples_;
  CMatrix coeffs_;
};

/// Approximates int f(x) e^{-i x xi_m} dx at every frequency node.
CVector forward_transform(const GridFunction& f);

/// D^s f = F^{-1} |xi|^s F f. The zero mode is dropped for s > 0 and kept
/// for s = 0. For s < 0 the mean coefficient must vanish (relative 1e-12),
/// otherwise SingularMultiplier is thrown. Requires s >= -1.
GridFunction fractional_derivative(const GridFunction& f, double s);

/// Spectral derivative d/dx.
GridFunction derivative(const GridFunction& f);

/// Samples x -> f(lambda x) on the same grid.
///
/// lambda must lie in [2^-10, 2^10]. For lambda < 1 the L^2 mass of f outside
/// |x| <= lambda L / 2 must be at most 1e-8 of the total and f is evaluated by
/// trigonometric interpolation. For lambda > 1 the spectral mass beyond
/// xi_max / lambda must be at most 1e-8; a function localised in the cell
/// (boundary_mass <= 1e-8) is treated as zero outside it, anything else as
/// periodic, which needs an integer lambda. Violations throw TruncationError.
GridFunction dilate(const GridFunction& f, double lambda);

/// Fraction of the L^2 mass in the outer 1/8 of the periodic cell; the
/// periodisation diagnostic reported by runs that model the real line.
double boundary_mass(const GridFunction& f);

}  // namespace modspace
