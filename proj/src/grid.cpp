#include "modspace/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "fft.hpp"

namespace modspace {

namespace {

double parity(Index mode) { return (mode & 1) ? -1.0 : 1.0; }

bool all_finite(const CVector& v) {
  return v.real().allFinite() && v.imag().allFinite();
}

void forward_into(const GridSpec& spec, const Complex* samples, Complex* coeffs) {
  const Index n = spec.points();
  detail::Dft::local().forward(coeffs, samples, n);
  // x_0 = -L/2 contributes the phase e^{i xi_m L/2} = (-1)^m.
  const double w = spec.dx();
  for (Index m = 0; m < n; ++m) coeffs[m] *= w * parity(spec.mode(m));
}

void inverse_into(const GridSpec& spec, const Complex* coeffs, Complex* samples) {
  const Index n = spec.points();
  CVector shifted(n);
  for (Index m = 0; m < n; ++m) shifted[m] = coeffs[m] * parity(spec.mode(m));
  detail::Dft::local().inverse(samples, shifted.data(), n);
  const double w = static_cast<double>(n) / spec.length();
  for (Index k = 0; k < n; ++k) samples[k] *= w;
}

}  // namespace

GridSpec::GridSpec(double length, Index points) : length_(length), points_(points) {
  if (!(length > 0.0) || !std::isfinite(length))
    throw InvalidArgument("grid length must be positive and finite");
  if (points < 2 || !std::has_single_bit(static_cast<std::uint64_t>(points)))
    throw InvalidArgument("grid points must be a power of two >= 2");
}

RVector GridSpec::positions() const {
  RVector x(points_);
  for (Index n = 0; n < points_; ++n) x[n] = position(n);
  return x;
}

RVector GridSpec::frequencies() const {
  RVector xi(points_);
  for (Index m = 0; m < points_; ++m) xi[m] = frequency(m);
  return xi;
}

CVector to_coeffs(const GridSpec& spec, const CVector& samples) {
  CVector c(spec.points());
  forward_into(spec, samples.data(), c.data());
  return c;
}

CVector to_samples(const GridSpec& spec, const CVector& coeffs) {
  CVector s(spec.points());
  inverse_into(spec, coeffs.data(), s.data());
  return s;
}

CMatrix to_coeffs(const GridSpec& spec, const CMatrix& samples) {
  CMatrix c(samples.rows(), samples.cols());
  for (Index k = 0; k < samples.cols(); ++k) forward_into(spec, samples.col(k).data(), c.col(k).data());
  return c;
}

CMatrix to_samples(const GridSpec& spec, const CMatrix& coeffs) {
  CMatrix s(coeffs.rows(), coeffs.cols());
  for (Index k = 0; k < coeffs.cols(); ++k) inverse_into(spec, coeffs.col(k).data(), s.col(k).data());
  return s;
}

GridFunction GridFunction::from_samples(const GridSpec& spec, CVector samples) {
  if (samples.size() != spec.points()) throw InvalidArgument("sample count does not match grid");
  if (!all_finite(samples)) throw InvalidArgument("non-finite samples");
  CVector c = to_coeffs(spec, samples);
  return GridFunction(spec, std::move(samples), std::move(c));
}

GridFunction GridFunction::from_coeffs(const GridSpec& spec, CVector coeffs) {
  if (coeffs.size() != spec.points()) throw InvalidArgument("coefficient count does not match grid");
  if (!all_finite(coeffs)) throw InvalidArgument("non-finite coefficients");
  CVector s = to_samples(spec, coeffs);
  return GridFunction(spec, std::move(s), std::move(coeffs));
}

GridFunction GridFunction::zero(const GridSpec& spec) {
  return GridFunction(spec, CVector::Zero(spec.points()), CVector::Zero(spec.points()));
}

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
  if (!(a.spec_ == b.spec_)) throw InvalidArgument("grid mismatch");
  return GridFunction(a.spec_, a.samples_ + b.samples_, a.coeffs_ + b.coeffs_);
}

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
  if (!(a.spec_ == b.spec_)) throw InvalidArgument("grid mismatch");
  return GridFunction(a.spec_, a.samples_ - b.samples_, a.coeffs_ - b.coeffs_);
}

GridFunction operator*(Complex c, const GridFunction& f) {
  return GridFunction(f.spec_, c * f.samples_, c * f.coeffs_);
}

TimeGrid::TimeGrid(double final_time, Index steps) : final_time_(final_time), steps_(steps) {
  if (!(final_time > 0.0) || !std::isfinite(final_time))
    throw InvalidArgument("final time must be positive and finite");
  if (steps < 1) throw InvalidArgument("need at least one time step");
}

TimeGrid TimeGrid::from_times(const std::vector<double>& times) {
  if (times.size() < 2 || times.front() != 0.0)
    throw Unsupported("time grid must start at 0 and contain at least two times");
  const double final_time = times.back();
  const Index steps = static_cast<Index>(times.size()) - 1;
  const double dt = final_time / static_cast<double>(steps);
  for (std::size_t n = 0; n < times.size(); ++n) {
    if (std::abs(times[n] - dt * static_cast<double>(n)) > 1e-12 * final_time)
      throw Unsupported("non-uniform time grid");
  }
  return TimeGrid(final_time, steps);
}

RVector TimeGrid::trapezoid_weights() const {
  RVector w = RVector::Constant(frames(), dt());
  w[0] *= 0.5;
  w[steps_] *= 0.5;
  return w;
}

SpaceTimeField SpaceTimeField::from_samples(const GridSpec& spec, const TimeGrid& time, CMatrix samples) {
  if (samples.rows() != spec.points() || samples.cols() != time.frames())
    throw InvalidArgument("space-time sample matrix has the wrong shape");
  if (!samples.allFinite()) throw InvalidArgument("non-finite samples");
  CMatrix c = to_coeffs(spec, samples);
  return SpaceTimeField(spec, time, std::move(samples), std::move(c));
}

SpaceTimeField SpaceTimeField::from_coeffs(const GridSpec& spec, const TimeGrid& time, CMatrix coeffs) {
  if (coeffs.rows() != spec.points() || coeffs.cols() != time.frames())
    throw InvalidArgument("space-time coefficient matrix has the wrong shape");
  if (!coeffs.allFinite()) throw InvalidArgument("non-finite coefficients");
  CMatrix s = to_samples(spec, coeffs);
  return SpaceTimeField(spec, time, std::move(s), std::move(coeffs));
}

SpaceTimeField SpaceTimeField::zero(const GridSpec& spec, const TimeGrid& time) {
  CMatrix z = CMatrix::Zero(spec.points(), time.frames());
  return SpaceTimeField(spec, time, z, z);
}

GridFunction SpaceTimeField::frame(Index n) const {
  return GridFunction::from_samples(spec_, samples_.col(n));
}

SpaceTimeField operator+(const SpaceTimeField& a, const SpaceTimeField& b) {
  if (!(a.spec_ == b.spec_) || !(a.time_ == b.time_)) throw InvalidArgument("field discretisation mismatch");
  return SpaceTimeField(a.spec_, a.time_, a.samples_ + b.samples_, a.coeffs_ + b.coeffs_);
}

SpaceTimeField operator-(const SpaceTimeField& a, const SpaceTimeField& b) {
  if (!(a.spec_ == b.spec_) || !(a.time_ == b.time_)) throw InvalidArgument("field discretisation mismatch");
  return SpaceTimeField(a.spec_, a.time_, a.samples_ - b.samples_, a.coeffs_ - b.coeffs_);
}

SpaceTimeField operator*(Complex c, const SpaceTimeField& f) {
  return SpaceTimeField(f.spec_, f.time_, c * f.samples_, c * f.coeffs_);
}

CVector forward_transform(const GridFunction& f) {
  if (!all_finite(f.samples())) throw InvalidArgument("non-finite samples");
  return f.coeffs();
}

GridFunction fractional_derivative(const GridFunction& f, double s) {
  if (!(s >= -1.0) || !std::isfinite(s)) throw InvalidArgument("fractional order must be >= -1");
  if (s == 0.0) return f;
  const CVector& c = f.coeffs();
  if (s < 0.0 && std::abs(c[0]) > 1e-12 * c.norm())
    throw SingularMultiplier("negative-order derivative of data with nonzero mean");
  return f.apply_symbol([s](double xi) { return xi == 0.0 ? 0.0 : std::pow(std::abs(xi), s); });
}

GridFunction derivative(const GridFunction& f) {
  return f.apply_symbol([](double xi) { return Complex(0.0, xi); });
}

GridFunction dilate(const GridFunction& f, double lambda) {
  if (!(lambda >= std::ldexp(1.0, -10) && lambda <= std::ldexp(1.0, 10)))
    throw InvalidArgument("dilation factor outside [2^-10, 2^10]");
  if (lambda == 1.0) return f;

  const GridSpec& spec = f.spec();
  const Index n = spec.points();
  const CVector& s = f.samples();
  const CVector& c = f.coeffs();
  constexpr double kTol = 1e-8;

  if (lambda < 1.0) {
    const double half = 0.5 * lambda * spec.length();
    double outside = 0.0;
    for (Index k = 0; k < n; ++k)
      if (std::abs(spec.position(k)) > half) outside += std::norm(s[k]);
    if (outside > kTol * s.squaredNorm())
      throw TruncationError("dilation would sample f outside its effective support");
  } else if (boundary_mass(f) > kTol) {
    // Not localised: f is read as a periodic function, for which f(lambda x)
    // stays on the grid only when lambda is an integer.
    const double whole = std::round(lambda);
    if (std::abs(lambda - whole) > 1e-12 * lambda)
      throw TruncationError("non-integer dilation of a function that is not localised in the cell");
    const Index step = static_cast<Index>(whole);
    CVector gc = CVector::Zero(n);
    for (Index m = 0; m < n; ++m) {
      if (c[m] == Complex(0.0)) continue;
      const Index target = spec.mode(m) * step;
      if (target < -n / 2 || target >= n / 2) {
        if (std::norm(c[m]) > kTol * c.squaredNorm())
          throw TruncationError("dilated spectrum exceeds the resolvable band");
        continue;
      }
      gc[spec.slot(target)] = c[m];
    }
    return GridFunction::from_coeffs(spec, std::move(gc));
  } else {
    const double limit = spec.xi_max() / lambda;
    double outside = 0.0;
    for (Index m = 0; m < n; ++m)
      if (std::abs(spec.frequency(m)) >= limit) outside += std::norm(c[m]);
    if (outside > kTol * c.squaredNorm())
      throw TruncationError("dilated spectrum exceeds the resolvable band");
  }

  if (lambda < 1.0) {
    // g(x_k) = f(lambda x_k) = (1/L) sum_m c_m e^{i xi_m lambda x_k}; every
    // lambda x_k stays inside the cell, so no periodic image is sampled.
    CVector g = CVector::Zero(n);
    for (Index m = 0; m < n; ++m) {
      if (c[m] == Complex(0.0)) continue;
      const double omega = spec.frequency(m) * lambda;
      const Complex step = std::polar(1.0, omega * spec.dx());
      Complex phase;
      for (Index k = 0; k < n; ++k) {
        if ((k & 63) == 0) phase = std::polar(1.0, omega * spec.position(k));
        g[k] += c[m] * phase;
        phase *= step;
      }
    }
    return GridFunction::from_samples(spec, g / spec.length());
  }

  // ghat(xi) = fhat(xi / lambda) / lambda, with fhat the quadrature transform
  // of the samples (f taken as zero outside the cell).
  CVector gc = CVector::Zero(n);
  for (Index m = 0; m < n; ++m) {
    const double eta = spec.frequency(m) / lambda;
    const Complex step = std::polar(1.0, -eta * spec.dx());
    Complex phase;
    Complex acc(0.0);
    for (Index k = 0; k < n; ++k) {
      if ((k & 63) == 0) phase = std::polar(1.0, -eta * spec.position(k));
      acc += s[k] * phase;
      phase *= step;
    }
    gc[m] = acc * (spec.dx() / lambda);
  }
  return GridFunction::from_coeffs(spec, std::move(gc));
}

double boundary_mass(const GridFunction& f) {
  const GridSpec& spec = f.spec();
  const double edge = 0.5 * spec.length() * (1.0 - 1.0 / 8.0);
  double outer = 0.0;
  for (Index k = 0; k < spec.points(); ++k)
    if (std::abs(spec.position(k)) >= edge) outer += std::norm(f.samples()[k]);
  const double total = f.samples().squaredNorm();
  return total > 0.0 ? outer / total : 0.0;
}

}  // namespace modspace
