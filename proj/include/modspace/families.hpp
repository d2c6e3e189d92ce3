#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "modspace/grid.hpp"

namespace modspace {

/// A test function given by its analytic Fourier transform, so that it can
/// be rebuilt on any grid (refinement sweeps compare the same function).
struct NamedSpectrum {
  std::string id;
  std::function<Complex(double)> fhat;

  GridFunction on(const GridSpec& spec) const { return GridFunction::from_spectrum(spec, fhat); }
};

/// e^{i xi0 x} e^{-(x - x0)^2 / (2 w^2)}.
struct WavePacket {
  Complex amplitude = 1.0;
  double xi0 = 0.0;
  double x0 = 0.0;
  double width = 1.0;

  Complex spectrum(double xi) const;
};

/// Sum of packets with spectrum multiplied by a smooth cutoff equal to 1 on
/// |xi| <= band - 1 and 0 for |xi| >= band (no cutoff when band is inf).
NamedSpectrum packet_sum(std::string id, std::vector<WavePacket> packets, double band);

/// Seeded packets: centres uniform in [lo, hi], positions in [-spread, spread],
/// widths in [w_lo, w_hi], complex normal amplitudes.
std::vector<WavePacket> random_packets(std::uint64_t seed, int count, double lo, double hi, double spread = 8.0,
                                       double w_lo = 1.0, double w_hi = 3.0);

/// The boundedness-sweep family: a Gaussian, modulated Gaussians, and random
/// band-limited packet sums with spectra in [-K, K] for K cycling through
/// {4, 8, 16, band}. `count` members in total, reproducible from `seed`.
std::vector<NamedSpectrum> standard_family(std::uint64_t seed, int count = 20, double band = 32.0);

}  // namespace modspace
