#pragma once

#include <vector>

#include "modspace/grid.hpp"

namespace modspace {

/// C-infinity step: 0 for t <= 0, 1 for t >= 1, built from h(t) = e^{-1/t}.
double smooth_step(double t);

/// Smooth partition of unity on the frequency line.
///
/// The bump psi equals 1 on [-1/2, 1/2] and vanishes outside (-3/4, 3/4);
/// the cutoff sigma(xi) = psi(xi) / sum_k psi(xi - k) is symmetric, supported
/// in (-3/4, 3/4), and its integer translates sum to one.
class CutoffProfile {
 public:
  /// `smoothness` is the differentiability order the caller requires (>= 2).
  /// The e^{-1/t} construction is C-infinity, so every admissible order
  /// yields the same profile; the value is kept for provenance.
  explicit CutoffProfile(int smoothness = 2);

  int smoothness() const { return smoothness_; }

  double bump(double xi) const;
  double operator()(double xi) const;

  static constexpr double kSupport = 0.75;

 private:
  int smoothness_;
};

CutoffProfile build_cutoff(int smoothness);

/// Address of the projector box_{j,k} with symbol sigma(2^{-j} xi - k).
struct BandIndex {
  int j = 0;
  long k = 0;

  double center() const;
  double half_width() const;  // 3/4 * 2^j

  friend bool operator==(const BandIndex&, const BandIndex&) = default;
};

/// Contiguous range of signed mode numbers where a band's symbol may be nonzero.
struct ModeRange {
  Index first = 0;
  Index last = -1;  // inclusive; empty when last < first
  bool empty() const { return last < first; }
};

/// Signed modes of `spec` (clipped to [-N/2, N/2-1]) inside the open support of `band`.
ModeRange band_modes(const GridSpec& spec, BandIndex band);

/// All k whose band at scale j meets the resolvable frequency range of `spec`.
std::vector<long> bands_touching(const GridSpec& spec, int j);

/// Multiplies coefficients by sigma(2^{-j} xi - k), touching only the band's modes.
/// Returns a full-length coefficient vector.
CVector band_coeffs(const GridSpec& spec, const CVector& coeffs, BandIndex band, const CutoffProfile& cutoff);

/// Row-wise band projection of a coefficient matrix (space-time storage).
CMatrix band_coeffs(const GridSpec& spec, const CMatrix& coeffs, BandIndex band, const CutoffProfile& cutoff);

/// box_{j,k} f. Requires j <= 0 and |2^j k| <= xi_max; throws OutOfRange otherwise.
GridFunction box_project(const GridFunction& f, BandIndex band, const CutoffProfile& cutoff);

/// Space-time version, applied frame by frame. Same range checks.
SpaceTimeField box_project(const SpaceTimeField& u, BandIndex band, const CutoffProfile& cutoff);

/// ||f||_q / (R^{1/p - 1/q} ||f||_p) for f with spectrum in the ball of
/// radius R about `center`. Throws InvalidArgument if p > q and when more
/// than 1e-10 of the spectral L^2 mass lies outside the ball.
double bernstein_ratio(const GridFunction& f, double p, double q, double radius, double center = 0.0);

/// Number of bands (coarse_j, k') whose open support meets the open support
/// of the fine band (fine.j, fine.k), for fine.j <= coarse_j.
int coarse_overlap_count(BandIndex fine, int coarse_j);

}  // namespace modspace
