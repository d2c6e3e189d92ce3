#pragma once

#include <string>
#include <vector>

#include "modspace/families.hpp"
#include "modspace/freqdecomp.hpp"
#include "modspace/grid.hpp"
#include "modspace/propagators.hpp"
#include "modspace/report.hpp"

namespace modspace {

/// ||u||_{L^px_x L^gamma_t} = || ||u(x, .)||_{L^gamma_t} ||_{L^px_x}.
struct MixedNormSpec {
  double px = 2.0;
  double gamma = 2.0;
};

/// Trapezoid weights in t, weight dx in x, max for an infinite exponent.
double mixed_norm(const SpaceTimeField& u, const MixedNormSpec& spec);
/// Raw form: rows are x samples, columns time frames with quadrature weights.
double mixed_norm(const CMatrix& samples, double dx, const RVector& time_weights, const MixedNormSpec& spec);

/// Fourier weight applied before measuring.
enum class Weight {
  none,
  fractional,  // D^alpha = |xi|^alpha
  derivative,  // d/dx = i xi
};

/// One homogeneous band estimate ||w(D) box_k W(t) u||_A <= C ||box_k u||_rhs,
/// where the right side is ||D^{rhs_order} box_k u||_{L^rhs_p}.
struct BandMeasure {
  std::string estimate_id;
  Weight weight = Weight::none;
  double alpha = 0.0;
  MixedNormSpec norm;
  double rhs_p = 2.0;
  double rhs_order = 0.0;
};

/// Discretisation of the band sweeps over j = 0 bands |k| <= k_max.
struct SweepConfig {
  GridSpec grid{128.0, 2048};
  Index steps = 256;
  double final_time = 1.0;
  long k_max = 32;
  /// Band k is observed on [0, T_k] with T_k = T v(1) / max(v(1), v(|k|)),
  /// v the group speed |phi'|, so packets travel a bounded distance and the
  /// periodic cell stays a faithful model of the line.
  bool band_windows = true;
  /// Bands with ||box_k u||_2 below this fraction of ||u||_2 are skipped.
  double skip_below = 1e-12;
  /// Also run at (2N, 2M) and require every max ratio to move by <= 5%.
  bool check_refinement = true;
  double refinement_tol = 0.05;
  int cutoff_smoothness = 2;
  SymbolSpec symbol{};

  SweepConfig refined() const;
  double band_window(long k) const;
};

/// Runs every measure over family x bands and returns one report per measure.
/// A report passes when all ratios are finite and positive and, with
/// check_refinement, its max ratio is refinement-stable.
std::vector<EstimateReport> verify_band_measures(const std::vector<NamedSpectrum>& family,
                                                 const std::vector<BandMeasure>& measures, const SweepConfig& config);

/// Smoothing ||D^{3/2} box_k W u||_{L^inf_x L^2_t} <= C ||box_k u||_2, the
/// maximal estimate ||box_k W u||_{L^p_x L^inf_t} <= C ||box_k u||_{H^{1/p}}
/// and its p = inf endpoint against ||box_k u||_2. Three reports. p >= 4.
std::vector<EstimateReport> verify_smoothing_maximal(const std::vector<NamedSpectrum>& family, double p,
                                                     const SweepConfig& config = {});

/// ||box_k W u||_{L^{p+2/3}_x L^{3p+2}_t} and ||box_k W d_x u||_{L^{3p+2}_x L^{(3p+2)/(p+1)}_t}
/// against ||box_k u||_2. Two reports. p >= 4.
std::vector<EstimateReport> verify_homogeneous_strichartz(const std::vector<NamedSpectrum>& family, double p,
                                                          const SweepConfig& config = {});

/// ||box_k A d_x f||_{L^{p+2/3}_x L^{3p+2}_t} <= C ||box_k f||_{L^{(3p+2)'}_x L^{((3p+2)/(p+1))'}_t}
/// for separable forcing f(t, x) = e^{-t / T_k} g(x), g from the family.
EstimateReport verify_duhamel(const std::vector<NamedSpectrum>& family, double p, const SweepConfig& config = {});

/// A scaling-law case: the homogeneous form measures
/// ||D^alpha box_{j,k} W u||_{L^p_x L^r_t} / ||box_{j,k} u||_q (slope delta),
/// the Duhamel form ||box_{j,k} A d_x f||_{L^p_x L^r_t} / ||box_{j,k} f||_{L^p1_x L^r1_t}
/// (slope tau with alpha = 1).
struct ScalingCase {
  std::string id;
  bool duhamel = false;
  double alpha = 0.0;
  double p = 2.0, r = 2.0, q = 2.0;
  double p1 = 1.0, r1 = 1.0;

  double predicted_slope() const;
};

/// The default case list: smoothing, maximal L^4 L^inf, the two
/// band-localised Strichartz scalings at p = 4, 8, the derivative Strichartz
/// pair at p = 8 and the Duhamel scalings at p = 4, 8.
std::vector<ScalingCase> standard_scaling_cases();

/// Scale j uses the grid (L0 2^{-j}, N) and window T0 2^{-4j} under the
/// fourth-order flow, with inputs u(x) = V(2^j x) for V in the family.
struct ScalingConfig {
  double base_length = 128.0;
  Index points = 2048;
  Index steps = 256;
  double base_time = 1.0;
  long k = 1;
  std::vector<int> scales = {-6, -5, -4, -3, -2, -1, 0};
  double tolerance = 0.1;
  int cutoff_smoothness = 2;
};

/// Fits the mean over the family of log2(LHS / RHS) against j by least
/// squares and compares the slope with the predicted exponent. Throws
/// InvalidArgument with fewer than 4 scales. `family` should have spectra
/// inside the band (0, k) at scale 0.
EstimateReport verify_scaling_law(const std::vector<NamedSpectrum>& family, const ScalingCase& c,
                                  const ScalingConfig& config = {});

/// Seeded packets centred inside band (0, k), for the scaling sweeps.
std::vector<NamedSpectrum> scaling_family(std::uint64_t seed, int count, long k);

}  // namespace modspace
