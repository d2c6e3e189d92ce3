#pragma once

#include <string>
#include <vector>

#include "modspace/families.hpp"
#include "modspace/freqdecomp.hpp"
#include "modspace/grid.hpp"
#include "modspace/report.hpp"

namespace modspace {

/// (sum |f_n|^p dx)^{1/p}; max |f_n| for p = inf. Throws for p < 1.
double lp_norm(const GridFunction& f, double p);
double lp_norm(const CVector& samples, double dx, double p);

/// Homogeneous Sobolev norm ||D^s f||_2, computed from the coefficients.
double sobolev_norm(const GridFunction& f, double s);

/// Fourier-Lebesgue norm ||fhat||_{L^r}, quadrature weight 2 pi / L.
double fourier_lebesgue_norm(const GridFunction& f, double r);

/// ||f||_{M^{[j]}_{p,q}} = || ||box_{j,k} f||_p ||_{l^q_k}; j = 0 is M_{p,q}.
/// Every band meeting the grid's frequency range is included.
double modulation_norm(const GridFunction& f, double p, double q, int j, const CutoffProfile& cutoff);

/// The per-band norms ||box_{j,k} f||_p for bands with nonzero projection.
struct BandNorm {
  long k;
  double norm;
};
std::vector<BandNorm> band_norms(const GridFunction& f, double p, int j, const CutoffProfile& cutoff);

/// Normalised STFT window.
class WindowFunction {
 public:
  /// Gaussian e^{-x^2/2} scaled to unit L^2 norm.
  static WindowFunction gaussian(const GridSpec& spec);
  /// Any window; rescaled to unit L^2 norm. Throws on g = 0.
  explicit WindowFunction(const GridFunction& g);

  const GridFunction& g() const { return g_; }

 private:
  GridFunction g_;
};

/// || ||V_g f(., xi)||_{L^p_x} ||_{l^q_xi} with V_g f(x, xi) = int f(t) conj(g(t-x)) e^{-i t xi} dt
/// and xi running over the integers inside the resolvable range.
double stft_modulation_norm(const GridFunction& f, const WindowFunction& g, double p, double q);

struct DecompositionPiece {
  int j;
  GridFunction f;
};

/// f = sum_j f_j with distinct scales j <= 0.
struct Decomposition {
  std::string strategy;
  std::vector<DecompositionPiece> pieces;

  GridFunction sum(const GridSpec& spec) const;
};

enum class Strategy {
  trivial,           // all of f at j = 0
  single_scale,      // all of f at the best single j in [J_min, 0]
  littlewood_paley,  // dyadic annuli of fhat; piece j holds 2^j c <= |xi| < 2^{j+1} c
  lp_greedy,         // dyadic pieces moved to their cheapest scale, then merged
};

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);

struct DecompositionOptions {
  int j_min = -8;
  std::vector<Strategy> strategies = {Strategy::trivial, Strategy::single_scale, Strategy::littlewood_paley,
                                      Strategy::lp_greedy};
  /// Offsets c of the dyadic annuli 2^j c <= |xi| < 2^{j+1} c. The dyadic
  /// strategies are evaluated for every offset and the cheapest is kept.
  std::vector<double> lp_radii = {1.0, 1.189207115002721, 1.414213562373095, 1.681792830507429};
};

/// Builds the decomposition a strategy assigns to f. single_scale and
/// lp_greedy depend on (mu, p, q) through the cost they minimise. The dyadic
/// strategies use the annulus offset `radius`; the low-frequency core
/// |xi| < 2^{J_min} c joins piece J_min and |xi| >= c is piece 0.
Decomposition decompose(const GridFunction& f, Strategy strategy, double mu, double p, double q,
                        const CutoffProfile& cutoff, const DecompositionOptions& options, double radius = 1.0);

/// sum_j 2^{j mu} ||f_j||_{M^{[j]}_{p,q}}.
double decomposition_cost(const Decomposition& d, double mu, double p, double q, const CutoffProfile& cutoff);

/// Upper bound for the scaling-limit norm and the decomposition achieving it.
struct NormBound {
  double value;
  Decomposition witness;
  /// Cost of every evaluated strategy, in option order.
  std::vector<std::pair<Strategy, double>> costs;
};

/// Min over the strategy family of decomposition_cost. Each witness is checked
/// to reconstruct f to 1e-10 relative L^2; failure throws InternalError.
NormBound scaling_limit_norm_ub(const GridFunction& f, double mu, double p, double q, const CutoffProfile& cutoff,
                                const DecompositionOptions& options = {});

/// Smooth even profile phi with supp phihat in [-1/8, 1/8]:
/// phihat(xi) = exp(-xi^2 / (2 s^2)) chi(xi), s = 1/48, chi = 1 on [-1/16, 1/16].
double counterexample_profile_hat(double xi);

/// Spectrum of piece j: (2^{j(1/2 - mu)} / j^2) e^{i k_j x} phi(2^j x), with
/// frequency center j 2^j.
Complex counterexample_piece_hat(int j, double mu, double xi);

/// Sum of the pieces J_min <= j <= -1, built from the analytic spectrum.
/// Throws ResolutionError when a piece is not resolved by the grid: its
/// spectral support must lie inside the frequency range and span at least
/// 8 frequency nodes, and its spatial profile must decay to 1e-8 inside the cell.
GridFunction build_counterexample(double mu, int j_min, const GridSpec& spec);

/// Band index of piece j: (j, j).
inline BandIndex counterexample_band(int j) { return BandIndex{j, j}; }

/// One truncation level of the counterexample.
struct CounterexampleRow {
  int j_min;
  /// ||u_{J_min}||_2 of the partial sum.
  double l2;
  /// ||box_{J_min, J_min} u_{J_min}||_2, the newest piece seen through its band.
  double band_l2;
  /// scaling_limit_norm_ub(u_{J_min}, mu, 2, 1).
  double m_bound;
  std::string witness;
};

/// Rows for every J_min in `j_mins` (each <= -1), all built on `spec`.
std::vector<CounterexampleRow> counterexample_table(double mu, const std::vector<int>& j_mins, const GridSpec& spec,
                                                   const CutoffProfile& cutoff,
                                                   const DecompositionOptions& options = {});

enum class EmbeddingTarget { lebesgue, fourier_lebesgue };

/// p v q <= r <= q'.
bool modulation_lebesgue_admissible(double p, double q, double r);
/// sigma(p, q) <= mu <= a(p, q) with sigma < a, in dimension one.
bool scaling_regime(double p, double q, double mu);
/// Exponent conditions of the embedding characterisations (d = 1):
/// L^r: p v q <= r <= q' and mu - 1/p <= -1/r;
/// F L^r: q <= r <= p', p <= 2 and mu - 1/p <= -1/r'.
bool embedding_admissible(EmbeddingTarget target, double p, double q, double r, double mu);

struct EmbeddingOptions {
  std::vector<int> log2_lambdas = {-4, -3, -2, -1, 0, 1, 2, 3, 4};
  DecompositionOptions decomposition;
};

/// Ratios ||f_lambda||_target / scaling_limit_norm_ub(f_lambda) over the family
/// and the dilations f_lambda(x) = f(lambda x). `family` gives analytic spectra
/// fhat; f_lambda is built from lambda^{-1} fhat(xi / lambda).
///
/// Admissible parameters: asserts finite ratios. Parameters violating only the
/// scaling condition: fits the log2 ratio against log2 lambda over lambda <= 1
/// and compares with -(mu - 1/p + 1/r) (1/r' for the Fourier side) within 0.1.
/// Exponent ranges outside p v q <= r <= q' (resp. q <= r <= p', p <= 2) are
/// rejected without computation: the report carries no rows and passed = false.
EstimateReport embedding_check(const std::vector<NamedSpectrum>& family,
                               const GridSpec& spec, EmbeddingTarget target, double p, double q, double r, double mu,
                               const CutoffProfile& cutoff, const EmbeddingOptions& options = {});

}  // namespace modspace
