#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "modspace/estimates.hpp"
#include "modspace/exponents.hpp"
#include "modspace/grid.hpp"
#include "modspace/propagators.hpp"
#include "modspace/workspace.hpp"

namespace modspace {

enum class Equation {
  d4nls,  // i u_t + u_xxxx = lambda (u^{m+1})_x
  gkdv,   // u_t + u_xxx = lambda (u^{m+1})_x
};

std::string to_string(Equation e);
Equation equation_from_string(const std::string& name);

struct D4nlsParams {
  Rational p, a, b, mu_max, s_c;
};
/// p = m/2, A = A(p), B = B(p), mu_max = 3(m-8)/(2(3m+4)), s_c = 1/2 - 3/m.
/// Throws OutOfRegime for m < 8, InternalError if mu_max != A.
D4nlsParams d4nls_params(long long m);

struct GkdvParams {
  Rational a, mu_max, s_c;
};
/// A = mu_max = (m-4)/(2m+2), s_c = 1/2 - 2/m. Throws OutOfRegime for m < 4.
GkdvParams gkdv_params(long long m);

struct ProblemSpec {
  Equation equation = Equation::d4nls;
  int m = 8;
  Complex coupling{1.0, 0.0};
  GridFunction u0;
  TimeGrid time;
  /// Admits m below the theorem range.
  bool out_of_theorem = false;

  /// Throws OutOfRegime or InvalidArgument.
  void validate() const;
  SymbolSpec symbol() const;
  /// c in u = W(t) u0 + c d_x A(u^{m+1}): -i lambda for d4nls, lambda for gkdv.
  Complex duhamel_factor() const;
  /// L^{p+2/3}_x L^{3p+2}_t with p = m/2.
  MixedNormSpec work_norm() const;
};

/// amplitude * e^{-x^2/2} on the grid.
ProblemSpec gaussian_problem(Equation e, int m, Complex coupling, double amplitude, const GridSpec& spec,
                             const TimeGrid& time);

struct PicardOptions {
  int max_iter = 50;
  /// Stop once r_n <= tol ||W(t) u0||_{L^2_x L^inf_t}.
  double tol = 1e-12;
  /// Residuals computed before convergence may be declared, so that at least
  /// one contraction ratio exists. An exactly zero residual stops at once.
  int min_residuals = 2;
  bool keep_iterates = true;
  /// Secondary residual in the X^mu upper bound of work_norm().
  bool work_residuals = false;
  double mu = 0.0;
  XNormOptions work{{-4, {Strategy::trivial, Strategy::single_scale}}};
  int cutoff_smoothness = 2;
};

struct IterationTrace {
  /// u^(0) = W(t) u0, u^(1), ...
  std::vector<SpaceTimeField> iterates;
  /// r_n = ||u^(n+1) - u^(n)||_{L^2_x L^inf_t}.
  std::vector<double> residuals;
  std::vector<double> work_residuals;
  /// rho_n = r_n / r_{n-1}, n >= 1.
  std::vector<double> ratios;
  double linear_norm = 0.0;
  bool converged = false;
  /// Relative L^inf_t L^2_x change of the final Duhamel term under M -> M/2,
  /// divided by 3 (second-order rule).
  double quadrature_error = 0.0;
  std::vector<std::string> flags;

  double max_ratio() const;
  double final_ratio() const;
};

/// rho_n >= 1 three times in a row.
class NoContraction : public Error {
 public:
  NoContraction(const std::string& what, IterationTrace trace) : Error(what), trace(std::move(trace)) {}
  IterationTrace trace;
};

/// Non-finite or overflowing iterate.
class BlowUp : public Error {
 public:
  BlowUp(const std::string& what, IterationTrace trace) : Error(what), trace(std::move(trace)) {}
  IterationTrace trace;
};

/// Norm growth above 10x within one reference step.
class Instability : public Error {
 public:
  using Error::Error;
};

struct PicardResult {
  SpaceTimeField u;
  IterationTrace trace;
};

/// Picard iteration u -> W(t) (a u0) + c d_x A P(u^{m+1}), P the 2/3 rule,
/// run on the increments w = u - W(t) a u0. A integrates the nonlinearity
/// exactly against the flow after linear interpolation in time between frames.
PicardResult picard_solve(const ProblemSpec& spec, double amplitude = 1.0, const PicardOptions& options = {});

/// ||u - W(t) u0 - c d_x A P(u^{m+1})||_{L^2_x L^inf_t} / ||W(t) u0||_{L^2_x L^inf_t},
/// recomputed from u alone.
double fixed_point_residual(const ProblemSpec& spec, const SpaceTimeField& u, double amplitude = 1.0);

struct ReferenceOptions {
  /// RK4 steps per frame interval.
  int substeps = 1;
  /// Also run with twice the substeps and report the difference.
  bool error_estimate = true;
};

struct ReferenceResult {
  SpaceTimeField u;
  /// max_n ||u_h(t_n) - u_{h/2}(t_n)||_2 / max_n ||u_{h/2}(t_n)||_2.
  double error_estimate = 0.0;
};

/// Classical RK4 on v(t) = W(-t) u(t), v' = W(-t) c d_x P((W(t) v)^{m+1}).
/// Throws Instability on non-finite values or 10x growth in one step.
ReferenceResult reference_solve(const ProblemSpec& spec, const ReferenceOptions& options = {});

/// max_n ||u(t_n)||_2 (L^inf_t L^2_x).
double sup_l2(const SpaceTimeField& u);
/// max_n | ||u(t_n)||_2^2 - ||u(0)||_2^2 | / ||u(0)||_2^2.
double mass_drift(const SpaceTimeField& u);

struct LipschitzOptions {
  std::vector<double> deltas = {1e-2, 1e-3, 1e-4, 1e-5};
  int directions = 5;
  std::uint64_t seed = 1;
  /// Largest allowed max/min ratio over all (delta, direction) rows.
  double max_spread = 2.0;
  bool work_norm = true;
  PicardOptions picard;
};

struct LipschitzReport {
  /// ||u[u0 + d v0] - u[u0]||_{L^inf_t L^2_x} / (d ||v0||_2); rows carry d in lambda.
  EstimateReport l2;
  /// X^mu upper bound of the difference / (d * M^mu_{2,1} upper bound of v0).
  EstimateReport work;
  double spread_l2 = 0.0;
  double spread_work = 0.0;
  bool passed = false;
};

/// Directions v0 are seeded packet sums with spectra in [-4, 4], scaled to
/// ||v0||_2 = ||u0||_2.
LipschitzReport lipschitz_probe(const ProblemSpec& spec, const LipschitzOptions& options = {});

struct ThresholdOptions {
  double hi = 8.0;
  int bisections = 16;
  PicardOptions picard;
};

struct ThresholdReport {
  /// Empirical largest contracting amplitude; inf when `hi` contracts.
  double threshold = kInf;
  /// M^mu_{2,1} upper bound of threshold * u0.
  double datum_norm = kInf;
  /// (amplitude, contracted) in probe order.
  std::vector<std::pair<double, bool>> probes;
  /// No contracting probe above a failing one, and threshold / 2 contracts.
  bool monotone = true;
};

/// Bisection over amplitude * u0 for the edge of contraction (converged with
/// every rho_n < 1).
ThresholdReport small_data_threshold(const ProblemSpec& spec, const ThresholdOptions& options = {});

/// Scaling exponent a with u_l(t, x) = l^a u(l^k t, l x): 3/m for d4nls, 2/m for gkdv.
double scaling_weight(Equation e, int m);

struct CovarianceCheck {
  /// ||U - l^a u||_{L^inf_t L^2_x} / ||U||, U the solution of the dilated datum.
  double relative_error = 0.0;
  /// ||u - W(t) u0|| / ||u||: how much the check involves the nonlinearity.
  double nonlinear_fraction = 0.0;
};

/// Solves from u0 on (spec, time) and from l^a u0(l x) on (L/l, N) up to T/l^k,
/// k = 4 (d4nls) or 3 (gkdv), and compares frame by frame.
CovarianceCheck scaling_covariance(Equation e, int m, Complex coupling, const std::function<Complex(double)>& u0,
                                   const GridSpec& spec, const TimeGrid& time, double lambda,
                                   const PicardOptions& options = {});

}  // namespace modspace
