#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "modspace/estimates.hpp"
#include "modspace/exponents.hpp"
#include "modspace/modnorms.hpp"

namespace modspace {

struct SpaceTimePiece {
  int j;
  SpaceTimeField u;
};

/// u = sum_j u_j with distinct scales j <= 0.
struct SpaceTimeDecomposition {
  std::string strategy;
  std::vector<SpaceTimePiece> pieces;

  SpaceTimeField sum(const GridSpec& spec, const TimeGrid& time) const;
};

struct XNormOptions {
  DecompositionOptions decomposition;
  /// Bands whose L^2_x L^2_t mass is below this fraction of the field's are
  /// not evaluated.
  double band_floor = 1e-14;
};

/// sum_k ||box_{j,k} u||_A.
double band_sum_norm(const SpaceTimeField& u, int j, const MixedNormSpec& a, const CutoffProfile& cutoff,
                     double band_floor = 1e-14);

/// sum_j 2^{j mu} sum_k ||box_{j,k} u_j||_A.
double x_norm_cost(const SpaceTimeDecomposition& d, double mu, const MixedNormSpec& a, const CutoffProfile& cutoff,
                   double band_floor = 1e-14);

struct XNormBound {
  double value;
  SpaceTimeDecomposition witness;
  std::vector<std::pair<Strategy, double>> costs;
};

/// Upper bound for ||u||_{X^mu(A)}: the strategies of scaling_limit_norm_ub
/// applied to the spatial frequencies of every frame at once. The witness
/// must reconstruct u to 1e-10 relative in L^2_x L^2_t, else InternalError.
XNormBound x_norm_ub(const SpaceTimeField& u, double mu, const MixedNormSpec& a, const CutoffProfile& cutoff,
                     const XNormOptions& options = {});

/// Pieces W(t) f_j of a data decomposition on the given time grid.
SpaceTimeDecomposition propagate(const Decomposition& d, const TimeGrid& time, SymbolSpec symbol);

struct NamedField {
  std::string id;
  SpaceTimeField u;
};

/// Half random fields sum_i cos(w_i t + phi_i) g_i(x), g_i packets with
/// spectra in [-K, K]; half free flows W(t) u0 of such packets.
std::vector<NamedField> field_family(const GridSpec& spec, const TimeGrid& time, std::uint64_t seed, int count,
                                     double band, SymbolSpec symbol = {});

/// LHS sum_k ||box_{j,k} u||_A against RHS sum_k ||box_{l,k} u||_A for every
/// (l, j) pair with l <= j <= 0. Rows carry j in `j` and l in `k`.
EstimateReport verify_band_coarsening(const std::vector<NamedField>& family,
                                      const std::vector<std::pair<int, int>>& scale_pairs, const MixedNormSpec& a,
                                      const CutoffProfile& cutoff);

/// ||u||_{X^{mu+1/p}(L^p_x L^gamma_t)} on the witness of the upper bound for
/// ||u||_{X^{mu+1/p1}(L^p1_x L^gamma_t)}. Requires 1 <= p1 <= gamma <= p.
EstimateReport verify_bernstein_embedding(const std::vector<NamedField>& family, double p1, double gamma, double p,
                                          double mu, const CutoffProfile& cutoff, const XNormOptions& options = {});

/// Exponents (p, gamma) = Hoelder combination of (p1, gamma1) and (p2, gamma2).
struct ProductExponents {
  MixedNormSpec product, left, right;
};

/// ||uv||_{X^mu} against ||u||_{X^mu}||v||_{X^0} + ||u||_{X^0}||v||_{X^mu}, with
/// both sides evaluated under the same single strategy (one row per pair and
/// strategy). Throws InvalidArgument when the exponents are not Hoelder-related.
EstimateReport verify_product_estimate(const std::vector<NamedField>& left, const std::vector<NamedField>& right,
                                       const ProductExponents& e, double mu, const CutoffProfile& cutoff,
                                       const XNormOptions& options = {});

/// Largest |k - k1 - k2| over band triples at scale j where
/// ||box_k (box_{k1} u box_{k2} v)||_{L^2 L^2} exceeds `tol` times the largest
/// such norm.
long product_band_spread(const SpaceTimeField& u, const SpaceTimeField& v, int j, const CutoffProfile& cutoff,
                         double tol = 1e-12);

/// Exponent split (a, b) for the power u^{m+1}: (n, 2) for m = 2n and (n, 5)
/// for m = 2n + 1, with p = m / 2.
struct HolderSplit {
  long long a;
  long long b;
  Rational p;
};

/// Checks, in exact arithmetic,
///   (3p+1)/(3p+2) = 3a/(3p+2) + b/(2(3p+2)) + (m+1-a-b)/inf,
///   (2p+1)/(3p+2) = a/(3p+2) + b/(3p+2) + (m+1-a-b)/(3p+2).
/// Throws OutOfRange for m < 8 and InvalidArgument if an identity fails.
HolderSplit holder_split(long long m);

/// ||u^{m+1}||_{X^0(L^{(3p+2)'}_x L^{((3p+2)/(p+1))'}_t)} / ||u||^{m+1}_{X^0(L^{p+2/3}_x L^{3p+2}_t)}
/// with p = m / 2, plus an amplitude sweep u -> c u that fits the degree of
/// homogeneity of the left side (m + 1 within 0.01). Powers are dealiased.
EstimateReport verify_power_nonlinearity(const std::vector<NamedField>& family, int m, const CutoffProfile& cutoff,
                                         const std::vector<double>& amplitudes = {0.25, 0.5, 1.0, 2.0},
                                         const XNormOptions& options = {});

/// X^mu linear estimates at exponent p:
///   ||W(t) u0||_{X^mu(L^{p+2/3}_x L^{3p+2}_t)} against ||u0||_{M^{mu+A}_{2,1}}, the left side
///   evaluated on the propagated witness of the right side;
///   ||d_x A f||_{X^mu(...)} against ||f||_{X^{mu+B}(L^{(3p+2)'}_x L^{((3p+2)/(p+1))'}_t)}, on the
///   witness of the right side.
/// Two reports: "xmu_free" and "xmu_duhamel".
std::vector<EstimateReport> verify_xmu_linear(const std::vector<NamedSpectrum>& data, const std::vector<NamedField>& forcing,
                                              const GridSpec& spec, const TimeGrid& time, double mu, Rational p,
                                              const CutoffProfile& cutoff, const XNormOptions& options = {});

}  // namespace modspace
