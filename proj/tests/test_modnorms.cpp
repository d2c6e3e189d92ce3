#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "modspace/modnorms.hpp"
#include "support.hpp"

using namespace modspace;
using testsupport::pi;

namespace {

const CutoffProfile sigma = build_cutoff(2);

GridFunction gaussian(const GridSpec& spec) {
  return GridFunction::sample(spec, [](double x) { return std::exp(-0.5 * x * x); });
}

// phi with phihat(xi) = bump supported in [-1/8, 1/8], modulated to e^{i k x}.
GridFunction single_band(const GridSpec& spec, double k) {
  auto hat = [](double t) { return smooth_step(16.0 * (0.125 - std::abs(t))); };
  return GridFunction::from_spectrum(spec, [&](double xi) { return hat(xi - k); });
}

}  // namespace

TEST_CASE("Lebesgue norms") {
  const GridSpec spec(64.0, 4096);
  SUBCASE("Gaussian L^2 norm is pi^{1/4}") {
    CHECK(std::abs(lp_norm(gaussian(spec), 2.0) - std::pow(pi, 0.25)) <= 1e-10 * std::pow(pi, 0.25));
  }
  SUBCASE("smooth plateau of width 2 has L^1 norm near 2") {
    const GridFunction f = GridFunction::sample(spec, [](double x) {
      return smooth_step(10.0 * (1.05 - std::abs(x)));
    });
    CHECK(std::abs(lp_norm(f, 1.0) - 2.0) <= 0.02);
  }
  SUBCASE("homogeneity and the brute-force oracle") {
    std::mt19937_64 rng(1);
    const GridFunction f = testsupport::random_packets(spec, rng, -5.0, 5.0);
    for (double p : {1.0, 1.5, 2.0, 3.0, 14.0 / 3.0, 26.0, kInf}) {
      CAPTURE(p);
      const double n = lp_norm(f, p);
      CHECK(std::abs(n - testsupport::direct_lp(spec, f.samples(), p)) <= 1e-12 * n);
      CHECK(std::abs(lp_norm(Complex(-2.5, 1.0) * f, p) - std::abs(Complex(-2.5, 1.0)) * n) <= 1e-12 * n);
    }
  }
  SUBCASE("bad exponents") {
    CHECK_THROWS_AS(lp_norm(gaussian(spec), 0.5), InvalidArgument);
    CHECK_THROWS_AS(lp_norm(gaussian(spec), std::nan("")), InvalidArgument);
  }
}

TEST_CASE("Sobolev and Fourier-Lebesgue norms") {
  const GridSpec spec(64.0, 1024);
  const GridFunction g = gaussian(spec);
  // ||g||_{H^1-dot}^2 = (2 pi)^{-1} int xi^2 2 pi e^{-xi^2} = sqrt(pi) / 2.
  CHECK(sobolev_norm(g, 1.0) == doctest::Approx(std::sqrt(std::sqrt(pi) / 2.0)).epsilon(1e-10));
  CHECK(sobolev_norm(g, 0.0) == doctest::Approx(lp_norm(g, 2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(sobolev_norm(g, -0.5), SingularMultiplier);
  // ||ghat||_1 = sqrt(2 pi) int e^{-xi^2/2} = 2 pi.
  CHECK(fourier_lebesgue_norm(g, 1.0) == doctest::Approx(2.0 * pi).epsilon(1e-10));
  CHECK(fourier_lebesgue_norm(g, kInf) == doctest::Approx(std::sqrt(2.0 * pi)).epsilon(1e-12));
}

TEST_CASE("modulation norms") {
  const GridSpec spec(128.0 * pi, 2048);  // integer frequencies are nodes
  const GridFunction phi = single_band(spec, 0.0);
  const double phi2 = lp_norm(phi, 2.0);

  SUBCASE("single-band function carries its full L^2 norm in one band") {
    for (double k : {0.0, 3.0, -5.0}) {
      const GridFunction f = single_band(spec, k);
      const double m21 = modulation_norm(f, 2.0, 1.0, 0, sigma);
      CHECK(std::abs(m21 / phi2 - 1.0) <= 1e-10);
      const auto bands = band_norms(f, 2.0, 0, sigma);
      REQUIRE(bands.size() == 1);
      CHECK(bands[0].k == static_cast<long>(k));
    }
  }
  SUBCASE("integer modulation shifts the band index only") {
    std::mt19937_64 rng(8);
    const GridFunction f = testsupport::random_packets(spec, rng, -4.0, 4.0, 4, 3.0);
    const GridFunction g = GridFunction::from_samples(
        spec, CVector(f.samples().array() * spec.positions().unaryExpr([](double x) {
                                                 return std::polar(1.0, 2.0 * x);
                                               }).array()));
    for (double p : {1.0, 2.0, 4.0})
      CHECK(modulation_norm(g, p, 1.0, 0, sigma) ==
            doctest::Approx(modulation_norm(f, p, 1.0, 0, sigma)).epsilon(1e-10));
  }
  SUBCASE("l^1 dominates l^inf and l^2 is the L^2 norm up to overlap") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 5; ++trial) {
      const GridFunction f = testsupport::random_packets(spec, rng, -8.0, 8.0, 5, 2.0);
      CHECK(modulation_norm(f, 2.0, kInf, 0, sigma) <= modulation_norm(f, 2.0, 1.0, 0, sigma));
      const double m22 = modulation_norm(f, 2.0, 2.0, 0, sigma);
      CHECK(m22 <= lp_norm(f, 2.0) * (1.0 + 1e-12));
      CHECK(m22 >= lp_norm(f, 2.0) / std::sqrt(3.0));
    }
  }
  SUBCASE("p != 2 band norms agree with explicit projections") {
    std::mt19937_64 rng(15);
    const GridFunction f = testsupport::random_packets(spec, rng, -3.0, 3.0, 3, 2.0);
    for (int j : {0, -2}) {
      for (const auto& b : band_norms(f, 4.0, j, sigma)) {
        const GridFunction p = box_project(f, BandIndex{j, b.k}, sigma);
        CHECK(b.norm == doctest::Approx(testsupport::direct_lp(spec, p.samples(), 4.0)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("STFT cross-check") {
  const GridSpec spec(64.0, 1024);
  const WindowFunction w = WindowFunction::gaussian(spec);
  CHECK(lp_norm(w.g(), 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(stft_modulation_norm(GridFunction::zero(spec), w, 2.0, 1.0) == 0.0);

  SUBCASE("p = q = 2 reproduces sqrt(2 pi) ||f||_2") {
    // sum over integer xi of |ghat(eta - xi)|^2 is 2 pi up to e^{-pi^2} aliasing.
    const GridFunction g = gaussian(spec);
    const double a = stft_modulation_norm(g, w, 2.0, 2.0);
    CHECK(a == doctest::Approx(std::sqrt(2.0 * pi) * lp_norm(g, 2.0)).epsilon(1e-3));
    const GridSpec fine(64.0, 2048);
    const double b = stft_modulation_norm(gaussian(fine), WindowFunction::gaussian(fine), 2.0, 2.0);
    CHECK(std::abs(a - b) <= 0.01 * a);
  }
  SUBCASE("ratio to the uniform-decomposition norm is stable") {
    std::mt19937_64 rng(31);
    double lo = kInf, hi = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const GridFunction f = testsupport::random_packets(spec, rng, -10.0, 10.0, 1 + trial % 5, 0.5 + trial % 4);
      const double r = stft_modulation_norm(f, w, 2.0, 1.0) / modulation_norm(f, 2.0, 1.0, 0, sigma);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    CHECK(lo > 0.0);
    CHECK(hi / lo <= 10.0);
  }
}

TEST_CASE("scaling-limit norm upper bounds") {
  const GridSpec spec(256.0, 2048);
  std::mt19937_64 rng(44);
  DecompositionOptions opts;
  opts.j_min = -6;

  SUBCASE("bounded by the M_{p,q} norm, witness reconstructs") {
    for (int trial = 0; trial < 6; ++trial) {
      const GridFunction f = testsupport::random_packets(spec, rng, -3.0, 3.0, 4, 4.0);
      for (double mu : {-0.2, 0.0, 0.1, 0.3}) {
        const NormBound b = scaling_limit_norm_ub(f, mu, 2.0, 1.0, sigma, opts);
        CHECK(b.value <= modulation_norm(f, 2.0, 1.0, 0, sigma) * (1.0 + 1e-12));
        CHECK(testsupport::rel_l2(b.witness.sum(spec).coeffs(), f.coeffs()) <= 1e-10);
        CHECK(std::abs(decomposition_cost(b.witness, mu, 2.0, 1.0, sigma) - b.value) <= 1e-12 * b.value);
      }
    }
  }
  SUBCASE("single piece at scale j0") {
    const GridFunction f = testsupport::random_packets(spec, rng, 0.1, 0.3, 2, 30.0);
    for (int j0 : {-1, -3, -5}) {
      const double mu = 0.25;
      const double bound = std::exp2(j0 * mu) * modulation_norm(f, 2.0, 1.0, j0, sigma);
      CHECK(scaling_limit_norm_ub(f, mu, 2.0, 1.0, sigma, opts).value <= bound * (1.0 + 1e-12));
    }
  }
  SUBCASE("monotone in mu on a fixed witness") {
    const GridFunction f = testsupport::random_packets(spec, rng, -2.0, 2.0, 5, 6.0);
    for (Strategy s : opts.strategies) {
      const Decomposition d = decompose(f, s, 0.0, 2.0, 1.0, sigma, opts, 1.0);
      double prev = kInf;
      for (double mu : {-0.5, -0.1, 0.0, 0.1, 0.5}) {
        const double c = decomposition_cost(d, mu, 2.0, 1.0, sigma);
        CHECK(c <= prev * (1.0 + 1e-14));
        prev = c;
      }
    }
  }
  SUBCASE("homogeneity and triangle inequality") {
    for (int trial = 0; trial < 4; ++trial) {
      const GridFunction f = testsupport::random_packets(spec, rng, -2.0, 2.0, 3, 5.0);
      const GridFunction g = testsupport::random_packets(spec, rng, -1.0, 1.0, 3, 8.0);
      const double mu = 0.2;
      const Complex c(0.0, -3.0);
      const NormBound bf = scaling_limit_norm_ub(f, mu, 2.0, 1.0, sigma, opts);
      const NormBound bcf = scaling_limit_norm_ub(c * f, mu, 2.0, 1.0, sigma, opts);
      CHECK(bcf.value == doctest::Approx(3.0 * bf.value).epsilon(1e-12));
      const NormBound bg = scaling_limit_norm_ub(g, mu, 2.0, 1.0, sigma, opts);
      const NormBound bsum = scaling_limit_norm_ub(f + g, mu, 2.0, 1.0, sigma, opts);
      // Linear strategies give witnesses of f + g as sums of witnesses.
      for (Strategy s : {Strategy::trivial, Strategy::littlewood_paley}) {
        for (double radius : opts.lp_radii) {
          const double cf = decomposition_cost(decompose(f, s, mu, 2.0, 1.0, sigma, opts, radius), mu, 2.0, 1.0, sigma);
          const double cg = decomposition_cost(decompose(g, s, mu, 2.0, 1.0, sigma, opts, radius), mu, 2.0, 1.0, sigma);
          const double cs =
              decomposition_cost(decompose(f + g, s, mu, 2.0, 1.0, sigma, opts, radius), mu, 2.0, 1.0, sigma);
          CHECK(cs <= (cf + cg) * (1.0 + 1e-12));
          CHECK(bsum.value <= (cf + cg) * (1.0 + 1e-12));
        }
      }
      (void)bg;
    }
  }
  SUBCASE("strategy names round-trip") {
    for (Strategy s : opts.strategies) CHECK(strategy_from_string(to_string(s)) == s);
    CHECK_THROWS_AS(strategy_from_string("optimal"), InvalidArgument);
  }
}

TEST_CASE("counterexample datum") {
  const GridSpec spec(std::ldexp(1.0, 18), Index{1} << 16);
  const double mu = 0.1;

  SUBCASE("profile has unit L^2 norm and the stated support") {
    CHECK(counterexample_profile_hat(0.125) == 0.0);
    CHECK(counterexample_profile_hat(-0.2) == 0.0);
    const GridSpec s(4096.0, 4096);
    const GridFunction phi = GridFunction::from_spectrum(s, counterexample_profile_hat);
    CHECK(lp_norm(phi, 2.0) == doctest::Approx(1.0).epsilon(1e-8));
  }
  SUBCASE("band norms follow 2^{-j mu} / j^2") {
    const GridFunction u = build_counterexample(mu, -8, spec);
    for (int j = -8; j <= -3; ++j) {
      CAPTURE(j);
      const double b = lp_norm(box_project(u, counterexample_band(j), sigma), 2.0);
      const double expect = std::exp2(-j * mu) / (j * j);
      CHECK(b <= 2.0 * expect);
      CHECK(b >= 0.5 * expect);
    }
  }
  SUBCASE("grid too small") {
    CHECK_THROWS_AS(build_counterexample(mu, -8, GridSpec(4096.0, 4096)), ResolutionError);
    CHECK_THROWS_AS(build_counterexample(mu, -3, GridSpec(4096.0, 256)), ResolutionError);
    CHECK_THROWS_AS(build_counterexample(-0.1, -3, spec), InvalidArgument);
  }
}

TEST_CASE("embedding checks") {
  const GridSpec spec(1024.0, 8192);
  auto bump = [](double t) { return 1.0 - smooth_step(2.0 * (std::abs(t) - 0.5)); };
  std::vector<NamedSpectrum> family = {
      {"bump", [=](double xi) { return Complex(bump(xi)); }},
      {"shifted", [=](double xi) { return Complex(bump(2.0 * (xi - 0.5))); }},
  };
  EmbeddingOptions opts;
  opts.decomposition.j_min = -6;

  CHECK(modulation_lebesgue_admissible(2.0, 1.0, 2.0));
  CHECK_FALSE(modulation_lebesgue_admissible(2.0, 2.0, 1.5));
  CHECK(scaling_regime(2.0, 1.0, 0.3));
  CHECK_FALSE(scaling_regime(2.0, 1.0, 0.6));
  CHECK(embedding_admissible(EmbeddingTarget::lebesgue, 2.0, 1.0, 2.0, 0.0));
  CHECK_FALSE(embedding_admissible(EmbeddingTarget::lebesgue, 2.0, 1.0, 2.0, 0.2));
  CHECK(embedding_admissible(EmbeddingTarget::fourier_lebesgue, 2.0, 1.0, 2.0, 0.0));
  CHECK_FALSE(embedding_admissible(EmbeddingTarget::fourier_lebesgue, 3.0, 1.0, 1.2, 0.0));

  SUBCASE("admissible: bounded ratios") {
    const EstimateReport r = embedding_check(family, spec, EmbeddingTarget::lebesgue, 2.0, 1.0, 2.0, 0.0, sigma, opts);
    CHECK(r.passed);
    CHECK(r.rows.size() == family.size() * opts.log2_lambdas.size());
    CHECK(r.max_ratio <= 1.0 + 1e-9);
  }
  SUBCASE("scaling condition violated: growth slope") {
    opts.log2_lambdas = {-4, -3, -2, -1, 0};
    const EstimateReport r = embedding_check(family, spec, EmbeddingTarget::lebesgue, 2.0, 1.0, 2.0, 0.3, sigma, opts);
    CHECK(r.has_fit);
    CHECK(r.predicted_slope == doctest::Approx(-0.3));
    CHECK(std::abs(r.fit.slope - r.predicted_slope) <= 0.1);
    CHECK(r.passed);
  }
  SUBCASE("r below p v q is rejected without computation") {
    const EstimateReport r = embedding_check(family, spec, EmbeddingTarget::lebesgue, 2.0, 2.0, 1.5, 0.0, sigma, opts);
    CHECK_FALSE(r.passed);
    CHECK(r.rows.empty());
  }
}
