#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "modspace/grid.hpp"
#include "support.hpp"

using namespace modspace;
using testsupport::pi;

namespace {

GridFunction gaussian(const GridSpec& spec, double width = 1.0) {
  return GridFunction::sample(spec, [width](double x) { return std::exp(-0.5 * x * x / (width * width)); });
}

}  // namespace

TEST_CASE("grid spec validation and node layout") {
  CHECK_THROWS_AS(GridSpec(64.0, 1000), InvalidArgument);
  CHECK_THROWS_AS(GridSpec(-1.0, 1024), InvalidArgument);
  CHECK_THROWS_AS(GridSpec(0.0, 1024), InvalidArgument);
  const GridSpec spec(64.0, 1024);
  CHECK(spec.position(0) == -32.0);
  CHECK(spec.dx() == doctest::Approx(1.0 / 16.0));
  CHECK(spec.xi_max() == doctest::Approx(pi * 16.0));
  CHECK(spec.mode(511) == 511);
  CHECK(spec.mode(512) == -512);
  CHECK(spec.slot(-1) == 1023);
  CHECK(spec.frequency(5) == doctest::Approx(2.0 * pi * 5.0 / 64.0));
}

TEST_CASE("forward transform of a Gaussian matches the closed form") {
  const GridSpec spec(64.0, 1024);
  const GridFunction f = gaussian(spec);
  const CVector c = forward_transform(f);
  double err = 0.0;
  for (Index m = 0; m < spec.points(); ++m) {
    const double xi = spec.frequency(m);
    err = std::max(err, std::abs(c[m] - std::sqrt(2.0 * pi) * std::exp(-0.5 * xi * xi)));
  }
  CHECK(err <= 1e-10);
}

TEST_CASE("forward transform agrees with direct quadrature") {
  const GridSpec spec(20.0, 128);
  std::mt19937_64 rng(7);
  const GridFunction f = testsupport::random_packets(spec, rng, -5.0, 5.0);
  for (Index m : {0, 3, 17, 64, 100, 127}) {
    const Complex direct = testsupport::direct_transform(spec, f.samples(), spec.frequency(m));
    CHECK(std::abs(f.coeffs()[m] - direct) <= 1e-12 * f.coeffs().norm());
  }
}

TEST_CASE("zero and single-mode transforms") {
  const GridSpec spec(64.0, 1024);
  CHECK(forward_transform(GridFunction::zero(spec)).norm() == 0.0);
  const GridFunction z = GridFunction::sample(spec, [](double) { return 0.0; });
  CHECK(forward_transform(z).norm() == 0.0);

  const double k0 = 2.0 * pi * 5.0 / spec.length();
  const GridFunction e = GridFunction::sample(spec, [k0](double x) { return std::polar(1.0, k0 * x); });
  const CVector c = forward_transform(e);
  CHECK(std::abs(c[5] - spec.length()) <= 1e-12 * spec.length());
  double rest = 0.0;
  for (Index m = 0; m < spec.points(); ++m)
    if (m != 5) rest = std::max(rest, std::abs(c[m]));
  CHECK(rest <= 1e-12 * spec.length());
}

TEST_CASE("non-finite samples are rejected") {
  const GridSpec spec(8.0, 16);
  CVector s = CVector::Ones(16);
  s[3] = Complex(std::nan(""), 0.0);
  CHECK_THROWS_AS(GridFunction::from_samples(spec, s), InvalidArgument);
  s[3] = Complex(INFINITY, 0.0);
  CHECK_THROWS_AS(GridFunction::from_samples(spec, s), InvalidArgument);
  CHECK_THROWS_AS(GridFunction::from_samples(spec, CVector::Ones(8)), InvalidArgument);
}

TEST_CASE("Parseval and round trip on random inputs") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const GridSpec spec(std::ldexp(1.0, 3 + trial % 5), Index{1} << (6 + trial % 6));
    std::normal_distribution<double> nd;
    CVector s(spec.points());
    for (Index n = 0; n < spec.points(); ++n) s[n] = Complex(nd(rng), nd(rng));
    const GridFunction f = GridFunction::from_samples(spec, s);
    const double lhs = f.samples().squaredNorm() * spec.dx();
    const double rhs = f.coeffs().squaredNorm() / spec.length();
    CHECK(std::abs(lhs - rhs) <= 1e-12 * lhs);
    CHECK(testsupport::rel_l2(to_samples(spec, f.coeffs()), s) <= 1e-12);
    CHECK(testsupport::rel_l2(to_coeffs(spec, to_samples(spec, f.coeffs())), f.coeffs()) <= 1e-12);
  }
}

TEST_CASE("fractional derivative") {
  const GridSpec spec(64.0, 1024);
  std::mt19937_64 rng(3);

  SUBCASE("order zero is the identity") {
    const GridFunction f = testsupport::random_modes(spec, rng, 40);
    const GridFunction g = fractional_derivative(f, 0.0);
    CHECK((g.samples() - f.samples()).norm() == 0.0);
  }
  SUBCASE("single mode is an eigenfunction") {
    const double k0 = 2.0 * pi * 4.0 / spec.length();
    const GridFunction e = GridFunction::sample(spec, [k0](double x) { return std::polar(1.0, k0 * x); });
    const GridFunction d = fractional_derivative(e, 1.5);
    const CVector expect = std::pow(k0, 1.5) * e.samples();
    CHECK(testsupport::rel_l2(d.samples(), expect) <= 1e-12);
  }
  SUBCASE("semigroup D^{1/2} D^{1/2} = D^1") {
    for (int trial = 0; trial < 5; ++trial) {
      const GridFunction f = testsupport::random_modes(spec, rng, 100, true);
      const GridFunction a = fractional_derivative(fractional_derivative(f, 0.5), 0.5);
      const GridFunction b = fractional_derivative(f, 1.0);
      CHECK(testsupport::rel_l2(a.samples(), b.samples()) <= 1e-10);
    }
  }
  SUBCASE("negative orders need mean-zero data") {
    const GridFunction f = testsupport::random_modes(spec, rng, 10, false);
    CHECK_THROWS_AS(fractional_derivative(f, -0.5), SingularMultiplier);
    const GridFunction g = testsupport::random_modes(spec, rng, 10, true);
    const GridFunction h = fractional_derivative(fractional_derivative(g, -0.5), 0.5);
    CHECK(testsupport::rel_l2(h.samples(), g.samples()) <= 1e-12);
    CHECK_THROWS_AS(fractional_derivative(g, -1.5), InvalidArgument);
  }
  SUBCASE("positive orders drop the mean") {
    const GridFunction one = GridFunction::sample(spec, [](double) { return 1.0; });
    CHECK(fractional_derivative(one, 0.7).samples().norm() <= 1e-12);
  }
}

TEST_CASE("dilation") {
  const GridSpec spec(64.0, 1024);
  const GridFunction g = gaussian(spec);

  SUBCASE("lambda = 1 leaves f unchanged") {
    CHECK((dilate(g, 1.0).samples() - g.samples()).norm() == 0.0);
  }
  SUBCASE("L^2 norm scales like lambda^{-1/2}") {
    for (double lambda : {2.0, 0.5, 1.5, 0.3}) {
      const GridFunction d = dilate(g, lambda);
      const double ratio = d.samples().norm() / g.samples().norm();
      CHECK(std::abs(ratio - 1.0 / std::sqrt(lambda)) <= 1e-8 / std::sqrt(lambda));
    }
  }
  SUBCASE("pointwise against the dilated closed form") {
    for (double lambda : {2.0, 0.5, 3.7}) {
      const GridFunction d = dilate(g, lambda);
      const GridFunction expect = gaussian(spec, 1.0 / lambda);
      CHECK((d.samples() - expect.samples()).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
  SUBCASE("sup norm is invariant") {
    // On this grid 2 x_n is again a node and x_n / 2 refines the nodes, so the
    // sampled sup can only shrink under lambda = 2 and grow under 1/2.
    std::mt19937_64 rng(5);
    const GridFunction f = testsupport::random_packets(spec, rng, -3.0, 3.0, 3, 1.5);
    const double top = f.samples().cwiseAbs().maxCoeff();
    CHECK(dilate(f, 2.0).samples().cwiseAbs().maxCoeff() <= top * (1.0 + 1e-10));
    CHECK(dilate(f, 0.5).samples().cwiseAbs().maxCoeff() >= top * (1.0 - 1e-10));
    const GridFunction back = dilate(dilate(f, 0.5), 2.0);
    CHECK(testsupport::rel_l2(back.samples(), f.samples()) <= 1e-9);
  }
  SUBCASE("truncation is flagged") {
    CHECK_THROWS_AS(dilate(gaussian(spec, 8.0), 0.25), TruncationError);
    CHECK_THROWS_AS(dilate(gaussian(spec, 0.1), 4.0), TruncationError);
    CHECK_THROWS_AS(dilate(g, 2000.0), InvalidArgument);
  }
  SUBCASE("fractional derivative commutes with dilation on single modes") {
    const double k0 = 2.0 * pi * 6.0 / spec.length();
    const GridFunction e = GridFunction::sample(spec, [k0](double x) { return std::polar(1.0, k0 * x); });
    for (double s : {0.5, 1.0, 1.5}) {
      const GridFunction a = fractional_derivative(dilate(e, 2.0), s);
      const GridFunction b = dilate(fractional_derivative(e, s), 2.0);
      CHECK(testsupport::rel_l2(a.samples(), std::pow(2.0, s) * b.samples()) <= 1e-12);
    }
    CHECK_THROWS_AS(dilate(e, 1.5), TruncationError);
  }
}

TEST_CASE("time grid") {
  const TimeGrid t(0.5, 256);
  CHECK(t.frames() == 257);
  CHECK(t.trapezoid_weights().sum() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(TimeGrid::from_times({0.0, 0.25, 0.5, 0.75}) == TimeGrid(0.75, 3));
  CHECK_THROWS_AS(TimeGrid::from_times({0.0, 0.1, 0.3}), Unsupported);
  CHECK_THROWS_AS(TimeGrid::from_times({0.1, 0.2, 0.3}), Unsupported);
  CHECK_THROWS_AS(TimeGrid(0.0, 4), InvalidArgument);
}

TEST_CASE("space-time field frames share the grid") {
  const GridSpec spec(16.0, 64);
  const TimeGrid time(1.0, 8);
  const SpaceTimeField u =
      SpaceTimeField::sample(spec, time, [](double t, double x) { return std::exp(-x * x) * (1.0 + t); });
  CHECK(u.samples().cols() == 9);
  CHECK(u.frame(8).samples()[32] == Complex(2.0));
  CHECK(testsupport::rel_l2(to_samples(spec, u.coeffs()), u.samples()) <= 1e-12);
}

TEST_CASE("boundary mass") {
  const GridSpec spec(64.0, 1024);
  CHECK(boundary_mass(gaussian(spec)) <= 1e-30);
  const GridFunction one = GridFunction::sample(spec, [](double) { return 1.0; });
  CHECK(boundary_mass(one) == doctest::Approx(0.125).epsilon(0.01));
}
