#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "modspace/freqdecomp.hpp"
#include "modspace/propagators.hpp"
#include "support.hpp"

using namespace modspace;
using testsupport::pi;

namespace {

const SymbolSpec schrodinger{SymbolKind::fourth_order_schrodinger};
const SymbolSpec airy{SymbolKind::airy};

double l2(const GridFunction& f) { return std::sqrt(f.samples().squaredNorm() * f.spec().dx()); }

}  // namespace

TEST_CASE("free flow basics") {
  const GridSpec spec(64.0, 1024);
  std::mt19937_64 rng(17);
  const GridFunction u = testsupport::random_packets(spec, rng, -6.0, 6.0, 4, 2.0);

  CHECK((propagate(u, 0.0, schrodinger).samples() - u.samples()).norm() == 0.0);
  for (SymbolSpec s : {schrodinger, airy}) {
    for (double t : {0.1, -0.1, 1.0, -1.0, 10.0, -10.0}) {
      CAPTURE(t);
      const double r = l2(propagate(u, t, s)) / l2(u);
      CHECK(std::abs(r - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("single modes pick up the exact phase") {
  const GridSpec spec(64.0, 1024);
  const double k0 = 2.0 * pi * 7.0 / spec.length();
  const GridFunction e = GridFunction::sample(spec, [k0](double x) { return std::polar(1.0, k0 * x); });
  for (double t : {0.3, -2.0}) {
    const GridFunction a = propagate(e, t, schrodinger);
    CHECK(testsupport::rel_l2(a.samples(), std::polar(1.0, t * std::pow(k0, 4)) * e.samples()) <= 1e-12);
    const GridFunction b = propagate(e, t, airy);
    CHECK(testsupport::rel_l2(b.samples(), std::polar(1.0, t * std::pow(k0, 3)) * e.samples()) <= 1e-12);
  }
}

TEST_CASE("group law and time reversal") {
  const GridSpec spec(64.0, 1024);
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const GridFunction u = testsupport::random_modes(spec, rng, 400);
    std::uniform_real_distribution<double> ut(-10.0, 10.0);
    const double t1 = ut(rng), t2 = ut(rng);
    for (SymbolSpec s : {schrodinger, airy}) {
      const GridFunction a = propagate(propagate(u, t1, s), t2, s);
      const GridFunction b = propagate(u, t1 + t2, s);
      CHECK(testsupport::rel_l2(a.samples(), b.samples()) <= 1e-12);
      const GridFunction back = propagate(propagate(u, t1, s), -t1, s);
      CHECK(testsupport::rel_l2(back.samples(), u.samples()) <= 1e-12);
    }
  }
}

TEST_CASE("band projections commute with the flow") {
  const GridSpec spec(64.0, 1024);
  const CutoffProfile sigma = build_cutoff(2);
  std::mt19937_64 rng(29);
  const GridFunction u = testsupport::random_packets(spec, rng, -10.0, 10.0, 5, 1.0);
  for (BandIndex b : {BandIndex{0, 0}, BandIndex{0, 3}, BandIndex{-2, -7}}) {
    const GridFunction a = propagate(box_project(u, b, sigma), 0.7, schrodinger);
    const GridFunction c = box_project(propagate(u, 0.7, schrodinger), b, sigma);
    CHECK((a.samples() - c.samples()).norm() <= 1e-12 * u.samples().norm());
  }
}

TEST_CASE("space-time free flow matches single-time propagation") {
  const GridSpec spec(32.0, 256);
  const TimeGrid time(0.5, 16);
  std::mt19937_64 rng(5);
  const GridFunction u = testsupport::random_packets(spec, rng, -3.0, 3.0);
  const SpaceTimeField w = propagate(u, time, airy);
  for (Index n : {0, 5, 16})
    CHECK(testsupport::rel_l2(w.frame(n).samples(), propagate(u, time.time(n), airy).samples()) <= 1e-12);
}

TEST_CASE("Duhamel integral") {
  const GridSpec spec(32.0, 256);

  SUBCASE("zero forcing") {
    const TimeGrid time(1.0, 8);
    CHECK(duhamel(SpaceTimeField::zero(spec, time), schrodinger).samples().norm() == 0.0);
  }
  SUBCASE("forcing that is constant in the interaction picture") {
    std::mt19937_64 rng(6);
    const GridFunction g = testsupport::random_packets(spec, rng, -2.0, 2.0);
    const TimeGrid time(0.5, 32);
    const SpaceTimeField f = propagate(g, time, schrodinger);
    const SpaceTimeField a = duhamel(f, schrodinger);
    for (Index n : {1, 10, 32}) {
      const CVector expect = time.time(n) * propagate(g, time.time(n), schrodinger).samples();
      CHECK(testsupport::rel_l2(a.frame(n).samples(), expect) <= 1e-12);
    }
  }
  SUBCASE("time-independent single mode converges at second order") {
    const double k0 = 2.0 * pi * 3.0 / spec.length();
    const GridFunction e = GridFunction::sample(spec, [k0](double x) { return std::polar(1.0, k0 * x); });
    for (SymbolSpec s : {schrodinger, airy}) {
      const double w = s.dispersion(k0);
      const double T = 2.0;
      std::vector<double> errs;
      for (Index m : {16, 32, 64, 128}) {
        const TimeGrid time(T, m);
        const SpaceTimeField f = SpaceTimeField::sample(spec, time, [k0](double, double x) {
          return std::polar(1.0, k0 * x);
        });
        const SpaceTimeField a = duhamel(f, s);
        double err = 0.0, ref = 0.0;
        for (Index n = 0; n <= m; ++n) {
          const double t = time.time(n);
          const Complex factor = (std::polar(1.0, t * w) - 1.0) / Complex(0.0, w);
          const CVector expect = factor * e.samples();
          err = std::max(err, (a.frame(n).samples() - expect).norm());
          ref = std::max(ref, expect.norm());
        }
        errs.push_back(err / ref);
      }
      for (std::size_t i = 1; i < errs.size(); ++i) {
        const double order = std::log2(errs[i - 1] / errs[i]);
        CHECK(order >= 1.9);
      }
      CHECK(errs.back() <= 1e-3);
    }
  }
}

TEST_CASE("symbol names") {
  CHECK(symbol_from_string("gkdv") == SymbolKind::airy);
  CHECK(symbol_from_string(to_string(SymbolKind::fourth_order_schrodinger)) == SymbolKind::fourth_order_schrodinger);
  CHECK_THROWS_AS(symbol_from_string("heat"), InvalidArgument);
}
