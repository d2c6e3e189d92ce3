// Acceptance run: one PASS/FAIL line per criterion, exit 0 iff all pass.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "modspace/estimates.hpp"
#include "modspace/families.hpp"
#include "modspace/freqdecomp.hpp"
#include "modspace/modnorms.hpp"
#include "modspace/propagators.hpp"
#include "modspace/solver.hpp"

using namespace modspace;

namespace {

constexpr std::uint64_t kSeed = 20260101;

struct Outcome {
  bool pass = true;
  std::vector<std::string> detail;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail.push_back((ok ? "ok   " : "FAIL ") + what);
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

double rel_l2(const CVector& a, const CVector& b) { return (a - b).norm() / b.norm(); }

// ---------------------------------------------------------------------------

Outcome exact_formulas() {
  Outcome o;
  const D4nlsParams d8 = d4nls_params(8);
  o.check(d8.p == Rational(4) && d8.a == Rational(0) && d8.mu_max == Rational(0) && d8.s_c == Rational(1, 8),
          "d4nls m=8: (p, A, mu_max, s_c) = (" + to_string(d8.p) + ", " + to_string(d8.a) + ", " +
              to_string(d8.mu_max) + ", " + to_string(d8.s_c) + ")");
  const D4nlsParams d16 = d4nls_params(16);
  o.check(d16.p == Rational(8) && d16.a == Rational(3, 13) && d16.mu_max == Rational(3, 13) &&
              d16.s_c == Rational(5, 16),
          "d4nls m=16: (p, A, mu_max, s_c) = (" + to_string(d16.p) + ", " + to_string(d16.a) + ", " +
              to_string(d16.mu_max) + ", " + to_string(d16.s_c) + ")");
  const GkdvParams g4 = gkdv_params(4);
  o.check(g4.a == Rational(0) && g4.mu_max == Rational(0) && g4.s_c == Rational(0),
          "gkdv m=4: (A, mu_max, s_c) = (" + to_string(g4.a) + ", " + to_string(g4.mu_max) + ", " +
              to_string(g4.s_c) + ")");
  return o;
}

Outcome scaling_laws() {
  Outcome o;
  const ScalingConfig config;  // N = 2048, M = 256, scales -6..0, tolerance 0.1
  o.check(config.points == 2048 && config.steps == 256 && config.tolerance == 0.1, "grid N=2048, M=256, tol 0.1");
  const auto family = scaling_family(kSeed, 4, config.k);
  int fitted = 0;
  std::set<std::string> matched;
  const Rational targets[] = {strichartz_a(Rational(4)), strichartz_b(Rational(4)), strichartz_a(Rational(8)),
                              strichartz_b(Rational(8))};
  for (const ScalingCase& c : standard_scaling_cases()) {
    const EstimateReport r = verify_scaling_law(family, c, config);
    const bool ok = r.passed && r.has_fit && std::abs(r.fit.slope - r.predicted_slope) <= 0.1 && r.fit.points >= 4;
    if (ok) ++fitted;
    o.check(ok, c.id + ": slope " + fmt(r.fit.slope) + " vs " + fmt(r.predicted_slope) + " (" +
                    std::to_string(r.fit.points) + " scales)");
    for (int i = 0; i < 4; ++i) {
      const bool is_duhamel_target = (i % 2 == 1);
      const bool kind_ok = is_duhamel_target ? c.duhamel : (!c.duhamel && c.alpha == 0.0);
      if (ok && kind_ok && std::abs(c.predicted_slope() - to_double(targets[i])) <= 1e-12)
        matched.insert(std::to_string(i));
    }
  }
  o.check(fitted >= 6, std::to_string(fitted) + " parameter points within 0.1");
  o.check(matched.size() == 4, "A(4), B(4), A(8), B(8) = 0, 0, 3/13, 4/13 all fitted (" +
                                   std::to_string(matched.size()) + "/4)");
  return o;
}

Outcome estimate_boundedness() {
  Outcome o;
  const auto family = standard_family(kSeed, 20, 32.0);
  const SweepConfig config;  // k_max 32, refinement check at (2N, 2M) within 5%
  o.check(config.k_max == 32 && config.check_refinement && config.refinement_tol == 0.05,
          "bands |k| <= 32, (N, M) doubling within 5%");
  std::vector<EstimateReport> reports;
  for (double p : {4.0, 8.0}) {
    auto sm = verify_smoothing_maximal(family, p, config);
    // Smoothing and the endpoint do not depend on p.
    if (p == 4.0)
      reports.insert(reports.end(), sm.begin(), sm.end());
    else
      reports.push_back(sm[1]);
    for (auto& r : verify_homogeneous_strichartz(family, p, config)) reports.push_back(r);
    reports.push_back(verify_duhamel(family, p, config));
  }
  for (const EstimateReport& r : reports) {
    std::string what = r.estimate_id + ": max ratio " + fmt(r.max_ratio) + ", " + std::to_string(r.rows.size()) + " rows";
    for (const auto& n : r.notes) what += "; " + n;
    o.check(r.passed && std::isfinite(r.max_ratio) && !r.rows.empty(), what);
  }
  return o;
}

Outcome counterexample() {
  Outcome o;
  const double mu = 0.1;
  const GridSpec spec(std::ldexp(1.0, 18), Index{1} << 16);
  DecompositionOptions options;
  options.j_min = -8;
  const std::vector<int> js = {-2, -3, -4, -5, -6, -7, -8};
  const auto rows = counterexample_table(mu, js, spec, CutoffProfile(2), options);

  bool monotone = true;
  for (std::size_t i = 1; i < rows.size(); ++i) monotone = monotone && rows[i].l2 > rows[i - 1].l2;
  o.check(monotone, "partial-sum L2 norm grows monotonically: " + fmt(rows.front().l2) + " -> " + fmt(rows.back().l2));

  std::vector<double> xs, ys;
  for (const auto& r : rows)
    if (r.j_min <= -3) {
      xs.push_back(-r.j_min);
      ys.push_back(std::log2(static_cast<double>(r.j_min) * r.j_min * r.band_l2));
    }
  const SlopeFit fit = fit_slope(Eigen::Map<const RVector>(xs.data(), static_cast<Index>(xs.size())),
                                 Eigen::Map<const RVector>(ys.data(), static_cast<Index>(ys.size())));
  o.check(std::abs(fit.slope - mu) <= 0.2 * mu, "growth rate of 2^{-J mu}/J^2 law: slope " + fmt(fit.slope) +
                                                    " vs mu = " + fmt(mu) + " (J <= -3)");

  auto at = [&](int j) {
    for (const auto& r : rows)
      if (r.j_min == j) return r.m_bound;
    return std::numeric_limits<double>::quiet_NaN();
  };
  const double change = std::abs(at(-8) - at(-6)) / at(-6);
  o.check(change <= 0.05, "M^0.1_{2,1} bound " + fmt(at(-6)) + " -> " + fmt(at(-8)) + ", change " + fmt(change));
  return o;
}

Outcome partition_orthogonality() {
  Outcome o;
  const CutoffProfile sigma(2);

  double worst = 0.0;
  for (int i = -4000; i <= 4000; ++i) {
    const double xi = i * 1e-3 + 0.000123;
    double s = 0.0;
    for (long k = -6; k <= 6; ++k) s += sigma(xi - static_cast<double>(k));
    worst = std::max(worst, std::abs(s - 1.0));
  }
  const GridSpec spec(256.0, 4096);
  const CVector ones = CVector::Ones(spec.points());
  const GridFunction f = packet_sum("f", random_packets(kSeed, 6, -20.0, 20.0), kInf).on(spec);
  double recon = 0.0;
  for (int j = -8; j <= 0; ++j) {
    CVector s = CVector::Zero(spec.points()), r = CVector::Zero(spec.points());
    for (long k : bands_touching(spec, j)) {
      s += band_coeffs(spec, ones, BandIndex{j, k}, sigma);
      r += band_coeffs(spec, f.coeffs(), BandIndex{j, k}, sigma);
    }
    worst = std::max(worst, (s - ones).cwiseAbs().maxCoeff());
    recon = std::max(recon, rel_l2(r, f.coeffs()));
  }
  o.check(worst <= 1e-12, "partition of unity: " + fmt(worst));
  o.check(recon <= 1e-12, "reconstruction, scales -8..0: " + fmt(recon));

  const GridSpec small(64.0, 1024);
  const GridFunction g = packet_sum("g", random_packets(kSeed + 1, 8, -20.0, 20.0, 8.0, 0.5, 1.0), kInf).on(small);
  double orth = 0.0;
  for (int j : {0, -1, -3})
    for (long k = -6; k <= 6; ++k)
      for (long kp : {k + 2, k + 3, k - 2, k - 5}) {
        const CVector once = band_coeffs(small, g.coeffs(), BandIndex{j, kp}, sigma);
        orth = std::max(orth, band_coeffs(small, once, BandIndex{j, k}, sigma).norm() / g.coeffs().norm());
      }
  o.check(orth <= 1e-12, "box_k box_k' = 0 for |k - k'| >= 2: " + fmt(orth));

  double unitary = 0.0, group = 0.0;
  for (SymbolSpec s : {SymbolSpec{SymbolKind::fourth_order_schrodinger}, SymbolSpec{SymbolKind::airy}})
    // Dyadic times, so that t1 + t2 is exact in double.
    for (double t1 : {0.125, -0.6875, 3.0, -10.0})
      for (double t2 : {0.25, -2.0, 7.5}) {
        const GridFunction a = propagate(g, t1, s);
        unitary = std::max(unitary, std::abs(a.coeffs().norm() / g.coeffs().norm() - 1.0));
        group = std::max(group, rel_l2(propagate(a, t2, s).samples(), propagate(g, t1 + t2, s).samples()));
      }
  o.check(unitary <= 1e-12, "W(t) unitarity: " + fmt(unitary));
  o.check(group <= 1e-12, "group law W(t1) W(t2) = W(t1 + t2): " + fmt(group));
  return o;
}

// The d4nls cell must hold the dispersed solution up to T (boundary mass
// <= 1e-8); the gkdv runs spread less and need the finer frequency grid.
const GridSpec kSolveGrid(512.0, 1024);
const GridSpec kKdvGrid(256.0, 1024);
const TimeGrid kSolveTime(0.5, 256);

double max_boundary_mass(const SpaceTimeField& u) {
  double m = 0.0;
  for (Index n = 0; n < u.time().frames(); ++n) m = std::max(m, boundary_mass(u.frame(n)));
  return m;
}

ProblemSpec accepted_run() { return gaussian_problem(Equation::d4nls, 8, 1.0, 0.01, kSolveGrid, kSolveTime); }

Outcome solver_cross_oracle() {
  Outcome o;
  const ProblemSpec spec = accepted_run();
  const PicardResult p = picard_solve(spec);
  const IterationTrace& t = p.trace;
  o.check(t.converged && t.final_ratio() <= 0.1 && t.residuals.size() <= 10,
          "d4nls m=8 amp 0.01: converged in " + std::to_string(t.residuals.size()) + " iterations, final rho " +
              fmt(t.final_ratio()));
  const ReferenceResult r = reference_solve(spec);
  const double diff = sup_l2(p.u - r.u) / sup_l2(r.u);
  o.check(diff <= 1e-6, "Picard vs reference, L^inf_t L^2_x: " + fmt(diff));
  const double edge = max_boundary_mass(p.u);
  o.check(edge <= 1e-8, "boundary mass " + fmt(edge));

  const ProblemSpec kdv = gaussian_problem(Equation::gkdv, 4, 1.0, 0.5, kKdvGrid, kSolveTime);
  const double drift_p = mass_drift(picard_solve(kdv).u);
  const double drift_r = mass_drift(reference_solve(kdv).u);
  o.check(drift_p <= 1e-6 && drift_r <= 1e-6,
          "gkdv m=4 real mass drift: Picard " + fmt(drift_p) + ", reference " + fmt(drift_r));

  for (Equation e : {Equation::d4nls, Equation::gkdv}) {
    const bool d4 = e == Equation::d4nls;
    const ProblemSpec lin = gaussian_problem(e, d4 ? 8 : 4, 0.0, 0.5, d4 ? kSolveGrid : kKdvGrid, kSolveTime);
    const SpaceTimeField free = propagate(lin.u0, lin.time, lin.symbol());
    const double a = sup_l2(picard_solve(lin).u - free) / sup_l2(free);
    const double b = sup_l2(reference_solve(lin).u - free) / sup_l2(free);
    o.check(a <= 1e-12 && b <= 1e-12,
            to_string(e) + " lambda=0 vs free flow: Picard " + fmt(a) + ", reference " + fmt(b));
  }
  return o;
}

Outcome lipschitz() {
  Outcome o;
  LipschitzOptions options;
  options.seed = kSeed;
  o.check(options.deltas == std::vector<double>{1e-2, 1e-3, 1e-4, 1e-5} && options.directions == 5 &&
              options.max_spread == 2.0,
          "deltas 1e-2..1e-5, 5 directions, spread <= 2");
  const LipschitzReport r = lipschitz_probe(accepted_run(), options);
  o.check(r.spread_l2 <= 2.0, "L^inf_t L^2_x ratio spread " + fmt(r.spread_l2) + " over " +
                                  std::to_string(r.l2.rows.size()) + " probes");
  o.check(r.spread_work <= 2.0, "work-norm ratio spread " + fmt(r.spread_work));
  o.check(r.passed, "probe verdict");
  return o;
}

Outcome covariance() {
  Outcome o;
  const CovarianceCheck c = scaling_covariance(Equation::d4nls, 8, 1.0, [](double x) { return std::exp(-0.5 * x * x); },
                                               kSolveGrid, kSolveTime, 2.0);
  o.check(c.relative_error <= 1e-6, "lambda=2 dilation, relative error " + fmt(c.relative_error) +
                                        " (nonlinear part " + fmt(c.nonlinear_fraction) + ")");
  return o;
}

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "exact parameter formulas", 1, exact_formulas},
      {2, "scaling-law slopes", 300, scaling_laws},
      {3, "estimate boundedness", 900, estimate_boundedness},
      {4, "counterexample dichotomy", 120, counterexample},
      {5, "partition and orthogonality", 60, partition_orthogonality},
      {6, "solver cross-oracle", 600, solver_cross_oracle},
      {7, "Lipschitz probe", 600, lipschitz},
      {8, "scaling covariance", 600, covariance},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  bool all_pass = true;
  std::vector<std::string> summary;
  for (const Criterion& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.check(secs <= c.budget_s, "runtime " + fmt(secs) + " s (budget " + fmt(c.budget_s) + " s)");
    std::cout << "criterion " << c.id << " (" << c.name << ")\n";
    for (const auto& d : o.detail) std::cout << "  " << d << '\n';
    std::cout.flush();
    all_pass = all_pass && o.pass;
    summary.push_back((o.pass ? "PASS" : "FAIL") + std::string(" criterion ") + std::to_string(c.id) + ": " + c.name);
  }
  std::cout << '\n';
  for (const auto& s : summary) std::cout << s << '\n';
  return all_pass ? 0 : 1;
}
