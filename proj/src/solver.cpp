#include "modspace/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "modspace/families.hpp"
#include "modspace/modnorms.hpp"
#include "modspace/nonlinear.hpp"
#include "modspace/parallel.hpp"

namespace modspace {

namespace {

// int_0^1 e^{z s} s ds and int_0^1 e^{z s} (1 - s) ds.
std::pair<Complex, Complex> linear_weights(Complex z, Complex ez) {
  if (std::abs(z) < 0.1) {
    Complex w1(0.0), w2(0.0), term(1.0);
    for (int k = 0; k < 14; ++k) {
      if (k > 0) term *= z / static_cast<double>(k);
      w1 += term / static_cast<double>(k + 2);
      w2 += term / static_cast<double>((k + 1) * (k + 2));
    }
    return {w1, w2};
  }
  const Complex z2 = z * z;
  return {(ez * (z - 1.0) + 1.0) / z2, (ez - 1.0 - z) / z2};
}

// D_n = int_0^{t_n} W(t_n - s) F(s) ds with F linear between frames:
// D_n = W(h) D_{n-1} + h (w1 F_{n-1} + w2 F_n).
class ExpQuadrature {
 public:
  ExpQuadrature(const GridSpec& spec, double h, SymbolSpec symbol)
      : step_(spec.points()), w1_(spec.points()), w2_(spec.points()), h_(h) {
    for (Index m = 0; m < spec.points(); ++m) {
      const double xi = spec.frequency(m);
      step_[m] = symbol.multiplier(h, xi);
      const auto [a, b] = linear_weights(Complex(0.0, symbol.dispersion(xi) * h), step_[m]);
      w1_[m] = a;
      w2_[m] = b;
    }
  }

  // Every `stride`-th column of f is a node.
  CMatrix apply(const CMatrix& f, Index stride = 1) const {
    const Index frames = (f.cols() - 1) / stride + 1;
    CMatrix out(f.rows(), frames);
    out.col(0).setZero();
    for (Index n = 1; n < frames; ++n)
      out.col(n) = step_.cwiseProduct(out.col(n - 1)) +
                   h_ * (w1_.cwiseProduct(f.col((n - 1) * stride)) + w2_.cwiseProduct(f.col(n * stride)));
    return out;
  }

 private:
  CVector step_, w1_, w2_;
  double h_;
};

void multiply_derivative(const GridSpec& spec, CMatrix& c, Complex factor) {
  for (Index m = 0; m < c.rows(); ++m) c.row(m) *= factor * Complex(0.0, spec.frequency(m));
}

void multiply_derivative(const GridSpec& spec, CVector& c, Complex factor) {
  for (Index m = 0; m < c.size(); ++m) c[m] *= factor * Complex(0.0, spec.frequency(m));
}

// Coefficients of c d_x P(u^{m+1}) for every frame.
CMatrix forcing_coeffs(const ProblemSpec& spec, const CMatrix& samples) {
  CMatrix f = power_coeffs(spec.u0.spec(), samples, spec.m + 1);
  multiply_derivative(spec.u0.spec(), f, spec.duhamel_factor());
  return f;
}

// ||.||_{L^2_x L^inf_t} from samples.
double l2_linf(const GridSpec& spec, const CMatrix& samples) {
  if (samples.cols() == 0) return 0.0;
  return std::sqrt(samples.cwiseAbs().rowwise().maxCoeff().squaredNorm() * spec.dx());
}

double sup_l2_coeffs(const GridSpec& spec, const CMatrix& c) {
  return std::sqrt(c.colwise().squaredNorm().maxCoeff() / spec.length());
}

bool finite(const CMatrix& c) { return c.allFinite() && c.cwiseAbs().maxCoeff() < 1e150; }

double quadrature_error(const ProblemSpec& spec, const ExpQuadrature& fine, const CMatrix& f, double norm) {
  if (spec.time.steps() % 2 != 0 || norm == 0.0) return 0.0;
  const ExpQuadrature coarse(spec.u0.spec(), 2.0 * spec.time.dt(), spec.symbol());
  const CMatrix a = fine.apply(f);
  const CMatrix b = coarse.apply(f, 2);
  double err = 0.0;
  for (Index n = 0; n < b.cols(); ++n) err = std::max(err, (a.col(2 * n) - b.col(n)).norm());
  return err / std::sqrt(spec.u0.spec().length()) / 3.0 / norm;
}

Rational rat(long long n, long long d = 1) { return Rational(n, d); }

}  // namespace

std::string to_string(Equation e) { return e == Equation::d4nls ? "d4nls" : "gkdv"; }

Equation equation_from_string(const std::string& name) {
  if (name == "d4nls") return Equation::d4nls;
  if (name == "gkdv") return Equation::gkdv;
  throw InvalidArgument("unknown equation '" + name + "'");
}

D4nlsParams d4nls_params(long long m) {
  if (m < 8) throw OutOfRegime("d4nls needs m >= 8");
  const Rational p = rat(m, 2);
  D4nlsParams out{p, strichartz_a(p), strichartz_b(p), rat(3 * (m - 8), 2 * (3 * m + 4)), rat(1, 2) - rat(3, m)};
  if (out.mu_max != out.a) throw InternalError("mu_max differs from A(m/2)");
  return out;
}

GkdvParams gkdv_params(long long m) {
  if (m < 4) throw OutOfRegime("gkdv needs m >= 4");
  const Rational a = rat(m - 4, 2 * m + 2);
  return {a, a, rat(1, 2) - rat(2, m)};
}

void ProblemSpec::validate() const {
  if (m < 1) throw InvalidArgument("m must be >= 1");
  if (!out_of_theorem) {
    if (equation == Equation::d4nls && m < 8) throw OutOfRegime("d4nls needs m >= 8 (or the out-of-theorem flag)");
    if (equation == Equation::gkdv && m < 4) throw OutOfRegime("gkdv needs m >= 4 (or the out-of-theorem flag)");
  }
  if (!std::isfinite(coupling.real()) || !std::isfinite(coupling.imag())) throw InvalidArgument("non-finite coupling");
}

SymbolSpec ProblemSpec::symbol() const {
  return {equation == Equation::d4nls ? SymbolKind::fourth_order_schrodinger : SymbolKind::airy};
}

Complex ProblemSpec::duhamel_factor() const {
  return equation == Equation::d4nls ? Complex(0.0, -1.0) * coupling : coupling;
}

MixedNormSpec ProblemSpec::work_norm() const {
  const double p = 0.5 * m;
  return {p + 2.0 / 3.0, 3.0 * p + 2.0};
}

ProblemSpec gaussian_problem(Equation e, int m, Complex coupling, double amplitude, const GridSpec& spec,
                             const TimeGrid& time) {
  return {e, m, coupling, GridFunction::sample(spec, [&](double x) { return amplitude * std::exp(-0.5 * x * x); }),
          time};
}

double IterationTrace::max_ratio() const {
  return ratios.empty() ? 0.0 : *std::max_element(ratios.begin(), ratios.end());
}

double IterationTrace::final_ratio() const { return ratios.empty() ? 0.0 : ratios.back(); }

PicardResult picard_solve(const ProblemSpec& spec, double amplitude, const PicardOptions& options) {
  spec.validate();
  if (options.max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
  const GridSpec& grid = spec.u0.spec();
  const TimeGrid& time = spec.time;
  const FlowTable flow(grid, time, spec.symbol());
  const ExpQuadrature quad(grid, time.dt(), spec.symbol());
  const CutoffProfile cutoff(options.cutoff_smoothness);

  const CMatrix lin_c = flow.free_coeffs(amplitude * spec.u0.coeffs());
  const CMatrix lin = to_samples(grid, lin_c);
  IterationTrace trace;
  trace.linear_norm = l2_linf(grid, lin);
  if (options.keep_iterates) trace.iterates.push_back(SpaceTimeField::from_coeffs(grid, time, lin_c));

  CMatrix w_c = CMatrix::Zero(lin.rows(), lin.cols());
  CMatrix w = w_c;
  int above = 0;
  for (int n = 0; n < options.max_iter; ++n) {
    const CMatrix next_c = quad.apply(forcing_coeffs(spec, lin + w));
    if (!finite(next_c)) throw BlowUp("Picard iterate is not finite at step " + std::to_string(n + 1), trace);
    const CMatrix next = to_samples(grid, next_c);
    const double r = l2_linf(grid, next - w);
    trace.residuals.push_back(r);
    if (options.work_residuals)
      trace.work_residuals.push_back(
          x_norm_ub(SpaceTimeField::from_coeffs(grid, time, next_c - w_c), options.mu, spec.work_norm(), cutoff,
                    options.work)
              .value);
    if (trace.residuals.size() >= 2) {
      const double prev = trace.residuals[trace.residuals.size() - 2];
      const double rho = r == 0.0 ? 0.0 : r / prev;
      trace.ratios.push_back(rho);
      above = rho >= 1.0 ? above + 1 : 0;
    }
    w_c = next_c;
    w = next;
    if (options.keep_iterates) trace.iterates.push_back(SpaceTimeField::from_coeffs(grid, time, lin_c + w_c));
    if (above >= 3) throw NoContraction("contraction ratio >= 1 for three consecutive iterations", trace);
    const bool small = r <= options.tol * trace.linear_norm;
    if (r == 0.0 || (small && static_cast<int>(trace.residuals.size()) >= options.min_residuals)) {
      trace.converged = true;
      break;
    }
  }
  if (!trace.converged) trace.flags.push_back("max_iter reached");
  if (trace.max_ratio() >= 1.0) trace.flags.push_back("a contraction ratio reached 1");
  for (std::size_t i = 2; i < trace.ratios.size(); ++i)
    if (trace.ratios[i] > trace.ratios[i - 1] && trace.ratios[i] > 0.0) {
      trace.flags.push_back("ratios not monotone after n = 2");
      break;
    }

  const CMatrix u_c = lin_c + w_c;
  const double norm = sup_l2_coeffs(grid, u_c);
  trace.quadrature_error = quadrature_error(spec, quad, forcing_coeffs(spec, to_samples(grid, u_c)), norm);
  return {SpaceTimeField::from_coeffs(grid, time, u_c), std::move(trace)};
}

double fixed_point_residual(const ProblemSpec& spec, const SpaceTimeField& u, double amplitude) {
  spec.validate();
  const GridSpec& grid = spec.u0.spec();
  const FlowTable flow(grid, spec.time, spec.symbol());
  const CMatrix lin = flow.free_coeffs(amplitude * spec.u0.coeffs());
  const ExpQuadrature quad(grid, spec.time.dt(), spec.symbol());
  const CMatrix image = lin + quad.apply(forcing_coeffs(spec, u.samples()));
  const double base = l2_linf(grid, to_samples(grid, lin));
  const double r = l2_linf(grid, to_samples(grid, CMatrix(u.coeffs() - image)));
  return base == 0.0 ? r : r / base;
}

namespace {

CMatrix rk4_run(const ProblemSpec& spec, int substeps) {
  const GridSpec& grid = spec.u0.spec();
  const SymbolSpec symbol = spec.symbol();
  const Index points = grid.points();
  const double h = spec.time.dt() / substeps;
  const Complex c = spec.duhamel_factor();

  auto flow = [&](double t) {
    CVector e(points);
    for (Index m = 0; m < points; ++m) e[m] = symbol.multiplier(t, grid.frequency(m));
    return e;
  };
  // W(-t) c d_x P((W(t) v)^{m+1}) with e = W(t) multipliers.
  auto rhs = [&](const CVector& e, const CVector& v) {
    CVector f = power_coeffs(grid, to_samples(grid, CVector(e.cwiseProduct(v))), spec.m + 1);
    multiply_derivative(grid, f, c);
    return CVector(e.conjugate().cwiseProduct(f));
  };

  CMatrix out(points, spec.time.frames());
  CVector v = spec.u0.coeffs();
  out.col(0) = v;
  CVector e0 = flow(0.0);
  for (Index n = 1; n < spec.time.frames(); ++n) {
    for (int s = 0; s < substeps; ++s) {
      const double t = spec.time.time(n - 1) + h * s;
      const CVector eh = flow(t + 0.5 * h);
      const CVector e1 = flow(t + h);
      const CVector k1 = rhs(e0, v);
      const CVector k2 = rhs(eh, v + 0.5 * h * k1);
      const CVector k3 = rhs(eh, v + 0.5 * h * k2);
      const CVector k4 = rhs(e1, v + h * k3);
      CVector next = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      const double before = v.norm();
      const double after = next.norm();
      if (!next.allFinite() || (before > 0.0 && after > 10.0 * before) || (before == 0.0 && after > 0.0))
        throw Instability("reference integrator unstable near t = " + std::to_string(t + h));
      v = std::move(next);
      e0 = e1;
    }
    out.col(n) = flow(spec.time.time(n)).cwiseProduct(v);
  }
  return out;
}

}  // namespace

ReferenceResult reference_solve(const ProblemSpec& spec, const ReferenceOptions& options) {
  spec.validate();
  if (options.substeps < 1) throw InvalidArgument("substeps must be >= 1");
  const GridSpec& grid = spec.u0.spec();
  ReferenceResult out{SpaceTimeField::from_coeffs(grid, spec.time, rk4_run(spec, options.substeps)), 0.0};
  if (options.error_estimate) {
    const CMatrix fine = rk4_run(spec, 2 * options.substeps);
    const double scale = fine.colwise().norm().maxCoeff();
    const double diff = (out.u.coeffs() - fine).colwise().norm().maxCoeff();
    out.error_estimate = scale == 0.0 ? diff : diff / scale;
  }
  return out;
}

double sup_l2(const SpaceTimeField& u) { return sup_l2_coeffs(u.spec(), u.coeffs()); }

double mass_drift(const SpaceTimeField& u) {
  const RVector mass = u.coeffs().colwise().squaredNorm().transpose();
  if (mass[0] == 0.0) return 0.0;
  return (mass.array() - mass[0]).abs().maxCoeff() / mass[0];
}

LipschitzReport lipschitz_probe(const ProblemSpec& spec, const LipschitzOptions& options) {
  if (options.deltas.empty() || options.directions < 1) throw InvalidArgument("empty Lipschitz sweep");
  PicardOptions po = options.picard;
  po.keep_iterates = false;
  po.work_residuals = false;
  const GridSpec& grid = spec.u0.spec();
  const CutoffProfile cutoff(po.cutoff_smoothness);
  const MixedNormSpec work = spec.work_norm();
  const PicardResult base = picard_solve(spec, 1.0, po);
  const double u0_norm = spec.u0.coeffs().norm();

  LipschitzReport out;
  out.l2.estimate_id = "lipschitz_linf_l2";
  out.work.estimate_id = "lipschitz_work";
  const std::size_t rows = options.deltas.size() * static_cast<std::size_t>(options.directions);
  std::vector<ReportRow> l2_rows(rows), work_rows(rows);
  std::vector<GridFunction> dirs;
  std::vector<double> dir_norms;
  for (int i = 0; i < options.directions; ++i) {
    GridFunction v =
        packet_sum("dir", random_packets(options.seed + static_cast<std::uint64_t>(i), 3, -4.0, 4.0), kInf).on(grid);
    const double n = v.coeffs().norm();
    if (n == 0.0) throw InternalError("zero Lipschitz direction");
    const double s = u0_norm > 0.0 ? u0_norm / n : 1.0;
    v = GridFunction::from_coeffs(grid, s * v.coeffs());
    dir_norms.push_back(options.work_norm ? scaling_limit_norm_ub(v, po.mu, 2.0, 1.0, cutoff, po.work.decomposition).value
                                          : 0.0);
    dirs.push_back(std::move(v));
  }
  parallel_for(rows, [&](std::size_t idx) {
    const std::size_t i = idx / options.deltas.size();
    const double d = options.deltas[idx % options.deltas.size()];
    ProblemSpec shifted = spec;
    shifted.u0 = GridFunction::from_coeffs(grid, spec.u0.coeffs() + d * dirs[i].coeffs());
    const PicardResult r = picard_solve(shifted, 1.0, po);
    const SpaceTimeField diff = r.u - base.u;
    const std::string id = "dir" + std::to_string(i);
    const double rhs = d * std::sqrt(dirs[i].coeffs().squaredNorm() / grid.length());
    const double lhs = sup_l2(diff);
    l2_rows[idx] = {id, 0, 0, d, lhs, rhs, lhs / rhs};
    if (options.work_norm) {
      const double wl = x_norm_ub(diff, po.mu, work, cutoff, po.work).value;
      work_rows[idx] = {id, 0, 0, d, wl, d * dir_norms[i], wl / (d * dir_norms[i])};
    }
  });
  auto spread = [](const EstimateReport& r) {
    double lo = kInf, hi = 0.0;
    for (const auto& row : r.rows) {
      lo = std::min(lo, row.ratio);
      hi = std::max(hi, row.ratio);
    }
    return r.rows.empty() ? kInf : hi / lo;
  };
  for (auto& row : l2_rows) out.l2.add(row);
  out.spread_l2 = spread(out.l2);
  out.l2.passed = ratios_finite(out.l2) && out.spread_l2 <= options.max_spread;
  out.passed = out.l2.passed;
  if (options.work_norm) {
    for (auto& row : work_rows) out.work.add(row);
    out.spread_work = spread(out.work);
    out.work.passed = ratios_finite(out.work) && out.spread_work <= options.max_spread;
    out.passed = out.passed && out.work.passed;
  }
  return out;
}

ThresholdReport small_data_threshold(const ProblemSpec& spec, const ThresholdOptions& options) {
  if (!(options.hi > 0.0)) throw InvalidArgument("hi must be positive");
  PicardOptions po = options.picard;
  po.keep_iterates = false;
  ThresholdReport out;
  auto contracts = [&](double a) {
    bool ok = false;
    try {
      const PicardResult r = picard_solve(spec, a, po);
      ok = r.trace.converged && r.trace.max_ratio() < 1.0;
    } catch (const NoContraction&) {
    } catch (const BlowUp&) {
    }
    out.probes.emplace_back(a, ok);
    return ok;
  };
  if (contracts(options.hi)) return out;
  double lo = options.hi;
  do {
    lo *= 0.5;
    if (lo < options.hi * 1e-12) {
      out.threshold = 0.0;
      out.datum_norm = 0.0;
      return out;
    }
  } while (!contracts(lo));
  double hi = 2.0 * lo;
  for (int i = 0; i < options.bisections; ++i) {
    const double mid = 0.5 * (lo + hi);
    (contracts(mid) ? lo : hi) = mid;
  }
  out.threshold = lo;
  contracts(0.5 * lo);
  double lowest_fail = kInf;
  for (const auto& [a, ok] : out.probes)
    if (!ok) lowest_fail = std::min(lowest_fail, a);
  for (const auto& [a, ok] : out.probes)
    if (ok && a > lowest_fail) out.monotone = false;
  if (!out.probes.back().second) out.monotone = false;
  const CutoffProfile cutoff(po.cutoff_smoothness);
  out.datum_norm =
      scaling_limit_norm_ub(GridFunction::from_coeffs(spec.u0.spec(), lo * spec.u0.coeffs()), po.mu, 2.0, 1.0, cutoff,
                            po.work.decomposition)
          .value;
  return out;
}

double scaling_weight(Equation e, int m) { return (e == Equation::d4nls ? 3.0 : 2.0) / m; }

CovarianceCheck scaling_covariance(Equation e, int m, Complex coupling, const std::function<Complex(double)>& u0,
                                   const GridSpec& spec, const TimeGrid& time, double lambda,
                                   const PicardOptions& options) {
  if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
  const double order = e == Equation::d4nls ? 4.0 : 3.0;
  const double a = scaling_weight(e, m);
  PicardOptions po = options;
  po.keep_iterates = false;
  const ProblemSpec base{e, m, coupling, GridFunction::sample(spec, u0), time};
  const GridSpec small(spec.length() / lambda, spec.points());
  const TimeGrid fast(time.final_time() / std::pow(lambda, order), time.steps());
  const double weight = std::pow(lambda, a);
  const ProblemSpec dilated{e, m, coupling,
                            GridFunction::sample(small, [&](double x) { return weight * u0(lambda * x); }), fast};
  const PicardResult u = picard_solve(base, 1.0, po);
  const PicardResult big_u = picard_solve(dilated, 1.0, po);

  const CMatrix diff = big_u.u.samples() - weight * u.u.samples();
  const double err = diff.colwise().norm().maxCoeff();
  const double scale = big_u.u.samples().colwise().norm().maxCoeff();
  const FlowTable flow(spec, time, base.symbol());
  const CMatrix lin = flow.free_coeffs(base.u0.coeffs());
  const double nl = (u.u.coeffs() - lin).colwise().norm().maxCoeff() / u.u.coeffs().colwise().norm().maxCoeff();
  return {scale == 0.0 ? err : err / scale, nl};
}

}  // namespace modspace
