#include "modspace/modnorms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "modspace/parallel.hpp"

namespace modspace {

namespace {

void check_exponent(double p, const char* what) {
  if (!(p >= 1.0)) throw InvalidArgument(std::string(what) + " exponent must be in [1, inf]");
}

double inv(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

double lq_sum(const std::vector<double>& values, double q) {
  if (std::isinf(q)) {
    double m = 0.0;
    for (double v : values) m = std::max(m, v);
    return m;
  }
  double s = 0.0;
  if (q == 1.0) {
    for (double v : values) s += v;
    return s;
  }
  for (double v : values) s += std::pow(v, q);
  return std::pow(s, 1.0 / q);
}

// Per-band L^2 energies straight from the coefficients (Parseval).
std::vector<BandNorm> band_l2(const GridSpec& spec, const CVector& c, int j, const CutoffProfile& cutoff) {
  std::vector<BandNorm> out;
  const double scale = std::ldexp(1.0, -j);
  const double w = 1.0 / spec.length();
  for (long k : bands_touching(spec, j)) {
    const ModeRange r = band_modes(spec, BandIndex{j, k});
    double e = 0.0;
    for (Index m = r.first; m <= r.last; ++m) {
      const Index s = spec.slot(m);
      if (c[s] == Complex(0.0)) continue;
      const double sig = cutoff(scale * spec.frequency(s) - static_cast<double>(k));
      e += sig * sig * std::norm(c[s]);
    }
    if (e > 0.0) out.push_back({k, std::sqrt(e * w)});
  }
  return out;
}

std::vector<BandNorm> band_norms_coeffs(const GridSpec& spec, const CVector& c, double p, int j,
                                        const CutoffProfile& cutoff) {
  std::vector<BandNorm> l2 = band_l2(spec, c, j, cutoff);
  if (p == 2.0) return l2;
  std::vector<BandNorm> out(l2.size());
  parallel_for(l2.size(), [&](std::size_t i) {
    const BandIndex band{j, l2[i].k};
    const CVector s = to_samples(spec, band_coeffs(spec, c, band, cutoff));
    out[i] = {l2[i].k, lp_norm(s, spec.dx(), p)};
  });
  return out;
}

double mj_norm(const GridSpec& spec, const CVector& c, double p, double q, int j, const CutoffProfile& cutoff) {
  const auto bands = band_norms_coeffs(spec, c, p, j, cutoff);
  std::vector<double> v;
  v.reserve(bands.size());
  for (const auto& b : bands) v.push_back(b.norm);
  return lq_sum(v, q);
}

double weighted(int j, double mu, double norm) { return norm == 0.0 ? 0.0 : std::exp2(j * mu) * norm; }

struct ScaleChoice {
  int j;
  double cost;
};

ScaleChoice best_scale(const GridSpec& spec, const CVector& c, double mu, double p, double q,
                       const CutoffProfile& cutoff, int j_min) {
  ScaleChoice best{0, std::numeric_limits<double>::infinity()};
  for (int j = 0; j >= j_min; --j) {
    const double cost = weighted(j, mu, mj_norm(spec, c, p, q, j, cutoff));
    if (cost < best.cost) best = {j, cost};
  }
  return best;
}

// Scale index of the dyadic annulus holding |xi| for offset c.
int annulus(double xi, double radius, int j_min) {
  const double a = std::abs(xi);
  if (a >= radius) return 0;
  if (a < std::ldexp(radius, j_min + 1)) return j_min;
  return std::clamp(static_cast<int>(std::floor(std::log2(a / radius))), j_min, -1);
}

std::map<int, CVector> dyadic_split(const GridFunction& f, double radius, int j_min) {
  const GridSpec& spec = f.spec();
  std::map<int, CVector> pieces;
  for (Index m = 0; m < spec.points(); ++m) {
    const Complex v = f.coeffs()[m];
    if (v == Complex(0.0)) continue;
    const int j = annulus(spec.frequency(m), radius, j_min);
    auto [it, fresh] = pieces.try_emplace(j);
    if (fresh) it->second = CVector::Zero(spec.points());
    it->second[m] = v;
  }
  return pieces;
}

Decomposition from_coeff_pieces(const GridSpec& spec, std::string name, std::map<int, CVector> pieces) {
  Decomposition d{std::move(name), {}};
  for (auto it = pieces.rbegin(); it != pieces.rend(); ++it)
    d.pieces.push_back({it->first, GridFunction::from_coeffs(spec, std::move(it->second))});
  return d;
}

void check_reconstruction(const GridFunction& f, const Decomposition& d) {
  CVector sum = CVector::Zero(f.spec().points());
  for (const auto& piece : d.pieces) sum += piece.f.coeffs();
  const double err = (sum - f.coeffs()).norm();
  if (err > 1e-10 * f.coeffs().norm()) throw InternalError("decomposition '" + d.strategy + "' does not reconstruct f");
}

}  // namespace

double lp_norm(const CVector& samples, double dx, double p) {
  check_exponent(p, "Lebesgue");
  if (samples.size() == 0) return 0.0;
  const Eigen::ArrayXd a = samples.array().abs();
  if (std::isinf(p)) return a.maxCoeff();
  if (p == 1.0) return a.sum() * dx;
  if (p == 2.0) return std::sqrt(a.square().sum() * dx);
  // Scale by the max to keep large exponents from underflowing.
  const double top = a.maxCoeff();
  if (top == 0.0) return 0.0;
  return top * std::pow((a / top).pow(p).sum() * dx, 1.0 / p);
}

double lp_norm(const GridFunction& f, double p) { return lp_norm(f.samples(), f.spec().dx(), p); }

double sobolev_norm(const GridFunction& f, double s) {
  const GridSpec& spec = f.spec();
  const CVector& c = f.coeffs();
  if (s < 0.0 && std::abs(c[0]) > 1e-12 * c.norm())
    throw SingularMultiplier("negative-order Sobolev norm of data with nonzero mean");
  double e = 0.0;
  for (Index m = 0; m < spec.points(); ++m) {
    const double xi = std::abs(spec.frequency(m));
    const double w = s == 0.0 ? 1.0 : (xi == 0.0 ? 0.0 : std::pow(xi, 2.0 * s));
    e += w * std::norm(c[m]);
  }
  return std::sqrt(e / spec.length());
}

double fourier_lebesgue_norm(const GridFunction& f, double r) {
  return lp_norm(f.coeffs(), f.spec().dxi(), r);
}

std::vector<BandNorm> band_norms(const GridFunction& f, double p, int j, const CutoffProfile& cutoff) {
  check_exponent(p, "Lebesgue");
  if (j > 0) throw OutOfRange("scale j must be <= 0");
  return band_norms_coeffs(f.spec(), f.coeffs(), p, j, cutoff);
}

double modulation_norm(const GridFunction& f, double p, double q, int j, const CutoffProfile& cutoff) {
  check_exponent(p, "Lebesgue");
  check_exponent(q, "sequence");
  if (j > 0) throw OutOfRange("scale j must be <= 0");
  return mj_norm(f.spec(), f.coeffs(), p, q, j, cutoff);
}

WindowFunction::WindowFunction(const GridFunction& g) : g_(g) {
  const double n = lp_norm(g, 2.0);
  if (n == 0.0) throw InvalidArgument("window must be nonzero");
  g_ = Complex(1.0 / n) * g;
}

WindowFunction WindowFunction::gaussian(const GridSpec& spec) {
  return WindowFunction(GridFunction::sample(spec, [](double x) { return std::exp(-0.5 * x * x); }));
}

double stft_modulation_norm(const GridFunction& f, const WindowFunction& window, double p, double q) {
  check_exponent(p, "Lebesgue");
  check_exponent(q, "sequence");
  const GridSpec& spec = f.spec();
  if (!(window.g().spec() == spec)) throw InvalidArgument("window lives on a different grid");
  const Index n = spec.points();
  const CVector& g = window.g().samples();
  // conj(g(-x_n)) with -x_n = x_{N-n} on the periodic grid.
  CVector reflected(n);
  for (Index i = 0; i < n; ++i) reflected[i] = std::conj(g[(n - i) % n]);
  const long top = static_cast<long>(std::floor(spec.xi_max()));
  std::vector<double> per_xi(static_cast<std::size_t>(2 * top + 1), 0.0);
  parallel_for(per_xi.size(), [&](std::size_t i) {
    const double xi = static_cast<double>(static_cast<long>(i) - top);
    CVector kernel(n);
    for (Index t = 0; t < n; ++t) kernel[t] = reflected[t] * std::polar(1.0, xi * spec.position(t));
    const CVector kc = to_coeffs(spec, kernel);
    const CVector v = to_samples(spec, CVector(f.coeffs().cwiseProduct(kc)));
    per_xi[i] = lp_norm(v, spec.dx(), p);
  });
  return lq_sum(per_xi, q);
}

GridFunction Decomposition::sum(const GridSpec& spec) const {
  CVector c = CVector::Zero(spec.points());
  for (const auto& piece : pieces) c += piece.f.coeffs();
  return GridFunction::from_coeffs(spec, std::move(c));
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::trivial: return "trivial";
    case Strategy::single_scale: return "single_scale";
    case Strategy::littlewood_paley: return "littlewood_paley";
    case Strategy::lp_greedy: return "lp_greedy";
  }
  return "unknown";
}

Strategy strategy_from_string(const std::string& name) {
  for (Strategy s : {Strategy::trivial, Strategy::single_scale, Strategy::littlewood_paley, Strategy::lp_greedy})
    if (to_string(s) == name) return s;
  throw InvalidArgument("unknown decomposition strategy '" + name + "'");
}

Decomposition decompose(const GridFunction& f, Strategy strategy, double mu, double p, double q,
                        const CutoffProfile& cutoff, const DecompositionOptions& options, double radius) {
  if (options.j_min > 0) throw InvalidArgument("J_min must be <= 0");
  if (!(radius > 0.0)) throw InvalidArgument("annulus offset must be positive");
  const GridSpec& spec = f.spec();
  switch (strategy) {
    case Strategy::trivial:
      return {"trivial", {{0, f}}};
    case Strategy::single_scale: {
      const ScaleChoice best = best_scale(spec, f.coeffs(), mu, p, q, cutoff, options.j_min);
      return {"single_scale", {{best.j, f}}};
    }
    case Strategy::littlewood_paley:
      return from_coeff_pieces(spec, "littlewood_paley", dyadic_split(f, radius, options.j_min));
    case Strategy::lp_greedy: {
      std::map<int, CVector> merged;
      for (auto& [j, c] : dyadic_split(f, radius, options.j_min)) {
        const ScaleChoice best = best_scale(spec, c, mu, p, q, cutoff, options.j_min);
        auto [it, fresh] = merged.try_emplace(best.j, c);
        if (!fresh) it->second += c;
      }
      return from_coeff_pieces(spec, "lp_greedy", std::move(merged));
    }
  }
  throw InvalidArgument("unknown strategy");
}

double decomposition_cost(const Decomposition& d, double mu, double p, double q, const CutoffProfile& cutoff) {
  double total = 0.0;
  for (const auto& piece : d.pieces) {
    if (piece.j > 0) throw InvalidArgument("decomposition scale must be <= 0");
    total += weighted(piece.j, mu, mj_norm(piece.f.spec(), piece.f.coeffs(), p, q, piece.j, cutoff));
  }
  return total;
}

NormBound scaling_limit_norm_ub(const GridFunction& f, double mu, double p, double q, const CutoffProfile& cutoff,
                                const DecompositionOptions& options) {
  check_exponent(p, "Lebesgue");
  check_exponent(q, "sequence");
  if (options.strategies.empty()) throw InvalidArgument("strategy family is empty");
  NormBound best{std::numeric_limits<double>::infinity(), {}, {}};
  for (Strategy s : options.strategies) {
    const bool dyadic = s == Strategy::littlewood_paley || s == Strategy::lp_greedy;
    const std::vector<double> radii = dyadic ? options.lp_radii : std::vector<double>{1.0};
    double strategy_best = std::numeric_limits<double>::infinity();
    for (double c : radii) {
      Decomposition d = decompose(f, s, mu, p, q, cutoff, options, c);
      check_reconstruction(f, d);
      const double cost = decomposition_cost(d, mu, p, q, cutoff);
      strategy_best = std::min(strategy_best, cost);
      if (cost < best.value) {
        best.value = cost;
        best.witness = std::move(d);
      }
    }
    best.costs.emplace_back(s, strategy_best);
  }
  return best;
}

double counterexample_profile_hat(double xi) {
  static const double norm = [] {
    // ||phi||_2^2 = (2 pi)^{-1} int |phihat|^2, Simpson on the support.
    constexpr int n = 4000;
    const double a = -0.125, h = 0.25 / n;
    auto raw = [](double x) {
      const double s = 1.0 / 48.0;
      const double chi = 1.0 - smooth_step(16.0 * (std::abs(x) - 0.0625));
      return std::exp(-x * x / (2.0 * s * s)) * chi;
    };
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double v = raw(a + i * h);
      acc += (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0)) * v * v;
    }
    return std::sqrt(acc * h / 3.0 / (2.0 * kPi));
  }();
  const double a = std::abs(xi);
  if (a >= 0.125) return 0.0;
  const double s = 1.0 / 48.0;
  const double chi = 1.0 - smooth_step(16.0 * (a - 0.0625));
  return std::exp(-xi * xi / (2.0 * s * s)) * chi / norm;
}

Complex counterexample_piece_hat(int j, double mu, double xi) {
  if (j >= 0) throw InvalidArgument("counterexample pieces need j <= -1");
  const double amp = std::exp2(j * (0.5 - mu)) / (static_cast<double>(j) * j);
  const double center = std::ldexp(static_cast<double>(j), j);
  // F[e^{i c x} phi(2^j x)](xi) = 2^{-j} phihat(2^{-j}(xi - c))
  return amp * std::ldexp(counterexample_profile_hat(std::ldexp(xi - center, -j)), -j);
}

GridFunction build_counterexample(double mu, int j_min, const GridSpec& spec) {
  if (!(mu > 0.0)) throw InvalidArgument("counterexample needs mu > 0");
  if (j_min > -1) throw InvalidArgument("counterexample needs J_min <= -1");
  CVector total = CVector::Zero(spec.points());
  for (int j = j_min; j <= -1; ++j) {
    const double center = std::ldexp(static_cast<double>(j), j);
    const double half = std::ldexp(0.125, j);
    if (std::abs(center) + half >= spec.xi_max())
      throw ResolutionError("counterexample piece lies beyond the resolvable frequencies");
    if (2.0 * half / spec.dxi() < 8.0) throw ResolutionError("counterexample piece spans fewer than 8 frequency nodes");
    const GridFunction piece =
        GridFunction::from_spectrum(spec, [&](double xi) { return counterexample_piece_hat(j, mu, xi); });
    if (boundary_mass(piece) > 1e-8) throw ResolutionError("grid cell too short for the dilated counterexample piece");
    total += piece.coeffs();
  }
  return GridFunction::from_coeffs(spec, std::move(total));
}

std::vector<CounterexampleRow> counterexample_table(double mu, const std::vector<int>& j_mins, const GridSpec& spec,
                                                   const CutoffProfile& cutoff, const DecompositionOptions& options) {
  std::vector<CounterexampleRow> rows(j_mins.size());
  for (std::size_t i = 0; i < j_mins.size(); ++i) {
    const int j = j_mins[i];
    const GridFunction u = build_counterexample(mu, j, spec);
    const NormBound b = scaling_limit_norm_ub(u, mu, 2.0, 1.0, cutoff, options);
    rows[i] = {j, lp_norm(u, 2.0), lp_norm(box_project(u, counterexample_band(j), cutoff), 2.0), b.value,
               b.witness.strategy};
  }
  return rows;
}

bool modulation_lebesgue_admissible(double p, double q, double r) {
  const double qp = q == 1.0 ? kInf : (std::isinf(q) ? 1.0 : q / (q - 1.0));
  return std::max(p, q) <= r && r <= qp;
}

bool scaling_regime(double p, double q, double mu) {
  const double a = inv(p) + inv(q) - 1.0;
  const double sigma = std::min({0.0, inv(q) - inv(p), a});
  return sigma <= mu && mu <= a && sigma < a;
}

bool embedding_admissible(EmbeddingTarget target, double p, double q, double r, double mu) {
  constexpr double eps = 1e-12;
  if (target == EmbeddingTarget::lebesgue)
    return modulation_lebesgue_admissible(p, q, r) && mu - inv(p) <= -inv(r) + eps;
  const double pp = p == 1.0 ? kInf : (std::isinf(p) ? 1.0 : p / (p - 1.0));
  return q <= r && r <= pp && p <= 2.0 && mu - inv(p) <= -(1.0 - inv(r)) + eps;
}

EstimateReport embedding_check(const std::vector<NamedSpectrum>& family, const GridSpec& spec,
                               EmbeddingTarget target, double p, double q, double r, double mu,
                               const CutoffProfile& cutoff, const EmbeddingOptions& options) {
  EstimateReport report;
  const bool lebesgue = target == EmbeddingTarget::lebesgue;
  report.estimate_id = lebesgue ? "embed_lr" : "embed_flr";
  check_exponent(p, "Lebesgue");
  check_exponent(q, "sequence");
  check_exponent(r, "target");
  const double pp = p == 1.0 ? kInf : (std::isinf(p) ? 1.0 : p / (p - 1.0));
  const bool range_ok = lebesgue ? modulation_lebesgue_admissible(p, q, r) : (q <= r && r <= pp && p <= 2.0);
  if (!range_ok) {
    report.passed = false;
    report.note("exponent ranges inadmissible; no computation performed");
    return report;
  }
  if (!scaling_regime(p, q, mu)) report.note("mu outside [sigma(p,q), a(p,q)]; characterisation not claimed there");
  const bool admissible = embedding_admissible(target, p, q, r, mu);
  const double rexp = lebesgue ? inv(r) : 1.0 - inv(r);
  report.predicted_slope = -(mu - inv(p) + rexp);

  struct Cell {
    double lhs = 0.0, rhs = 0.0;
  };
  const std::size_t nl = options.log2_lambdas.size();
  std::vector<Cell> cells(family.size() * nl);
  parallel_for(cells.size(), [&](std::size_t idx) {
    const auto& member = family[idx / nl];
    const double lambda = std::exp2(options.log2_lambdas[idx % nl]);
    const GridFunction f =
        GridFunction::from_spectrum(spec, [&](double xi) { return member.fhat(xi / lambda) / lambda; });
    cells[idx].lhs = lebesgue ? lp_norm(f, r) : fourier_lebesgue_norm(f, r);
    cells[idx].rhs = scaling_limit_norm_ub(f, mu, p, q, cutoff, options.decomposition).value;
  });

  std::map<int, std::pair<double, int>> mean_log;
  for (std::size_t idx = 0; idx < cells.size(); ++idx) {
    const int l = options.log2_lambdas[idx % nl];
    ReportRow row{family[idx / nl].id, l, 0, std::exp2(l), cells[idx].lhs, cells[idx].rhs,
                  cells[idx].rhs > 0.0 ? cells[idx].lhs / cells[idx].rhs : kInf};
    if (l <= 0 && std::isfinite(row.ratio) && row.ratio > 0.0) {
      auto& acc = mean_log[l];
      acc.first += std::log2(row.ratio);
      acc.second += 1;
    }
    report.add(std::move(row));
  }
  if (admissible) {
    report.passed = ratios_finite(report);
    return report;
  }
  if (mean_log.size() < 2) {
    report.passed = false;
    report.note("not enough dilations with lambda <= 1 for a slope fit");
    return report;
  }
  RVector x(static_cast<Index>(mean_log.size())), y(x.size());
  Index i = 0;
  for (const auto& [l, acc] : mean_log) {
    x[i] = l;
    y[i] = acc.first / acc.second;
    ++i;
  }
  report.fit = fit_slope(x, y);
  report.has_fit = true;
  report.passed = std::abs(report.fit.slope - report.predicted_slope) <= 0.1;
  return report;
}

}  // namespace modspace
