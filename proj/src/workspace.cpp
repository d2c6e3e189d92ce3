#include "modspace/workspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "modspace/nonlinear.hpp"
#include "modspace/parallel.hpp"

namespace modspace {

namespace {

double inv(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

double weighted(int j, double mu, double norm) { return norm == 0.0 ? 0.0 : std::exp2(j * mu) * norm; }

// Per-mode L^2_t energies.
RVector mode_energy(const CMatrix& c) { return c.rowwise().squaredNorm(); }

double band_sum_coeffs(const GridSpec& spec, const TimeGrid& time, const CMatrix& c, int j, const MixedNormSpec& a,
                       const CutoffProfile& cutoff, double floor) {
  if (j > 0) throw OutOfRange("scale j must be <= 0");
  const RVector e = mode_energy(c);
  const double total = e.sum();
  if (total == 0.0) return 0.0;
  const double scale = std::ldexp(1.0, -j);
  std::vector<long> live;
  for (long k : bands_touching(spec, j)) {
    const ModeRange r = band_modes(spec, BandIndex{j, k});
    double be = 0.0;
    for (Index m = r.first; m <= r.last; ++m) {
      const Index s = spec.slot(m);
      if (e[s] == 0.0) continue;
      const double sg = cutoff(scale * spec.frequency(s) - static_cast<double>(k));
      be += sg * sg * e[s];
    }
    if (be > floor * floor * total) live.push_back(k);
  }
  std::vector<double> norms(live.size());
  const RVector w = time.trapezoid_weights();
  parallel_for(live.size(), [&](std::size_t i) {
    const CMatrix s = to_samples(spec, band_coeffs(spec, c, BandIndex{j, live[i]}, cutoff));
    norms[i] = mixed_norm(s, spec.dx(), w, a);
  });
  double sum = 0.0;
  for (double v : norms) sum += v;
  return sum;
}

int annulus(double xi, double radius, int j_min) {
  const double a = std::abs(xi);
  if (a >= radius) return 0;
  if (a < std::ldexp(radius, j_min + 1)) return j_min;
  return std::clamp(static_cast<int>(std::floor(std::log2(a / radius))), j_min, -1);
}

std::map<int, CMatrix> dyadic_split(const GridSpec& spec, const CMatrix& c, double radius, int j_min) {
  const RVector e = mode_energy(c);
  std::map<int, CMatrix> pieces;
  for (Index m = 0; m < spec.points(); ++m) {
    if (e[m] == 0.0) continue;
    const int j = annulus(spec.frequency(m), radius, j_min);
    auto [it, fresh] = pieces.try_emplace(j);
    if (fresh) it->second = CMatrix::Zero(c.rows(), c.cols());
    it->second.row(m) = c.row(m);
  }
  return pieces;
}

struct ScaleChoice {
  int j;
  double cost;
};

ScaleChoice best_scale(const GridSpec& spec, const TimeGrid& time, const CMatrix& c, double mu, const MixedNormSpec& a,
                       const CutoffProfile& cutoff, int j_min, double floor) {
  ScaleChoice best{0, std::numeric_limits<double>::infinity()};
  for (int j = 0; j >= j_min; --j) {
    const double cost = weighted(j, mu, band_sum_coeffs(spec, time, c, j, a, cutoff, floor));
    if (cost < best.cost) best = {j, cost};
  }
  return best;
}

SpaceTimeDecomposition from_pieces(const GridSpec& spec, const TimeGrid& time, std::string name,
                                   std::map<int, CMatrix> pieces) {
  SpaceTimeDecomposition d{std::move(name), {}};
  for (auto it = pieces.rbegin(); it != pieces.rend(); ++it)
    d.pieces.push_back({it->first, SpaceTimeField::from_coeffs(spec, time, std::move(it->second))});
  return d;
}

// L^2_x L^2_t with the trapezoid time weights, from the coefficients.
double l2l2(const GridSpec& spec, const TimeGrid& time, const CMatrix& c) {
  const RVector w = time.trapezoid_weights();
  return std::sqrt(c.colwise().squaredNorm().dot(w.transpose()) / spec.length());
}

void check_reconstruction(const SpaceTimeField& u, const SpaceTimeDecomposition& d) {
  CMatrix sum = CMatrix::Zero(u.coeffs().rows(), u.coeffs().cols());
  for (const auto& p : d.pieces) sum += p.u.coeffs();
  const double err = l2l2(u.spec(), u.time(), sum - u.coeffs());
  if (err > 1e-10 * l2l2(u.spec(), u.time(), u.coeffs()))
    throw InternalError("space-time decomposition '" + d.strategy + "' does not reconstruct u");
}

SpaceTimeDecomposition decompose_field(const SpaceTimeField& u, Strategy s, double mu, const MixedNormSpec& a,
                                       const CutoffProfile& cutoff, const XNormOptions& o, double radius) {
  const GridSpec& spec = u.spec();
  const TimeGrid& time = u.time();
  const int j_min = o.decomposition.j_min;
  switch (s) {
    case Strategy::trivial:
      return {"trivial", {{0, u}}};
    case Strategy::single_scale: {
      const ScaleChoice b = best_scale(spec, time, u.coeffs(), mu, a, cutoff, j_min, o.band_floor);
      return {"single_scale", {{b.j, u}}};
    }
    case Strategy::littlewood_paley:
      return from_pieces(spec, time, "littlewood_paley", dyadic_split(spec, u.coeffs(), radius, j_min));
    case Strategy::lp_greedy: {
      std::map<int, CMatrix> merged;
      for (auto& [j, c] : dyadic_split(spec, u.coeffs(), radius, j_min)) {
        const ScaleChoice b = best_scale(spec, time, c, mu, a, cutoff, j_min, o.band_floor);
        auto [it, fresh] = merged.try_emplace(b.j, c);
        if (!fresh) it->second += c;
      }
      return from_pieces(spec, time, "lp_greedy", std::move(merged));
    }
  }
  throw InvalidArgument("unknown strategy");
}

void require_nonempty(const auto& family) {
  if (family.empty()) throw InvalidArgument("empty input family");
}

XNormOptions single(const XNormOptions& o, Strategy s) {
  XNormOptions out = o;
  out.decomposition.strategies = {s};
  return out;
}

}  // namespace

SpaceTimeField SpaceTimeDecomposition::sum(const GridSpec& spec, const TimeGrid& time) const {
  CMatrix c = CMatrix::Zero(spec.points(), time.frames());
  for (const auto& p : pieces) c += p.u.coeffs();
  return SpaceTimeField::from_coeffs(spec, time, std::move(c));
}

double band_sum_norm(const SpaceTimeField& u, int j, const MixedNormSpec& a, const CutoffProfile& cutoff,
                     double band_floor) {
  return band_sum_coeffs(u.spec(), u.time(), u.coeffs(), j, a, cutoff, band_floor);
}

double x_norm_cost(const SpaceTimeDecomposition& d, double mu, const MixedNormSpec& a, const CutoffProfile& cutoff,
                   double band_floor) {
  double total = 0.0;
  for (const auto& p : d.pieces) total += weighted(p.j, mu, band_sum_norm(p.u, p.j, a, cutoff, band_floor));
  return total;
}

XNormBound x_norm_ub(const SpaceTimeField& u, double mu, const MixedNormSpec& a, const CutoffProfile& cutoff,
                     const XNormOptions& options) {
  if (options.decomposition.strategies.empty()) throw InvalidArgument("strategy family is empty");
  if (options.decomposition.j_min > 0) throw InvalidArgument("J_min must be <= 0");
  XNormBound best{std::numeric_limits<double>::infinity(), {}, {}};
  for (Strategy s : options.decomposition.strategies) {
    const bool dyadic = s == Strategy::littlewood_paley || s == Strategy::lp_greedy;
    const std::vector<double> radii = dyadic ? options.decomposition.lp_radii : std::vector<double>{1.0};
    double strategy_best = std::numeric_limits<double>::infinity();
    for (double c : radii) {
      SpaceTimeDecomposition d = decompose_field(u, s, mu, a, cutoff, options, c);
      check_reconstruction(u, d);
      const double cost = x_norm_cost(d, mu, a, cutoff, options.band_floor);
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

SpaceTimeDecomposition propagate(const Decomposition& d, const TimeGrid& time, SymbolSpec symbol) {
  SpaceTimeDecomposition out{d.strategy, {}};
  for (const auto& p : d.pieces) out.pieces.push_back({p.j, propagate(p.f, time, symbol)});
  return out;
}

std::vector<NamedField> field_family(const GridSpec& spec, const TimeGrid& time, std::uint64_t seed, int count,
                                     double band, SymbolSpec symbol) {
  std::vector<NamedField> out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> freq(1.0, 6.0), phase(0.0, 2.0 * kPi);
  const double spread = spec.length() / 8.0;
  auto packet = [&](int i, int n) {
    return packet_sum("", random_packets(seed + 101 * static_cast<std::uint64_t>(i) + n, 3, -0.8 * band, 0.8 * band,
                                         spread, 1.0, 2.5),
                      band)
        .on(spec);
  };
  for (int i = 0; i < count; ++i) {
    if (i % 2 == 0) {
      const GridFunction a = packet(i, 0), b = packet(i, 1);
      const double wa = freq(rng) / time.final_time(), wb = freq(rng) / time.final_time();
      const double pa = phase(rng), pb = phase(rng);
      CMatrix s(spec.points(), time.frames());
      for (Index t = 0; t < time.frames(); ++t)
        s.col(t) = std::cos(wa * time.time(t) + pa) * a.samples() + std::cos(wb * time.time(t) + pb) * b.samples();
      out.push_back({"field_" + std::to_string(i), SpaceTimeField::from_samples(spec, time, std::move(s))});
    } else {
      out.push_back({"flow_" + std::to_string(i), propagate(packet(i, 0), time, symbol)});
    }
  }
  return out;
}

EstimateReport verify_band_coarsening(const std::vector<NamedField>& family,
                                      const std::vector<std::pair<int, int>>& scale_pairs, const MixedNormSpec& a,
                                      const CutoffProfile& cutoff) {
  require_nonempty(family);
  for (auto [l, j] : scale_pairs)
    if (!(l <= j && j <= 0)) throw InvalidArgument("coarsening needs l <= j <= 0");
  EstimateReport report;
  report.estimate_id = "band_coarsening";
  for (const auto& f : family)
    for (auto [l, j] : scale_pairs) {
      const double lhs = band_sum_norm(f.u, j, a, cutoff);
      const double rhs = band_sum_norm(f.u, l, a, cutoff);
      if (rhs == 0.0) continue;
      report.add({f.id, j, l, 1.0, lhs, rhs, lhs / rhs});
    }
  report.passed = ratios_finite(report);
  report.note("rows carry the coarse scale in j and the fine scale in k");
  return report;
}

EstimateReport verify_bernstein_embedding(const std::vector<NamedField>& family, double p1, double gamma, double p,
                                          double mu, const CutoffProfile& cutoff, const XNormOptions& options) {
  require_nonempty(family);
  if (!(1.0 <= p1 && p1 <= gamma && gamma <= p)) throw InvalidArgument("embedding needs 1 <= p1 <= gamma <= p");
  EstimateReport report;
  report.estimate_id = "bernstein_embedding";
  for (const auto& f : family) {
    const XNormBound rhs = x_norm_ub(f.u, mu + inv(p1), {p1, gamma}, cutoff, options);
    if (rhs.value == 0.0) continue;
    const double lhs = x_norm_cost(rhs.witness, mu + inv(p), {p, gamma}, cutoff, options.band_floor);
    report.add({f.id, 0, 0, 1.0, lhs, rhs.value, lhs / rhs.value});
  }
  report.passed = ratios_finite(report);
  return report;
}

EstimateReport verify_product_estimate(const std::vector<NamedField>& left, const std::vector<NamedField>& right,
                                       const ProductExponents& e, double mu, const CutoffProfile& cutoff,
                                       const XNormOptions& options) {
  require_nonempty(left);
  require_nonempty(right);
  if (std::abs(inv(e.product.px) - inv(e.left.px) - inv(e.right.px)) > 1e-12 ||
      std::abs(inv(e.product.gamma) - inv(e.left.gamma) - inv(e.right.gamma)) > 1e-12)
    throw InvalidArgument("product exponents violate the Hoelder relation");
  EstimateReport report;
  report.estimate_id = "product";
  const std::size_t n = std::min(left.size(), right.size());
  for (std::size_t i = 0; i < n; ++i) {
    const SpaceTimeField& u = left[i].u;
    const SpaceTimeField& v = right[i].u;
    const SpaceTimeField uv = SpaceTimeField::from_samples(u.spec(), u.time(), u.samples().cwiseProduct(v.samples()));
    for (Strategy s : options.decomposition.strategies) {
      const XNormOptions o = single(options, s);
      const double lhs = x_norm_ub(uv, mu, e.product, cutoff, o).value;
      const double rhs = x_norm_ub(u, mu, e.left, cutoff, o).value * x_norm_ub(v, 0.0, e.right, cutoff, o).value +
                         x_norm_ub(u, 0.0, e.left, cutoff, o).value * x_norm_ub(v, mu, e.right, cutoff, o).value;
      if (rhs == 0.0) continue;
      report.add({left[i].id + "*" + right[i].id + "/" + to_string(s), 0, 0, 1.0, lhs, rhs, lhs / rhs});
    }
  }
  report.passed = ratios_finite(report);
  return report;
}

long product_band_spread(const SpaceTimeField& u, const SpaceTimeField& v, int j, const CutoffProfile& cutoff,
                         double tol) {
  if (!(u.spec() == v.spec()) || !(u.time() == v.time())) throw InvalidArgument("fields live on different grids");
  const GridSpec& spec = u.spec();
  const TimeGrid& time = u.time();
  const RVector w = time.trapezoid_weights();
  const std::vector<long> ks = bands_touching(spec, j);
  auto live = [&](const SpaceTimeField& f) {
    std::vector<std::pair<long, CMatrix>> out;
    const double total = l2l2(spec, time, f.coeffs());
    for (long k : ks) {
      CMatrix c = band_coeffs(spec, f.coeffs(), BandIndex{j, k}, cutoff);
      if (l2l2(spec, time, c) > 1e-14 * total) out.emplace_back(k, to_samples(spec, c));
    }
    return out;
  };
  const auto bu = live(u), bv = live(v);
  std::vector<std::pair<long, double>> found;
  double top = 0.0;
  for (const auto& [k1, s1] : bu)
    for (const auto& [k2, s2] : bv) {
      const CMatrix c = to_coeffs(spec, CMatrix(s1.cwiseProduct(s2)));
      for (long k : ks) {
        const double n = l2l2(spec, time, band_coeffs(spec, c, BandIndex{j, k}, cutoff));
        if (n == 0.0) continue;
        found.emplace_back(std::labs(k - k1 - k2), n);
        top = std::max(top, n);
      }
    }
  long spread = 0;
  for (auto [d, n] : found)
    if (n > tol * top) spread = std::max(spread, d);
  return spread;
}

HolderSplit holder_split(long long m) {
  if (m < 8) throw OutOfRange("the power split is defined for m >= 8");
  const long long n = m / 2;
  HolderSplit h{n, m % 2 == 0 ? 2 : 5, Rational(m, 2)};
  const Rational s = 3 * h.p + 2;
  const Rational rest(m + 1 - h.a - h.b);
  const bool first = (3 * h.p + 1) / s == Rational(3 * h.a) / s + Rational(h.b) / (2 * s);
  const bool second = (2 * h.p + 1) / s == Rational(h.a) / s + Rational(h.b) / s + rest / s;
  if (!first || !second || rest < Rational(0)) throw InvalidArgument("exponent split identities fail");
  return h;
}

EstimateReport verify_power_nonlinearity(const std::vector<NamedField>& family, int m, const CutoffProfile& cutoff,
                                         const std::vector<double>& amplitudes, const XNormOptions& options) {
  require_nonempty(family);
  if (m < 8 || m % 2 != 0) throw InvalidArgument("power estimate needs even m >= 8");
  if (amplitudes.size() < 2) throw InvalidArgument("amplitude sweep needs two amplitudes");
  const StrichartzExponents e = strichartz_exponents(Rational(m, 2));
  const MixedNormSpec a{e.px.as_double(), e.rt.as_double()};
  const MixedNormSpec dual{e.dual_px.as_double(), e.dual_rt.as_double()};
  EstimateReport report;
  report.estimate_id = "power_m" + std::to_string(m);
  report.predicted_slope = m + 1;
  RVector x(static_cast<Index>(amplitudes.size()));
  RVector mean = RVector::Zero(x.size());
  bool degree_ok = true;
  for (const auto& f : family) {
    RVector y(x.size());
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
      const double c = amplitudes[i];
      const CMatrix s = c * f.u.samples();
      const SpaceTimeField power =
          SpaceTimeField::from_coeffs(f.u.spec(), f.u.time(), power_coeffs(f.u.spec(), s, m + 1));
      const double lhs = x_norm_ub(power, 0.0, dual, cutoff, options).value;
      const double base = x_norm_ub(SpaceTimeField::from_samples(f.u.spec(), f.u.time(), s), 0.0, a, cutoff, options).value;
      const double rhs = std::pow(base, m + 1);
      report.add({f.id, 0, 0, c, lhs, rhs, lhs / rhs});
      x[static_cast<Index>(i)] = std::log2(c);
      y[static_cast<Index>(i)] = std::log2(lhs);
    }
    const SlopeFit fit = fit_slope(x, y);
    if (!(std::abs(fit.slope - (m + 1)) <= 0.01)) degree_ok = false;
    mean += y;
  }
  report.has_fit = true;
  report.fit = fit_slope(x, mean / static_cast<double>(family.size()));
  report.passed = ratios_finite(report) && degree_ok;
  return report;
}

std::vector<EstimateReport> verify_xmu_linear(const std::vector<NamedSpectrum>& data, const std::vector<NamedField>& forcing,
                                              const GridSpec& spec, const TimeGrid& time, double mu, Rational p,
                                              const CutoffProfile& cutoff, const XNormOptions& options) {
  const StrichartzExponents e = strichartz_exponents(p);
  const double a_exp = to_double(strichartz_a(p));
  const double b_exp = to_double(strichartz_b(p));
  const MixedNormSpec a{e.px.as_double(), e.rt.as_double()};
  const MixedNormSpec dual{e.dual_px.as_double(), e.dual_rt.as_double()};
  const SymbolSpec symbol{SymbolKind::fourth_order_schrodinger};

  EstimateReport free;
  free.estimate_id = "xmu_free";
  for (const auto& d : data) {
    const GridFunction u0 = d.on(spec);
    const NormBound rhs = scaling_limit_norm_ub(u0, mu + a_exp, 2.0, 1.0, cutoff, options.decomposition);
    if (rhs.value == 0.0) continue;
    const double lhs = x_norm_cost(propagate(rhs.witness, time, symbol), mu, a, cutoff, options.band_floor);
    free.add({d.id, 0, 0, 1.0, lhs, rhs.value, lhs / rhs.value});
  }
  free.passed = free.rows.empty() || ratios_finite(free);

  EstimateReport duh;
  duh.estimate_id = "xmu_duhamel";
  for (const auto& f : forcing) {
    if (!(f.u.spec() == spec) || !(f.u.time() == time)) throw InvalidArgument("forcing lives on a different grid");
    const XNormBound rhs = x_norm_ub(f.u, mu + b_exp, dual, cutoff, options);
    if (rhs.value == 0.0) continue;
    SpaceTimeDecomposition out{rhs.witness.strategy, {}};
    for (const auto& piece : rhs.witness.pieces) out.pieces.push_back({piece.j, derivative(duhamel(piece.u, symbol))});
    const double lhs = x_norm_cost(out, mu, a, cutoff, options.band_floor);
    duh.add({f.id, 0, 0, 1.0, lhs, rhs.value, lhs / rhs.value});
  }
  duh.passed = duh.rows.empty() || ratios_finite(duh);
  return {free, duh};
}

}  // namespace modspace
