#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "modspace/estimates.hpp"
#include "modspace/grid_io.hpp"
#include "modspace/modnorms.hpp"
#include "modspace/solver.hpp"
#include "modspace/workspace.hpp"

namespace modspace::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::set<std::string> kCommands = {"norm", "decompose", "propagate", "verify", "counterexample", "solve", "report"};

/// Bad command line, config or output directory: exit 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string out = "modspace_out";
  double length = 0.0;
  long points = 0;
  double final_time = 0.0;
  long steps = 0;
  int cutoff = 2;
  int jmin = -8;
  std::uint64_t seed = 20260101;
};

struct DatumOptions {
  std::string input;
  std::string datum = "gaussian";
};

struct Context {
  Globals g;
  std::ostream& out;
  std::ostream& err;
  json config;
  std::uint64_t hash = 0;

  fs::path dir() const { return fs::path(g.out); }
  GridSpec grid(double l, long n) const { return GridSpec(g.length > 0 ? g.length : l, g.points > 0 ? g.points : n); }
  TimeGrid time(double t, long m) const {
    return TimeGrid(g.final_time > 0 ? g.final_time : t, g.steps > 0 ? g.steps : m);
  }
  CutoffProfile cutoff() const { return CutoffProfile(g.cutoff); }

  // Records the effective parameters, fixes the hash and prepares the output directory.
  void begin(const std::string& command, json params) {
    config = {{"version", 1}, {"command", command}, {"seed", g.seed}, {"cutoff", g.cutoff},
              {"jmin", g.jmin}, {"params", std::move(params)}};
    hash = fnv1a64(config.dump());
    std::error_code ec;
    fs::create_directories(dir(), ec);
    const fs::path probe = dir() / (command + "_config.json");
    std::ofstream f(probe);
    if (!f) throw InputError("output directory '" + g.out + "' is not writable");
    json stored = config;
    stored["config_hash"] = hex(hash);
    f << stored.dump(2) << '\n';
  }

  static std::string hex(std::uint64_t h) {
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << h;
    return s.str();
  }

  std::ofstream open(const std::string& name) const {
    std::ofstream f(dir() / name);
    if (!f) throw InputError("cannot write " + (dir() / name).string());
    f << std::setprecision(17);
    return f;
  }
};

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::string short_fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

// --- config expansion -------------------------------------------------------

bool user_gave(const std::vector<std::string>& args, const std::string& flag) {
  for (const auto& a : args)
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  return false;
}

void append_tokens(std::vector<std::string>& tokens, const std::string& key, const json& v,
                   const std::vector<std::string>& user) {
  const std::string flag = "--" + key;
  if (user_gave(user, flag)) return;
  if (v.is_boolean()) {
    if (v.get<bool>()) tokens.push_back(flag);
    return;
  }
  if (v.is_object()) throw InputError("config key '" + key + "' must not be an object");
  tokens.push_back(flag);
  auto scalar = [](const json& x) { return x.is_string() ? x.get<std::string>() : x.dump(); };
  if (v.is_array()) {
    for (const auto& x : v) tokens.push_back(scalar(x));
  } else {
    tokens.push_back(scalar(v));
  }
}

// Replaces --config FILE by the tokens it stands for; explicit flags win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw InputError("--config needs a file");
      path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
      break;
    }
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path + "'");
  json c;
  try {
    c = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("malformed config '" + path + "': " + e.what());
  }
  if (!c.is_object()) throw InputError("config must be a JSON object");
  if (!c.contains("version") || c["version"] != 1) throw InputError("config needs \"version\": 1");

  std::string command;
  for (const auto& a : args)
    if (kCommands.count(a)) {
      command = a;
      break;
    }
  if (c.contains("command")) {
    const std::string named = c["command"].get<std::string>();
    if (!kCommands.count(named)) throw InputError("config names unknown command '" + named + "'");
    if (!command.empty() && command != named) throw InputError("config command differs from the command line");
    command = named;
  }
  if (command.empty()) throw InputError("no command given");

  std::vector<std::string> tokens{command};
  for (const auto& [key, v] : c.items()) {
    if (key == "version" || key == "command" || kCommands.count(key)) continue;
    append_tokens(tokens, key, v, args);
  }
  if (c.contains(command)) {
    if (!c[command].is_object()) throw InputError("config section '" + command + "' must be an object");
    for (const auto& [key, v] : c[command].items()) append_tokens(tokens, key, v, args);
  }
  for (const auto& a : args)
    if (a != command) tokens.push_back(a);
  return tokens;
}

// --- data -------------------------------------------------------------------

GridFunction load_datum(const DatumOptions& d, const GridSpec& spec, std::uint64_t seed) {
  if (!d.input.empty()) return read_grid(d.input);
  if (d.datum == "gaussian") return GridFunction::sample(spec, [](double x) { return std::exp(-0.5 * x * x); });
  if (d.datum == "modulated")
    return GridFunction::sample(spec, [](double x) { return std::polar(std::exp(-0.5 * x * x), 5.0 * x); });
  if (d.datum == "random") return packet_sum("random", random_packets(seed, 4, -8.0, 8.0), 8.0).on(spec);
  throw InputError("unknown datum '" + d.datum + "' (gaussian, modulated, random)");
}

void add_datum_options(CLI::App* c, DatumOptions& d) {
  c->add_option("--input", d.input, "Grid file header to read the datum from");
  c->add_option("--datum", d.datum, "Built-in datum when no --input: gaussian, modulated, random");
}

json datum_json(const DatumOptions& d) { return d.input.empty() ? json{{"datum", d.datum}} : json{{"input", d.input}}; }

int check_failures(Context& ctx, const std::vector<EstimateReport>& reports) {
  bool ok = true;
  for (const auto& r : reports) {
    if (r.passed) continue;
    ok = false;
    ctx.err << "FAILED " << r.estimate_id << '\n';
    for (const auto& row : r.rows)
      if (!(std::isfinite(row.ratio) && row.ratio > 0.0))
        ctx.err << "  " << row.input_id << " j=" << row.j << " k=" << row.k << " lhs=" << row.lhs << " rhs=" << row.rhs
                << '\n';
    for (const auto& n : r.notes) ctx.err << "  " << n << '\n';
    if (r.has_fit)
      ctx.err << "  slope " << r.fit.slope << " predicted " << r.predicted_slope << '\n';
  }
  return ok ? 0 : 2;
}

// --- commands ---------------------------------------------------------------

struct NormOptions {
  std::string space;
  double p = 2.0, q = 1.0, s = 0.0, mu = 0.0, r = 2.0;
  int j = 0;
  DatumOptions datum;
};

int cmd_norm(Context& ctx, const NormOptions& o) {
  const GridSpec spec = ctx.grid(64.0, 1024);
  json params = {{"space", o.space}, {"L", spec.length()}, {"N", spec.points()}, {"datum", datum_json(o.datum)}};
  std::string p;
  if (o.space == "lp") p = "p=" + short_fmt(o.p);
  else if (o.space == "hs") p = "s=" + short_fmt(o.s);
  else if (o.space == "flr") p = "r=" + short_fmt(o.r);
  else if (o.space == "mpq") p = "p=" + short_fmt(o.p) + ";q=" + short_fmt(o.q);
  else if (o.space == "mjpq") p = "p=" + short_fmt(o.p) + ";q=" + short_fmt(o.q) + ";j=" + std::to_string(o.j);
  else if (o.space == "msmu") p = "p=" + short_fmt(o.p) + ";q=" + short_fmt(o.q) + ";mu=" + short_fmt(o.mu);
  else throw InputError("unknown space '" + o.space + "' (lp, hs, mpq, mjpq, msmu, flr)");
  params["exponents"] = p;
  ctx.begin("norm", params);

  const GridFunction f = load_datum(o.datum, spec, ctx.g.seed);
  const CutoffProfile cutoff = ctx.cutoff();
  double value = 0.0;
  std::string witness = "none";
  if (o.space == "lp") value = lp_norm(f, o.p);
  else if (o.space == "hs") value = sobolev_norm(f, o.s);
  else if (o.space == "flr") value = fourier_lebesgue_norm(f, o.r);
  else if (o.space == "mpq") value = modulation_norm(f, o.p, o.q, 0, cutoff);
  else if (o.space == "mjpq") value = modulation_norm(f, o.p, o.q, o.j, cutoff);
  else {
    DecompositionOptions d;
    d.j_min = ctx.g.jmin;
    const NormBound b = scaling_limit_norm_ub(f, o.mu, o.p, o.q, cutoff, d);
    value = b.value;
    witness = b.witness.strategy;
  }
  const std::string input = o.datum.input.empty() ? o.datum.datum : o.datum.input;
  std::ofstream csv = ctx.open("norm.csv");
  csv << "space,input_id,params,value,witness_strategy,config_hash\n";
  std::ostringstream row;
  row << o.space << ',' << input << ',' << p << ',' << fmt(value) << ',' << witness << ',' << Context::hex(ctx.hash);
  csv << row.str() << '\n';
  ctx.out << row.str() << '\n';
  return 0;
}

struct DecomposeOptions {
  int j = 0;
  long k = 0;
  DatumOptions datum;
};

int cmd_decompose(Context& ctx, const DecomposeOptions& o) {
  const GridSpec spec = ctx.grid(64.0, 1024);
  ctx.begin("decompose", {{"j", o.j}, {"k", o.k}, {"L", spec.length()}, {"N", spec.points()},
                          {"datum", datum_json(o.datum)}});
  const GridFunction f = load_datum(o.datum, spec, ctx.g.seed);
  const GridFunction b = box_project(f, BandIndex{o.j, o.k}, ctx.cutoff());
  const std::string name = "box_j" + std::to_string(o.j) + "_k" + std::to_string(o.k) + ".json";
  write_grid(ctx.dir() / name, b);
  ctx.out << name << " l2=" << fmt(lp_norm(b, 2.0)) << " of " << fmt(lp_norm(f, 2.0)) << '\n';
  return 0;
}

struct PropagateOptions {
  std::string equation = "d4nls";
  double t = 1.0;
  DatumOptions datum;
};

int cmd_propagate(Context& ctx, const PropagateOptions& o) {
  const GridSpec spec = ctx.grid(64.0, 1024);
  const Equation e = equation_from_string(o.equation);
  ctx.begin("propagate", {{"equation", o.equation}, {"t", o.t}, {"L", spec.length()}, {"N", spec.points()},
                          {"datum", datum_json(o.datum)}});
  const GridFunction f = load_datum(o.datum, spec, ctx.g.seed);
  const SymbolSpec symbol{e == Equation::d4nls ? SymbolKind::fourth_order_schrodinger : SymbolKind::airy};
  const GridFunction u = propagate(f, o.t, symbol);
  write_grid(ctx.dir() / "propagated.json", u);
  ctx.out << "propagated.json l2 " << fmt(lp_norm(f, 2.0)) << " -> " << fmt(lp_norm(u, 2.0)) << '\n';
  return 0;
}

struct VerifyOptions {
  std::string estimate;
  double p = 4.0;
  std::string sweep = "quick";
  double mu = 0.0;
  int count = 0;
  long kmax = 0;
  std::string scaling_case;
};

int cmd_verify(Context& ctx, const VerifyOptions& o) {
  const bool full = o.sweep == "full";
  if (!full && o.sweep != "quick") throw InputError("--sweep is quick or full");
  const int count = o.count > 0 ? o.count : (full ? 20 : 4);
  json params = {{"estimate", o.estimate}, {"p", o.p}, {"sweep", o.sweep}, {"mu", o.mu}, {"count", count}};

  SweepConfig sweep;
  if (!full) {
    sweep.grid = GridSpec(64.0, 512);
    sweep.steps = 64;
    sweep.k_max = 8;
  }
  if (ctx.g.length > 0 || ctx.g.points > 0) sweep.grid = ctx.grid(sweep.grid.length(), sweep.grid.points());
  if (ctx.g.steps > 0) sweep.steps = ctx.g.steps;
  if (ctx.g.final_time > 0) sweep.final_time = ctx.g.final_time;
  if (o.kmax > 0) sweep.k_max = o.kmax;
  sweep.cutoff_smoothness = ctx.g.cutoff;
  const CutoffProfile cutoff = ctx.cutoff();
  const std::uint64_t seed = ctx.g.seed;

  const GridSpec field_grid = full ? GridSpec(128.0, 512) : GridSpec(64.0, 256);
  const TimeGrid field_time = full ? TimeGrid(0.5, 32) : TimeGrid(0.25, 16);
  XNormOptions xo;
  xo.decomposition.j_min = std::max(ctx.g.jmin, full ? -8 : -4);
  const Rational pr(static_cast<long long>(std::lround(3.0 * o.p)), 3);
  const MixedNormSpec work{o.p + 2.0 / 3.0, 3.0 * o.p + 2.0};

  std::vector<EstimateReport> reports;
  const std::string& e = o.estimate;
  auto band_family = [&] { return standard_family(seed, count, std::min(32.0, static_cast<double>(sweep.k_max))); };
  if (e == "smoothing" || e == "maximal") {
    params["grid"] = {sweep.grid.length(), sweep.grid.points(), sweep.steps, sweep.k_max};
    ctx.begin("verify", params);
    auto all = verify_smoothing_maximal(band_family(), o.p, sweep);
    if (e == "smoothing") reports = {all[0]};
    else reports = {all[1], all[2]};
  } else if (e == "strichartz") {
    params["grid"] = {sweep.grid.length(), sweep.grid.points(), sweep.steps, sweep.k_max};
    ctx.begin("verify", params);
    reports = verify_homogeneous_strichartz(band_family(), o.p, sweep);
  } else if (e == "duhamel") {
    params["grid"] = {sweep.grid.length(), sweep.grid.points(), sweep.steps, sweep.k_max};
    ctx.begin("verify", params);
    reports = {verify_duhamel(band_family(), o.p, sweep)};
  } else if (e == "scaling") {
    const std::string id = o.scaling_case.empty() ? "strichartz_p" + short_fmt(o.p) : o.scaling_case;
    ScalingCase chosen;
    bool found = false;
    for (const auto& c : standard_scaling_cases())
      if (c.id == id) {
        chosen = c;
        found = true;
      }
    if (!found) throw InputError("unknown scaling case '" + id + "'");
    ScalingConfig sc;
    if (!full) {
      sc.base_length = 64.0;
      sc.points = 512;
      sc.steps = 64;
      sc.scales = {-3, -2, -1, 0};
    }
    sc.cutoff_smoothness = ctx.g.cutoff;
    params["case"] = id;
    params["grid"] = {sc.base_length, sc.points, sc.steps};
    ctx.begin("verify", params);
    reports = {verify_scaling_law(scaling_family(seed, count, sc.k), chosen, sc)};
  } else if (e == "xmu") {
    params["mu"] = o.mu;
    ctx.begin("verify", params);
    reports = verify_xmu_linear(standard_family(seed, count, 3.0), field_family(field_grid, field_time, seed, count, 3.0),
                                field_grid, field_time, o.mu, pr, cutoff, xo);
  } else if (e == "coarsen") {
    ctx.begin("verify", params);
    reports = {verify_band_coarsening(field_family(field_grid, field_time, seed, count, 3.0),
                                      {{-3, -1}, {-2, 0}, {-1, 0}}, work, cutoff)};
  } else if (e == "embed") {
    ctx.begin("verify", params);
    reports = {verify_bernstein_embedding(field_family(field_grid, field_time, seed, count, 3.0), o.p + 2.0 / 3.0,
                                          3.0 * o.p + 2.0, kInf, o.mu, cutoff, xo)};
  } else if (e == "product") {
    ctx.begin("verify", params);
    const auto left = field_family(field_grid, field_time, seed, count, 2.0);
    const auto right = field_family(field_grid, field_time, seed + 1, count, 2.0);
    reports = {verify_product_estimate(left, right, {{2.0, 2.0}, {4.0, 4.0}, {4.0, 4.0}}, o.mu, cutoff, xo)};
  } else if (e == "power") {
    const int m = static_cast<int>(std::lround(2.0 * o.p));
    if (std::abs(2.0 * o.p - m) > 1e-12) throw InputError("power needs 2p to be an integer");
    ctx.begin("verify", params);
    reports = {verify_power_nonlinearity(field_family(GridSpec(64.0, 512), field_time, seed, count, 1.0), m, cutoff,
                                         {0.25, 0.5, 1.0, 2.0}, xo)};
  } else {
    throw InputError("unknown estimate '" + e +
                     "' (smoothing, maximal, strichartz, duhamel, scaling, xmu, coarsen, embed, product, power)");
  }

  std::ofstream csv = ctx.open("verify_" + e + ".csv");
  write_csv_header(csv);
  for (const auto& r : reports) write_csv_rows(csv, r, ctx.hash);
  bool any_fit = false;
  for (const auto& r : reports) any_fit = any_fit || r.has_fit;
  if (any_fit) {
    std::ofstream fit = ctx.open("verify_" + e + "_fit.csv");
    fit << "estimate_id,slope,predicted,intercept,residual,passed,config_hash\n";
    for (const auto& r : reports)
      if (r.has_fit)
        fit << r.estimate_id << ',' << r.fit.slope << ',' << r.predicted_slope << ',' << r.fit.intercept << ','
            << r.fit.residual << ',' << (r.passed ? 1 : 0) << ',' << Context::hex(ctx.hash) << '\n';
  }
  for (const auto& r : reports) {
    ctx.out << r.estimate_id << " rows=" << r.rows.size() << " max_ratio=" << fmt(r.max_ratio);
    if (r.has_fit) ctx.out << " slope=" << fmt(r.fit.slope) << " predicted=" << fmt(r.predicted_slope);
    ctx.out << (r.passed ? " PASS" : " FAIL") << '\n';
  }
  return check_failures(ctx, reports);
}

struct CounterexampleOptions {
  double mu = 0.1;
};

int cmd_counterexample(Context& ctx, const CounterexampleOptions& o) {
  const GridSpec spec = ctx.grid(std::ldexp(1.0, 18), Index{1} << 16);
  const int jmin = ctx.g.jmin;
  if (jmin > -2) throw InputError("counterexample needs --jmin <= -2");
  ctx.begin("counterexample", {{"mu", o.mu}, {"L", spec.length()}, {"N", spec.points()}});
  std::vector<int> levels;
  for (int j = -2; j >= jmin; --j) levels.push_back(j);
  DecompositionOptions d;
  d.j_min = jmin;
  const auto rows = counterexample_table(o.mu, levels, spec, ctx.cutoff(), d);
  write_grid(ctx.dir() / "counterexample.json", build_counterexample(o.mu, jmin, spec));

  std::ofstream csv = ctx.open("counterexample.csv");
  csv << "j_min,l2,band_l2,predicted_band_l2,m_bound,witness_strategy,config_hash\n";
  ctx.out << "j_min        l2   band_l2 predicted   M-bound witness\n";
  bool ok = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const double predicted = std::exp2(-r.j_min * o.mu) / (r.j_min * r.j_min);
    csv << r.j_min << ',' << r.l2 << ',' << r.band_l2 << ',' << predicted << ',' << r.m_bound << ',' << r.witness << ','
        << Context::hex(ctx.hash) << '\n';
    ctx.out << std::setw(5) << r.j_min << std::fixed << std::setprecision(6) << std::setw(10) << r.l2 << std::setw(10)
            << r.band_l2 << std::setw(10) << predicted << std::setw(10) << r.m_bound << ' ' << r.witness
            << std::defaultfloat << '\n';
    if (i > 0 && !(r.l2 > rows[i - 1].l2)) {
      ok = false;
      ctx.err << "L2 norm does not grow at j_min = " << r.j_min << '\n';
    }
    if (r.j_min <= -3 && (r.band_l2 > 2.0 * predicted || r.band_l2 < 0.5 * predicted)) {
      ok = false;
      ctx.err << "band norm off the 2^{-j mu}/j^2 law at j_min = " << r.j_min << '\n';
    }
  }
  return ok ? 0 : 2;
}

struct SolveOptions {
  std::string equation = "d4nls";
  int m = 8;
  double lambda = 1.0;
  double lambda_im = 0.0;
  double amp = 0.01;
  bool reference = false;
  bool lipschitz = false;
  bool threshold = false;
  bool out_of_theorem = false;
  int frames_every = 1;
  int max_iter = 50;
  double tol = 1e-12;
  double mu = 0.0;
  DatumOptions datum;
};

int cmd_solve(Context& ctx, const SolveOptions& o) {
  const Equation e = equation_from_string(o.equation);
  // The d4nls default cell holds the dispersed Gaussian up to T = 0.5.
  const GridSpec spec = ctx.grid(e == Equation::d4nls ? 512.0 : 256.0, 1024);
  const TimeGrid time = ctx.time(0.5, 256);
  if (o.frames_every < 0) throw InputError("--frames-every must be >= 0");
  ctx.begin("solve", {{"equation", o.equation}, {"m", o.m}, {"lambda", {o.lambda, o.lambda_im}}, {"amp", o.amp},
                      {"L", spec.length()}, {"N", spec.points()}, {"T", time.final_time()}, {"M", time.steps()},
                      {"reference", o.reference}, {"lipschitz", o.lipschitz}, {"threshold", o.threshold},
                      {"out_of_theorem", o.out_of_theorem}, {"max_iter", o.max_iter}, {"tol", o.tol}, {"mu", o.mu},
                      {"datum", datum_json(o.datum)}});
  const GridFunction shape = load_datum(o.datum, spec, ctx.g.seed);
  ProblemSpec problem{e, o.m, Complex(o.lambda, o.lambda_im), GridFunction::from_coeffs(shape.spec(), o.amp * shape.coeffs()),
                      time, o.out_of_theorem};
  problem.validate();
  PicardOptions po;
  po.max_iter = o.max_iter;
  po.tol = o.tol;
  po.mu = o.mu;
  po.cutoff_smoothness = ctx.g.cutoff;

  json diag = {{"config_hash", Context::hex(ctx.hash)}};
  std::ofstream trace_csv = ctx.open("trace.csv");
  trace_csv << "n,r_n,rho_n,config_hash\n";
  auto write_trace = [&](const IterationTrace& t) {
    for (std::size_t n = 0; n < t.residuals.size(); ++n) {
      trace_csv << n << ',' << t.residuals[n] << ',';
      if (n > 0) trace_csv << t.ratios[n - 1];
      trace_csv << ',' << Context::hex(ctx.hash) << '\n';
    }
  };
  auto write_diag = [&] {
    std::ofstream f = ctx.open("diagnostics.json");
    f << diag.dump(2) << '\n';
  };

  PicardResult result = [&]() -> PicardResult {
    try {
      return picard_solve(problem, 1.0, po);
    } catch (const NoContraction& x) {
      write_trace(x.trace);
      diag["picard"] = {{"error", x.what()}};
      write_diag();
      throw;
    } catch (const BlowUp& x) {
      write_trace(x.trace);
      diag["picard"] = {{"error", x.what()}};
      write_diag();
      throw;
    }
  }();
  const IterationTrace& t = result.trace;
  write_trace(t);
  const double fp = fixed_point_residual(problem, result.u);
  const bool accepted = t.converged && t.max_ratio() < 1.0;
  bool ok = accepted && fp <= std::max(1e-10, 10.0 * o.tol);
  diag["picard"] = {{"converged", t.converged},         {"iterations", t.residuals.size()},
                    {"final_ratio", t.final_ratio()},   {"max_ratio", t.max_ratio()},
                    {"quadrature_error", t.quadrature_error}, {"fixed_point_residual", fp},
                    {"linear_norm", t.linear_norm},     {"flags", t.flags},
                    {"mass_drift", mass_drift(result.u)}};
  double edge = 0.0;
  for (Index n = 0; n < time.frames(); ++n) edge = std::max(edge, boundary_mass(result.u.frame(n)));
  diag["picard"]["boundary_mass"] = edge;
  if (edge > 1e-8) ctx.err << "solution mass near the cell boundary: " << fmt(edge) << " (periodisation)\n";
  if (!accepted) ctx.err << "Picard iteration did not contract\n";

  if (o.frames_every > 0) {
    fs::create_directories(ctx.dir() / "frames");
    for (Index n = 0; n < time.frames(); n += o.frames_every) {
      std::ostringstream name;
      name << "u_" << std::setw(5) << std::setfill('0') << n << ".json";
      write_grid(ctx.dir() / "frames" / name.str(), result.u.frame(n));
    }
  }
  if (o.reference) {
    const ReferenceResult r = reference_solve(problem);
    const double diff = sup_l2(result.u - r.u) / sup_l2(r.u);
    const double tol = std::max(1e-6, 10.0 * (t.quadrature_error + r.error_estimate));
    diag["reference"] = {{"error_estimate", r.error_estimate}, {"relative_difference", diff}, {"tolerance", tol},
                         {"agree", diff <= tol}, {"mass_drift", mass_drift(r.u)}};
    if (accepted && !(diff <= tol)) {
      ok = false;
      ctx.err << "Picard and reference solutions differ by " << diff << " > " << tol << '\n';
    }
  }
  if (o.lipschitz) {
    LipschitzOptions lo;
    lo.seed = ctx.g.seed;
    lo.picard = po;
    const LipschitzReport l = lipschitz_probe(problem, lo);
    diag["lipschitz"] = {{"spread_l2", l.spread_l2}, {"spread_work", l.spread_work}, {"passed", l.passed}};
    std::ofstream csv = ctx.open("lipschitz.csv");
    write_csv_header(csv);
    write_csv_rows(csv, l.l2, ctx.hash);
    write_csv_rows(csv, l.work, ctx.hash);
    if (!l.passed) {
      ok = false;
      ctx.err << "Lipschitz ratios spread by " << l.spread_l2 << " / " << l.spread_work << '\n';
    }
  }
  if (o.threshold) {
    ThresholdOptions th;
    th.picard = po;
    const ThresholdReport r = small_data_threshold(problem, th);
    diag["threshold"] = {{"empirical_threshold", std::isinf(r.threshold) ? json("inf") : json(r.threshold)},
                         {"datum_norm_ub", std::isinf(r.datum_norm) ? json("inf") : json(r.datum_norm)},
                         {"monotone", r.monotone}, {"probes", r.probes.size()}};
    if (!r.monotone) ctx.err << "contraction is not monotone in the amplitude (flagged)\n";
  }
  write_diag();
  ctx.out << "iterations=" << t.residuals.size() << " final_ratio=" << fmt(t.final_ratio())
          << " fixed_point_residual=" << fmt(fp) << (ok ? " PASS" : " FAIL") << '\n';
  return ok ? 0 : 2;
}

struct ReportOptions {
  std::string dir;
};

int cmd_report(Context& ctx, const ReportOptions& o) {
  const fs::path dir = o.dir.empty() ? ctx.dir() : fs::path(o.dir);
  if (!fs::is_directory(dir)) throw InputError("no such directory '" + dir.string() + "'");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".csv" && entry.path().filename() != "summary.csv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  struct Summary {
    std::size_t rows = 0;
    double max_ratio = 0.0;
    double min_ratio = kInf;
    std::string hash;
  };
  std::map<std::pair<std::string, std::string>, Summary> table;
  for (const auto& path : files) {
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    if (line.rfind("estimate_id,input_id", 0) != 0) continue;
    while (std::getline(in, line)) {
      std::vector<std::string> cells;
      std::stringstream ss(line);
      for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
      if (cells.size() != 9) continue;
      Summary& s = table[{path.filename().string(), cells[0]}];
      const double ratio = std::stod(cells[7]);
      ++s.rows;
      s.max_ratio = std::max(s.max_ratio, ratio);
      s.min_ratio = std::min(s.min_ratio, ratio);
      s.hash = cells[8];
    }
  }
  std::ofstream out(dir / "summary.csv");
  if (!out) throw InputError("cannot write summary.csv in " + dir.string());
  out << std::setprecision(17) << "file,estimate_id,rows,min_ratio,max_ratio,config_hash\n";
  for (const auto& [key, s] : table) {
    out << key.first << ',' << key.second << ',' << s.rows << ',' << s.min_ratio << ',' << s.max_ratio << ',' << s.hash
        << '\n';
    ctx.out << key.first << ' ' << key.second << " rows=" << s.rows << " max_ratio=" << fmt(s.max_ratio) << '\n';
  }
  return 0;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

int run(const std::vector<std::string>& raw, std::ostream& out, std::ostream& err) {
  CLI::App app{"Modulation-space norms, dispersive estimates and Picard diagnostics", "modspace"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::string config_path;
  app.add_option("--config", config_path, "JSON run config (\"version\": 1); command-line flags override it");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--L", g.length, "Grid length (command default when omitted)");
  app.add_option("--N", g.points, "Grid points, a power of two");
  app.add_option("--T", g.final_time, "Final time");
  app.add_option("--M", g.steps, "Time steps");
  app.add_option("--cutoff", g.cutoff, "Cutoff smoothness order")->capture_default_str();
  app.add_option("--jmin", g.jmin, "Coarsest scale J_min")->capture_default_str();
  app.add_option("--seed", g.seed, "Seed of every random family")->capture_default_str();

  NormOptions norm;
  auto* c_norm = app.add_subcommand("norm", "Static norm of a datum");
  c_norm->add_option("--space", norm.space, "lp, hs, mpq, mjpq, msmu, flr")->required();
  c_norm->add_option("--p", norm.p);
  c_norm->add_option("--q", norm.q);
  c_norm->add_option("--s", norm.s);
  c_norm->add_option("--j", norm.j);
  c_norm->add_option("--mu", norm.mu);
  c_norm->add_option("--r", norm.r);
  add_datum_options(c_norm, norm.datum);

  DecomposeOptions dec;
  auto* c_dec = app.add_subcommand("decompose", "Write box_{j,k} f as a grid file");
  c_dec->add_option("--j", dec.j);
  c_dec->add_option("--k", dec.k);
  add_datum_options(c_dec, dec.datum);

  PropagateOptions prop;
  auto* c_prop = app.add_subcommand("propagate", "Write W(t) f as a grid file");
  c_prop->add_option("--equation", prop.equation, "d4nls or gkdv");
  c_prop->add_option("--t", prop.t);
  add_datum_options(c_prop, prop.datum);

  VerifyOptions ver;
  auto* c_ver = app.add_subcommand("verify", "Run an estimate sweep and write its CSV report");
  c_ver->add_option("--estimate", ver.estimate,
                    "smoothing, maximal, strichartz, duhamel, scaling, xmu, coarsen, embed, product, power")
      ->required();
  c_ver->add_option("--p", ver.p);
  c_ver->add_option("--sweep", ver.sweep, "quick or full");
  c_ver->add_option("--mu", ver.mu);
  c_ver->add_option("--count", ver.count, "Family size");
  c_ver->add_option("--kmax", ver.kmax, "Largest |k| of the band sweeps");
  c_ver->add_option("--case", ver.scaling_case, "Scaling case id (default strichartz_p<P>)");

  CounterexampleOptions cex;
  auto* c_cex = app.add_subcommand("counterexample", "Build the infinite-L2 datum and tabulate its norms");
  c_cex->add_option("--mu", cex.mu);

  SolveOptions sol;
  auto* c_sol = app.add_subcommand("solve", "Picard iteration with diagnostics");
  c_sol->add_option("--equation", sol.equation, "d4nls or gkdv");
  c_sol->add_option("--m", sol.m);
  c_sol->add_option("--lambda", sol.lambda);
  c_sol->add_option("--lambda-im", sol.lambda_im);
  c_sol->add_option("--amp", sol.amp);
  c_sol->add_flag("--reference", sol.reference, "Cross-check against the RK4 reference");
  c_sol->add_flag("--lipschitz", sol.lipschitz, "Run the Lipschitz probe");
  c_sol->add_flag("--threshold", sol.threshold, "Search the empirical small-data threshold");
  c_sol->add_flag("--out-of-theorem", sol.out_of_theorem, "Admit m below the theorem range");
  c_sol->add_option("--frames-every", sol.frames_every, "Write every k-th frame (0: none)");
  c_sol->add_option("--max-iter", sol.max_iter);
  c_sol->add_option("--tol", sol.tol);
  c_sol->add_option("--mu", sol.mu);
  add_datum_options(c_sol, sol.datum);

  ReportOptions rep;
  auto* c_rep = app.add_subcommand("report", "Summarise the estimate CSVs of a directory");
  c_rep->add_option("--dir", rep.dir);

  try {
    if (raw.empty()) {
      err << app.help();
      return 1;
    }
    std::vector<std::string> args = expand_config(raw);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return 1;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return 1;
  }

  Context ctx{g, out, err, {}, 0};
  try {
    if (*c_norm) return cmd_norm(ctx, norm);
    if (*c_dec) return cmd_decompose(ctx, dec);
    if (*c_prop) return cmd_propagate(ctx, prop);
    if (*c_ver) return cmd_verify(ctx, ver);
    if (*c_cex) return cmd_counterexample(ctx, cex);
    if (*c_sol) return cmd_solve(ctx, sol);
    if (*c_rep) return cmd_report(ctx, rep);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const OutOfRange& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const ResolutionError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    err << "failed: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace modspace::cli
