#include "flatmap/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

namespace flatmap::cli {

using io::ConfigError;
using io::json;

std::vector<double> ScanAxis::points() const {
  if (!(step > 0)) throw ConfigError("scan: step must be positive");
  if (!(max >= min)) throw ConfigError("scan: empty grid (max < min)");
  std::vector<double> p;
  const double slack = 1e-9 * step;
  for (long i = 0;; ++i) {
    const double v = min + static_cast<double>(i) * step;
    if (v > max + slack) break;
    p.push_back(v);
  }
  return p;
}

std::optional<std::string> ExperimentConfig::output(const std::string& key) const {
  for (const auto& [k, v] : outputs) {
    if (k == key) return v;
  }
  return std::nullopt;
}

namespace {

int int_field(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) throw ConfigError(std::string(key) + ": expected an integer");
  return j.at(key).get<int>();
}

double double_field(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return std::stod(v.get<std::string>());
    } catch (const std::exception&) {
    }
  }
  throw ConfigError(std::string(key) + ": expected a number");
}

TuningConfig parse_tuning(const json& j, int depth) {
  if (!j.is_object()) throw ConfigError("tuning: expected an object");
  TuningConfig t;
  try {
    t.parameter = parse_tuning_parameter(j.value("parameter", std::string("x2")));
  } catch (const DomainError& e) {
    throw ConfigError(std::string("tuning: ") + e.what());
  }
  if (!j.contains("bracket")) throw ConfigError("tuning: missing \"bracket\"");
  const json& b = j.at("bracket");
  if (b.is_string() && b.get<std::string>() == "auto") {
    if (t.parameter != TuningParameter::X2) throw ConfigError("tuning: an automatic bracket needs parameter x2");
    t.auto_bracket = true;
  } else {
    if (!b.is_array() || b.size() != 2) throw ConfigError("tuning: bracket must be [lo, hi] or \"auto\"");
    t.lo = io::real_from_json(b[0], "tuning.bracket[0]");
    t.hi = io::real_from_json(b[1], "tuning.bracket[1]");
    if (!(t.lo < t.hi)) throw ConfigError("tuning: bracket must satisfy lo < hi");
  }
  t.target_depth = int_field(j, "target_depth", depth);
  t.margin = int_field(j, "margin", 2);
  t.scan_samples = int_field(j, "scan_samples", t.auto_bracket ? 200 : 0);
  if (t.target_depth < 0 || t.margin < 0) throw ConfigError("tuning: depths must be >= 0");
  if (j.contains("refine")) {
    const json& r = j.at("refine");
    t.refine_rounds = int_field(r, "rounds", 3);
    t.refine_target = int_field(r, "target_depth", t.target_depth + 2);
    t.refine_level = int_field(r, "level", t.refine_target - 2);
    if (!t.auto_bracket) throw ConfigError("tuning: refine needs bracket \"auto\"");
  }
  return t;
}

MapRun parse_run(const json& j, const std::string& name, int depth) {
  MapRun r;
  r.name = j.value("name", name);
  r.map = io::map_from_json(j.at("map"));
  const ValidationReport v = validate(r.map);
  if (!v.ok()) {
    std::string msg = "map \"" + r.name + "\" violates:";
    for (const auto& s : v.violations) msg += " [" + s + "]";
    throw ConfigError(msg);
  }
  if (j.contains("tuning") && !j.at("tuning").is_null()) r.tuning = parse_tuning(j.at("tuning"), depth);
  return r;
}

ScanAxis parse_axis(const json& j, const char* what) {
  if (!j.is_object()) throw ConfigError(std::string("scan.") + what + ": expected an object");
  ScanAxis a;
  a.min = double_field(j, "min", 1);
  a.max = double_field(j, "max", a.min);
  a.step = double_field(j, "step", 1);
  if (!(a.min >= 1)) throw ConfigError(std::string("scan.") + what + ": exponents must be >= 1");
  return a;
}

}  // namespace

ExperimentConfig parse_config(const json& j, const Overrides& o) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  ExperimentConfig c;
  c.precision = static_cast<unsigned>(int_field(j, "precision", 256));
  if (o.precision) c.precision = *o.precision;
  PrecisionPolicy policy;
  policy.mantissa_bits = c.precision;
  try {
    policy.apply();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  c.depth = int_field(j, "depth", 8);
  if (o.depth) c.depth = *o.depth;
  if (c.depth < 0) throw ConfigError("depth must be >= 0");
  c.digits = int_field(j, "digits", 17);
  if (c.digits < 1 || c.digits > 1000) throw ConfigError("digits must lie in [1, 1000]");
  c.verify_tol = Real("1e-20");

  if (j.contains("map")) {
    json r = {{"map", j.at("map")}};
    if (j.contains("tuning")) r["tuning"] = j.at("tuning");
    c.run = parse_run(r, "map", c.depth);
  } else if (j.contains("tuning")) {
    throw ConfigError("tuning given without a map");
  }
  if (j.contains("classification")) {
    const json& h = j.at("classification");
    c.classification.threshold = double_field(h, "K", c.classification.threshold);
    c.classification.growth_levels = int_field(h, "k", c.classification.growth_levels);
    c.classification.band = double_field(h, "band", c.classification.band);
    c.classification.min_even_levels = int_field(h, "min_even_levels", c.classification.min_even_levels);
    if (c.classification.growth_levels < 1) throw ConfigError("classification: k must be >= 1");
  }
  if (j.contains("scan")) {
    const json& s = j.at("scan");
    if (!s.contains("l1") || !s.contains("l2")) throw ConfigError("scan: needs l1 and l2 axes");
    c.scan_l1 = parse_axis(s.at("l1"), "l1");
    c.scan_l2 = parse_axis(s.at("l2"), "l2");
  }
  if (j.contains("dimension")) {
    const json& d = j.at("dimension");
    if (d.contains("depths")) {
      c.dimension_depths.clear();
      for (const auto& v : d.at("depths")) {
        if (!v.is_number_integer() || v.get<int>() < 0) throw ConfigError("dimension.depths: expected integers >= 0");
        c.dimension_depths.push_back(v.get<int>());
      }
    }
    c.dimension_scales = int_field(d, "scales", c.dimension_scales);
    if (d.contains("runs")) {
      int k = 0;
      for (const auto& r : d.at("runs")) c.dimension_runs.push_back(parse_run(r, "run" + std::to_string(k++), c.depth));
    }
  }
  if (j.contains("verify")) {
    const json& v = j.at("verify");
    c.verify_samples = int_field(v, "samples", c.verify_samples);
    if (v.contains("tol")) c.verify_tol = io::real_from_json(v.at("tol"), "verify.tol");
    c.verify_corrupt = v.value("corrupt", false);
    c.property_samples = int_field(v, "property_samples", c.property_samples);
    if (c.verify_samples < 0 || c.property_samples < 0) throw ConfigError("verify: sample counts must be >= 0");
  }
  if (j.contains("outputs")) {
    for (const auto& [k, v] : j.at("outputs").items()) {
      if (!v.is_string()) throw ConfigError("outputs: paths must be strings");
      c.outputs.emplace_back(k, v.get<std::string>());
    }
  }
  return c;
}

MapX<Real> prepare_map(const MapRun& run, const PrecisionPolicy& policy) {
  if (!run.tuning) return run.map;
  const TuningConfig& t = *run.tuning;
  MapX<Real> tmpl = run.map;
  if (t.refine_rounds > 0) tmpl = refine_template(tmpl, t.refine_target, t.refine_level, t.refine_rounds, policy);
  if (t.target_depth == 0) return tune_to_fibonacci(tmpl, t.parameter, t.lo, t.hi, 0, policy, t.margin).map;
  Real lo = t.lo, hi = t.hi;
  if (t.auto_bracket) {
    lo = tmpl.x3 * Real("1e-6");
    hi = tmpl.x3 * (1 - Real("1e-6"));
  }
  if (t.scan_samples > 0) {
    const auto br = find_bracket(tmpl, t.parameter, lo, hi, t.target_depth + t.margin, policy, t.scan_samples);
    if (br.first == br.second) return with_parameter(tmpl, t.parameter, br.first);
    lo = br.first;
    hi = br.second;
  }
  return tune_to_fibonacci(tmpl, t.parameter, lo, hi, t.target_depth, policy, t.margin).map;
}

namespace {

struct Options {
  std::string config;
  std::optional<unsigned> precision;
  std::optional<int> depth;
  std::string out;
  unsigned threads = 0;
  std::uint64_t seed = 1;
  std::string l1 = "2", l2 = "2";
};

/// Writes to `path` when given, else to the fallback stream.
void emit(const std::optional<std::string>& path, std::ostream& fallback, const std::function<void(std::ostream&)>& body) {
  if (!path || path->empty() || *path == "-") {
    body(fallback);
    return;
  }
  std::ofstream f(*path);
  if (!f) throw ConfigError("cannot open output file " + *path);
  body(f);
}

std::optional<std::string> primary_output(const Options& o, const ExperimentConfig& c, const std::string& key) {
  if (!o.out.empty()) return o.out;
  return c.output(key);
}

ExperimentConfig load(const Options& o) {
  if (o.config.empty()) throw ConfigError("--config is required for this command");
  std::ifstream f(o.config);
  if (!f) throw ConfigError("cannot read config " + o.config);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j, Overrides{o.precision, o.depth});
}

PrecisionPolicy policy_of(const ExperimentConfig& c) {
  PrecisionPolicy p;
  p.mantissa_bits = c.precision;
  return p;
}

const MapRun& need_run(const ExperimentConfig& c) {
  if (!c.run) throw ConfigError("config: missing \"map\"");
  return *c.run;
}

RenormTrace<Real> trace_of(const ExperimentConfig& c, const MapX<Real>& f) {
  return iterate(f, c.depth, policy_of(c));
}

int cmd_renormalize(const Options& o, std::ostream& out, std::ostream& err) {
  const ExperimentConfig c = load(o);
  const MapX<Real> f = prepare_map(need_run(c), policy_of(c));
  const RenormTrace<Real> trace = trace_of(c, f);
  const auto trace_path = primary_output(o, c, "trace");
  emit(trace_path, out, [&](std::ostream& os) { io::write_trace_csv(os, trace, c.digits); });
  json summary = io::trace_summary(trace, c.digits);
  summary["initial_map"] = io::map_to_json(f, c.digits);
  if (trace.depth() > 0) {
    try {
      const GeometryReport<Real> g = analyze(trace, c.classification);
      summary["verdict"] = to_string(g.verdict);
      summary["max_w_norm"] = g.max_w_norm;
    } catch (const std::exception& e) {
      summary["verdict"] = to_string(Verdict::Undetermined);
      summary["verdict_note"] = e.what();
    }
  }
  const auto summary_path = c.output("summary");
  std::ostream& fallback = trace_path && !trace_path->empty() && *trace_path != "-" ? out : err;
  emit(summary_path, fallback, [&](std::ostream& os) { os << summary.dump(2) << '\n'; });
  if (trace.precision_exhausted) {
    err << "precision exhausted: " << trace.note << '\n';
    return PrecisionFailure;
  }
  return Ok;
}

int cmd_tune(const Options& o, std::ostream& out, std::ostream&) {
  const ExperimentConfig c = load(o);
  const MapRun& run = need_run(c);
  if (!run.tuning) throw ConfigError("tune: config has no tuning block");
  const MapX<Real> f = prepare_map(run, policy_of(c));
  json j;
  j["parameter"] = io::format(f.x2, c.digits);
  j["target_depth"] = run.tuning->target_depth;
  j["margin"] = run.tuning->margin;
  j["map"] = io::map_to_json(f, c.digits);
  emit(primary_output(o, c, "tuned_map"), out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return Ok;
}

Real parse_exponent(const std::string& text, const char* what) {
  try {
    size_t used = 0;
    (void)std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return Real(text);
  } catch (const std::exception&) {
    throw ConfigError(std::string(what) + ": not a number");
  }
}

int cmd_spectrum(const Options& o, std::ostream& out, std::ostream&) {
  PrecisionPolicy p;
  if (o.precision) p.mantissa_bits = *o.precision;
  try {
    p.apply();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  const Real l1 = parse_exponent(o.l1, "--l1"), l2 = parse_exponent(o.l2, "--l2");
  if (!(l1 >= 1 && l2 >= 1)) throw ConfigError("spectrum: exponents must be >= 1");
  const SpectralData<Real> d = eigen(l1, l2);
  std::optional<std::string> path;
  if (!o.out.empty()) path = o.out;
  emit(path, out, [&](std::ostream& os) { os << io::spectrum_to_json(d, 17).dump(2) << '\n'; });
  return Ok;
}

struct PhaseRow {
  double l1, l2, lambda_u, lambda_s;
  Quadrant quadrant;
};

int cmd_phase_diagram(const Options& o, std::ostream& out, std::ostream&) {
  const ExperimentConfig c = load(o);
  if (!c.scan_l1 || !c.scan_l2) throw ConfigError("phase-diagram: config has no scan block");
  const std::vector<double> g1 = c.scan_l1->points(), g2 = c.scan_l2->points();
  if (g1.empty() || g2.empty()) throw ConfigError("phase-diagram: empty grid");
  const size_t total = g1.size() * g2.size();
  std::vector<PhaseRow> rows(total);
  // each worker claims the next index and writes only its own slot
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < total; i = next++) {
      const double a = g1[i / g2.size()], b = g2[i % g2.size()];
      rows[i] = {a, b, lambda_u(a, b), lambda_s(a, b), classify_quadrant(a, b, 1e-12)};
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned n = static_cast<unsigned>(std::min<size_t>(o.threads == 0 ? hw : o.threads, total));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  emit(primary_output(o, c, "phase"), out, [&](std::ostream& os) {
    os << "l1,l2,lambda_u,lambda_s,quadrant\n";
    auto f = [&](double x) { return math::to_scientific(x, c.digits); };
    for (const auto& r : rows) {
      os << f(r.l1) << ',' << f(r.l2) << ',' << f(r.lambda_u) << ',' << f(r.lambda_s) << ',' << to_string(r.quadrant)
         << '\n';
    }
  });
  return Ok;
}

int cmd_classify(const Options& o, std::ostream& out, std::ostream& err) {
  const ExperimentConfig c = load(o);
  const MapX<Real> f = prepare_map(need_run(c), policy_of(c));
  RenormTrace<Real> trace = iterate(f, c.depth, policy_of(c), IterateOptions{false, 0});
  json j;
  j["depth"] = trace.depth();
  j["requested_depth"] = c.depth;
  j["precision_exhausted"] = trace.precision_exhausted;
  if (trace.depth() == 0) throw ConfigError("classify: the map is not renormalizable at level 0");
  const GeometryReport<Real> g = analyze(trace, c.classification);
  j["geometry"] = io::geometry_to_json(g, c.digits);
  emit(primary_output(o, c, "geometry"), out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  if (trace.precision_exhausted) {
    err << "precision exhausted: " << trace.note << '\n';
    return PrecisionFailure;
  }
  return Ok;
}

/// Max difference of the scalar S coordinates of two maps.
Real chart_gap(const MapS<Real>& a, const MapS<Real>& b) {
  using std::abs;
  Real m = abs(a.S1 - b.S1);
  m = std::max(m, Real(abs(a.S2 - b.S2)));
  m = std::max(m, Real(abs(a.S3 - b.S3)));
  m = std::max(m, Real(abs(a.S4 - b.S4)));
  m = std::max(m, Real(abs(a.S5 - b.S5)));
  return m;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream&) {
  using std::abs;
  const ExperimentConfig c = load(o);
  const PrecisionPolicy policy = policy_of(c);
  const MapX<Real> f = prepare_map(need_run(c), policy);
  json checks = json::array();
  bool all = true;
  auto record = [&](const std::string& name, bool pass, json detail) {
    detail["name"] = name;
    detail["pass"] = pass;
    checks.push_back(detail);
    all = all && pass;
  };

  // first-return oracle against the operator
  VerifyReport<Real> rep;
  rep.samples = c.verify_samples;
  if (c.verify_samples > 0) {
    if (!is_renormalizable(f)) throw ConfigError("verify: map is not renormalizable");
    MapX<Real> rf = renorm_x(f, policy);
    if (c.verify_corrupt) rf.x3 += Real("1e-5");
    rep = verify_renorm(f, rf, c.verify_samples, math::to_double(c.verify_tol));
  }
  record("renorm_oracle", rep.pass, {{"max_err", rep.max_err}, {"samples", rep.samples}});

  // renormalization commutes with the change of coordinates
  if (is_renormalizable(f)) {
    const Real gap = chart_gap(renorm_s(x_to_s(f), policy), x_to_s(renorm_x(f, policy)));
    record("chart_commutation", gap <= c.verify_tol, {{"max_err", math::to_double(gap)}});
  }

  const GapDecayReport gd = gap_decay_check(f, c.depth);
  if (gd.sufficient) {
    record("gap_decay", gd.pass, {{"slope", gd.fit.slope}, {"r2", gd.fit.r2}});
  } else {
    checks.push_back({{"name", "gap_decay"}, {"pass", true}, {"skipped", gd.note}});
  }

  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Real tol = 1024 * policy.tolerance<Real>();

  // diffeomorphism invariants on the map's own charts and on their renormalizations
  {
    std::vector<Diffeo<Real>> ds{f.phi, f.phil, f.phir};
    if (is_renormalizable(f)) {
      const MapX<Real> rf = renorm_x(f, policy);
      ds.insert(ds.end(), {rf.phi, rf.phil, rf.phir});
    }
    Real worst_roundtrip = 0;
    bool monotone = true;
    for (const auto& d : ds) {
      Real prev = -1;
      for (int i = 0; i < c.property_samples; ++i) {
        const Real x = (Real(i) + Real(unit(rng))) / c.property_samples;
        const Real y = d(x);
        worst_roundtrip = std::max(worst_roundtrip, Real(abs(invert(d, y, policy) - x)));
        if (!(y > prev)) monotone = false;
        prev = y;
      }
    }
    record("diffeo_roundtrip", worst_roundtrip <= tol, {{"max_err", math::to_double(worst_roundtrip)}});
    record("diffeo_monotone", monotone, json::object());
  }

  // X <-> S <-> Y round trips
  {
    const MapS<Real> g = x_to_s(f);
    const MapX<Real> back = s_to_x(g);
    Real e = std::max({Real(abs(back.x1 - f.x1)), Real(abs(back.x2 - f.x2)), Real(abs(back.x3 - f.x3)),
                       Real(abs(back.x4 - f.x4)), Real(abs(back.s - f.s))});
    e = std::max(e, chart_gap(y_to_s(s_to_y(g)), g));
    record("coordinate_roundtrip", e <= tol, {{"max_err", math::to_double(e)}});
  }

  // closed-form spectrum at random exponents
  {
    double worst = 0;
    for (int i = 0; i < c.property_samples; ++i) {
      const double a = 1 + 4 * unit(rng), b = 1 + 4 * unit(rng);
      const auto m = build_matrices(a, b);
      for (double lam : {0.0, 1.0, lambda_s(a, b), lambda_u(a, b)}) {
        worst = std::max(worst, std::abs(characteristic_polynomial<double>(m.L_even, lam)));
      }
    }
    record("spectral_closed_form", worst <= 1e-12, {{"max_residual", worst}});
  }

  json j;
  j["max_err"] = rep.max_err;
  j["samples"] = rep.samples;
  j["pass"] = all;
  j["checks"] = checks;
  emit(primary_output(o, c, "verify"), out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return all ? Ok : VerifyFailure;
}

int cmd_dimension(const Options& o, std::ostream& out, std::ostream&) {
  const ExperimentConfig c = load(o);
  const PrecisionPolicy policy = policy_of(c);
  std::vector<MapRun> runs = c.dimension_runs;
  if (runs.empty()) runs.push_back(need_run(c));
  // maps run one after another: the working precision is process-wide
  std::vector<io::DimensionRun> results;
  for (const auto& r : runs) {
    const MapX<Real> f = prepare_map(r, policy);
    io::DimensionRun d;
    d.name = r.name;
    for (int depth : c.dimension_depths) d.estimates.push_back(box_dimension(f, depth, c.dimension_scales, policy));
    results.push_back(std::move(d));
  }
  emit(primary_output(o, c, "dimension"), out, [&](std::ostream& os) { io::write_dimension_csv(os, results, c.digits); });
  return Ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Renormalization of critical circle maps with a flat interval"};
  app.fallthrough();
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, "experiment config (JSON)");
  app.add_option("--precision", o.precision, "mantissa bits");
  app.add_option("--depth", o.depth, "renormalization depth");
  app.add_option("--out", o.out, "output path (default: stdout)");
  app.add_option("--threads", o.threads, "worker threads for scans (0: all cores)");
  app.add_option("--seed", o.seed, "seed for random property checks");
  auto* renormalize = app.add_subcommand("renormalize", "tune, iterate and write the trace CSV");
  auto* spectrum = app.add_subcommand("spectrum", "closed-form spectrum as JSON");
  spectrum->add_option("--l1", o.l1, "left exponent");
  spectrum->add_option("--l2", o.l2, "right exponent");
  auto* phase = app.add_subcommand("phase-diagram", "quadrant of every grid point");
  auto* classify = app.add_subcommand("classify", "eigen-decomposition and geometry verdict");
  auto* verify = app.add_subcommand("verify", "oracle and invariant checks");
  auto* dimension = app.add_subcommand("dimension", "box-counting estimates");
  auto* tune = app.add_subcommand("tune", "tune a map to a Fibonacci depth");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return Ok;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return ConfigFailure;
  }

  try {
    if (renormalize->parsed()) return cmd_renormalize(o, out, err);
    if (spectrum->parsed()) return cmd_spectrum(o, out, err);
    if (phase->parsed()) return cmd_phase_diagram(o, out, err);
    if (classify->parsed()) return cmd_classify(o, out, err);
    if (verify->parsed()) return cmd_verify(o, out, err);
    if (dimension->parsed()) return cmd_dimension(o, out, err);
    if (tune->parsed()) return cmd_tune(o, out, err);
  } catch (const PrecisionExhausted& e) {
    err << "precision exhausted: " << e.what() << '\n';
    return PrecisionFailure;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return ConfigFailure;
  } catch (const BracketNotFound& e) {
    err << "config error: " << e.what() << '\n';
    return ConfigFailure;
  } catch (const NotRenormalizable& e) {
    err << "config error: " << e.what() << '\n';
    return ConfigFailure;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return ConfigFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return ConfigFailure;
  }
  return ConfigFailure;
}

}  // namespace flatmap::cli
