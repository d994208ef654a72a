// lipnet command line: nets, extensions, evolutes, embeddings, factorization
// certificates, finite-metric distortion, matching metrics and parameters.
#include "report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

using namespace lipnet;
using namespace lipnet::cli;

namespace {

constexpr int kPass = 0;
constexpr int kCheckFailure = 1;
constexpr int kUsage = 2;

struct Inputs {
  std::string net_path;
  std::string map_path;
  json inline_net;
  json inline_map;
};

/// Fills options of `sub` that were not given on the command line from a
/// JSON object (or from its member named after the subcommand).
void apply_config(CLI::App* sub, const std::string& path, Inputs& in) {
  const json root = read_json(path);
  if (!root.is_object()) throw InputError("config must be a JSON object");
  const json& cfg = root.contains(sub->get_name()) && root[sub->get_name()].is_object() ? root[sub->get_name()] : root;
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    std::string key = it.key();
    const json& v = it.value();
    if (v.is_object() && (key == "map" || key == "net")) {
      if (sub->get_option_no_throw("--" + key) == nullptr) continue;
      (key == "map" ? in.inline_map : in.inline_net) = v;
      continue;
    }
    if (v.is_object()) continue;  // sections for other subcommands
    std::replace(key.begin(), key.end(), '_', '-');
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr) throw Error("usage", "unknown config key '" + it.key() + "' for " + sub->get_name());
    if (opt->count() > 0) continue;  // command line wins
    auto text = [](const json& x) { return x.is_string() ? x.get<std::string>() : x.dump(); };
    if (v.is_array())
      for (const json& e : v) opt->add_result(text(e));
    else
      opt->add_result(text(v));
    opt->run_callback();
  }
}

Net load_net(const Inputs& in) {
  if (!in.inline_net.is_null()) return net_from_json(in.inline_net);
  if (in.net_path.empty()) throw Error("usage", "a net is required (--net)");
  return net_from_json(read_json(in.net_path));
}

MapSpec load_map(const Inputs& in, int dim) {
  if (!in.inline_map.is_null()) return map_from_json(in.inline_map, dim);
  if (in.map_path.empty()) throw Error("usage", "a map is required (--map)");
  return map_from_json(read_json(in.map_path), dim);
}

NetMapPtr build_map(const Net& net, const MapSpec& spec) {
  try {
    if (spec.values) return make_net_map(net, *spec.values, spec.target);
    return make_net_map(net, spec.fn, spec.target);
  } catch (const Error& e) {
    throw StageError("map", e);
  }
}

int finish(const std::string& out, json report, const std::vector<Check>& checks) {
  const bool ok = all_enforced_pass(checks);
  report["ok"] = ok;
  report["checks"] = to_json(checks);
  write_json(out, report);
  return ok ? kPass : kCheckFailure;
}

void add_common(CLI::App* sub, std::string& config, std::uint64_t& seed, std::string& out) {
  sub->add_option("--config", config, "JSON config; keys are option names");
  sub->add_option("--seed", seed, "random seed")->capture_default_str();
  sub->add_option("--out", out, "report path (stdout when omitted)");
}

// ---- net --------------------------------------------------------------------

struct NetArgs {
  std::string norm = "lp:2";
  int dim = 2;
  double delta = 0.0;
  bool sphere = false;
  std::string scaling = "john";
  std::size_t certify = 0;
};

Scaling parse_scaling(const std::string& s) {
  if (s == "john") return Scaling::john;
  if (s == "prescaled") return Scaling::prescaled;
  throw Error("usage", "scaling must be john or prescaled");
}

int cmd_net(const NetArgs& a, std::uint64_t seed, const std::string& out) {
  if (!(a.delta > 0.0)) throw Error("usage", "--delta must be positive");
  const Scaling scaling = parse_scaling(a.scaling);
  const SpacePtr X = make_space(a.dim, NormSpec::parse(a.norm), scaling);
  const Net net = a.sphere ? sphere_net(X, a.delta, seed) : greedy_net(X, a.delta, seed);
  std::vector<Check> checks;
  checks.push_back(make_check("net.covering", "net", net.covering_radius, "<=", net.delta * (1.0 + 1e-12)));
  checks.push_back(make_check("net.size", "net", static_cast<double>(net.size()), "<=", net.size_bound()));
  json rep = net_to_json(net, scaling);
  if (a.certify > 0) {
    const CoveringReport c = certify_net(net, a.certify, seed + 1);
    checks.push_back(make_check("net.sampled-covering", "net", c.max_distance, "<=", net.delta));
    checks.push_back(make_check("net.separation", "net", c.min_separation, ">=", net.delta * (1.0 - 1e-9)));
  }
  return finish(out, rep, checks);
}

// ---- extend -----------------------------------------------------------------

struct ExtendArgs {
  double eps = 0.0;
  bool check_bullets = false;
  std::size_t pairs = 10000;
};

int cmd_extend(const Inputs& in, const ExtendArgs& a, std::uint64_t seed, const std::string& out) {
  const Net net = load_net(in);
  const MapSpec spec = load_map(in, net.space->dim());
  const NetMapPtr map = build_map(net, spec);
  const int n = net.space->dim();
  try {
    const AlmostExtension ext(map, a.eps);
    json rep{{"kind", "extend"},     {"n", n},           {"delta", net.delta},
             {"eps", a.eps},         {"tau", ext.tau()}, {"D", map->D()},
             {"target", to_string(map->target())}, {"map", spec.description},
             {"hypothesis", {{"delta", net.delta}, {"limit", a.eps / (4.0 * n)}}}};
    std::vector<Check> checks;
    checks.push_back(make_check("extension.hypothesis", "extend", net.delta, "<", a.eps / (4.0 * n)));
    if (a.check_bullets) {
      const BulletReport b = check_bullets(ext, a.pairs, seed);
      rep["bullets"] = to_json(b);
      checks.push_back(make_check("extension.support", "extend", b.support_max_value, "<=", 0.0));
      checks.push_back(make_check("extension.global-lipschitz", "extend", b.global_excess, "<=", b.slack));
      checks.push_back(make_check("extension.inner-lipschitz", "extend", b.inner_excess, "<=", b.slack));
      checks.push_back(make_check("extension.net-deviation", "extend", b.net_deviation, "<=", b.net_bound));
    }
    return finish(out, rep, checks);
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError("extend", e);
  }
}

// ---- evolve -----------------------------------------------------------------

struct EvolveArgs {
  double eps = 0.0;
  double t = 0.0;
  double spacing = 1.0 / 64;
  int samples = 200;
  std::size_t pairs = 2000;
  double R = 0.0;
  std::string csv;
};

void write_grid_csv(const std::string& path, const GridField& g) {
  std::ofstream os(path);
  if (!os) throw InputError("cannot write '" + path + "'");
  os.precision(12);
  const int n = g.box.dim;
  for (int k = 0; k < n; ++k) os << (k ? "," : "") << "x" << k;
  for (int c = 0; c < g.comps; ++c) os << ",v" << c;
  os << "\n";
  std::vector<double> x(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < g.box.size(); ++i) {
    g.box.point(i, x.data());
    for (int k = 0; k < n; ++k) os << (k ? "," : "") << x[static_cast<std::size_t>(k)];
    for (int c = 0; c < g.comps; ++c) os << "," << g.at(c, i);
    os << "\n";
  }
}

int cmd_evolve(const Inputs& in, const EvolveArgs& a, std::uint64_t seed, const std::string& out) {
  const Net net = load_net(in);
  const MapSpec spec = load_map(in, net.space->dim());
  const NetMapPtr map = build_map(net, spec);
  const int n = net.space->dim();
  std::vector<Check> checks;
  json rep{{"kind", "evolve"}, {"n", n}, {"eps", a.eps}, {"t", a.t}, {"spacing", a.spacing}, {"D", map->D()}};
  try {
    const AlmostExtension ext(map, a.eps);
    const FieldPtr F = std::make_shared<const FieldSamples>(ext, a.spacing);
    const Evolute E(F, a.t);
    rep["value_error"] = E.value_error();
    rep["derivative_error"] = E.derivative_error();
    rep["sampling_error"] = F->sampling_error();
    checks.push_back(make_check("kernel.mass", "evolve", std::abs(kernel_mass(n, a.t) - 1.0), "<=", 1e-3));
    for (double r : {0.5, 1.0, 2.0}) {
      const TailMass tm = tail_mass(*net.space, a.t, r);
      checks.push_back(make_check("kernel.tail", "evolve", tm.quadrature, "<=", tm.bound));
    }
    const double shift = 0.1 * a.t;
    checks.push_back(make_check("kernel.shift", "evolve", kernel_shift_integral(n, a.t, shift), "<=",
                                kernel_shift_bound(n, a.t, shift)));
    const ApproximationCheck ac =
        approximation_check(F, [&](const Vec& x) { return ext.F(x); }, a.t, a.samples, seed);
    checks.push_back(make_check("evolute.approximation", "evolve", ac.max_deviation, "<=", ac.bound + ac.quad_error));
    const EvoluteLipschitzCheck lc = evolute_lipschitz_check(F, a.t, a.eps, a.pairs, seed);
    rep["lipschitz"] = json{{"hypothesis", lc.hypothesis}, {"max_ratio", lc.max_ratio}, {"bound", lc.bound},
                            {"intermediate", lc.intermediate}, {"pairs", lc.pairs}};
    checks.push_back(make_check("evolute.lipschitz", "evolve", lc.max_ratio, "<=", lc.bound + lc.slack, lc.hypothesis));
    checks.push_back(
        make_check("evolute.lipschitz-intermediate", "evolve", lc.max_ratio, "<=", lc.intermediate + lc.slack, lc.hypothesis));
    if (a.R > 0.0) {
      // P_t * (P_{Rt} * F) against P_{(R+1)t} * F.
      const SemigroupCheck sc = semigroup_check(F, a.t, a.R * a.t, 2.0, 6.0);
      rep["semigroup"] = json{{"s", a.R * a.t}, {"max_deviation", sc.max_deviation}, {"quad_error", sc.quad_error},
                              {"grid_points", sc.grid_points}};
      checks.push_back(make_check("evolute.semigroup", "evolve", sc.max_deviation, "<=", 3.0 * sc.quad_error));
    }
    if (!a.csv.empty()) {
      const GridEvaluator ev(F, LatticeBox::covering(n, F->spacing(), 2.0));
      write_grid_csv(a.csv, ev.values(a.t));
      rep["csv"] = a.csv;
    }
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError("evolve", e);
  }
  return finish(out, rep, checks);
}

// ---- embed ------------------------------------------------------------------

struct EmbedArgs {
  std::vector<std::string> pipeline;
  std::string desk_params;
  std::string norm = "lp:2";
  int dim = 2;
  double delta = 0.0;
  std::string mode = "desk";
  PipelineConfig cfg;
};

int cmd_embed(Inputs in, EmbedArgs a, std::uint64_t seed, const std::string& out) {
  PipelineConfig& cfg = a.cfg;
  cfg.mode = parse_mode(a.mode);
  cfg.seed = seed;
  cfg.dim = a.dim;
  cfg.norm = NormSpec::parse(a.norm);
  if (!a.pipeline.empty()) {
    if (a.pipeline.size() != 2) throw Error("usage", "--pipeline takes a net file and a map file");
    in.net_path = a.pipeline[0];
    in.map_path = a.pipeline[1];
  }
  if (!a.desk_params.empty()) {
    const json d = read_json(a.desk_params);
    cfg.t = d.value("t", cfg.t);
    cfg.R = d.value("R", cfg.R);
    cfg.A = d.value("A", cfg.A);
    cfg.m = d.value("m", cfg.m);
  }
  json rep{{"kind", "embed"}};
  if (cfg.mode == PipelineMode::paper) {
    cfg.delta = a.delta;
    if (!(cfg.D >= 1.0)) throw Error("usage", "paper mode needs --D >= 1");
  } else {
    const bool have_net = !in.net_path.empty() || !in.inline_net.is_null();
    if (have_net) {
      cfg.net = load_net(in);
      cfg.dim = cfg.net->space->dim();
    } else if (!(a.delta > 0.0)) {
      throw Error("usage", "desk mode needs --net or --delta");
    }
    cfg.delta = have_net ? cfg.net->delta : a.delta;
    const MapSpec spec = load_map(in, cfg.dim);
    cfg.target = spec.target;
    if (spec.values) {
      if (!have_net) throw Error("usage", "a map given by values needs the net it was sampled on");
      cfg.values = spec.values;
    } else {
      cfg.map = spec.fn;
    }
    rep["map"] = spec.description;
  }
  rep["config"] = json{{"dim", cfg.dim}, {"norm", a.norm}, {"delta", cfg.delta}, {"eps", cfg.eps},
                       {"mode", a.mode}, {"D", cfg.D},      {"seed", seed}};
  if (cfg.mode == PipelineMode::desk) {
    json& c = rep["config"];
    c["t"] = cfg.t;
    c["R"] = cfg.R;
    c["A"] = cfg.A > 0.0 ? cfg.A : cfg.t;
    c["m"] = cfg.m;
    c["spacing"] = cfg.spacing;
    c["eta"] = cfg.eta;
    c["pairs"] = cfg.pairs;
  }
  const PipelineReport r = run_pipeline(cfg);
  json body = to_json(r);
  for (auto it = body.begin(); it != body.end(); ++it) rep[it.key()] = it.value();
  write_json(out, rep);
  return r.ok() ? kPass : kCheckFailure;
}

// ---- factorize --------------------------------------------------------------

struct FactorizeArgs {
  double eps = 0.0;
  FactorizationOptions opts;
};

std::vector<Check> factorization_checks(const FactorizationReport& r) {
  std::vector<Check> c;
  c.push_back(make_check("factorization.interpolation", "factorize", r.interpolation_error, "<=", 1e-9));
  c.push_back(make_check("factorization.extension-lipschitz", "factorize", r.G_lipschitz, "<=", r.D * (1.0 + 1e-6)));
  c.push_back(make_check("factorization.mollifier-deviation", "factorize", r.H_deviation, "<=", r.H_bound));
  c.push_back(make_check("factorization.net-deviation", "factorize", r.net_deviation, "<=", r.net_bound));
  c.push_back(make_check("factorization.half-ball-deviation", "factorize", r.half_ball_deviation, "<=", r.half_ball_bound));
  c.push_back(make_check("factorization.chain-rule", "factorize", r.chain_rule_gap, "<=", 1e-2));
  c.push_back(make_check("factorization.T-norm", "factorize", r.T_norm, "<=", r.T_bound));
  c.push_back(make_check("factorization.ST-minus-J", "factorize", r.ST_minus_J, "<=", r.ST_bound));
  c.push_back(make_check("factorization.certificate", "factorize", r.certificate_min, ">=", r.certificate_target));
  c.push_back(make_check("factorization.delta-hypothesis", "factorize", r.delta, "<=",
                         r.eps * r.eps / (30.0 * r.n * r.n * r.D), false));
  return c;
}

int cmd_factorize(const Inputs& in, const FactorizeArgs& a, std::uint64_t seed, const std::string& out) {
  const Net net = load_net(in);
  const MapSpec spec = load_map(in, net.space->dim());
  const NetMapPtr map = build_map(net, spec);
  FactorizationOptions opts = a.opts;
  opts.seed = seed;
  try {
    const AlmostExtension ext(map, a.eps);
    const FactorizationReport r = factorize(ext, opts);
    json rep = to_json(r);
    rep["kind"] = "factorize";
    if (!r.delta_hypothesis)
      rep["warnings"] = json::array({"delta exceeds eps^2 / (30 n^2 D); certificate checked outside its hypothesis"});
    return finish(out, rep, factorization_checks(r));
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError("factorize", e);
  }
}

// ---- distortion -------------------------------------------------------------

struct DistortionArgs {
  std::string metric;
  std::string target = "l2";
  double delta = 0.0;
};

int cmd_distortion(const DistortionArgs& a, const std::string& out) {
  const json j = read_json(a.metric);
  std::vector<Vec> points;
  std::optional<FiniteMetric> d;
  try {
    if (j.is_object() && j.contains("points")) {
      const SpacePtr X = make_space(static_cast<int>(j.at("points")[0].size()),
                                    NormSpec::parse(j.value("norm", std::string("lp:2"))), Scaling::prescaled);
      for (const json& p : j.at("points")) points.push_back(vector_from_json(p));
      d = FiniteMetric::from_points(points, *X);
    } else {
      d = FiniteMetric(matrix_from_json(j.is_object() ? j.at("matrix") : j));
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed metric file: ") + e.what());
  }
  json rep{{"kind", "distortion"}, {"target", a.target}, {"points", d->size()}};
  std::vector<Check> checks;
  if (a.target == "l1") {
    const DistortionCertificate c = c1_exact(*d);
    rep["certificate"] = to_json(c);
    checks.push_back(make_check("distortion.l1-witness", "distortion", std::abs(c.witness_value - c.value), "<=",
                                1e-7 * c.value));
  } else if (a.target == "l2") {
    const DistortionCertificate c = c2_exact(*d);
    rep["certificate"] = to_json(c);
    checks.push_back(make_check("distortion.l2-dual", "distortion", c.lower_bound, "<=", c.value + 1e-12));
    checks.push_back(make_check("distortion.l2-witness", "distortion", std::abs(c.witness_value - c.value), "<=",
                                1e-9 * c.value));
  } else if (a.target == "snowflake") {
    if (points.empty()) throw Error("usage", "snowflake needs a point list in l1");
    const SnowflakeEmbedding s = snowflake_embed(points, a.delta);
    rep["snowflake"] = to_json(s);
    checks.push_back(make_check("distortion.snowflake-gram", "distortion", s.max_error, "<=", 1e-8));
    if (a.delta > 0.0) checks.push_back(make_check("distortion.snowflake-bound", "distortion", s.distortion, "<=", s.bound));
  } else {
    throw Error("usage", "target must be l1, l2 or snowflake");
  }
  return finish(out, rep, checks);
}

// ---- emd --------------------------------------------------------------------

struct EmdArgs {
  std::string family;
  std::string generate = "uniform";
  int n = 4;
  int N = 8;
  bool multiset = false;
  std::string ground = "l2";
  std::string experiment = "l1";
  std::size_t triples = 1000;
  std::string family_out;
};

int cmd_emd(const EmdArgs& a, std::uint64_t seed, const std::string& out) {
  std::vector<PointSet> family;
  if (!a.family.empty()) {
    family = family_from_json(read_json(a.family));
  } else {
    family = generate_family(a.n, a.N, parse_generator(a.generate), seed, a.multiset);
  }
  if (!a.family_out.empty()) write_json(a.family_out, family_to_json(family));
  GroundCost g = GroundCost::l2;
  if (a.ground == "l1") g = GroundCost::l1;
  else if (a.ground != "l2") throw Error("usage", "ground must be l2 or l1");
  const FamilyMetric f = build_family(std::move(family), a.multiset, g, a.triples, seed);
  json rep = to_json(f);
  rep["kind"] = "emd";
  rep["ground"] = a.ground;
  if (g == GroundCost::l1) rep["warnings"] = json::array({"l1 ground cost is an exploration mode"});
  std::vector<Check> checks;
  checks.push_back(make_check("emd.triangle-audit", "emd", f.audit.worst_excess, "<=", 1e-9));
  if (a.experiment == "l1") {
    const EmdExperiment e = emd_l1_experiment(f);
    rep["experiment"] = json{{"c1", to_json(e.c1)},
                             {"N", e.N},
                             {"context_sqrt_loglog_N", std::isfinite(e.context) ? json(e.context) : json("nan")}};
    checks.push_back(
        make_check("emd.l1-witness", "emd", std::abs(e.c1.witness_value - e.c1.value), "<=", 1e-7 * e.c1.value));
  } else if (a.experiment != "none") {
    throw Error("usage", "experiment must be l1 or none");
  }
  return finish(out, rep, checks);
}

// ---- params -----------------------------------------------------------------

struct ParamsArgs {
  BoundRequest req;
  std::string which = "recipe";
};

int cmd_params(ParamsArgs a, const std::string& out) {
  a.req.which = parse_bound_kind(a.which);
  BoundReport r;
  try {
    r = compute_bounds(a.req);
  } catch (const Error& e) {
    throw Error("usage", e.message());
  }
  json rep = to_json(r);
  rep["kind"] = "params";
  std::vector<Check> checks;
  if (a.req.which == BoundKind::recipe) {
    checks.push_back(make_check("params.scale-chain-left", "params", r.recipe.scale_chain_lhs, "<=",
                                r.recipe.scale_chain_mid + 1e-9 * std::abs(r.recipe.scale_chain_mid)));
    checks.push_back(make_check("params.scale-chain-right", "params", r.recipe.scale_chain_mid, "<",
                                r.recipe.scale_chain_rhs));
    checks.push_back(make_check("params.t-range", "params", r.recipe.t_lower.log10, ">=",
                                r.recipe.delta_threshold.log10, false));
  }
  return finish(out, rep, checks);
}

// ---- verify-all -------------------------------------------------------------

void append(std::vector<Check>& to, const std::vector<Check>& from) { to.insert(to.end(), from.begin(), from.end()); }

int cmd_verify_all(std::uint64_t seed, const std::string& out) {
  std::vector<Check> checks;
  json sections = json::object();

  // Kernel.
  for (int n = 1; n <= 3; ++n)
    checks.push_back(make_check("kernel.mass", "kernel", std::abs(kernel_mass(n, 0.1) - 1.0), "<=", 1e-3));
  for (int n = 1; n <= 20; ++n)
    checks.push_back(make_check("kernel.constant", "kernel", poisson_constant(n) * sphere_area(n), "<=",
                                std::sqrt(2.0 * n / M_PI)));

  // Nets.
  const SpacePtr box = make_space(2, NormSpec::lp_norm(INFINITY));
  const Net net = greedy_net(box, 0.1, seed);
  const CoveringReport cov = certify_net(net, 10000, seed + 1);
  checks.push_back(make_check("net.sampled-covering", "net", cov.max_distance, "<=", net.delta));
  checks.push_back(make_check("net.separation", "net", cov.min_separation, ">=", net.delta * (1.0 - 1e-9)));
  sections["net"] = json{{"size", net.size()}, {"max_distance", cov.max_distance}};

  // Extension and evolutes on a box.
  {
    const Net n2 = greedy_net(box, 0.05, seed);
    const NetMapPtr map = make_net_map(n2, [](const Vec& x) { return x; }, TargetNorm::linf);
    const AlmostExtension ext(map, 0.5);
    const BulletReport b = check_bullets(ext, 2000, seed);
    checks.push_back(make_check("extension.support", "extend", b.support_max_value, "<=", 0.0));
    checks.push_back(make_check("extension.global-lipschitz", "extend", b.global_excess, "<=", b.slack));
    checks.push_back(make_check("extension.inner-lipschitz", "extend", b.inner_excess, "<=", b.slack));
    checks.push_back(make_check("extension.net-deviation", "extend", b.net_deviation, "<=", b.net_bound));
    sections["extension"] = to_json(b);
    const FieldPtr F = std::make_shared<const FieldSamples>(ext, 1.0 / 32);
    const ApproximationCheck ac = approximation_check(F, [&](const Vec& x) { return ext.F(x); }, 0.1, 100, seed);
    checks.push_back(make_check("evolute.approximation", "evolve", ac.max_deviation, "<=", ac.bound + ac.quad_error));
  }

  // Factorization on the Euclidean plane.
  {
    const SpacePtr X = make_space(2, NormSpec::lp_norm(2.0));
    const NetMapPtr map = make_net_map(greedy_net(X, 0.05, seed), [](const Vec& x) { return x; }, TargetNorm::l2);
    const AlmostExtension ext(map, 0.5);
    FactorizationOptions o;
    o.samples = 200;
    o.y_samples = 100;
    o.seed = seed;
    const FactorizationReport r = factorize(ext, o);
    append(checks, factorization_checks(r));
    sections["factorization"] = json{{"certificate_min", r.certificate_min}, {"ST_minus_J", r.ST_minus_J}};
  }

  // Finite metrics.
  {
    const FiniteMetric c4 = FiniteMetric::cycle(4);
    const DistortionCertificate l1 = c1_exact(c4);
    const DistortionCertificate l2 = c2_exact(c4);
    checks.push_back(make_check("distortion.c1-four-cycle", "distortion", std::abs(l1.value - 1.0), "<=", 1e-6));
    checks.push_back(make_check("distortion.c2-four-cycle", "distortion", std::abs(l2.value - std::sqrt(2.0)), "<=", 1e-3));
    const SpacePtr l1p = make_space(2, NormSpec::lp_norm(1.0), Scaling::prescaled);
    const SnowflakeEmbedding s = snowflake_embed(greedy_net(l1p, 0.5, seed).points, 0.5);
    checks.push_back(make_check("distortion.snowflake-bound", "distortion", s.distortion, "<=", s.bound));
    sections["distortion"] = json{{"c1_C4", l1.value}, {"c2_C4", l2.value}, {"snowflake", s.distortion}};
  }

  // Matching metric.
  {
    Rng rng(seed);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      const int k = 1 + t % 6;
      PointSet a, b;
      for (int i = 0; i < k; ++i) {
        a.push_back({static_cast<long>(rng.index(8)), static_cast<long>(rng.index(8))});
        b.push_back({static_cast<long>(rng.index(8)), static_cast<long>(rng.index(8))});
      }
      worst = std::max(worst, std::abs(emd_distance(a, b) - emd_brute_force(a, b)));
    }
    checks.push_back(make_check("emd.brute-force", "emd", worst, "<=", 0.0));
    const FamilyMetric f = build_family(generate_family(4, 8, FamilyGenerator::uniform, seed), false, GroundCost::l2,
                                        1000, seed);
    checks.push_back(make_check("emd.triangle-audit", "emd", f.audit.worst_excess, "<=", 1e-9));
  }

  // Parameters.
  for (int n = 2; n <= 8; ++n)
    for (double eps : {0.125, 0.0625})
      for (double D : {2.0, 10.0}) {
        BoundRequest q;
        q.n = n;
        q.eps = eps;
        q.D = D;
        const RecipeParams p = compute_bounds(q).recipe;
        checks.push_back(make_check("params.scale-chain", "params", p.scale_chain_ok ? 1.0 : 0.0, ">=", 1.0));
      }
  {
    BoundRequest q;
    q.eps = 0.5;
    q.which = BoundKind::lp;
    checks.push_back(make_check("params.lp-bound", "params", std::abs(compute_bounds(q).delta.log10 + 4.5 * std::log10(2.0)),
                                "<=", 1e-12));
  }

  json rep{{"kind", "verify-all"}, {"seed", seed}, {"sections", sections}};
  return finish(out, rep, checks);
}

int classify(const Error& e) {
  if (dynamic_cast<const InputError*>(&e) != nullptr) return kUsage;
  if (e.code() == "usage") return kUsage;
  return kCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lipnet: discretization of bi-Lipschitz embeddings at desk scale"};
  app.require_subcommand(1, 1);

  std::string config, out;
  std::uint64_t seed = 1;
  Inputs in;

  NetArgs net_args;
  auto* net = app.add_subcommand("net", "greedy delta-net of the unit ball (or sphere)");
  add_common(net, config, seed, out);
  net->add_option("--norm", net_args.norm, "lp:p, lp:inf, l1, ...")->capture_default_str();
  net->add_option("--dim", net_args.dim)->capture_default_str();
  net->add_option("--delta", net_args.delta, "net scale");
  net->add_flag("--sphere", net_args.sphere, "net of the unit sphere");
  net->add_option("--scaling", net_args.scaling, "john or prescaled")->capture_default_str();
  net->add_option("--certify", net_args.certify, "sample count for the covering check");

  auto add_inputs = [&](CLI::App* sub) {
    sub->add_option("--net", in.net_path, "net JSON");
    sub->add_option("--map", in.map_path, "map JSON");
  };

  ExtendArgs ext_args;
  auto* extend = app.add_subcommand("extend", "almost-extension of a net map");
  add_common(extend, config, seed, out);
  add_inputs(extend);
  extend->add_option("--eps", ext_args.eps);
  extend->add_flag("--check-bullets", ext_args.check_bullets);
  extend->add_option("--pairs", ext_args.pairs)->capture_default_str();

  EvolveArgs ev_args;
  auto* evolve = app.add_subcommand("evolve", "Poisson evolute of the extension");
  add_common(evolve, config, seed, out);
  add_inputs(evolve);
  evolve->add_option("--eps", ev_args.eps);
  evolve->add_option("--t", ev_args.t);
  evolve->add_option("--R", ev_args.R, "also check the semigroup identity between t, Rt and (R+1)t");
  evolve->add_option("--spacing", ev_args.spacing)->capture_default_str();
  evolve->add_option("--samples", ev_args.samples)->capture_default_str();
  evolve->add_option("--pairs", ev_args.pairs)->capture_default_str();
  evolve->add_option("--report", out, "alias of --out");
  evolve->add_option("--csv", ev_args.csv, "grid of P_t * F as CSV");

  EmbedArgs em_args;
  auto* embed = app.add_subcommand("embed", "end-to-end pipeline");
  add_common(embed, config, seed, out);
  add_inputs(embed);
  embed->add_option("--pipeline", em_args.pipeline, "net file and map file")->expected(2);
  embed->add_option("--desk-params", em_args.desk_params, "JSON with t, R, A, m");
  embed->add_option("--norm", em_args.norm)->capture_default_str();
  embed->add_option("--dim", em_args.dim)->capture_default_str();
  embed->add_option("--delta", em_args.delta);
  embed->add_option("--eps", em_args.cfg.eps)->capture_default_str();
  embed->add_option("--mode", em_args.mode, "paper or desk")->capture_default_str();
  embed->add_option("--t", em_args.cfg.t)->capture_default_str();
  embed->add_option("--R", em_args.cfg.R)->capture_default_str();
  embed->add_option("--A", em_args.cfg.A, "top of the scale scan (default t)");
  embed->add_option("--m", em_args.cfg.m)->capture_default_str();
  embed->add_option("--D", em_args.cfg.D, "claimed distortion");
  embed->add_option("--spacing", em_args.cfg.spacing)->capture_default_str();
  embed->add_option("--eta", em_args.cfg.eta)->capture_default_str();
  embed->add_option("--pairs", em_args.cfg.pairs)->capture_default_str();

  FactorizeArgs fa_args;
  auto* fact = app.add_subcommand("factorize", "L_p factorization certificate");
  add_common(fact, config, seed, out);
  add_inputs(fact);
  fact->add_option("--eps", fa_args.eps);
  fact->add_option("--samples", fa_args.opts.samples)->capture_default_str();
  fact->add_option("--y-samples", fa_args.opts.y_samples)->capture_default_str();
  fact->add_option("--nu-per-axis", fa_args.opts.nu_per_axis)->capture_default_str();
  fact->add_option("--eta-j", fa_args.opts.eta_J)->capture_default_str();

  DistortionArgs di_args;
  auto* dist = app.add_subcommand("distortion", "c1 / c2 distortion of a finite metric");
  add_common(dist, config, seed, out);
  dist->add_option("--metric", di_args.metric, "distance matrix or {points, norm}")->required();
  dist->add_option("--target", di_args.target, "l1, l2 or snowflake")->capture_default_str();
  dist->add_option("--delta", di_args.delta, "net scale for the snowflake bound");

  EmdArgs emd_args;
  auto* emd = app.add_subcommand("emd", "minimum-cost matching metric on planar point sets");
  add_common(emd, config, seed, out);
  emd->add_option("--family", emd_args.family, "JSON list of point lists");
  emd->add_option("--generate", emd_args.generate, "uniform or clustered")->capture_default_str();
  emd->add_option("--n", emd_args.n)->capture_default_str();
  emd->add_option("--N", emd_args.N)->capture_default_str();
  emd->add_flag("--multiset", emd_args.multiset);
  emd->add_option("--ground", emd_args.ground)->capture_default_str();
  emd->add_option("--experiment", emd_args.experiment, "l1 or none")->capture_default_str();
  emd->add_option("--triples", emd_args.triples)->capture_default_str();
  emd->add_option("--family-out", emd_args.family_out);

  ParamsArgs pa_args;
  auto* params = app.add_subcommand("params", "closed-form bounds and recipe parameters");
  add_common(params, config, seed, out);
  params->add_option("--n", pa_args.req.n)->capture_default_str();
  params->add_option("--eps", pa_args.req.eps)->capture_default_str();
  params->add_option("--D", pa_args.req.D)->capture_default_str();
  params->add_option("--which", pa_args.which, "thm11, refined, lp or recipe")->capture_default_str();
  params->add_option("--C", pa_args.req.C)->capture_default_str();
  params->add_option("--kappa", pa_args.req.kappa)->capture_default_str();
  params->add_option("--cY", pa_args.req.cY)->capture_default_str();
  params->add_option("--c", pa_args.req.c)->capture_default_str();

  auto* verify = app.add_subcommand("verify-all", "deterministic self-check of every module");
  add_common(verify, config, seed, out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    if (!config.empty()) apply_config(sub, config, in);
    if (sub == net) return cmd_net(net_args, seed, out);
    if (sub == extend) return cmd_extend(in, ext_args, seed, out);
    if (sub == evolve) return cmd_evolve(in, ev_args, seed, out);
    if (sub == embed) return cmd_embed(in, em_args, seed, out);
    if (sub == fact) return cmd_factorize(in, fa_args, seed, out);
    if (sub == dist) return cmd_distortion(di_args, out);
    if (sub == emd) return cmd_emd(emd_args, seed, out);
    if (sub == params) return cmd_params(pa_args, out);
    if (sub == verify) return cmd_verify_all(seed, out);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    json err{{"code", e.code()}, {"message", e.message()}};
    if (const auto* s = dynamic_cast<const StageError*>(&e)) err["stage"] = s->stage();
    const int code = classify(e);
    std::cerr << json{{"error", err}}.dump() << "\n";
    if (code == kCheckFailure && !out.empty() && out != "-") write_json(out, json{{"ok", false}, {"error", err}});
    return code;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"code", "internal"}, {"message", e.what()}}}}.dump() << "\n";
    return kCheckFailure;
  }
  return kUsage;
}
