#include "lipnet/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lipnet {

namespace {

template <class Fn>
auto in_stage(const std::string& name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e);
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

StageError::StageError(std::string stage, const Error& cause)
    : Error(cause.code(), "stage " + stage + ": " + cause.message()), stage_(std::move(stage)) {}

Check make_check(std::string anchor, std::string stage, double value, std::string relation, double bound,
                 bool enforced) {
  Check c;
  c.anchor = std::move(anchor);
  c.stage = std::move(stage);
  c.value = value;
  c.bound = bound;
  c.relation = std::move(relation);
  c.enforced = enforced;
  if (c.relation == "<=") c.ok = value <= bound;
  else if (c.relation == ">=") c.ok = value >= bound;
  else if (c.relation == "<") c.ok = value < bound;
  else throw Error("usage", "unknown relation " + c.relation);
  return c;
}

bool all_enforced_pass(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.ok || !c.enforced; });
}

PipelineMode parse_mode(const std::string& text) {
  if (text == "paper") return PipelineMode::paper;
  if (text == "desk") return PipelineMode::desk;
  throw Error("usage", "mode must be paper or desk, got '" + text + "'");
}

std::string to_string(PipelineMode m) { return m == PipelineMode::paper ? "paper" : "desk"; }

PipelineReport run_pipeline(const PipelineConfig& cfg) {
  PipelineReport rep;
  rep.mode = cfg.mode;
  const int n = cfg.dim;

  if (cfg.mode == PipelineMode::paper) {
    BoundRequest req;
    req.n = n;
    req.eps = cfg.eps;
    req.D = cfg.D > 0.0 ? cfg.D : 1.0;
    req.which = BoundKind::recipe;
    rep.params = in_stage("params", [&] { return compute_bounds(req); });
    rep.warnings = rep.params->warnings;
    rep.warnings.push_back("paper mode: parameters only, no integrals evaluated");
    const RecipeParams& p = rep.params->recipe;
    rep.checks.push_back(make_check("params.scale-chain-left", "params", p.scale_chain_lhs, "<=",
                                    p.scale_chain_mid + 1e-9 * std::abs(p.scale_chain_mid)));
    rep.checks.push_back(make_check("params.scale-chain-right", "params", p.scale_chain_mid, "<", p.scale_chain_rhs));
    rep.checks.push_back(
        make_check("params.delta-threshold", "params", std::log10(cfg.delta), "<=", p.delta_threshold.log10, false));
    return rep;
  }

  if (!(cfg.t > 0.0) || !(cfg.R > 0.0) || cfg.m < 1)
    throw Error("usage", "desk mode needs t > 0, R > 0 and m >= 1");

  const Net net = in_stage("net", [&]() -> Net {
    if (cfg.net) return *cfg.net;
    return greedy_net(make_space(n, cfg.norm, cfg.scaling), cfg.delta, cfg.seed);
  });
  const SpacePtr X = net.space;
  rep.net_size = net.size();
  rep.checks.push_back(make_check("net.covering", "net", net.covering_radius, "<=", net.delta * (1.0 + 1e-12)));
  rep.checks.push_back(make_check("net.size", "net", static_cast<double>(net.size()), "<=", net.size_bound()));

  const NetMapPtr map = in_stage("map", [&] {
    if (cfg.values) return make_net_map(net, *cfg.values, cfg.target);
    if (!cfg.map) throw Error("usage", "no map given");
    return make_net_map(net, cfg.map, cfg.target);
  });
  rep.D = map->D();
  if (cfg.D > 0.0) rep.checks.push_back(make_check("map.distortion", "map", rep.D, "<=", cfg.D * (1.0 + 1e-9)));
  const double D = rep.D;
  const double eps = cfg.eps;
  const double delta = net.delta;

  const AlmostExtension ext = in_stage("extend", [&] { return AlmostExtension(map, eps); });
  rep.bullets = in_stage("extend", [&] { return check_bullets(ext, cfg.pairs, cfg.seed); });
  const BulletReport& b = rep.bullets;
  rep.checks.push_back(make_check("extension.support", "extend", b.support_max_value, "<=", 0.0));
  rep.checks.push_back(make_check("extension.global-lipschitz", "extend", b.global_excess, "<=", b.slack));
  rep.checks.push_back(make_check("extension.inner-lipschitz", "extend", b.inner_excess, "<=", b.slack));
  rep.checks.push_back(make_check("extension.net-deviation", "extend", b.net_deviation, "<=", b.net_bound));

  const FieldPtr F = in_stage("evolve", [&] { return std::make_shared<const FieldSamples>(ext, cfg.spacing); });
  const double A = cfg.A > 0.0 ? cfg.A : cfg.t;
  in_stage("evolve", [&] {
    const TailMass tail = tail_mass(*X, cfg.t, 1.0);
    rep.checks.push_back(make_check("kernel.tail", "evolve", tail.quadrature, "<=", tail.bound));
    const double shift = 0.1 * cfg.t;
    rep.checks.push_back(make_check("kernel.shift", "evolve", kernel_shift_integral(n, cfg.t, shift), "<=",
                                    kernel_shift_bound(n, cfg.t, shift)));
    const ApproximationCheck ac = approximation_check(
        F, [&](const Vec& x) { return ext.F(x); }, cfg.t, cfg.approximation_samples, cfg.seed);
    rep.checks.push_back(make_check("evolute.approximation", "evolve", ac.max_deviation, "<=", ac.bound + ac.quad_error));
    return 0;
  });

  const SmoothingContext ctx(F);
  const std::vector<Vec> dirs = in_stage("scale", [&] { return sphere_net(X, std::min(2.0, eps / D), cfg.seed).points; });
  rep.scale = in_stage("scale", [&] { return find_stabilizing_scale(ctx, dirs, A, cfg.R, cfg.m); });
  const double t = rep.scale.t;
  {
    const ScaleEntry& e = rep.scale.log.entries.back();
    rep.checks.push_back(make_check("scale.stabilization", "scale", e.integral - e.next_integral, "<=",
                                    rep.scale.log.increment + e.tolerance));
  }

  rep.hypotheses = averaged_hypotheses(n, delta, eps, D, t, cfg.R);
  rep.checks.push_back(make_check("point.delta-hypothesis", "point", delta, "<=",
                                  std::min(rep.hypotheses.delta_mid, rep.hypotheses.delta_rhs), false));
  rep.checks.push_back(make_check("point.R-lower", "point", rep.hypotheses.R_lower, "<=", cfg.R, false));
  rep.checks.push_back(make_check("point.R-upper", "point", cfg.R, "<=", rep.hypotheses.R_upper, false));

  rep.point = in_stage("point", [&] { return find_good_point(ctx, t, cfg.R, dirs, eps, D); });
  {
    double worst = -std::numeric_limits<double>::infinity();
    for (double g : rep.point.worst_gap) worst = std::max(worst, g);
    rep.checks.push_back(
        make_check("point.gap", "point", worst, "<=", rep.point.threshold + rep.point.tolerance));
  }

  rep.embedding = in_stage("embed", [&] { return extract_embedding(F, t, cfg.R, rep.point.x, eps, cfg.eta, cfg.seed); });
  const EmbeddingReport& e = rep.embedding;
  rep.checks.push_back(make_check("embed.lipschitz-hypothesis", "embed", (cfg.R + 1.0) * t, "<",
                                  eps / (25.0 * std::sqrt(double(n))), false));
  rep.checks.push_back(make_check("embed.norm", "embed", e.norm_T, "<=", e.lipschitz_bound + e.T_error, false));
  rep.checks.push_back(make_check("embed.net-lower", "embed", e.min_net + e.T_error, ">=", (1.0 - 2.0 * eps) / D));
  rep.checks.push_back(make_check("embed.distortion", "embed", e.distortion, "<=", (1.0 + 12.0 * eps) * D));

  for (const Check& c : rep.checks)
    if (!c.enforced && !c.ok)
      rep.warnings.push_back("desk mode: hypothesis " + c.anchor + " not met (" + fmt(c.value) + " " + c.relation +
                             " " + fmt(c.bound) + " fails)");
  return rep;
}

}  // namespace lipnet
