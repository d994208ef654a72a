#include "report.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

namespace lipnet::cli {

namespace {

json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double number(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
  }
  throw InputError("expected a number, got " + j.dump());
}

json points_to_json(const std::vector<Vec>& pts) {
  json a = json::array();
  for (const Vec& p : pts) a.push_back(to_json(p));
  return a;
}

json norm_to_json(const NormSpec& spec) {
  if (spec.kind == NormKind::lp) return spec.descriptor();
  return json{{"kind", spec.descriptor()}, {"matrix", to_json(spec.matrix)}};
}

NormSpec norm_from_json(const json& j) {
  if (j.is_string()) return NormSpec::parse(j.get<std::string>());
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "ellipsoid") return NormSpec::ellipsoid(matrix_from_json(j.at("matrix")));
  if (kind == "polytope") return NormSpec::polytope(matrix_from_json(j.at("matrix")));
  return NormSpec::parse(kind);
}

}  // namespace

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

json to_json(const Mat& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_json(Vec(m.row(i).transpose())));
  return a;
}

Mat matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw InputError("expected a nonempty matrix (array of rows)");
  const std::size_t cols = j[0].size();
  Mat m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw InputError("matrix rows have unequal lengths");
    for (std::size_t k = 0; k < cols; ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = number(j[i][k]);
  }
  return m;
}

Vec vector_from_json(const json& j) {
  if (!j.is_array()) throw InputError("expected an array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i]);
  return v;
}

json to_json(const Check& c) {
  return json{{"anchor", c.anchor}, {"stage", c.stage},  {"value", num(c.value)}, {"relation", c.relation},
              {"bound", num(c.bound)}, {"ok", c.ok}, {"enforced", c.enforced}};
}

json to_json(const std::vector<Check>& checks) {
  json a = json::array();
  for (const Check& c : checks) a.push_back(to_json(c));
  return a;
}

json to_json(const LogValue& v) {
  return json{{"log10", num(v.log10)}, {"mantissa", num(v.mantissa())}, {"exponent", v.exponent()}, {"text", v.str()}};
}

json to_json(const BoundReport& r) {
  json j{{"n", r.request.n},
         {"eps", r.request.eps},
         {"D", r.request.D},
         {"which", to_string(r.request.which)},
         {"C", r.request.C},
         {"kappa", r.request.kappa},
         {"cY", r.request.cY},
         {"warnings", r.warnings},
         {"delta", to_json(r.delta)},
         {"factorization_threshold", to_json(r.factorization_threshold)},
         {"desk_threshold", to_json(r.desk_threshold)}};
  if (r.request.which == BoundKind::thm11 || r.request.which == BoundKind::refined)
    j["delta_loglog"] = num(r.delta_double.loglog);
  if (r.request.which == BoundKind::recipe) {
    const RecipeParams& p = r.recipe;
    j["recipe"] = json{{"c", r.request.c},
                       {"A", to_json(p.A)},
                       {"R_plus_1", to_json(p.R_plus_1)},
                       {"m_plus_1", to_json(p.m_plus_1)},
                       {"m", num(p.m)},
                       {"t_lower", to_json(p.t_lower)},
                       {"t_upper", to_json(p.t_upper)},
                       {"delta_threshold", to_json(p.delta_threshold)},
                       {"scale_chain", {{"log10_RA", num(p.scale_chain_lhs)},
                                        {"log10_eps_over_cD_pow_n", num(p.scale_chain_mid)},
                                        {"log10_eps_over_25_sqrt_n", num(p.scale_chain_rhs)},
                                        {"ok", p.scale_chain_ok}}},
                       {"t_range_within_threshold", p.t_range_within_threshold}};
  }
  return j;
}

json net_to_json(const Net& net, Scaling scaling) {
  return json{{"dim", net.space->dim()},
              {"norm", norm_to_json(net.space->spec())},
              {"scaling", scaling == Scaling::john ? "john" : "prescaled"},
              {"delta", net.delta},
              {"on_sphere", net.on_sphere},
              {"size", net.size()},
              {"covering_radius", num(net.covering_radius)},
              {"repaired", net.repaired},
              {"points", points_to_json(net.points)}};
}

Net net_from_json(const json& j) {
  try {
    const json& pts = j.is_array() ? j : j.at("points");
    if (!pts.is_array() || pts.empty()) throw InputError("net has no points");
    const int dim = j.is_object() && j.contains("dim") ? j.at("dim").get<int>() : static_cast<int>(pts[0].size());
    const NormSpec spec = j.is_object() && j.contains("norm") ? norm_from_json(j.at("norm")) : NormSpec::lp_norm(2.0);
    const Scaling scaling = j.is_object() && j.value("scaling", std::string("john")) == "prescaled" ? Scaling::prescaled
                                                                                                    : Scaling::john;
    Net net;
    net.space = make_space(dim, spec, scaling);
    net.delta = j.is_object() ? j.at("delta").get<double>() : 0.0;
    net.on_sphere = j.is_object() && j.value("on_sphere", false);
    net.covering_radius = j.is_object() && j.contains("covering_radius") ? number(j.at("covering_radius")) : net.delta;
    for (const json& p : pts) {
      Vec v = vector_from_json(p);
      if (v.size() != dim) throw InputError("net point has the wrong dimension");
      net.points.push_back(std::move(v));
    }
    if (!(net.delta > 0.0)) throw InputError("net file needs a positive delta");
    return net;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed net file: ") + e.what());
  }
}

MapSpec map_from_json(const json& j, int dim) {
  MapSpec s;
  try {
    s.target = parse_target_norm(j.value("target", std::string("l2")));
    if (j.contains("values")) {
      s.values = matrix_from_json(j.at("values"));
      s.description = "values";
    } else if (j.contains("linear")) {
      const Mat L = matrix_from_json(j.at("linear"));
      if (L.cols() != dim) throw InputError("linear map has " + std::to_string(L.cols()) + " columns, space has dim " +
                                            std::to_string(dim));
      s.fn = [L](const Vec& x) { return Vec(L * x); };
      s.description = "linear";
    } else {
      const std::string name = j.value("named", std::string("identity"));
      if (name == "identity") {
        s.fn = [](const Vec& x) { return x; };
      } else if (name == "sine-graph") {
        const double a = j.value("amplitude", 0.3);
        s.fn = [a](const Vec& x) {
          Vec y(x.size() + 1);
          y.head(x.size()) = x;
          y(x.size()) = a * std::sin(x.sum());
          return y;
        };
      } else {
        throw InputError("unknown named map '" + name + "'");
      }
      s.description = name;
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed map file: ") + e.what());
  }
  return s;
}

json to_json(const BulletReport& b) {
  return json{{"support_max_value", num(b.support_max_value)},
              {"support_samples", num(b.support_samples)},
              {"global_lipschitz", num(b.global_lipschitz)},
              {"global_excess", num(b.global_excess)},
              {"inner_lipschitz", num(b.inner_lipschitz)},
              {"inner_excess", num(b.inner_excess)},
              {"net_deviation", num(b.net_deviation)},
              {"net_bound", num(b.net_bound)},
              {"slack", b.slack},
              {"quadrature_error", num(b.quadrature_error)},
              {"ok", b.ok()}};
}

json to_json(const ScaleLog& log) {
  json entries = json::array();
  for (const ScaleEntry& e : log.entries)
    entries.push_back(json{{"k", e.k},
                           {"t", num(e.t)},
                           {"integral", num(e.integral)},
                           {"next_integral", num(e.next_integral)},
                           {"tolerance", num(e.tolerance)},
                           {"slack", num(e.slack)},
                           {"accepted", e.accepted}});
  return json{{"A", num(log.A)},           {"R", num(log.R)},
              {"m", log.m},                {"volume_3b", num(log.volume_3b)},
              {"increment", num(log.increment)}, {"entries", entries}};
}

json to_json(const GoodPointResult& g) {
  json gaps = json::array();
  for (double v : g.worst_gap) gaps.push_back(num(v));
  return json{{"x", to_json(g.x)},
              {"index", g.index},
              {"lattice_points", g.lattice_points},
              {"good_fraction", num(g.good_fraction)},
              {"threshold", num(g.threshold)},
              {"tolerance", num(g.tolerance)},
              {"worst_gap", gaps},
              {"min_gap", num(g.min_gap)},
              {"found", g.found}};
}

json to_json(const AveragedHypotheses& h) {
  return json{{"delta", num(h.delta_lhs)}, {"delta_mid", num(h.delta_mid)}, {"delta_rhs", num(h.delta_rhs)},
              {"R_lower", num(h.R_lower)}, {"R_upper", num(h.R_upper)},     {"delta_ok", h.delta_ok},
              {"R_ok", h.R_ok}};
}

json to_json(const EmbeddingReport& e) {
  return json{{"T", to_json(e.T)},
              {"x_star", to_json(e.x_star)},
              {"t_star", num(e.t_star)},
              {"R", num(e.R)},
              {"eta", num(e.eta)},
              {"net_size", e.net_size},
              {"max_net", num(e.max_net)},
              {"min_net", num(e.min_net)},
              {"norm_T", num(e.norm_T)},
              {"norm_T_inverse", num(e.norm_Tinv)},
              {"distortion", num(e.distortion)},
              {"sampled_distortion", num(e.sampled_distortion)},
              {"T_error", num(e.T_error)},
              {"lipschitz_hypothesis", e.lipschitz_hypothesis},
              {"lipschitz_bound", num(e.lipschitz_bound)}};
}

json to_json(const PipelineReport& r) {
  json j{{"mode", to_string(r.mode)}, {"ok", r.ok()}, {"warnings", r.warnings}, {"checks", to_json(r.checks)}};
  if (r.params) {
    j["params"] = to_json(*r.params);
    return j;
  }
  j["net_size"] = r.net_size;
  j["D"] = num(r.D);
  j["extension"] = to_json(r.bullets);
  j["scale"] = json{{"t", num(r.scale.t)}, {"k", r.scale.k}, {"log", to_json(r.scale.log)}};
  j["hypotheses"] = to_json(r.hypotheses);
  j["point"] = to_json(r.point);
  j["embedding"] = to_json(r.embedding);
  return j;
}

json to_json(const FactorizationReport& r) {
  return json{{"n", r.n},
              {"m", r.m},
              {"K", r.K},
              {"eps", r.eps},
              {"delta", r.delta},
              {"D", num(r.D)},
              {"delta_hypothesis", r.delta_hypothesis},
              {"J_slack", num(r.J_slack)},
              {"radius", num(r.radius)},
              {"interpolation_error", num(r.interpolation_error)},
              {"G_lipschitz", num(r.G_lipschitz)},
              {"H_deviation", num(r.H_deviation)},
              {"H_bound", num(r.H_bound)},
              {"net_deviation", num(r.net_deviation)},
              {"net_bound", num(r.net_bound)},
              {"half_ball_deviation", num(r.half_ball_deviation)},
              {"half_ball_bound", num(r.half_ball_bound)},
              {"T_norm", num(r.T_norm)},
              {"T_bound", num(r.T_bound)},
              {"S_norm", num(r.S_norm)},
              {"chain_rule_gap", num(r.chain_rule_gap)},
              {"ST_minus_J", num(r.ST_minus_J)},
              {"ST_bound", num(r.ST_bound)},
              {"certificate_min", num(r.certificate_min)},
              {"certificate_target", num(r.certificate_target)},
              {"certificate_slack", num(r.certificate_slack)},
              {"certificate_ok", r.certificate_ok},
              {"ST", to_json(r.ST)}};
}

json to_json(const DistortionCertificate& c) {
  json j{{"value", num(c.value)},
         {"method", c.method},
         {"tolerance", num(c.tolerance)},
         {"lower_bound", num(c.lower_bound)},
         {"gap", num(c.gap)},
         {"witness_value", num(c.witness_value)}};
  if (!c.cuts.empty()) {
    json cuts = json::array();
    for (const Cut& cut : c.cuts) cuts.push_back(json{{"side", cut.side}, {"weight", num(cut.weight)}});
    j["cuts"] = cuts;
  }
  if (c.embedding.size() > 0) j["embedding"] = to_json(c.embedding);
  if (c.dual.size() > 0) j["dual"] = to_json(c.dual);
  return j;
}

json to_json(const SnowflakeEmbedding& s) {
  return json{{"points", to_json(s.points)},
              {"max_error", num(s.max_error)},
              {"min_eigenvalue", num(s.min_eigenvalue)},
              {"distortion", num(s.distortion)},
              {"bound", num(s.bound)}};
}

json family_to_json(const std::vector<PointSet>& family) {
  json a = json::array();
  for (const PointSet& s : family) {
    json set = json::array();
    for (const GridPoint& p : s) set.push_back(json::array({p[0], p[1]}));
    a.push_back(set);
  }
  return a;
}

std::vector<PointSet> family_from_json(const json& j) {
  const json& sets = j.is_object() ? j.at("family") : j;
  if (!sets.is_array()) throw InputError("family file must be a list of point lists");
  std::vector<PointSet> family;
  try {
    for (const json& s : sets) {
      PointSet set;
      for (const json& p : s) {
        if (!p.is_array() || p.size() != 2) throw InputError("family points must be integer pairs");
        set.push_back({p[0].get<long>(), p[1].get<long>()});
      }
      family.push_back(std::move(set));
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed family file: ") + e.what());
  }
  return family;
}

json to_json(const FamilyMetric& f) {
  return json{{"N", f.family.size()},
              {"multiset", f.multiset},
              {"degenerate", f.degenerate},
              {"tau", to_json(f.tau)},
              {"triangle_audit",
               {{"triples", f.audit.triples}, {"worst_excess", num(f.audit.worst_excess)}, {"ok", f.audit.ok}}},
              {"family", family_to_json(f.family)}};
}

}  // namespace lipnet::cli
