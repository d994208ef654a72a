#include "lipnet/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace lipnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double l1(const Vec& a) { return a.cwiseAbs().sum(); }

/// Flat indices of lattice points of the box with |x|_X <= radius, sorted by norm.
std::vector<std::size_t> ball_points(const NormedSpace& X, const LatticeBox& box, double radius) {
  std::vector<std::pair<double, std::size_t>> keyed;
  Vec x(box.dim);
  for (std::size_t idx = 0; idx < box.size(); ++idx) {
    box.point(idx, x.data());
    const double r = X.norm(x);
    if (r <= radius * (1.0 + 1e-12)) keyed.emplace_back(r, idx);
  }
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::size_t> out;
  out.reserve(keyed.size());
  for (const auto& k : keyed) out.push_back(k.second);
  return out;
}

double lattice_sum(const GridField& f, int stride) {
  const LatticeBox& b = f.box;
  long k[3];
  double s = 0.0;
  for (std::size_t idx = 0; idx < b.size(); ++idx) {
    if (stride > 1) {
      b.coords(idx, k);
      bool keep = true;
      for (int i = 0; i < b.dim; ++i) keep = keep && k[i] % stride == 0;
      if (!keep) continue;
    }
    s += f.data[idx];
  }
  return s * std::pow(b.h * stride, b.dim);
}

}  // namespace

SmoothingContext::SmoothingContext(FieldPtr field, double margin) : field_(std::move(field)) {
  const double half = field_->support_half_width() + margin;
  region_ = LatticeBox::covering(field_->dim(), field_->spacing(), half);
  far_ = half - field_->support_half_width();
  eval_ = std::make_unique<GridEvaluator>(field_, region_);
}

const std::vector<GridField>& SmoothingContext::partials(double t) const {
  if (t < 2.0 * field_->spacing())
    throw Error("scale-unresolved", "t = " + std::to_string(t) + " is below twice the lattice spacing");
  auto it = partials_.find(t);
  if (it == partials_.end()) it = partials_.emplace(t, eval_->partials(t)).first;
  return it->second;
}

double SmoothingContext::derivative_error(double t) const {
  auto it = errors_.find(t);
  if (it == errors_.end()) it = errors_.emplace(t, Evolute(field_, t).derivative_error()).first;
  return it->second;
}

ScaleIntegral scale_integral(const SmoothingContext& ctx, const std::vector<Vec>& directions, double t) {
  if (directions.empty()) throw Error("usage", "scale search needs at least one direction");
  const FieldSamples& F = ctx.field();
  const auto& parts = ctx.partials(t);
  const int n = F.dim();
  const double grad_l1 = poisson_constant(n) * sphere_area(n) / t;
  ScaleIntegral I;
  for (const Vec& a : directions) {
    const GridField N = direction_norm(parts, a, F.target());
    const double fine = lattice_sum(N, 1);
    const double coarse = lattice_sum(N, 2);
    I.value += fine;
    I.tolerance += std::abs(fine - coarse) + derivative_far_integral(F, t, a, ctx.far_distance()) +
                   F.sampling_error() * F.support_volume() * a.norm() * grad_l1;
  }
  const double k = static_cast<double>(directions.size());
  I.value /= k;
  I.tolerance /= k;
  return I;
}

ScaleResult find_stabilizing_scale(const SmoothingContext& ctx, const std::vector<Vec>& directions, double A,
                                   double R, int m) {
  if (!(A > 0.0) || !(R > 0.0) || m < 1) throw Error("usage", "scale search needs A > 0, R > 0, m >= 1");
  const NormedSpace& X = ctx.field().space();
  ScaleLog log;
  log.A = A;
  log.R = R;
  log.m = m;
  log.volume_3b = std::pow(3.0, X.dim()) * X.unit_ball_volume();
  log.increment = 6.0 * log.volume_3b / m;
  std::map<int, ScaleIntegral> cache;
  auto integral = [&](int k) -> const ScaleIntegral& {
    auto it = cache.find(k);
    if (it == cache.end())
      it = cache.emplace(k, scale_integral(ctx, directions, A * std::pow(R + 1.0, k - m - 1))).first;
    return it->second;
  };
  for (int k = m + 1; k >= 0; --k) {
    ScaleEntry e;
    e.k = k;
    e.t = A * std::pow(R + 1.0, k - m - 1);
    const ScaleIntegral& cur = integral(k);
    const ScaleIntegral& next = integral(k + 1);
    e.integral = cur.value;
    e.next_integral = next.value;
    e.tolerance = cur.tolerance + next.tolerance;
    e.slack = cur.value - next.value - log.increment;
    e.accepted = e.slack <= e.tolerance;
    log.entries.push_back(e);
    if (e.accepted) return {e.t, k, log};
  }
  const ContradictionCheck c = check_iteration_contradiction(log);
  std::ostringstream os;
  os << "no scale t_k passed; increments telescope to " << c.telescoped << " against ceiling " << c.ceiling;
  throw StabilizationError(os.str(), log);
}

ContradictionCheck check_iteration_contradiction(const ScaleLog& log) {
  ContradictionCheck c;
  c.ceiling = 6.0 * log.volume_3b;
  c.all_failed = !log.entries.empty();
  for (const auto& e : log.entries) {
    c.all_failed = c.all_failed && !e.accepted;
    c.telescoped += e.integral - e.next_integral;
  }
  c.required = static_cast<double>(log.entries.size()) * log.increment;
  c.contradiction = c.all_failed && c.telescoped >= c.required && c.required > c.ceiling;
  return c;
}

AveragedHypotheses averaged_hypotheses(int n, double delta, double eps, double D, double t, double R) {
  AveragedHypotheses h;
  const double sn = std::sqrt(double(n));
  const double lg = std::log(3.0 / t);
  h.delta_lhs = delta;
  h.delta_mid = eps * t * lg / (2.0 * sn);
  h.delta_rhs = std::pow(eps, 4) / (6.0 * std::pow(n, 2.5) * (80.0 * D) * (80.0 * D));
  h.R_lower = 600.0 * std::pow(n, 1.5) * D * D * lg / (eps * eps);
  h.R_upper = eps / (32.0 * t * sn);
  h.delta_ok = h.delta_lhs <= h.delta_mid && h.delta_mid <= h.delta_rhs;
  h.R_ok = h.R_lower <= R && R <= h.R_upper;
  return h;
}

double theta_step(int n, double eps, double D, double t) {
  return 100.0 * D * std::sqrt(double(n)) * t * std::log(3.0 / t) / eps;
}

AveragedDerivative averaged_derivative_lower_bound(const SmoothingContext& ctx, double t, double R, const Vec& x,
                                                   const Vec& a, double delta, double eps, double D) {
  const FieldSamples& F = ctx.field();
  const int n = F.dim();
  const GridField N = direction_norm(ctx.partials(t), a, F.target());
  const LatticeBox& b = N.box;
  const double w = std::pow(b.h, n);
  AveragedDerivative out;
  std::vector<double> d(static_cast<std::size_t>(n));
  for (std::size_t idx = 0; idx < b.size(); ++idx) {
    if (N.data[idx] == 0.0) continue;
    b.point(idx, d.data());
    for (int i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = x[i] - d[static_cast<std::size_t>(i)];
    out.value += w * kernel_eval(n, R * t, d.data()) * N.data[idx];
  }
  out.truncation = derivative_far_value(F, t, a, ctx.far_distance());
  out.lower_target = (1.0 - eps) / D;
  out.hypotheses = averaged_hypotheses(n, delta, eps, D, t, R);
  return out;
}

ThetaChainCheck theta_chain_check(const Evolute& E, const std::vector<Vec>& directions, double eps, double D,
                                  int samples, std::uint64_t seed) {
  const FieldSamples& F = E.field();
  ThetaChainCheck c;
  c.theta = theta_step(F.dim(), eps, D, E.t());
  c.target = 1.0 - eps / 3.0;
  c.min_ratio = kInf;
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    const Vec z = sample_ball(F.space(), rng, 0.25);
    const Vec& a = directions[rng.index(directions.size())];
    const Vec inc = E.value(z + c.theta * a) - E.value(z);
    c.min_ratio = std::min(c.min_ratio, target_norm(F.target(), inc) * D / c.theta);
  }
  c.ok = c.min_ratio >= c.target;
  return c;
}

GoodPointResult scan_good_points(const SmoothingContext& ctx, double t, double R, const std::vector<Vec>& directions,
                                 double eps, double D) {
  if (!std::isfinite(D) || directions.empty()) throw Error("usage", "point search needs finite D and directions");
  const FieldSamples& F = ctx.field();
  const NormedSpace& X = F.space();
  const int n = F.dim();
  const double h = F.spacing();
  const auto k = static_cast<int>(directions.size());

  const LatticeBox small = LatticeBox::covering(n, h, X.coordinate_extent() / 8.0);
  const std::vector<std::size_t> order = ball_points(X, small, 0.125);

  const auto& parts = ctx.partials(t);
  GridField norms(ctx.region(), k);
  for (int j = 0; j < k; ++j) {
    const GridField N = direction_norm(parts, directions[static_cast<std::size_t>(j)], F.target());
    std::copy(N.data.begin(), N.data.end(), norms.comp(j));
  }
  FftConvolver conv(ctx.region(), small);
  conv.set_input(norms);
  norms = GridField();
  const double w = std::pow(h, n);
  const GridField averaged = conv.apply([=](const double* o) { return w * kernel_eval(n, R * t, o); });

  GridEvaluator G(ctx.field_ptr(), small);
  const std::vector<GridField> outer = G.partials((R + 1.0) * t);

  GoodPointResult r;
  r.threshold = eps / D;
  double a1 = 0.0;
  double trunc = 0.0;
  for (const Vec& a : directions) {
    a1 = std::max(a1, l1(a));
    trunc = std::max(trunc, derivative_far_value(F, t, a, ctx.far_distance()));
  }
  r.tolerance = trunc + a1 * (ctx.derivative_error(t) + ctx.derivative_error((R + 1.0) * t));
  r.worst_gap.assign(static_cast<std::size_t>(k), -kInf);
  r.min_gap = kInf;
  r.lattice_points = order.size();
  std::size_t good = 0;
  const int m = F.target_dim();
  std::vector<double> v(static_cast<std::size_t>(m));
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const std::size_t idx = order[pos];
    bool all = true;
    for (int j = 0; j < k; ++j) {
      const Vec& a = directions[static_cast<std::size_t>(j)];
      std::fill(v.begin(), v.end(), 0.0);
      for (int i = 0; i < n; ++i)
        for (int c = 0; c < m; ++c) v[static_cast<std::size_t>(c)] += a[i] * outer[static_cast<std::size_t>(i)].at(c, idx);
      const double gap = averaged.at(j, idx) - target_norm(F.target(), v.data(), m);
      r.worst_gap[static_cast<std::size_t>(j)] = std::max(r.worst_gap[static_cast<std::size_t>(j)], gap);
      r.min_gap = std::min(r.min_gap, gap);
      all = all && gap < r.threshold + r.tolerance;
    }
    if (all) {
      ++good;
      if (!r.found) {
        r.found = true;
        r.index = pos;
        r.x = Vec(n);
        small.point(idx, r.x.data());
      }
    }
  }
  r.good_fraction = order.empty() ? 0.0 : static_cast<double>(good) / static_cast<double>(order.size());
  return r;
}

GoodPointResult find_good_point(const SmoothingContext& ctx, double t, double R, const std::vector<Vec>& directions,
                                double eps, double D) {
  GoodPointResult r = scan_good_points(ctx, t, R, directions, eps, D);
  if (!r.found) {
    std::ostringstream os;
    os << "no lattice point of (1/8)B_X passes; worst gap per direction:";
    for (double g : r.worst_gap) os << ' ' << g;
    os << " (threshold " << r.threshold << " + tolerance " << r.tolerance << ")";
    throw Error("good-point-not-found", os.str());
  }
  return r;
}

OperatorCertificate certify_operator(const SpacePtr& space, const Mat& T, TargetNorm target, double eta,
                                     std::uint64_t seed) {
  const Net net = sphere_net(space, eta, seed);
  const double e = std::max(eta, net.covering_radius);
  OperatorCertificate c;
  c.net_size = net.size();
  c.min_net = kInf;
  for (const Vec& a : net.points) {
    const double v = target_norm(target, Vec(T * a));
    c.max_net = std::max(c.max_net, v);
    c.min_net = std::min(c.min_net, v);
  }
  c.norm = c.max_net / (1.0 - e);
  const double low = c.min_net - c.norm * e;
  c.inverse_norm = low > 0.0 ? 1.0 / low : kInf;
  c.distortion = std::isinf(c.inverse_norm) ? kInf : c.norm * c.inverse_norm;
  return c;
}

EmbeddingReport extract_embedding(FieldPtr field, double t, double R, const Vec& x_star, double eps, double eta,
                                  std::uint64_t seed) {
  const int n = field->dim();
  const Evolute E(field, (R + 1.0) * t);
  EmbeddingReport r;
  r.T = E.jacobian(x_star);
  r.x_star = x_star;
  r.t_star = t;
  r.R = R;
  r.eta = eta;
  const OperatorCertificate c = certify_operator(field->space_ptr(), r.T, field->target(), eta, seed);
  r.net_size = c.net_size;
  r.max_net = c.max_net;
  r.min_net = c.min_net;
  r.norm_T = c.norm;
  r.norm_Tinv = c.inverse_norm;
  r.distortion = c.distortion;
  r.sampled_distortion = c.min_net > 0.0 ? c.max_net / c.min_net : kInf;
  r.T_error = E.derivative_error() * std::sqrt(double(n)) / field->space().euclid_lower();
  r.lipschitz_hypothesis = (R + 1.0) * t < eps / (25.0 * std::sqrt(double(n)));
  r.lipschitz_bound = 1.0 + 2.0 * eps;
  return r;
}

ApproximationCheck approximation_check(FieldPtr field, const MapFn& F, double t, int samples, std::uint64_t seed) {
  const Evolute E = convolve(field, t);
  const int n = field->dim();
  ApproximationCheck c;
  c.bound = 8.0 * std::sqrt(double(n)) * t * std::log(3.0 / t);
  c.quad_error = E.value_error();
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    const Vec x = sample_ball(field->space(), rng);
    c.max_deviation = std::max(c.max_deviation, target_norm(field->target(), Vec(E.value(x) - F(x))));
  }
  c.ok = c.max_deviation <= c.bound;
  return c;
}

EvoluteLipschitzCheck evolute_lipschitz_check(FieldPtr field, double t, double eps, std::size_t pairs,
                                              std::uint64_t seed, double slack) {
  const NormedSpace& X = field->space();
  const int n = field->dim();
  const int m = field->target_dim();
  EvoluteLipschitzCheck c;
  c.t = t;
  c.eps = eps;
  c.slack = slack;
  c.hypothesis = t < eps / (25.0 * std::sqrt(double(n)));
  c.bound = 1.0 + 2.0 * eps;
  c.intermediate = 1.0 + eps + 24.0 * t * std::sqrt(double(n));
  if (t < 2.0 * field->spacing())
    throw Error("scale-unresolved", "t = " + std::to_string(t) + " is below twice the lattice spacing");

  const LatticeBox box = LatticeBox::covering(n, field->spacing(), X.coordinate_extent() / 4.0);
  const std::vector<std::size_t> pts = ball_points(X, box, 0.25);
  GridEvaluator G(field, box);
  const GridField vals = G.values(t);

  Rng rng(seed);
  Vec x(n), y(n), d(m);
  long kx[3], ky[3];
  // Rejected draws (off the ball, or i == j) do not count towards `pairs`.
  for (std::size_t p = 0; c.pairs < pairs && p < 20 * pairs; ++p) {
    const std::size_t i = pts[rng.index(pts.size())];
    std::size_t j = 0;
    if (p % 2 == 0) {
      j = pts[rng.index(pts.size())];
    } else {
      box.coords(i, kx);
      for (int q = 0; q < n; ++q) ky[q] = kx[q] + static_cast<long>(rng.index(7)) - 3;
      j = box.index_of(ky);
      if (j == LatticeBox::npos) continue;
      box.point(j, y.data());
      if (X.norm(y) > 0.25) continue;
    }
    if (i == j) continue;
    box.point(i, x.data());
    box.point(j, y.data());
    for (int c2 = 0; c2 < m; ++c2) d[c2] = vals.at(c2, i) - vals.at(c2, j);
    c.max_ratio = std::max(c.max_ratio, target_norm(field->target(), d) / X.distance(x.data(), y.data()));
    ++c.pairs;
  }
  c.ok = c.max_ratio <= c.bound + slack;
  c.intermediate_ok = c.max_ratio <= c.intermediate + slack;
  return c;
}

SemigroupCheck semigroup_check(FieldPtr field, double t, double s, double half_width, double rho) {
  const int n = field->dim();
  const double h = field->spacing();
  SemigroupCheck c;
  const LatticeBox gbox = LatticeBox::covering(n, h, rho);
  GridField inner = GridEvaluator(field, gbox).values(s);
  auto G = std::make_shared<FieldSamples>(field->space_ptr(), std::move(inner), field->target(), 0.0);

  const LatticeBox out = LatticeBox::covering(n, h, half_width);
  const GridField lhs = GridEvaluator(G, out).values(t);
  const GridField rhs = GridEvaluator(field, out).values(t + s);
  const int m = field->target_dim();
  Vec d(m);
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    for (int k = 0; k < m; ++k) d[k] = lhs.at(k, idx) - rhs.at(k, idx);
    c.max_deviation = std::max(c.max_deviation, target_norm(field->target(), d));
  }
  c.grid_points = out.size();

  const Evolute whole(field, t + s);
  const Evolute nested(G, t);
  c.lattice_error = (whole.value_error() - field->sampling_error()) + nested.value_error();
  const double gap = rho - field->support_half_width();
  const double g_sup = field->l1_norm() * poisson_constant(n) * s / std::pow(s * s + gap * gap, (n + 1) / 2.0);
  c.truncation = g_sup * euclidean_tail(n, t, rho - half_width);
  c.quad_error = c.lattice_error + c.truncation + field->sampling_error();
  c.ok = c.max_deviation <= 3.0 * c.quad_error;
  return c;
}

}  // namespace lipnet
