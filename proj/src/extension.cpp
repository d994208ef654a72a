#include "lipnet/extension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lipnet {

TargetNorm parse_target_norm(const std::string& text) {
  if (text == "l2" || text == "lp:2") return TargetNorm::l2;
  if (text == "linf" || text == "lp:inf") return TargetNorm::linf;
  throw Error("usage", "target norm must be l2 or linf, got '" + text + "'");
}

std::string to_string(TargetNorm t) { return t == TargetNorm::l2 ? "l2" : "linf"; }

double target_norm(TargetNorm t, const double* v, int m) {
  double s = 0.0;
  if (t == TargetNorm::l2) {
    for (int i = 0; i < m; ++i) s += v[i] * v[i];
    return std::sqrt(s);
  }
  for (int i = 0; i < m; ++i) s = std::max(s, std::abs(v[i]));
  return s;
}

BiLipschitzCheck check_bi_lipschitz(const Net& net, const Mat& values, TargetNorm target, double D) {
  BiLipschitzCheck c;
  const NormedSpace& space = *net.space;
  const auto N = net.size();
  const int m = static_cast<int>(values.cols());
  Vec diff(m);
  double worst = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = i + 1; j < N; ++j) {
      const double dx = space.distance(net.points[i].data(), net.points[j].data());
      diff = values.row(static_cast<Eigen::Index>(i)) - values.row(static_cast<Eigen::Index>(j));
      const double dy = target_norm(target, diff);
      const double up = dy / dx;
      const double down = dy > 0.0 ? dx / dy : std::numeric_limits<double>::infinity();
      c.max_expansion = std::max(c.max_expansion, up);
      c.max_contraction = std::max(c.max_contraction, down);
      const double excess = std::isinf(D) ? up - 1.0 : std::max(up - 1.0, down / D - 1.0);
      if (excess > worst) {
        worst = excess;
        c.worst_i = static_cast<int>(i);
        c.worst_j = static_cast<int>(j);
      }
    }
  }
  c.ok = worst <= 1e-9;
  return c;
}

NetMap::NetMap(Net net, Mat values, double D, TargetNorm target)
    : net_(std::move(net)), values_(std::move(values)), D_(D), target_(target) {
  if (static_cast<std::size_t>(values_.rows()) != net_.size())
    throw Error("invalid-map", "map needs one value per net point");
  if (values_.cols() < 1 || values_.cols() > 64) throw Error("invalid-map", "target dimension must lie in [1, 64]");
  // D = inf drops the lower bound (constant maps in tests and examples).
  if (!(D >= 1.0)) throw Error("invalid-map", "distortion bound D must be >= 1");
  check_ = check_bi_lipschitz(net_, values_, target_, D_);
  if (!check_.ok) {
    std::ostringstream os;
    os << "net points " << check_.worst_i << " and " << check_.worst_j << " violate (1/D)|x-y| <= |f(x)-f(y)| <= |x-y|"
       << " (expansion " << check_.max_expansion << ", contraction " << check_.max_contraction << ", D " << D_ << ")";
    throw Error("not-bi-lipschitz", os.str());
  }
  translation_ = values_.row(0).transpose();
  values_.rowwise() -= translation_.transpose();
  for (Eigen::Index i = 0; i < values_.rows(); ++i)
    max_value_norm_ = std::max(max_value_norm_, lipnet::target_norm(target_, Vec(values_.row(i).transpose())));
  if (max_value_norm_ > 2.0 * (1.0 + 1e-9))
    throw Error("invalid-map", "translated values leave 2B_Y; net points must lie in B_X");
}

NetMapPtr make_net_map(const Net& net, const std::function<Vec(const Vec&)>& fn, TargetNorm target) {
  if (net.size() == 0) throw Error("invalid-map", "empty net");
  const Vec first = fn(net.points[0]);
  Mat values(static_cast<Eigen::Index>(net.size()), first.size());
  for (std::size_t i = 0; i < net.size(); ++i) values.row(static_cast<Eigen::Index>(i)) = fn(net.points[i]).transpose();
  return make_net_map(net, std::move(values), target);
}

NetMapPtr make_net_map(const Net& net, Mat values, TargetNorm target) {
  if (net.size() == 0) throw Error("invalid-map", "empty net");
  if (values.rows() != static_cast<Eigen::Index>(net.size()))
    throw Error("invalid-map", "expected one value row per net point");
  const BiLipschitzCheck c = check_bi_lipschitz(net, values, target, 1.0);
  const double D = std::max(1.0, c.max_contraction * (1.0 + 1e-12));
  return std::make_shared<const NetMap>(net, std::move(values), D, target);
}

double bump_profile(double t) {
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  const double s = t - 1.0;
  return 1.0 - 3.0 * s * s + 2.0 * s * s * s;
}

double bump_profile_slope(double t) {
  if (t <= 1.0 || t >= 2.0) return 0.0;
  const double s = t - 1.0;
  return -6.0 * s + 6.0 * s * s;
}

std::vector<Vec> ball_nodes(const NormedSpace& space, double radius, int per_axis) {
  const int n = space.dim();
  const double ext = space.coordinate_extent() * radius;
  std::vector<Vec> nodes;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  Vec y(n);
  while (true) {
    for (int i = 0; i < n; ++i) y[i] = ext * (-1.0 + (2.0 * idx[static_cast<std::size_t>(i)] + 1.0) / per_axis);
    if (space.norm(y) <= radius) nodes.push_back(y);
    int i = 0;
    while (i < n && idx[static_cast<std::size_t>(i)] == per_axis - 1) idx[static_cast<std::size_t>(i++)] = 0;
    if (i == n) break;
    ++idx[static_cast<std::size_t>(i)];
  }
  return nodes;
}

AlmostExtension::AlmostExtension(NetMapPtr map, double eps, ExtensionOptions opts)
    : map_(std::move(map)),
      n_(map_->space().dim()),
      m_(map_->target_dim()),
      eps_(eps),
      delta_(map_->net().delta),
      tau_(2.0 * n_ * delta_ / eps),
      index_(n_, 2.0 * delta_ * map_->space().coordinate_extent()) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error("invalid-argument", "eps must lie in (0, 1)");
  if (opts.enforce_hypothesis && !(delta_ < eps / (4.0 * n_))) {
    std::ostringstream os;
    os << "almost-extension requires delta < eps/(4n); got delta = " << delta_ << ", eps/(4n) = " << eps / (4.0 * n_);
    throw Error("hypothesis-violated", os.str());
  }
  const Net& net = map_->net();
  const auto N = net.size();
  points_.resize(N * static_cast<std::size_t>(n_));
  values_.resize(N * static_cast<std::size_t>(m_));
  for (std::size_t i = 0; i < N; ++i) {
    for (int k = 0; k < n_; ++k) points_[i * static_cast<std::size_t>(n_) + static_cast<std::size_t>(k)] = net.points[i][k];
    for (int k = 0; k < m_; ++k)
      values_[i * static_cast<std::size_t>(m_) + static_cast<std::size_t>(k)] = map_->values()(static_cast<Eigen::Index>(i), k);
    index_.insert(net.points[i].data(), static_cast<int>(i));
  }
  nodes_ = ball_nodes(space(), tau_, opts.nodes);
  coarse_nodes_ = ball_nodes(space(), tau_, opts.coarse_nodes);
}

std::vector<AlmostExtension::Bump> AlmostExtension::partition(const Vec& x) const {
  const NormedSpace& sp = space();
  std::vector<int> near;
  index_.for_each_near(x.data(), [&](int id) { near.push_back(id); });
  std::sort(near.begin(), near.end());
  std::vector<Bump> out;
  double rest = 1.0;
  for (int id : near) {
    const double r = sp.distance(x.data(), &points_[static_cast<std::size_t>(id) * static_cast<std::size_t>(n_)]) / delta_;
    const double psi = bump_profile(r);
    if (psi == 0.0) continue;
    out.push_back({id, psi, psi * rest});
    rest *= 1.0 - psi;
  }
  return out;
}

void AlmostExtension::eval_g(const double* x, double* out, double* jac) const {
  const NormedSpace& sp = space();
  for (int k = 0; k < m_; ++k) out[k] = 0.0;
  if (jac)
    for (int k = 0; k < m_ * n_; ++k) jac[k] = 0.0;

  int near[512];
  int count = 0;
  index_.for_each_near(x, [&](int id) {
    if (count < 512) near[count++] = id;
  });
  std::sort(near, near + count);

  double d[8];
  double grad_psi[8];
  double grad_rest[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  double rest = 1.0;
  for (int c = 0; c < count; ++c) {
    const std::size_t id = static_cast<std::size_t>(near[c]);
    const double* p = &points_[id * static_cast<std::size_t>(n_)];
    for (int k = 0; k < n_; ++k) d[k] = x[k] - p[k];
    const double r = sp.norm(d) / delta_;
    const double psi = bump_profile(r);
    if (psi == 0.0) continue;
    const double phi = psi * rest;
    const double* v = &values_[id * static_cast<std::size_t>(m_)];
    for (int k = 0; k < m_; ++k) out[k] += phi * v[k];
    if (jac) {
      const double slope = bump_profile_slope(r) / delta_;
      if (slope != 0.0) {
        sp.gradient(d, grad_psi);
        for (int k = 0; k < n_; ++k) grad_psi[k] *= slope;
      } else {
        for (int k = 0; k < n_; ++k) grad_psi[k] = 0.0;
      }
      for (int k = 0; k < n_; ++k) {
        const double gphi = grad_psi[k] * rest + psi * grad_rest[k];
        if (gphi != 0.0)
          for (int j = 0; j < m_; ++j) jac[k * m_ + j] += v[j] * gphi;
        grad_rest[k] = grad_rest[k] * (1.0 - psi) - rest * grad_psi[k];
      }
    }
    rest *= 1.0 - psi;
    if (rest == 0.0) {
      bool flat = true;
      for (int k = 0; k < n_; ++k) flat = flat && grad_rest[k] == 0.0;
      if (flat || !jac) break;
    }
  }
}

void AlmostExtension::eval_h(const double* x, double* out, double* jac) const {
  const NormedSpace& sp = space();
  const double r = sp.norm(x);
  if (r <= 1.0) {
    eval_g(x, out, jac);
    return;
  }
  if (r >= 2.0) {
    for (int k = 0; k < m_; ++k) out[k] = 0.0;
    if (jac)
      for (int k = 0; k < m_ * n_; ++k) jac[k] = 0.0;
    return;
  }
  double u[8];
  for (int k = 0; k < n_; ++k) u[k] = x[k] / r;
  const double beta = 2.0 - r;
  if (!jac) {
    eval_g(u, out, nullptr);
    for (int k = 0; k < m_; ++k) out[k] *= beta;
    return;
  }
  double gu[64];
  double jg[512];
  eval_g(u, gu, jg);
  double grad_r[8];
  sp.gradient(x, grad_r);
  for (int k = 0; k < m_; ++k) out[k] = beta * gu[k];
  // d/dx [beta(r) g(x/r)] = -g(u) grad_r^T + beta Jg(u) (I - u grad_r^T) / r
  double jgu[64];
  for (int j = 0; j < m_; ++j) {
    double s = 0.0;
    for (int k = 0; k < n_; ++k) s += jg[k * m_ + j] * u[k];
    jgu[j] = s;
  }
  for (int k = 0; k < n_; ++k)
    for (int j = 0; j < m_; ++j)
      jac[k * m_ + j] = -gu[j] * grad_r[k] + beta * (jg[k * m_ + j] - jgu[j] * grad_r[k]) / r;
}

Vec AlmostExtension::g(const Vec& x) const {
  Vec out(m_);
  eval_g(x.data(), out.data(), nullptr);
  return out;
}

Vec AlmostExtension::h(const Vec& x) const {
  Vec out(m_);
  eval_h(x.data(), out.data(), nullptr);
  return out;
}

Mat AlmostExtension::h_jacobian(const Vec& x) const {
  Vec out(m_);
  Mat jac(m_, n_);
  eval_h(x.data(), out.data(), jac.data());
  return jac;
}

Vec AlmostExtension::average(const std::vector<Vec>& nodes, const Vec& x) const {
  Vec acc = Vec::Zero(m_);
  Vec tmp(m_);
  double z[8];
  for (const Vec& y : nodes) {
    for (int k = 0; k < n_; ++k) z[k] = x[k] - y[k];
    eval_h(z, tmp.data(), nullptr);
    acc += tmp;
  }
  return acc / static_cast<double>(nodes.size());
}

Vec AlmostExtension::F(const Vec& x) const {
  // h vanishes outside 2B_X.
  if (space().norm(x) >= 2.0 + tau_) return Vec::Zero(m_);
  return average(nodes_, x);
}

Mat AlmostExtension::F_jacobian(const Vec& x) const {
  Mat acc = Mat::Zero(m_, n_);
  if (space().norm(x) >= 2.0 + tau_) return acc;
  Vec tmp(m_);
  Mat jac(m_, n_);
  double z[8];
  for (const Vec& y : nodes_) {
    for (int k = 0; k < n_; ++k) z[k] = x[k] - y[k];
    eval_h(z, tmp.data(), jac.data());
    acc += jac;
  }
  return acc / static_cast<double>(nodes_.size());
}

double AlmostExtension::F_error_estimate(const Vec& x) const {
  if (space().norm(x) >= 2.0 + tau_) return 0.0;
  return map_->target_norm(Vec(average(nodes_, x) - average(coarse_nodes_, x)));
}

std::pair<Vec, Vec> sample_pair(const NormedSpace& space, Rng& rng, const PointSampler& sample) {
  (void)space;
  Vec x = sample(rng);
  Vec z = sample(rng);
  if (rng.uniform() < 0.5) return {x, z};
  const double lam = std::exp(rng.uniform(std::log(1e-4), 0.0));
  Vec y = x + lam * (z - x);
  return {x, y};
}

BegunReport begun_average(const NormedSpace& space, TargetNorm target, const MapFn& h, double L, double eta,
                          double tau, const PointSampler& sample_domain, const PointSampler& sample_k,
                          std::size_t hyp_pairs, std::size_t lip_pairs, std::uint64_t seed, int per_axis) {
  BegunReport rep;
  rep.L = L;
  rep.eta = eta;
  rep.tau = tau;
  rep.bound = L * (1.0 + space.dim() * eta / (2.0 * tau));
  Rng rng(seed);
  for (std::size_t k = 0; k < hyp_pairs; ++k) {
    auto [x, y] = sample_pair(space, rng, sample_domain);
    const double lhs = target_norm(target, Vec(h(x) - h(y)));
    const double rhs = L * (space.distance(x.data(), y.data()) + eta);
    const double excess = lhs - rhs;
    if (excess > 1e-12 * (1.0 + rhs) && excess > rep.violation_excess) {
      rep.hypothesis_ok = false;
      rep.violation_excess = excess;
      rep.violation_x = x;
      rep.violation_y = y;
    }
  }
  const std::vector<Vec> nodes = ball_nodes(space, tau, per_axis);
  auto H = [&](const Vec& x) {
    Vec acc = h(Vec(x - nodes[0]));
    for (std::size_t i = 1; i < nodes.size(); ++i) acc += h(Vec(x - nodes[i]));
    return Vec(acc / static_cast<double>(nodes.size()));
  };
  for (std::size_t k = 0; k < lip_pairs; ++k) {
    auto [x, y] = sample_pair(space, rng, sample_k);
    const double dx = space.distance(x.data(), y.data());
    if (dx == 0.0) continue;
    rep.sampled_lipschitz = std::max(rep.sampled_lipschitz, target_norm(target, Vec(H(x) - H(y))) / dx);
  }
  return rep;
}

BulletReport check_bullets(const AlmostExtension& ext, std::size_t pairs, std::uint64_t seed, double slack) {
  const NormedSpace& space = ext.space();
  const NetMap& map = ext.map();
  const double n = ext.dim();
  BulletReport rep;
  rep.slack = slack;
  rep.net_bound = 9.0 * n * ext.delta() / ext.eps();
  Rng rng(seed);

  // Support: points beyond (2 + tau) B_X, which contains the support.
  const std::size_t outside = std::max<std::size_t>(pairs / 10, 100);
  for (std::size_t k = 0; k < outside; ++k) {
    const Vec dir = sample_sphere(space, rng);
    const double r = rng.uniform(2.0 + ext.tau(), 4.0);
    const Vec x = r * dir;
    rep.support_max_value = std::max(rep.support_max_value, map.target_norm(ext.F(x)));
  }
  rep.support_samples = static_cast<double>(outside);
  rep.support_ok = rep.support_max_value == 0.0;

  auto sample_big = [&](Rng& g) { return sample_ball(space, g, 2.0 + ext.tau() + 0.5); };
  auto sample_half = [&](Rng& g) { return sample_ball(space, g, 0.5); };
  rep.global_excess = -std::numeric_limits<double>::infinity();
  rep.inner_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < pairs; ++k) {
    {
      auto [x, y] = sample_pair(space, rng, sample_big);
      const double dx = space.distance(x.data(), y.data());
      const double dy = map.target_norm(Vec(ext.F(x) - ext.F(y)));
      if (dx > 0) rep.global_lipschitz = std::max(rep.global_lipschitz, dy / dx);
      rep.global_excess = std::max(rep.global_excess, dy - 6.0 * dx);
    }
    {
      auto [x, y] = sample_pair(space, rng, sample_half);
      const double dx = space.distance(x.data(), y.data());
      const double dy = map.target_norm(Vec(ext.F(x) - ext.F(y)));
      if (dx > 0) rep.inner_lipschitz = std::max(rep.inner_lipschitz, dy / dx);
      rep.inner_excess = std::max(rep.inner_excess, dy - (1.0 + ext.eps()) * dx);
    }
  }
  rep.global_ok = rep.global_excess <= slack;
  rep.inner_ok = rep.inner_excess <= slack;

  const Net& net = map.net();
  for (std::size_t i = 0; i < net.size(); ++i) {
    const Vec fp = map.values().row(static_cast<Eigen::Index>(i)).transpose();
    rep.net_deviation = std::max(rep.net_deviation, map.target_norm(Vec(ext.F(net.points[i]) - fp)));
  }
  rep.net_ok = rep.net_deviation <= rep.net_bound;

  const std::size_t probes = std::min<std::size_t>(50, pairs);
  for (std::size_t k = 0; k < probes; ++k) {
    const Vec x = sample_ball(space, rng, 2.0);
    rep.quadrature_error = std::max(rep.quadrature_error, ext.F_error_estimate(x));
  }
  return rep;
}

}  // namespace lipnet
