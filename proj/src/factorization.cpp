#include "lipnet/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace lipnet {

namespace {

constexpr double kPi = 3.141592653589793;

double dual_target_norm(TargetNorm t, const Vec& v) {
  return t == TargetNorm::l2 ? v.norm() : v.lpNorm<1>();
}

// |M|_{X -> l_inf} = max over rows of the dual norm.
double rows_dual_norm(const NormedSpace& space, const Mat& M) {
  double best = 0.0;
  for (Eigen::Index k = 0; k < M.rows(); ++k) best = std::max(best, space.dual_norm(Vec(M.row(k).transpose())));
  return best;
}

Vec sample_target_ball(TargetNorm t, int m, double r, Rng& rng) {
  Vec w(m);
  if (t == TargetNorm::linf) {
    for (int i = 0; i < m; ++i) w[i] = rng.uniform(-r, r);
    return w;
  }
  for (int i = 0; i < m; ++i) w[i] = rng.normal();
  return w * (r * std::pow(rng.uniform(), 1.0 / m) / w.norm());
}

}  // namespace

CoordinateEmbedding coordinate_embedding(const SpacePtr& space, double eta, std::uint64_t seed) {
  if (!(eta > 0.0 && eta < 1.0)) throw Error("invalid-argument", "eta must lie in (0, 1)");
  const int n = space->dim();
  const Net net = sphere_net(space, eta, seed);
  std::map<std::vector<long long>, Vec> unique;
  for (const Vec& p : net.points) {
    const Vec u = space->gradient(p);
    std::vector<long long> key(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) key[static_cast<std::size_t>(i)] = std::llround(u[i] * 1e9);
    unique.emplace(std::move(key), u);
  }
  CoordinateEmbedding J;
  J.rows.resize(static_cast<Eigen::Index>(unique.size()), n);
  Eigen::Index k = 0;
  for (const auto& kv : unique) J.rows.row(k++) = kv.second.transpose();

  Rng rng(seed ^ 0x5bd1e995ULL);
  double worst = 1.0;
  for (int s = 0; s < 20000; ++s) {
    const Vec x = sample_sphere(*space, rng);
    worst = std::min(worst, J.apply(x).lpNorm<Eigen::Infinity>() / space->norm(x));
  }
  J.slack = std::max(0.0, 1.0 - worst);
  return J;
}

McShaneExtension::McShaneExtension(NetMapPtr map, CoordinateEmbedding J) : map_(std::move(map)), J_(std::move(J)) {
  const double D = map_->D();
  if (!std::isfinite(D)) throw Error("invalid-argument", "McShane extension needs a finite D");
  const Net& net = map_->net();
  const auto N = static_cast<Eigen::Index>(net.size());
  jvals_.resize(N, J_.rows.rows());
  for (Eigen::Index i = 0; i < N; ++i) jvals_.row(i) = (J_.rows * net.points[static_cast<std::size_t>(i)]).transpose();
  const Mat& f = map_->values();
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index j = i + 1; j < N; ++j) {
      const double dj = (jvals_.row(i) - jvals_.row(j)).lpNorm<Eigen::Infinity>();
      const double df = map_->target_norm(Vec((f.row(i) - f.row(j)).transpose()));
      if (dj > D * df * (1.0 + 1e-9) + 1e-12) {
        std::ostringstream os;
        os << "net points " << i << " and " << j << ": |J(x)-J(y)| = " << dj << " exceeds D |f(x)-f(y)| = " << D * df;
        throw Error("not-bi-lipschitz", os.str());
      }
    }
  }
}

Vec McShaneExtension::G(const Vec& z) const {
  const Mat& f = map_->values();
  const double D = map_->D();
  const Eigen::Index N = f.rows();
  Vec best = Vec::Constant(jvals_.cols(), std::numeric_limits<double>::infinity());
  Vec diff(f.cols());
  for (Eigen::Index i = 0; i < N; ++i) {
    diff = z - f.row(i).transpose();
    const double d = D * map_->target_norm(diff);
    best = best.cwiseMin((jvals_.row(i).array() + d).matrix().transpose());
  }
  return best;
}

Mollified::Mollified(const McShaneExtension& G, double radius, int per_axis, std::uint64_t seed)
    : G_(G), radius_(radius) {
  if (!(radius >= 0.0)) throw Error("invalid-argument", "mollification radius must be >= 0");
  const int m = G.map().target_dim();
  const TargetNorm t = G.map().target();
  if (radius == 0.0) {
    nodes_.push_back(Vec::Zero(m));
    return;
  }
  if (m <= 3) {
    std::vector<int> idx(static_cast<std::size_t>(m), 0);
    Vec w(m);
    while (true) {
      for (int i = 0; i < m; ++i) w[i] = radius * (-1.0 + (2.0 * idx[static_cast<std::size_t>(i)] + 1.0) / per_axis);
      if (target_norm(t, w) <= radius) nodes_.push_back(w);
      int i = 0;
      while (i < m && idx[static_cast<std::size_t>(i)] == per_axis - 1) idx[static_cast<std::size_t>(i++)] = 0;
      if (i == m) break;
      ++idx[static_cast<std::size_t>(i)];
    }
    return;
  }
  // Antithetic pairs keep the node mean at zero, so linear maps stay exact.
  Rng rng(seed);
  const int pairs = per_axis * per_axis * per_axis / 2;
  for (int s = 0; s < pairs; ++s) {
    const Vec w = sample_target_ball(t, m, radius, rng);
    nodes_.push_back(w);
    nodes_.push_back(-w);
  }
}

Vec Mollified::H(const Vec& z) const {
  Vec sum = Vec::Zero(G_.dim());
  for (const Vec& w : nodes_) sum += G_.G(z + w);
  return sum / static_cast<double>(nodes_.size());
}

Mat Mollified::H_jacobian(const Vec& z) const {
  const auto m = z.size();
  const double step = radius_ > 0.0 ? 1e-4 * radius_ : 1e-6;
  Mat jac(G_.dim(), m);
  Vec zp = z;
  Vec zm = z;
  for (Eigen::Index i = 0; i < m; ++i) {
    zp[i] += step;
    zm[i] -= step;
    jac.col(i) = (H(zp) - H(zm)) / (2.0 * step);
    zp[i] = z[i];
    zm[i] = z[i];
  }
  return jac;
}

double default_mollification_radius(int n, double delta, double eps) { return n * delta / eps; }

NuNodes nu_nodes(const NormedSpace& space, int per_axis) {
  NuNodes nu;
  nu.points = ball_nodes(space, 0.5, per_axis);
  nu.weights.assign(nu.points.size(), 1.0 / static_cast<double>(nu.points.size()));
  return nu;
}

Vec AveragingOperator::apply(const std::vector<Vec>& h) const {
  if (h.size() != M.size()) throw Error("invalid-argument", "S needs one value per node");
  Vec out = Vec::Zero(M.empty() ? 0 : M.front().rows());
  for (std::size_t i = 0; i < M.size(); ++i) out += weights[i] * (M[i] * h[i]);
  return out;
}

double AveragingOperator::norm(TargetNorm target) const {
  double best = 0.0;
  for (const Mat& Mi : M)
    for (Eigen::Index k = 0; k < Mi.rows(); ++k) best = std::max(best, dual_target_norm(target, Vec(Mi.row(k).transpose())));
  return best;
}

AveragingOperator averaging_operator(const Mollified& H, const AlmostExtension& ext, const NuNodes& nu) {
  AveragingOperator S;
  S.weights = nu.weights;
  S.M.reserve(nu.points.size());
  for (const Vec& x : nu.points) S.M.push_back(H.H_jacobian(ext.F(x)));
  return S;
}

double nu_norm(const std::vector<double>& weights, const std::vector<double>& values, double p) {
  if (weights.size() != values.size()) throw Error("invalid-argument", "weights and values differ in length");
  if (!(p >= 1.0)) throw Error("invalid-argument", "p must be >= 1");
  if (std::isinf(p)) {
    double best = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (weights[i] > 0.0) best = std::max(best, std::abs(values[i]));
    return best;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += weights[i] * std::pow(std::abs(values[i]), p);
  return std::pow(s, 1.0 / p);
}

FactorizationReport factorize(const AlmostExtension& ext, const FactorizationOptions& opts) {
  const NetMap& map = ext.map();
  const NormedSpace& X = ext.space();
  const SpacePtr& Xp = map.net().space;
  const TargetNorm Y = map.target();
  FactorizationReport r;
  r.n = ext.dim();
  r.m = ext.target_dim();
  r.eps = ext.eps();
  r.delta = ext.delta();
  r.D = map.D();
  if (!std::isfinite(r.D)) throw Error("invalid-argument", "factorization needs a finite D");
  const double nDde = r.n * r.D * r.delta / r.eps;
  r.delta_hypothesis = r.delta <= r.eps * r.eps / (30.0 * r.n * r.n * r.D);

  const CoordinateEmbedding J = coordinate_embedding(Xp, opts.eta_J, opts.seed);
  r.K = static_cast<int>(J.rows.rows());
  r.J_slack = J.slack;
  const McShaneExtension G(ext.map_ptr(), J);
  r.radius = opts.radius > 0.0 ? opts.radius : default_mollification_radius(r.n, r.delta, r.eps);
  const Mollified H(G, r.radius, opts.mollifier_per_axis, opts.seed + 1);

  const Net& net = map.net();
  const Mat& f = map.values();
  for (std::size_t i = 0; i < net.size(); ++i) {
    const Vec gi = G.G(f.row(static_cast<Eigen::Index>(i)).transpose());
    r.interpolation_error =
        std::max(r.interpolation_error, (gi - J.apply(net.points[i])).lpNorm<Eigen::Infinity>());
  }

  Rng rng(opts.seed + 2);
  const int m = r.m;
  for (std::size_t s = 0; s < 10 * opts.samples; ++s) {
    const Vec base = f.row(static_cast<Eigen::Index>(rng.index(net.size()))).transpose();
    const Vec z1 = base + sample_target_ball(Y, m, 0.5, rng);
    const double scale = std::pow(10.0, rng.uniform(-4.0, 0.0));
    const Vec z2 = z1 + sample_target_ball(Y, m, scale, rng);
    const double dz = target_norm(Y, Vec(z1 - z2));
    if (dz <= 0.0) continue;
    r.G_lipschitz = std::max(r.G_lipschitz, (G.G(z1) - G.G(z2)).lpNorm<Eigen::Infinity>() / dz);
  }

  r.H_bound = nDde;
  for (std::size_t s = 0; s < opts.samples; ++s) {
    const Vec z = ext.F(sample_ball(X, rng));
    r.H_deviation = std::max(r.H_deviation, (H.H(z) - G.G(z)).lpNorm<Eigen::Infinity>());
  }

  r.net_bound = 10.0 * nDde;
  for (const Vec& p : net.points)
    r.net_deviation = std::max(r.net_deviation, (H.H(ext.F(p)) - J.apply(p)).lpNorm<Eigen::Infinity>());
  r.half_ball_bound = 15.0 * nDde;
  for (std::size_t s = 0; s < opts.samples; ++s) {
    const Vec x = sample_ball(X, rng, 0.5);
    r.half_ball_deviation = std::max(r.half_ball_deviation, (H.H(ext.F(x)) - J.apply(x)).lpNorm<Eigen::Infinity>());
  }

  // Nodes of nu: F'(x_i) and H'(F(x_i)).
  const NuNodes nu = nu_nodes(X, opts.nu_per_axis);
  const std::size_t Nn = nu.points.size();
  const AveragingOperator S = averaging_operator(H, ext, nu);
  r.S_norm = S.norm(Y);
  std::vector<Mat> Fp(Nn);
  Mat A = Mat::Zero(r.K, r.n);
  Mat A_direct = Mat::Zero(r.K, r.n);
  const double hx = 1e-4;
  for (std::size_t i = 0; i < Nn; ++i) {
    const Vec& x = nu.points[i];
    Fp[i] = ext.F_jacobian(x);
    A += nu.weights[i] * (S.M[i] * Fp[i]);
    Vec xp = x;
    Vec xm = x;
    for (int j = 0; j < r.n; ++j) {
      xp[j] += hx;
      xm[j] -= hx;
      A_direct.col(j) += nu.weights[i] * (H.H(ext.F(xp)) - H.H(ext.F(xm))) / (2.0 * hx);
      xp[j] = x[j];
      xm[j] = x[j];
    }
  }
  r.ST = A;
  const double st_norm = rows_dual_norm(X, A);
  r.chain_rule_gap = rows_dual_norm(X, Mat(A - A_direct)) / std::max(st_norm, 1e-300);
  r.ST_minus_J = rows_dual_norm(X, Mat(A - J.rows));
  r.ST_bound = 30.0 * r.n * nDde;

  r.T_bound = 1.0 + r.eps;
  r.certificate_target = 1.0 - r.eps;
  r.certificate_min = std::numeric_limits<double>::infinity();
  std::vector<double> norms(Nn);
  for (std::size_t s = 0; s < opts.y_samples; ++s) {
    const Vec y = sample_sphere(X, rng);
    const double ny = X.norm(y);
    for (std::size_t i = 0; i < Nn; ++i) norms[i] = target_norm(Y, Vec(Fp[i] * y));
    r.T_norm = std::max(r.T_norm, nu_norm(nu.weights, norms, std::numeric_limits<double>::infinity()) / ny);
    r.certificate_min = std::min(r.certificate_min, r.D * nu_norm(nu.weights, norms, 1.0) / ny);
  }
  r.certificate_slack = r.ST_minus_J + r.J_slack;
  r.certificate_ok = r.certificate_min >= r.certificate_target;
  return r;
}

DivergenceCheck divergence_check(const NormedSpace& U, const TestMap& g, int per_axis, std::size_t sphere) {
  const int n = U.dim();
  auto average = [&](int k) {
    const std::vector<Vec> nodes = ball_nodes(U, 1.0, k);
    Mat sum = Mat::Zero(g.out_dim, n);
    for (const Vec& u : nodes) sum += g.jac(u);
    return Mat(sum / static_cast<double>(nodes.size()));
  };
  const Mat fine = average(per_axis);
  const Mat coarse = average(per_axis / 2 | 1);
  DivergenceCheck c;
  c.lhs = rows_dual_norm(U, fine);
  c.tolerance = rows_dual_norm(U, Mat(fine - coarse));

  Rng rng(17);
  Vec u(n);
  for (std::size_t s = 0; s < sphere; ++s) {
    if (n == 2) {
      const double a = 2.0 * kPi * (static_cast<double>(s) + 0.5) / static_cast<double>(sphere);
      u << std::cos(a), std::sin(a);
      u /= U.norm(u);
    } else {
      u = sample_sphere(U, rng);
    }
    c.sup_sphere = std::max(c.sup_sphere, g.g(u).lpNorm<Eigen::Infinity>());
  }
  c.rhs = n * c.sup_sphere;
  c.ok = c.lhs <= c.rhs + c.tolerance;
  return c;
}

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }
Vec v1(double a) { return (Vec(1) << a).finished(); }
Vec v3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }
Mat m12(double a, double b) { return (Mat(1, 2) << a, b).finished(); }
Mat m22(double a, double b, double c, double d) { return (Mat(2, 2) << a, b, c, d).finished(); }

}  // namespace

std::vector<TestMap> divergence_suite() {
  std::vector<TestMap> s;
  auto add = [&](std::string name, int k, std::function<Vec(const Vec&)> g, std::function<Mat(const Vec&)> j) {
    s.push_back({std::move(name), k, std::move(g), std::move(j)});
  };
  add("identity", 2, [](const Vec& u) { return u; }, [](const Vec&) { return Mat(Mat::Identity(2, 2)); });
  add("shear", 2, [](const Vec& u) { return v2(u[0] + 2.0 * u[1], -u[1]); },
      [](const Vec&) { return m22(1, 2, 0, -1); });
  add("functional", 1, [](const Vec& u) { return v1(3.0 * u[0] - u[1]); }, [](const Vec&) { return m12(3, -1); });
  add("constant", 2, [](const Vec&) { return v2(1.5, -0.5); }, [](const Vec&) { return Mat(Mat::Zero(2, 2)); });
  add("cubic-radial", 2, [](const Vec& u) { return Vec(u * u.squaredNorm()); },
      [](const Vec& u) {
        const double q = u.squaredNorm();
        return m22(q + 2 * u[0] * u[0], 2 * u[0] * u[1], 2 * u[0] * u[1], q + 2 * u[1] * u[1]);
      });
  add("squares", 2, [](const Vec& u) { return v2(u[0] * u[0], u[1] * u[1]); },
      [](const Vec& u) { return m22(2 * u[0], 0, 0, 2 * u[1]); });
  add("product", 1, [](const Vec& u) { return v1(u[0] * u[1]); }, [](const Vec& u) { return m12(u[1], u[0]); });
  add("trig", 2, [](const Vec& u) { return v2(std::sin(3 * u[0]), std::cos(2 * u[1])); },
      [](const Vec& u) { return m22(3 * std::cos(3 * u[0]), 0, 0, -2 * std::sin(2 * u[1])); });
  add("exp", 1, [](const Vec& u) { return v1(std::exp(u[0] + u[1])); },
      [](const Vec& u) {
        const double e = std::exp(u[0] + u[1]);
        return m12(e, e);
      });
  add("harmonic-cubic", 1, [](const Vec& u) { return v1(u[0] * u[0] * u[0] - 3 * u[0] * u[1] * u[1]); },
      [](const Vec& u) { return m12(3 * u[0] * u[0] - 3 * u[1] * u[1], -6 * u[0] * u[1]); });
  add("sin-cos", 2, [](const Vec& u) { return v2(std::sin(u[0]) * std::cos(u[1]), u[1]); },
      [](const Vec& u) {
        return m22(std::cos(u[0]) * std::cos(u[1]), -std::sin(u[0]) * std::sin(u[1]), 0, 1);
      });
  add("log", 1, [](const Vec& u) { return v1(std::log(2 + u[0]) + u[1] * u[1]); },
      [](const Vec& u) { return m12(1 / (2 + u[0]), 2 * u[1]); });
  add("tanh", 2, [](const Vec& u) { return v2(std::tanh(u[0] - u[1]), std::tanh(2 * u[1])); },
      [](const Vec& u) {
        const double a = 1 - std::pow(std::tanh(u[0] - u[1]), 2);
        const double b = 2 * (1 - std::pow(std::tanh(2 * u[1]), 2));
        return m22(a, -a, 0, b);
      });
  add("twist", 2, [](const Vec& u) { return v2(u[0] + std::sin(u[1]), u[1] + std::sin(u[0])); },
      [](const Vec& u) { return m22(1, std::cos(u[1]), std::cos(u[0]), 1); });
  add("norm-cubed", 1, [](const Vec& u) { return v1(std::pow(u.norm(), 3)); },
      [](const Vec& u) {
        const double r = u.norm();
        return m12(3 * r * u[0], 3 * r * u[1]);
      });
  add("cos-product", 1, [](const Vec& u) { return v1(std::cos(u[0] * u[1])); },
      [](const Vec& u) {
        const double s = -std::sin(u[0] * u[1]);
        return m12(s * u[1], s * u[0]);
      });
  add("rational", 1, [](const Vec& u) { return v1(u[0] / (1 + u[1] * u[1])); },
      [](const Vec& u) {
        const double q = 1 + u[1] * u[1];
        return m12(1 / q, -2 * u[0] * u[1] / (q * q));
      });
  add("gaussian", 1, [](const Vec& u) { return v1(std::exp(-u.squaredNorm())); },
      [](const Vec& u) {
        const double e = -2 * std::exp(-u.squaredNorm());
        return m12(e * u[0], e * u[1]);
      });
  add("quartic", 2,
      [](const Vec& u) { return v2(std::pow(u[0], 4) - std::pow(u[1], 4), u[0] * std::pow(u[1], 3)); },
      [](const Vec& u) {
        return m22(4 * std::pow(u[0], 3), -4 * std::pow(u[1], 3), std::pow(u[1], 3), 3 * u[0] * u[1] * u[1]);
      });
  add("mixed", 3,
      [](const Vec& u) {
        return v3(std::sqrt(1 + u[0] * u[0] + 2 * u[1] * u[1]), std::atan(u[0] - u[1]), u[0] * u[1]);
      },
      [](const Vec& u) {
        const double q = std::sqrt(1 + u[0] * u[0] + 2 * u[1] * u[1]);
        const double d = 1 / (1 + (u[0] - u[1]) * (u[0] - u[1]));
        Mat j(3, 2);
        j << u[0] / q, 2 * u[1] / q, d, -d, u[1], u[0];
        return j;
      });
  return s;
}

ConeCheck cone_volume_check(const Vec& half_widths, const Vec& y_in, int grid) {
  const auto n = half_widths.size();
  if (n < 2 || n > 3) throw Error("invalid-argument", "cone check supports boxes in 2 or 3 dimensions");
  if (y_in.size() != n || y_in.norm() == 0.0) throw Error("invalid-argument", "y must be a nonzero vector of matching size");
  Vec w = half_widths;
  w /= std::pow((2.0 * w).prod(), 1.0 / static_cast<double>(n));
  const Vec y = y_in.normalized();
  const double ny = (y.array().abs() / w.array()).maxCoeff();
  ConeCheck c;
  if (n == 2) {
    const Vec v = v2(-y[1], y[0]);
    double len = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 2; ++i)
      if (v[i] != 0.0) len = std::min(len, w[i] / std::abs(v[i]));
    c.section = 2.0 * len;
  } else {
    // Plane y.p = 0 against the twelve box edges, then the shoelace area.
    Vec e1 = (std::abs(y[0]) < 0.9 ? Vec(Vec::Unit(3, 0)) : Vec(Vec::Unit(3, 1)));
    e1 = (e1 - e1.dot(y) * y).normalized();
    const Vec e2 = v3(y[1] * e1[2] - y[2] * e1[1], y[2] * e1[0] - y[0] * e1[2], y[0] * e1[1] - y[1] * e1[0]);
    std::vector<std::pair<double, Vec>> pts;
    for (int axis = 0; axis < 3; ++axis) {
      const int a = (axis + 1) % 3;
      const int b = (axis + 2) % 3;
      for (int sa = -1; sa <= 1; sa += 2) {
        for (int sb = -1; sb <= 1; sb += 2) {
          Vec p = Vec::Zero(3);
          p[a] = sa * w[a];
          p[b] = sb * w[b];
          if (y[axis] == 0.0) continue;
          p[axis] = -(y[a] * p[a] + y[b] * p[b]) / y[axis];
          if (std::abs(p[axis]) > w[axis] * (1.0 + 1e-12)) continue;
          const Vec q = v2(p.dot(e1), p.dot(e2));
          pts.emplace_back(std::atan2(q[1], q[0]), q);
        }
      }
    }
    std::sort(pts.begin(), pts.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
    double area = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Vec& p = pts[i].second;
      const Vec& q = pts[(i + 1) % pts.size()].second;
      area += p[0] * q[1] - p[1] * q[0];
    }
    c.section = 0.5 * std::abs(area);
  }
  c.formula = c.section / (static_cast<double>(n) * ny);

  const Vec apex = y / ny;
  const double apex_y = 1.0 / ny;
  auto count = [&](int k) {
    const double cell = (2.0 * w / k).prod();
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    Vec p(n);
    long long hits = 0;
    while (true) {
      for (Eigen::Index i = 0; i < n; ++i) p[i] = w[i] * (-1.0 + (2.0 * idx[static_cast<std::size_t>(i)] + 1.0) / k);
      const double lam = p.dot(y) / apex_y;
      if (lam >= 0.0 && lam < 1.0) {
        const Vec b = (p - lam * apex) / (1.0 - lam);
        if ((b.array().abs() <= w.array()).all()) ++hits;
      }
      Eigen::Index i = 0;
      while (i < n && idx[static_cast<std::size_t>(i)] == k - 1) idx[static_cast<std::size_t>(i++)] = 0;
      if (i == n) break;
      ++idx[static_cast<std::size_t>(i)];
    }
    return static_cast<double>(hits) * cell;
  };
  c.hull_volume = count(grid);
  c.hull_error = std::abs(c.hull_volume - count(grid / 2));
  return c;
}

}  // namespace lipnet
