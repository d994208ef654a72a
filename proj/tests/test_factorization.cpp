#include "lipnet/factorization.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace lipnet;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ExtensionOptions desk() {
  ExtensionOptions o;
  o.enforce_hypothesis = false;
  return o;
}

NetMapPtr two_point_map(const SpacePtr& x, const Vec& a, const Vec& b, double scale) {
  Net net;
  net.space = x;
  net.delta = 0.5;
  net.points = {a, b};
  return make_net_map(net, [scale](const Vec& p) { return Vec(scale * p); }, TargetNorm::l2);
}

// One shared factorization run of the identity on l2^2 (delta 0.05, eps 0.5).
const FactorizationReport& identity_report() {
  static const FactorizationReport r = [] {
    auto x = make_space(2, NormSpec::lp_norm(2));
    auto m = make_net_map(greedy_net(x, 0.05, 1), [](const Vec& p) { return p; }, TargetNorm::l2);
    AlmostExtension ext(m, 0.5, desk());
    FactorizationOptions o;
    o.samples = 400;
    o.y_samples = 200;
    return factorize(ext, o);
  }();
  return r;
}

}  // namespace

TEST(CoordinateEmbedding, RowsAreDualUnitAndSlackSmall) {
  auto x = make_space(2, NormSpec::lp_norm(2));
  const CoordinateEmbedding J = coordinate_embedding(x, 0.1);
  for (Eigen::Index k = 0; k < J.rows.rows(); ++k) EXPECT_NEAR(x->dual_norm(Vec(J.rows.row(k).transpose())), 1.0, 1e-9);
  EXPECT_LT(J.slack, 0.01);
  auto box = make_space(2, NormSpec::lp_norm(INFINITY));
  const CoordinateEmbedding Jb = coordinate_embedding(box, 0.1);
  EXPECT_EQ(Jb.rows.rows(), 4);
  EXPECT_NEAR(Jb.slack, 0.0, 1e-12);
}

TEST(McShane, SinglePointIsACone) {
  auto x = make_space(2, NormSpec::lp_norm(2));
  Net net = greedy_net(x, 2.0, 1);
  ASSERT_EQ(net.size(), 1u);
  Net one = net;
  auto m = std::make_shared<const NetMap>(one, Mat(Mat::Zero(1, 2)), 1.5, TargetNorm::l2);
  const McShaneExtension G(m, coordinate_embedding(x, 0.2));
  const Vec jp = G.J().apply(net.points[0]);
  Rng rng(3);
  for (int s = 0; s < 50; ++s) {
    const Vec z = (Vec(2) << rng.uniform(-2, 2), rng.uniform(-2, 2)).finished();
    const Vec expect = (jp.array() + 1.5 * z.norm()).matrix();
    EXPECT_LT((G.G(z) - expect).lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

TEST(McShane, InterpolatesExactlyAtNetPoints) {
  auto x = make_space(2, NormSpec::lp_norm(INFINITY));
  auto m = make_net_map(greedy_net(x, 0.2, 2), [](const Vec& p) { return Vec(p * 0.8); }, TargetNorm::linf);
  const McShaneExtension G(m, coordinate_embedding(x, 0.1));
  for (std::size_t i = 0; i < m->net().size(); ++i) {
    const Vec z = m->values().row(static_cast<Eigen::Index>(i)).transpose();
    EXPECT_EQ((G.G(z) - G.J().apply(m->net().points[i])).lpNorm<Eigen::Infinity>(), 0.0) << i;
  }
}

TEST(McShane, TwoPointsMatchBruteForceOnSegment) {
  auto x = make_space(2, NormSpec::lp_norm(2));
  const Vec a = (Vec(2) << 0.5, 0.1).finished();
  const Vec b = (Vec(2) << -0.3, 0.4).finished();
  auto m = two_point_map(x, a, b, 0.7);
  const McShaneExtension G(m, coordinate_embedding(x, 0.2));
  const Vec fa = m->values().row(0).transpose();
  const Vec fb = m->values().row(1).transpose();
  const Vec ja = G.J().apply(a);
  const Vec jb = G.J().apply(b);
  for (int s = 0; s <= 20; ++s) {
    const Vec z = fa + (fb - fa) * (s / 20.0);
    const Vec ca = (ja.array() + m->D() * (z - fa).norm()).matrix();
    const Vec cb = (jb.array() + m->D() * (z - fb).norm()).matrix();
    EXPECT_LT((G.G(z) - ca.cwiseMin(cb)).lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

TEST(McShane, LipschitzWithConstantD) {
  auto x = make_space(2, NormSpec::lp_norm(1));
  const double s = x->john_scale();
  // l1 is isometric to l_inf through (p0 + p1, p0 - p1); the second coordinate is contracted.
  auto m = make_net_map(greedy_net(x, 0.25, 4),
                        [s](const Vec& p) { return Vec((Vec(2) << s * (p[0] + p[1]), 0.6 * s * (p[0] - p[1])).finished()); },
                        TargetNorm::linf);
  ASSERT_NEAR(m->D(), 1.0 / 0.6, 1e-9);
  const McShaneExtension G(m, coordinate_embedding(x, 0.1));
  Rng rng(8);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const Vec z1 = (Vec(2) << rng.uniform(-2, 2), rng.uniform(-2, 2)).finished();
    const double r = std::pow(10.0, rng.uniform(-4, 0));
    const Vec z2 = z1 + (Vec(2) << rng.uniform(-r, r), rng.uniform(-r, r)).finished();
    worst = std::max(worst, (G.G(z1) - G.G(z2)).lpNorm<Eigen::Infinity>() / (z1 - z2).lpNorm<Eigen::Infinity>());
  }
  EXPECT_LE(worst, m->D() * (1.0 + 1e-6));
}

TEST(McShane, InfiniteDRejected) {
  auto x = make_space(2, NormSpec::lp_norm(2));
  auto m = make_net_map(greedy_net(x, 0.5, 1), [](const Vec&) { return Vec(Vec::Zero(1)); }, TargetNorm::l2);
  ASSERT_TRUE(std::isinf(m->D()));
  try {
    McShaneExtension G(m, coordinate_embedding(x, 0.2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "invalid-argument");
  }
}

TEST(Mollifier, ExactOnLinearPiece) {
  auto x = make_space(2, NormSpec::lp_norm(INFINITY));
  Net net = greedy_net(x, 2.0, 1);
  auto m = std::make_shared<const NetMap>(net, Mat(Mat::Zero(1, 2)), 1.0, TargetNorm::linf);
  const McShaneExtension G(m, coordinate_embedding(x, 0.2));
  const Mollified H(G, 0.2, 7);
  // |z|_inf = z_0 on the whole 0.2-ball around (1, 0.1), so G is affine there.
  const Vec z = (Vec(2) << 1.0, 0.1).finished();
  EXPECT_LT((H.H(z) - G.G(z)).lpNorm<Eigen::Infinity>(), 1e-12);
  const Mat jac = H.H_jacobian(z);
  for (Eigen::Index k = 0; k < jac.rows(); ++k) {
    EXPECT_NEAR(jac(k, 0), 1.0, 1e-6);
    EXPECT_NEAR(jac(k, 1), 0.0, 1e-6);
  }
}

TEST(Mollifier, ConvergesAsRadiusShrinks) {
  auto x = make_space(2, NormSpec::lp_norm(2));
  auto m = make_net_map(greedy_net(x, 0.3, 5), [](const Vec& p) { return p; }, TargetNorm::l2);
  const McShaneExtension G(m, coordinate_embedding(x, 0.2));
  double prev = kInf;
  for (double r : {0.2, 0.05, 0.0125, 0.0}) {
    const Mollified H(G, r, 7);
    double dev = 0.0;
    Rng local(6);
    for (int s = 0; s < 100; ++s) {
      const Vec z = sample_ball(*x, local);
      dev = std::max(dev, (H.H(z) - G.G(z)).lpNorm<Eigen::Infinity>());
    }
    EXPECT_LE(dev, G.D() * r + 1e-12);
    EXPECT_LE(dev, prev + 1e-12);
    prev = dev;
  }
  EXPECT_EQ(prev, 0.0);
}

TEST(Mollifier, HighDimensionalNodesAreSymmetric) {
  auto x = make_space(2, NormSpec::lp_norm(2));
  auto m = make_net_map(greedy_net(x, 0.5, 1), [](const Vec& p) { return Vec((Vec(4) << p, 0.1 * p).finished()); },
                        TargetNorm::linf);
  const McShaneExtension G(m, coordinate_embedding(x, 0.3));
  const Mollified H(G, 0.1, 5);
  EXPECT_EQ(H.nodes() % 2, 0u);
  EXPECT_GT(H.nodes(), 50u);
}

TEST(AveragingOperator, ZeroAndConstantInputs) {
  AveragingOperator S;
  const Mat M = (Mat(3, 2) << 1, 2, -1, 0, 0.5, 0.5).finished();
  S.M = {M, M, M, M};
  S.weights = {0.1, 0.2, 0.3, 0.4};
  std::vector<Vec> zero(4, Vec::Zero(2));
  EXPECT_EQ(S.apply(zero).norm(), 0.0);
  const Vec v = (Vec(2) << 0.3, -0.7).finished();
  std::vector<Vec> constant(4, v);
  EXPECT_LT((S.apply(constant) - M * v).norm(), 1e-14);
  EXPECT_NEAR(S.norm(TargetNorm::linf), 3.0, 1e-14);
  EXPECT_NEAR(S.norm(TargetNorm::l2), std::sqrt(5.0), 1e-14);
}

TEST(NuNorm, WeightsSumToOneAndNormsAreMonotone) {
  auto x = make_space(2, NormSpec::lp_norm(1));
  const NuNodes nu = nu_nodes(*x, 9);
  double sum = 0.0;
  for (double w : nu.weights) sum += w;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  for (const Vec& p : nu.points) EXPECT_LE(x->norm(p), 0.5);
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(nu.points.size());
    for (double& e : v) e = rng.uniform(-1, 1) * std::pow(10.0, rng.uniform(-2, 2));
    double prev = 0.0;
    for (double p : {1.0, 1.5, 2.0, 4.0, 16.0, kInf}) {
      const double norm = nu_norm(nu.weights, v, p);
      EXPECT_GE(norm, prev * (1.0 - 1e-12));
      prev = norm;
    }
  }
}

TEST(Factorization, LinearOracleCertificate) {
  const FactorizationReport& r = identity_report();
  EXPECT_EQ(r.interpolation_error, 0.0);
  EXPECT_LE(r.G_lipschitz, r.D * (1.0 + 1e-6));
  EXPECT_LE(r.H_deviation, r.H_bound);
  EXPECT_LE(r.net_deviation, r.net_bound);
  EXPECT_LE(r.half_ball_deviation, r.half_ball_bound);
  EXPECT_LE(r.chain_rule_gap, 1e-2);
  EXPECT_LE(r.S_norm, r.D * (1.0 + 1e-3));
  EXPECT_LE(r.T_norm, r.T_bound);
  EXPECT_LE(r.ST_minus_J, r.ST_bound);
  EXPECT_LE(r.certificate_slack, 0.05);
  EXPECT_TRUE(r.certificate_ok);
  EXPECT_GE(r.certificate_min, 1.0 - r.certificate_slack);
  EXPECT_FALSE(r.delta_hypothesis);
}

TEST(Factorization, NonIsometricMapOnBox) {
  auto x = make_space(2, NormSpec::lp_norm(INFINITY));
  auto m = make_net_map(greedy_net(x, 0.05, 3),
                        [](const Vec& p) { return Vec((Vec(2) << p[0], p[1] / 1.5).finished()); }, TargetNorm::linf);
  ASSERT_NEAR(m->D(), 1.5, 1e-9);
  AlmostExtension ext(m, 0.5, desk());
  FactorizationOptions o;
  o.samples = 200;
  o.y_samples = 200;
  const FactorizationReport r = factorize(ext, o);
  EXPECT_EQ(r.interpolation_error, 0.0);
  EXPECT_LE(r.G_lipschitz, r.D * (1.0 + 1e-6));
  EXPECT_LE(r.net_deviation, r.net_bound);
  EXPECT_LE(r.half_ball_deviation, r.half_ball_bound);
  EXPECT_LE(r.chain_rule_gap, 1e-2);
  EXPECT_LE(r.S_norm, r.D * (1.0 + 1e-3));
  EXPECT_TRUE(r.certificate_ok);
}

TEST(DivergenceBound, SuiteAcrossPlanarNorms) {
  const auto suite = divergence_suite();
  ASSERT_EQ(suite.size(), 20u);
  for (double p : {2.0, kInf, 1.0}) {
    auto U = make_space(2, NormSpec::lp_norm(p));
    for (const TestMap& g : suite) {
      const DivergenceCheck c = divergence_check(*U, g);
      EXPECT_TRUE(c.ok) << g.name << " p=" << p << " lhs " << c.lhs << " rhs " << c.rhs;
      EXPECT_LT(c.tolerance, 1e-2) << g.name;
    }
  }
}

TEST(DivergenceBound, ClosedFormCases) {
  auto U = make_space(2, NormSpec::lp_norm(2));
  const auto suite = divergence_suite();
  auto find = [&](const std::string& name) {
    for (const TestMap& g : suite)
      if (g.name == name) return g;
    throw std::runtime_error(name);
  };
  // Linear: lhs is the operator norm, attained on the sphere.
  const DivergenceCheck lin = divergence_check(*U, find("functional"));
  EXPECT_NEAR(lin.lhs, std::sqrt(10.0), 1e-9);
  EXPECT_NEAR(lin.sup_sphere, std::sqrt(10.0), 1e-5);
  EXPECT_EQ(divergence_check(*U, find("constant")).lhs, 0.0);
  // u |u|^2: the polar average of |u|^2 I + 2 u u^T over the disc is I.
  const DivergenceCheck cub = divergence_check(*U, find("cubic-radial"));
  EXPECT_NEAR(cub.lhs, 1.0, 2e-3);
  EXPECT_NEAR(cub.rhs, 2.0, 1e-6);
}

TEST(DivergenceBound, ConeVolumeOnBoxes) {
  const ConeCheck sq = cone_volume_check((Vec(2) << 1, 1).finished(), (Vec(2) << 1, 0).finished());
  EXPECT_NEAR(sq.section, 1.0, 1e-12);
  EXPECT_NEAR(sq.formula, 0.25, 1e-12);
  EXPECT_NEAR(sq.hull_volume, 0.25, sq.hull_error + 1e-3);
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 2;
    Vec w(n);
    Vec y(n);
    for (int i = 0; i < n; ++i) {
      w[i] = rng.uniform(0.3, 2.0);
      y[i] = rng.normal();
    }
    const ConeCheck c = cone_volume_check(w, y, n == 2 ? 400 : 120);
    EXPECT_LE(c.formula, 0.5 + 1e-12);
    EXPECT_NEAR(c.hull_volume, c.formula, 2.0 * c.hull_error + 2e-3) << trial;
  }
  // A cube cut along its diagonal has a regular hexagonal section.
  const ConeCheck cube = cone_volume_check((Vec(3) << 1, 1, 1).finished(), (Vec(3) << 1, 1, 1).finished(), 120);
  const double side = std::sqrt(2.0) / 2.0;
  EXPECT_NEAR(cube.section, 1.5 * std::sqrt(3.0) * side * side, 1e-12);
}
