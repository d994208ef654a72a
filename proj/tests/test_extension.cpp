#include "lipnet/extension.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace lipnet;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Net hand_net(const SpacePtr& x, double delta, std::vector<Vec> pts) {
  Net net;
  net.space = x;
  net.delta = delta;
  net.points = std::move(pts);
  return net;
}

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

double chi(double t) {
  if (t <= 1) return 1;
  if (t >= 2) return 0;
  return 1 - 3 * (t - 1) * (t - 1) + 2 * std::pow(t - 1, 3);
}

ExtensionOptions loose() {
  ExtensionOptions o;
  o.enforce_hypothesis = false;
  return o;
}

}  // namespace

TEST(NetMap, RejectsNonBiLipschitz) {
  auto x = make_space(2, NormSpec::lp_norm(2));
  Net net = hand_net(x, 0.5, {v2(0, 0), v2(0.5, 0)});
  Mat vals(2, 1);
  vals << 0.0, 0.9;  // expansion 1.8
  try {
    NetMap m(net, vals, 2.0, TargetNorm::l2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "not-bi-lipschitz");
  }
  vals << 0.0, 0.1;  // contraction 5 > D
  EXPECT_THROW(NetMap(net, vals, 2.0, TargetNorm::l2), Error);
  EXPECT_NO_THROW(NetMap(net, vals, 5.0, TargetNorm::l2));
}

TEST(NetMap, TranslatesFirstPointToOrigin) {
  auto x = make_space(2, NormSpec::lp_norm(2));
  Net net = hand_net(x, 0.5, {v2(0, 0), v2(0.5, 0), v2(0, 0.5)});
  Mat vals(3, 2);
  vals << 3, 3, 3.5, 3, 3, 3.5;
  NetMap m(net, vals, 1.0, TargetNorm::l2);
  EXPECT_EQ(m.values().row(0).norm(), 0.0);
  EXPECT_NEAR(m.values()(1, 0), 0.5, 1e-15);
  EXPECT_NEAR(m.translation()[0], 3.0, 0);
  EXPECT_LE(m.max_value_norm(), 2.0);
}

TEST(NetMap, MeasuredDistortion) {
  auto x = make_space(2, NormSpec::lp_norm(INFINITY));
  Net net = greedy_net(x, 0.25, 1);
  auto m = make_net_map(net, [](const Vec& p) { return Vec(p / 2.0); }, TargetNorm::linf);
  EXPECT_NEAR(m->D(), 2.0, 1e-9);
}

TEST(Partition, SinglePointAtCentre) {
  auto x = make_space(2, NormSpec::lp_norm(INFINITY));
  Net net = greedy_net(x, 2.0, 1);
  auto m = std::make_shared<const NetMap>(net, Mat::Zero(1, 1), 1.0, TargetNorm::l2);
  AlmostExtension ext(m, 0.5, loose());
  auto bumps = ext.partition(Vec::Zero(2));
  ASSERT_EQ(bumps.size(), 1u);
  EXPECT_EQ(bumps[0].phi, 1.0);
}

TEST(Partition, VanishesAwayFromNet) {
  auto x = make_space(2, NormSpec::lp_norm(2));
  Net net = greedy_net(x, 0.2, 3);
  auto m = make_net_map(net, [](const Vec& p) { return p; }, TargetNorm::l2);
  AlmostExtension ext(m, 0.9, loose());
  // Every net point lies in B_X, so |x - p| >= 1.4 - 1 >= 2 delta.
  EXPECT_TRUE(ext.partition(v2(1.4, 0.0)).empty());
  EXPECT_TRUE(ext.partition(v2(-1.0, -1.0)).empty());
}

TEST(Partition, TwoPointProductFormula) {
  auto x = make_space(2, NormSpec::lp_norm(2));
  const double d = 0.1;
  Net net = hand_net(x, d, {v2(0, 0), v2(0.15, 0)});
  Mat vals(2, 1);
  vals << 0, 0.15;
  auto m = std::make_shared<const NetMap>(net, vals, 1.0, TargetNorm::l2);
  AlmostExtension ext(m, 0.9, loose());
  const Vec q = v2(0.11, 0.05);
  const double psi1 = chi(q.norm() / d);
  const double psi2 = chi((q - v2(0.15, 0)).norm() / d);
  ASSERT_LT(psi1, 1.0);
  ASSERT_GT(psi2, 0.0);
  auto bumps = ext.partition(q);
  ASSERT_EQ(bumps.size(), 2u);
  EXPECT_NEAR(bumps[0].phi, psi1, 1e-15);
  EXPECT_NEAR(bumps[1].phi, psi2 * (1 - psi1), 1e-15);
  // Inside the ball of the first point the pair sums to one.
  const Vec r = v2(0.09, 0.0);
  auto b2 = ext.partition(r);
  ASSERT_EQ(b2.size(), 2u);
  EXPECT_NEAR(b2[0].phi + b2[1].phi, 1.0, 1e-15);
  EXPECT_NEAR(b2[1].phi, b2[1].psi * (1 - b2[0].psi), 1e-15);
}

class PartitionSum : public ::testing::TestWithParam<double> {};

TEST_P(PartitionSum, SumsToOneOnBall) {
  auto x = make_space(2, NormSpec::lp_norm(GetParam()));
  Net net = greedy_net(x, 0.1, 5);
  auto m = make_net_map(net, [](const Vec& p) { return Vec(p / std::sqrt(2.0)); }, TargetNorm::l2);
  AlmostExtension ext(m, 0.9, loose());
  Rng rng(17);
  for (int k = 0; k < 5000; ++k) {
    const Vec q = sample_ball(*x, rng);
    double s = 0;
    for (const auto& b : ext.partition(q)) {
      EXPECT_GE(b.phi, 0.0);
      EXPECT_LE(b.phi, 1.0);
      EXPECT_LT(x->distance(q.data(), net.points[static_cast<std::size_t>(b.index)].data()), 2 * net.delta);
      s += b.phi;
    }
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
}

INSTANTIATE_TEST_SUITE_P(Norms, PartitionSum, ::testing::Values(1.0, 2.0, kInf));

TEST(CutoffMap, VanishesOnDoubleSphere) {
  auto x = make_space(2, NormSpec::lp_norm(2));
  Net net = greedy_net(x, 0.1, 5);
  auto m = make_net_map(net, [](const Vec& p) { return Vec(p * 0.5); }, TargetNorm::l2);
  AlmostExtension ext(m, 0.9, loose());
  EXPECT_EQ(ext.h(v2(2.0, 0.0)).norm(), 0.0);
  EXPECT_EQ(ext.h(v2(0.0, -2.0)).norm(), 0.0);
  EXPECT_EQ(ext.h(v2(3.0, 1.0)).norm(), 0.0);
}

TEST(CutoffMap, IsolatedNetPointReproducesValue) {
  auto x = make_space(2, NormSpec::lp_norm(2));
  Net net = hand_net(x, 0.3, {v2(0, 0), v2(0.9, 0)});
  Mat vals(2, 2);
  vals << 0.1, 0.2, 0.1, 1.0;
  auto m = std::make_shared<const NetMap>(net, vals, 2.0, TargetNorm::l2);
  AlmostExtension ext(m, 0.9, loose());
  const Vec hv = ext.h(v2(0.9, 0));
  EXPECT_NEAR(hv[0], 0.0, 1e-15);
  EXPECT_NEAR(hv[1], 0.8, 1e-15);
}

TEST(CutoffMap, RadialScaling) {
  auto x = make_space(2, NormSpec::lp_norm(INFINITY));
  Net net = greedy_net(x, 0.1, 5);
  auto m = make_net_map(net, [](const Vec& p) { return Vec(0.7 * p); }, TargetNorm::linf);
  AlmostExtension ext(m, 0.9, loose());
  const Vec q = v2(1.5, -0.6);
  ASSERT_NEAR(x->norm(q), 1.5, 1e-15);
  const Vec expect = 0.5 * ext.g(Vec(q / 1.5));
  EXPECT_LE((ext.h(q) - expect).norm(), 1e-14);
}

TEST(CutoffMap, IntermediateBounds) {
  auto x = make_space(2, NormSpec::lp_norm(INFINITY));
  Net net = greedy_net(x, 0.05, 2);
  auto m = make_net_map(net, [](const Vec& p) {
    Vec y(3);
    y << p[0], p[1], 0.3 * std::sin(p[0] + p[1]);
    return y;
  }, TargetNorm::linf);
  AlmostExtension ext(m, 0.9, loose());
  const double d = net.delta;
  Rng rng(3);
  for (int k = 0; k < 10000; ++k) {
    const Vec a = sample_ball(*x, rng, 2.5);
    const Vec b = sample_ball(*x, rng, 2.5);
    const double dx = x->distance(a.data(), b.data());
    const double dy = (ext.h(a) - ext.h(b)).lpNorm<Eigen::Infinity>();
    const bool ina = x->norm(a) <= 1;
    const bool inb = x->norm(b) <= 1;
    if (ina && inb) {
      EXPECT_LE(dy, dx + 4 * d + 1e-12);
    } else {
      EXPECT_LE(dy, 4 * (dx + d) + 1e-12);
    }
  }
}

TEST(AlmostExtension, HypothesisGate) {
  auto x = make_space(2, NormSpec::lp_norm(2));
  Net net = greedy_net(x, 0.05, 1);
  auto m = make_net_map(net, [](const Vec& p) { return p; }, TargetNorm::l2);
  try {
    AlmostExtension ext(m, 0.3);  // eps/(4n) = 0.0375 < delta
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "hypothesis-violated");
  }
  EXPECT_NO_THROW(AlmostExtension(m, 0.45));
}

TEST(AlmostExtension, ConstantMap) {
  auto x = make_space(2, NormSpec::lp_norm(2));
  Net net = greedy_net(x, 0.02, 1);
  Mat vals = Mat::Constant(static_cast<Eigen::Index>(net.size()), 2, 0.7);
  auto m = std::make_shared<const NetMap>(net, vals, kInf, TargetNorm::l2);
  AlmostExtension ext(m, 0.3);
  // After translation the map is identically zero.
  EXPECT_EQ(ext.F(v2(0.1, -0.2)).norm(), 0.0);
  EXPECT_EQ((ext.F(v2(0.3, 0.1)) + m->translation() - Vec::Constant(2, 0.7)).norm(), 0.0);
}

TEST(AlmostExtension, SupportOutsideExpandedBall) {
  auto x = make_space(2, NormSpec::lp_norm(1));
  Net net = greedy_net(x, 0.03, 1);
  auto m = make_net_map(net, [](const Vec& p) { return Vec(p / std::sqrt(2.0)); }, TargetNorm::l2);
  AlmostExtension ext(m, 0.3);
  Rng rng(1);
  for (int k = 0; k < 200; ++k) {
    const Vec s = sample_sphere(*x, rng);
    EXPECT_EQ(ext.F(Vec((2.0 + ext.tau() + 1e-9) * s)).norm(), 0.0);
  }
}

class LinearOracle : public ::testing::TestWithParam<double> {};

TEST_P(LinearOracle, NetDeviation) {
  auto x = make_space(2, NormSpec::lp_norm(GetParam()));
  Net net = greedy_net(x, 0.03, 11);
  Mat L(2, 2);
  L << 0.6, 0.2, -0.1, 0.5;
  const double opnorm = [&] {
    double best = 0;
    for (int k = 0; k < 4000; ++k) {
      const double th = 2 * M_PI * k / 4000.0;
      const Vec u = v2(std::cos(th), std::sin(th));
      best = std::max(best, (L * u).norm() / x->norm(u));
    }
    return best;
  }();
  const Mat Ls = L / (opnorm * 1.01);
  auto m = make_net_map(net, [&](const Vec& p) { return Vec(Ls * p); }, TargetNorm::l2);
  AlmostExtension ext(m, 0.3);
  const double bound = 9 * 2 * net.delta / 0.3;
  for (std::size_t i = 0; i < net.size(); i += 7) {
    EXPECT_LE((ext.F(net.points[i]) - Ls * net.points[i]).norm(), bound);
  }
}

INSTANTIATE_TEST_SUITE_P(Norms, LinearOracle, ::testing::Values(2.0, kInf));

TEST(AlmostExtension, DerivativeMatchesFiniteDifferences) {
  auto x = make_space(2, NormSpec::lp_norm(2));
  Net net = greedy_net(x, 0.03, 4);
  auto m = make_net_map(net, [](const Vec& p) {
    Vec y(2);
    y << std::sin(p[0]) * 0.8, 0.5 * p[1] + 0.2 * p[0] * p[0];
    return y;
  }, TargetNorm::l2);
  AlmostExtension ext(m, 0.3);
  Rng rng(8);
  for (int k = 0; k < 10; ++k) {
    const Vec q = sample_ball(*x, rng, 0.5);
    const Mat J = ext.F_jacobian(q);
    const double hstep = 1e-6;
    for (int a = 0; a < 2; ++a) {
      const Vec e = Vec::Unit(2, a) * hstep;
      const Vec fd = (ext.F(Vec(q + e)) - ext.F(Vec(q - e))) / (2 * hstep);
      EXPECT_LE((fd - J.col(a)).norm(), 1e-2 * std::max(1.0, J.col(a).norm()));
    }
  }
}

TEST(Begun, LinearMapUnchanged) {
  auto x = make_space(2, NormSpec::lp_norm(2));
  Mat L(1, 2);
  L << 0.3, -0.4;
  auto lin = [&](const Vec& p) { return Vec(L * p); };
  auto in_ball = [&](Rng& r) { return sample_ball(*x, r); };
  auto rep = begun_average(*x, TargetNorm::l2, lin, 0.5, 0.0, 0.1, in_ball, in_ball, 2000, 2000, 1, 21);
  EXPECT_TRUE(rep.hypothesis_ok);
  EXPECT_NEAR(rep.sampled_lipschitz, 0.5, 1e-6);
  EXPECT_DOUBLE_EQ(rep.bound, 0.5);
}

TEST(Begun, EuclideanNormAveraged) {
  auto x = make_space(2, NormSpec::lp_norm(2));
  auto fn = [](const Vec& p) { return Vec::Constant(1, p.norm()); };
  auto dom = [&](Rng& r) { return sample_ball(*x, r, 1.2); };
  auto k = [&](Rng& r) { return sample_ball(*x, r); };
  auto rep = begun_average(*x, TargetNorm::l2, fn, 1.0, 0.0, 0.2, dom, k, 5000, 5000, 2, 41);
  EXPECT_TRUE(rep.hypothesis_ok);
  EXPECT_LE(rep.sampled_lipschitz, 1.0 + 1e-3);
}

TEST(Begun, CutoffMapCertificate) {
  auto x = make_space(2, NormSpec::lp_norm(INFINITY));
  Net net = greedy_net(x, 0.03, 3);
  auto m = make_net_map(net, [](const Vec& p) {
    Vec y(3);
    y << p[0], p[1], 0.3 * std::sin(p[0] + p[1]);
    return y;
  }, TargetNorm::linf);
  const double eps = 0.3;
  AlmostExtension ext(m, eps);
  auto h = [&](const Vec& p) { return ext.h(p); };
  auto dom = [&](Rng& r) { return sample_ball(*x, r, 3.0); };
  auto rep = begun_average(*x, TargetNorm::linf, h, 4.0, net.delta, ext.tau(), dom, dom, 3000, 300, 4);
  EXPECT_TRUE(rep.hypothesis_ok);
  // L (1 + n eta / (2 tau)) with eta = delta and tau = 2 n delta / eps.
  EXPECT_NEAR(rep.bound, 4 * (1 + eps / 4), 1e-12);
  EXPECT_LE(rep.bound, 4 * (1 + eps / 2));
  EXPECT_LE(rep.sampled_lipschitz, rep.bound * (1 + 1e-3));
}

TEST(Begun, ReportsViolation) {
  auto x = make_space(1, NormSpec::lp_norm(2));
  auto step = [](const Vec& p) { return Vec::Constant(1, p[0] > 0 ? 1.0 : 0.0); };
  auto dom = [&](Rng& r) { return sample_ball(*x, r); };
  auto rep = begun_average(*x, TargetNorm::l2, step, 1.0, 0.1, 0.2, dom, dom, 2000, 10, 5);
  EXPECT_FALSE(rep.hypothesis_ok);
  ASSERT_EQ(rep.violation_x.size(), 1);
  EXPECT_LT(rep.violation_x[0] * rep.violation_y[0], 0.0);
}

TEST(Bullets, SmallRun) {
  auto x = make_space(2, NormSpec::lp_norm(2));
  Net net = greedy_net(x, 0.03, 6);
  auto m = make_net_map(net, [](const Vec& p) { return Vec(0.9 * p); }, TargetNorm::l2);
  AlmostExtension ext(m, 0.3);
  auto rep = check_bullets(ext, 500, 2);
  EXPECT_TRUE(rep.ok());
  EXPECT_LE(rep.inner_lipschitz, 1.3);
}
