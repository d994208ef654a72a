#include "lipnet/finite_metric.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace lipnet;

namespace {

SpacePtr raw_l1(int n) { return make_space(n, NormSpec::lp_norm(1), Scaling::prescaled); }

Mat rows(std::initializer_list<std::initializer_list<double>> pts) {
  Mat m(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(pts.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& p : pts) {
    Eigen::Index j = 0;
    for (double v : p) m(i, j++) = v;
    ++i;
  }
  return m;
}

FiniteMetric random_three_point(Rng& rng) {
  // Any triple of positive sides obeying the triangle inequality.
  const double a = rng.uniform(0.1, 1.0);
  const double b = rng.uniform(0.1, 1.0);
  const double c = rng.uniform(std::abs(a - b) + 1e-3, a + b);
  Mat d = Mat::Zero(3, 3);
  d(0, 1) = d(1, 0) = a;
  d(1, 2) = d(2, 1) = b;
  d(0, 2) = d(2, 0) = c;
  return FiniteMetric(d);
}

}  // namespace

TEST(FiniteMetric, RejectsInvalidInputs) {
  Mat d = Mat::Zero(3, 3);
  d(0, 1) = d(1, 0) = 1.0;
  d(0, 2) = d(2, 0) = 1.0;
  try {
    FiniteMetric m(d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "degenerate-metric");
  }
  d(1, 2) = d(2, 1) = 3.0;
  EXPECT_THROW(FiniteMetric{d}, Error);
  d(1, 2) = 2.0;
  EXPECT_THROW(FiniteMetric{d}, Error);  // asymmetric
}

TEST(C1, FourCycleIsIsometric) {
  const FiniteMetric c4 = FiniteMetric::cycle(4);
  const DistortionCertificate c = c1_exact(c4);
  EXPECT_NEAR(c.value, 1.0, 1e-6);
  EXPECT_NEAR(c.witness_value, c.value, 1e-9);
  // The square's corners in the l1 plane realise the metric.
  const Mat sq = rows({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ((sq.row(i) - sq.row(j)).lpNorm<1>(), c4(i, j));
}

TEST(C1, ThreeAndTwoPointMetrics) {
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    const DistortionCertificate c = c1_exact(random_three_point(rng));
    EXPECT_NEAR(c.value, 1.0, 1e-9);
    EXPECT_NEAR(c.witness_value, 1.0, 1e-9);
  }
  Mat d = Mat::Zero(2, 2);
  d(0, 1) = d(1, 0) = 2.5;
  const DistortionCertificate c = c1_exact(FiniteMetric(d));
  EXPECT_NEAR(c.value, 1.0, 1e-12);
  ASSERT_EQ(c.cuts.size(), 1u);
  EXPECT_NEAR(c.cuts[0].weight, 2.5, 1e-12);
}

TEST(C1, BipartiteK23NeedsDistortion) {
  // K_{2,3}: the pentagonal inequality forces c1 >= 4/3.
  Mat d = Mat::Constant(5, 5, 2.0);
  for (int i = 0; i < 5; ++i) d(i, i) = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 2; b < 5; ++b) d(a, b) = d(b, a) = 1.0;
  const DistortionCertificate c = c1_exact(FiniteMetric(d));
  EXPECT_GE(c.value, 4.0 / 3.0 - 1e-9);
  EXPECT_NEAR(c.witness_value, c.value, 1e-8);
}

TEST(C1, WitnessReevaluatesOnRandomMetrics) {
  Rng rng(9);
  auto box = make_space(3, NormSpec::lp_norm(INFINITY), Scaling::prescaled);
  for (int t = 0; t < 5; ++t) {
    std::vector<Vec> pts;
    for (int i = 0; i < 6 + t; ++i) pts.push_back(sample_ball(*box, rng));
    const DistortionCertificate c = c1_exact(FiniteMetric::from_points(pts, *box));
    EXPECT_GE(c.value, 1.0 - 1e-9);
    EXPECT_NEAR(c.witness_value, c.value, 1e-7 * c.value);
  }
}

TEST(C1, CapAtTenPoints) {
  try {
    c1_exact(FiniteMetric::cycle(11));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "cap-exceeded");
  }
}

TEST(C2, FourCycleIsSqrtTwo) {
  const FiniteMetric c4 = FiniteMetric::cycle(4);
  const DistortionCertificate c = c2_exact(c4);
  EXPECT_NEAR(c.value, std::sqrt(2.0), 1e-3);
  EXPECT_EQ(c.method, "sdp");
  EXPECT_LE(c.lower_bound, c.value + 1e-12);
  EXPECT_NEAR(c.witness_value, c.value, 1e-12);
  // Audit the dual: PSD with zero row sums.
  Eigen::SelfAdjointEigenSolver<Mat> es(c.dual);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-9);
  EXPECT_LT((c.dual * Vec::Ones(4)).norm(), 1e-9);
  EXPECT_NEAR(c2_dual_bound(c4, c.dual), c.lower_bound, 1e-12);
  // The unit square is the extremal embedding.
  EXPECT_NEAR(embedding_distortion(c4, rows({{0, 0}, {1, 0}, {1, 1}, {0, 1}})), std::sqrt(2.0), 1e-12);
}

TEST(C2, EuclideanSimplexIsIsometric) {
  Mat d = Mat::Constant(5, 5, 1.7);
  for (int i = 0; i < 5; ++i) d(i, i) = 0.0;
  const DistortionCertificate c = c2_exact(FiniteMetric(d));
  EXPECT_NEAR(c.value, 1.0, 1e-9);
  Rng rng(2);
  auto e = make_space(3, NormSpec::lp_norm(2), Scaling::prescaled);
  std::vector<Vec> pts;
  for (int i = 0; i < 8; ++i) pts.push_back(sample_ball(*e, rng));
  EXPECT_NEAR(c2_exact(FiniteMetric::from_points(pts, *e)).value, 1.0, 1e-6);
}

TEST(C2, L1NetBelowAmbientDistortion) {
  auto x = raw_l1(2);
  const Net net = greedy_net(x, 0.25, 3);
  ASSERT_GT(net.size(), 12u);
  for (int offset = 0; offset < 3; ++offset) {
    std::vector<Vec> pts;
    for (std::size_t i = static_cast<std::size_t>(offset); pts.size() < 12; i += 3) pts.push_back(net.points[i % net.size()]);
    const DistortionCertificate c = c2_exact(FiniteMetric::from_points(pts, *x));
    EXPECT_LE(c.value, std::sqrt(2.0) + 1e-3);
    EXPECT_LE(c.lower_bound, c.value + 1e-12);
    EXPECT_EQ(c.method, c.gap <= c.tolerance ? "sdp" : "approximate");
  }
}

TEST(C2, MonotoneUnderRestriction) {
  Rng rng(5);
  auto box = make_space(2, NormSpec::lp_norm(INFINITY), Scaling::prescaled);
  std::vector<Vec> pts;
  for (int i = 0; i < 9; ++i) pts.push_back(sample_ball(*box, rng));
  const FiniteMetric d = FiniteMetric::from_points(pts, *box);
  const DistortionCertificate whole = c2_exact(d);
  for (int t = 0; t < 4; ++t) {
    std::vector<int> subset;
    for (int i = 0; i < 9; ++i)
      if (rng.uniform() < 0.6) subset.push_back(i);
    if (subset.size() < 3) continue;
    const FiniteMetric sub = d.restrict(subset);
    Mat images(static_cast<Eigen::Index>(subset.size()), whole.embedding.cols());
    for (std::size_t k = 0; k < subset.size(); ++k) images.row(static_cast<Eigen::Index>(k)) = whole.embedding.row(subset[k]);
    EXPECT_LE(embedding_distortion(sub, images), whole.value * (1.0 + 1e-12));
    EXPECT_LE(c2_exact(sub).value, whole.value + 1e-3);
  }
}

TEST(Snowflake, SmallExamples) {
  const SnowflakeEmbedding two = snowflake_embed({Vec::Zero(2), (Vec(2) << 0.5, 0.5).finished()});
  EXPECT_NEAR((two.points.row(0) - two.points.row(1)).norm(), 1.0, 1e-12);
  const SnowflakeEmbedding three = snowflake_embed({Vec::Zero(2), (Vec(2) << 0.5, 0).finished(), (Vec(2) << 1, 0).finished()});
  EXPECT_NEAR((three.points.row(0) - three.points.row(1)).norm(), std::sqrt(0.5), 1e-12);
  EXPECT_NEAR((three.points.row(1) - three.points.row(2)).norm(), std::sqrt(0.5), 1e-12);
  EXPECT_NEAR((three.points.row(0) - three.points.row(2)).norm(), 1.0, 1e-12);
}

TEST(Snowflake, GramIsPsdOnRandomSets) {
  Rng rng(8);
  for (int t = 0; t < 1000; ++t) {
    const int n = 1 + t % 4;
    auto x = raw_l1(n);
    std::vector<Vec> pts;
    const int m = 2 + static_cast<int>(rng.index(10));
    for (int i = 0; i < m; ++i) pts.push_back(sample_ball(*x, rng));
    const SnowflakeEmbedding s = snowflake_embed(pts);
    EXPECT_GE(s.min_eigenvalue, -1e-8);
    EXPECT_LE(s.max_error, 1e-8);
  }
}

TEST(Snowflake, HalfNetOfL1PlaneHasDistortionAtMostTwo) {
  auto x = raw_l1(2);
  const Net net = greedy_net(x, 0.5, 1);
  const SnowflakeEmbedding s = snowflake_embed(net.points, 0.5);
  EXPECT_DOUBLE_EQ(s.bound, 2.0);
  EXPECT_LE(s.distortion, s.bound);
  EXPECT_LE(s.max_error, 1e-8);
}

TEST(Snowflake, ModulusConsequenceInLowDimensions) {
  // With sqrt(2/delta) < (1-eps) sqrt(n), the net's c2 falls below (1-eps) c2(l1^n).
  struct Case {
    int n;
    double delta;
    double eps;
  };
  for (const Case& k : {Case{2, 1.2, 0.05}, Case{3, 0.9, 0.1}}) {
    ASSERT_LT(std::sqrt(2.0 / k.delta), (1.0 - k.eps) * std::sqrt(k.n));
    auto x = raw_l1(k.n);
    const Net net = greedy_net(x, k.delta, 1);
    const SnowflakeEmbedding s = snowflake_embed(net.points, k.delta);
    double measured = s.distortion;
    if (net.size() <= 12) measured = std::min(measured, c2_exact(FiniteMetric::from_points(net.points, *x)).value);
    EXPECT_LT(measured, (1.0 - k.eps) * std::sqrt(k.n)) << k.n;
  }
}
