#include "lipnet/emd.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace lipnet;

namespace {

PointSet random_set(Rng& rng, int n, long grid) {
  PointSet s;
  for (int i = 0; i < n; ++i)
    s.push_back({1 + static_cast<long>(rng.index(static_cast<std::size_t>(grid))),
                 1 + static_cast<long>(rng.index(static_cast<std::size_t>(grid)))});
  return s;
}

}  // namespace

TEST(Emd, ClosedFormExamples) {
  EXPECT_EQ(emd_distance({{0, 0}}, {{3, 4}}), 5.0);
  EXPECT_EQ(emd_distance({{0, 0}, {1, 0}}, {{0, 1}, {2, 0}}), 2.0);
  const PointSet a = {{1, 2}, {3, 1}, {2, 2}};
  EXPECT_EQ(emd_distance(a, a), 0.0);
  EXPECT_EQ(emd_distance({{0, 0}}, {{3, 4}}, GroundCost::l1), 7.0);
}

TEST(Emd, SizeMismatchRejected) {
  try {
    emd_distance({{0, 0}}, {{1, 1}, {2, 2}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "size-mismatch");
  }
}

TEST(Emd, MatchesBruteForceExactly) {
  Rng rng(42);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + t % 6;
    const PointSet a = random_set(rng, n, n);
    const PointSet b = random_set(rng, n, n);
    EXPECT_EQ(emd_distance(a, b), emd_brute_force(a, b)) << t;
    EXPECT_EQ(emd_distance(a, b), emd_distance(b, a)) << t;
  }
}

TEST(Emd, TranslationInvariant) {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + t % 5;
    PointSet a = random_set(rng, n, 8);
    PointSet b = random_set(rng, n, 8);
    const double before = emd_distance(a, b);
    const long vx = static_cast<long>(rng.index(20)) - 10;
    const long vy = static_cast<long>(rng.index(20)) - 10;
    for (auto& p : a) p = {p[0] + vx, p[1] + vy};
    for (auto& p : b) p = {p[0] + vx, p[1] + vy};
    EXPECT_EQ(emd_distance(a, b), before);
  }
}

TEST(Emd, AssignmentAgainstEnumeration) {
  Rng rng(5);
  for (int t = 0; t < 30; ++t) {
    const int n = 1 + t % 7;
    Mat c(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) c(i, j) = static_cast<double>(rng.index(50));
    const Assignment a = solve_assignment(c);
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    double best = 1e300;
    do {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += c(i, perm[static_cast<std::size_t>(i)]);
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_EQ(a.cost, best);
  }
}

TEST(Family, SingleSetGivesZeroMatrix) {
  const FamilyMetric f = build_family(generate_family(4, 1, FamilyGenerator::uniform, 1));
  ASSERT_EQ(f.tau.rows(), 1);
  EXPECT_EQ(f.tau(0, 0), 0.0);
}

TEST(Family, IdenticalSetsFlaggedInMultisetMode) {
  const PointSet s = {{1, 1}, {2, 3}};
  const FamilyMetric f = build_family({s, s}, true);
  EXPECT_TRUE(f.degenerate);
  EXPECT_EQ(f.tau(0, 1), 0.0);
  EXPECT_THROW(build_family({s, s}, false), Error);
  EXPECT_THROW(emd_l1_experiment(f), Error);
}

TEST(Family, DeterministicAndMetric) {
  for (FamilyGenerator g : {FamilyGenerator::uniform, FamilyGenerator::clustered}) {
    const FamilyMetric a = build_family(generate_family(3, 5, g, 11));
    const FamilyMetric b = build_family(generate_family(3, 5, g, 11));
    EXPECT_EQ(a.tau, b.tau);
    EXPECT_TRUE(a.audit.ok);
    EXPECT_EQ(a.audit.triples, 125u);
    for (const PointSet& s : a.family)
      for (const GridPoint& p : s) {
        EXPECT_GE(p[0], 1);
        EXPECT_LE(p[0], 3);
        EXPECT_GE(p[1], 1);
        EXPECT_LE(p[1], 3);
      }
  }
  const FamilyMetric big = build_family(generate_family(6, 30, FamilyGenerator::clustered, 2));
  EXPECT_EQ(big.audit.triples, 1000u);
  EXPECT_TRUE(big.audit.ok);
  EXPECT_THROW(generate_family(100, 500, FamilyGenerator::uniform, 1), Error);
}

TEST(Family, L1Experiment) {
  const FamilyMetric three = build_family(generate_family(4, 3, FamilyGenerator::uniform, 5));
  const EmdExperiment e3 = emd_l1_experiment(three);
  EXPECT_NEAR(e3.c1.value, 1.0, 1e-9);
  EXPECT_TRUE(std::isnan(e3.context) || e3.context >= 0.0);

  // Singleton sets: tau is the Euclidean metric of the points.
  std::vector<PointSet> singles;
  Rng rng(6);
  for (int i = 0; i < 8; ++i) singles.push_back({{static_cast<long>(i), static_cast<long>(rng.index(8))}});
  const FamilyMetric f = build_family(singles);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      EXPECT_DOUBLE_EQ(f.tau(i, j), std::hypot(static_cast<double>(singles[i][0][0] - singles[j][0][0]),
                                               static_cast<double>(singles[i][0][1] - singles[j][0][1])));
  const EmdExperiment e = emd_l1_experiment(f);
  EXPECT_GE(e.c1.value, 1.0 - 1e-9);
  EXPECT_NEAR(e.c1.witness_value, e.c1.value, 1e-7);
  EXPECT_NEAR(e.context, std::sqrt(std::log(std::log(8.0))), 1e-12);
}
