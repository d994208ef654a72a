#include "lipnet/emd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace lipnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ground(const GridPoint& p, const GridPoint& q, GroundCost g) {
  const double dx = static_cast<double>(p[0] - q[0]);
  const double dy = static_cast<double>(p[1] - q[1]);
  return g == GroundCost::l2 ? std::hypot(dx, dy) : std::abs(dx) + std::abs(dy);
}

void check_sizes(const PointSet& a, const PointSet& b) {
  if (a.size() != b.size())
    throw Error("size-mismatch", "matching distance needs sets of equal size (" + std::to_string(a.size()) + " vs " +
                                     std::to_string(b.size()) + ")");
}

// Sum of matched costs in ascending order, so bijections with the same
// multiset of edge costs give bit-identical totals.
double canonical_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

}  // namespace

Assignment solve_assignment(const Mat& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw Error("invalid-argument", "assignment needs a square cost matrix");
  // Shortest augmenting paths with row/column potentials, 1-based internally.
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0), v(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<int> p(static_cast<std::size_t>(n + 1), 0), way(static_cast<std::size_t>(n + 1), 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n + 1), kInf);
    std::vector<char> used(static_cast<std::size_t>(n + 1), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  Assignment a;
  a.match.assign(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) a.match[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
  std::vector<double> terms;
  for (int i = 0; i < n; ++i) terms.push_back(cost(i, a.match[static_cast<std::size_t>(i)]));
  a.cost = canonical_sum(std::move(terms));
  return a;
}

double emd_distance(const PointSet& a, const PointSet& b, GroundCost g) {
  check_sizes(a, b);
  const auto n = static_cast<Eigen::Index>(a.size());
  Mat cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) cost(i, j) = ground(a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(j)], g);
  return solve_assignment(cost).cost;
}

double emd_brute_force(const PointSet& a, const PointSet& b, GroundCost g) {
  check_sizes(a, b);
  if (a.size() > 9) throw Error("cap-exceeded", "brute force supports at most 9 points");
  std::vector<int> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = kInf;
  do {
    std::vector<double> terms;
    for (std::size_t i = 0; i < a.size(); ++i) terms.push_back(ground(a[i], b[static_cast<std::size_t>(perm[i])], g));
    best = std::min(best, canonical_sum(std::move(terms)));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return a.empty() ? 0.0 : best;
}

FamilyGenerator parse_generator(const std::string& text) {
  if (text == "uniform" || text == "uniform-random") return FamilyGenerator::uniform;
  if (text == "clustered") return FamilyGenerator::clustered;
  if (text == "file" || text == "user-file") return FamilyGenerator::file;
  throw Error("usage", "generator must be uniform, clustered or file, got '" + text + "'");
}

std::vector<PointSet> generate_family(int n, int N, FamilyGenerator generator, std::uint64_t seed, bool multiset) {
  if (n < 1 || N < 1) throw Error("invalid-argument", "n and N must be positive");
  if (static_cast<double>(N) * n * n > 4e6) throw Error("cap-exceeded", "N n^2 exceeds the memory cap 4e6");
  if (generator == FamilyGenerator::file) throw Error("usage", "file families are read by the caller");
  Rng rng(seed);
  auto coord = [&](long centre, long spread) {
    const long lo = std::max(1L, centre - spread);
    const long hi = std::min(static_cast<long>(n), centre + spread);
    return lo + static_cast<long>(rng.index(static_cast<std::size_t>(hi - lo + 1)));
  };
  std::vector<PointSet> family;
  family.reserve(static_cast<std::size_t>(N));
  std::set<PointSet> drawn;
  int redraws = 0;
  while (static_cast<int>(family.size()) < N) {
    PointSet set;
    std::set<GridPoint> seen;
    std::vector<GridPoint> centres;
    if (generator == FamilyGenerator::clustered) {
      const int k = 1 + static_cast<int>(rng.index(3));
      for (int c = 0; c < k; ++c) centres.push_back({coord(1, n), coord(1, n)});
    }
    const long spread = std::max(1L, static_cast<long>(n) / 4);
    int attempts = 0;
    while (static_cast<int>(set.size()) < n) {
      GridPoint p;
      if (generator == FamilyGenerator::uniform || ++attempts > 50 * n) {
        p = {coord(1, n), coord(1, n)};
      } else {
        const GridPoint& c = centres[rng.index(centres.size())];
        p = {coord(c[0], spread), coord(c[1], spread)};
      }
      if (!multiset && !seen.insert(p).second) continue;
      set.push_back(p);
    }
    std::sort(set.begin(), set.end());
    if (!multiset && !drawn.insert(set).second) {
      if (++redraws > 1000 * N) throw Error("cap-exceeded", "not enough distinct sets for this n and N");
      continue;
    }
    family.push_back(std::move(set));
  }
  return family;
}

FamilyMetric build_family(std::vector<PointSet> family, bool multiset, GroundCost g, std::size_t triples,
                          std::uint64_t seed) {
  if (family.empty()) throw Error("invalid-argument", "empty family");
  const std::size_t n = family.front().size();
  for (const PointSet& s : family) {
    if (s.size() != n) throw Error("size-mismatch", "all sets in a family must have the same size");
    if (!multiset && std::set<GridPoint>(s.begin(), s.end()).size() != s.size())
      throw Error("invalid-argument", "repeated points need multiset mode");
  }
  FamilyMetric fm;
  fm.multiset = multiset;
  const auto N = static_cast<Eigen::Index>(family.size());
  fm.tau = Mat::Zero(N, N);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = i + 1; j < N; ++j) {
      fm.tau(i, j) = fm.tau(j, i) = emd_distance(family[static_cast<std::size_t>(i)], family[static_cast<std::size_t>(j)], g);
      if (fm.tau(i, j) == 0.0) fm.degenerate = true;
    }
  if (fm.degenerate && !multiset)
    throw Error("degenerate-metric", "two sets coincide; repeated sets need multiset mode");

  auto check = [&](Eigen::Index a, Eigen::Index b, Eigen::Index c) {
    const double excess = fm.tau(a, c) - fm.tau(a, b) - fm.tau(b, c);
    fm.audit.worst_excess = std::max(fm.audit.worst_excess, excess);
    ++fm.audit.triples;
  };
  if (static_cast<double>(N) * N * N <= static_cast<double>(triples)) {
    for (Eigen::Index a = 0; a < N; ++a)
      for (Eigen::Index b = 0; b < N; ++b)
        for (Eigen::Index c = 0; c < N; ++c) check(a, b, c);
  } else {
    Rng rng(seed);
    for (std::size_t t = 0; t < triples; ++t)
      check(static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(N))),
            static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(N))),
            static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(N))));
  }
  fm.audit.ok = fm.audit.worst_excess <= 1e-9 * std::max(1.0, fm.tau.maxCoeff());
  fm.family = std::move(family);
  return fm;
}

EmdExperiment emd_l1_experiment(const FamilyMetric& family) {
  if (family.degenerate) throw Error("degenerate-metric", "tau vanishes off the diagonal; c1 is undefined");
  EmdExperiment e;
  e.N = static_cast<int>(family.tau.rows());
  if (e.N > 10) throw Error("cap-exceeded", "the l1 experiment supports at most 10 sets");
  e.c1 = c1_exact(FiniteMetric(family.tau));
  const double ll = e.N > 1 ? std::log(std::log(static_cast<double>(e.N))) : -kInf;
  e.context = ll > 0.0 ? std::sqrt(ll) : std::numeric_limits<double>::quiet_NaN();
  return e;
}

}  // namespace lipnet
