#pragma once

#include "lipnet/finite_metric.hpp"

#include <array>
#include <string>
#include <vector>

namespace lipnet {

using GridPoint = std::array<long, 2>;
using PointSet = std::vector<GridPoint>;

enum class GroundCost {
  l2,  ///< Euclidean ground distance
  l1   ///< exploration only
};

/// Optimal assignment of a square cost matrix (Hungarian method with potentials).
struct Assignment {
  std::vector<int> match;  ///< row i is matched to column match[i]
  double cost = 0.0;
};
Assignment solve_assignment(const Mat& cost);

/// Minimum-cost matching distance. Throws "size-mismatch" for unequal sizes.
double emd_distance(const PointSet& a, const PointSet& b, GroundCost ground = GroundCost::l2);
/// Same value by enumerating all bijections; n <= 9.
double emd_brute_force(const PointSet& a, const PointSet& b, GroundCost ground = GroundCost::l2);

enum class FamilyGenerator { uniform, clustered, file };
FamilyGenerator parse_generator(const std::string& text);

struct TriangleAudit {
  std::size_t triples = 0;
  double worst_excess = 0.0;  ///< max of tau(a,c) - tau(a,b) - tau(b,c)
  bool ok = true;
};

struct FamilyMetric {
  std::vector<PointSet> family;
  Mat tau;
  bool multiset = false;
  bool degenerate = false;  ///< some off-diagonal tau vanishes (pseudometric)
  TriangleAudit audit;
};

/// n distinct points of {1..n}^2 per set (uniform), or points drawn around
/// a few random centres (clustered). Multiset mode allows repeated points and
/// repeated sets. Throws "cap-exceeded" when N n^2 > 4e6.
std::vector<PointSet> generate_family(int n, int N, FamilyGenerator generator, std::uint64_t seed, bool multiset = false);

/// Fills the tau matrix and audits the triangle inequality on `triples`
/// random triples (all triples when there are fewer).
FamilyMetric build_family(std::vector<PointSet> family, bool multiset = false, GroundCost ground = GroundCost::l2,
                          std::size_t triples = 1000, std::uint64_t seed = 7);

/// c_1 of (family, tau) via the cut LP, with sqrt(log log N) as context.
struct EmdExperiment {
  DistortionCertificate c1;
  double context = 0.0;  ///< sqrt(log log N), NaN when log log N <= 0
  int N = 0;
};
EmdExperiment emd_l1_experiment(const FamilyMetric& family);

}  // namespace lipnet
