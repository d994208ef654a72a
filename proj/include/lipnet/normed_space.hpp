#pragma once

#include "lipnet/common.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lipnet {

enum class NormKind { lp, ellipsoid, polytope };

/// Parameters of a norm on R^n before any John scaling.
struct NormSpec {
  NormKind kind = NormKind::lp;
  double p = 2.0;  ///< lp exponent, +inf allowed
  Mat matrix;      ///< ellipsoid: positive definite M; polytope: facet normals as rows

  static NormSpec lp_norm(double p) { return {NormKind::lp, p, {}}; }
  static NormSpec ellipsoid(Mat m) { return {NormKind::ellipsoid, 2.0, std::move(m)}; }
  static NormSpec polytope(Mat normals) { return {NormKind::polytope, 2.0, std::move(normals)}; }

  /// Parses "lp:2", "lp:inf", "l1", "linf", ...
  static NormSpec parse(const std::string& text);
  std::string descriptor() const;
};

enum class Scaling {
  john,     ///< rescale into the Euclidean sandwich (1/sqrt n)|x|_2 <= |x| <= |x|_2
  prescaled ///< use the norm as given (scale 1)
};

/// A finite-dimensional normed space (R^n, s * |.|_raw). Immutable.
class NormedSpace {
 public:
  NormedSpace(int dim, NormSpec spec, Scaling scaling = Scaling::john);

  int dim() const { return dim_; }
  const NormSpec& spec() const { return spec_; }
  double john_scale() const { return scale_; }

  double norm(const double* x) const { return scale_ * raw_norm(x); }
  double norm(const Vec& x) const { return norm(x.data()); }
  double raw_norm(const double* x) const;
  double raw_norm(const Vec& x) const { return raw_norm(x.data()); }

  /// |x - y| without allocating.
  double distance(const double* x, const double* y) const;

  /// A subgradient of the (scaled) norm at x; the gradient wherever it exists.
  void gradient(const double* x, double* out) const;
  Vec gradient(const Vec& x) const;

  /// Dual norm sup{<v,x> : |x| <= 1}.
  double dual_norm(const Vec& v) const;

  /// sup over the unit ball of |x|_inf.
  double coordinate_extent() const { return extent_; }
  /// Best constants with lower*|x|_2 <= |x| <= upper*|x|_2.
  double euclid_lower() const { return euclid_lower_; }
  double euclid_upper() const { return euclid_upper_; }

  double unit_ball_volume() const { return volume_; }

  bool contains(const Vec& x, double radius = 1.0) const { return norm(x) <= radius; }

  std::string descriptor() const;

 private:
  int dim_;
  NormSpec spec_;
  double scale_ = 1.0;
  double extent_ = 1.0;
  double euclid_lower_ = 1.0;
  double euclid_upper_ = 1.0;
  double volume_ = 0.0;
  Mat inverse_;  // ellipsoid only
};

using SpacePtr = std::shared_ptr<const NormedSpace>;

SpacePtr make_space(int dim, const NormSpec& spec, Scaling scaling = Scaling::john);

/// A finite point set in the unit ball (or unit sphere) of a space.
struct Net {
  SpacePtr space;
  double delta = 0.0;
  bool on_sphere = false;
  std::vector<Vec> points;
  /// Number of points inserted by the refinement sweep after the candidate stream.
  std::size_t repaired = 0;
  /// Covering radius certified by the sweep; equals delta unless the box
  /// budget ran out in near-tie regions.
  double covering_radius = 0.0;

  std::size_t size() const { return points.size(); }
  /// (3/delta)^n, the packing bound a maximal separated set must respect.
  double size_bound() const;
};

struct NetOptions {
  std::size_t cap = 1000000;
  std::size_t max_candidates = 400000;
  std::size_t max_boxes = 2000000;  ///< refinement budget of the covering sweep
};

/// Maximal delta-separated subset of B_X built greedily from a seeded
/// low-discrepancy stream, followed by an adaptive sweep that closes any
/// remaining covering gap.
Net greedy_net(const SpacePtr& space, double delta, std::uint64_t seed, const NetOptions& opts = {});

/// Maximal eta-separated subset of the unit sphere S_X.
Net sphere_net(const SpacePtr& space, double eta, std::uint64_t seed, const NetOptions& opts = {});

struct CoveringReport {
  double max_distance = 0.0;  ///< largest sampled distance to the net
  double min_separation = 0.0;
  std::size_t samples = 0;
};

/// Max distance from `samples` uniform points of B_X (or S_X) to the net, and
/// the exact minimum pairwise separation.
CoveringReport certify_net(const Net& net, std::size_t samples, std::uint64_t seed);

/// Uniform sample of B_X by rejection from the bounding box.
Vec sample_ball(const NormedSpace& space, Rng& rng, double radius = 1.0);
/// Random point of S_X (normalised Gaussian direction; not uniform in surface measure).
Vec sample_sphere(const NormedSpace& space, Rng& rng);

/// Radical-inverse Halton point in [0,1)^dim, dim <= 8.
void halton(std::uint64_t index, int dim, double* out);

}  // namespace lipnet
