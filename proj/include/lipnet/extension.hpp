#pragma once

#include "lipnet/normed_space.hpp"
#include "lipnet/spatial_index.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace lipnet {

/// Norm on the concrete target R^m.
enum class TargetNorm { l2, linf };

TargetNorm parse_target_norm(const std::string& text);
std::string to_string(TargetNorm t);
double target_norm(TargetNorm t, const double* v, int m);
inline double target_norm(TargetNorm t, const Vec& v) { return target_norm(t, v.data(), static_cast<int>(v.size())); }

/// Exhaustive pairwise check of (1/D)|x-y| <= |f(x)-f(y)| <= |x-y|.
struct BiLipschitzCheck {
  double max_expansion = 0.0;   ///< max |f(x)-f(y)| / |x-y|
  double max_contraction = 0.0; ///< max |x-y| / |f(x)-f(y)|, i.e. the smallest valid D
  int worst_i = -1;
  int worst_j = -1;
  bool ok = true;
};

BiLipschitzCheck check_bi_lipschitz(const Net& net, const Mat& values, TargetNorm target, double D);

/// A map on a net with values in (R^m, target norm), translated so that the
/// first net point maps to 0.
class NetMap {
 public:
  /// `values` holds one row per net point. Throws "not-bi-lipschitz" naming a
  /// violating pair when the two-sided bound fails beyond relative 1e-9.
  NetMap(Net net, Mat values, double D, TargetNorm target);

  const Net& net() const { return net_; }
  const NormedSpace& space() const { return *net_.space; }
  const Mat& values() const { return values_; }
  const Vec& translation() const { return translation_; }
  int target_dim() const { return static_cast<int>(values_.cols()); }
  double D() const { return D_; }
  TargetNorm target() const { return target_; }
  double target_norm(const Vec& v) const { return lipnet::target_norm(target_, v); }
  const BiLipschitzCheck& certificate() const { return check_; }
  /// max |f(p)| after translation; at most 2 for a valid map.
  double max_value_norm() const { return max_value_norm_; }

 private:
  Net net_;
  Mat values_;
  Vec translation_;
  double D_;
  TargetNorm target_;
  BiLipschitzCheck check_;
  double max_value_norm_ = 0.0;
};

using NetMapPtr = std::shared_ptr<const NetMap>;

/// Samples `fn` on the net and measures the smallest D it satisfies.
NetMapPtr make_net_map(const Net& net, const std::function<Vec(const Vec&)>& fn, TargetNorm target);
/// Same for explicit values, one row per net point.
NetMapPtr make_net_map(const Net& net, Mat values, TargetNorm target);

/// Cubic smoothstep: 1 on [0,1], 0 on [2,inf), C^1 in between.
double bump_profile(double t);
double bump_profile_slope(double t);

/// Equal-weight midpoint nodes of the ball r*B_X: a k^n tensor grid on the
/// bounding box, filtered by the norm.
std::vector<Vec> ball_nodes(const NormedSpace& space, double radius, int per_axis);

struct ExtensionOptions {
  int nodes = 41;         ///< tensor-grid nodes per axis for the tau-ball average
  int coarse_nodes = 21;  ///< comparison rule for the error estimate
  bool enforce_hypothesis = true;
};

/// The almost-extension F of a net map: partition of unity, the map g on B_X,
/// its radial cutoff h, and the tau-ball average F of h.
class AlmostExtension {
 public:
  AlmostExtension(NetMapPtr map, double eps, ExtensionOptions opts = {});

  struct Bump {
    int index;
    double psi;
    double phi;
  };

  const NetMap& map() const { return *map_; }
  const NetMapPtr& map_ptr() const { return map_; }
  const NormedSpace& space() const { return map_->space(); }
  int dim() const { return n_; }
  int target_dim() const { return m_; }
  double eps() const { return eps_; }
  double delta() const { return delta_; }
  double tau() const { return tau_; }
  const std::vector<Vec>& nodes() const { return nodes_; }

  /// Nonzero members of the partition at x, in net order.
  std::vector<Bump> partition(const Vec& x) const;

  Vec g(const Vec& x) const;
  Vec h(const Vec& x) const;
  /// Jacobian of h (m x n) wherever h is differentiable; one-sided elsewhere.
  Mat h_jacobian(const Vec& x) const;

  Vec F(const Vec& x) const;
  Mat F_jacobian(const Vec& x) const;
  Vec F_derivative(const Vec& x, const Vec& a) const { return F_jacobian(x) * a; }
  /// |F - F_coarse| at x, comparing the fine and coarse ball rules.
  double F_error_estimate(const Vec& x) const;

  /// Writes h(x) into out (length m) and, if jac is non-null, its Jacobian
  /// (m x n, column-major).
  void eval_h(const double* x, double* out, double* jac) const;

 private:
  void eval_g(const double* x, double* out, double* jac) const;
  Vec average(const std::vector<Vec>& nodes, const Vec& x) const;

  NetMapPtr map_;
  int n_;
  int m_;
  double eps_;
  double delta_;
  double tau_;
  std::vector<double> points_;  // N x n row-major
  std::vector<double> values_;  // N x m row-major
  CellIndex index_;
  std::vector<Vec> nodes_;
  std::vector<Vec> coarse_nodes_;
};

/// Result of averaging a map over tau-balls with an (L, eta) hypothesis.
struct BegunReport {
  double L = 0.0;
  double eta = 0.0;
  double tau = 0.0;
  double bound = 0.0;             ///< L (1 + n eta / (2 tau))
  double sampled_lipschitz = 0.0; ///< max ratio of the averaged map over sampled pairs
  bool hypothesis_ok = true;
  Vec violation_x;
  Vec violation_y;
  double violation_excess = 0.0;
};

using MapFn = std::function<Vec(const Vec&)>;
using PointSampler = std::function<Vec(Rng&)>;

/// Averages `h` over tau B_X with the given node rule, checks the (L, eta)
/// hypothesis on `hyp_pairs` pairs drawn from `sample_domain` (meant to cover
/// K + tau B_X) and measures the Lipschitz constant of the average on pairs
/// drawn from `sample_k`.
BegunReport begun_average(const NormedSpace& space, TargetNorm target, const MapFn& h, double L, double eta,
                          double tau, const PointSampler& sample_domain, const PointSampler& sample_k,
                          std::size_t hyp_pairs, std::size_t lip_pairs, std::uint64_t seed, int per_axis = 41);

/// Pair sampler mixing independent pairs with close pairs at log-uniform
/// separations, so both coarse and fine scales are probed.
std::pair<Vec, Vec> sample_pair(const NormedSpace& space, Rng& rng, const PointSampler& sample);

/// Sampled verification of the four almost-extension properties.
struct BulletReport {
  double support_max_value = 0.0;    ///< max |F| over sampled x outside (2 + tau) B_X
  double support_samples = 0;
  double global_lipschitz = 0.0;     ///< max over pairs of (|F(x)-F(y)| - slack) / |x-y|
  double global_excess = 0.0;        ///< max of |F(x)-F(y)| - 6|x-y|
  double inner_lipschitz = 0.0;
  double inner_excess = 0.0;         ///< max of |F(x)-F(y)| - (1+eps)|x-y|
  double net_deviation = 0.0;        ///< max over the net of |F(p) - f(p)|
  double net_bound = 0.0;            ///< 9 n delta / eps
  double slack = 1e-3;
  double quadrature_error = 0.0;     ///< max fine/coarse discrepancy seen
  bool support_ok = false;
  bool global_ok = false;
  bool inner_ok = false;
  bool net_ok = false;
  bool ok() const { return support_ok && global_ok && inner_ok && net_ok; }
};

BulletReport check_bullets(const AlmostExtension& ext, std::size_t pairs, std::uint64_t seed, double slack = 1e-3);

}  // namespace lipnet
