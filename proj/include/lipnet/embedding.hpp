#pragma once

#include "lipnet/poisson.hpp"

#include <map>
#include <string>
#include <vector>

namespace lipnet {

/// Lattice region around the support of F on which derivative fields are
/// tabulated, with cached partials per scale.
class SmoothingContext {
 public:
  /// The region extends `margin` beyond the support in every coordinate.
  explicit SmoothingContext(FieldPtr field, double margin = 4.0);

  const FieldSamples& field() const { return *field_; }
  const FieldPtr& field_ptr() const { return field_; }
  const LatticeBox& region() const { return region_; }
  /// Euclidean distance from the support of F to the complement of the region.
  double far_distance() const { return far_; }

  /// Partials of P_t * F on the region. Throws "scale-unresolved" when t < 2h.
  const std::vector<GridField>& partials(double t) const;
  /// Error estimate for derivatives of P_t * F (see Evolute::derivative_error).
  double derivative_error(double t) const;

 private:
  FieldPtr field_;
  LatticeBox region_;
  double far_;
  std::unique_ptr<GridEvaluator> eval_;
  mutable std::map<double, std::vector<GridField>> partials_;
  mutable std::map<double, double> errors_;
};

struct ScaleEntry {
  int k = 0;
  double t = 0.0;
  double integral = 0.0;       ///< I(t_k)
  double next_integral = 0.0;  ///< I((R+1) t_k)
  double tolerance = 0.0;      ///< quadrature tolerance of both integrals
  double slack = 0.0;          ///< I(t_k) - I((R+1)t_k) - 6 vol(3B_X)/m
  bool accepted = false;
};

struct ScaleLog {
  double A = 0.0;
  double R = 0.0;
  int m = 0;
  double volume_3b = 0.0;  ///< vol(3 B_X)
  double increment = 0.0;  ///< 6 vol(3B_X) / m
  std::vector<ScaleEntry> entries;
};

struct ScaleResult {
  double t = 0.0;
  int k = 0;
  ScaleLog log;
};

/// Thrown by the scale search when no t_k passes; carries the full log.
class StabilizationError : public Error {
 public:
  StabilizationError(const std::string& message, ScaleLog log)
      : Error("stabilization-not-found", message), log_(std::move(log)) {}
  const ScaleLog& log() const { return log_; }

 private:
  ScaleLog log_;
};

/// I(t) = mean over directions of the integral of |d_a (P_t * F)|_Y, with
/// its quadrature tolerance (stride-2 comparison, far-field bound and the
/// sampling error of F).
struct ScaleIntegral {
  double value = 0.0;
  double tolerance = 0.0;
};
ScaleIntegral scale_integral(const SmoothingContext& ctx, const std::vector<Vec>& directions, double t);

/// Scans t_k = A (R+1)^(k-m-1) for k = m+1 down to 0 and returns the first
/// t_k with I(t_k) <= I((R+1)t_k) + 6 vol(3B_X)/m within tolerance. Only
/// the scales actually visited are evaluated.
ScaleResult find_stabilizing_scale(const SmoothingContext& ctx, const std::vector<Vec>& directions, double A,
                                   double R, int m);

/// Telescoping argument on a log in which every scan point failed: the
/// increments sum past (m+1) 6vol/m, which exceeds the ceiling 6 vol(3B_X)
/// that bounds every I(t).
struct ContradictionCheck {
  bool all_failed = false;
  double telescoped = 0.0;  ///< I(t_0) - I(t_{m+1}) as logged
  double required = 0.0;    ///< (m+1) 6 vol(3B_X) / m
  double ceiling = 0.0;     ///< 6 vol(3B_X)
  bool contradiction = false;
};
ContradictionCheck check_iteration_contradiction(const ScaleLog& log);

/// Hypotheses on (delta, t, R) of the averaged-derivative lower bound.
struct AveragedHypotheses {
  double delta_lhs = 0.0;    ///< delta
  double delta_mid = 0.0;    ///< eps t log(3/t) / (2 sqrt n)
  double delta_rhs = 0.0;    ///< eps^4 / (6 n^(5/2) (80 D)^2)
  double R_lower = 0.0;      ///< 600 n^(3/2) D^2 log(3/t) / eps^2
  double R_upper = 0.0;      ///< eps / (32 t sqrt n)
  bool delta_ok = false;
  bool R_ok = false;
  bool ok() const { return delta_ok && R_ok; }
};
AveragedHypotheses averaged_hypotheses(int n, double delta, double eps, double D, double t, double R);

/// 100 D sqrt(n) t log(3/t) / eps.
double theta_step(int n, double eps, double D, double t);

struct AveragedDerivative {
  double value = 0.0;       ///< (|d_a(P_t*F)|_Y * P_{Rt})(x), truncated to the region
  double truncation = 0.0;  ///< bound on the discarded part
  double lower_target = 0.0;  ///< (1 - eps) / D
  AveragedHypotheses hypotheses;
};
AveragedDerivative averaged_derivative_lower_bound(const SmoothingContext& ctx, double t, double R, const Vec& x,
                                                   const Vec& a, double delta, double eps, double D);

/// Sampled check of |P_t*F(z + Theta a) - P_t*F(z)| >= (1 - eps/3) Theta / D.
struct ThetaChainCheck {
  double theta = 0.0;
  double min_ratio = 0.0;  ///< min over samples of |increment| D / Theta
  double target = 0.0;     ///< 1 - eps/3
  bool ok = false;
};
ThetaChainCheck theta_chain_check(const Evolute& E, const std::vector<Vec>& directions, double eps, double D,
                                  int samples, std::uint64_t seed);

struct GoodPointResult {
  Vec x;
  std::size_t index = 0;       ///< position in the center-outward scan
  std::size_t lattice_points = 0;
  double good_fraction = 0.0;
  double threshold = 0.0;      ///< eps / D
  double tolerance = 0.0;      ///< quadrature tolerance added to the threshold
  std::vector<double> worst_gap;  ///< per direction, max over the lattice of the gap
  double min_gap = 0.0;        ///< smallest gap seen (convexity says >= -2 tolerance)
  bool found = false;
};

/// Gap(x, a) = (|d_a(P_t*F)|_Y * P_{Rt})(x) - |d_a(P_{(R+1)t}*F)(x)|_Y on a
/// lattice of (1/8)B_X. Returns the first point (center outward) where every
/// gap is below eps/D + tolerance. Throws "good-point-not-found" if none.
GoodPointResult find_good_point(const SmoothingContext& ctx, double t, double R, const std::vector<Vec>& directions,
                                double eps, double D);
/// Same scan without throwing; `found` reports the outcome.
GoodPointResult scan_good_points(const SmoothingContext& ctx, double t, double R, const std::vector<Vec>& directions,
                                 double eps, double D);

struct EmbeddingReport {
  Mat T;                 ///< m x n, the derivative of P_{(R+1)t} * F at x_star
  Vec x_star;
  double t_star = 0.0;
  double R = 0.0;
  double eta = 0.0;      ///< sphere-net resolution used for certification
  std::size_t net_size = 0;
  double max_net = 0.0;  ///< max |Ta|_Y over the net
  double min_net = 0.0;  ///< min |Ta|_Y over the net
  double norm_T = 0.0;   ///< certified upper bound max_net / (1 - eta)
  double norm_Tinv = 0.0;  ///< certified upper bound 1 / (min_net - norm_T eta), inf if not positive
  double distortion = 0.0;          ///< norm_T * norm_Tinv
  double sampled_distortion = 0.0;  ///< max_net / min_net
  double T_error = 0.0;  ///< bound on |(T - T_exact) a|_Y for a in S_X from the quadrature estimate
  bool lipschitz_hypothesis = false;  ///< (R+1) t < eps / (25 sqrt n)
  double lipschitz_bound = 0.0;       ///< 1 + 2 eps
};

EmbeddingReport extract_embedding(FieldPtr field, double t, double R, const Vec& x_star, double eps,
                                  double eta = 1e-2, std::uint64_t seed = 1);

/// Certified operator data of a linear map on the sphere net of X.
struct OperatorCertificate {
  double max_net = 0.0;
  double min_net = 0.0;
  double norm = 0.0;
  double inverse_norm = 0.0;
  double distortion = 0.0;
  std::size_t net_size = 0;
};
OperatorCertificate certify_operator(const SpacePtr& space, const Mat& T, TargetNorm target, double eta,
                                     std::uint64_t seed);

struct ApproximationCheck {
  double max_deviation = 0.0;  ///< max |P_t*F(x) - F(x)|_Y over samples
  double bound = 0.0;          ///< 8 sqrt(n) t log(3/t)
  double quad_error = 0.0;
  bool ok = false;
};
/// Samples x in B_X and compares the evolute with the pointwise F.
ApproximationCheck approximation_check(FieldPtr field, const MapFn& F, double t, int samples, std::uint64_t seed);

struct EvoluteLipschitzCheck {
  double t = 0.0;
  double eps = 0.0;
  bool hypothesis = false;      ///< t < eps / (25 sqrt n)
  double max_ratio = 0.0;       ///< max |E(x)-E(y)|_Y / |x-y|_X over pairs
  double bound = 0.0;           ///< 1 + 2 eps
  double intermediate = 0.0;    ///< 1 + eps + 24 t sqrt n
  double slack = 1e-3;
  std::size_t pairs = 0;
  bool ok = false;
  bool intermediate_ok = false;
};
/// Pairs of lattice points of (1/4)B_X, values by FFT on that lattice.
EvoluteLipschitzCheck evolute_lipschitz_check(FieldPtr field, double t, double eps, std::size_t pairs,
                                              std::uint64_t seed, double slack = 1e-3);

struct SemigroupCheck {
  double max_deviation = 0.0;  ///< max over the output grid of |P_t*(P_s*F) - P_{t+s}*F|_Y
  double lattice_error = 0.0;  ///< stride-2 estimates of both sides
  double truncation = 0.0;     ///< bound on the part of P_s*F cut off outside the box
  double quad_error = 0.0;     ///< lattice + truncation + sampling error of F
  std::size_t grid_points = 0;
  bool ok = false;             ///< max_deviation <= 3 quad_error
};
/// P_s*F is tabulated on [-rho, rho]^n, then convolved with P_t onto the grid
/// covering [-half_width, half_width]^n.
SemigroupCheck semigroup_check(FieldPtr field, double t, double s, double half_width, double rho);

}  // namespace lipnet
