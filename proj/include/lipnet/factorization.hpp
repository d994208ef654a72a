#pragma once

#include "lipnet/extension.hpp"

#include <functional>
#include <string>
#include <vector>

namespace lipnet {

/// Linear map X -> l_inf^K, x -> (<x, u_k>)_k, with u_k unit functionals
/// (norm gradients at sphere-net points). |Jx|_inf <= |x|_X always; the
/// reverse holds up to `slack`.
struct CoordinateEmbedding {
  Mat rows;            ///< K x n
  double slack = 0.0;  ///< 1 - min sampled |Jx|_inf / |x|_X
  Vec apply(const Vec& x) const { return rows * x; }
};

CoordinateEmbedding coordinate_embedding(const SpacePtr& space, double eta, std::uint64_t seed = 3);

/// G_j(z) = min over net points x of J(x)_j + D |z - f(x)|_Y.
class McShaneExtension {
 public:
  /// Throws "not-bi-lipschitz" naming a pair where |J(x)-J(y)|_inf > D |f(x)-f(y)|_Y.
  McShaneExtension(NetMapPtr map, CoordinateEmbedding J);

  const NetMap& map() const { return *map_; }
  const CoordinateEmbedding& J() const { return J_; }
  double D() const { return map_->D(); }
  int dim() const { return static_cast<int>(J_.rows.rows()); }

  Vec G(const Vec& z) const;

 private:
  NetMapPtr map_;
  CoordinateEmbedding J_;
  Mat jvals_;  // N x K
};

/// H(z) = average of G(z + w) over equal-weight nodes w of the Y-ball of the
/// given radius (tensor grid for m <= 3, seeded uniform sample beyond).
class Mollified {
 public:
  Mollified(const McShaneExtension& G, double radius, int per_axis = 7, std::uint64_t seed = 9);

  double radius() const { return radius_; }
  std::size_t nodes() const { return nodes_.size(); }
  Vec H(const Vec& z) const;
  /// Central differences with step 1e-4 radius; K x m.
  Mat H_jacobian(const Vec& z) const;

 private:
  const McShaneExtension& G_;
  double radius_;
  std::vector<Vec> nodes_;
};

/// Default mollification radius n delta / eps, for which |H - G| <= D radius
/// meets the deviation budget n D delta / eps.
double default_mollification_radius(int n, double delta, double eps);

/// Weighted nodes of nu: lattice points of (1/2)B_X with equal weights.
struct NuNodes {
  std::vector<Vec> points;
  std::vector<double> weights;
};
NuNodes nu_nodes(const NormedSpace& space, int per_axis);

/// S(h) = sum_i w_i H'(F(x_i)) h(x_i) over the nodes of nu.
struct AveragingOperator {
  std::vector<Mat> M;  ///< H'(F(x_i)), K x m
  std::vector<double> weights;
  Vec apply(const std::vector<Vec>& h) const;
  /// Exact norm from L_1(nu, Y): max over nodes and rows of the dual norm.
  double norm(TargetNorm target) const;
};
AveragingOperator averaging_operator(const Mollified& H, const AlmostExtension& ext, const NuNodes& nu);

/// L_p(nu) norm of a node function given by its pointwise norms.
double nu_norm(const std::vector<double>& weights, const std::vector<double>& values, double p);

struct FactorizationOptions {
  double eta_J = 0.1;           ///< sphere-net resolution for J
  int mollifier_per_axis = 7;
  double radius = 0.0;          ///< 0 selects the default radius
  int nu_per_axis = 9;
  std::size_t samples = 1000;   ///< sampled z in F(B_X) and x in (1/2)B_X
  std::size_t y_samples = 400;  ///< sampled y for operator norms and the certificate
  std::uint64_t seed = 21;
};

struct FactorizationReport {
  int n = 0;
  int m = 0;
  int K = 0;
  double eps = 0.0;
  double delta = 0.0;
  double D = 0.0;
  bool delta_hypothesis = false;  ///< delta <= eps^2 / (30 n^2 D)
  double J_slack = 0.0;
  double radius = 0.0;

  double interpolation_error = 0.0;  ///< max over the net of |G(f(x)) - J(x)|_inf
  double G_lipschitz = 0.0;          ///< sampled
  double H_deviation = 0.0;          ///< max sampled |H(z) - G(z)|_inf, z in F(B_X)
  double H_bound = 0.0;              ///< n D delta / eps

  double net_deviation = 0.0;        ///< max over the net of |H(F(y)) - Jy|_inf
  double net_bound = 0.0;            ///< 10 n D delta / eps
  double half_ball_deviation = 0.0;  ///< max over sampled x in (1/2)B_X
  double half_ball_bound = 0.0;      ///< 15 n D delta / eps

  double T_norm = 0.0;               ///< sampled |Ty|_{L_inf(nu)} / |y|_X
  double T_bound = 0.0;              ///< 1 + eps
  double S_norm = 0.0;               ///< exact max over nodes of |H'(F(x))|_{Y -> l_inf}
  double chain_rule_gap = 0.0;       ///< |ST - A_direct|_{X -> l_inf} / |ST|
  double ST_minus_J = 0.0;           ///< |ST - J|_{X -> l_inf}
  double ST_bound = 0.0;             ///< 30 n^2 D delta / eps
  double certificate_min = 0.0;      ///< min over sampled y of D |Ty|_{L_1(nu)} / |y|_X
  double certificate_target = 0.0;   ///< 1 - eps
  double certificate_slack = 0.0;    ///< |ST - J| + J slack, the loss against |Jy|_inf
  bool certificate_ok = false;

  Mat ST;  ///< K x n
};

/// Runs the full factorization check for an almost-extension.
FactorizationReport factorize(const AlmostExtension& ext, const FactorizationOptions& opts = {});

/// Closed-form test map g: B_U -> R^k for the averaged-derivative bound.
struct TestMap {
  std::string name;
  int out_dim = 1;
  std::function<Vec(const Vec&)> g;
  std::function<Mat(const Vec&)> jac;
};

struct DivergenceCheck {
  double lhs = 0.0;        ///< |average of g' over B_U|_{U -> V}
  double sup_sphere = 0.0; ///< sampled sup of |g|_V on S_U
  double rhs = 0.0;        ///< n sup_sphere
  double tolerance = 0.0;  ///< quadrature estimate of the lhs
  bool ok = false;
};

/// V = R^k with the sup norm. The average uses a per_axis^n midpoint grid
/// of B_U; the tolerance compares it with a half-resolution grid.
DivergenceCheck divergence_check(const NormedSpace& U, const TestMap& g, int per_axis = 161, std::size_t sphere = 4096);

/// Twenty test maps for planar U (linear, constant, polynomial, trigonometric).
std::vector<TestMap> divergence_suite();

/// For the box U = prod [-w_i, w_i] scaled to unit volume and a Euclidean unit
/// vector y: the section volume, vol_{n-1}(y-perp cap B_U) / (n |y|_U), and an
/// independent grid count of the cone K = conv(section, y / |y|_U).
struct ConeCheck {
  double section = 0.0;
  double formula = 0.0;
  double hull_volume = 0.0;
  double hull_error = 0.0;  ///< grid-count resolution estimate
};
ConeCheck cone_volume_check(const Vec& half_widths, const Vec& y, int grid = 400);

}  // namespace lipnet
