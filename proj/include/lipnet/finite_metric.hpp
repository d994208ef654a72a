#pragma once

#include "lipnet/normed_space.hpp"

#include <string>
#include <vector>

namespace lipnet {

/// Distance matrix of a finite metric space. Validated on construction:
/// symmetric, zero diagonal, positive off the diagonal, triangle inequality.
class FiniteMetric {
 public:
  explicit FiniteMetric(Mat d, double tol = 1e-9);

  static FiniteMetric from_points(const std::vector<Vec>& points, const NormedSpace& space);
  /// Shortest-path metric of the m-cycle with unit edges.
  static FiniteMetric cycle(int m);

  int size() const { return static_cast<int>(d_.rows()); }
  double operator()(int i, int j) const { return d_(i, j); }
  const Mat& matrix() const { return d_; }
  FiniteMetric restrict(const std::vector<int>& subset) const;

 private:
  Mat d_;
};

/// max over min of image / source distance ratios, for a matrix of image distances.
double distance_distortion(const FiniteMetric& d, const Mat& image_distances);
/// Same for Euclidean images given one row per point.
double embedding_distortion(const FiniteMetric& d, const Mat& points);

struct Cut {
  std::vector<int> side;  ///< points on the side not containing point 0
  double weight = 0.0;
};

struct DistortionCertificate {
  double value = 0.0;        ///< the distortion D*
  std::string method;        ///< "cut-lp", "sdp", "approximate", "snowflake"
  double tolerance = 0.0;
  double lower_bound = 0.0;  ///< dual certificate (c2 only)
  double gap = 0.0;          ///< value - lower_bound
  double witness_value = 0.0;  ///< distortion re-evaluated from the witness
  std::vector<Cut> cuts;     ///< l1 witness
  Mat embedding;             ///< l2 witness, one row per point
  Mat dual;                  ///< c2 dual matrix P (PSD, P 1 = 0)
};

/// c_1 by the cut-cone LP over all 2^(m-1) - 1 cuts. Throws "cap-exceeded" for m > 10.
DistortionCertificate c1_exact(const FiniteMetric& d);

/// c_2 by bisection on eta with alternating projections between the squared
/// distance box and the Euclidean distance cone. The value is the audited
/// distortion of the recovered points; the lower bound comes from a dual
/// matrix built from the separating direction at the largest infeasible eta.
/// Throws "cap-exceeded" for m > 12.
DistortionCertificate c2_exact(const FiniteMetric& d);

/// Distortion lower bound sqrt(sum_{P>0} P d^2 / -sum_{P<0} P d^2) for a PSD P with P 1 = 0.
double c2_dual_bound(const FiniteMetric& d, const Mat& P);

struct SnowflakeEmbedding {
  Mat points;              ///< Euclidean images, one row per input point
  double max_error = 0.0;  ///< max | |y_i - y_j| - sqrt(|x_i - x_j|_1) |
  double min_eigenvalue = 0.0;
  double distortion = 0.0;  ///< of the l1 metric on the inputs into l2
  double bound = 0.0;       ///< sqrt(2 / delta) when delta > 0
};

/// Gram factorization of sqrt(|x - y|_1). Throws "not-negative-type" when the
/// Gram matrix has an eigenvalue below -1e-8. `delta` (optional) sets the bound.
SnowflakeEmbedding snowflake_embed(const std::vector<Vec>& points, double delta = 0.0);

}  // namespace lipnet
