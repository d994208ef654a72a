#include "lipnet/finite_metric.hpp"

#include "lipnet/simplex.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lipnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Mat pairwise_l2(const Mat& points) {
  const auto m = points.rows();
  Mat out = Mat::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) out(i, j) = out(j, i) = (points.row(i) - points.row(j)).norm();
  return out;
}

// Rows are points whose Gram matrix is the PSD part of G.
Mat factor_gram(const Mat& G, double* min_eigenvalue = nullptr) {
  Eigen::SelfAdjointEigenSolver<Mat> es(G);
  if (min_eigenvalue) *min_eigenvalue = es.eigenvalues().minCoeff();
  const Vec root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal();
}

Mat centering(int m) { return Mat::Identity(m, m) - Mat::Constant(m, m, 1.0 / m); }

}  // namespace

FiniteMetric::FiniteMetric(Mat d, double tol) : d_(std::move(d)) {
  const auto m = d_.rows();
  if (m < 1 || d_.cols() != m) throw Error("invalid-metric", "distance matrix must be square and nonempty");
  const double scale = std::max(1.0, d_.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < m; ++i) {
    if (d_(i, i) != 0.0) throw Error("invalid-metric", "diagonal must be zero");
    for (Eigen::Index j = i + 1; j < m; ++j) {
      if (!std::isfinite(d_(i, j)) || std::abs(d_(i, j) - d_(j, i)) > tol * scale)
        throw Error("invalid-metric", "distance matrix must be finite and symmetric");
      if (!(d_(i, j) > 0.0)) {
        std::ostringstream os;
        os << "points " << i << " and " << j << " coincide; distortion is undefined";
        throw Error("degenerate-metric", os.str());
      }
      d_(j, i) = d_(i, j);
    }
  }
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index k = 0; k < m; ++k)
        if (d_(i, k) > d_(i, j) + d_(j, k) + tol * scale) {
          std::ostringstream os;
          os << "triangle inequality fails for " << i << ", " << j << ", " << k;
          throw Error("invalid-metric", os.str());
        }
}

FiniteMetric FiniteMetric::from_points(const std::vector<Vec>& points, const NormedSpace& space) {
  const auto m = static_cast<Eigen::Index>(points.size());
  Mat d = Mat::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j)
      d(i, j) = d(j, i) = space.distance(points[static_cast<std::size_t>(i)].data(), points[static_cast<std::size_t>(j)].data());
  return FiniteMetric(std::move(d));
}

FiniteMetric FiniteMetric::cycle(int m) {
  Mat d = Mat::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) d(i, j) = std::min(std::abs(i - j), m - std::abs(i - j));
  return FiniteMetric(std::move(d));
}

FiniteMetric FiniteMetric::restrict(const std::vector<int>& subset) const {
  const auto k = static_cast<Eigen::Index>(subset.size());
  Mat d(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) d(a, b) = d_(subset[static_cast<std::size_t>(a)], subset[static_cast<std::size_t>(b)]);
  return FiniteMetric(std::move(d));
}

double distance_distortion(const FiniteMetric& d, const Mat& image) {
  double hi = 0.0;
  double lo = kInf;
  for (int i = 0; i < d.size(); ++i)
    for (int j = i + 1; j < d.size(); ++j) {
      const double r = image(i, j) / d(i, j);
      hi = std::max(hi, r);
      lo = std::min(lo, r);
    }
  if (d.size() < 2) return 1.0;
  return lo > 0.0 ? hi / lo : kInf;
}

double embedding_distortion(const FiniteMetric& d, const Mat& points) { return distance_distortion(d, pairwise_l2(points)); }

DistortionCertificate c1_exact(const FiniteMetric& d) {
  const int m = d.size();
  if (m > 10) throw Error("cap-exceeded", "c1 via cuts supports at most 10 points");
  DistortionCertificate cert;
  cert.method = "cut-lp";
  if (m < 2) {
    cert.value = cert.witness_value = 1.0;
    return cert;
  }
  // Cut S is encoded by a mask over points 1..m-1 (point 0 is never in S).
  const int cuts = (1 << (m - 1)) - 1;
  auto separates = [](int mask, int i, int j) {
    const bool a = i > 0 && ((mask >> (i - 1)) & 1);
    const bool b = j > 0 && ((mask >> (j - 1)) & 1);
    return a != b;
  };
  LinearProgram lp;
  lp.objective.assign(static_cast<std::size_t>(cuts + 1), 0.0);
  lp.objective.back() = 1.0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      LinearProgram::Row lower;
      LinearProgram::Row upper;
      lower.coeffs.assign(static_cast<std::size_t>(cuts + 1), 0.0);
      upper.coeffs.assign(static_cast<std::size_t>(cuts + 1), 0.0);
      for (int c = 0; c < cuts; ++c)
        if (separates(c + 1, i, j)) lower.coeffs[static_cast<std::size_t>(c)] = upper.coeffs[static_cast<std::size_t>(c)] = 1.0;
      lower.sense = Sense::greater_equal;
      lower.rhs = d(i, j);
      upper.coeffs.back() = -d(i, j);
      upper.sense = Sense::less_equal;
      lp.rows.push_back(std::move(lower));
      lp.rows.push_back(std::move(upper));
    }
  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::optimal)
    throw Error("solver-failure", "cut LP did not reach an optimum (status " + std::to_string(static_cast<int>(sol.status)) + ")");
  cert.value = sol.objective;
  cert.tolerance = 1e-8 * std::max(1.0, cert.value);
  Mat image = Mat::Zero(m, m);
  for (int c = 0; c < cuts; ++c) {
    const double w = sol.x[static_cast<std::size_t>(c)];
    if (w <= 0.0) continue;
    Cut cut;
    cut.weight = w;
    for (int i = 1; i < m; ++i)
      if (((c + 1) >> (i - 1)) & 1) cut.side.push_back(i);
    cert.cuts.push_back(std::move(cut));
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (separates(c + 1, i, j)) image(i, j) = image(j, i) = image(i, j) + w;
  }
  cert.witness_value = distance_distortion(d, image);
  cert.lower_bound = cert.value;
  return cert;
}

double c2_dual_bound(const FiniteMetric& d, const Mat& P) {
  double pos = 0.0;
  double neg = 0.0;
  for (int i = 0; i < d.size(); ++i)
    for (int j = i + 1; j < d.size(); ++j) {
      const double w = P(i, j) * d(i, j) * d(i, j);
      if (w > 0.0) pos += w;
      else neg -= w;
    }
  if (!(neg > 0.0)) return 1.0;
  return std::max(1.0, std::sqrt(pos / neg));
}

namespace {

struct Feasibility {
  Mat points;
  Mat W;  // a - P_K(a) at the last box point
  double audited = kInf;
};

Feasibility eta_feasibility(const Mat& d2, double eta, int iterations) {
  const auto m = static_cast<int>(d2.rows());
  const Mat J = centering(m);
  auto box = [&](const Mat& E) {
    Mat a = E;
    for (int i = 0; i < m; ++i) {
      a(i, i) = 0.0;
      for (int j = 0; j < m; ++j)
        if (i != j) a(i, j) = std::clamp(0.5 * (E(i, j) + E(j, i)), d2(i, j), eta * d2(i, j));
    }
    return a;
  };
  auto cone = [&](const Mat& E) {
    Eigen::SelfAdjointEigenSolver<Mat> es(J * E * J);
    const Mat plus = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() * es.eigenvectors().transpose();
    return Mat(E - plus);
  };
  Mat a = box(0.5 * (1.0 + eta) * d2);
  Mat b = cone(a);
  double prev = kInf;
  for (int it = 0; it < iterations; ++it) {
    a = box(b);
    b = cone(a);
    const double gap = (a - b).norm();
    if (gap < 1e-13 || std::abs(prev - gap) < 1e-15 * std::max(1.0, gap)) break;
    prev = gap;
  }
  Feasibility f;
  f.W = a - b;
  f.points = factor_gram(-0.5 * J * b * J);
  return f;
}

}  // namespace

DistortionCertificate c2_exact(const FiniteMetric& d) {
  const int m = d.size();
  if (m > 12) throw Error("cap-exceeded", "c2 via the SDP supports at most 12 points");
  DistortionCertificate cert;
  if (m < 2) {
    cert.method = "sdp";
    cert.value = cert.witness_value = cert.lower_bound = 1.0;
    cert.embedding = Mat::Zero(m, 1);
    return cert;
  }
  const double scale = d.matrix().maxCoeff();
  const Mat d2 = (d.matrix() / scale).cwiseAbs2();
  double dmin = kInf;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) dmin = std::min(dmin, d(i, j) / scale);

  // Regular simplex images: distortion max d / min d.
  cert.embedding = Mat::Identity(m, m) * (scale / std::sqrt(2.0));
  cert.value = 1.0 / dmin;
  cert.lower_bound = 1.0;
  const Mat J = centering(m);
  double lo = 1.0;
  double hi = cert.value * cert.value;
  for (int step = 0; step < 60 && hi - lo > 1e-10 * hi; ++step) {
    const double eta = 0.5 * (lo + hi);
    Feasibility f = eta_feasibility(d2, eta, 20000);
    const double audited = embedding_distortion(d, f.points);
    if (audited < cert.value) {
      cert.value = audited;
      cert.embedding = f.points * scale;
    }
    if (audited <= std::sqrt(eta) * (1.0 + 1e-9)) {
      hi = std::min(eta, audited * audited);
      continue;
    }
    lo = eta;
    // Dual matrix from the separating direction, shifted into the PSD cone.
    Mat P = f.W;
    for (int i = 0; i < m; ++i) P(i, i) = 0.0;
    for (int i = 0; i < m; ++i) P(i, i) = -P.row(i).sum();
    Eigen::SelfAdjointEigenSolver<Mat> es(P);
    const double shift = std::max(0.0, -es.eigenvalues().minCoeff());
    P += shift * J;
    const double bound = c2_dual_bound(d, P);
    if (bound > cert.lower_bound) {
      cert.lower_bound = bound;
      cert.dual = P;
    }
  }
  cert.witness_value = embedding_distortion(d, cert.embedding);
  cert.gap = cert.value - cert.lower_bound;
  cert.tolerance = 1e-3;
  cert.method = cert.gap <= cert.tolerance ? "sdp" : "approximate";
  return cert;
}

SnowflakeEmbedding snowflake_embed(const std::vector<Vec>& points, double delta) {
  const auto m = static_cast<Eigen::Index>(points.size());
  if (m < 1) throw Error("invalid-argument", "snowflake needs at least one point");
  Mat d = Mat::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      d(i, j) = (points[static_cast<std::size_t>(i)] - points[static_cast<std::size_t>(j)]).lpNorm<1>();
  Mat G(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) G(i, j) = 0.5 * (d(i, 0) + d(j, 0) - d(i, j));
  SnowflakeEmbedding out;
  out.points = factor_gram(G, &out.min_eigenvalue);
  if (out.min_eigenvalue < -1e-8) {
    std::ostringstream os;
    os << "snowflake Gram matrix has eigenvalue " << out.min_eigenvalue;
    throw Error("not-negative-type", os.str());
  }
  double hi = 0.0;
  double lo = kInf;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double img = (out.points.row(i) - out.points.row(j)).norm();
      out.max_error = std::max(out.max_error, std::abs(img - std::sqrt(d(i, j))));
      if (d(i, j) > 0.0) {
        hi = std::max(hi, img / d(i, j));
        lo = std::min(lo, img / d(i, j));
      }
    }
  out.distortion = m < 2 ? 1.0 : hi / lo;
  out.bound = delta > 0.0 ? std::sqrt(2.0 / delta) : kInf;
  return out;
}

}  // namespace lipnet
