#pragma once

#include "lipnet/common.hpp"

#include <string>
#include <vector>

namespace lipnet {

/// A positive number kept as its base-10 logarithm.
struct LogValue {
  double log10 = 0.0;
  double mantissa() const;  ///< in [1, 10)
  long exponent() const;
  double value() const;     ///< may under- or overflow
  std::string str() const;  ///< "m.mmmmmme+X"
};
LogValue from_log10(double l);
LogValue from_value(double v);

/// exp(-exp(loglog)), for bounds of the form exp(-(a)^b).
struct DoubleExp {
  double loglog = 0.0;  ///< natural log of the inner exponent
  LogValue as_log() const;  ///< log10 value = -exp(loglog) / ln 10
};

enum class BoundKind { thm11, refined, lp, recipe };
BoundKind parse_bound_kind(const std::string& text);
std::string to_string(BoundKind k);

struct BoundRequest {
  int n = 2;
  double eps = 0.5;
  double D = 1.0;
  BoundKind which = BoundKind::recipe;
  double C = 1.0;      ///< unspecified universal constant, user supplied
  double kappa = 1.0;  ///< unspecified universal constant, user supplied
  double cY = 1.0;     ///< distortion c_Y(X) for the refined bound
  double c = 300.0;    ///< recipe constant
  /// Throws "invalid-argument" unless n >= 2, eps in (0,1), D >= 1, C, kappa > 0, cY >= 1.
  void validate() const;
};

struct RecipeParams {
  LogValue A;          ///< (eps / cD)^(5n)
  LogValue R_plus_1;   ///< (cD / eps)^(4n)
  LogValue m_plus_1;   ///< floor((cD / eps)^(n+1)) (log form)
  double m = 0.0;      ///< exact when below 2^53, otherwise NaN
  LogValue t_lower;    ///< A / (R+1)^(m+1)
  LogValue t_upper;    ///< A
  LogValue delta_threshold;  ///< (eps / cD)^(12 (cD/eps)^(n+1))
  /// (R+1) A <= (eps/cD)^n < eps / (25 sqrt n), checked in log space.
  bool scale_chain_ok = false;
  double scale_chain_lhs = 0.0;   ///< log10 (R+1) A
  double scale_chain_mid = 0.0;   ///< log10 (eps/cD)^n
  double scale_chain_rhs = 0.0;   ///< log10 eps / (25 sqrt n)
  /// Whether the lower end of the scan, A/(R+1)^(m+1), stays above delta_threshold.
  bool t_range_within_threshold = false;
};

struct BoundReport {
  BoundRequest request;
  std::vector<std::string> warnings;
  LogValue delta;          ///< the requested lower bound on delta
  DoubleExp delta_double;  ///< for thm11 and refined
  RecipeParams recipe;     ///< filled for the recipe
  LogValue factorization_threshold;  ///< kappa eps^2 / (n^2 D)
  LogValue desk_threshold;           ///< eps^2 / (30 n^2 D)
};

BoundReport compute_bounds(const BoundRequest& req);

}  // namespace lipnet
