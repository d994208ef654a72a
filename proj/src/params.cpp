#include "lipnet/params.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace lipnet {

namespace {

const double kLn10 = std::log(10.0);

}  // namespace

double LogValue::mantissa() const { return std::pow(10.0, log10 - std::floor(log10)); }
long LogValue::exponent() const { return static_cast<long>(std::floor(log10)); }
double LogValue::value() const { return std::pow(10.0, log10); }

std::string LogValue::str() const {
  if (!std::isfinite(log10)) return log10 > 0 ? "inf" : "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6fe%+ld", mantissa(), exponent());
  return buf;
}

LogValue from_log10(double l) { return LogValue{l}; }
LogValue from_value(double v) {
  if (!(v > 0.0)) throw Error("invalid-argument", "log form needs a positive value");
  return LogValue{std::log10(v)};
}

LogValue DoubleExp::as_log() const { return LogValue{-std::exp(loglog) / kLn10}; }

BoundKind parse_bound_kind(const std::string& text) {
  if (text == "thm11") return BoundKind::thm11;
  if (text == "refined") return BoundKind::refined;
  if (text == "lp") return BoundKind::lp;
  if (text == "recipe") return BoundKind::recipe;
  throw Error("usage", "which must be thm11, refined, lp or recipe, got '" + text + "'");
}

std::string to_string(BoundKind k) {
  switch (k) {
    case BoundKind::thm11: return "thm11";
    case BoundKind::refined: return "refined";
    case BoundKind::lp: return "lp";
    case BoundKind::recipe: return "recipe";
  }
  return "?";
}

void BoundRequest::validate() const {
  if (n < 2) throw Error("invalid-argument", "n must be at least 2");
  if (!(eps > 0.0 && eps < 1.0)) throw Error("invalid-argument", "eps must lie in (0, 1)");
  if (!(D >= 1.0) || !std::isfinite(D)) throw Error("invalid-argument", "D must be a finite number >= 1");
  if (!(C > 0.0) || !(kappa > 0.0)) throw Error("invalid-argument", "C and kappa must be positive");
  if (!(cY >= 1.0)) throw Error("invalid-argument", "c_Y(X) must be >= 1");
  if (!(c > 0.0)) throw Error("invalid-argument", "recipe constant must be positive");
}

BoundReport compute_bounds(const BoundRequest& req) {
  req.validate();
  BoundReport r;
  r.request = req;
  const double n = req.n;
  if (req.C == 1.0 || req.kappa == 1.0)
    r.warnings.push_back("universal constants C and kappa have no known value; defaults of 1 are placeholders");
  r.factorization_threshold = from_log10(std::log10(req.kappa) + 2.0 * std::log10(req.eps) - 2.0 * std::log10(n) - std::log10(req.D));
  r.desk_threshold = from_log10(2.0 * std::log10(req.eps) - std::log10(30.0) - 2.0 * std::log10(n) - std::log10(req.D));

  switch (req.which) {
    case BoundKind::thm11:
      r.delta_double.loglog = req.C * n * std::log(n / req.eps);
      r.delta = r.delta_double.as_log();
      break;
    case BoundKind::refined:
      r.delta_double.loglog = req.C * n * std::log(req.cY / req.eps);
      r.delta = r.delta_double.as_log();
      break;
    case BoundKind::lp:
      r.delta = from_log10(std::log10(req.kappa) + 2.0 * std::log10(req.eps) - 2.5 * std::log10(n));
      break;
    case BoundKind::recipe: {
      RecipeParams& p = r.recipe;
      const double L = std::log10(req.eps / (req.c * req.D));  // < 0
      p.A = from_log10(5.0 * n * L);
      p.R_plus_1 = from_log10(-4.0 * n * L);
      const double q_log = -(n + 1.0) * L;  // log10 (cD/eps)^(n+1)
      const double q = std::pow(10.0, q_log);
      if (q < 9007199254740992.0) {
        // Round first so that exact powers are not pushed below an integer.
        const double near = std::round(q);
        const double fl = std::abs(q - near) <= 1e-9 * near ? near : std::floor(q);
        p.m = fl - 1.0;
        p.m_plus_1 = from_log10(std::log10(fl));
      } else {
        p.m = std::numeric_limits<double>::quiet_NaN();
        p.m_plus_1 = from_log10(q_log);
      }
      const double m_plus_1 = std::pow(10.0, p.m_plus_1.log10);
      p.t_upper = p.A;
      p.t_lower = from_log10(p.A.log10 - m_plus_1 * p.R_plus_1.log10);
      p.delta_threshold = from_log10(12.0 * q * L);
      p.scale_chain_lhs = p.R_plus_1.log10 + p.A.log10;
      p.scale_chain_mid = n * L;
      p.scale_chain_rhs = std::log10(req.eps / (25.0 * std::sqrt(n)));
      p.scale_chain_ok = p.scale_chain_lhs <= p.scale_chain_mid + 1e-9 * std::abs(p.scale_chain_mid) &&
                         p.scale_chain_mid < p.scale_chain_rhs;
      p.t_range_within_threshold = p.t_lower.log10 >= p.delta_threshold.log10;
      r.delta = p.delta_threshold;
      break;
    }
  }
  return r;
}

}  // namespace lipnet
