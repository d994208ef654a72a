#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace lipnet {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Error carrying a stable machine-readable code (e.g. "net-too-large").
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }
  /// what() without the "code: " prefix.
  std::string message() const { return std::string(what()).substr(code_.size() + 2); }

 private:
  std::string code_;
};

/// Seeded generator with a library-independent uniform mapping, so that
/// sampled checks are reproducible across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t next() { return engine_(); }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }

  // Box-Muller; only used for direction sampling.
  double normal();

 private:
  std::mt19937_64 engine_;
};

inline double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace lipnet
