#pragma once

#include "lipnet/extension.hpp"
#include "lipnet/lattice.hpp"
#include "lipnet/normed_space.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace lipnet {

/// Gamma((n+1)/2) / pi^((n+1)/2).
double poisson_constant(int n);
/// Surface area of the unit Euclidean sphere in R^n.
double sphere_area(int n);

/// c_n t / (t^2 + |x|_2^2)^((n+1)/2). Throws "domain" when t <= 0.
double kernel_eval(int n, double t, const double* x);
double kernel_eval(double t, const Vec& x);
/// -c_n t (n+1) x / (t^2 + |x|_2^2)^((n+3)/2).
void kernel_grad(int n, double t, const double* x, double* out);
Vec kernel_grad(double t, const Vec& x);

/// Composite 16-point Gauss-Legendre rule on [a, b] with `panels` panels.
double integrate(const std::function<double(double)>& f, double a, double b, int panels);

/// Mass of P_t outside the Euclidean ball of radius r, by quadrature of the
/// radial profile after the substitution r = t tan(phi).
double euclidean_tail(int n, double t, double r);

/// Integral of P_t over R^n: geometric-panel Gauss-Legendre rule on the
/// radial profile up to 1e6 t, plus the exact Euclidean tail beyond.
double kernel_mass(int n, double t);

struct TailMass {
  double bound = 0.0;       ///< t sqrt(n) / r
  double quadrature = 0.0;  ///< mass outside r B_X averaged over directions
};

/// Mass of P_t outside r B_X. The quadrature averages the Euclidean tail at
/// radius r / |theta|_X over a deterministic set of directions theta.
TailMass tail_mass(const NormedSpace& space, double t, double r);

/// Integral of |P_t(x) - P_t(x + y)| over R^n for |y|_2 = shift, by a 2-D
/// cylindrical rule around the axis of y (1-D when n = 1).
double kernel_shift_integral(int n, double t, double shift);
inline double kernel_shift_bound(int n, double t, double shift) { return std::sqrt(double(n)) * shift / t; }

/// F sampled on a lattice covering its support.
class FieldSamples {
 public:
  /// Samples h on the lattice and averages it over the lattice nodes of
  /// tau B_X. The discrepancy with the pointwise F is measured at `probes`
  /// lattice points and reported as sampling_error().
  FieldSamples(const AlmostExtension& ext, double spacing, int probes = 32, std::uint64_t seed = 11);
  /// Explicit lattice values (used for oracles and nested convolutions).
  FieldSamples(SpacePtr space, GridField values, TargetNorm target, double sampling_error);

  const NormedSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  const GridField& grid() const { return grid_; }
  const LatticeBox& box() const { return grid_.box; }
  int dim() const { return grid_.box.dim; }
  int target_dim() const { return grid_.comps; }
  double spacing() const { return grid_.box.h; }
  TargetNorm target() const { return target_; }
  double sampling_error() const { return sampling_error_; }
  /// Lattice approximation of the L1 norm of |F|_Y.
  double l1_norm() const { return l1_; }
  /// Lattice approximation of the volume where F is nonzero.
  double support_volume() const { return support_volume_; }
  /// Largest coordinate magnitude of a lattice point carrying a nonzero value.
  double support_half_width() const { return support_half_width_; }

  /// Direct lattice sum of P_t against the samples at x; `stride` 2 uses
  /// the even sublattice with doubled weights. Writes the value (length m)
  /// and, if jac is non-null, the m x n Jacobian (column-major).
  void sum(double t, const double* x, double* value, double* jac, int stride = 1) const;

 private:
  void summarize();

  SpacePtr space_;
  GridField grid_;
  TargetNorm target_;
  double sampling_error_ = 0.0;
  double l1_ = 0.0;
  double support_volume_ = 0.0;
  double support_half_width_ = 0.0;
  std::vector<std::size_t> nonzero_;
};

using FieldPtr = std::shared_ptr<const FieldSamples>;

/// The evolute P_t * F of lattice samples, with error estimates.
class Evolute {
 public:
  /// Throws "scale-unresolved" when t < 2h, since the stride-2 comparison
  /// would not resolve the kernel.
  Evolute(FieldPtr field, double t, int probes = 12, std::uint64_t seed = 5);

  double t() const { return t_; }
  const FieldSamples& field() const { return *field_; }
  const FieldPtr& field_ptr() const { return field_; }

  Vec value(const Vec& x) const;
  /// m x n, columns are the partial derivatives.
  Mat jacobian(const Vec& x) const;
  Vec derivative(const Vec& x, const Vec& a) const { return jacobian(x) * a; }

  /// Max stride-1 vs stride-2 discrepancy at probe points plus the sampling
  /// error of F.
  double value_error() const { return value_error_; }
  /// Same for the Jacobian entries, with sampling error scaled by
  /// sqrt(2n/pi)/t (the L1 norm bound of grad P_t).
  double derivative_error() const { return derivative_error_; }

 private:
  FieldPtr field_;
  double t_;
  double value_error_ = 0.0;
  double derivative_error_ = 0.0;
};

/// Evolute restricted to t in (0, 1/2]; throws "domain".
Evolute convolve(FieldPtr field, double t);

/// FFT evaluation of evolutes and their partials on a fixed output box.
class GridEvaluator {
 public:
  GridEvaluator(FieldPtr field, const LatticeBox& out);

  const LatticeBox& out_box() const { return conv_.out_box(); }
  GridField values(double t) const;
  /// One field per partial derivative, each with m components.
  std::vector<GridField> partials(double t) const;

 private:
  FieldPtr field_;
  FftConvolver conv_;
};

/// Scalar field |sum_i a_i partials[i]|_Y.
GridField direction_norm(const std::vector<GridField>& partials, const Vec& a, TargetNorm target);

/// Bound on the integral of |(grad P_t . a) * F|_Y outside a Euclidean distance
/// d from the support: l1 |a|_2 (n+1) c_n s_{n-1} t / (2 d^2).
double derivative_far_integral(const FieldSamples& F, double t, const Vec& a, double d);
/// Pointwise bound on |(grad P_t . a) * F|_Y at Euclidean distance d from the support.
double derivative_far_value(const FieldSamples& F, double t, const Vec& a, double d);

}  // namespace lipnet
