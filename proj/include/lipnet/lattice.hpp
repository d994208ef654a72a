#pragma once

#include "lipnet/common.hpp"

#include <array>
#include <complex>
#include <functional>
#include <memory>
#include <vector>

namespace lipnet {

/// Axis-aligned block of the lattice h Z^n (n <= 3). Point k has coordinates
/// h * (lo + k); storage is row-major with the last axis fastest.
struct LatticeBox {
  int dim = 0;
  double h = 0.0;
  std::array<long, 3> lo{0, 0, 0};
  std::array<long, 3> count{1, 1, 1};

  std::size_t size() const;
  void point(std::size_t idx, double* x) const;
  /// Absolute lattice coordinates of a flat index.
  void coords(std::size_t idx, long* k) const;
  /// Flat index of absolute lattice coordinates, or npos when outside.
  std::size_t index_of(const long* k) const;

  /// Smallest box containing [-half_width, half_width]^n.
  static LatticeBox covering(int dim, double h, double half_width);

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Vector-valued samples on a lattice box, stored component-major.
struct GridField {
  LatticeBox box;
  int comps = 0;
  std::vector<double> data;

  GridField() = default;
  GridField(const LatticeBox& b, int c) : box(b), comps(c), data(b.size() * static_cast<std::size_t>(c), 0.0) {}

  double* comp(int c) { return data.data() + static_cast<std::size_t>(c) * box.size(); }
  const double* comp(int c) const { return data.data() + static_cast<std::size_t>(c) * box.size(); }
  double at(int c, std::size_t idx) const { return data[static_cast<std::size_t>(c) * box.size() + idx]; }
};

/// Smallest integer >= n whose prime factors are in {2, 3, 5, 7}.
long good_fft_size(long n);

/// Linear lattice convolution out(x) = sum_y K(x - y) in(y) between two boxes
/// of equal spacing, by zero-padded FFT. Input spectra are cached so that
/// several kernels can be applied to the same field.
class FftConvolver {
 public:
  FftConvolver(const LatticeBox& in, const LatticeBox& out);
  ~FftConvolver();
  FftConvolver(const FftConvolver&) = delete;
  FftConvolver& operator=(const FftConvolver&) = delete;

  void set_input(const GridField& field);

  using Kernel = std::function<double(const double* offset)>;

  /// Convolves every input component with the kernel.
  GridField apply(const Kernel& kernel) const;
  /// Convolves with several kernels at once; result[k] belongs to kernels[k].
  std::vector<GridField> apply(const std::vector<Kernel>& kernels) const;

  const LatticeBox& in_box() const { return in_; }
  const LatticeBox& out_box() const { return out_; }

 private:
  struct Impl;
  LatticeBox in_;
  LatticeBox out_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace lipnet
