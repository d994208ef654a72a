#include "lipnet/lattice.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>

namespace lipnet {

std::size_t LatticeBox::size() const {
  std::size_t s = 1;
  for (int i = 0; i < dim; ++i) s *= static_cast<std::size_t>(count[i]);
  return s;
}

void LatticeBox::coords(std::size_t idx, long* k) const {
  for (int i = dim - 1; i >= 0; --i) {
    const auto c = static_cast<std::size_t>(count[i]);
    k[i] = lo[i] + static_cast<long>(idx % c);
    idx /= c;
  }
}

void LatticeBox::point(std::size_t idx, double* x) const {
  long k[3];
  coords(idx, k);
  for (int i = 0; i < dim; ++i) x[i] = h * static_cast<double>(k[i]);
}

std::size_t LatticeBox::index_of(const long* k) const {
  std::size_t idx = 0;
  for (int i = 0; i < dim; ++i) {
    const long r = k[i] - lo[i];
    if (r < 0 || r >= count[i]) return npos;
    idx = idx * static_cast<std::size_t>(count[i]) + static_cast<std::size_t>(r);
  }
  return idx;
}

LatticeBox LatticeBox::covering(int dim, double h, double half_width) {
  if (dim < 1 || dim > 3) throw Error("invalid-dimension", "lattice work supports dimensions 1 to 3");
  if (!(h > 0.0)) throw Error("invalid-spacing", "lattice spacing must be positive");
  LatticeBox b;
  b.dim = dim;
  b.h = h;
  const long k = static_cast<long>(std::ceil(half_width / h - 1e-9));
  for (int i = 0; i < dim; ++i) {
    b.lo[i] = -k;
    b.count[i] = 2 * k + 1;
  }
  return b;
}

long good_fft_size(long n) {
  if (n <= 1) return 1;
  for (long m = n;; ++m) {
    long r = m;
    for (long p : {2L, 3L, 5L, 7L})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

namespace {

struct FftwBuffer {
  void* ptr = nullptr;
  explicit FftwBuffer(std::size_t bytes) : ptr(fftw_malloc(bytes)) {
    if (!ptr) throw Error("out-of-memory", "FFT buffer allocation failed");
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
};

}  // namespace

struct FftConvolver::Impl {
  int dim = 0;
  int M[3] = {1, 1, 1};
  std::size_t real_size = 1;
  std::size_t complex_size = 1;
  FftwBuffer real;
  FftwBuffer spec;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::vector<std::vector<std::complex<double>>> input_spectra;

  Impl(int d, const int* m, std::size_t rs, std::size_t cs)
      : dim(d), real_size(rs), complex_size(cs), real(rs * sizeof(double)), spec(cs * sizeof(fftw_complex)) {
    for (int i = 0; i < d; ++i) M[i] = m[i];
    forward = fftw_plan_dft_r2c(d, M, static_cast<double*>(real.ptr), static_cast<fftw_complex*>(spec.ptr),
                                FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r(d, M, static_cast<fftw_complex*>(spec.ptr), static_cast<double*>(real.ptr),
                                 FFTW_ESTIMATE);
  }
  ~Impl() {
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }

  double* r() { return static_cast<double*>(real.ptr); }
  std::complex<double>* c() { return static_cast<std::complex<double>*>(spec.ptr); }
};

FftConvolver::FftConvolver(const LatticeBox& in, const LatticeBox& out) : in_(in), out_(out) {
  if (in.dim != out.dim || std::abs(in.h - out.h) > 1e-15 * in.h)
    throw Error("invalid-lattice", "convolution boxes must share dimension and spacing");
  int M[3] = {1, 1, 1};
  std::size_t rs = 1;
  std::size_t cs = 1;
  for (int i = 0; i < in.dim; ++i) {
    M[i] = static_cast<int>(good_fft_size(in.count[i] + out.count[i] - 1));
    rs *= static_cast<std::size_t>(M[i]);
    cs *= static_cast<std::size_t>(i == in.dim - 1 ? M[i] / 2 + 1 : M[i]);
  }
  impl_ = std::make_unique<Impl>(in.dim, M, rs, cs);
}

FftConvolver::~FftConvolver() = default;

void FftConvolver::set_input(const GridField& field) {
  if (field.box.size() != in_.size() || field.box.lo != in_.lo || field.box.count != in_.count)
    throw Error("invalid-lattice", "input field does not match the convolver box");
  auto& I = *impl_;
  I.input_spectra.assign(static_cast<std::size_t>(field.comps), {});
  const int d = in_.dim;
  for (int c = 0; c < field.comps; ++c) {
    std::memset(I.r(), 0, I.real_size * sizeof(double));
    const double* src = field.comp(c);
    const std::size_t n = in_.size();
    long k[3];
    for (std::size_t idx = 0; idx < n; ++idx) {
      in_.coords(idx, k);
      std::size_t dst = 0;
      for (int i = 0; i < d; ++i) dst = dst * static_cast<std::size_t>(I.M[i]) + static_cast<std::size_t>(k[i] - in_.lo[i]);
      I.r()[dst] = src[idx];
    }
    fftw_execute(I.forward);
    I.input_spectra[static_cast<std::size_t>(c)].assign(I.c(), I.c() + I.complex_size);
  }
}

GridField FftConvolver::apply(const Kernel& kernel) const { return apply(std::vector<Kernel>{kernel}).front(); }

std::vector<GridField> FftConvolver::apply(const std::vector<Kernel>& kernels) const {
  auto& I = *impl_;
  if (I.input_spectra.empty()) throw Error("invalid-lattice", "convolver has no input");
  const int d = in_.dim;
  const int comps = static_cast<int>(I.input_spectra.size());
  const double scale = 1.0 / static_cast<double>(I.real_size);
  // Kernel index i along an axis holds offset (out.lo - in.lo + i - (N_in - 1)) h;
  // the result for output j sits at circular index j + N_in - 1.
  long base[3] = {0, 0, 0};
  long extent[3] = {1, 1, 1};
  for (int i = 0; i < d; ++i) {
    base[i] = out_.lo[i] - in_.lo[i] - (in_.count[i] - 1);
    extent[i] = in_.count[i] + out_.count[i] - 1;
  }
  std::vector<GridField> result;
  result.reserve(kernels.size());
  std::vector<std::complex<double>> kspec;
  for (const auto& kernel : kernels) {
    std::memset(I.r(), 0, I.real_size * sizeof(double));
    long e[3] = {0, 0, 0};
    double off[3] = {0, 0, 0};
    const std::size_t total = static_cast<std::size_t>(extent[0]) * static_cast<std::size_t>(extent[1]) *
                              static_cast<std::size_t>(extent[2]);
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rem = flat;
      for (int i = d - 1; i >= 0; --i) {
        e[i] = static_cast<long>(rem % static_cast<std::size_t>(extent[i]));
        rem /= static_cast<std::size_t>(extent[i]);
      }
      std::size_t dst = 0;
      for (int i = 0; i < d; ++i) {
        off[i] = in_.h * static_cast<double>(base[i] + e[i]);
        dst = dst * static_cast<std::size_t>(I.M[i]) + static_cast<std::size_t>(e[i]);
      }
      I.r()[dst] = kernel(off);
    }
    fftw_execute(I.forward);
    kspec.assign(I.c(), I.c() + I.complex_size);

    GridField out(out_, comps);
    const std::size_t nout = out_.size();
    for (int c = 0; c < comps; ++c) {
      const auto& fs = I.input_spectra[static_cast<std::size_t>(c)];
      for (std::size_t q = 0; q < I.complex_size; ++q) I.c()[q] = fs[q] * kspec[q];
      fftw_execute(I.backward);
      double* dst = out.comp(c);
      long k[3];
      for (std::size_t idx = 0; idx < nout; ++idx) {
        out_.coords(idx, k);
        std::size_t src = 0;
        for (int i = 0; i < d; ++i)
          src = src * static_cast<std::size_t>(I.M[i]) +
                static_cast<std::size_t>(k[i] - out_.lo[i] + in_.count[i] - 1);
        dst[idx] = I.r()[src] * scale;
      }
    }
    result.push_back(std::move(out));
  }
  return result;
}

}  // namespace lipnet
