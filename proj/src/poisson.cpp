#include "lipnet/poisson.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace lipnet {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct GaussLegendre {
  std::array<double, 16> x{};
  std::array<double, 16> w{};
  GaussLegendre() {
    const int n = 16;
    for (int i = 0; i < n; ++i) {
      double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0;
        double p1 = z;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      x[static_cast<std::size_t>(i)] = z;
      w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }
};

const GaussLegendre& gl() {
  static const GaussLegendre rule;
  return rule;
}

void require_t(double t) {
  if (!(t > 0.0)) throw Error("domain", "Poisson kernel needs t > 0");
}

}  // namespace

double poisson_constant(int n) {
  return std::tgamma((n + 1) / 2.0) / std::pow(kPi, (n + 1) / 2.0);
}

double sphere_area(int n) { return n * std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0 + 1.0); }

double kernel_eval(int n, double t, const double* x) {
  require_t(t);
  double r2 = 0.0;
  for (int i = 0; i < n; ++i) r2 += x[i] * x[i];
  return poisson_constant(n) * t / std::pow(t * t + r2, (n + 1) / 2.0);
}

double kernel_eval(double t, const Vec& x) { return kernel_eval(static_cast<int>(x.size()), t, x.data()); }

void kernel_grad(int n, double t, const double* x, double* out) {
  require_t(t);
  double r2 = 0.0;
  for (int i = 0; i < n; ++i) r2 += x[i] * x[i];
  const double f = -poisson_constant(n) * t * (n + 1) / std::pow(t * t + r2, (n + 3) / 2.0);
  for (int i = 0; i < n; ++i) out[i] = f * x[i];
}

Vec kernel_grad(double t, const Vec& x) {
  Vec g(x.size());
  kernel_grad(static_cast<int>(x.size()), t, x.data(), g.data());
  return g;
}

double integrate(const std::function<double(double)>& f, double a, double b, int panels) {
  const auto& rule = gl();
  const double w = (b - a) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * w;
    double ps = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) ps += rule.w[i] * f(mid + 0.5 * w * rule.x[i]);
    s += 0.5 * w * ps;
  }
  return s;
}

double euclidean_tail(int n, double t, double r) {
  require_t(t);
  if (r <= 0.0) return 1.0;
  const double phi0 = std::atan(r / t);
  const double norm = poisson_constant(n) * sphere_area(n);
  const double s = integrate([n](double phi) { return std::pow(std::sin(phi), n - 1); }, phi0, kPi / 2, 4);
  return std::clamp(norm * s, 0.0, 1.0);
}

double kernel_mass(int n, double t) {
  require_t(t);
  const double cs = poisson_constant(n) * sphere_area(n);
  auto profile = [&](double r) { return cs * t * std::pow(r, n - 1) / std::pow(t * t + r * r, (n + 1) / 2.0); };
  double lo = 0.0;
  double mass = 0.0;
  for (int k = -8; k <= 20; ++k) {
    const double hi = t * std::ldexp(1.0, k);
    mass += integrate(profile, lo, hi, 1);
    lo = hi;
  }
  return mass + euclidean_tail(n, t, lo);
}

TailMass tail_mass(const NormedSpace& space, double t, double r) {
  require_t(t);
  if (!(r > 0.0)) throw Error("domain", "tail radius must be positive");
  const int n = space.dim();
  TailMass m;
  m.bound = t * std::sqrt(double(n)) / r;
  std::vector<double> theta(static_cast<std::size_t>(n));
  double sum = 0.0;
  std::size_t count = 0;
  auto add = [&]() {
    sum += euclidean_tail(n, t, r / space.norm(theta.data()));
    ++count;
  };
  if (n == 1) {
    for (double s : {1.0, -1.0}) {
      theta[0] = s;
      add();
    }
  } else if (n == 2) {
    const int K = 4096;
    for (int k = 0; k < K; ++k) {
      const double a = 2.0 * kPi * (k + 0.5) / K;
      theta[0] = std::cos(a);
      theta[1] = std::sin(a);
      add();
    }
  } else if (n == 3) {
    const int K = 20000;
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < K; ++k) {
      const double z = 1.0 - (2.0 * k + 1.0) / K;
      const double rho = std::sqrt(1.0 - z * z);
      theta[0] = rho * std::cos(golden * k);
      theta[1] = rho * std::sin(golden * k);
      theta[2] = z;
      add();
    }
  } else {
    Rng rng(20240601);
    for (int k = 0; k < 100000; ++k) {
      double s = 0.0;
      for (auto& v : theta) {
        v = rng.normal();
        s += v * v;
      }
      for (auto& v : theta) v /= std::sqrt(s);
      add();
    }
  }
  m.quadrature = sum / static_cast<double>(count);
  return m;
}

double kernel_shift_integral(int n, double t, double shift) {
  require_t(t);
  if (shift <= 0.0) return 0.0;
  const double cn = poisson_constant(n);
  const double b = shift;
  const double s = std::max(t, 0.5 * b);
  const int panels = 48;
  auto P = [&](double z2, double rho2) { return cn * t / std::pow(t * t + z2 + rho2, (n + 1) / 2.0); };
  // z runs on both sides of the bisecting plane z = -b/2, mapped by tan.
  auto z_integrand = [&](double z) {
    if (n == 1) return std::abs(P(z * z, 0.0) - P((z + b) * (z + b), 0.0));
    auto inner = [&](double psi) {
      const double rho = t * std::tan(psi);
      const double jac = t / (std::cos(psi) * std::cos(psi));
      const double rho2 = rho * rho;
      return std::pow(rho, n - 2) * std::abs(P(z * z, rho2) - P((z + b) * (z + b), rho2)) * jac;
    };
    return sphere_area(n - 1) * integrate(inner, 0.0, kPi / 2, panels);
  };
  double total = 0.0;
  for (double side : {-1.0, 1.0}) {
    auto mapped = [&](double phi) {
      const double z = -0.5 * b + side * s * std::tan(phi);
      const double jac = s / (std::cos(phi) * std::cos(phi));
      return z_integrand(z) * jac;
    };
    total += integrate(mapped, 0.0, kPi / 2, panels);
  }
  return total;
}

// ---------------------------------------------------------------------------

FieldSamples::FieldSamples(const AlmostExtension& ext, double spacing, int probes, std::uint64_t seed)
    : space_(ext.map().net().space), target_(ext.map().target()) {
  const int n = ext.dim();
  const int m = ext.target_dim();
  if (n > 3) throw Error("invalid-dimension", "lattice sampling supports n <= 3");
  const NormedSpace& X = *space_;
  const double ext_x = X.coordinate_extent();
  const double tau = ext.tau();
  if (tau < 4.0 * spacing)
    throw Error("scale-unresolved", "lattice spacing too coarse for the averaging radius tau");

  LatticeBox hbox = LatticeBox::covering(n, spacing, 2.0 * ext_x);
  GridField hfield(hbox, m);
  std::vector<double> x(static_cast<std::size_t>(n));
  std::vector<double> out(static_cast<std::size_t>(m));
  for (std::size_t idx = 0; idx < hbox.size(); ++idx) {
    hbox.point(idx, x.data());
    if (X.norm(x.data()) >= 2.0) continue;
    ext.eval_h(x.data(), out.data(), nullptr);
    for (int c = 0; c < m; ++c) hfield.comp(c)[idx] = out[static_cast<std::size_t>(c)];
  }

  // Mask of tau B_X, normalized by its node count.
  LatticeBox mbox = LatticeBox::covering(n, spacing, tau * ext_x);
  std::size_t mask_count = 0;
  for (std::size_t idx = 0; idx < mbox.size(); ++idx) {
    mbox.point(idx, x.data());
    if (X.norm(x.data()) <= tau) ++mask_count;
  }
  const double inv = 1.0 / static_cast<double>(mask_count);

  const double radius = 2.0 + tau;
  LatticeBox fbox = LatticeBox::covering(n, spacing, radius * ext_x);
  {
    FftConvolver conv(hbox, fbox);
    conv.set_input(hfield);
    hfield = GridField();
    grid_ = conv.apply([&](const double* o) { return X.norm(o) <= tau ? inv : 0.0; });
  }
  for (std::size_t idx = 0; idx < fbox.size(); ++idx) {
    fbox.point(idx, x.data());
    if (X.norm(x.data()) > radius * (1.0 + 1e-12))
      for (int c = 0; c < m; ++c) grid_.comp(c)[idx] = 0.0;
  }

  Rng rng(seed);
  Vec p(n);
  for (int k = 0; k < probes; ++k) {
    std::size_t idx = 0;
    do {
      idx = rng.index(fbox.size());
      fbox.point(idx, p.data());
    } while (X.norm(p) > radius);
    const Vec exact = ext.F(p);
    Vec diff(m);
    for (int c = 0; c < m; ++c) diff[c] = grid_.comp(c)[idx] - exact[c];
    sampling_error_ = std::max(sampling_error_, target_norm(target_, diff));
  }
  summarize();
}

FieldSamples::FieldSamples(SpacePtr space, GridField values, TargetNorm target, double sampling_error)
    : space_(std::move(space)), grid_(std::move(values)), target_(target), sampling_error_(sampling_error) {
  if (grid_.box.dim != space_->dim()) throw Error("invalid-lattice", "field dimension does not match the space");
  summarize();
}

void FieldSamples::summarize() {
  const LatticeBox& b = grid_.box;
  const int n = b.dim;
  const int m = grid_.comps;
  const double vol = std::pow(b.h, n);
  std::vector<double> v(static_cast<std::size_t>(m));
  std::vector<double> x(static_cast<std::size_t>(n));
  nonzero_.clear();
  l1_ = 0.0;
  support_half_width_ = 0.0;
  for (std::size_t idx = 0; idx < b.size(); ++idx) {
    bool any = false;
    for (int c = 0; c < m; ++c) {
      v[static_cast<std::size_t>(c)] = grid_.comp(c)[idx];
      any = any || v[static_cast<std::size_t>(c)] != 0.0;
    }
    if (!any) continue;
    nonzero_.push_back(idx);
    l1_ += vol * target_norm(target_, v.data(), m);
    b.point(idx, x.data());
    for (double xi : x) support_half_width_ = std::max(support_half_width_, std::abs(xi));
  }
  support_volume_ = vol * static_cast<double>(nonzero_.size());
}

void FieldSamples::sum(double t, const double* x, double* value, double* jac, int stride) const {
  const LatticeBox& b = grid_.box;
  const int n = b.dim;
  const int m = grid_.comps;
  const double w = std::pow(b.h * stride, n);
  const double cn = poisson_constant(n);
  std::fill(value, value + m, 0.0);
  if (jac) std::fill(jac, jac + m * n, 0.0);
  long k[3];
  double d[3];
  const double t2 = t * t;
  for (std::size_t idx : nonzero_) {
    b.coords(idx, k);
    bool keep = true;
    double r2 = 0.0;
    for (int i = 0; i < n; ++i) {
      if (stride > 1 && k[i] % stride != 0) keep = false;
      d[i] = x[i] - b.h * static_cast<double>(k[i]);
      r2 += d[i] * d[i];
    }
    if (!keep) continue;
    const double q = t2 + r2;
    const double p = cn * t / std::pow(q, (n + 1) / 2.0) * w;
    for (int c = 0; c < m; ++c) value[c] += p * grid_.comp(c)[idx];
    if (jac) {
      const double g = -p * (n + 1) / q;
      for (int i = 0; i < n; ++i)
        for (int c = 0; c < m; ++c) jac[i * m + c] += g * d[i] * grid_.comp(c)[idx];
    }
  }
}

// ---------------------------------------------------------------------------

Evolute::Evolute(FieldPtr field, double t, int probes, std::uint64_t seed) : field_(std::move(field)), t_(t) {
  require_t(t);
  const double h = field_->spacing();
  if (t < 2.0 * h)
    throw Error("scale-unresolved", "t = " + std::to_string(t) + " is below twice the lattice spacing " +
                                        std::to_string(h) + "; refine the lattice");
  const int n = field_->dim();
  const int m = field_->target_dim();
  const double half = std::max(field_->support_half_width(), h);
  Rng rng(seed);
  std::vector<double> v1(static_cast<std::size_t>(m)), v2(static_cast<std::size_t>(m));
  std::vector<double> j1(static_cast<std::size_t>(m * n)), j2(static_cast<std::size_t>(m * n));
  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  double dv = 0.0;
  double dj = 0.0;
  for (int p = 0; p <= probes; ++p) {
    if (p > 0)
      for (auto& xi : x) xi = rng.uniform(-half, half);
    field_->sum(t, x.data(), v1.data(), j1.data(), 1);
    field_->sum(t, x.data(), v2.data(), j2.data(), 2);
    for (int c = 0; c < m; ++c) v1[static_cast<std::size_t>(c)] -= v2[static_cast<std::size_t>(c)];
    dv = std::max(dv, target_norm(field_->target(), v1.data(), m));
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < m; ++c) j1[static_cast<std::size_t>(i * m + c)] -= j2[static_cast<std::size_t>(i * m + c)];
      dj = std::max(dj, target_norm(field_->target(), j1.data() + i * m, m));
    }
  }
  const double grad_l1 = poisson_constant(n) * sphere_area(n) / t;
  value_error_ = dv + field_->sampling_error();
  derivative_error_ = dj + field_->sampling_error() * grad_l1;
}

Vec Evolute::value(const Vec& x) const {
  Vec v(field_->target_dim());
  field_->sum(t_, x.data(), v.data(), nullptr, 1);
  return v;
}

Mat Evolute::jacobian(const Vec& x) const {
  const int m = field_->target_dim();
  Vec v(m);
  Mat J(m, field_->dim());
  field_->sum(t_, x.data(), v.data(), J.data(), 1);
  return J;
}

Evolute convolve(FieldPtr field, double t) {
  if (!(t > 0.0 && t <= 0.5)) throw Error("domain", "convolve requires t in (0, 1/2]");
  return Evolute(std::move(field), t);
}

// ---------------------------------------------------------------------------

GridEvaluator::GridEvaluator(FieldPtr field, const LatticeBox& out)
    : field_(std::move(field)), conv_(field_->box(), out) {
  conv_.set_input(field_->grid());
}

GridField GridEvaluator::values(double t) const {
  require_t(t);
  const int n = field_->dim();
  const double w = std::pow(field_->spacing(), n);
  return conv_.apply([=](const double* o) { return w * kernel_eval(n, t, o); });
}

std::vector<GridField> GridEvaluator::partials(double t) const {
  require_t(t);
  const int n = field_->dim();
  const double w = std::pow(field_->spacing(), n);
  std::vector<FftConvolver::Kernel> kernels;
  for (int i = 0; i < n; ++i)
    kernels.emplace_back([=](const double* o) {
      double g[3];
      kernel_grad(n, t, o, g);
      return w * g[i];
    });
  return conv_.apply(kernels);
}

GridField direction_norm(const std::vector<GridField>& partials, const Vec& a, TargetNorm target) {
  const LatticeBox& b = partials.front().box;
  const int m = partials.front().comps;
  GridField out(b, 1);
  std::vector<double> v(static_cast<std::size_t>(m));
  for (std::size_t idx = 0; idx < b.size(); ++idx) {
    std::fill(v.begin(), v.end(), 0.0);
    for (std::size_t i = 0; i < partials.size(); ++i)
      for (int c = 0; c < m; ++c) v[static_cast<std::size_t>(c)] += a[static_cast<Eigen::Index>(i)] * partials[i].at(c, idx);
    out.data[idx] = target_norm(target, v.data(), m);
  }
  return out;
}

double derivative_far_integral(const FieldSamples& F, double t, const Vec& a, double d) {
  const int n = F.dim();
  return F.l1_norm() * a.norm() * (n + 1) * poisson_constant(n) * sphere_area(n) * t / (2.0 * d * d);
}

double derivative_far_value(const FieldSamples& F, double t, const Vec& a, double d) {
  const int n = F.dim();
  const double r = std::max(d, t);
  return F.l1_norm() * a.norm() * (n + 1) * poisson_constant(n) * t / std::pow(r, n + 2);
}

}  // namespace lipnet
