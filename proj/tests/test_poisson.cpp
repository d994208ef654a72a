#include "lipnet/poisson.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace lipnet;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

FieldPtr sample_function(const SpacePtr& space, double h, double half_width, int m,
                         const std::function<Vec(const Vec&)>& fn, TargetNorm target = TargetNorm::l2) {
  const int n = space->dim();
  LatticeBox box = LatticeBox::covering(n, h, half_width);
  GridField g(box, m);
  Vec x(n);
  for (std::size_t idx = 0; idx < box.size(); ++idx) {
    box.point(idx, x.data());
    const Vec v = fn(x);
    for (int c = 0; c < m; ++c) g.comp(c)[idx] = v[c];
  }
  return std::make_shared<FieldSamples>(space, std::move(g), target, 0.0);
}

}  // namespace

TEST(Kernel, OneDimensionalValueAtOrigin) {
  const double x = 0.0;
  EXPECT_NEAR(kernel_eval(1, 1.0, &x), 1.0 / kPi, 1e-15);
  EXPECT_NEAR(poisson_constant(1), 1.0 / kPi, 1e-15);
}

TEST(Kernel, GradientVanishesAtOrigin) {
  for (int n = 1; n <= 4; ++n) {
    const Vec g = kernel_grad(0.3, Vec::Zero(n));
    EXPECT_EQ(g.norm(), 0.0);
  }
}

TEST(Kernel, RejectsNonPositiveT) {
  const double x[2] = {0.0, 0.0};
  EXPECT_THROW(kernel_eval(2, 0.0, x), Error);
  EXPECT_THROW(kernel_eval(2, -1.0, x), Error);
}

TEST(Kernel, GradientMatchesFiniteDifference) {
  Rng rng(3);
  for (int n = 1; n <= 3; ++n) {
    for (int k = 0; k < 20; ++k) {
      Vec x(n);
      for (int i = 0; i < n; ++i) x[i] = rng.uniform(-1, 1);
      const double t = rng.uniform(0.05, 1.0);
      const Vec g = kernel_grad(t, x);
      for (int i = 0; i < n; ++i) {
        Vec e = Vec::Zero(n);
        e[i] = 1e-6;
        const double fd = (kernel_eval(t, x + e) - kernel_eval(t, x - e)) / 2e-6;
        EXPECT_NEAR(g[i], fd, 1e-6 * (1.0 + std::abs(fd)));
      }
    }
  }
}

TEST(Kernel, ScalingIdentity) {
  Rng rng(9);
  for (int n = 1; n <= 5; ++n) {
    for (int k = 0; k < 50; ++k) {
      Vec x(n);
      for (int i = 0; i < n; ++i) x[i] = rng.uniform(-3, 3);
      const double t = rng.uniform(0.01, 2.0);
      const double lhs = kernel_eval(t, x);
      const double rhs = std::pow(t, -n) * kernel_eval(1.0, Vec(x / t));
      EXPECT_NEAR(lhs, rhs, 1e-12 * lhs);
    }
  }
}

TEST(Kernel, NormalizationRadialRule) {
  for (int n = 1; n <= 3; ++n)
    for (double t : {0.1, 0.5}) EXPECT_NEAR(kernel_mass(n, t), 1.0, 1e-3) << n << " " << t;
}

TEST(Kernel, NormalizationCartesianOracle) {
  // Plain lattice sum over a disc plus the closed-form planar tail t / sqrt(t^2 + L^2).
  const double t = 0.5;
  const double h = 0.05;
  const double L = 20.0;
  double s = 0.0;
  const long k = static_cast<long>(L / h);
  for (long i = -k; i <= k; ++i)
    for (long j = -k; j <= k; ++j) {
      const double x[2] = {i * h, j * h};
      if (x[0] * x[0] + x[1] * x[1] < L * L) s += kernel_eval(2, t, x) * h * h;
    }
  s += t / std::sqrt(t * t + L * L);
  EXPECT_NEAR(s, 1.0, 1e-3);
}

TEST(Kernel, ConstantTimesSphereArea) {
  for (int n = 1; n <= 20; ++n)
    EXPECT_LE(poisson_constant(n) * sphere_area(n), std::sqrt(2.0 * n / kPi)) << n;
}

TEST(Kernel, RadialProfileMaximum) {
  Rng rng(4);
  for (int n = 1; n <= 12; ++n)
    for (int k = 0; k < 200; ++k) {
      const double s = std::exp(rng.uniform(-6, 6));
      const double v = std::pow(s, n) / std::pow(1 + s * s, (n + 1) / 2.0);
      EXPECT_LE(v, std::min(1.0 / std::sqrt(std::exp(1.0) * n), 1.0 / s) * (1 + 1e-12));
    }
}

TEST(Tail, OneDimensionalClosedForm) {
  auto X = make_space(1, NormSpec::lp_norm(2));
  for (double r : {0.5, 1.0, 2.0, 10.0}) {
    const double exact = 1.0 - 2.0 / kPi * std::atan(r);
    const TailMass tm = tail_mass(*X, 1.0, r);
    EXPECT_NEAR(tm.quadrature, exact, 1e-12);
    EXPECT_NEAR(euclidean_tail(1, 1.0, r), exact, 1e-12);
    EXPECT_DOUBLE_EQ(tm.bound, 1.0 / r);
    EXPECT_LE(exact, tm.bound);
  }
  EXPECT_NEAR(tail_mass(*X, 1.0, 1.0).quadrature, 0.5, 1e-12);
}

TEST(Tail, PlanarPolarOracle) {
  auto X = make_space(2, NormSpec::lp_norm(2));
  const TailMass tm = tail_mass(*X, 0.1, 1.0);
  EXPECT_NEAR(tm.bound, 0.1 * std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(tm.quadrature, 0.1 / std::sqrt(1.01), 1e-10);
  EXPECT_LT(tm.quadrature, tm.bound);
}

TEST(Tail, BoundHoldsAcrossNorms) {
  for (int n = 1; n <= 3; ++n)
    for (double p : {1.0, 2.0, 3.0, kInf}) {
      auto X = make_space(n, NormSpec::lp_norm(p));
      for (double t : {0.01, 0.1, 0.5})
        for (double r : {0.25, 1.0, 3.0}) {
          const TailMass tm = tail_mass(*X, t, r);
          EXPECT_LT(tm.quadrature, tm.bound) << n << " " << p << " " << t << " " << r;
        }
    }
}

TEST(Tail, VanishesAsRadiusGrows) {
  auto X = make_space(2, NormSpec::lp_norm(kInf));
  EXPECT_LT(tail_mass(*X, 0.1, 1e6).bound, 1e-6);
  EXPECT_LT(tail_mass(*X, 0.1, 1e6).quadrature, 1e-6);
}

TEST(Shift, OneDimensionalClosedForm) {
  for (double t : {0.1, 1.0})
    for (double b : {0.01, 0.3, 2.0}) {
      const double exact = 4.0 / kPi * std::atan(b / (2 * t));
      EXPECT_NEAR(kernel_shift_integral(1, t, b), exact, 1e-9);
      EXPECT_LT(exact, kernel_shift_bound(1, t, b));
    }
}

TEST(Shift, PlanarCartesianOracle) {
  const double t = 0.5;
  const double b = 0.3;
  const double h = 0.02;
  const double L = 15.0;
  const long k = static_cast<long>(L / h);
  double s = 0.0;
  for (long i = -k; i <= k; ++i)
    for (long j = -k; j <= k; ++j) {
      const double x[2] = {(i + 0.5) * h, (j + 0.5) * h};
      const double y[2] = {x[0] + b, x[1]};
      s += std::abs(kernel_eval(2, t, x) - kernel_eval(2, t, y)) * h * h;
    }
  EXPECT_NEAR(kernel_shift_integral(2, t, b), s, 2e-3);
}

TEST(Shift, BoundHolds) {
  for (int n = 1; n <= 3; ++n)
    for (double t : {0.05, 0.2, 1.0})
      for (double b : {1e-3, 0.05, 0.5}) {
        const double q = kernel_shift_integral(n, t, b);
        EXPECT_GT(q, 0.0);
        EXPECT_LT(q, kernel_shift_bound(n, t, b)) << n << " " << t << " " << b;
      }
}

TEST(Lattice, FftMatchesDirectConvolution) {
  Rng rng(12);
  for (int n = 1; n <= 3; ++n) {
    const double h = 0.25;
    LatticeBox in = LatticeBox::covering(n, h, n == 3 ? 1.0 : 2.0);
    LatticeBox out = LatticeBox::covering(n, h, 0.75);
    out.lo[0] += 2;
    GridField f(in, 2);
    for (auto& v : f.data) v = rng.uniform(-1, 1);
    FftConvolver conv(in, out);
    conv.set_input(f);
    auto kernel = [n](const double* o) {
      double s = 0.3;
      for (int i = 0; i < n; ++i) s += (i + 1) * o[i] * o[i] - 0.2 * o[i];
      return s;
    };
    const GridField got = conv.apply(kernel);
    std::vector<double> x(n), y(n), d(n);
    for (std::size_t j = 0; j < out.size(); ++j) {
      out.point(j, x.data());
      for (int c = 0; c < 2; ++c) {
        double s = 0.0;
        for (std::size_t k = 0; k < in.size(); ++k) {
          in.point(k, y.data());
          for (int i = 0; i < n; ++i) d[i] = x[i] - y[i];
          s += kernel(d.data()) * f.at(c, k);
        }
        EXPECT_NEAR(got.at(c, j), s, 1e-9 * (1 + std::abs(s)));
      }
    }
  }
}

TEST(Lattice, GoodFftSizes) {
  EXPECT_EQ(good_fft_size(1), 1);
  EXPECT_EQ(good_fft_size(11), 12);
  EXPECT_EQ(good_fft_size(97), 98);
  EXPECT_EQ(good_fft_size(1024), 1024);
}

TEST(Evolute, ConstantOnHugeBallDeepInside) {
  auto X = make_space(2, NormSpec::lp_norm(2));
  const double R = 6.0;
  auto F = sample_function(X, 1.0 / 16, R, 1, [R](const Vec& x) {
    Vec v(1);
    v[0] = x.norm() <= R ? 2.5 : 0.0;
    return v;
  });
  const Evolute E(F, 0.2);
  const double expected = 2.5 * (1.0 - euclidean_tail(2, 0.2, R));
  EXPECT_NEAR(E.value(Vec::Zero(2))[0], expected, E.value_error() + 1e-3);
}

TEST(Evolute, LinearOracleDerivative) {
  auto X = make_space(2, NormSpec::lp_norm(2));
  Mat L(2, 2);
  L << 0.8, 0.3, -0.2, 0.6;
  const double R = 6.0;
  auto F = sample_function(X, 1.0 / 16, R, 2, [&](const Vec& x) -> Vec {
    return x.norm() <= R ? Vec(L * x) : Vec(Vec::Zero(2));
  });
  const double t = 0.15;
  const Evolute E(F, t);
  // Inside, the derivative is L(a) minus the kernel mass beyond the ball edge
  // plus the boundary jump; both are O(t / R).
  const Vec a = Vec::Unit(2, 0);
  const Vec d = E.derivative(Vec::Zero(2), a);
  const double leak = 3.0 * t / R * L.norm();
  EXPECT_LT((d - L * a).norm(), E.derivative_error() + leak);
}

TEST(Evolute, ConstantFieldHasZeroDerivative) {
  auto X = make_space(2, NormSpec::lp_norm(kInf));
  auto F = sample_function(X, 1.0 / 16, 3.0, 1, [](const Vec&) { return Vec::Constant(1, 1.7); });
  const Evolute E(F, 0.2);
  const Mat J = E.jacobian(Vec::Zero(2));
  EXPECT_LT(J.norm(), 1e-2);
}

TEST(Evolute, DerivativeMatchesFiniteDifference) {
  auto X = make_space(2, NormSpec::lp_norm(1));
  auto F = sample_function(X, 1.0 / 32, 2.0, 2, [&](const Vec& x) -> Vec {
    Vec v(2);
    const double r = X->norm(x);
    v[0] = std::max(0.0, 1.0 - r) * std::sin(3 * x[0]);
    v[1] = std::max(0.0, 2.0 - r) * x[1];
    return v;
  });
  const Evolute E(F, 0.1);
  Rng rng(17);
  for (int k = 0; k < 10; ++k) {
    Vec x(2);
    x << rng.uniform(-1, 1), rng.uniform(-1, 1);
    const Mat J = E.jacobian(x);
    for (int i = 0; i < 2; ++i) {
      const Vec e = 1e-5 * Vec::Unit(2, i);
      const Vec fd = (E.value(x + e) - E.value(x - e)) / 2e-5;
      EXPECT_LE((J.col(i) - fd).norm(), 1e-2 * std::max(1e-3, fd.norm()));
    }
  }
}

TEST(Evolute, DomainAndResolutionErrors) {
  auto X = make_space(2, NormSpec::lp_norm(2));
  auto F = sample_function(X, 1.0 / 16, 1.0, 1, [](const Vec&) { return Vec::Ones(1); });
  EXPECT_THROW(convolve(F, 0.6), Error);
  EXPECT_THROW(convolve(F, 0.0), Error);
  try {
    convolve(F, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "scale-unresolved");
  }
  EXPECT_NO_THROW(convolve(F, 0.2));
}

TEST(Evolute, GridEvaluatorMatchesDirectSums) {
  auto X = make_space(2, NormSpec::lp_norm(2));
  auto F = sample_function(X, 1.0 / 16, 2.0, 2, [](const Vec& x) -> Vec {
    Vec v(2);
    v << std::cos(x[0]) * std::max(0.0, 2 - x.norm()), x[1] * x[0] * std::max(0.0, 2 - x.norm());
    return v;
  });
  const double t = 0.2;
  const Evolute E(F, t);
  GridEvaluator G(F, LatticeBox::covering(2, 1.0 / 16, 0.5));
  const GridField vals = G.values(t);
  const auto parts = G.partials(t);
  Vec x(2);
  for (std::size_t idx = 0; idx < vals.box.size(); idx += 37) {
    vals.box.point(idx, x.data());
    const Vec v = E.value(x);
    const Mat J = E.jacobian(x);
    for (int c = 0; c < 2; ++c) {
      EXPECT_NEAR(vals.at(c, idx), v[c], 1e-10);
      for (int i = 0; i < 2; ++i) EXPECT_NEAR(parts[static_cast<std::size_t>(i)].at(c, idx), J(c, i), 1e-9);
    }
  }
}
