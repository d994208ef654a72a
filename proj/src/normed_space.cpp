#include "lipnet/normed_space.hpp"

#include "lipnet/simplex.hpp"
#include "lipnet/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace lipnet {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Sweep points this close to the separation are treated as ties and accepted,
// so dyadic box centres cannot stall the refinement on an exact level set.
constexpr double kTie = 1.0 - 1e-10;

double lp_raw(const double* x, int n, double p) {
  if (p == 2.0) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += x[i] * x[i];
    return std::sqrt(s);
  }
  if (p == 1.0) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::abs(x[i]);
    return s;
  }
  if (std::isinf(p)) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s = std::max(s, std::abs(x[i]));
    return s;
  }
  double mx = 0.0;
  for (int i = 0; i < n; ++i) mx = std::max(mx, std::abs(x[i]));
  if (mx == 0.0) return 0.0;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += std::pow(std::abs(x[i]) / mx, p);
  return mx * std::pow(s, 1.0 / p);
}

double conjugate(double p) {
  if (p == 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

std::string format_p(double p) {
  if (std::isinf(p)) return "inf";
  std::ostringstream os;
  os << p;
  return os.str();
}

}  // namespace

NormSpec NormSpec::parse(const std::string& text) {
  std::string body = text;
  if (body.rfind("lp:", 0) == 0) {
    body = body.substr(3);
  } else if (body.size() > 1 && body[0] == 'l') {
    body = body.substr(1);
  } else {
    throw Error("usage", "unrecognised norm descriptor '" + text + "'");
  }
  if (body == "inf" || body == "infty") return lp_norm(kInf);
  double p = 0.0;
  try {
    p = std::stod(body);
  } catch (const std::exception&) {
    throw Error("usage", "unrecognised norm descriptor '" + text + "'");
  }
  if (!(p >= 1.0)) throw Error("invalid-norm", "lp norm requires p >= 1");
  return lp_norm(p);
}

std::string NormSpec::descriptor() const {
  switch (kind) {
    case NormKind::lp: return "lp:" + format_p(p);
    case NormKind::ellipsoid: return "ellipsoid";
    case NormKind::polytope: return "polytope";
  }
  return "unknown";
}

NormedSpace::NormedSpace(int dim, NormSpec spec, Scaling scaling) : dim_(dim), spec_(std::move(spec)) {
  if (dim < 1 || dim > 8) throw Error("invalid-space", "dimension must be in [1, 8]");
  const double n = dim;

  switch (spec_.kind) {
    case NormKind::lp: {
      const double p = spec_.p;
      if (!(p >= 1.0)) throw Error("invalid-norm", "lp norm requires p >= 1");
      const double e = std::isinf(p) ? -0.5 : 1.0 / p - 0.5;
      // raw |x|_p lies between min(1, n^e)|x|_2 and max(1, n^e)|x|_2.
      const double lo = std::min(1.0, std::pow(n, e));
      const double hi = std::max(1.0, std::pow(n, e));
      if (scaling == Scaling::john) scale_ = 1.0 / hi;
      euclid_lower_ = scale_ * lo;
      euclid_upper_ = scale_ * hi;
      double vol = 0.0;
      if (std::isinf(p)) {
        vol = std::pow(2.0, n);
      } else {
        vol = std::exp(n * std::log(2.0 * std::tgamma(1.0 + 1.0 / p)) - std::lgamma(1.0 + n / p));
      }
      volume_ = vol / std::pow(scale_, n);
      break;
    }
    case NormKind::ellipsoid: {
      const Mat& m = spec_.matrix;
      if (m.rows() != dim || m.cols() != dim) throw Error("invalid-norm", "ellipsoid matrix has wrong shape");
      if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff()))
        throw Error("invalid-norm", "ellipsoid matrix must be symmetric");
      Eigen::SelfAdjointEigenSolver<Mat> eig(m);
      const double lmin = eig.eigenvalues().minCoeff();
      const double lmax = eig.eigenvalues().maxCoeff();
      if (!(lmin > 0.0)) throw Error("invalid-norm", "ellipsoid matrix must be positive definite");
      if (scaling == Scaling::john) {
        // A scalar rescaling reaches the sandwich only when cond(M) <= n.
        if (lmax / lmin > n * (1.0 + 1e-12))
          throw Error("john-position-unavailable",
                      "ellipsoid condition number exceeds n; apply a linear change of variables first");
        scale_ = 1.0 / std::sqrt(lmax);
      }
      euclid_lower_ = scale_ * std::sqrt(lmin);
      euclid_upper_ = scale_ * std::sqrt(lmax);
      inverse_ = m.inverse();
      const double unit = std::pow(M_PI, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
      volume_ = unit / std::sqrt(m.determinant()) / std::pow(scale_, n);
      break;
    }
    case NormKind::polytope: {
      if (scaling == Scaling::john)
        throw Error("john-position-unavailable",
                    "John position for polytope norms is not computed; supply a pre-scaled norm");
      const Mat& v = spec_.matrix;
      if (v.cols() != dim || v.rows() < dim) throw Error("invalid-norm", "polytope needs >= n facet normals of length n");
      Eigen::FullPivLU<Mat> lu(v);
      if (lu.rank() < dim) throw Error("invalid-norm", "facet normals must span R^n (bounded ball)");
      euclid_upper_ = v.rowwise().norm().maxCoeff();
      break;
    }
  }

  extent_ = 0.0;
  for (int i = 0; i < dim_; ++i) extent_ = std::max(extent_, dual_norm(Vec::Unit(dim_, i)));

  if (spec_.kind == NormKind::polytope) {
    // sup of |x|_2 over the ball is attained at a vertex; bound it via the extent.
    euclid_lower_ = 1.0 / (std::sqrt(n) * extent_);
    // Volume by quasi-Monte Carlo over the bounding box.
    const std::uint64_t count = 200000;
    std::uint64_t inside = 0;
    Vec x(dim_);
    for (std::uint64_t k = 1; k <= count; ++k) {
      halton(k, dim_, x.data());
      for (int i = 0; i < dim_; ++i) x[i] = extent_ * (2.0 * x[i] - 1.0);
      if (norm(x) <= 1.0) ++inside;
    }
    volume_ = std::pow(2.0 * extent_, n) * static_cast<double>(inside) / static_cast<double>(count);
  }
}

double NormedSpace::raw_norm(const double* x) const {
  switch (spec_.kind) {
    case NormKind::lp: return lp_raw(x, dim_, spec_.p);
    case NormKind::ellipsoid: {
      double s = 0.0;
      for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) s += x[i] * spec_.matrix(i, j) * x[j];
      return std::sqrt(std::max(0.0, s));
    }
    case NormKind::polytope: {
      double s = 0.0;
      const Mat& v = spec_.matrix;
      for (Eigen::Index k = 0; k < v.rows(); ++k) {
        double d = 0.0;
        for (int i = 0; i < dim_; ++i) d += v(k, i) * x[i];
        s = std::max(s, std::abs(d));
      }
      return s;
    }
  }
  return 0.0;
}

double NormedSpace::distance(const double* x, const double* y) const {
  double d[8];
  for (int i = 0; i < dim_; ++i) d[i] = x[i] - y[i];
  return norm(d);
}

void NormedSpace::gradient(const double* x, double* out) const {
  for (int i = 0; i < dim_; ++i) out[i] = 0.0;
  const double r = raw_norm(x);
  if (r == 0.0) return;
  switch (spec_.kind) {
    case NormKind::lp: {
      const double p = spec_.p;
      if (std::isinf(p)) {
        int k = 0;
        for (int i = 1; i < dim_; ++i)
          if (std::abs(x[i]) > std::abs(x[k])) k = i;
        out[k] = x[k] > 0 ? 1.0 : -1.0;
      } else if (p == 1.0) {
        for (int i = 0; i < dim_; ++i) out[i] = x[i] > 0 ? 1.0 : (x[i] < 0 ? -1.0 : 0.0);
      } else {
        for (int i = 0; i < dim_; ++i) {
          const double a = std::abs(x[i]) / r;
          out[i] = (x[i] > 0 ? 1.0 : -1.0) * std::pow(a, p - 1.0);
        }
      }
      break;
    }
    case NormKind::ellipsoid: {
      for (int i = 0; i < dim_; ++i) {
        double s = 0.0;
        for (int j = 0; j < dim_; ++j) s += spec_.matrix(i, j) * x[j];
        out[i] = s / r;
      }
      break;
    }
    case NormKind::polytope: {
      const Mat& v = spec_.matrix;
      Eigen::Index best = 0;
      double best_val = -1.0;
      double sign = 1.0;
      for (Eigen::Index k = 0; k < v.rows(); ++k) {
        double d = 0.0;
        for (int i = 0; i < dim_; ++i) d += v(k, i) * x[i];
        if (std::abs(d) > best_val) {
          best_val = std::abs(d);
          best = k;
          sign = d >= 0 ? 1.0 : -1.0;
        }
      }
      for (int i = 0; i < dim_; ++i) out[i] = sign * v(best, i);
      break;
    }
  }
  for (int i = 0; i < dim_; ++i) out[i] *= scale_;
}

Vec NormedSpace::gradient(const Vec& x) const {
  Vec g(dim_);
  gradient(x.data(), g.data());
  return g;
}

double NormedSpace::dual_norm(const Vec& v) const {
  switch (spec_.kind) {
    case NormKind::lp: return lp_raw(v.data(), dim_, conjugate(spec_.p)) / scale_;
    case NormKind::ellipsoid: return std::sqrt(std::max(0.0, v.dot(inverse_ * v))) / scale_;
    case NormKind::polytope: {
      // max <v,x> s.t. |<a_k,x>| <= 1 with x = x+ - x-.
      const Mat& a = spec_.matrix;
      LinearProgram lp;
      lp.objective.resize(2 * dim_);
      for (int i = 0; i < dim_; ++i) {
        lp.objective[i] = -v[i];
        lp.objective[dim_ + i] = v[i];
      }
      for (Eigen::Index k = 0; k < a.rows(); ++k) {
        for (double s : {1.0, -1.0}) {
          LinearProgram::Row row;
          row.coeffs.resize(2 * dim_);
          for (int i = 0; i < dim_; ++i) {
            row.coeffs[i] = s * a(k, i);
            row.coeffs[dim_ + i] = -s * a(k, i);
          }
          row.rhs = 1.0;
          lp.rows.push_back(std::move(row));
        }
      }
      const LpSolution sol = solve_lp(lp);
      if (sol.status != LpStatus::optimal) throw Error("invalid-norm", "polytope dual norm LP did not solve");
      return -sol.objective;
    }
  }
  return 0.0;
}

std::string NormedSpace::descriptor() const { return spec_.descriptor(); }

SpacePtr make_space(int dim, const NormSpec& spec, Scaling scaling) {
  return std::make_shared<const NormedSpace>(dim, spec, scaling);
}

double Net::size_bound() const { return std::pow(3.0 / delta, space->dim()); }

void halton(std::uint64_t index, int dim, double* out) {
  static constexpr int kPrimes[8] = {2, 3, 5, 7, 11, 13, 17, 19};
  for (int d = 0; d < dim; ++d) {
    const int b = kPrimes[d];
    double f = 1.0;
    double r = 0.0;
    std::uint64_t i = index;
    while (i > 0) {
      f /= b;
      r += f * static_cast<double>(i % b);
      i /= b;
    }
    out[d] = r;
  }
}

Vec sample_ball(const NormedSpace& space, Rng& rng, double radius) {
  const int n = space.dim();
  const double e = space.coordinate_extent() * radius;
  Vec x(n);
  while (true) {
    for (int i = 0; i < n; ++i) x[i] = rng.uniform(-e, e);
    if (space.norm(x) <= radius) return x;
  }
}

Vec sample_sphere(const NormedSpace& space, Rng& rng) {
  const int n = space.dim();
  Vec x(n);
  double r = 0.0;
  while (r == 0.0) {
    for (int i = 0; i < n; ++i) x[i] = rng.normal();
    r = space.norm(x);
  }
  return x / r;
}

namespace {

/// Incrementally built separated set with nearest-neighbour queries at scales
/// up to twice the separation.
class SeparatedSet {
 public:
  SeparatedSet(const NormedSpace& space, double sep, std::size_t cap)
      : space_(space), cap_(cap), index_(space.dim(), 2.0 * sep * space.coordinate_extent()) {}

  /// Distance to the nearest member, or +inf when none lies within 2*sep.
  double nearest(const double* x) const {
    double best = kInf;
    index_.for_each_near(x, [&](int id) {
      best = std::min(best, space_.distance(x, points_[static_cast<std::size_t>(id)].data()));
    });
    return best;
  }

  void insert(const Vec& x) {
    if (points_.size() >= cap_)
      throw Error("net-too-large", "net exceeds the configured cap of " + std::to_string(cap_) + " points");
    index_.insert(x.data(), static_cast<int>(points_.size()));
    points_.push_back(x);
  }

  std::vector<Vec>& points() { return points_; }

 private:
  const NormedSpace& space_;
  std::size_t cap_;
  CellIndex index_;
  std::vector<Vec> points_;
};

std::uint64_t seed_offset(std::uint64_t seed) {
  Rng rng(seed);
  return 1 + (rng.next() % 100000);
}

void check_cap(const NormedSpace& space, double delta, std::size_t cap) {
  // Any delta-covering of B_X needs at least (1/delta)^n points.
  const double lower = std::pow(1.0 / delta, space.dim());
  if (lower > static_cast<double>(cap))
    throw Error("net-too-large", "a " + std::to_string(delta) + "-net needs at least " + std::to_string(lower) +
                                     " points, above the cap of " + std::to_string(cap));
}

/// Maps a box centre in parameter space [-side, side]^m to a point of the set
/// being covered. Returns false when the whole box misses that set.
using Lift = std::function<bool(const Vec& u, double radius, Vec& x, bool& insertable)>;

/// Level-order refinement of the parameter cube [-side, side]^m. A box whose
/// image has X-radius r is covered when its centre is within sep - r of the
/// set; a box whose centre is at distance >= sep gets its centre inserted.
/// Returns the certified covering radius, which exceeds sep only when the box
/// budget ran out on near-tie regions.
double refine(SeparatedSet& set, int m, double side, double radius_per_half, double sep, std::size_t budget,
              const Lift& lift) {
  const double half0 = sep / radius_per_half / 2.0;
  const auto cells = static_cast<long>(std::ceil(side / (2.0 * half0)));
  double half = side / (2.0 * static_cast<double>(cells));
  const double min_radius = 1e-9 * sep;

  std::vector<double> level;
  {
    std::vector<long> idx(static_cast<std::size_t>(m), 0);
    const long count = 2 * cells;
    while (true) {
      for (int i = 0; i < m; ++i)
        level.push_back(-side + (2.0 * static_cast<double>(idx[static_cast<std::size_t>(i)]) + 1.0) * half);
      int i = 0;
      while (i < m && idx[static_cast<std::size_t>(i)] == count - 1) idx[static_cast<std::size_t>(i++)] = 0;
      if (i == m) break;
      ++idx[static_cast<std::size_t>(i)];
    }
  }

  double certified = 0.0;
  std::size_t spent = 0;
  Vec u(m);
  Vec x;
  std::vector<double> next;
  while (!level.empty()) {
    const std::size_t boxes = level.size() / static_cast<std::size_t>(m);
    const double r = radius_per_half * half;
    // Children of this level would exceed the budget: settle for a covering slack.
    const bool last = spent + boxes * (std::size_t{1} << m) > budget || r < min_radius;
    spent += boxes;
    next.clear();
    for (std::size_t b = 0; b < boxes; ++b) {
      for (int i = 0; i < m; ++i) u[i] = level[b * static_cast<std::size_t>(m) + static_cast<std::size_t>(i)];
      bool insertable = false;
      if (!lift(u, r, x, insertable)) continue;
      double d = set.nearest(x.data());
      if (d + r <= sep) {
        certified = std::max(certified, d + r);
        continue;
      }
      if (insertable && d >= kTie * sep) {
        set.insert(x);
        d = 0.0;
        if (r <= sep) {
          certified = std::max(certified, r);
          continue;
        }
      }
      if (last) {
        certified = std::max(certified, d + r);
        continue;
      }
      const double h = half / 2.0;
      for (int mask = 0; mask < (1 << m); ++mask)
        for (int i = 0; i < m; ++i) next.push_back(u[i] + (((mask >> i) & 1) ? h : -h));
    }
    level.swap(next);
    half /= 2.0;
  }
  return std::max(certified, 0.0);
}

Net finish(const SpacePtr& space, double delta, bool on_sphere, SeparatedSet& set, std::size_t streamed,
           double certified) {
  Net net;
  net.space = space;
  net.delta = delta;
  net.on_sphere = on_sphere;
  net.points = std::move(set.points());
  net.repaired = net.points.size() - streamed;
  net.covering_radius = std::min(std::max(certified, 0.0), 2.0);
  return net;
}

}  // namespace

Net greedy_net(const SpacePtr& space, double delta, std::uint64_t seed, const NetOptions& opts) {
  if (!(delta > 0.0 && delta <= 2.0)) throw Error("invalid-argument", "net scale must lie in (0, 2]");
  check_cap(*space, delta, opts.cap);
  const int n = space->dim();
  const double ext = space->coordinate_extent();
  SeparatedSet set(*space, delta, opts.cap);

  // Candidate stream: origin first, then a shifted Halton sequence in the box.
  set.insert(Vec::Zero(n));
  const double est = std::pow(2.0 / delta + 1.0, n);
  const auto stream = static_cast<std::uint64_t>(std::min<double>(static_cast<double>(opts.max_candidates), 8.0 * est));
  const std::uint64_t offset = seed_offset(seed);
  Vec x(n);
  for (std::uint64_t k = 0; k < stream; ++k) {
    halton(k + offset, n, x.data());
    for (int i = 0; i < n; ++i) x[i] = ext * (2.0 * x[i] - 1.0);
    if (space->norm(x) > 1.0) continue;
    if (set.nearest(x.data()) >= delta) set.insert(x);
  }
  const std::size_t streamed = set.points().size();

  // A box of half side s has X-radius <= upper * s * sqrt(n).
  const double per_half = space->euclid_upper() * std::sqrt(static_cast<double>(n));
  const double certified =
      refine(set, n, ext, per_half, delta, opts.max_boxes, [&](const Vec& u, double r, Vec& out, bool& insertable) {
        const double cn = space->norm(u);
        if (cn - r > 1.0) return false;
        out = u;
        insertable = cn <= 1.0;
        return true;
      });
  return finish(space, delta, false, set, streamed, certified);
}

Net sphere_net(const SpacePtr& space, double eta, std::uint64_t seed, const NetOptions& opts) {
  if (!(eta > 0.0 && eta <= 2.0)) throw Error("invalid-argument", "sphere net scale must lie in (0, 2]");
  const int n = space->dim();
  SeparatedSet set(*space, eta, opts.cap);

  auto project = [&](const Vec& v) { return Vec(v / space->norm(v)); };

  set.insert(project(Vec::Unit(n, 0)));
  // S_X has diameter 2, so one point already covers it.
  if (eta >= 2.0) return finish(space, eta, true, set, 1, 2.0);
  if (n == 1) {
    Vec m = project(-Vec::Unit(1, 0));
    if (set.nearest(m.data()) >= eta) set.insert(m);
    return finish(space, eta, true, set, set.points().size(), 0.0);
  }

  const double est = std::pow(3.0 / eta, n);
  const auto stream = static_cast<std::uint64_t>(std::min<double>(static_cast<double>(opts.max_candidates), 8.0 * est));
  const std::uint64_t offset = seed_offset(seed);
  Vec x(n);
  for (std::uint64_t k = 0; k < stream; ++k) {
    halton(k + offset, n, x.data());
    for (int i = 0; i < n; ++i) x[i] = 2.0 * x[i] - 1.0;
    if (x.norm() < 1e-3) continue;
    Vec s = project(x);
    if (set.nearest(s.data()) >= eta) set.insert(s);
  }
  const std::size_t streamed = set.points().size();

  // Sweep the faces of [-1,1]^n, radially projected onto S_X. On the cube
  // surface |u|_2 >= 1, and |u/|u| - w/|w|| <= 2|u - w| / min(|u|, |w|).
  const int m = n - 1;
  const double per_half = 2.0 * space->euclid_upper() * std::sqrt(static_cast<double>(m)) / space->euclid_lower();
  double certified = 0.0;
  for (int axis = 0; axis < n; ++axis) {
    for (double sgn : {1.0, -1.0}) {
      const double c = refine(set, m, 1.0, per_half, eta, opts.max_boxes,
                              [&](const Vec& u, double, Vec& out, bool& insertable) {
                                Vec v(n);
                                int j = 0;
                                for (int i = 0; i < n; ++i) v[i] = i == axis ? sgn : u[j++];
                                out = project(v);
                                insertable = true;
                                return true;
                              });
      certified = std::max(certified, c);
    }
  }
  return finish(space, eta, true, set, streamed, certified);
}

CoveringReport certify_net(const Net& net, std::size_t samples, std::uint64_t seed) {
  const NormedSpace& space = *net.space;
  CoveringReport rep;
  rep.samples = samples;
  CellIndex index(space.dim(), net.delta * space.coordinate_extent());
  for (std::size_t i = 0; i < net.points.size(); ++i) index.insert(net.points[i].data(), static_cast<int>(i));

  Rng rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    const Vec x = net.on_sphere ? sample_sphere(space, rng) : sample_ball(space, rng);
    double best = kInf;
    index.for_each_near(x.data(), [&](int id) {
      best = std::min(best, space.distance(x.data(), net.points[static_cast<std::size_t>(id)].data()));
    });
    if (!std::isfinite(best)) {
      for (const auto& p : net.points) best = std::min(best, space.distance(x.data(), p.data()));
    }
    rep.max_distance = std::max(rep.max_distance, best);
  }

  rep.min_separation = kInf;
  for (std::size_t i = 0; i < net.points.size(); ++i) {
    for (std::size_t j = i + 1; j < net.points.size(); ++j) {
      rep.min_separation = std::min(rep.min_separation, space.distance(net.points[i].data(), net.points[j].data()));
    }
  }
  return rep;
}

}  // namespace lipnet
