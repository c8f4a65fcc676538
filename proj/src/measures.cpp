#include "homlab/measures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "homlab/errors.hpp"
#include "homlab/parallel.hpp"
#include "homlab/random.hpp"

namespace homlab {

double PointCloud::total_mass() const noexcept {
  double m = 0.0;
  for (double w : weights) m += w;
  return m;
}

void PointCloud::validate() const {
  if (points.size() != weights.size()) throw PreconditionFailed("point cloud has mismatched point and weight counts");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw PreconditionFailed("point cloud alpha must be finite and >= 0");
  for (std::size_t i = 0; i < points.size(); ++i) {
    norm.group.check(points[i]);
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw PreconditionFailed("point " + std::to_string(i) + " has a non-positive or non-finite weight");
    }
  }
  if (!std::isfinite(total_mass())) throw PreconditionFailed("point cloud has infinite total mass");
}

std::string_view to_string(Shape s) noexcept { return s == Shape::Ball ? "ball" : "gset"; }

Shape parse_shape(std::string_view text) {
  if (text == "ball") return Shape::Ball;
  if (text == "gset") return Shape::Gset;
  throw MalformedSpec("unknown shape '" + std::string(text) + "' (expected ball or gset)");
}

// ---------------------------------------------------------------- volumes

namespace {

VolumeEstimate finish_volume(double box_vol, std::size_t hits, std::size_t n) {
  VolumeEstimate v;
  v.n_samples = n;
  v.hits = hits;
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  v.estimate = box_vol * p;
  v.std_error = box_vol * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  return v;
}

}  // namespace

VolumeEstimate haar_volume(const Region& region, std::size_t n_samples, std::uint64_t seed) {
  if (n_samples == 0) throw PreconditionFailed("haar_volume needs at least one sample");
  const auto box = base_box(region);
  double box_vol = 1.0;
  for (double h : box) box_vol *= 2.0 * h;
  Rng rng(seed);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    if (try_sample_region(region, rng, 1)) ++hits;
  }
  if (hits == 0) throw EmptyRegion("no Monte Carlo sample hit the region");
  return finish_volume(box_vol * region_jacobian(region), hits, n_samples);
}

VolumeEstimate haar_volume_direct(const Region& region, std::size_t n_samples, std::uint64_t seed) {
  if (n_samples == 0) throw PreconditionFailed("haar_volume_direct needs at least one sample");
  const auto box = coordinate_box(region);
  if (!box) throw PreconditionFailed("direct volume needs a region centered at the identity");
  const auto& g = region.group();
  double box_vol = 1.0;
  for (double h : *box) box_vol *= 2.0 * h;
  Rng rng(seed);
  std::size_t hits = 0;
  Point x(g.dim());
  for (std::size_t i = 0; i < n_samples; ++i) {
    for (std::size_t m = 0; m < g.dim(); ++m) x[m] = (*box)[m] * rng.symmetric();
    if (region_contains(region, x)) ++hits;
  }
  if (hits == 0) throw EmptyRegion("no Monte Carlo sample hit the region");
  return finish_volume(box_vol, hits, n_samples);
}

RatioEstimate isodiametric_ratio(const Region& region, std::size_t budget, std::uint64_t seed) {
  RatioEstimate r;
  r.volume = haar_volume(region, budget, mix_seed(seed, 0));
  r.diameter = diameter(region, budget, mix_seed(seed, 1));
  r.homogeneous_dim = region.group().homogeneous_dimension();
  if (!(r.diameter.lower_bound > 0.0)) throw EmptyRegion("region has zero sampled diameter");
  r.ratio = r.volume.estimate * std::pow(2.0 / r.diameter.lower_bound, r.homogeneous_dim);
  return r;
}

Improvement metelichenko_improve(const Region& ball, const Region& c, std::size_t checks, std::uint64_t seed) {
  if (!(ball.norm.group == c.norm.group)) throw GroupMismatch("ball and C live on different groups");
  if (checks == 0) throw PreconditionFailed("metelichenko_improve needs at least one check sample");
  const auto& g = c.group();

  const auto inc = inclusion_check(c, ball, checks, mix_seed(seed, 0));
  if (!inc.passed()) throw PreconditionFailed("C is not contained in the ball (" + std::to_string(inc.violations) + " samples outside)");

  Rng rng(mix_seed(seed, 1));
  for (std::size_t i = 0; i < checks; ++i) {
    const Point y = sample_region(c, rng);
    if (!region_contains(c, inverse(g, y))) throw PreconditionFailed("C is not symmetric: -y leaves C for a sampled y");
  }
  for (std::size_t i = 0; i < checks; ++i) {
    const Point y = sample_region(c, rng);
    const Point z = sample_region(c, rng);
    Point mid(g.dim());
    for (std::size_t m = 0; m < g.dim(); ++m) mid[m] = 0.5 * (y[m] + z[m]);
    if (!region_contains(c, mid)) throw PreconditionFailed("C is not convex: a sampled midpoint leaves C");
  }

  Improvement out;
  out.volume_ball = haar_volume(ball, checks, mix_seed(seed, 2));
  out.volume_c = haar_volume(c, checks, mix_seed(seed, 3));
  if (!(2.0 * out.volume_c.estimate > out.volume_ball.estimate)) {
    throw PreconditionFailed("C does not hold more than half the ball volume");
  }

  out.region = make_dilated_image(c, 2.0, 0.5);
  out.predicted_volume =
      std::pow(2.0, g.homogeneous_dimension() - static_cast<int>(g.dim())) * out.volume_c.estimate;
  const double predicted_err =
      std::pow(2.0, g.homogeneous_dimension() - static_cast<int>(g.dim())) * out.volume_c.std_error;

  out.diameter = diameter(out.region, checks, mix_seed(seed, 4));
  if (out.diameter.exceeds(2.0)) {
    throw ViolationFound("improved region has a pair at distance " + std::to_string(out.diameter.lower_bound) + " > 2");
  }
  out.volume_result = haar_volume_direct(out.region, checks, mix_seed(seed, 5));
  const double tol = 4.0 * std::hypot(out.volume_result.std_error, predicted_err) + 1e-12;
  if (std::abs(out.volume_result.estimate - out.predicted_volume) > tol) {
    throw ViolationFound("improved region volume " + std::to_string(out.volume_result.estimate) +
                         " disagrees with the dilation identity " + std::to_string(out.predicted_volume));
  }
  return out;
}

// ------------------------------------------------------------- densities

namespace {

// Densities count closed shapes on both sides, so the closed ball B(x, r)
// always sits inside the (closed) G-set of the same radius.
bool in_shape(const NormSpec& norm, const Point& x, const Point& y, double r, Shape shape) {
  if (shape == Shape::Ball) return distance(norm, x, y) <= r;
  return gset_gauge(norm, multiply(norm.group, inverse(norm.group, x), y)) <= r;
}

bool has_gset(const NormSpec& norm) { return norm.kind == NormKind::SmoothBox || norm.kind == NormKind::Koranyi; }

}  // namespace

double empirical_density(const PointCloud& cloud, const Point& x, double r, Shape shape) {
  if (!(r > 0.0)) throw PreconditionFailed("empirical_density needs r > 0");
  if (shape == Shape::Gset && !has_gset(cloud.norm)) throw PreconditionFailed("this norm has no G-set");
  double mass = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (in_shape(cloud.norm, x, cloud.points[i], r, shape)) mass += cloud.weights[i];
  }
  return mass / std::pow(2.0 * r, cloud.alpha);
}

DensityProfile density_profile(const PointCloud& cloud, const Point& x, std::span<const double> scales, Shape shape) {
  for (std::size_t i = 1; i < scales.size(); ++i) {
    if (!(scales[i] < scales[i - 1])) throw PreconditionFailed("density_profile needs a decreasing scale grid");
  }
  DensityProfile p;
  p.lower = std::numeric_limits<double>::infinity();
  p.upper = 0.0;
  for (double r : scales) {
    const double d = empirical_density(cloud, x, r, shape);
    p.rows.push_back({r, d});
    p.lower = std::min(p.lower, d);
    p.upper = std::max(p.upper, d);
  }
  if (p.rows.empty()) p.lower = 0.0;
  return p;
}

namespace {

// A 1-Lipschitz sort key, so d(x, y) >= |key(x) - key(y)| prunes pair scans.
// With a horizontal layer the first coordinate works: the first layer of
// x^-1 y is y_1 - x_1 and every norm here dominates it. Otherwise the
// distance to the identity works whenever the triangle inequality holds.
struct SortKey {
  enum class Kind { FirstCoordinate, Norm, None } kind = Kind::None;
  // G(0, r) sits in B(0, gset_reach * r) for the key's purposes.
  double gset_reach = 1.0;

  double operator()(const NormSpec& norm, const Point& y) const {
    switch (kind) {
      case Kind::FirstCoordinate: return y[0];
      case Kind::Norm: return eval_norm(norm, y);
      case Kind::None: return 0.0;
    }
    return 0.0;
  }
  double lower(double gap) const { return kind == Kind::None ? 0.0 : std::abs(gap); }
};

bool norm_key_valid(const NormSpec& norm) {
  return norm.kind != NormKind::SmoothBox || satisfies_epsilon_constraint(norm);
}

// Picks whichever valid key spreads the cloud more; the first coordinate
// ties in its favour since its G-set window is tighter.
SortKey sort_key(const PointCloud& cloud) {
  const auto& norm = cloud.norm;
  const auto& g = norm.group;
  SortKey k;
  if (g.dim() == 0 || cloud.size() == 0) return k;
  auto spread = [&](const SortKey& key) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& p : cloud.points) {
      const double v = key(norm, p);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return hi - lo;
  };
  SortKey first;
  first.kind = SortKey::Kind::FirstCoordinate;
  SortKey by_norm;
  by_norm.kind = SortKey::Kind::Norm;
  // diam G(0, 1) <= 2 and the identity is a member.
  by_norm.gset_reach = 2.0;
  const bool first_ok = g.has_horizontal_layer();
  const bool norm_ok = norm_key_valid(norm);
  if (first_ok && norm_ok) return spread(first) >= 0.5 * spread(by_norm) ? first : by_norm;
  if (first_ok) return first;
  if (norm_ok) return by_norm;
  return k;
}

struct SortedCloud {
  std::vector<std::size_t> order;
  std::vector<double> keys;
};

SortedCloud sort_cloud(const PointCloud& cloud, const SortKey& key) {
  SortedCloud sc;
  std::vector<double> raw(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) raw[i] = key(cloud.norm, cloud.points[i]);
  sc.order.resize(cloud.size());
  for (std::size_t i = 0; i < sc.order.size(); ++i) sc.order[i] = i;
  std::stable_sort(sc.order.begin(), sc.order.end(), [&](std::size_t a, std::size_t b) { return raw[a] < raw[b]; });
  for (auto i : sc.order) sc.keys.push_back(raw[i]);
  return sc;
}

}  // namespace

double cloud_resolution(const PointCloud& cloud) {
  if (cloud.alpha == 0.0) return 0.0;
  const std::size_t n = cloud.size();
  if (n <= kResolutionNeighbour) return std::numeric_limits<double>::infinity();
  const auto& norm = cloud.norm;
  const SortKey kb = sort_key(cloud);
  const auto sorted = sort_cloud(cloud, kb);
  const auto& order = sorted.order;
  const auto& keys = sorted.keys;

  std::vector<double> kth(n);
  parallel_for(n, 0, [&](std::size_t p) {
    const Point& x = cloud.points[order[p]];
    std::array<double, kResolutionNeighbour> best;
    best.fill(std::numeric_limits<double>::infinity());
    auto offer = [&](std::size_t q) {
      const double d = distance(norm, x, cloud.points[order[q]]);
      if (d < best.back()) {
        best.back() = d;
        std::sort(best.begin(), best.end());
      }
    };
    std::size_t lo = p;
    std::size_t hi = p + 1;
    bool left = lo > 0;
    bool right = hi < n;
    while (left || right) {
      if (left) {
        if (kb.lower(keys[p] - keys[lo - 1]) > best.back()) {
          left = false;
        } else {
          offer(--lo);
          left = lo > 0;
        }
      }
      if (right) {
        if (kb.lower(keys[hi] - keys[p]) > best.back()) {
          right = false;
        } else {
          offer(hi++);
          right = hi < n;
        }
      }
    }
    kth[p] = best.back();
  });
  std::sort(kth.begin(), kth.end());
  return n % 2 == 1 ? kth[n / 2] : 0.5 * (kth[n / 2 - 1] + kth[n / 2]);
}

std::vector<double> dyadic_scales(double r_max, double floor) {
  if (!(r_max > 0.0)) throw PreconditionFailed("scale grid needs r_max > 0");
  std::vector<double> s;
  for (double r = r_max; r > floor && s.size() < 60; r *= 0.5) s.push_back(r);
  return s;
}

double DensityTable::ball_ratio(std::size_t point, std::size_t scale, double alpha) const {
  return ball_mass[point * scales.size() + scale] / std::pow(2.0 * scales[scale], alpha);
}

double DensityTable::gset_ratio(std::size_t point, std::size_t scale, double alpha) const {
  return gset_mass[point * scales.size() + scale] / std::pow(2.0 * scales[scale], alpha);
}

DensityTable compute_density_table(const PointCloud& cloud, std::vector<double> scales, unsigned threads) {
  for (std::size_t i = 1; i < scales.size(); ++i) {
    if (!(scales[i] < scales[i - 1])) throw PreconditionFailed("density table needs a decreasing scale grid");
  }
  DensityTable t;
  t.scales = std::move(scales);
  t.n_points = cloud.size();
  const std::size_t ns = t.scales.size();
  const bool with_gset = has_gset(cloud.norm);
  t.ball_mass.assign(t.n_points * ns, 0.0);
  if (with_gset) t.gset_mass.assign(t.n_points * ns, 0.0);
  if (ns == 0 || t.n_points == 0) return t;

  const auto& norm = cloud.norm;
  const auto& g = norm.group;
  const SortKey kb = sort_key(cloud);
  const auto sorted = sort_cloud(cloud, kb);
  const auto& order = sorted.order;
  const auto& keys = sorted.keys;
  const double window = kb.kind == SortKey::Kind::None
                            ? std::numeric_limits<double>::infinity()
                            : t.scales.front() * (with_gset ? kb.gset_reach : 1.0);
  const auto& sc = t.scales;

  parallel_for(t.n_points, threads, [&](std::size_t p) {
    const std::size_t i = order[p];
    const Point& x = cloud.points[i];
    const Point xinv = inverse(g, x);
    // bins[K] collects mass that lies inside exactly the first K scales.
    std::vector<double> ball_bins(ns + 1, 0.0);
    std::vector<double> gset_bins(with_gset ? ns + 1 : 0, 0.0);
    const auto first = std::lower_bound(keys.begin(), keys.end(), keys[p] - window) - keys.begin();
    const auto last = std::upper_bound(keys.begin(), keys.end(), keys[p] + window) - keys.begin();
    for (auto q = static_cast<std::size_t>(first); q < static_cast<std::size_t>(last); ++q) {
      const std::size_t jdx = order[q];
      const Point z = multiply(g, xinv, cloud.points[jdx]);
      const double w = cloud.weights[jdx];
      const double d = eval_norm(norm, z);
      const auto kb_ball = std::partition_point(sc.begin(), sc.end(), [d](double r) { return r >= d; }) - sc.begin();
      ball_bins[static_cast<std::size_t>(kb_ball)] += w;
      if (with_gset) {
        const double gauge = gset_gauge(norm, z);
        const auto kg = std::partition_point(sc.begin(), sc.end(),
                                             [gauge](double r) { return r >= gauge; }) -
                        sc.begin();
        gset_bins[static_cast<std::size_t>(kg)] += w;
      }
    }
    double acc = 0.0;
    double gacc = 0.0;
    for (std::size_t s = ns; s-- > 0;) {
      acc += ball_bins[s + 1];
      t.ball_mass[i * ns + s] = acc;
      if (with_gset) {
        gacc += gset_bins[s + 1];
        t.gset_mass[i * ns + s] = gacc;
      }
    }
  });
  return t;
}

}  // namespace homlab
