#include "homlab/regions.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "homlab/errors.hpp"

namespace homlab {

namespace {

constexpr std::array<std::pair<RegionKind, std::string_view>, 6> kRegionNames{{
    {RegionKind::Ball, "ball"},
    {RegionKind::GsetSmoothBox, "gset-smoothbox"},
    {RegionKind::GsetKoranyi, "gset-koranyi"},
    {RegionKind::DilatedImage, "dilated-image"},
    {RegionKind::Box, "box"},
    {RegionKind::UserPredicate, "user-predicate"},
}};

bool is_identity(const Point& p) noexcept {
  for (double v : p.coords()) {
    if (v != 0.0) return false;
  }
  return true;
}

// Per-coordinate copy of per-weight half-widths.
std::vector<double> expand(const GroupSpec& g, const std::vector<double>& per_weight) {
  std::vector<double> out(g.dim());
  for (std::size_t m = 0; m < g.dim(); ++m) out[m] = per_weight[static_cast<std::size_t>(g.weight_of(m) - 1)];
  return out;
}

bool shape_contains(const Region& r, const Point& y);

bool base_contains(const Region& r, const Point& b) {
  if (r.kind == RegionKind::DilatedImage) return base_contains(*r.inner, b);
  return shape_contains(r, b);
}

bool shape_contains(const Region& r, const Point& y) {
  const auto& g = r.group();
  switch (r.kind) {
    case RegionKind::Ball:
      return eval_norm(r.norm, y) <= 1.0;
    case RegionKind::GsetSmoothBox: {
      if (g.layer_norm(y, 1) >= 1.0) return false;
      for (int w = 2; w <= g.step(); ++w) {
        if (g.layer_dim(w) == 0) continue;
        const double e = std::pow(r.norm.epsilons[static_cast<std::size_t>(w - 1)], w);
        if (!(e * g.layer_norm(y, w) < std::pow(r.norm.xi, w - 1))) return false;
      }
      return true;
    }
    case RegionKind::GsetKoranyi: {
      const double h = g.layer_norm(y, 1);
      if (h > 1.0) return false;
      const double v = y[2];
      return v * v <= 2.0 * (1.0 - h * h * h * h);
    }
    case RegionKind::Box:
      for (std::size_t m = 0; m < g.dim(); ++m) {
        if (std::abs(y[m]) > r.half_widths[m]) return false;
      }
      return true;
    case RegionKind::UserPredicate:
      return r.predicate(y);
    case RegionKind::DilatedImage: {
      Point z = dilate(g, 1.0 / r.lambda, y);
      for (auto& v : z.coords()) v /= r.euclid_scale;
      return region_contains(*r.inner, z);
    }
  }
  return false;
}

// Shape point -> global point.
Point place(const Region& r, const Point& y) {
  const auto& g = r.group();
  Point out = r.radius == 1.0 ? y : dilate(g, r.radius, y);
  if (!is_identity(r.center)) out = multiply(g, r.center, out);
  return out;
}

Point map_from_base(const Region& r, const Point& b) {
  if (r.kind != RegionKind::DilatedImage) return place(r, b);
  Point z = map_from_base(*r.inner, b);
  for (auto& v : z.coords()) v *= r.euclid_scale;
  return place(r, dilate(r.group(), r.lambda, z));
}

// Coordinate box of the shape frame for non-dilated shapes.
std::vector<double> shape_box(const Region& r) {
  const auto& g = r.group();
  switch (r.kind) {
    case RegionKind::Ball:
      return expand(g, unit_ball_box(r.norm));
    case RegionKind::GsetSmoothBox: {
      std::vector<double> per_weight(static_cast<std::size_t>(g.step()), 1.0);
      for (int w = 2; w <= g.step(); ++w) {
        per_weight[static_cast<std::size_t>(w - 1)] =
            std::pow(r.norm.xi, w - 1) / std::pow(r.norm.epsilons[static_cast<std::size_t>(w - 1)], w);
      }
      return expand(g, per_weight);
    }
    case RegionKind::GsetKoranyi:
      return {1.0, 1.0, std::sqrt(2.0)};
    case RegionKind::Box:
    case RegionKind::UserPredicate:
      return r.half_widths;
    case RegionKind::DilatedImage:
      break;
  }
  throw Error("shape_box called on a dilated image");
}

// Upper bound of the norm over a coordinate box.
double box_norm_bound(const NormSpec& n, const std::vector<double>& h) {
  const auto& g = n.group;
  Point corner = Point::from(h);
  if (n.kind == NormKind::ParabMaxSigned) return std::sqrt(h[1]) + h[0];
  (void)g;
  return eval_norm(n, corner);
}

}  // namespace

std::string_view to_string(RegionKind kind) noexcept {
  for (const auto& [k, name] : kRegionNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

RegionKind parse_region_kind(std::string_view text) {
  for (const auto& [k, name] : kRegionNames) {
    if (name == text) return k;
  }
  throw MalformedSpec("unknown region kind '" + std::string(text) + "'");
}

Region make_ball(const NormSpec& norm, const Point& center, double radius) {
  norm.group.check(center);
  if (!(radius > 0.0)) throw NonpositiveLambda("ball radius must be positive");
  Region r;
  r.kind = RegionKind::Ball;
  r.norm = norm;
  r.center = center;
  r.radius = radius;
  return r;
}

Region make_ball(const NormSpec& norm, double radius) { return make_ball(norm, norm.group.zero(), radius); }

Region make_gset(const NormSpec& norm, const Point& center, double radius) {
  Region r = make_ball(norm, center, radius);
  if (norm.kind == NormKind::SmoothBox) {
    r.kind = RegionKind::GsetSmoothBox;
  } else if (norm.kind == NormKind::Koranyi) {
    r.kind = RegionKind::GsetKoranyi;
  } else {
    throw GroupMismatch("G-sets exist for smooth-box and koranyi norms only, got " + std::string(to_string(norm.kind)));
  }
  return r;
}

Region make_gset(const NormSpec& norm, double radius) { return make_gset(norm, norm.group.zero(), radius); }

Region make_box(const NormSpec& norm, std::vector<double> half_widths) {
  if (half_widths.size() != norm.group.dim()) throw DimensionMismatch("box needs one half-width per coordinate");
  Region r = make_ball(norm, 1.0);
  r.kind = RegionKind::Box;
  r.half_widths = std::move(half_widths);
  return r;
}

Region make_dilated_image(const Region& inner, double lambda, double euclid_scale) {
  if (!(lambda > 0.0) || !(euclid_scale > 0.0)) throw NonpositiveLambda("dilated image needs positive factors");
  Region r = make_ball(inner.norm, 1.0);
  r.kind = RegionKind::DilatedImage;
  r.inner = std::make_shared<const Region>(inner);
  r.lambda = lambda;
  r.euclid_scale = euclid_scale;
  return r;
}

Region make_user_region(const NormSpec& norm, std::function<bool(const Point&)> predicate,
                        std::vector<double> half_widths) {
  Region r = make_box(norm, std::move(half_widths));
  r.kind = RegionKind::UserPredicate;
  r.predicate = std::move(predicate);
  return r;
}

Region translated(Region r, const Point& center) {
  r.group().check(center);
  r.center = multiply(r.group(), center, r.center);
  return r;
}

Region rescaled(Region r, double radius) {
  if (!(radius > 0.0)) throw NonpositiveLambda("radius must be positive");
  r.radius *= radius;
  r.center = dilate(r.group(), radius, r.center);
  return r;
}

bool region_contains(const Region& region, const Point& x) {
  const auto& g = region.group();
  g.check(x);
  Point y = is_identity(region.center) ? x : multiply(g, inverse(g, region.center), x);
  if (region.radius != 1.0) y = dilate(g, 1.0 / region.radius, y);
  return shape_contains(region, y);
}

double gset_gauge(const NormSpec& norm, const Point& z) {
  const auto& g = norm.group;
  if (norm.kind == NormKind::Koranyi) {
    const double h2 = z[0] * z[0] + z[1] * z[1];
    return layer_root(h2 * h2 + 0.5 * z[2] * z[2], 4);
  }
  if (norm.kind != NormKind::SmoothBox) throw GroupMismatch("no G-set for norm " + std::string(to_string(norm.kind)));
  double m = g.layer_norm(z, 1);
  for (int w = 2; w <= g.step(); ++w) {
    if (g.layer_dim(w) == 0) continue;
    const double e = std::pow(norm.epsilons[static_cast<std::size_t>(w - 1)], w);
    m = std::max(m, layer_root(e * g.layer_norm(z, w) / std::pow(norm.xi, w - 1), w));
  }
  return m;
}

bool gset_gauge_admits(const NormSpec& norm, double gauge, double r) noexcept {
  return norm.kind == NormKind::Koranyi ? gauge <= r : gauge < r;
}

double bounding_radius(const Region& region) {
  double shape = 0.0;
  switch (region.kind) {
    case RegionKind::Ball:
      shape = 1.0;
      break;
    case RegionKind::GsetSmoothBox:
      // eps_l |x_l|^(1/l) < xi^((l-1)/l) < 2 on every layer.
      shape = 2.0;
      break;
    case RegionKind::GsetKoranyi:
      shape = std::pow(2.0, 0.25);
      break;
    case RegionKind::Box:
    case RegionKind::UserPredicate:
      shape = box_norm_bound(region.norm, region.half_widths);
      break;
    case RegionKind::DilatedImage: {
      double factor = std::max(1.0, region.euclid_scale);
      if (region.norm.kind == NormKind::ParabMaxSigned) factor *= 2.0;
      shape = region.lambda * factor * bounding_radius(*region.inner);
      break;
    }
  }
  return eval_norm(region.norm, region.center) + region.radius * shape;
}

double region_jacobian(const Region& region) {
  const auto& g = region.group();
  const double q = g.homogeneous_dimension();
  double j = std::pow(region.radius, q);
  if (region.kind == RegionKind::DilatedImage) {
    j *= std::pow(region.lambda, q) * std::pow(region.euclid_scale, static_cast<double>(g.dim())) *
         region_jacobian(*region.inner);
  }
  return j;
}

std::vector<double> base_box(const Region& region) {
  if (region.kind == RegionKind::DilatedImage) return base_box(*region.inner);
  return shape_box(region);
}

std::optional<std::vector<double>> coordinate_box(const Region& region) {
  if (!is_identity(region.center)) return std::nullopt;
  const auto& g = region.group();
  std::vector<double> box;
  if (region.kind == RegionKind::DilatedImage) {
    auto inner = coordinate_box(*region.inner);
    if (!inner) return std::nullopt;
    box = std::move(*inner);
    for (std::size_t m = 0; m < g.dim(); ++m) box[m] *= region.euclid_scale * std::pow(region.lambda, g.weight_of(m));
  } else {
    box = shape_box(region);
  }
  for (std::size_t m = 0; m < g.dim(); ++m) box[m] *= std::pow(region.radius, g.weight_of(m));
  return box;
}

std::optional<Point> try_sample_region(const Region& region, Rng& rng, std::size_t max_attempts,
                                       std::size_t* attempts) {
  const auto box = base_box(region);
  const auto& g = region.group();
  Point b(g.dim());
  for (std::size_t a = 0; a < max_attempts; ++a) {
    for (std::size_t m = 0; m < g.dim(); ++m) b[m] = box[m] * rng.symmetric();
    if (attempts) ++*attempts;
    if (base_contains(region, b)) return map_from_base(region, b);
  }
  return std::nullopt;
}

Point sample_region(const Region& region, Rng& rng, std::size_t max_attempts) {
  auto p = try_sample_region(region, rng, max_attempts);
  if (!p) throw EmptyRegion("rejection sampling found no member of the region");
  return *p;
}

namespace {

struct Pair {
  double d;
  std::size_t i;
  std::size_t j;
};

}  // namespace

DiameterResult diameter(const Region& region, std::size_t budget, std::uint64_t seed) {
  const auto& g = region.group();
  const auto& norm = region.norm;
  DiameterResult res;
  Rng rng(seed);

  const std::size_t m = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::sqrt(2.0 * static_cast<double>(std::max<std::size_t>(budget, 1)))), 2, 8192);
  std::vector<Point> pts;
  pts.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto p = try_sample_region(region, rng, std::max<std::size_t>(budget, 1000));
    if (!p) throw EmptyRegion("rejection sampling found no member of the region within the budget");
    pts.push_back(*p);
  }
  res.sampled_points = m;

  constexpr std::size_t kTop = 12;
  std::vector<Pair> top;
  for (std::size_t i = 0; i < m; ++i) {
    const Point inv = inverse(g, pts[i]);
    for (std::size_t j = i + 1; j < m; ++j) {
      const double d = eval_norm(norm, multiply(g, inv, pts[j]));
      ++res.evaluations;
      if (top.size() < kTop || d > top.back().d) {
        top.push_back({d, i, j});
        std::sort(top.begin(), top.end(), [](const Pair& a, const Pair& b) { return a.d > b.d; });
        if (top.size() > kTop) top.pop_back();
      }
    }
  }

  std::vector<double> scale;
  if (auto box = coordinate_box(region)) {
    scale = std::move(*box);
  } else {
    const double rb = bounding_radius(region);
    scale = expand(g, unit_ball_box(norm));
    for (std::size_t c = 0; c < g.dim(); ++c) scale[c] *= std::pow(rb, g.weight_of(c));
  }

  res.lower_bound = top.front().d;
  res.p = pts[top.front().i];
  res.q = pts[top.front().j];

  constexpr int kSteps = 200;
  constexpr int kRandomMoves = 6;
  for (const auto& start : top) {
    Point p = pts[start.i];
    Point q = pts[start.j];
    double best = start.d;
    std::vector<double> step(g.dim());
    for (std::size_t c = 0; c < g.dim(); ++c) step[c] = 0.1 * scale[c];

    // Candidates outside the region are pulled back toward the center along
    // the dilation curve, so the search can slide along the boundary.
    const Point center_inv = inverse(g, region.center);
    auto retract = [&](Point& cand) {
      if (region_contains(region, cand)) return true;
      const Point local = multiply(g, center_inv, cand);
      double lo = 0.0, hi = 1.0;
      for (int k = 0; k < 30; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (region_contains(region, multiply(g, region.center, dilate(g, mid, local)))) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      if (lo == 0.0) return false;
      cand = multiply(g, region.center, dilate(g, lo, local));
      return true;
    };

    auto try_move = [&](Point& moving, const Point& other, Point cand, bool moving_is_p) {
      if (!retract(cand)) return false;
      const double d = moving_is_p ? distance(norm, cand, other) : distance(norm, other, cand);
      ++res.evaluations;
      if (d > best) {
        best = d;
        moving = cand;
        return true;
      }
      return false;
    };

    for (int it = 0; it < kSteps; ++it) {
      bool improved = false;
      for (int side = 0; side < 2; ++side) {
        Point& moving = side == 0 ? p : q;
        const Point& other = side == 0 ? q : p;
        for (std::size_t c = 0; c < g.dim(); ++c) {
          for (double sgn : {1.0, -1.0}) {
            Point cand = moving;
            cand[c] += sgn * step[c];
            improved |= try_move(moving, other, cand, side == 0);
          }
        }
        for (int k = 0; k < kRandomMoves; ++k) {
          Point cand = moving;
          for (std::size_t c = 0; c < g.dim(); ++c) cand[c] += step[c] * rng.normal();
          improved |= try_move(moving, other, cand, side == 0);
        }
      }
      if (!improved) {
        for (auto& s : step) s *= 0.5;
      }
    }
    if (best > res.lower_bound) {
      res.lower_bound = best;
      res.p = p;
      res.q = q;
    }
  }
  return res;
}

InclusionReport inclusion_check(const Region& a, const Region& b, std::size_t n_samples, std::uint64_t seed) {
  if (!(a.group() == b.group())) throw GroupMismatch("inclusion_check needs regions on the same group");
  InclusionReport rep;
  rep.n_samples = n_samples;
  Rng rng(seed);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const Point x = sample_region(a, rng);
    if (!region_contains(b, x)) {
      if (!rep.witness) rep.witness = x;
      ++rep.violations;
    }
  }
  return rep;
}

}  // namespace homlab
