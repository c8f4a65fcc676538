// Exhaustive covering measures of point sets with at most 12 members.
// Subsets are bitmasks; every search below is a dynamic program over masks.

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "homlab/errors.hpp"
#include "homlab/measures.hpp"

namespace homlab {

std::string_view to_string(CoverVariant v) noexcept {
  switch (v) {
    case CoverVariant::Hausdorff: return "hausdorff";
    case CoverVariant::Spherical: return "spherical";
    case CoverVariant::Centered: return "centered";
  }
  return "hausdorff";
}

CoverVariant parse_cover_variant(std::string_view text) {
  if (text == "hausdorff") return CoverVariant::Hausdorff;
  if (text == "spherical") return CoverVariant::Spherical;
  if (text == "centered") return CoverVariant::Centered;
  throw MalformedSpec("unknown measure variant '" + std::string(text) + "'");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Distances within this slack of a candidate radius count as covered.
constexpr double kCoverSlack = 1e-12;

double power(double base, double alpha) {
  if (alpha == 0.0) return 1.0;
  return std::pow(base, alpha);
}

int lowest_bit(unsigned mask) { return std::countr_zero(mask); }

struct Ball {
  unsigned members = 0;
  double cost = 0.0;
};

// Cheapest cover of every subset by the given balls; cover[mask] for all masks.
std::vector<double> min_covers(const std::vector<Ball>& balls, std::size_t n) {
  const unsigned full = (1u << n) - 1;
  std::vector<double> best(full + 1, kInf);
  best[0] = 0.0;
  for (unsigned mask = 1; mask <= full; ++mask) {
    const unsigned low = 1u << lowest_bit(mask);
    double b = kInf;
    for (const auto& ball : balls) {
      if (!(ball.members & low)) continue;
      b = std::min(b, ball.cost + best[mask & ~ball.members]);
    }
    best[mask] = b;
  }
  return best;
}

std::vector<Ball> balls_around(const NormSpec& norm, std::span<const Point> points, const Point& center, double alpha,
                               double delta) {
  std::vector<double> dist(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) dist[i] = distance(norm, center, points[i]);
  std::vector<Ball> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double r = dist[i];
    if (r > delta) continue;
    Ball b;
    b.cost = power(2.0 * r, alpha);
    for (std::size_t q = 0; q < points.size(); ++q) {
      if (dist[q] <= r + kCoverSlack) b.members |= 1u << q;
    }
    out.push_back(b);
  }
  return out;
}

double hausdorff(std::span<const Point> points, const NormSpec& norm, double alpha, double delta) {
  const std::size_t n = points.size();
  const unsigned full = (1u << n) - 1;
  std::vector<double> diam(full + 1, 0.0);
  for (unsigned mask = 1; mask <= full; ++mask) {
    const int low = lowest_bit(mask);
    const unsigned rest = mask & (mask - 1);
    double d = diam[rest];
    for (unsigned r = rest; r; r &= r - 1) d = std::max(d, distance(norm, points[low], points[lowest_bit(r)]));
    diam[mask] = d;
  }
  std::vector<double> best(full + 1, kInf);
  best[0] = 0.0;
  for (unsigned mask = 1; mask <= full; ++mask) {
    const unsigned low = 1u << lowest_bit(mask);
    const unsigned others = mask & ~low;
    double b = kInf;
    // Parts containing the lowest member: low plus any subset of the others.
    for (unsigned sub = others;; sub = (sub - 1) & others) {
      const unsigned part = sub | low;
      if (diam[part] <= delta) b = std::min(b, power(diam[part], alpha) + best[mask & ~part]);
      if (sub == 0) break;
    }
    best[mask] = b;
  }
  return best[full];
}

double centered(std::span<const Point> points, const NormSpec& norm, double alpha, double delta) {
  const std::size_t n = points.size();
  const unsigned full = (1u << n) - 1;
  std::vector<Ball> all;
  std::vector<int> center_of;
  for (std::size_t c = 0; c < n; ++c) {
    for (const auto& b : balls_around(norm, points, points[c], alpha, delta)) {
      all.push_back(b);
      center_of.push_back(static_cast<int>(c));
    }
  }
  double value = 0.0;
  std::vector<Ball> local;
  std::vector<double> cover(full + 1, kInf);
  cover[0] = 0.0;
  for (unsigned e = 1; e <= full; ++e) {
    // Balls must be centered in E; only their traces on E matter.
    local.clear();
    for (std::size_t b = 0; b < all.size(); ++b) {
      if (e & (1u << center_of[b])) local.push_back({all[b].members & e, all[b].cost});
    }
    // Submasks of E in increasing order (s -> (s - e) & e), so smaller ones are ready.
    for (unsigned s = e & (0u - e);; s = (s - e) & e) {
      const unsigned low = 1u << lowest_bit(s);
      double b = kInf;
      for (const auto& ball : local) {
        if (!(ball.members & low)) continue;
        b = std::min(b, ball.cost + cover[s & ~ball.members]);
      }
      cover[s] = b;
      if (s == e) break;
    }
    value = std::max(value, cover[e]);
  }
  return value;
}

double spherical(std::span<const Point> points, const NormSpec& norm, double alpha, double delta) {
  const auto& g = norm.group;
  const std::size_t n = points.size();
  std::vector<Point> centers(points.begin(), points.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point step = multiply(g, inverse(g, points[i]), points[j]);
      centers.push_back(multiply(g, points[i], dilate(g, 0.5, step)));
    }
  }
  std::vector<Ball> balls;
  for (const auto& c : centers) {
    for (const auto& b : balls_around(norm, points, c, alpha, delta)) balls.push_back(b);
  }
  return min_covers(balls, n)[(1u << n) - 1];
}

}  // namespace

FiniteMeasure finite_measure_exact(std::span<const Point> points, const NormSpec& norm, double alpha, double delta,
                                   CoverVariant variant) {
  if (points.size() > kFiniteMeasureMaxPoints) {
    throw TooLarge("exhaustive covering search supports at most " + std::to_string(kFiniteMeasureMaxPoints) +
                   " points, got " + std::to_string(points.size()));
  }
  if (!(alpha >= 0.0)) throw PreconditionFailed("finite_measure_exact needs alpha >= 0");
  if (!(delta >= 0.0)) throw PreconditionFailed("finite_measure_exact needs delta >= 0");
  for (const auto& p : points) norm.group.check(p);
  FiniteMeasure out;
  if (points.empty()) return out;
  switch (variant) {
    case CoverVariant::Hausdorff: out.value = hausdorff(points, norm, alpha, delta); break;
    case CoverVariant::Centered: out.value = centered(points, norm, alpha, delta); break;
    case CoverVariant::Spherical:
      out.value = spherical(points, norm, alpha, delta);
      out.upper_bound_only = true;
      break;
  }
  return out;
}

}  // namespace homlab
