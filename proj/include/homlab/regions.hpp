#pragma once

// Implicit compact regions of a homogeneous group. Every region is
//   R = center * delta_radius(S)
// for a shape S given in its own frame (unit ball, G(0,1), a box, a user
// predicate, or a dilated euclidean rescaling of another region). Left
// translations and dilations have constant Jacobian in exponential
// coordinates, so uniform samples of S map to uniform samples of R.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "homlab/group.hpp"
#include "homlab/norms.hpp"
#include "homlab/random.hpp"

namespace homlab {

enum class RegionKind { Ball, GsetSmoothBox, GsetKoranyi, DilatedImage, Box, UserPredicate };

std::string_view to_string(RegionKind kind) noexcept;
RegionKind parse_region_kind(std::string_view text);

struct Region {
  RegionKind kind = RegionKind::Ball;
  NormSpec norm;
  Point center;
  double radius = 1.0;
  /// Box and user-predicate shapes: per-coordinate half-widths in the shape frame.
  std::vector<double> half_widths;
  /// Dilated image: S = delta_lambda(euclid_scale * inner).
  std::shared_ptr<const Region> inner;
  double lambda = 1.0;
  double euclid_scale = 1.0;
  std::function<bool(const Point&)> predicate;

  const GroupSpec& group() const noexcept { return norm.group; }
};

Region make_ball(const NormSpec& norm, const Point& center, double radius);
Region make_ball(const NormSpec& norm, double radius = 1.0);
/// G(x, r) = x * delta_r(G(0,1)); the G-set flavour follows the norm
/// (smooth-box or koranyi).
Region make_gset(const NormSpec& norm, const Point& center, double radius);
Region make_gset(const NormSpec& norm, double radius = 1.0);
Region make_box(const NormSpec& norm, std::vector<double> half_widths);
/// delta_lambda(euclid_scale * inner), where euclid_scale is a plain
/// coordinatewise contraction.
Region make_dilated_image(const Region& inner, double lambda, double euclid_scale = 1.0);
/// The predicate is evaluated in the shape frame and must vanish outside the box.
Region make_user_region(const NormSpec& norm, std::function<bool(const Point&)> predicate,
                        std::vector<double> half_widths);
Region translated(Region r, const Point& center);
Region rescaled(Region r, double radius);

bool region_contains(const Region& region, const Point& x);

/// Smallest r such that z lies in G(0, r) (closure for the smooth-box G).
/// Membership: gauge < r for smooth-box (open), gauge <= r for koranyi.
double gset_gauge(const NormSpec& norm, const Point& z);
bool gset_gauge_admits(const NormSpec& norm, double gauge, double r) noexcept;

/// Norm-ball radius around the identity containing the region.
double bounding_radius(const Region& region);
/// Haar volume scale of the map from the shape-frame sample space to the region.
double region_jacobian(const Region& region);
/// Per-coordinate half-widths of the sampling box in the base frame.
std::vector<double> base_box(const Region& region);
/// Global coordinate box; available when every nested center is the identity.
std::optional<std::vector<double>> coordinate_box(const Region& region);

/// One uniform member of the region, or nullopt if `max_attempts` rejection
/// draws all missed. `attempts` accumulates the draws used.
std::optional<Point> try_sample_region(const Region& region, Rng& rng, std::size_t max_attempts,
                                       std::size_t* attempts = nullptr);
Point sample_region(const Region& region, Rng& rng, std::size_t max_attempts = 1'000'000);

struct DiameterResult {
  double lower_bound = 0.0;
  Point p;
  Point q;
  std::size_t sampled_points = 0;
  std::size_t evaluations = 0;
  /// True when lower_bound > claimed + tol (the claimed diameter is refuted).
  bool exceeds(double claimed, double tol = 1e-6) const noexcept { return lower_bound > claimed + tol; }
};

/// Seeded search for a far pair: rejection-sampled members, all-pairs max,
/// then local refinement of the best pairs (200 steps, shrinking steps).
/// The result is a certified lower bound on the diameter.
DiameterResult diameter(const Region& region, std::size_t budget, std::uint64_t seed);

struct InclusionReport {
  std::size_t n_samples = 0;
  std::size_t violations = 0;
  std::optional<Point> witness;
  bool passed() const noexcept { return violations == 0; }
};

/// Samples members of `a` and reports those outside `b`.
InclusionReport inclusion_check(const Region& a, const Region& b, std::size_t n_samples, std::uint64_t seed);

}  // namespace homlab
