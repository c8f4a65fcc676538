#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "homlab/group.hpp"
#include "homlab/norms.hpp"
#include "homlab/regions.hpp"

namespace homlab {

/// Finite weighted approximation of H^alpha restricted to a set: each point
/// carries the mass of its quadrature cell.
struct PointCloud {
  std::vector<Point> points;
  std::vector<double> weights;
  double alpha = 0.0;
  NormSpec norm;

  std::size_t size() const noexcept { return points.size(); }
  double total_mass() const noexcept;
  /// Throws PreconditionFailed on non-positive or non-finite weights.
  void validate() const;
};

enum class Shape { Ball, Gset };
std::string_view to_string(Shape s) noexcept;
Shape parse_shape(std::string_view text);

// ---------------------------------------------------------------- volumes

struct VolumeEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  std::size_t hits = 0;
};

/// Lebesgue (Haar) volume in exponential coordinates: Monte Carlo over the
/// base-frame sampling box, times the Jacobian of the placement maps.
VolumeEstimate haar_volume(const Region& region, std::size_t n_samples, std::uint64_t seed);
/// Same quantity by Monte Carlo over the global coordinate box with the
/// region's own membership test. Needs identity centers throughout.
VolumeEstimate haar_volume_direct(const Region& region, std::size_t n_samples, std::uint64_t seed);

struct RatioEstimate {
  VolumeEstimate volume;
  DiameterResult diameter;
  int homogeneous_dim = 0;
  /// volume * (2 / diameter_lower_bound)^Q; an upper estimate of the true ratio.
  double ratio = 0.0;
};

RatioEstimate isodiametric_ratio(const Region& region, std::size_t budget, std::uint64_t seed);

struct Improvement {
  Region region;  ///< delta_2(C / 2), C / 2 the euclidean contraction
  VolumeEstimate volume_ball;
  VolumeEstimate volume_c;
  VolumeEstimate volume_result;   ///< direct Monte Carlo of the result
  double predicted_volume = 0.0;  ///< 2^Q 2^-dim vol(C)
  DiameterResult diameter;
};

/// Builds delta_2(C / 2) after checking, on `checks` samples, that C lies in
/// the ball, is symmetric and euclidean-convex, and has more than half its
/// volume. Verifies diameter <= 2 + 1e-6 and the volume identity afterwards.
Improvement metelichenko_improve(const Region& ball, const Region& c, std::size_t checks, std::uint64_t seed);

// ------------------------------------------------------- finite measures

enum class CoverVariant { Hausdorff, Spherical, Centered };
std::string_view to_string(CoverVariant v) noexcept;
CoverVariant parse_cover_variant(std::string_view text);

inline constexpr std::size_t kFiniteMeasureMaxPoints = 12;

struct FiniteMeasure {
  double value = 0.0;
  /// Spherical values are upper bounds over a candidate-center set.
  bool upper_bound_only = false;
};

/// delta-scale covering measures of a finite set (no dimensional constant):
///  hausdorff: min over partitions into parts of diameter <= delta of sum diam^alpha;
///  centered:  max over subsets E of the min cost of covers of E by balls
///             centered in E with radius <= delta, cost sum (2r)^alpha;
///  spherical: min cost over balls centered at data points and pairwise
///             midpoints (flagged upper bound).
/// Zero-radius balls and singleton parts cost 0^alpha (1 when alpha == 0).
FiniteMeasure finite_measure_exact(std::span<const Point> points, const NormSpec& norm, double alpha, double delta,
                                   CoverVariant variant);

// ------------------------------------------------------------- densities

/// (sum of weights of cloud points in the closed shape(x, r)) / (2r)^alpha.
/// The G-set is taken closed as well, so the ball count never exceeds it.
double empirical_density(const PointCloud& cloud, const Point& x, double r, Shape shape);

struct ProfileRow {
  double r = 0.0;
  double ratio = 0.0;
};

struct DensityProfile {
  std::vector<ProfileRow> rows;
  double lower = 0.0;  ///< min over the grid: lower-density surrogate
  double upper = 0.0;  ///< max over the grid: upper-density surrogate
};

/// empirical_density on a decreasing scale grid.
DensityProfile density_profile(const PointCloud& cloud, const Point& x, std::span<const double> scales, Shape shape);

/// Neighbour rank used for the cloud resolution.
inline constexpr std::size_t kResolutionNeighbour = 5;

/// Median distance to the 5th nearest neighbour; 0 for alpha == 0 clouds,
/// where counting measure is represented exactly. Infinite when the cloud
/// has too few points.
double cloud_resolution(const PointCloud& cloud);

/// r_max, r_max/2, r_max/4, ... while the scale exceeds `floor` (at most 60 scales).
std::vector<double> dyadic_scales(double r_max, double floor);

/// Ball and G-set masses for every point of a cloud on one scale grid.
struct DensityTable {
  std::vector<double> scales;     ///< decreasing
  std::size_t n_points = 0;
  std::vector<double> ball_mass;  ///< [point * scales.size() + scale]
  std::vector<double> gset_mass;  ///< empty when the norm has no G-set
  double resolution = 0.0;

  double ball_ratio(std::size_t point, std::size_t scale, double alpha) const;
  double gset_ratio(std::size_t point, std::size_t scale, double alpha) const;
};

/// Computes every (point, scale) mass in one pass over point pairs; the
/// per-point work is spread over `threads` workers (0 = hardware) and the
/// result does not depend on the worker count.
DensityTable compute_density_table(const PointCloud& cloud, std::vector<double> scales, unsigned threads = 0);

}  // namespace homlab
