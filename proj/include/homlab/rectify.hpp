#pragma once

// Density-regular strata, the cone condition and graph charts over the
// horizontal layer. Finite clouds have no infinitesimal scales: every "for
// all small r" is read on the dyadic grid 2^-i strictly inside
// (4 * resolution, 1/j), and reports carry that window.

#include <cstdint>
#include <optional>
#include <vector>

#include "homlab/group.hpp"
#include "homlab/measures.hpp"
#include "homlab/norms.hpp"

namespace homlab {

/// True iff |base^-1 * y| <= (1 - eps)^-1 |(base^-1 * y)_1|, i.e. y lies
/// outside the vertical cone at base.
bool cone_check(const NormSpec& norm, const Point& base, const Point& y, double eps);

/// Dyadic scales 2^-i (i >= 1) above 4 * resolution.
std::vector<double> rectify_scales(double resolution);

/// Largest j with resolution < 1 / (10 j), capped at 1024.
int default_j_max(double resolution);

/// Indices of points whose ball ratio is >= 1 - 1/k and G-set ratio is
/// <= 1 + 1/k at every grid scale inside (4 * resolution, 1/j).
/// Throws ResolutionTooCoarse unless resolution < 1 / (10 j).
std::vector<std::size_t> classify_Ejk(const PointCloud& cloud, int k, int j);
std::vector<std::size_t> classify_Ejk(const PointCloud& cloud, const DensityTable& table, int k, int j);

/// Smallest j in [1, j_max] with the point in E_{j,k}; 0 when there is none.
std::vector<int> minimal_strata(const PointCloud& cloud, const DensityTable& table, int k, int j_max);

struct Chart {
  std::vector<std::size_t> members;  ///< cloud indices, ascending
  std::vector<Point> base;           ///< first layers
  std::vector<Point> values;         ///< remaining layers (the graph map)
  double lipschitz = 1.0;            ///< max d(p, q) / |p_1 - q_1| over member pairs
  int stratum = 0;
};

/// Checks the cone condition for every ordered member pair and returns the
/// chart. Throws ConeViolation carrying the first failing pair.
Chart build_chart(const NormSpec& norm, const PointCloud& cloud, const std::vector<std::size_t>& members, double eps);

struct ConeFailure {
  std::size_t first = 0;
  std::size_t second = 0;
  int stratum = 0;
};

struct ChartReport {
  double alpha = 0.0;
  double eps = 0.0;
  int k = 0;
  int j_max = 0;
  double resolution = 0.0;
  std::vector<double> scales;  ///< full grid; stratum j uses the part below 1/j
  bool experimental = false;   ///< koranyi annulus radii are sampled
  std::vector<Chart> charts;
  std::vector<std::size_t> residual;  ///< ascending
  std::vector<ConeFailure> cone_failures;
  double total_mass = 0.0;
  double charted_mass = 0.0;
  double residual_mass = 0.0;

  double charted_fraction() const noexcept { return total_mass > 0.0 ? charted_mass / total_mass : 0.0; }
};

/// k from eps, strata for j = 1..j_max (0 = automatic), greedy covers of each
/// stratum by balls of radius 1/(20 j), one chart per ball. A ball failing
/// the cone condition goes to the residual whole.
ChartReport rectify(const PointCloud& cloud, double eps, int j_max = 0, unsigned threads = 0);

struct ChartProjection {
  std::size_t chart_id = 0;
  double eta = 0.0;
  double threshold = 0.0;
  double lower_density = 0.0;  ///< min surrogate over assessed points
  std::size_t assessed = 0;
  std::vector<std::size_t> flagged;
};

struct ProjectionReport {
  std::vector<ChartProjection> charts;
  std::vector<std::size_t> flagged;  ///< ascending, all charts
  bool passed() const noexcept { return flagged.empty(); }
};

/// Re-validates each chart (injective first layers, Lipschitz <= 1 + eta),
/// removing and flagging the worst offenders, then pushes the charted mass
/// to the first layer and checks the euclidean density ratio
/// nu(B(x_1, r)) / (2r)^alpha >= (1 + eta)^-alpha (1 - 1/k) at the window
/// scales of the point's stratum whose ball meets no residual point.
/// eta defaults to each chart's achieved Lipschitz constant minus one.
ProjectionReport projection_density_check(const PointCloud& cloud, const ChartReport& report,
                                          std::optional<double> eta = std::nullopt);

}  // namespace homlab
