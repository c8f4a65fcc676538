#pragma once

// Radii for the annulus lemma: for |x_1| < |x| there is |x_1| < r < |x| with
//   B(x, |x| s(t)) inside G(0, r) \ B(0, r),   t = |x_1| / |x|.
// For the smooth-box norm s is the largest value for which the sufficient
// inequality system holds (uniformly over the layer attaining |x|). For the
// koranyi norm it is obtained by direct feasibility sampling and flagged
// experimental.

#include <cstdint>
#include <optional>
#include <vector>

#include "homlab/group.hpp"
#include "homlab/norms.hpp"
#include "homlab/random.hpp"

namespace homlab {

inline constexpr std::size_t kRadiusGrid = 1024;
inline constexpr int kBisectionSteps = 60;

struct SRadius {
  double s = 0.0;
  double r = 0.0;
};

/// Largest s (bisection) for which some r on a 1024-point grid of (t+s, 1)
/// satisfies the sufficient system. Throws Infeasible when no s > 0 works.
SRadius solve_s(const NormSpec& norm, double t, double tol = 1e-12);

/// True when (s, r) satisfies the smooth-box sufficient system at t.
bool smooth_box_conditions_hold(const NormSpec& norm, double t, double s, double r);

struct SFunctionRow {
  double t = 0.0;
  double s = 0.0;
  double r = 0.0;
};

struct SFunctionTable {
  NormKind kind = NormKind::SmoothBox;
  std::vector<SFunctionRow> rows;
  bool experimental = false;
  /// Largest |s(t) - s(t')| / |t - t'| between neighbouring grid points.
  double lipschitz_estimate = 0.0;
};

/// s on the grid t_i = i / n_points, i = 0..n_points-1.
SFunctionTable tabulate_s(const NormSpec& norm, std::size_t n_points);

struct AnnulusReport {
  double t = 0.0;
  double s = 0.0;      ///< s(t) (unscaled)
  double r = 0.0;      ///< annulus radius, scaled by |x|
  double norm_x = 0.0;
  std::size_t n_samples = 0;
  std::size_t violations = 0;
  std::optional<Point> witness;
  bool passed() const noexcept { return violations == 0; }
};

/// Samples B(x, |x| s(t)) and checks every sample lies in G(0, r|x|) and
/// outside B(0, r|x|). Throws PreconditionFailed unless |x_1| < |x|.
AnnulusReport verify_annulus(const NormSpec& norm, const Point& x, std::size_t n_samples, std::uint64_t seed);
/// A seeded point with |x| = 1 and |x_1| = t: horizontal part t u for a
/// random unit u, upper layers random with one attaining the norm.
Point unit_sphere_point(const NormSpec& norm, double t, Rng& rng);

/// Throws ViolationFound carrying the witness if the report failed.
void require_clean(const AnnulusReport& report);

struct KResult {
  int k = 2;
  double min_s = 0.0;
  double argmin_t = 0.0;
};

/// m = min of s over a `grid`-point partition of [0, 1 - eps];
/// k = 2 + ceil(2 / m), so s(t) <= 2 / (k - 1) forces t >= 1 - eps on the grid.
KResult k_of_eps(const NormSpec& norm, double eps, std::size_t grid = 256);

}  // namespace homlab
