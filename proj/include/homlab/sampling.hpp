#pragma once

#include <vector>

#include "homlab/group.hpp"
#include "homlab/random.hpp"

namespace homlab {

/// Uniform sample from the coordinate box with half-width `half_widths[w-1]`
/// on every coordinate of layer w.
inline Point sample_in_box(const GroupSpec& g, const std::vector<double>& half_widths, Rng& rng) {
  Point x(g.dim());
  for (std::size_t m = 0; m < g.dim(); ++m) {
    x[m] = half_widths[static_cast<std::size_t>(g.weight_of(m) - 1)] * rng.symmetric();
  }
  return x;
}

/// Per-coordinate box volume for per-weight half-widths.
inline double box_volume(const GroupSpec& g, const std::vector<double>& half_widths) {
  double v = 1.0;
  for (std::size_t m = 0; m < g.dim(); ++m) v *= 2.0 * half_widths[static_cast<std::size_t>(g.weight_of(m) - 1)];
  return v;
}

}  // namespace homlab
