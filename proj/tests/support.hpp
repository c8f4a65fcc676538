#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "homlab/group.hpp"
#include "homlab/norms.hpp"
#include "homlab/random.hpp"

namespace homlab::test {

/// Point with every coordinate uniform in [-scale, scale).
inline Point random_point(const GroupSpec& g, Rng& rng, double scale = 3.0) {
  Point x(g.dim());
  for (std::size_t m = 0; m < g.dim(); ++m) x[m] = scale * rng.symmetric();
  return x;
}

inline double max_abs_diff(const Point& a, const Point& b) {
  double d = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) d = std::max(d, std::abs(a[m] - b[m]));
  return d;
}

inline double max_abs(const Point& a) {
  double d = 0.0;
  for (double c : a.coords()) d = std::max(d, std::abs(c));
  return d;
}

/// Every bundled norm: the default smooth-box on each bundled group, koranyi
/// on heisenberg-1 and the parabolic family on parabolic-plane.
inline std::vector<NormSpec> all_bundled_norms() {
  std::vector<NormSpec> out;
  for (const auto& name : bundled_group_names()) out.push_back(default_smooth_box(bundled_group(name)));
  out.push_back(default_norm(NormKind::Koranyi, bundled_group("heisenberg-1")));
  for (auto kind : {NormKind::ParabInfty, NormKind::Parab4, NormKind::Parab1, NormKind::ParabMaxSigned}) {
    out.push_back(default_norm(kind, bundled_group("parabolic-plane")));
  }
  return out;
}

inline std::string label(const NormSpec& n) {
  return std::string(to_string(n.kind)) + " on " + n.group.name();
}

}  // namespace homlab::test
