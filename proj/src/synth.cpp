#include "homlab/synth.hpp"

#include <cmath>
#include <string>

#include "homlab/errors.hpp"
#include "homlab/random.hpp"
#include "homlab/regions.hpp"
#include "homlab/sampling.hpp"

namespace homlab {

std::string_view to_string(SynthKind kind) noexcept {
  switch (kind) {
    case SynthKind::HorizontalSegment: return "horizontal-segment";
    case SynthKind::VerticalSegment: return "vertical-segment";
    case SynthKind::Atoms: return "atoms";
    case SynthKind::UniformBall: return "uniform-ball";
  }
  return "atoms";
}

SynthKind parse_synth_kind(std::string_view text) {
  if (text == "horizontal-segment" || text == "horizontal") return SynthKind::HorizontalSegment;
  if (text == "vertical-segment" || text == "vertical") return SynthKind::VerticalSegment;
  if (text == "atoms") return SynthKind::Atoms;
  if (text == "uniform-ball" || text == "ball") return SynthKind::UniformBall;
  throw MalformedSpec("unknown cloud kind '" + std::string(text) + "'");
}

namespace {

PointCloud segment(const NormSpec& norm, std::size_t n, double alpha, int weight) {
  const auto& g = norm.group;
  if (n < 2) throw PreconditionFailed("a segment cloud needs at least two points");
  if (g.layer_dim(weight) == 0) {
    throw PreconditionFailed("group " + g.name() + " has no weight-" + std::to_string(weight) + " layer");
  }
  const double h = unit_ball_box(norm)[static_cast<std::size_t>(weight - 1)];
  const std::size_t coord = g.layer_offset(weight);
  const double dt = 2.0 * h / static_cast<double>(n);
  PointCloud cloud;
  cloud.alpha = alpha;
  cloud.norm = norm;
  for (std::size_t i = 0; i < n; ++i) {
    Point p = g.zero();
    p[coord] = -h + (static_cast<double>(i) + 0.5) * dt;
    cloud.points.push_back(p);
  }
  const double spacing = distance(norm, cloud.points[0], cloud.points[1]);
  cloud.weights.assign(n, std::pow(spacing, alpha));
  return cloud;
}

}  // namespace

PointCloud horizontal_segment(const NormSpec& norm, std::size_t n, double alpha) { return segment(norm, n, alpha, 1); }

PointCloud vertical_segment(const NormSpec& norm, std::size_t n, double alpha) { return segment(norm, n, alpha, 2); }

PointCloud atoms(const NormSpec& norm, std::size_t n, std::uint64_t seed) {
  const auto& g = norm.group;
  PointCloud cloud;
  cloud.alpha = 0.0;
  cloud.norm = norm;
  Rng rng(seed);
  const auto box = unit_ball_box(norm);
  for (std::size_t i = 0; i < n; ++i) cloud.points.push_back(sample_in_box(g, box, rng));
  cloud.weights.assign(n, 1.0);
  return cloud;
}

PointCloud uniform_ball(const NormSpec& norm, std::size_t n, std::uint64_t seed, double alpha) {
  if (n == 0) throw PreconditionFailed("uniform_ball needs at least one point");
  const Region ball = make_ball(norm);
  const double vol = haar_volume(ball, 1'000'000, mix_seed(seed, 0)).estimate;
  PointCloud cloud;
  cloud.alpha = alpha < 0.0 ? norm.group.homogeneous_dimension() : alpha;
  cloud.norm = norm;
  Rng rng(mix_seed(seed, 1));
  for (std::size_t i = 0; i < n; ++i) cloud.points.push_back(sample_region(ball, rng));
  cloud.weights.assign(n, vol / static_cast<double>(n));
  return cloud;
}

PointCloud make_cloud(SynthKind kind, const NormSpec& norm, std::size_t n, std::uint64_t seed, double alpha) {
  switch (kind) {
    case SynthKind::HorizontalSegment: return horizontal_segment(norm, n, alpha < 0.0 ? 1.0 : alpha);
    case SynthKind::VerticalSegment: return vertical_segment(norm, n, alpha < 0.0 ? 2.0 : alpha);
    case SynthKind::Atoms: {
      auto c = atoms(norm, n, seed);
      if (alpha >= 0.0) c.alpha = alpha;
      return c;
    }
    case SynthKind::UniformBall: return uniform_ball(norm, n, seed, alpha);
  }
  throw MalformedSpec("unknown cloud kind");
}

}  // namespace homlab
