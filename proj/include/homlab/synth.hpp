#pragma once

// Bundled point clouds. Weights are quadrature masses of H^alpha restricted
// to the generating set, measured in the restricted metric.

#include <cstdint>
#include <string_view>

#include "homlab/measures.hpp"

namespace homlab {

enum class SynthKind { HorizontalSegment, VerticalSegment, Atoms, UniformBall };

std::string_view to_string(SynthKind kind) noexcept;
SynthKind parse_synth_kind(std::string_view text);

/// Points (u e_1) for u on the midpoint grid of [-h, h], h the first-layer
/// extent of the unit ball. The restricted metric is |u - u'|, so each point
/// carries spacing^alpha (default alpha = 1: arclength).
PointCloud horizontal_segment(const NormSpec& norm, std::size_t n, double alpha = 1.0);

/// Points (t e_v) for e_v the first weight-2 basis vector and t on the
/// midpoint grid of [-h, h], h the weight-2 extent of the unit ball. Each
/// point carries (metric spacing)^alpha; at alpha = 2 on a central direction
/// this is the measure of a snowflake arc.
PointCloud vertical_segment(const NormSpec& norm, std::size_t n, double alpha = 2.0);

/// n unit atoms at seeded positions in the unit-ball coordinate box; alpha = 0.
PointCloud atoms(const NormSpec& norm, std::size_t n, std::uint64_t seed);

/// n seeded uniform members of B(0, 1), each weighted vol(B) / n (Haar
/// measure in exponential coordinates); alpha defaults to Q.
PointCloud uniform_ball(const NormSpec& norm, std::size_t n, std::uint64_t seed, double alpha = -1.0);

/// Dispatch by kind; alpha < 0 selects the kind's default.
PointCloud make_cloud(SynthKind kind, const NormSpec& norm, std::size_t n, std::uint64_t seed, double alpha = -1.0);

}  // namespace homlab
