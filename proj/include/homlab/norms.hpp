#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "homlab/group.hpp"

namespace homlab {

enum class NormKind { SmoothBox, Koranyi, ParabInfty, Parab4, Parab1, ParabMaxSigned };

std::string_view to_string(NormKind kind) noexcept;
NormKind parse_norm_kind(std::string_view text);

inline constexpr double kDefaultXi = 1.95;
inline constexpr std::uint64_t kDefaultConstantsSeed = 20240501;
inline constexpr std::size_t kDefaultConstantsSamples = 100000;
/// Inflation applied to the sampled maximum of |Q_l| / (|x| + |y|)^l.
inline constexpr double kConstantsSafety = 1.25;
/// Margin below the threshold 4^l eps_l^l c_l < (2 - xi)^step.
inline constexpr double kEpsilonMargin = 0.5;

/// Sampled bounds on the BCH polynomials Q_l. Vectors are indexed by weight - 1.
struct ConstantsReport {
  std::vector<double> observed_max;  ///< max |Q_l(x,y)| / (|x| + |y|)^l seen in the sample
  std::vector<double> c_tilde;       ///< safety * observed_max
  std::vector<double> c;             ///< 2^(l-1) * c_tilde
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
};

/// A homogeneous norm on a fixed group. For the smooth-box family the
/// epsilons are indexed by weight - 1 with epsilons[0] == 1.
struct NormSpec {
  NormKind kind = NormKind::SmoothBox;
  GroupSpec group;
  std::vector<double> epsilons;
  double xi = kDefaultXi;
  std::optional<ConstantsReport> constants;
};

/// Builds a norm after checking that `kind` fits `group`. Empty epsilons mean
/// all ones. Does not enforce the epsilon smallness constraint; see
/// satisfies_epsilon_constraint.
NormSpec make_norm(NormKind kind, const GroupSpec& group, std::vector<double> epsilons = {}, double xi = kDefaultXi);

/// Smooth-box norm with constants estimated and epsilons selected for `xi`.
NormSpec default_smooth_box(const GroupSpec& group, double xi = kDefaultXi,
                            std::size_t n_samples = kDefaultConstantsSamples,
                            std::uint64_t seed = kDefaultConstantsSeed);

/// Koranyi gauge on heisenberg-1; parab-* on parabolic-plane; smooth-box
/// via default_smooth_box otherwise.
NormSpec default_norm(NormKind kind, const GroupSpec& group, double xi = kDefaultXi);

/// v^(1/w) with exact-rounding fast paths for small w.
inline double layer_root(double v, int w) noexcept {
  switch (w) {
    case 1: return v;
    case 2: return std::sqrt(v);
    case 3: return std::cbrt(v);
    case 4: return std::sqrt(std::sqrt(v));
    default: return std::pow(v, 1.0 / w);
  }
}

bool is_heisenberg_1(const GroupSpec& g) noexcept;
bool is_parabolic_plane(const GroupSpec& g) noexcept;

double eval_norm(const NormSpec& n, const Point& x);
/// d(x, y) = |x^-1 * y|.
double distance(const NormSpec& n, const Point& x, const Point& y);

/// Half-width per weight (indexed weight - 1) of a coordinate box containing
/// the closed unit ball.
std::vector<double> unit_ball_box(const NormSpec& n);

/// For every l >= 2: the sampled max of |Q_l(x,y)| / (|x| + |y|)^l over pairs
/// in the smooth-box unit ball with the given epsilons, inflated by 1.25.
ConstantsReport estimate_constants(const GroupSpec& g, const std::vector<double>& epsilons, std::size_t n_samples,
                                   std::uint64_t seed);
inline ConstantsReport estimate_constants(const GroupSpec& g, std::size_t n_samples, std::uint64_t seed) {
  return estimate_constants(g, {}, n_samples, seed);
}

struct EpsilonSelection {
  std::vector<double> epsilons;
  ConstantsReport constants;  ///< re-estimated with the final epsilons
};

/// eps_1 = 1 and, in increasing weight, eps_l = 0.5 ((2 - xi)^step / (4^l c_l))^(1/l)
/// with c_l re-estimated under the partial epsilon vector (eps_l = 1 when c_l = 0).
/// Sample count and seed are taken from `initial`.
EpsilonSelection select_epsilons(const GroupSpec& g, double xi, const ConstantsReport& initial);

/// 4^l eps_l^l c_l < (2 - xi)^step for every l >= 2.
bool satisfies_epsilon_constraint(const NormSpec& n);

struct AxiomCheck {
  std::string axiom;
  std::size_t violations = 0;
  double max_violation = 0.0;  ///< largest relative violation, 0 if none
};

struct NormValidation {
  std::vector<AxiomCheck> axioms;  ///< triangle, homogeneity, symmetry
  std::size_t n_triples = 0;
  std::uint64_t seed = 0;
  double tolerance = 1e-9;
  bool passed() const noexcept;
};

/// Samples triples in the ball of radius 10 and records relative violations
/// of the triangle inequality, homogeneity and symmetry above 1e-9.
NormValidation validate_norm(const NormSpec& n, std::size_t n_triples, std::uint64_t seed);

}  // namespace homlab
