#include "homlab/sfunction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "homlab/errors.hpp"
#include "homlab/random.hpp"
#include "homlab/regions.hpp"

namespace homlab {

namespace {

double grid_radius(double lo, std::size_t i) {
  return lo + (1.0 - lo) * static_cast<double>(i + 1) / static_cast<double>(kRadiusGrid + 1);
}

const ConstantsReport& constants_of(const NormSpec& norm) {
  if (norm.kind != NormKind::SmoothBox) throw PreconditionFailed("smooth-box inequalities need a smooth-box norm");
  if (!norm.constants) throw PreconditionFailed("smooth-box norm carries no BCH constants; estimate them first");
  return *norm.constants;
}

std::optional<double> smooth_box_feasible_r(const NormSpec& norm, double t, double s) {
  const double lo = t + s;
  if (!(lo < 1.0)) return std::nullopt;
  for (std::size_t i = 0; i < kRadiusGrid; ++i) {
    const double r = grid_radius(lo, i);
    if (smooth_box_conditions_hold(norm, t, s, r)) return r;
  }
  return std::nullopt;
}

// Deterministic probe set of the closed koranyi unit ball, dense on the sphere.
const std::vector<Point>& koranyi_probe() {
  static const std::vector<Point> probe = [] {
    std::vector<Point> pts;
    constexpr int kHeights = 33;
    constexpr int kAngles = 32;
    for (double rho : {1.0, 0.75, 0.5}) {
      for (int a = 0; a < kHeights; ++a) {
        const double tau = -1.0 + 2.0 * a / (kHeights - 1);
        const double h = std::pow(std::max(0.0, 1.0 - tau * tau), 0.25);
        for (int b = 0; b < kAngles; ++b) {
          const double th = 2.0 * std::numbers::pi * b / kAngles;
          pts.push_back({rho * h * std::cos(th), rho * h * std::sin(th), rho * rho * tau});
        }
      }
    }
    return pts;
  }();
  return probe;
}

std::optional<double> koranyi_feasible_r(const NormSpec& norm, double t, double s) {
  const double lo = t + s;
  if (!(lo < 1.0)) return std::nullopt;
  const auto& g = norm.group;
  // By rotation and reflection symmetry, x = (t, 0, sqrt(1 - t^4)) represents every x with |x| = 1.
  const Point x{t, 0.0, std::sqrt(std::max(0.0, 1.0 - t * t * t * t))};
  double max_gauge = 0.0;
  for (const auto& u : koranyi_probe()) {
    max_gauge = std::max(max_gauge, gset_gauge(norm, multiply(g, x, dilate(g, s, u))));
  }
  // |y| >= 1 - s on B(x, s) by the triangle inequality.
  for (std::size_t i = 0; i < kRadiusGrid; ++i) {
    const double r = grid_radius(lo, i);
    if (max_gauge <= r && r < 1.0 - s) return r;
  }
  return std::nullopt;
}

std::optional<double> feasible_r(const NormSpec& norm, double t, double s) {
  if (norm.kind == NormKind::Koranyi) return koranyi_feasible_r(norm, t, s);
  return smooth_box_feasible_r(norm, t, s);
}

}  // namespace

bool smooth_box_conditions_hold(const NormSpec& norm, double t, double s, double r) {
  const auto& c = constants_of(norm);
  const auto& g = norm.group;
  if (!(t + s < r && r < 1.0)) return false;
  for (int w = 2; w <= g.step(); ++w) {
    if (g.layer_dim(w) == 0) continue;
    const auto l = static_cast<std::size_t>(w - 1);
    const double e = std::pow(norm.epsilons[l], w);
    const double ct = c.c_tilde[l];
    // Upper layers of y stay inside G(0, r).
    if (!(1.0 + std::pow(s, w) + std::pow(4.0, w) * e * ct <= std::pow(norm.xi, w - 1) * std::pow(r, w))) return false;
    // The layer attaining |x| = 1 keeps y outside B(0, r); demanded for every layer.
    const double k = std::pow(2.0, w) * ct * e;
    if (!((1.0 - k) - std::pow(s, w) * (1.0 + k) > std::pow(r, w))) return false;
  }
  return true;
}

SRadius solve_s(const NormSpec& norm, double t, double tol) {
  if (!(t >= 0.0 && t < 1.0)) throw PreconditionFailed("solve_s needs t in [0, 1)");
  if (norm.kind != NormKind::Koranyi) constants_of(norm);
  double lo = 0.0;
  double hi = 1.0 - t;
  double best_r = 0.0;
  for (int it = 0; it < kBisectionSteps && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (auto r = feasible_r(norm, t, mid)) {
      lo = mid;
      best_r = *r;
    } else {
      hi = mid;
    }
  }
  if (!(lo > 0.0)) {
    throw Infeasible("no s > 0 satisfies the annulus system at t = " + std::to_string(t) +
                     " (epsilons too large for the BCH constants?)");
  }
  return {lo, best_r};
}

SFunctionTable tabulate_s(const NormSpec& norm, std::size_t n_points) {
  SFunctionTable table;
  table.kind = norm.kind;
  table.experimental = norm.kind == NormKind::Koranyi;
  for (std::size_t i = 0; i < n_points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n_points);
    const auto sr = solve_s(norm, t);
    table.rows.push_back({t, sr.s, sr.r});
  }
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const auto& a = table.rows[i - 1];
    const auto& b = table.rows[i];
    table.lipschitz_estimate = std::max(table.lipschitz_estimate, std::abs(b.s - a.s) / (b.t - a.t));
  }
  return table;
}

AnnulusReport verify_annulus(const NormSpec& norm, const Point& x, std::size_t n_samples, std::uint64_t seed) {
  const auto& g = norm.group;
  g.check(x);
  const double nx = eval_norm(norm, x);
  const double h = g.layer_norm(x, 1);
  if (!(h < nx)) throw PreconditionFailed("verify_annulus needs |x_1| < |x|");
  AnnulusReport rep;
  rep.t = h / nx;
  const auto sr = solve_s(norm, rep.t);
  rep.s = sr.s;
  rep.r = sr.r * nx;
  rep.norm_x = nx;
  rep.n_samples = n_samples;

  const Region ball = make_ball(norm, x, nx * sr.s);
  const Region gset = make_gset(norm, rep.r);
  Rng rng(seed);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const Point y = sample_region(ball, rng);
    if (!region_contains(gset, y) || !(eval_norm(norm, y) > rep.r)) {
      if (!rep.witness) rep.witness = y;
      ++rep.violations;
    }
  }
  return rep;
}

Point unit_sphere_point(const NormSpec& norm, double t, Rng& rng) {
  const auto& g = norm.group;
  if (!(t >= 0.0 && t < 1.0)) throw PreconditionFailed("unit_sphere_point needs t in [0, 1)");
  if (!g.has_horizontal_layer() || g.step() < 2) throw PreconditionFailed("unit_sphere_point needs a horizontal and an upper layer");
  auto random_direction = [&](int w) {
    std::vector<double> u(static_cast<std::size_t>(g.layer_dim(w)));
    double n2 = 0.0;
    while (n2 < 1e-12) {
      n2 = 0.0;
      for (auto& c : u) {
        c = rng.normal();
        n2 += c * c;
      }
    }
    for (auto& c : u) c /= std::sqrt(n2);
    return u;
  };
  Point x = g.zero();
  auto put = [&](int w, const std::vector<double>& u, double mag) {
    auto block = g.layer(x, w);
    for (std::size_t i = 0; i < block.size(); ++i) block[i] = mag * u[i];
  };
  put(1, random_direction(1), t);
  if (norm.kind == NormKind::Koranyi) {
    put(2, random_direction(2), std::sqrt(1.0 - t * t * t * t));
    return x;
  }
  if (norm.kind != NormKind::SmoothBox) throw PreconditionFailed("unit_sphere_point needs a smooth-box or koranyi norm");
  std::vector<int> upper;
  for (int w = 2; w <= g.step(); ++w) {
    if (g.layer_dim(w) > 0) upper.push_back(w);
  }
  const int top = upper[rng.index(upper.size())];
  for (int w : upper) {
    // eps_w |x_w|^(1/w) = 1 on the attaining layer, at most 1/2 elsewhere.
    const double share = w == top ? 1.0 : 0.5 * rng.uniform();
    const double e = norm.epsilons[static_cast<std::size_t>(w - 1)];
    put(w, random_direction(w), std::pow(share / e, w));
  }
  return x;
}

void require_clean(const AnnulusReport& report) {
  if (!report.passed()) {
    throw ViolationFound(std::to_string(report.violations) + " samples of B(x, |x| s) escape G(0, r) \\ B(0, r)");
  }
}

KResult k_of_eps(const NormSpec& norm, double eps, std::size_t grid) {
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionFailed("k_of_eps needs eps in (0, 1)");
  if (grid < 2) throw PreconditionFailed("k_of_eps needs at least two grid points");
  KResult res;
  res.min_s = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid; ++i) {
    const double t = (1.0 - eps) * static_cast<double>(i) / static_cast<double>(grid - 1);
    const double s = solve_s(norm, t).s;
    if (s < res.min_s) {
      res.min_s = s;
      res.argmin_t = t;
    }
  }
  res.k = 2 + static_cast<int>(std::ceil(2.0 / res.min_s));
  return res;
}

}  // namespace homlab
