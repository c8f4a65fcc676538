#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "homlab/errors.hpp"
#include "homlab/io.hpp"
#include "homlab/rectify.hpp"
#include "homlab/synth.hpp"
#include "support.hpp"

using namespace homlab;
using homlab::test::random_point;

namespace {

const NormSpec& h1_smooth_box() {
  static const NormSpec n = default_smooth_box(bundled_group("heisenberg-1"));
  return n;
}

const NormSpec& h1_koranyi() {
  static const NormSpec n = make_norm(NormKind::Koranyi, bundled_group("heisenberg-1"));
  return n;
}

double interior_fraction(const PointCloud& cloud, const std::vector<std::size_t>& idx, double half_width) {
  double in = 0.0, total = 0.0;
  std::vector<bool> member(cloud.size(), false);
  for (auto i : idx) member[i] = true;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (std::abs(cloud.points[i][0]) > half_width) continue;
    total += cloud.weights[i];
    if (member[i]) in += cloud.weights[i];
  }
  return in / total;
}

}  // namespace

TEST_SUITE("rectify") {

TEST_CASE("cone_check examples") {
  for (const auto* n : {&h1_smooth_box(), &h1_koranyi()}) {
    const auto& g = n->group;
    CHECK(cone_check(*n, g.zero(), {1, 0, 0}, 0.1));
    CHECK(cone_check(*n, g.zero(), {1, 0, 0}, 0.9));
    CHECK_FALSE(cone_check(*n, g.zero(), {0, 0, 1}, 0.1));
    CHECK_FALSE(cone_check(*n, g.zero(), {0, 0, 1}, 0.9));
    Rng rng(4);
    for (int i = 0; i < 2000; ++i) {
      const auto base = random_point(g, rng, 1.0);
      const auto y = random_point(g, rng, 1.0);
      const double eps = 0.05 + 0.9 * rng.uniform();
      CHECK(cone_check(*n, base, y, eps) == cone_check(*n, g.zero(), multiply(g, inverse(g, base), y), eps));
    }
  }
}

TEST_CASE("build_chart") {
  const auto& n = h1_koranyi();
  PointCloud pair;
  pair.norm = n;
  pair.alpha = 1.0;
  pair.points = {n.group.zero(), {0, 0, 1}};
  pair.weights = {1.0, 1.0};
  try {
    build_chart(n, pair, {0, 1}, 0.1);
    FAIL("expected a cone violation");
  } catch (const ConeViolation& v) {
    CHECK(((v.first() == 0 && v.second() == 1) || (v.first() == 1 && v.second() == 0)));
  }

  const auto horiz = horizontal_segment(n, 200);
  std::vector<std::size_t> members(200);
  for (std::size_t i = 0; i < members.size(); ++i) members[i] = i;
  const auto chart = build_chart(n, horiz, members, 0.1);
  CHECK(chart.lipschitz == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(chart.members == members);
  for (const auto& v : chart.values) CHECK(v[0] == 0.0);

  // A planar grid with small vertical offsets has a chart constant above 1,
  // and it is unchanged by any left translation of the whole set.
  const auto& sb = h1_smooth_box();
  const double lift = 0.05 / (sb.epsilons[1] * sb.epsilons[1]);
  PointCloud patch;
  patch.norm = sb;
  patch.alpha = 2.0;
  Rng rng(2);
  for (int a = 0; a < 6; ++a) {
    for (int b = 0; b < 6; ++b) {
      patch.points.push_back({-0.5 + 0.2 * a, -0.5 + 0.2 * b, lift * rng.symmetric()});
      patch.weights.push_back(0.04);
    }
  }
  std::vector<std::size_t> all(patch.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto base_chart = build_chart(sb, patch, all, 0.5);
  CHECK(base_chart.lipschitz > 1.0);
  CHECK(base_chart.lipschitz <= 2.0);
  for (int t = 0; t < 10; ++t) {
    const auto z = random_point(sb.group, rng, 2.0);
    PointCloud moved = patch;
    for (auto& p : moved.points) p = multiply(sb.group, z, p);
    const auto moved_chart = build_chart(sb, moved, all, 0.5);
    CHECK(moved_chart.lipschitz == doctest::Approx(base_chart.lipschitz).epsilon(1e-9));
  }
}

TEST_CASE("scale windows and strata bounds") {
  CHECK(rectify_scales(0.01) == std::vector<double>{0.5, 0.25, 0.125, 0.0625});
  CHECK(default_j_max(0.01) == 9);
  CHECK(default_j_max(0.0) == 1024);
  const auto horiz = horizontal_segment(h1_smooth_box(), 100);
  CHECK_THROWS_AS(classify_Ejk(horiz, 10, 50), ResolutionTooCoarse);
}

TEST_CASE("classification of the segment clouds") {
  const auto horiz = horizontal_segment(h1_smooth_box(), 4000);
  const auto table = compute_density_table(horiz, rectify_scales(cloud_resolution(horiz)));
  const auto e2 = classify_Ejk(horiz, table, 10, 2);
  CHECK(interior_fraction(horiz, e2, 0.5) >= 0.99);
  // Larger j drops the coarse scales, so the set can only grow.
  const auto e4 = classify_Ejk(horiz, table, 10, 4);
  CHECK(std::includes(e4.begin(), e4.end(), e2.begin(), e2.end()));
  const auto e8 = classify_Ejk(horiz, table, 10, 8);
  CHECK(std::includes(e8.begin(), e8.end(), e4.begin(), e4.end()));
  CHECK(classify_Ejk(horiz, 10, 2) == e2);

  const auto vert = vertical_segment(h1_koranyi(), 4000);
  CHECK(classify_Ejk(vert, 3, 1).empty());
  CHECK(classify_Ejk(vert, 3, 2).empty());

  // A planar blob weighted by area, read at alpha = 1: ball mass ~ r^2.
  const auto blob = uniform_ball(default_smooth_box(bundled_group("abelian-r2")), 3000, 7, 1.0);
  CHECK(classify_Ejk(blob, 3, 1).empty());
}

TEST_CASE("rectify charts a horizontal segment") {
  const auto horiz = horizontal_segment(h1_smooth_box(), 3000);
  const auto rep = rectify(horiz, 0.1);
  CHECK(rep.k == 23);
  CHECK(rep.charted_fraction() >= 0.97);
  CHECK(rep.charted_mass + rep.residual_mass == doctest::Approx(rep.total_mass));
  CHECK(rep.cone_failures.empty());
  std::vector<int> seen(horiz.size(), 0);
  for (const auto& chart : rep.charts) {
    CHECK(chart.lipschitz <= 1.0 / 0.9);
    for (auto i : chart.members) ++seen[i];
    // Chart soundness from the report alone: injective base and the pairwise bound.
    for (std::size_t a = 0; a < chart.members.size(); ++a) {
      for (std::size_t b = a + 1; b < chart.members.size(); b += 7) {
        const double base = std::abs(chart.base[a][0] - chart.base[b][0]) + std::abs(chart.base[a][1] - chart.base[b][1]);
        CHECK(base > 0.0);
        const double d = distance(horiz.norm, horiz.points[chart.members[a]], horiz.points[chart.members[b]]);
        const double h = horiz.norm.group.layer_norm(
            multiply(horiz.norm.group, inverse(horiz.norm.group, horiz.points[chart.members[a]]), horiz.points[chart.members[b]]), 1);
        CHECK(d <= h / 0.9 + 1e-12);
      }
    }
  }
  for (auto i : rep.residual) ++seen[i];
  CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));

  const auto proj = projection_density_check(horiz, rep);
  CHECK(proj.passed());
  for (const auto& c : proj.charts) {
    if (c.assessed > 0) CHECK(c.lower_density >= c.threshold);
  }
}

TEST_CASE("rectify leaves a vertical segment uncharted") {
  const auto vert = vertical_segment(h1_koranyi(), 3000);
  const auto rep = rectify(vert, 0.1);
  CHECK(rep.experimental);
  CHECK(rep.charted_fraction() <= 0.01);
}

TEST_CASE("rectify charts atoms one by one") {
  const auto cloud = atoms(h1_smooth_box(), 25, 3);
  const auto rep = rectify(cloud, 0.1);
  CHECK(rep.charted_fraction() == 1.0);
  CHECK(rep.charts.size() == cloud.size());
  for (const auto& chart : rep.charts) CHECK(chart.members.size() == 1);
  CHECK(projection_density_check(cloud, rep, 5.0).passed());
}

TEST_CASE("projection check flags an injected vertical outlier") {
  auto cloud = horizontal_segment(h1_smooth_box(), 2000);
  auto rep = rectify(cloud, 0.1);
  REQUIRE_FALSE(rep.charts.empty());
  auto& chart = *std::max_element(rep.charts.begin(), rep.charts.end(),
                                  [](const Chart& a, const Chart& b) { return a.members.size() < b.members.size(); });
  const auto anchor = cloud.points[chart.members[chart.members.size() / 2]];
  const double e2 = h1_smooth_box().epsilons[1];
  const Point outlier{anchor[0] + 1e-4, 0.0, 0.01 / (e2 * e2)};
  cloud.points.push_back(outlier);
  cloud.weights.push_back(cloud.weights.front());
  const std::size_t idx = cloud.size() - 1;
  chart.members.push_back(idx);
  chart.base.push_back(horizontal_part(cloud.norm.group, outlier));
  Point rest = outlier;
  rest[0] = rest[1] = 0.0;
  chart.values.push_back(rest);
  const auto proj = projection_density_check(cloud, rep);
  CHECK_FALSE(proj.passed());
  CHECK(std::find(proj.flagged.begin(), proj.flagged.end(), idx) != proj.flagged.end());
}

TEST_CASE("first-layer projection is 1-Lipschitz and attains equality on the segment") {
  const auto horiz = horizontal_segment(h1_smooth_box(), 300);
  const auto blob = uniform_ball(h1_smooth_box(), 300, 2, 4.0);
  bool equality = false;
  for (const auto* cloud : {&horiz, &blob}) {
    const auto& g = cloud->norm.group;
    for (std::size_t i = 0; i < cloud->size(); i += 3) {
      for (std::size_t j = 0; j < cloud->size(); j += 5) {
        const double d = distance(cloud->norm, cloud->points[i], cloud->points[j]);
        const double h = g.layer_norm(multiply(g, inverse(g, cloud->points[i]), cloud->points[j]), 1);
        CHECK(h <= d + 1e-12);
        if (cloud == &horiz && i != j && h == d) equality = true;
      }
    }
  }
  CHECK(equality);
}

TEST_CASE("rectify is deterministic across runs and worker counts") {
  const auto horiz = horizontal_segment(h1_smooth_box(), 1500);
  const auto a = to_json(rectify(horiz, 0.1, 0, 1)).dump();
  const auto b = to_json(rectify(horiz, 0.1, 0, 1)).dump();
  const auto c = to_json(rectify(horiz, 0.1, 0, 3)).dump();
  CHECK(a == b);
  CHECK(a == c);
}

TEST_CASE("rectify rejects norms without an annulus table") {
  auto cloud = horizontal_segment(make_norm(NormKind::ParabInfty, bundled_group("parabolic-plane")), 200);
  CHECK_THROWS_AS(rectify(cloud, 0.1), PreconditionFailed);
}

}  // TEST_SUITE
