#include <cmath>

#include "doctest.h"
#include "homlab/errors.hpp"
#include "homlab/norms.hpp"
#include "support.hpp"

using namespace homlab;
using homlab::test::all_bundled_norms;
using homlab::test::label;
using homlab::test::random_point;

TEST_SUITE("norms") {

TEST_CASE("closed-form norm values") {
  const auto h = bundled_group("heisenberg-1");
  const auto p = bundled_group("parabolic-plane");
  const auto kor = make_norm(NormKind::Koranyi, h);
  CHECK(eval_norm(kor, {0, 0, 1}) == 1.0);
  CHECK(eval_norm(kor, {3, 4, 0}) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(eval_norm(make_norm(NormKind::ParabMaxSigned, p), {0.5, -1}) == 1.5);
  CHECK(eval_norm(make_norm(NormKind::ParabMaxSigned, p), {0.5, 1}) == 0.5);
  CHECK(eval_norm(make_norm(NormKind::SmoothBox, p, {1.0, 0.1}), {0.5, 3}) == 0.5);
  CHECK(eval_norm(make_norm(NormKind::SmoothBox, p, {1.0, 0.1}), {0.1, 3}) == doctest::Approx(0.1 * std::sqrt(3.0)));
  CHECK(eval_norm(make_norm(NormKind::ParabInfty, p), {0.5, -4}) == 2.0);
  CHECK(eval_norm(make_norm(NormKind::Parab1, p), {0.5, -4}) == 2.5);
  CHECK(eval_norm(make_norm(NormKind::Parab4, p), {1, 0}) == 1.0);
}

TEST_CASE("norm kinds are tied to their groups") {
  const auto h = bundled_group("heisenberg-1");
  const auto p = bundled_group("parabolic-plane");
  CHECK_THROWS_AS(make_norm(NormKind::Koranyi, p), GroupMismatch);
  CHECK_THROWS_AS(make_norm(NormKind::ParabInfty, h), GroupMismatch);
  CHECK_THROWS_AS(eval_norm(make_norm(NormKind::Koranyi, h), {1, 2}), DimensionMismatch);
  CHECK_THROWS_AS(make_norm(NormKind::SmoothBox, h, {0.5, 0.1}), MalformedSpec);
  CHECK_THROWS_AS(make_norm(NormKind::SmoothBox, h, {1.0}), MalformedSpec);
}

TEST_CASE("koranyi distance matches the symplectic formula") {
  // d(x,y)^4 = |x1 - y1|^4 + |x2 - y2 - 2<x1, J y1>|^2 with J = [[0,-1],[1,0]].
  const auto h = bundled_group("heisenberg-1");
  const auto kor = make_norm(NormKind::Koranyi, h);
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const auto x = random_point(h, rng);
    const auto y = random_point(h, rng);
    const double dx = x[0] - y[0], dy = x[1] - y[1];
    const double sympl = x[0] * (-y[1]) + x[1] * y[0];
    const double t = x[2] - y[2] - 2.0 * sympl;
    const double expected = std::pow(std::pow(dx * dx + dy * dy, 2) + t * t, 0.25);
    CHECK(distance(kor, x, y) == doctest::Approx(expected).epsilon(1e-12));
  }
  for (int i = 0; i < 1000; ++i) {
    const double u = 4.0 * rng.symmetric(), v = 4.0 * rng.symmetric();
    const double a = rng.symmetric(), b = rng.symmetric();
    const double len = std::hypot(a, b);
    const Point x{u * a / len, u * b / len, 0};
    const Point y{v * a / len, v * b / len, 0};
    CHECK(distance(kor, x, y) == doctest::Approx(std::abs(u - v)).epsilon(1e-12));
  }
  CHECK(distance(kor, {1, 2, 3}, {1, 2, 3}) == 0.0);
}

TEST_CASE("estimate_constants") {
  const auto a = estimate_constants(bundled_group("abelian-r2"), 10000, 1);
  for (double c : a.c) CHECK(c == 0.0);
  const auto p = estimate_constants(bundled_group("parabolic-plane"), 10000, 1);
  for (double c : p.c) CHECK(c == 0.0);

  const auto h = bundled_group("heisenberg-1");
  const auto rep = estimate_constants(h, 10000, 1);
  // Witness x = e0, y = e1: |Q_2| = 2 and (|x| + |y|)^2 = 4.
  CHECK(rep.c_tilde[1] >= 0.5);
  CHECK(rep.c_tilde[1] == doctest::Approx(kConstantsSafety * rep.observed_max[1]));
  CHECK(rep.c[1] == doctest::Approx(2.0 * rep.c_tilde[1]));

  // The sample sequence is a single seeded stream, so doubling extends it.
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto small = estimate_constants(h, 10000, seed);
    const auto large = estimate_constants(h, 20000, seed);
    CHECK(large.c_tilde[1] >= small.c_tilde[1]);
  }
}

TEST_CASE("select_epsilons") {
  const auto abel = bundled_group("abelian-r2");
  const auto sa = select_epsilons(abel, 1.95, estimate_constants(abel, 10000, 1));
  for (double e : sa.epsilons) CHECK(e == 1.0);

  const auto par = bundled_group("parabolic-plane");
  const auto sp = select_epsilons(par, 1.95, estimate_constants(par, 10000, 1));
  CHECK(sp.epsilons == std::vector<double>{1.0, 1.0});

  const auto h = bundled_group("heisenberg-1");
  const auto sh = select_epsilons(h, 1.95, estimate_constants(h, 10000, 1));
  CHECK(sh.epsilons[0] == 1.0);
  // Step 2: the final estimate is taken with eps_2 selected from the
  // initial constants, so check the inequality against the report we get.
  const double c2 = estimate_constants(h, 10000, 1).c[1];
  CHECK(sh.epsilons[1] == doctest::Approx(0.5 * std::sqrt(0.05 * 0.05 / (16.0 * c2))).epsilon(1e-12));
  CHECK(16.0 * sh.epsilons[1] * sh.epsilons[1] * c2 < 0.0025);

  CHECK_THROWS_AS(select_epsilons(h, 1.9, estimate_constants(h, 10000, 1)), XiOutOfRange);
  CHECK_THROWS_AS(select_epsilons(h, 2.0, estimate_constants(h, 10000, 1)), XiOutOfRange);
  CHECK_THROWS_AS(default_smooth_box(h, 1.5), XiOutOfRange);
}

TEST_CASE("default smooth-box norms satisfy the epsilon constraint") {
  for (const auto& name : bundled_group_names()) {
    CAPTURE(name);
    const auto n = default_smooth_box(bundled_group(name));
    CHECK(satisfies_epsilon_constraint(n));
    CHECK(n.epsilons[0] == 1.0);
  }
  auto big = make_norm(NormKind::SmoothBox, bundled_group("heisenberg-1"), {1.0, 10.0});
  big.constants = estimate_constants(big.group, 10000, 1);
  CHECK_FALSE(satisfies_epsilon_constraint(big));
}

TEST_CASE("validate_norm flags an oversized epsilon") {
  const auto h = bundled_group("heisenberg-1");
  const auto good = validate_norm(default_smooth_box(h), 20000, 3);
  CHECK(good.passed());
  const auto bad = validate_norm(make_norm(NormKind::SmoothBox, h, {1.0, 10.0}), 20000, 3);
  CHECK_FALSE(bad.passed());
  CHECK(bad.axioms[0].axiom == "triangle");
  CHECK(bad.axioms[0].violations > 0);
}

TEST_CASE("homogeneity, left-invariance and the first-layer bound on 10^4 samples") {
  for (const auto& n : all_bundled_norms()) {
    CAPTURE(label(n));
    const auto& g = n.group;
    Rng rng(77);
    const bool exact = n.kind == NormKind::SmoothBox || n.kind == NormKind::ParabInfty;
    double worst_homog = 0.0, worst_invariance = 0.0, worst_first = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const auto x = random_point(g, rng);
      const auto y = random_point(g, rng);
      const auto z = random_point(g, rng);
      const double lambda = std::exp2(static_cast<double>(static_cast<int>(rng.index(9))) - 4.0);
      const double nx = eval_norm(n, x);
      const double hx = eval_norm(n, dilate(g, lambda, x));
      worst_homog = std::max(worst_homog, std::abs(hx - lambda * nx) / std::max(1e-300, lambda * nx));

      const double d = distance(n, x, y);
      const double dz = distance(n, multiply(g, z, x), multiply(g, z, y));
      worst_invariance = std::max(worst_invariance, std::abs(d - dz) / std::max(1.0, d));

      const double h1 = g.layer_norm(multiply(g, inverse(g, x), y), 1);
      worst_first = std::max(worst_first, h1 - d);
    }
    // Power-of-two dilations keep the max-type norms exact.
    if (exact) {
      CHECK(worst_homog == 0.0);
    } else {
      CHECK(worst_homog <= 1e-12);
    }
    CHECK(worst_invariance <= 1e-9);
    CHECK(worst_first <= 1e-12);
  }
}

TEST_CASE("unit_ball_box contains the unit ball") {
  for (const auto& n : all_bundled_norms()) {
    CAPTURE(label(n));
    const auto box = unit_ball_box(n);
    Rng rng(8);
    for (int i = 0; i < 20000; ++i) {
      std::vector<double> wide(box.size());
      for (std::size_t w = 0; w < box.size(); ++w) wide[w] = 1.5 * box[w];
      Point x(n.group.dim());
      for (std::size_t m = 0; m < x.size(); ++m) {
        x[m] = wide[static_cast<std::size_t>(n.group.weight_of(m) - 1)] * rng.symmetric();
      }
      if (eval_norm(n, x) <= 1.0) {
        for (std::size_t m = 0; m < x.size(); ++m) {
          CHECK(std::abs(x[m]) <= box[static_cast<std::size_t>(n.group.weight_of(m) - 1)] * (1.0 + 1e-12));
        }
      }
    }
  }
}

}  // TEST_SUITE
