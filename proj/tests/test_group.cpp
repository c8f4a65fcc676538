#include <cmath>

#include "doctest.h"
#include "homlab/errors.hpp"
#include "homlab/group.hpp"
#include "support.hpp"

using namespace homlab;
using homlab::test::max_abs;
using homlab::test::max_abs_diff;
using homlab::test::random_point;

namespace {

constexpr const char* kHeisenberg =
    R"({"name": "h", "layers": [{"dim": 2, "weight": 1}, {"dim": 1, "weight": 2}], "brackets": [[0, 1, 2, 4, 1]]})";

// Product on the first Heisenberg group written out by hand: the BCH series
// stops at 1/2 [x, y] and [e0, e1] = 4 e2.
Point heisenberg_oracle(const Point& x, const Point& y) {
  return {x[0] + y[0], x[1] + y[1], x[2] + y[2] + 2.0 * (x[0] * y[1] - x[1] * y[0])};
}

}  // namespace

TEST_SUITE("group") {

TEST_CASE("load_group accepts the heisenberg and abelian specs") {
  const auto h = load_group(kHeisenberg);
  CHECK(h.step() == 2);
  CHECK(h.dim() == 3);
  CHECK(h.homogeneous_dimension() == 4);
  CHECK(h.layer_dim(1) == 2);

  const auto a = load_group(R"({"name": "r2", "layers": [{"dim": 2, "weight": 1}], "brackets": []})");
  CHECK(a.step() == 1);
  CHECK(a.is_abelian());
}

TEST_CASE("load_group rejects bad gradings, Jacobi failures and malformed documents") {
  CHECK_THROWS_AS(load_group(R"({"name": "bad", "layers": [{"dim": 2, "weight": 1}], "brackets": [[0, 1, 1, 1, 1]]})"),
                  GradingViolation);
  // [e0,e1] = e3, [e1,e2] = e4, [e2,e0] = e5, [e0,e4] = e6: the Jacobi sum on
  // (e0, e1, e2) is e6.
  CHECK_THROWS_AS(load_group(R"({"name": "nj", "layers": [{"dim": 3, "weight": 1}, {"dim": 3, "weight": 2},
                                {"dim": 1, "weight": 3}],
                                "brackets": [[0, 1, 3, 1, 1], [1, 2, 4, 1, 1], [2, 0, 5, 1, 1], [0, 4, 6, 1, 1]]})"),
                  JacobiViolation);
  CHECK_THROWS_AS(load_group(R"({"name": "x", "layers": []})"), MalformedSpec);
  CHECK_THROWS_AS(load_group("not json"), MalformedSpec);
  CHECK_THROWS_AS(load_group(R"({"name": "x", "layers": [{"dim": 2, "weight": 1}], "brackets": [[0, 1, 9, 1, 1]]})"),
                  MalformedSpec);
}

TEST_CASE("antisymmetric duplicates must agree") {
  CHECK_NOTHROW(load_group(R"({"name": "h", "layers": [{"dim": 2, "weight": 1}, {"dim": 1, "weight": 2}],
                               "brackets": [[0, 1, 2, 4, 1], [1, 0, 2, -4, 1]]})"));
  CHECK_THROWS_AS(load_group(R"({"name": "h", "layers": [{"dim": 2, "weight": 1}, {"dim": 1, "weight": 2}],
                                 "brackets": [[0, 1, 2, 4, 1], [1, 0, 2, 4, 1]]})"),
                  MalformedSpec);
}

TEST_CASE("every bundled group loads") {
  for (const auto& name : bundled_group_names()) {
    CAPTURE(name);
    const auto g = bundled_group(name);
    CHECK(g.name() == name);
    CHECK(g.step() <= kMaxStep);
  }
  CHECK(bundled_group("vertical-only").layer_dim(1) == 0);
  CHECK(bundled_group("vertical-only").homogeneous_dimension() == 2);
  CHECK(bundled_group("filiform-4").step() == 3);
}

TEST_CASE("heisenberg product matches the hand-written law") {
  const auto h = bundled_group("heisenberg-1");
  CHECK(multiply(h, {1, 0, 0}, {0, 1, 0}) == Point{1, 1, 2});
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const auto x = random_point(h, rng);
    const auto y = random_point(h, rng);
    CHECK(max_abs_diff(multiply(h, x, y), heisenberg_oracle(x, y)) <= 1e-12);
  }
}

TEST_CASE("filiform-4 product matches the hand-written BCH law") {
  // [e0,e1] = e2, [e0,e2] = e3. Terms: 1/2[x,y] and 1/12([x,[x,y]] - [y,[x,y]]).
  const auto g = bundled_group("filiform-4");
  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    const auto x = random_point(g, rng);
    const auto y = random_point(g, rng);
    const double b2 = x[0] * y[1] - x[1] * y[0];            // [x,y] in e2
    const double b3 = x[0] * y[2] - x[2] * y[0];            // [x,y] in e3
    const double xb = x[0] * b2;                            // [x,[x,y]] in e3
    const double yb = y[0] * b2;                            // [y,[x,y]] in e3
    const Point expected{x[0] + y[0], x[1] + y[1], x[2] + y[2] + 0.5 * b2,
                         x[3] + y[3] + 0.5 * b3 + (xb - yb) / 12.0};
    CHECK(max_abs_diff(multiply(g, x, y), expected) <= 1e-12 * (1.0 + max_abs(expected)));
  }
}

TEST_CASE("identity, inverse and dilation examples") {
  const auto h = bundled_group("heisenberg-1");
  const Point x{1, 0, 2};
  CHECK(inverse(h, x) == Point{-1, 0, -2});
  CHECK(multiply(h, x, h.zero()) == x);
  CHECK(multiply(h, h.zero(), x) == x);
  CHECK(max_abs(multiply(h, x, inverse(h, x))) <= 1e-12);
  CHECK(dilate(h, 2.0, {1, 1, 3}) == Point{2, 2, 12});
  CHECK(dilate(h, 1.0, x) == x);

  const auto a = bundled_group("abelian-r2");
  CHECK(inverse(a, {1.5, -2}) == Point{-1.5, 2});
}

TEST_CASE("argument errors") {
  const auto h = bundled_group("heisenberg-1");
  CHECK_THROWS_AS(multiply(h, {1, 0}, {0, 1, 0}), DimensionMismatch);
  CHECK_THROWS_AS(inverse(h, {1, 0}), DimensionMismatch);
  CHECK_THROWS_AS(dilate(h, 0.0, {1, 0, 0}), NonpositiveLambda);
  CHECK_THROWS_AS(dilate(h, -1.0, {1, 0, 0}), NonpositiveLambda);

  const auto g5 = load_group(R"({"name": "f6", "layers": [{"dim": 2, "weight": 1}, {"dim": 1, "weight": 2},
      {"dim": 1, "weight": 3}, {"dim": 1, "weight": 4}, {"dim": 1, "weight": 5}],
      "brackets": [[0, 1, 2, 1, 1], [0, 2, 3, 1, 1], [0, 3, 4, 1, 1], [0, 4, 5, 1, 1]]})");
  CHECK(g5.step() == 5);
  CHECK_THROWS_AS(multiply(g5, g5.zero(), g5.zero()), UnsupportedStep);
}

TEST_CASE("group laws on 10^4 seeded triples per bundled group") {
  for (const auto& name : bundled_group_names()) {
    CAPTURE(name);
    const auto g = bundled_group(name);
    Rng rng(mix_seed(2024, std::hash<std::string>{}(name) & 0xffff));
    double worst_assoc = 0.0, worst_inverse = 0.0, worst_dilation = 0.0;
    bool first_layer_exact = true;
    for (int i = 0; i < 10000; ++i) {
      const auto x = random_point(g, rng);
      const auto y = random_point(g, rng);
      const auto z = random_point(g, rng);
      const double lambda = std::exp(2.0 * rng.symmetric());

      const auto left = multiply(g, multiply(g, x, y), z);
      const auto right = multiply(g, x, multiply(g, y, z));
      worst_assoc = std::max(worst_assoc, max_abs_diff(left, right) / (1.0 + max_abs(left)));

      worst_inverse = std::max(worst_inverse, max_abs(multiply(g, x, inverse(g, x))));
      worst_inverse = std::max(worst_inverse, max_abs(multiply(g, inverse(g, x), x)));

      const auto a = dilate(g, lambda, multiply(g, x, y));
      const auto b = multiply(g, dilate(g, lambda, x), dilate(g, lambda, y));
      worst_dilation = std::max(worst_dilation, max_abs_diff(a, b) / (1.0 + max_abs(a)));

      const auto xy = multiply(g, x, y);
      const auto off = g.layer_offset(1);
      for (int m = 0; m < g.layer_dim(1); ++m) {
        const auto c = off + static_cast<std::size_t>(m);
        first_layer_exact = first_layer_exact && xy[c] == x[c] + y[c];
      }
    }
    CHECK(worst_assoc <= 1e-9);
    CHECK(worst_inverse <= 1e-12);
    CHECK(worst_dilation <= 1e-9);
    CHECK(first_layer_exact);
  }
}

}  // TEST_SUITE
