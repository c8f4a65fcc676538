#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "doctest.h"
#include "homlab/errors.hpp"
#include "homlab/io.hpp"
#include "homlab/synth.hpp"

using namespace homlab;

TEST_SUITE("io") {

TEST_CASE("format_double round-trips") {
  for (double v : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, std::sqrt(2.0)}) {
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(-3.0) == "-3");
}

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("cloud CSV round-trips bit for bit") {
  const auto n = default_smooth_box(bundled_group("heisenberg-1"));
  const auto cloud = uniform_ball(n, 200, 4, 2.5);
  RunHeader h{"0.1.0", "abc", 4, "", {{"command", "synth make"}}};
  const auto text = write_cloud_csv(cloud, &h);
  const auto back = read_cloud_csv(text, n);
  CHECK(back.alpha == 2.5);
  REQUIRE(back.size() == cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    CHECK(back.points[i] == cloud.points[i]);
    CHECK(back.weights[i] == cloud.weights[i]);
  }
  CHECK(write_cloud_csv(back, &h) == text);

  const auto meta = read_csv_metadata(text);
  CHECK(meta.at("group") == "heisenberg-1");
  CHECK(meta.at("norm") == "smooth-box");
  CHECK(meta.at("seed") == "4");
  CHECK(meta.at("command") == "synth make");
  CHECK(read_cloud_csv(text, n, 1.0).alpha == 1.0);
}

TEST_CASE("malformed cloud CSV") {
  const auto n = default_smooth_box(bundled_group("heisenberg-1"));
  CHECK_THROWS_AS(read_cloud_csv("x1_1,x1_2,weight\n1,2,1\n", n), MalformedSpec);
  CHECK_THROWS_AS(read_cloud_csv("# alpha: 1\nx1_1,x1_2,x2_1,weight\n1,2,oops,1\n", n), MalformedSpec);
  CHECK_THROWS_AS(read_cloud_csv("x1_1,x1_2,x2_1,weight\n1,2,3,1\n", n), MalformedSpec);
  CHECK_THROWS_AS(read_cloud_csv("# alpha: 1\nx1_1,x1_2,x2_1,weight\n1,2,3,-1\n", n), PreconditionFailed);
  CHECK_THROWS_AS(read_cloud_csv("# alpha: 1\n", n), MalformedSpec);
}

TEST_CASE("report renderings") {
  const auto n = default_smooth_box(bundled_group("heisenberg-1"));
  CHECK(coordinate_names(n.group) == std::vector<std::string>{"x1_1", "x1_2", "x2_1"});
  const auto j = to_json(n);
  CHECK(j["kind"] == "smooth-box");
  CHECK(j["epsilons"].size() == 2);
  CHECK(j.contains("constants"));
  const auto r = to_json(make_dilated_image(make_ball(n), 2.0, 0.5));
  CHECK(r["kind"] == "dilated-image");
  CHECK(r["inner"]["kind"] == "ball");

  const auto cloud = horizontal_segment(n, 400);
  const auto rep = rectify(cloud, 0.1);
  const auto rj = to_json(rep);
  CHECK(rj["parameters"]["k"] == rep.k);
  CHECK(rj["charts"].size() == rep.charts.size());
  const auto csv = chart_summary_csv(cloud, rep);
  CHECK(csv.rfind("chart_id,n_points,mass,lipschitz\n", 0) == 0);
  const auto lines = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
  CHECK(lines == rep.charts.size() + 1);

  RunHeader h{"0.1.0", "0123", 9, "(0.01, 0.5)", {}};
  CHECK(header_lines(h) == "# homlab 0.1.0\n# config_hash: 0123\n# seed: 9\n# scale_window: (0.01, 0.5)\n");
}

}  // TEST_SUITE
