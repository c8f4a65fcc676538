#include <algorithm>
#include <array>
#include <string>
#include <string_view>
#include <utility>

#include "homlab/errors.hpp"
#include "homlab/group.hpp"

namespace homlab {

namespace {

// Basis indices are 0-based and ordered layer by layer.
constexpr std::array<std::pair<std::string_view, std::string_view>, 7> kBundled{{
    {"abelian-r1", R"({"name": "abelian-r1", "layers": [{"dim": 1, "weight": 1}], "brackets": []})"},
    {"abelian-r2", R"({"name": "abelian-r2", "layers": [{"dim": 2, "weight": 1}], "brackets": []})"},
    {"parabolic-plane",
     R"({"name": "parabolic-plane", "layers": [{"dim": 1, "weight": 1}, {"dim": 1, "weight": 2}], "brackets": []})"},
    // [e0, e1] = 4 e2, so (x*y)_2 = x_2 + y_2 + 2 (x_0 y_1 - x_1 y_0).
    {"heisenberg-1",
     R"({"name": "heisenberg-1", "layers": [{"dim": 2, "weight": 1}, {"dim": 1, "weight": 2}], "brackets": [[0, 1, 2, 4, 1]]})"},
    {"vertical-only",
     R"({"name": "vertical-only", "layers": [{"dim": 0, "weight": 1}, {"dim": 1, "weight": 2}], "brackets": []})"},
    {"filiform-4",
     R"({"name": "filiform-4", "layers": [{"dim": 2, "weight": 1}, {"dim": 1, "weight": 2}, {"dim": 1, "weight": 3}], "brackets": [[0, 1, 2, 1, 1], [0, 2, 3, 1, 1]]})"},
    {"filiform-5",
     R"({"name": "filiform-5", "layers": [{"dim": 2, "weight": 1}, {"dim": 1, "weight": 2}, {"dim": 1, "weight": 3}, {"dim": 1, "weight": 4}], "brackets": [[0, 1, 2, 1, 1], [0, 2, 3, 1, 1], [0, 3, 4, 1, 1]]})"},
}};

}  // namespace

std::string bundled_group_json(std::string_view name) {
  for (const auto& [key, text] : kBundled) {
    if (key == name) return std::string(text);
  }
  throw MalformedSpec("no bundled group named '" + std::string(name) + "'");
}

GroupSpec bundled_group(std::string_view name) { return load_group(bundled_group_json(name)); }

std::vector<std::string> bundled_group_names() {
  std::vector<std::string> names;
  for (const auto& entry : kBundled) names.emplace_back(entry.first);
  return names;
}

}  // namespace homlab
