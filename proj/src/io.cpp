#include "homlab/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "homlab/errors.hpp"

namespace homlab {

using nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string header_lines(const RunHeader& h) {
  std::string out;
  out += "# homlab " + h.version + "\n";
  out += "# config_hash: " + h.config_hash + "\n";
  out += "# seed: " + std::to_string(h.seed) + "\n";
  if (!h.scale_window.empty()) out += "# scale_window: " + h.scale_window + "\n";
  for (const auto& [k, v] : h.extra) out += "# " + k + ": " + v + "\n";
  return out;
}

ordered_json header_json(const RunHeader& h) {
  ordered_json j;
  j["tool"] = "homlab";
  j["version"] = h.version;
  j["config_hash"] = h.config_hash;
  j["seed"] = h.seed;
  if (!h.scale_window.empty()) j["scale_window"] = h.scale_window;
  for (const auto& [k, v] : h.extra) j[k] = v;
  return j;
}

std::vector<std::string> coordinate_names(const GroupSpec& g) {
  std::vector<std::string> names;
  for (int w = 1; w <= g.step(); ++w) {
    for (int i = 1; i <= g.layer_dim(w); ++i) names.push_back("x" + std::to_string(w) + "_" + std::to_string(i));
  }
  return names;
}

std::string write_cloud_csv(const PointCloud& cloud, const RunHeader* header) {
  std::string out;
  if (header) out += header_lines(*header);
  out += "# group: " + cloud.norm.group.name() + "\n";
  out += "# norm: " + std::string(to_string(cloud.norm.kind)) + "\n";
  if (cloud.norm.kind == NormKind::SmoothBox) out += "# xi: " + format_double(cloud.norm.xi) + "\n";
  out += "# alpha: " + format_double(cloud.alpha) + "\n";
  for (const auto& name : coordinate_names(cloud.norm.group)) out += name + ",";
  out += "weight\n";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (double c : cloud.points[i].coords()) out += format_double(c) + ",";
    out += format_double(cloud.weights[i]) + "\n";
  }
  return out;
}

namespace {

double parse_number(std::string_view field, std::size_t line) {
  while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) field.remove_suffix(1);
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw MalformedSpec("line " + std::to_string(line) + ": '" + std::string(field) + "' is not a number");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

}  // namespace

PointCloud read_cloud_csv(std::string_view text, const NormSpec& norm, double alpha) {
  PointCloud cloud;
  cloud.norm = norm;
  cloud.alpha = alpha;
  const std::size_t dim = norm.group.dim();
  bool header_seen = false;
  double file_alpha = -1.0;
  std::size_t line_no = 0;
  for (std::string_view rest = text; !rest.empty();) {
    const auto nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view key = "# alpha:";
      if (line.starts_with(key)) file_alpha = parse_number(line.substr(key.size()), line_no);
      continue;
    }
    const auto fields = split(line, ',');
    if (!header_seen) {
      header_seen = true;
      if (fields.size() != dim + 1 || fields.back() != "weight") {
        throw MalformedSpec("cloud header must list " + std::to_string(dim) + " coordinates then 'weight'");
      }
      continue;
    }
    if (fields.size() != dim + 1) {
      throw MalformedSpec("line " + std::to_string(line_no) + ": expected " + std::to_string(dim + 1) + " fields");
    }
    Point p(dim);
    for (std::size_t c = 0; c < dim; ++c) p[c] = parse_number(fields[c], line_no);
    cloud.points.push_back(p);
    cloud.weights.push_back(parse_number(fields[dim], line_no));
  }
  if (!header_seen) throw MalformedSpec("cloud CSV has no header row");
  if (cloud.alpha < 0.0) {
    if (file_alpha < 0.0) throw MalformedSpec("cloud CSV carries no '# alpha:' line and none was given");
    cloud.alpha = file_alpha;
  }
  cloud.validate();
  return cloud;
}

std::map<std::string, std::string> read_csv_metadata(std::string_view text) {
  std::map<std::string, std::string> meta;
  for (std::string_view rest = text; !rest.empty();) {
    const auto nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.starts_with("# ")) continue;
    const auto colon = line.find(": ");
    if (colon == std::string_view::npos) continue;
    meta[std::string(line.substr(2, colon - 2))] = std::string(line.substr(colon + 2));
  }
  return meta;
}

ordered_json to_json(const Point& p) {
  ordered_json a = ordered_json::array();
  for (double c : p.coords()) a.push_back(c);
  return a;
}

ordered_json to_json(const NormSpec& n) {
  ordered_json j;
  j["kind"] = std::string(to_string(n.kind));
  j["group"] = n.group.name();
  if (n.kind == NormKind::SmoothBox) {
    j["epsilons"] = n.epsilons;
    j["xi"] = n.xi;
    if (n.constants) {
      ordered_json c;
      c["observed_max"] = n.constants->observed_max;
      c["c_tilde"] = n.constants->c_tilde;
      c["c"] = n.constants->c;
      c["sample_count"] = n.constants->sample_count;
      c["seed"] = n.constants->seed;
      j["constants"] = c;
    }
  }
  return j;
}

ordered_json to_json(const Region& r) {
  ordered_json j;
  j["kind"] = std::string(to_string(r.kind));
  j["norm"] = std::string(to_string(r.norm.kind));
  j["group"] = r.group().name();
  j["center"] = to_json(r.center);
  j["radius"] = r.radius;
  if (!r.half_widths.empty()) j["half_widths"] = r.half_widths;
  if (r.kind == RegionKind::DilatedImage) {
    j["lambda"] = r.lambda;
    j["euclid_scale"] = r.euclid_scale;
    j["inner"] = to_json(*r.inner);
  }
  return j;
}

ordered_json to_json(const ChartReport& r) {
  ordered_json j;
  ordered_json params;
  params["alpha"] = r.alpha;
  params["eps"] = r.eps;
  params["k"] = r.k;
  params["j_max"] = r.j_max;
  params["resolution"] = r.resolution;
  params["scale_window"] = {4.0 * r.resolution, r.scales.empty() ? 0.0 : r.scales.front()};
  params["scales"] = r.scales;
  params["experimental"] = r.experimental;
  j["parameters"] = params;
  j["total_mass"] = r.total_mass;
  j["charted_mass"] = r.charted_mass;
  j["residual_mass"] = r.residual_mass;
  j["charted_fraction"] = r.charted_fraction();
  ordered_json charts = ordered_json::array();
  for (std::size_t c = 0; c < r.charts.size(); ++c) {
    const auto& ch = r.charts[c];
    ordered_json o;
    o["chart_id"] = c;
    o["stratum"] = ch.stratum;
    o["lipschitz"] = ch.lipschitz;
    o["members"] = ch.members;
    ordered_json base = ordered_json::array();
    ordered_json values = ordered_json::array();
    for (std::size_t i = 0; i < ch.members.size(); ++i) {
      base.push_back(to_json(ch.base[i]));
      values.push_back(to_json(ch.values[i]));
    }
    o["base"] = base;
    o["values"] = values;
    charts.push_back(o);
  }
  j["charts"] = charts;
  j["residual"] = r.residual;
  ordered_json fails = ordered_json::array();
  for (const auto& f : r.cone_failures) fails.push_back({{"first", f.first}, {"second", f.second}, {"stratum", f.stratum}});
  j["cone_failures"] = fails;
  return j;
}

std::string chart_summary_csv(const PointCloud& cloud, const ChartReport& r, const RunHeader* header) {
  std::string out;
  if (header) out += header_lines(*header);
  out += "chart_id,n_points,mass,lipschitz\n";
  for (std::size_t c = 0; c < r.charts.size(); ++c) {
    double mass = 0.0;
    for (auto i : r.charts[c].members) mass += cloud.weights[i];
    out += std::to_string(c) + "," + std::to_string(r.charts[c].members.size()) + "," + format_double(mass) + "," +
           format_double(r.charts[c].lipschitz) + "\n";
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("failed writing " + path);
}

}  // namespace homlab
