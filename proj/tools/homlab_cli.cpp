// Command-line experiment runner. Exit codes: 0 success, 1 usage or input
// error, 2 a checked mathematical claim failed (the report carries the witness).

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "homlab/errors.hpp"
#include "homlab/group.hpp"
#include "homlab/io.hpp"
#include "homlab/measures.hpp"
#include "homlab/norms.hpp"
#include "homlab/rectify.hpp"
#include "homlab/regions.hpp"
#include "homlab/sfunction.hpp"
#include "homlab/synth.hpp"

namespace fs = std::filesystem;
using namespace homlab;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitClaimFailed = 2;

struct Options {
  std::string group = "heisenberg-1";
  std::string norm = "smooth-box";
  double xi = kDefaultXi;
  std::vector<double> eps;
  std::uint64_t seed = 1;
  std::string out = ".";
  std::string report;

  // regions
  std::string region = "ball";
  std::string inner = "ball";
  std::string outer = "gset";
  double radius = 1.0;
  double inner_radius = 1.0;
  double outer_radius = 1.0;
  std::vector<double> center;
  std::vector<double> half_widths;
  double lambda = 1.0;
  double euclid_scale = 1.0;
  std::string c_shape = "ball";
  std::vector<double> c_half_widths;

  // budgets, stored as doubles so 1e7 parses
  double budget = 1e5;
  double samples = 1e5;
  double triples = 1e5;
  double checks = 1e5;
  double constants_samples = static_cast<double>(kDefaultConstantsSamples);
  std::optional<double> claimed;

  // s-function
  int points = 256;
  std::optional<double> k_eps;
  int annulus_points = 0;
  double annulus_samples = 1e5;

  // measures and clouds
  std::string cloud;
  std::optional<double> alpha;
  double delta = std::numeric_limits<double>::infinity();
  std::string variant = "all";
  std::vector<std::string> point_list;
  std::vector<std::size_t> point_index;
  bool all_points = false;
  std::string shape = "ball";
  double r_max = 0.5;

  // rectify
  double rect_eps = 0.1;
  int j_max = 0;
  double min_charted = 0.0;

  // synth
  std::string kind = "horizontal-segment";
  double n = 1e4;
};

struct Context {
  CLI::App* leaf = nullptr;
  std::string command;
  std::string config_hash;
};

std::size_t as_count(double v, const char* what) {
  if (!(v >= 1.0) || v > 1e12 || v != std::floor(v)) {
    throw CLI::ValidationError(std::string(what) + " must be a positive integer");
  }
  return static_cast<std::size_t>(v);
}

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

// ------------------------------------------------------------ construction

GroupSpec load_group_arg(const std::string& name) { return resolve_group(name); }

NormSpec build_norm(const GroupSpec& g, const Options& o) {
  const auto kind = parse_norm_kind(o.norm);
  if (kind == NormKind::SmoothBox && !o.eps.empty()) {
    auto n = make_norm(kind, g, o.eps, o.xi);
    n.constants = estimate_constants(g, o.eps, kDefaultConstantsSamples, kDefaultConstantsSeed);
    return n;
  }
  return default_norm(kind, g, o.xi);
}

Point point_arg(const GroupSpec& g, const std::vector<double>& coords) {
  if (coords.empty()) return g.zero();
  if (coords.size() != g.dim()) {
    throw DimensionMismatch("expected " + std::to_string(g.dim()) + " coordinates, got " + std::to_string(coords.size()));
  }
  return Point::from(coords);
}

Region shape_region(const NormSpec& n, const std::string& kind, double radius, const Options& o) {
  const Point c = point_arg(n.group, o.center);
  switch (parse_region_kind(kind == "gset" ? "gset-smoothbox" : kind)) {
    case RegionKind::Ball: return make_ball(n, c, radius);
    case RegionKind::GsetSmoothBox:
    case RegionKind::GsetKoranyi: return make_gset(n, c, radius);
    case RegionKind::Box: {
      if (o.half_widths.empty()) throw CLI::ValidationError("--half-widths is required for a box region");
      return translated(rescaled(make_box(n, o.half_widths), radius), c);
    }
    case RegionKind::DilatedImage: {
      const Region in = shape_region(n, o.inner, 1.0, Options{});
      return translated(rescaled(make_dilated_image(in, o.lambda, o.euclid_scale), radius), c);
    }
    case RegionKind::UserPredicate: break;
  }
  throw CLI::ValidationError("region kind '" + kind + "' is not available from the command line");
}

// ----------------------------------------------------------------- output

struct Emitter {
  const Options& o;
  const Context& ctx;

  RunHeader header(std::string scale_window = {}) const {
    RunHeader h;
    h.version = HOMLAB_VERSION;
    h.config_hash = ctx.config_hash;
    h.seed = o.seed;
    h.scale_window = std::move(scale_window);
    h.extra.push_back({"command", ctx.command});
    return h;
  }

  void write(const std::string& default_name, const std::string& text) const {
    const fs::path dir(o.out);
    fs::create_directories(dir);
    const fs::path file = dir / (o.report.empty() ? default_name : o.report);
    write_text_file(file.string(), text);
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  }

  void json(const std::string& default_name, ordered_json body, std::string scale_window = {}) const {
    ordered_json doc;
    doc["header"] = header_json(header(std::move(scale_window)));
    for (auto& [k, v] : body.items()) doc[k] = v;
    write(default_name, doc.dump(2) + "\n");
  }
};

fs::path input_path(const Options& o, const std::string& path) {
  const fs::path p(path);
  if (fs::exists(p) || p.is_absolute()) return p;
  return fs::path(o.out) / p;
}

PointCloud load_cloud(const Options& o, const CLI::App& app) {
  if (o.cloud.empty()) throw CLI::ValidationError("--cloud is required");
  const std::string text = read_text_file(input_path(o, o.cloud).string());
  const auto meta = read_csv_metadata(text);
  Options eff = o;
  auto from_meta = [&](const char* flag, const char* key, std::string& field) {
    if (app.count(flag) == 0 && meta.count(key)) field = meta.at(key);
  };
  from_meta("--group", "group", eff.group);
  from_meta("--norm", "norm", eff.norm);
  if (app.count("--xi") == 0 && meta.count("xi")) eff.xi = std::stod(meta.at("xi"));
  const auto g = load_group_arg(eff.group);
  return read_cloud_csv(text, build_norm(g, eff), o.alpha.value_or(-1.0));
}

// --------------------------------------------------------------- handlers

int group_validate(const Options& o, const Emitter& em) {
  ordered_json body;
  try {
    const auto g = load_group_arg(o.group);
    body["valid"] = true;
    body["name"] = g.name();
    body["dim"] = g.dim();
    body["step"] = g.step();
    body["homogeneous_dimension"] = g.homogeneous_dimension();
    ordered_json layers = ordered_json::array();
    for (int w = 1; w <= g.step(); ++w) layers.push_back({{"weight", w}, {"dim", g.layer_dim(w)}});
    body["layers"] = layers;
    em.json("group_validate.json", body);
    return kExitOk;
  } catch (const GradingViolation& e) {
    body["valid"] = false;
    body["error"] = "grading";
    body["message"] = e.what();
  } catch (const JacobiViolation& e) {
    body["valid"] = false;
    body["error"] = "jacobi";
    body["message"] = e.what();
  }
  em.json("group_validate.json", body);
  return kExitClaimFailed;
}

int norm_validate(const Options& o, const Emitter& em) {
  const auto g = load_group_arg(o.group);
  const auto n = build_norm(g, o);
  const auto v = validate_norm(n, as_count(o.triples, "--triples"), o.seed);
  std::string csv = header_lines(em.header());
  csv += "# norm: " + std::string(to_string(n.kind)) + "\n";
  if (n.kind == NormKind::SmoothBox) csv += "# epsilons: " + join_doubles(n.epsilons) + "\n";
  csv += "# triples: " + std::to_string(v.n_triples) + "\n";
  csv += "axiom,violations,max_violation\n";
  for (const auto& a : v.axioms) {
    csv += a.axiom + "," + std::to_string(a.violations) + "," + format_double(a.max_violation) + "\n";
  }
  em.write("norm_validate.csv", csv);
  return v.passed() ? kExitOk : kExitClaimFailed;
}

int norm_constants(const Options& o, const Emitter& em) {
  const auto g = load_group_arg(o.group);
  const auto samples = as_count(o.constants_samples, "--samples");
  const auto initial = estimate_constants(g, samples, o.seed);
  const auto sel = select_epsilons(g, o.xi, initial);
  ordered_json body;
  body["group"] = g.name();
  body["xi"] = o.xi;
  body["epsilons"] = sel.epsilons;
  body["observed_max"] = sel.constants.observed_max;
  body["c_tilde"] = sel.constants.c_tilde;
  body["c"] = sel.constants.c;
  body["sample_count"] = sel.constants.sample_count;
  em.json("norm_constants.json", body);
  return kExitOk;
}

int gset_diameter(const Options& o, const Emitter& em) {
  const auto g = load_group_arg(o.group);
  const auto n = build_norm(g, o);
  const Region r = shape_region(n, o.region, o.radius, o);
  double claimed = 0.0;
  if (o.claimed) {
    claimed = *o.claimed;
  } else if (r.kind == RegionKind::Ball || r.kind == RegionKind::GsetSmoothBox || r.kind == RegionKind::GsetKoranyi) {
    claimed = 2.0 * o.radius;
  } else {
    throw CLI::ValidationError("--claimed is required for this region");
  }
  const auto d = diameter(r, as_count(o.budget, "--budget"), o.seed);
  ordered_json body;
  body["region"] = to_json(r);
  body["claimed"] = claimed;
  body["lower_bound"] = d.lower_bound;
  body["p"] = to_json(d.p);
  body["q"] = to_json(d.q);
  body["sampled_points"] = d.sampled_points;
  body["evaluations"] = d.evaluations;
  body["exceeds"] = d.exceeds(claimed);
  em.json("gset_diameter.json", body);
  return d.exceeds(claimed) ? kExitClaimFailed : kExitOk;
}

int gset_include(const Options& o, const Emitter& em) {
  const auto g = load_group_arg(o.group);
  const auto n = build_norm(g, o);
  const Region a = shape_region(n, o.inner, o.inner_radius, o);
  const Region b = shape_region(n, o.outer, o.outer_radius, o);
  const auto rep = inclusion_check(a, b, as_count(o.samples, "--samples"), o.seed);
  ordered_json body;
  body["inner"] = to_json(a);
  body["outer"] = to_json(b);
  body["samples"] = rep.n_samples;
  body["violations"] = rep.violations;
  if (rep.witness) body["witness"] = to_json(*rep.witness);
  em.json("gset_include.json", body);
  return rep.passed() ? kExitOk : kExitClaimFailed;
}

int gset_sfun(const Options& o, const Emitter& em) {
  const auto g = load_group_arg(o.group);
  const auto n = build_norm(g, o);
  const auto table = tabulate_s(n, static_cast<std::size_t>(o.points));
  RunHeader h = em.header();
  h.extra.push_back({"norm", std::string(to_string(n.kind))});
  h.extra.push_back({"experimental", table.experimental ? "true" : "false"});
  h.extra.push_back({"lipschitz_estimate", format_double(table.lipschitz_estimate)});
  int code = kExitOk;
  if (o.k_eps) {
    const auto k = k_of_eps(n, *o.k_eps);
    h.extra.push_back({"k_eps", format_double(*o.k_eps)});
    h.extra.push_back({"k", std::to_string(k.k)});
    h.extra.push_back({"min_s", format_double(k.min_s)});
  }
  if (o.annulus_points > 0) {
    Rng rng(mix_seed(o.seed, 0));
    std::size_t violations = 0;
    for (int i = 0; i < o.annulus_points; ++i) {
      const double t = static_cast<double>(i) / o.annulus_points;
      const Point x = unit_sphere_point(n, t, rng);
      const auto rep = verify_annulus(n, x, as_count(o.annulus_samples, "--annulus-samples"),
                                      mix_seed(o.seed, static_cast<std::uint64_t>(i) + 1));
      violations += rep.violations;
      if (!rep.passed()) h.extra.push_back({"annulus_witness_" + std::to_string(i), join_doubles({rep.witness->coords().begin(), rep.witness->coords().end()})});
    }
    h.extra.push_back({"annulus_violations", std::to_string(violations)});
    if (violations > 0) code = kExitClaimFailed;
  }
  std::string csv = header_lines(h) + "t,s,r\n";
  for (const auto& row : table.rows) {
    csv += format_double(row.t) + "," + format_double(row.s) + "," + format_double(row.r) + "\n";
  }
  em.write("gset_sfun.csv", csv);
  return code;
}

ordered_json volume_json(const VolumeEstimate& v) {
  return {{"estimate", v.estimate}, {"std_error", v.std_error}, {"samples", v.n_samples}, {"hits", v.hits}};
}

int measure_volume(const Options& o, const Emitter& em) {
  const auto g = load_group_arg(o.group);
  const auto n = build_norm(g, o);
  const Region r = shape_region(n, o.region, o.radius, o);
  const auto v = haar_volume(r, as_count(o.samples, "--samples"), o.seed);
  ordered_json body;
  body["region"] = to_json(r);
  body["volume"] = volume_json(v);
  em.json("measure_volume.json", body);
  return kExitOk;
}

ordered_json ratio_json(const RatioEstimate& r) {
  return {{"ratio", r.ratio},
          {"volume", volume_json(r.volume)},
          {"diameter_lower_bound", r.diameter.lower_bound},
          {"homogeneous_dimension", r.homogeneous_dim}};
}

int measure_ratio(const Options& o, const Emitter& em) {
  const auto g = load_group_arg(o.group);
  const auto n = build_norm(g, o);
  const Region r = shape_region(n, o.region, o.radius, o);
  const auto est = isodiametric_ratio(r, as_count(o.budget, "--budget"), o.seed);
  ordered_json body;
  body["region"] = to_json(r);
  for (auto& [k, v] : ratio_json(est).items()) body[k] = v;
  em.json("measure_ratio.json", body);
  return kExitOk;
}

int measure_improve(const Options& o, const Emitter& em) {
  const auto g = load_group_arg(o.group);
  const auto n = build_norm(g, o);
  const Region ball = make_ball(n);
  Region c = ball;
  if (o.c_shape == "box") {
    if (o.c_half_widths.empty()) throw CLI::ValidationError("--c-half-widths is required for a box C");
    c = make_box(n, o.c_half_widths);
  } else if (o.c_shape != "ball") {
    throw CLI::ValidationError("--C must be ball or box");
  }
  const auto budget = as_count(o.budget, "--budget");
  const auto imp = metelichenko_improve(ball, c, as_count(o.checks, "--checks"), o.seed);
  const auto ball_ratio = isodiametric_ratio(ball, budget, mix_seed(o.seed, 10));
  const auto new_ratio = isodiametric_ratio(imp.region, budget, mix_seed(o.seed, 11));
  ordered_json body;
  body["C"] = to_json(c);
  body["improved"] = to_json(imp.region);
  body["ball"] = ratio_json(ball_ratio);
  body["result"] = ratio_json(new_ratio);
  body["improvement_factor"] = new_ratio.ratio / ball_ratio.ratio;
  body["volume_C"] = volume_json(imp.volume_c);
  body["predicted_volume"] = imp.predicted_volume;
  body["direct_volume"] = volume_json(imp.volume_result);
  body["diameter_lower_bound"] = imp.diameter.lower_bound;
  em.json("measure_improve.json", body);
  return kExitOk;
}

int measure_finite(const Options& o, const Emitter& em, const CLI::App& app) {
  std::vector<Point> pts;
  NormSpec n;
  double alpha = o.alpha.value_or(-1.0);
  if (!o.cloud.empty()) {
    auto cloud = load_cloud(o, app);
    pts = cloud.points;
    n = cloud.norm;
    if (alpha < 0.0) alpha = cloud.alpha;
  } else {
    const auto g = load_group_arg(o.group);
    n = build_norm(g, o);
    for (const auto& s : o.point_list) {
      std::vector<double> coords;
      std::stringstream ss(s);
      std::string item;
      while (std::getline(ss, item, ',')) coords.push_back(std::stod(item));
      pts.push_back(point_arg(g, coords));
    }
  }
  if (alpha < 0.0) throw CLI::ValidationError("--alpha is required");
  ordered_json body;
  body["n_points"] = pts.size();
  body["alpha"] = alpha;
  body["delta"] = std::isfinite(o.delta) ? ordered_json(o.delta) : ordered_json("inf");
  std::vector<CoverVariant> variants;
  if (o.variant == "all") {
    variants = {CoverVariant::Hausdorff, CoverVariant::Spherical, CoverVariant::Centered};
  } else {
    variants = {parse_cover_variant(o.variant)};
  }
  for (auto v : variants) {
    const auto m = finite_measure_exact(pts, n, alpha, o.delta, v);
    body[std::string(to_string(v))] = {{"value", m.value}, {"upper_bound_only", m.upper_bound_only}};
  }
  em.json("measure_finite.json", body);
  return kExitOk;
}

int density_profile_cmd(const Options& o, const Emitter& em, const CLI::App& app) {
  const auto cloud = load_cloud(o, app);
  const double res = cloud_resolution(cloud);
  const auto scales = dyadic_scales(o.r_max, 4.0 * res);
  std::vector<Shape> shapes;
  if (o.shape == "both") {
    shapes = {Shape::Ball, Shape::Gset};
  } else {
    shapes = {parse_shape(o.shape)};
  }
  const std::string window = format_double(4.0 * res) + ".." + format_double(o.r_max);
  RunHeader h = em.header(window);
  h.extra.push_back({"alpha", format_double(cloud.alpha)});
  h.extra.push_back({"resolution", format_double(res)});
  std::string csv = header_lines(h) + "point_index,r,shape,ratio\n";
  if (o.all_points) {
    const auto table = compute_density_table(cloud, scales);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      for (auto sh : shapes) {
        for (std::size_t s = 0; s < scales.size(); ++s) {
          const double ratio = sh == Shape::Ball ? table.ball_ratio(i, s, cloud.alpha) : table.gset_ratio(i, s, cloud.alpha);
          csv += std::to_string(i) + "," + format_double(scales[s]) + "," + std::string(to_string(sh)) + "," +
                 format_double(ratio) + "\n";
        }
      }
    }
  } else {
    std::vector<std::size_t> idx = o.point_index;
    if (idx.empty()) idx.push_back(cloud.size() / 2);
    for (auto i : idx) {
      if (i >= cloud.size()) throw CLI::ValidationError("--point-index out of range");
      for (auto sh : shapes) {
        const auto prof = density_profile(cloud, cloud.points[i], scales, sh);
        for (const auto& row : prof.rows) {
          csv += std::to_string(i) + "," + format_double(row.r) + "," + std::string(to_string(sh)) + "," +
                 format_double(row.ratio) + "\n";
        }
      }
    }
  }
  em.write("density_profile.csv", csv);
  return kExitOk;
}

int rectify_run(const Options& o, const Emitter& em, const CLI::App& app) {
  const auto cloud = load_cloud(o, app);
  const auto rep = rectify(cloud, o.rect_eps, o.j_max);
  const auto proj = projection_density_check(cloud, rep);
  const std::string window =
      format_double(4.0 * rep.resolution) + ".." + format_double(rep.scales.empty() ? 0.0 : rep.scales.front());
  const double bound = 1.0 / (1.0 - o.rect_eps);
  bool sound = true;
  for (const auto& c : rep.charts) sound = sound && c.lipschitz <= bound;
  const bool enough = rep.charted_fraction() >= o.min_charted;

  ordered_json body = to_json(rep);
  ordered_json pj = ordered_json::array();
  for (const auto& c : proj.charts) {
    pj.push_back({{"chart_id", c.chart_id},
                  {"eta", c.eta},
                  {"threshold", c.threshold},
                  {"lower_density", c.lower_density},
                  {"assessed", c.assessed},
                  {"flagged", c.flagged}});
  }
  body["projection"] = pj;
  body["projection_flagged"] = proj.flagged;
  body["charts_sound"] = sound;
  body["min_charted"] = o.min_charted;
  const std::string stem = o.report.empty() ? "rectify" : fs::path(o.report).stem().string();
  Options json_opts = o;
  json_opts.report = stem + ".json";
  Emitter{json_opts, em.ctx}.json("rectify.json", body, window);

  RunHeader h = em.header(window);
  const std::string summary = chart_summary_csv(cloud, rep, &h);
  const fs::path dir(o.out);
  write_text_file((dir / (stem + "_summary.csv")).string(), summary);
  std::cerr << "charted fraction " << format_double(rep.charted_fraction()) << ", " << rep.charts.size()
            << " charts, k = " << rep.k << "\n";
  return sound && enough ? kExitOk : kExitClaimFailed;
}

int synth_make(const Options& o, const Emitter& em) {
  const auto g = load_group_arg(o.group);
  const auto n = build_norm(g, o);
  const auto kind = parse_synth_kind(o.kind);
  const auto cloud = make_cloud(kind, n, as_count(o.n, "--n"), o.seed, o.alpha.value_or(-1.0));
  const RunHeader h = em.header();
  em.write(std::string(to_string(kind)) + ".csv", write_cloud_csv(cloud, &h));
  return kExitOk;
}

// ------------------------------------------------------------ config/hash

// Options not affecting results are left out of the hash.
bool hashed_option(const std::string& name) {
  return name != "--out" && name != "--config" && name != "--report" && name != "--help";
}

std::string config_hash(const CLI::App& leaf, const std::string& command) {
  ordered_json cfg;
  cfg["command"] = command;
  for (const auto* opt : leaf.get_options()) {
    const std::string name = opt->get_name();
    if (name.empty() || !hashed_option(name)) continue;
    if (opt->count() > 0) {
      cfg[name] = opt->results();
    } else {
      cfg[name] = opt->get_default_str();
    }
  }
  return fnv1a_hex(cfg.dump());
}

// Appends the options of a JSON config file that the command line does not set.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::vector<std::string> out;
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[++i];
    } else if (args[i].starts_with("--config=")) {
      config_path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
    }
  }
  if (config_path.empty()) return out;
  const auto cfg = ordered_json::parse(read_text_file(config_path));
  if (!cfg.is_object()) throw CLI::ValidationError("config file must hold a JSON object");
  const bool has_command = !out.empty() && !out.front().starts_with("-");
  if (!has_command && cfg.contains("command")) {
    const auto& cmd = cfg.at("command");
    std::vector<std::string> words;
    if (cmd.is_string()) {
      std::stringstream ss(cmd.get<std::string>());
      std::string w;
      while (ss >> w) words.push_back(w);
    } else {
      for (const auto& w : cmd) words.push_back(w.get<std::string>());
    }
    out.insert(out.begin(), words.begin(), words.end());
  }
  auto given = [&](const std::string& flag) {
    for (const auto& a : out) {
      if (a == flag || a.starts_with(flag + "=")) return true;
    }
    return false;
  };
  auto scalar = [](const ordered_json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return format_double(v.get<double>());
    return v.dump();
  };
  for (const auto& [key, value] : cfg.items()) {
    if (key == "command") continue;
    const std::string flag = "--" + key;
    if (given(flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
    } else if (value.is_array()) {
      for (const auto& v : value) {
        out.push_back(flag);
        out.push_back(scalar(v));
      }
    } else {
      out.push_back(flag);
      out.push_back(scalar(value));
    }
  }
  return out;
}

// --------------------------------------------------------------- wiring

void add_common(CLI::App* s, Options& o, bool norm_eps) {
  s->add_option("--group", o.group, "bundled group name or path to a group JSON");
  s->add_option("--norm", o.norm, "smooth-box, koranyi, parab-infty, parab-4, parab-1, parab-max-signed");
  s->add_option("--xi", o.xi, "G-set parameter in (1.9, 2)");
  if (norm_eps) {
    s->add_option("--eps", o.eps, "explicit smooth-box epsilons (weight order, first = 1)")->delimiter(',');
  }
  s->add_option("--seed", o.seed, "random seed");
  s->add_option("--out", o.out, "output directory");
  s->add_option("--report", o.report, "output file name inside --out");
}

void add_region(CLI::App* s, Options& o, const std::string& default_region) {
  o.region = default_region;
  s->add_option("--region", o.region, "ball, gset, box or dilated-image");
  s->add_option("--radius", o.radius, "dilation radius of the region");
  s->add_option("--center", o.center, "left-translation center")->delimiter(',');
  s->add_option("--half-widths", o.half_widths, "box half-widths per coordinate")->delimiter(',');
  s->add_option("--inner", o.inner, "shape inside a dilated image");
  s->add_option("--lambda", o.lambda, "dilation of a dilated image");
  s->add_option("--euclid-scale", o.euclid_scale, "euclidean contraction of a dilated image");
}

void add_cloud(CLI::App* s, Options& o) {
  s->add_option("--cloud", o.cloud, "point cloud CSV");
  s->add_option("--alpha", o.alpha, "measure exponent (overrides the file)");
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = expand_config(std::move(args));
  } catch (const std::exception& e) {
    std::cerr << "config: " << e.what() << "\n";
    return kExitUsage;
  }

  Options o;
  CLI::App app{"homlab: experiments on homogeneous groups"};
  app.set_version_flag("--version", std::string(HOMLAB_VERSION));
  app.require_subcommand(1);

  std::map<CLI::App*, std::string> names;
  auto leaf = [&](CLI::App* parent, const std::string& group, const std::string& name, const std::string& help,
                  bool norm_eps = true) {
    auto* s = parent->add_subcommand(name, help);
    names[s] = group + " " + name;
    add_common(s, o, norm_eps);
    return s;
  };

  auto* grp = app.add_subcommand("group", "group specs")->require_subcommand(1);
  auto* group_validate_cmd = leaf(grp, "group", "validate", "validate a group spec");

  auto* nrm = app.add_subcommand("norm", "homogeneous norms")->require_subcommand(1);
  auto* norm_validate_cmd = leaf(nrm, "norm", "validate", "sample the metric axioms");
  norm_validate_cmd->add_option("--triples", o.triples, "number of sampled triples");
  auto* norm_constants_cmd = leaf(nrm, "norm", "constants", "estimate BCH constants and select epsilons");
  norm_constants_cmd->add_option("--samples", o.constants_samples, "sampled pairs");

  auto* gs = app.add_subcommand("gset", "G-sets and annuli")->require_subcommand(1);
  auto* diam_cmd = leaf(gs, "gset", "diameter", "lower-bound the diameter of a region");
  add_region(diam_cmd, o, "gset");
  diam_cmd->add_option("--budget", o.budget, "pair evaluation budget");
  diam_cmd->add_option("--claimed", o.claimed, "diameter to test for exceedance (default 2 * radius)");
  auto* incl_cmd = leaf(gs, "gset", "include", "sample an inclusion between two regions");
  incl_cmd->add_option("--inner", o.inner, "contained region kind");
  incl_cmd->add_option("--outer", o.outer, "containing region kind");
  incl_cmd->add_option("--inner-radius", o.inner_radius);
  incl_cmd->add_option("--outer-radius", o.outer_radius);
  incl_cmd->add_option("--center", o.center, "common center")->delimiter(',');
  incl_cmd->add_option("--samples", o.samples, "samples of the inner region");
  auto* sfun_cmd = leaf(gs, "gset", "sfun", "tabulate the annulus radius function s(t)");
  sfun_cmd->add_option("--points", o.points, "grid size on [0, 1)");
  sfun_cmd->add_option("--k-eps", o.k_eps, "also report k(eps)");
  sfun_cmd->add_option("--annulus-points", o.annulus_points, "unit-sphere points to verify");
  sfun_cmd->add_option("--annulus-samples", o.annulus_samples, "samples per verified point");

  auto* ms = app.add_subcommand("measure", "volumes and covering measures")->require_subcommand(1);
  auto* vol_cmd = leaf(ms, "measure", "volume", "Monte Carlo Haar volume");
  add_region(vol_cmd, o, "ball");
  vol_cmd->add_option("--samples", o.samples);
  auto* ratio_cmd = leaf(ms, "measure", "ratio", "isodiametric ratio");
  add_region(ratio_cmd, o, "ball");
  ratio_cmd->add_option("--budget", o.budget, "volume samples and diameter budget");
  auto* imp_cmd = leaf(ms, "measure", "improve", "improve the isodiametric ratio of the unit ball");
  imp_cmd->add_option("--C", o.c_shape, "ball or box");
  imp_cmd->add_option("--c-half-widths", o.c_half_widths, "half-widths of a box C")->delimiter(',');
  imp_cmd->add_option("--checks", o.checks, "samples for each hypothesis check");
  imp_cmd->add_option("--budget", o.budget, "samples for the reported ratios");
  auto* fin_cmd = leaf(ms, "measure", "finite", "exact covering measures of a small point set");
  add_cloud(fin_cmd, o);
  fin_cmd->add_option("--point", o.point_list, "a point as comma-separated coordinates (repeatable)");
  fin_cmd->add_option("--delta", o.delta, "covering scale");
  fin_cmd->add_option("--variant", o.variant, "hausdorff, spherical, centered or all");

  auto* dn = app.add_subcommand("density", "density surrogates")->require_subcommand(1);
  auto* prof_cmd = leaf(dn, "density", "profile", "density ratios on a dyadic scale grid");
  add_cloud(prof_cmd, o);
  prof_cmd->add_option("--point-index", o.point_index, "cloud indices (default: middle point)")->delimiter(',');
  prof_cmd->add_flag("--all", o.all_points, "every point of the cloud");
  prof_cmd->add_option("--shape", o.shape, "ball, gset or both");
  prof_cmd->add_option("--r-max", o.r_max, "largest scale");

  auto* rc = app.add_subcommand("rectify", "graph charts")->require_subcommand(1);
  // Here --eps is the cone aperture; the norm comes from the cloud file.
  auto* run_cmd = leaf(rc, "rectify", "run", "classify, cover and chart a cloud", false);
  add_cloud(run_cmd, o);
  run_cmd->add_option("--eps", o.rect_eps, "cone aperture in (0, 1)");
  run_cmd->add_option("--j-max", o.j_max, "largest stratum (0 = from resolution)");
  run_cmd->add_option("--min-charted", o.min_charted, "fail (exit 2) below this charted mass fraction");

  auto* sy = app.add_subcommand("synth", "bundled clouds")->require_subcommand(1);
  auto* make_cmd = leaf(sy, "synth", "make", "write a bundled cloud");
  make_cmd->add_option("--kind", o.kind, "horizontal-segment, vertical-segment, atoms, uniform-ball");
  make_cmd->add_option("--n", o.n, "number of points");
  make_cmd->add_option("--alpha", o.alpha, "measure exponent (default per kind)");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* chosen = nullptr;
  for (const auto& [s, name] : names) {
    if (s->parsed()) chosen = s;
  }
  if (!chosen) return kExitUsage;
  Context ctx;
  ctx.leaf = chosen;
  ctx.command = names[chosen];
  ctx.config_hash = config_hash(*chosen, ctx.command);
  const Emitter em{o, ctx};

  try {
    if (chosen == group_validate_cmd) return group_validate(o, em);
    if (chosen == norm_validate_cmd) return norm_validate(o, em);
    if (chosen == norm_constants_cmd) return norm_constants(o, em);
    if (chosen == diam_cmd) return gset_diameter(o, em);
    if (chosen == incl_cmd) return gset_include(o, em);
    if (chosen == sfun_cmd) return gset_sfun(o, em);
    if (chosen == vol_cmd) return measure_volume(o, em);
    if (chosen == ratio_cmd) return measure_ratio(o, em);
    if (chosen == imp_cmd) return measure_improve(o, em);
    if (chosen == fin_cmd) return measure_finite(o, em, *chosen);
    if (chosen == prof_cmd) return density_profile_cmd(o, em, *chosen);
    if (chosen == run_cmd) return rectify_run(o, em, *chosen);
    if (chosen == make_cmd) return synth_make(o, em);
  } catch (const ViolationFound& e) {
    std::cerr << "claim failed: " << e.what() << "\n";
    return kExitClaimFailed;
  } catch (const ConeViolation& e) {
    std::cerr << "claim failed: " << e.what() << "\n";
    return kExitClaimFailed;
  } catch (const Infeasible& e) {
    std::cerr << "claim failed: " << e.what() << "\n";
    return kExitClaimFailed;
  } catch (const CLI::Error& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
