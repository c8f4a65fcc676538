#include "homlab/rectify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "homlab/errors.hpp"
#include "homlab/sfunction.hpp"

namespace homlab {

namespace {

constexpr int kJCap = 1024;

double horizontal_distance(const GroupSpec& g, const Point& p, const Point& q) {
  double s = 0.0;
  const std::size_t m = static_cast<std::size_t>(g.layer_dim(1));
  for (std::size_t c = 0; c < m; ++c) s += (q[c] - p[c]) * (q[c] - p[c]);
  return std::sqrt(s);
}

// Indices sorted by first coordinate. When the group has a horizontal layer,
// |p_0 - q_0| <= |p_1 - q_1| <= d(p, q), which bounds every scan below.
struct KeyIndex {
  std::vector<std::size_t> order;
  std::vector<double> keys;
  bool prunes = false;

  KeyIndex(const PointCloud& cloud, const std::vector<std::size_t>& subset) {
    prunes = cloud.norm.group.has_horizontal_layer();
    order = subset;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return cloud.points[a][0] < cloud.points[b][0]; });
    for (auto i : order) keys.push_back(cloud.points[i][0]);
  }

  template <class Fn>
  void around(double key, double radius, Fn&& fn) const {
    std::size_t lo = 0;
    std::size_t hi = order.size();
    if (prunes) {
      lo = static_cast<std::size_t>(std::lower_bound(keys.begin(), keys.end(), key - radius) - keys.begin());
      hi = static_cast<std::size_t>(std::upper_bound(keys.begin(), keys.end(), key + radius) - keys.begin());
    }
    for (std::size_t q = lo; q < hi; ++q) fn(order[q]);
  }
};

bool in_window(double r, double resolution, int j) { return r < 1.0 / j && r > 4.0 * resolution; }

}  // namespace

bool cone_check(const NormSpec& norm, const Point& base, const Point& y, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionFailed("cone_check needs eps in (0, 1)");
  const auto& g = norm.group;
  const Point z = multiply(g, inverse(g, base), y);
  return eval_norm(norm, z) <= g.layer_norm(z, 1) / (1.0 - eps);
}

std::vector<double> rectify_scales(double resolution) {
  std::vector<double> s;
  for (double r = 0.5; r > 4.0 * resolution && s.size() < 60; r *= 0.5) s.push_back(r);
  return s;
}

int default_j_max(double resolution) {
  if (!(resolution > 0.0)) return kJCap;
  const double j = std::ceil(1.0 / (10.0 * resolution)) - 1.0;
  return static_cast<int>(std::clamp(j, 0.0, static_cast<double>(kJCap)));
}

std::vector<std::size_t> classify_Ejk(const PointCloud& cloud, int k, int j) {
  const double res = cloud_resolution(cloud);
  if (!(res < 1.0 / (10.0 * j))) {
    throw ResolutionTooCoarse("cloud resolution " + std::to_string(res) + " is not below 1/(10j) = " +
                              std::to_string(1.0 / (10.0 * j)));
  }
  auto table = compute_density_table(cloud, rectify_scales(res));
  table.resolution = res;
  return classify_Ejk(cloud, table, k, j);
}

std::vector<std::size_t> classify_Ejk(const PointCloud& cloud, const DensityTable& table, int k, int j) {
  if (k < 2) throw PreconditionFailed("classify_Ejk needs k >= 2");
  if (j < 1) throw PreconditionFailed("classify_Ejk needs j >= 1");
  if (!(table.resolution < 1.0 / (10.0 * j))) {
    throw ResolutionTooCoarse("cloud resolution " + std::to_string(table.resolution) + " is not below 1/(10j)");
  }
  if (table.gset_mass.empty()) throw PreconditionFailed("classification needs a norm with a G-set");
  const double lo = 1.0 - 1.0 / k;
  const double hi = 1.0 + 1.0 / k;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < table.n_points; ++i) {
    bool ok = true;
    for (std::size_t s = 0; s < table.scales.size() && ok; ++s) {
      if (!in_window(table.scales[s], table.resolution, j)) continue;
      ok = table.ball_ratio(i, s, cloud.alpha) >= lo && table.gset_ratio(i, s, cloud.alpha) <= hi;
    }
    if (ok) out.push_back(i);
  }
  return out;
}

std::vector<int> minimal_strata(const PointCloud& cloud, const DensityTable& table, int k, int j_max) {
  const double lo = 1.0 - 1.0 / k;
  const double hi = 1.0 + 1.0 / k;
  std::vector<int> strata(table.n_points, 0);
  for (std::size_t i = 0; i < table.n_points; ++i) {
    // E_{j,k} holds iff every failing scale is >= 1/j, so the smallest
    // failing scale f fixes j = ceil(1/f).
    double smallest_fail = 0.0;
    for (std::size_t s = 0; s < table.scales.size(); ++s) {
      const double r = table.scales[s];
      if (!(r > 4.0 * table.resolution)) continue;
      if (!(table.ball_ratio(i, s, cloud.alpha) >= lo && table.gset_ratio(i, s, cloud.alpha) <= hi)) smallest_fail = r;
    }
    const double jf = smallest_fail > 0.0 ? std::ceil(1.0 / smallest_fail) : 1.0;
    const int j = jf <= j_max ? static_cast<int>(jf) : j_max + 1;
    strata[i] = j <= j_max ? j : 0;
  }
  return strata;
}

Chart build_chart(const NormSpec& norm, const PointCloud& cloud, const std::vector<std::size_t>& members, double eps) {
  if (members.empty()) throw PreconditionFailed("build_chart needs a nonempty subset");
  const auto& g = norm.group;
  for (std::size_t a = 0; a < members.size(); ++a) {
    for (std::size_t b = 0; b < members.size(); ++b) {
      if (a == b) continue;
      if (!cone_check(norm, cloud.points[members[a]], cloud.points[members[b]], eps)) {
        throw ConeViolation("points " + std::to_string(members[a]) + " and " + std::to_string(members[b]) +
                                " violate the cone condition",
                            members[a], members[b]);
      }
    }
  }
  Chart c;
  c.members = members;
  std::sort(c.members.begin(), c.members.end());
  const std::size_t m = static_cast<std::size_t>(g.layer_dim(1));
  for (auto i : c.members) {
    const auto& p = cloud.points[i];
    Point b(m);
    for (std::size_t q = 0; q < m; ++q) b[q] = p[q];
    Point v(g.dim() - m);
    for (std::size_t q = m; q < g.dim(); ++q) v[q - m] = p[q];
    c.base.push_back(b);
    c.values.push_back(v);
  }
  for (std::size_t a = 0; a < c.members.size(); ++a) {
    for (std::size_t b = a + 1; b < c.members.size(); ++b) {
      const auto& p = cloud.points[c.members[a]];
      const auto& q = cloud.points[c.members[b]];
      c.lipschitz = std::max(c.lipschitz, distance(norm, p, q) / horizontal_distance(g, p, q));
    }
  }
  return c;
}

ChartReport rectify(const PointCloud& cloud, double eps, int j_max, unsigned threads) {
  cloud.validate();
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionFailed("rectify needs eps in (0, 1)");
  const auto& norm = cloud.norm;
  if (norm.kind != NormKind::SmoothBox && norm.kind != NormKind::Koranyi) {
    throw PreconditionFailed("rectify needs a smooth-box or koranyi norm");
  }
  ChartReport rep;
  rep.alpha = cloud.alpha;
  rep.eps = eps;
  rep.experimental = norm.kind == NormKind::Koranyi;
  rep.k = k_of_eps(norm, eps).k;
  rep.resolution = cloud_resolution(cloud);
  rep.j_max = j_max > 0 ? j_max : default_j_max(rep.resolution);
  if (rep.j_max < 1) {
    throw ResolutionTooCoarse("cloud resolution " + std::to_string(rep.resolution) + " admits no j with resolution < 1/(10j)");
  }
  if (!(rep.resolution < 1.0 / (10.0 * rep.j_max))) {
    throw ResolutionTooCoarse("cloud resolution is not below 1/(10 j_max)");
  }
  rep.scales = rectify_scales(rep.resolution);
  auto table = compute_density_table(cloud, rep.scales, threads);
  table.resolution = rep.resolution;
  const auto strata = minimal_strata(cloud, table, rep.k, rep.j_max);

  std::vector<char> residual(cloud.size(), 0);
  for (std::size_t i = 0; i < cloud.size(); ++i) residual[i] = strata[i] == 0;

  for (int j = 1; j <= rep.j_max; ++j) {
    std::vector<std::size_t> stratum;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (strata[i] == j) stratum.push_back(i);
    }
    if (stratum.empty()) continue;
    const double radius = 1.0 / (20.0 * j);
    const KeyIndex index(cloud, stratum);
    // Neighbour lists within the stratum, by position in `stratum`.
    std::vector<std::size_t> pos(cloud.size(), 0);
    for (std::size_t a = 0; a < stratum.size(); ++a) pos[stratum[a]] = a;
    std::vector<std::vector<std::size_t>> nbrs(stratum.size());
    for (std::size_t a = 0; a < stratum.size(); ++a) {
      const auto& x = cloud.points[stratum[a]];
      index.around(x[0], radius, [&](std::size_t q) {
        if (distance(norm, x, cloud.points[q]) <= radius) nbrs[a].push_back(pos[q]);
      });
      std::sort(nbrs[a].begin(), nbrs[a].end());
    }
    // Greedy: the center with the most uncovered neighbours, lowest index on ties.
    std::vector<char> covered(stratum.size(), 0);
    std::vector<std::size_t> gain(stratum.size());
    using Entry = std::pair<std::size_t, std::size_t>;  // (gain, -index) ordering below
    auto cmp = [](const Entry& a, const Entry& b) { return a.first < b.first || (a.first == b.first && a.second > b.second); };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
    for (std::size_t a = 0; a < stratum.size(); ++a) {
      gain[a] = nbrs[a].size();
      heap.push({gain[a], a});
    }
    while (!heap.empty()) {
      const auto [g_old, a] = heap.top();
      heap.pop();
      std::size_t g_now = 0;
      for (auto b : nbrs[a]) g_now += !covered[b];
      if (g_now == 0) continue;
      if (g_now < g_old) {
        heap.push({g_now, a});
        continue;
      }
      std::vector<std::size_t> members;
      for (auto b : nbrs[a]) {
        if (!covered[b]) {
          covered[b] = 1;
          members.push_back(stratum[b]);
        }
      }
      try {
        Chart c = build_chart(norm, cloud, members, eps);
        c.stratum = j;
        rep.charts.push_back(std::move(c));
      } catch (const ConeViolation& v) {
        rep.cone_failures.push_back({v.first(), v.second(), j});
        for (auto i : members) residual[i] = 1;
      }
    }
  }

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    rep.total_mass += cloud.weights[i];
    if (residual[i]) {
      rep.residual.push_back(i);
      rep.residual_mass += cloud.weights[i];
    }
  }
  for (const auto& c : rep.charts) {
    for (auto i : c.members) rep.charted_mass += cloud.weights[i];
  }
  return rep;
}

namespace {

// Drops the member with the most offending partners until the rest satisfy
// injectivity and the Lipschitz bound; returns the dropped members.
std::vector<std::size_t> prune_chart(const NormSpec& norm, const PointCloud& cloud, std::vector<std::size_t>& members,
                                     double bound) {
  const auto& g = norm.group;
  std::vector<std::size_t> dropped;
  for (;;) {
    std::vector<std::size_t> bad(members.size(), 0);
    std::size_t total = 0;
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const auto& p = cloud.points[members[a]];
        const auto& q = cloud.points[members[b]];
        const double h = horizontal_distance(g, p, q);
        const bool ok = h > 0.0 && distance(norm, p, q) <= bound * h * (1.0 + 1e-12);
        if (!ok) {
          ++bad[a];
          ++bad[b];
          ++total;
        }
      }
    }
    if (total == 0) return dropped;
    const auto worst = static_cast<std::size_t>(std::max_element(bad.begin(), bad.end()) - bad.begin());
    dropped.push_back(members[worst]);
    members.erase(members.begin() + static_cast<std::ptrdiff_t>(worst));
  }
}

}  // namespace

ProjectionReport projection_density_check(const PointCloud& cloud, const ChartReport& report,
                                          std::optional<double> eta) {
  const auto& norm = cloud.norm;
  const auto& g = norm.group;
  ProjectionReport out;
  std::vector<std::size_t> charted;
  std::vector<int> stratum_of(cloud.size(), 0);
  std::vector<std::size_t> residual(report.residual.begin(), report.residual.end());

  std::vector<std::vector<std::size_t>> kept(report.charts.size());
  for (std::size_t c = 0; c < report.charts.size(); ++c) {
    const auto& chart = report.charts[c];
    ChartProjection cp;
    cp.chart_id = c;
    kept[c] = chart.members;
    const double limit = 1.0 / (1.0 - report.eps);
    const double bound = eta ? std::min(limit, 1.0 + *eta) : limit;
    cp.flagged = prune_chart(norm, cloud, kept[c], bound);
    // Achieved constant of the surviving members.
    double lip = 1.0;
    for (std::size_t a = 0; a < kept[c].size(); ++a) {
      for (std::size_t b = a + 1; b < kept[c].size(); ++b) {
        const auto& p = cloud.points[kept[c][a]];
        const auto& q = cloud.points[kept[c][b]];
        lip = std::max(lip, distance(norm, p, q) / horizontal_distance(g, p, q));
      }
    }
    cp.eta = eta ? *eta : lip - 1.0;
    cp.threshold = std::pow(1.0 + cp.eta, -report.alpha) * (1.0 - 1.0 / report.k);
    for (auto i : kept[c]) {
      charted.push_back(i);
      stratum_of[i] = chart.stratum;
    }
    for (auto i : cp.flagged) residual.push_back(i);
    out.charts.push_back(std::move(cp));
  }
  std::sort(charted.begin(), charted.end());
  std::sort(residual.begin(), residual.end());

  const KeyIndex charted_index(cloud, charted);
  const KeyIndex residual_index(cloud, residual);
  for (std::size_t c = 0; c < report.charts.size(); ++c) {
    auto& cp = out.charts[c];
    cp.lower_density = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> low;
    for (auto i : kept[c]) {
      const auto& x = cloud.points[i];
      double worst = std::numeric_limits<double>::infinity();
      for (double r : report.scales) {
        if (!in_window(r, report.resolution, stratum_of[i])) continue;
        bool clean = true;
        residual_index.around(x[0], r, [&](std::size_t q) {
          if (clean && distance(norm, x, cloud.points[q]) <= r) clean = false;
        });
        if (!clean) continue;
        double mass = 0.0;
        charted_index.around(x[0], r, [&](std::size_t q) {
          if (horizontal_distance(g, x, cloud.points[q]) <= r) mass += cloud.weights[q];
        });
        worst = std::min(worst, mass / std::pow(2.0 * r, report.alpha));
      }
      if (!std::isfinite(worst)) continue;
      ++cp.assessed;
      cp.lower_density = std::min(cp.lower_density, worst);
      if (worst < cp.threshold) low.push_back(i);
    }
    if (cp.assessed == 0) cp.lower_density = 0.0;
    cp.flagged.insert(cp.flagged.end(), low.begin(), low.end());
    std::sort(cp.flagged.begin(), cp.flagged.end());
    out.flagged.insert(out.flagged.end(), cp.flagged.begin(), cp.flagged.end());
  }
  std::sort(out.flagged.begin(), out.flagged.end());
  return out;
}

}  // namespace homlab
