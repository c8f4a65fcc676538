#include "homlab/norms.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "homlab/errors.hpp"
#include "homlab/random.hpp"
#include "homlab/sampling.hpp"

namespace homlab {

namespace {

constexpr std::array<std::pair<NormKind, std::string_view>, 6> kNames{{
    {NormKind::SmoothBox, "smooth-box"},
    {NormKind::Koranyi, "koranyi"},
    {NormKind::ParabInfty, "parab-infty"},
    {NormKind::Parab4, "parab-4"},
    {NormKind::Parab1, "parab-1"},
    {NormKind::ParabMaxSigned, "parab-max-signed"},
}};

bool is_parab(NormKind k) noexcept {
  return k == NormKind::ParabInfty || k == NormKind::Parab4 || k == NormKind::Parab1 ||
         k == NormKind::ParabMaxSigned;
}

double sign(double v) noexcept { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

std::vector<double> padded_epsilons(const GroupSpec& g, const std::vector<double>& eps) {
  std::vector<double> out(static_cast<std::size_t>(g.step()), 1.0);
  for (std::size_t i = 0; i < std::min(out.size(), eps.size()); ++i) out[i] = eps[i];
  return out;
}

double smooth_box_value(const GroupSpec& g, const std::vector<double>& eps, const Point& x) noexcept {
  double m = 0.0;
  for (int w = 1; w <= g.step(); ++w) {
    if (g.layer_dim(w) == 0) continue;
    const double r = g.layer_norm(x, w);
    const double v = w == 1 ? r : eps[static_cast<std::size_t>(w - 1)] * layer_root(r, w);
    m = std::max(m, v);
  }
  return m;
}

}  // namespace

std::string_view to_string(NormKind kind) noexcept {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

NormKind parse_norm_kind(std::string_view text) {
  for (const auto& [k, name] : kNames) {
    if (name == text) return k;
  }
  throw MalformedSpec("unknown norm kind '" + std::string(text) + "'");
}

bool is_heisenberg_1(const GroupSpec& g) noexcept {
  if (g.step() != 2 || g.layer_dim(1) != 2 || g.layer_dim(2) != 1) return false;
  const auto& b = g.brackets();
  return b.size() == 1 && b[0].i == 0 && b[0].j == 1 && b[0].k == 2 && b[0].coeff == 4.0;
}

bool is_parabolic_plane(const GroupSpec& g) noexcept {
  return g.step() == 2 && g.layer_dim(1) == 1 && g.layer_dim(2) == 1 && g.is_abelian();
}

NormSpec make_norm(NormKind kind, const GroupSpec& group, std::vector<double> epsilons, double xi) {
  if (kind == NormKind::Koranyi && !is_heisenberg_1(group)) {
    throw GroupMismatch("koranyi norm requires heisenberg-1, got " + group.name());
  }
  if (is_parab(kind) && !is_parabolic_plane(group)) {
    throw GroupMismatch(std::string(to_string(kind)) + " requires parabolic-plane, got " + group.name());
  }
  NormSpec n;
  n.kind = kind;
  n.group = group;
  n.xi = xi;
  if (kind == NormKind::SmoothBox) {
    if (!epsilons.empty() && epsilons.size() != static_cast<std::size_t>(group.step())) {
      throw MalformedSpec("smooth-box needs one epsilon per weight 1.." + std::to_string(group.step()));
    }
    n.epsilons = padded_epsilons(group, epsilons);
    if (n.epsilons[0] != 1.0) throw MalformedSpec("smooth-box requires eps_1 = 1");
    for (double e : n.epsilons) {
      if (!(e > 0.0) || !std::isfinite(e)) throw MalformedSpec("smooth-box epsilons must be positive");
    }
  }
  return n;
}

NormSpec default_smooth_box(const GroupSpec& group, double xi, std::size_t n_samples, std::uint64_t seed) {
  const auto initial = estimate_constants(group, {}, n_samples, seed);
  auto sel = select_epsilons(group, xi, initial);
  NormSpec n = make_norm(NormKind::SmoothBox, group, sel.epsilons, xi);
  n.constants = std::move(sel.constants);
  return n;
}

NormSpec default_norm(NormKind kind, const GroupSpec& group, double xi) {
  if (kind == NormKind::SmoothBox) return default_smooth_box(group, xi);
  return make_norm(kind, group, {}, xi);
}

double eval_norm(const NormSpec& n, const Point& x) {
  n.group.check(x);
  switch (n.kind) {
    case NormKind::SmoothBox:
      return smooth_box_value(n.group, n.epsilons, x);
    case NormKind::Koranyi: {
      const double h2 = x[0] * x[0] + x[1] * x[1];
      return layer_root(h2 * h2 + x[2] * x[2], 4);
    }
    case NormKind::ParabInfty:
      return std::max(std::abs(x[0]), std::sqrt(std::abs(x[1])));
    case NormKind::Parab4:
      return layer_root(x[0] * x[0] * x[0] * x[0] + x[1] * x[1], 4);
    case NormKind::Parab1:
      return std::abs(x[0]) + std::sqrt(std::abs(x[1]));
    case NormKind::ParabMaxSigned:
      return std::max(std::abs(x[0]), std::sqrt(std::abs(x[1])) - sign(x[1]) * x[0]);
  }
  return 0.0;
}

double distance(const NormSpec& n, const Point& x, const Point& y) {
  return eval_norm(n, multiply(n.group, inverse(n.group, x), y));
}

std::vector<double> unit_ball_box(const NormSpec& n) {
  const auto& g = n.group;
  std::vector<double> h(static_cast<std::size_t>(g.step()), 0.0);
  switch (n.kind) {
    case NormKind::SmoothBox:
      for (int w = 1; w <= g.step(); ++w) {
        h[static_cast<std::size_t>(w - 1)] = std::pow(1.0 / n.epsilons[static_cast<std::size_t>(w - 1)], w);
      }
      break;
    case NormKind::Koranyi:
    case NormKind::ParabInfty:
    case NormKind::Parab4:
    case NormKind::Parab1:
      h = {1.0, 1.0};
      break;
    case NormKind::ParabMaxSigned:
      // |t|^(1/2) <= 1 + |x| <= 2.
      h = {1.0, 4.0};
      break;
  }
  return h;
}

ConstantsReport estimate_constants(const GroupSpec& g, const std::vector<double>& epsilons, std::size_t n_samples,
                                   std::uint64_t seed) {
  const auto eps = padded_epsilons(g, epsilons);
  const auto kappa = static_cast<std::size_t>(g.step());
  ConstantsReport rep;
  rep.observed_max.assign(kappa, 0.0);
  rep.c_tilde.assign(kappa, 0.0);
  rep.c.assign(kappa, 0.0);
  rep.sample_count = n_samples;
  rep.seed = seed;
  if (g.is_abelian() || !g.has_horizontal_layer()) return rep;

  Rng rng(seed);
  // Each layer gets its own radius so that pairs with small upper layers,
  // where the ratio peaks, are sampled often.
  auto draw = [&]() {
    Point x(g.dim());
    for (int w = 1; w <= g.step(); ++w) {
      const int d = g.layer_dim(w);
      if (d == 0) continue;
      const double rho = rng.uniform();
      const double mag = std::pow(rho / eps[static_cast<std::size_t>(w - 1)], w);
      auto block = g.layer(x, w);
      double s = 0.0;
      for (auto& v : block) {
        v = rng.normal();
        s += v * v;
      }
      s = std::sqrt(s);
      for (auto& v : block) v = s > 0.0 ? v / s * mag : 0.0;
    }
    return x;
  };

  for (std::size_t it = 0; it < n_samples; ++it) {
    const Point x = draw();
    const Point y = draw();
    const double nx = smooth_box_value(g, eps, x);
    const double ny = smooth_box_value(g, eps, y);
    const double sum = nx + ny;
    if (!(sum > 0.0)) continue;
    const Point z = multiply(g, x, y);
    for (int w = 2; w <= g.step(); ++w) {
      if (g.layer_dim(w) == 0) continue;
      double q2 = 0.0;
      const std::size_t off = g.layer_offset(w);
      for (int d = 0; d < g.layer_dim(w); ++d) {
        const std::size_t m = off + static_cast<std::size_t>(d);
        const double q = z[m] - x[m] - y[m];
        q2 += q * q;
      }
      const double ratio = std::sqrt(q2) / std::pow(sum, w);
      auto& slot = rep.observed_max[static_cast<std::size_t>(w - 1)];
      slot = std::max(slot, ratio);
    }
  }
  for (std::size_t l = 1; l < kappa; ++l) {
    rep.c_tilde[l] = kConstantsSafety * rep.observed_max[l];
    rep.c[l] = std::pow(2.0, static_cast<double>(l)) * rep.c_tilde[l];
  }
  return rep;
}

EpsilonSelection select_epsilons(const GroupSpec& g, double xi, const ConstantsReport& initial) {
  if (!(xi > 1.9 && xi < 2.0)) throw XiOutOfRange("xi must lie in (19/10, 2), got " + std::to_string(xi));
  const auto kappa = static_cast<std::size_t>(g.step());
  std::vector<double> eps(kappa, 1.0);
  const double budget = std::pow(2.0 - xi, g.step());
  ConstantsReport rep = initial;
  for (std::size_t l = 1; l < kappa; ++l) {
    if (l > 1) rep = estimate_constants(g, eps, initial.sample_count, initial.seed);
    const double c = rep.c[l];
    const double w = static_cast<double>(l + 1);
    eps[l] = c > 0.0 ? kEpsilonMargin * std::pow(budget / (std::pow(4.0, w) * c), 1.0 / w) : 1.0;
  }
  rep = estimate_constants(g, eps, initial.sample_count, initial.seed);
  return {eps, rep};
}

bool satisfies_epsilon_constraint(const NormSpec& n) {
  if (n.kind != NormKind::SmoothBox || !n.constants) return false;
  const double budget = std::pow(2.0 - n.xi, n.group.step());
  for (int w = 2; w <= n.group.step(); ++w) {
    const auto l = static_cast<std::size_t>(w - 1);
    if (!(std::pow(4.0, w) * std::pow(n.epsilons[l], w) * n.constants->c[l] < budget)) return false;
  }
  return true;
}

bool NormValidation::passed() const noexcept {
  return std::all_of(axioms.begin(), axioms.end(), [](const AxiomCheck& a) { return a.violations == 0; });
}

NormValidation validate_norm(const NormSpec& n, std::size_t n_triples, std::uint64_t seed) {
  const auto& g = n.group;
  const auto box = unit_ball_box(n);
  NormValidation rep;
  rep.n_triples = n_triples;
  rep.seed = seed;
  rep.axioms = {{"triangle", 0, 0.0}, {"homogeneity", 0, 0.0}, {"symmetry", 0, 0.0}};
  Rng rng(seed);
  auto draw = [&]() { return dilate(g, 10.0 * (1.0 - rng.uniform()), sample_in_box(g, box, rng)); };
  auto record = [&](AxiomCheck& a, double excess, double scale) {
    const double rel = excess / std::max(scale, 1e-300);
    if (rel > rep.tolerance) {
      ++a.violations;
      a.max_violation = std::max(a.max_violation, rel);
    }
  };
  for (std::size_t it = 0; it < n_triples; ++it) {
    const Point x = draw();
    const Point y = draw();
    const Point z = draw();
    const double dxy = distance(n, x, y);
    const double dyz = distance(n, y, z);
    const double dxz = distance(n, x, z);
    record(rep.axioms[0], dxz - dxy - dyz, dxz);

    const double lambda = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
    const double dl = distance(n, dilate(g, lambda, x), dilate(g, lambda, y));
    record(rep.axioms[1], std::abs(dl - lambda * dxy), lambda * dxy);

    record(rep.axioms[2], std::abs(distance(n, y, x) - dxy), dxy);
  }
  return rep;
}

}  // namespace homlab
