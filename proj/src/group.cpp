#include "homlab/group.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "homlab/errors.hpp"
#include "json.hpp"

namespace homlab {

namespace {

constexpr double kJacobiTol = 1e-12;

std::string triple(int i, int j, int k) {
  std::ostringstream os;
  os << "(" << i << ", " << j << ", " << k << ")";
  return os.str();
}

}  // namespace

Point::Point(std::size_t n) : size_(n) {
  if (n > kMaxDim) {
    throw DimensionMismatch("point dimension " + std::to_string(n) + " exceeds the supported maximum " +
                            std::to_string(kMaxDim));
  }
}

Point::Point(std::initializer_list<double> coords) : Point(coords.size()) {
  std::copy(coords.begin(), coords.end(), c_.begin());
}

Point Point::from(std::span<const double> coords) {
  Point p(coords.size());
  std::copy(coords.begin(), coords.end(), p.c_.begin());
  return p;
}

bool Point::operator==(const Point& other) const noexcept {
  if (size_ != other.size_) return false;
  for (std::size_t i = 0; i < size_; ++i) {
    if (c_[i] != other.c_[i]) return false;
  }
  return true;
}

GroupSpec GroupSpec::build(std::string name, std::vector<Layer> layers,
                           const std::vector<RationalBracket>& brackets) {
  GroupSpec g;
  g.name_ = std::move(name);

  int max_weight = 0;
  for (const auto& l : layers) {
    if (l.weight < 1) throw MalformedSpec("layer weight must be a positive integer, got " + std::to_string(l.weight));
    if (l.dim < 0) throw MalformedSpec("layer dimension must be nonnegative, got " + std::to_string(l.dim));
    max_weight = std::max(max_weight, l.weight);
  }
  if (max_weight == 0) throw MalformedSpec("group spec has no layers");

  g.layer_dims_.assign(static_cast<std::size_t>(max_weight), 0);
  std::vector<bool> seen(static_cast<std::size_t>(max_weight), false);
  for (const auto& l : layers) {
    auto idx = static_cast<std::size_t>(l.weight - 1);
    if (seen[idx]) throw MalformedSpec("weight " + std::to_string(l.weight) + " listed twice");
    seen[idx] = true;
    g.layer_dims_[idx] = l.dim;
  }
  while (!g.layer_dims_.empty() && g.layer_dims_.back() == 0) g.layer_dims_.pop_back();
  if (g.layer_dims_.empty()) throw MalformedSpec("group spec has only zero-dimensional layers");

  g.step_ = static_cast<int>(g.layer_dims_.size());
  std::size_t offset = 0;
  for (std::size_t w = 0; w < g.layer_dims_.size(); ++w) {
    g.layer_offsets_.push_back(offset);
    for (int d = 0; d < g.layer_dims_[w]; ++d) g.weights_.push_back(static_cast<int>(w + 1));
    offset += static_cast<std::size_t>(g.layer_dims_[w]);
    g.homogeneous_dim_ += static_cast<int>(w + 1) * g.layer_dims_[w];
  }
  if (g.weights_.size() > kMaxDim) {
    throw MalformedSpec("group dimension " + std::to_string(g.weights_.size()) + " exceeds the supported maximum " +
                        std::to_string(kMaxDim));
  }

  const int n = static_cast<int>(g.weights_.size());
  std::map<std::tuple<int, int, int>, double> table;
  for (const auto& b : brackets) {
    if (b.i < 0 || b.j < 0 || b.k < 0 || b.i >= n || b.j >= n || b.k >= n) {
      throw MalformedSpec("bracket index out of range at " + triple(b.i, b.j, b.k));
    }
    if (b.den == 0) throw MalformedSpec("zero denominator at " + triple(b.i, b.j, b.k));
    const double coeff = static_cast<double>(b.num) / static_cast<double>(b.den);
    if (coeff == 0.0) continue;
    if (b.i == b.j) throw MalformedSpec("antisymmetry violated: nonzero [e_i, e_i] at " + triple(b.i, b.j, b.k));
    if (g.weights_[static_cast<std::size_t>(b.k)] !=
        g.weights_[static_cast<std::size_t>(b.i)] + g.weights_[static_cast<std::size_t>(b.j)]) {
      throw GradingViolation("weight(k) != weight(i) + weight(j) at " + triple(b.i, b.j, b.k));
    }
    // Canonical orientation i < j.
    const bool flip = b.i > b.j;
    const auto key = flip ? std::make_tuple(b.j, b.i, b.k) : std::make_tuple(b.i, b.j, b.k);
    const double oriented = flip ? -coeff : coeff;
    auto [it, inserted] = table.emplace(key, oriented);
    if (!inserted && it->second != oriented) {
      throw MalformedSpec("antisymmetry violated: inconsistent entries for " + triple(b.i, b.j, b.k));
    }
  }
  for (const auto& [key, coeff] : table) {
    g.brackets_.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), coeff});
  }

  // Jacobi identity on every basis triple.
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        const Point ea = g.basis(static_cast<std::size_t>(a));
        const Point eb = g.basis(static_cast<std::size_t>(b));
        const Point ec = g.basis(static_cast<std::size_t>(c));
        Point t(g.dim()), u(g.dim()), sum(g.dim());
        g.bracket(eb, ec, t);
        g.bracket(ea, t, u);
        for (int m = 0; m < n; ++m) sum[static_cast<std::size_t>(m)] += u[static_cast<std::size_t>(m)];
        g.bracket(ec, ea, t);
        g.bracket(eb, t, u);
        for (int m = 0; m < n; ++m) sum[static_cast<std::size_t>(m)] += u[static_cast<std::size_t>(m)];
        g.bracket(ea, eb, t);
        g.bracket(ec, t, u);
        for (int m = 0; m < n; ++m) sum[static_cast<std::size_t>(m)] += u[static_cast<std::size_t>(m)];
        for (int m = 0; m < n; ++m) {
          if (std::abs(sum[static_cast<std::size_t>(m)]) > kJacobiTol) {
            throw JacobiViolation("Jacobi identity fails on basis triple " + triple(a, b, c));
          }
        }
      }
    }
  }
  return g;
}

int GroupSpec::layer_dim(int weight) const noexcept {
  if (weight < 1 || weight > step_) return 0;
  return layer_dims_[static_cast<std::size_t>(weight - 1)];
}

std::size_t GroupSpec::layer_offset(int weight) const noexcept {
  if (weight < 1) return 0;
  if (weight > step_) return dim();
  return layer_offsets_[static_cast<std::size_t>(weight - 1)];
}

int GroupSpec::lowest_weight() const noexcept {
  for (int w = 1; w <= step_; ++w) {
    if (layer_dim(w) > 0) return w;
  }
  return step_;
}

std::span<const double> GroupSpec::layer(const Point& x, int weight) const noexcept {
  return x.coords().subspan(layer_offset(weight), static_cast<std::size_t>(layer_dim(weight)));
}

std::span<double> GroupSpec::layer(Point& x, int weight) const noexcept {
  return x.coords().subspan(layer_offset(weight), static_cast<std::size_t>(layer_dim(weight)));
}

double GroupSpec::layer_norm(const Point& x, int weight) const noexcept {
  double s = 0.0;
  for (double v : layer(x, weight)) s += v * v;
  return std::sqrt(s);
}

void GroupSpec::bracket(const Point& u, const Point& v, Point& out) const noexcept {
  for (std::size_t m = 0; m < out.size(); ++m) out[m] = 0.0;
  // Pairing u_i v_j - u_j v_i makes [x, x] vanish exactly in floating point.
  for (const auto& b : brackets_) {
    const auto i = static_cast<std::size_t>(b.i);
    const auto j = static_cast<std::size_t>(b.j);
    out[static_cast<std::size_t>(b.k)] += b.coeff * (u[i] * v[j] - u[j] * v[i]);
  }
}

Point GroupSpec::basis(std::size_t i) const {
  Point e(dim());
  e[i] = 1.0;
  return e;
}

void GroupSpec::check(const Point& x) const {
  if (x.size() != dim()) {
    throw DimensionMismatch("point has " + std::to_string(x.size()) + " coordinates, group " + name_ + " has dimension " +
                            std::to_string(dim()));
  }
}

bool GroupSpec::same_brackets(const GroupSpec& other) const noexcept {
  if (brackets_.size() != other.brackets_.size()) return false;
  for (std::size_t m = 0; m < brackets_.size(); ++m) {
    const auto& a = brackets_[m];
    const auto& b = other.brackets_[m];
    if (a.i != b.i || a.j != b.j || a.k != b.k || a.coeff != b.coeff) return false;
  }
  return true;
}

GroupSpec load_group(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedSpec(std::string("group spec is not valid JSON: ") + e.what());
  }
  try {
    std::string name = doc.value("name", std::string("unnamed"));
    std::vector<Layer> layers;
    for (const auto& l : doc.at("layers")) layers.push_back({l.at("dim").get<int>(), l.at("weight").get<int>()});
    std::vector<RationalBracket> brackets;
    if (doc.contains("brackets")) {
      for (const auto& b : doc.at("brackets")) {
        if (!b.is_array() || (b.size() != 5 && b.size() != 4)) {
          throw MalformedSpec("bracket entries must be [i, j, k, num, den]");
        }
        RationalBracket rb;
        rb.i = b[0].get<int>();
        rb.j = b[1].get<int>();
        rb.k = b[2].get<int>();
        rb.num = b[3].get<std::int64_t>();
        rb.den = b.size() == 5 ? b[4].get<std::int64_t>() : 1;
        brackets.push_back(rb);
      }
    }
    return GroupSpec::build(std::move(name), std::move(layers), brackets);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedSpec(std::string("group spec does not follow the schema: ") + e.what());
  }
}

GroupSpec resolve_group(const std::string& name_or_path) {
  const auto names = bundled_group_names();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end()) return bundled_group(name_or_path);
  std::ifstream in(name_or_path);
  if (!in) throw MalformedSpec("unknown group '" + name_or_path + "' (not bundled, not a readable file)");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_group(ss.str());
}

Point multiply(const GroupSpec& g, const Point& x, const Point& y) {
  g.check(x);
  g.check(y);
  if (g.step() > kMaxStep) {
    throw UnsupportedStep("step " + std::to_string(g.step()) + " exceeds the hardcoded BCH truncation (4)");
  }
  const std::size_t n = g.dim();
  Point z(n);
  for (std::size_t m = 0; m < n; ++m) z[m] = x[m] + y[m];
  if (g.is_abelian() || g.step() < 2) return z;

  Point xy(n);
  g.bracket(x, y, xy);
  for (std::size_t m = 0; m < n; ++m) z[m] += 0.5 * xy[m];
  if (g.step() < 3) return z;

  Point xxy(n), yxy(n);
  g.bracket(x, xy, xxy);
  g.bracket(y, xy, yxy);
  for (std::size_t m = 0; m < n; ++m) z[m] += (xxy[m] - yxy[m]) / 12.0;
  if (g.step() < 4) return z;

  Point yxxy(n);
  g.bracket(y, xxy, yxxy);
  for (std::size_t m = 0; m < n; ++m) z[m] -= yxxy[m] / 24.0;
  return z;
}

Point inverse(const GroupSpec& g, const Point& x) {
  g.check(x);
  Point r(x.size());
  for (std::size_t m = 0; m < x.size(); ++m) r[m] = -x[m];
  return r;
}

Point dilate(const GroupSpec& g, double lambda, const Point& x) {
  g.check(x);
  if (!(lambda > 0.0)) throw NonpositiveLambda("dilation factor must be positive");
  Point r(x.size());
  double scale = 1.0;
  for (int w = 1; w <= g.step(); ++w) {
    scale *= lambda;
    const std::size_t off = g.layer_offset(w);
    for (int d = 0; d < g.layer_dim(w); ++d) r[off + static_cast<std::size_t>(d)] = scale * x[off + static_cast<std::size_t>(d)];
  }
  return r;
}

Point horizontal_part(const GroupSpec& g, const Point& x) {
  g.check(x);
  Point r(x.size());
  for (int d = 0; d < g.layer_dim(1); ++d) r[static_cast<std::size_t>(d)] = x[static_cast<std::size_t>(d)];
  return r;
}

}  // namespace homlab
