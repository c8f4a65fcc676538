#pragma once

// Homogeneous groups described by a graded nilpotent Lie algebra, in
// exponential coordinates of the first kind. The group law is the
// Baker-Campbell-Hausdorff series, which terminates at the step of the group.

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace homlab {

/// Largest supported topological dimension of a group.
inline constexpr std::size_t kMaxDim = 16;
/// Largest supported step; the product hardcodes BCH terms through length 4.
inline constexpr int kMaxStep = 4;

/// A group element in exponential coordinates, blocked layer by layer.
/// Storage is inline so hot loops never allocate.
class Point {
 public:
  Point() = default;
  explicit Point(std::size_t n);
  Point(std::initializer_list<double> coords);
  static Point from(std::span<const double> coords);

  std::size_t size() const noexcept { return size_; }
  double& operator[](std::size_t i) noexcept { return c_[i]; }
  double operator[](std::size_t i) const noexcept { return c_[i]; }
  std::span<double> coords() noexcept { return {c_.data(), size_}; }
  std::span<const double> coords() const noexcept { return {c_.data(), size_}; }

  bool operator==(const Point& other) const noexcept;

 private:
  std::array<double, kMaxDim> c_{};
  std::size_t size_ = 0;
};

struct Layer {
  int dim = 0;
  int weight = 0;
};

/// Structure constant of [e_i, e_j] = coeff * e_k, stored once with i < j.
struct BracketEntry {
  int i = 0;
  int j = 0;
  int k = 0;
  double coeff = 0.0;
};

/// Bracket constant as it appears in a spec document: num/den.
struct RationalBracket {
  int i = 0;
  int j = 0;
  int k = 0;
  std::int64_t num = 0;
  std::int64_t den = 1;
};

class GroupSpec {
 public:
  /// Validates grading, antisymmetry and the Jacobi identity.
  /// Layers may be listed in any order; missing weights are zero-dimensional.
  static GroupSpec build(std::string name, std::vector<Layer> layers,
                         const std::vector<RationalBracket>& brackets);

  const std::string& name() const noexcept { return name_; }
  /// Step: the largest weight carried by a nonzero layer.
  int step() const noexcept { return step_; }
  std::size_t dim() const noexcept { return weights_.size(); }
  /// Homogeneous dimension, sum of weight * dim over layers.
  int homogeneous_dimension() const noexcept { return homogeneous_dim_; }

  int layer_dim(int weight) const noexcept;
  std::size_t layer_offset(int weight) const noexcept;
  int weight_of(std::size_t basis) const noexcept { return weights_[basis]; }
  bool has_horizontal_layer() const noexcept { return layer_dim(1) > 0; }
  /// First weight with a nonzero layer.
  int lowest_weight() const noexcept;

  const std::vector<BracketEntry>& brackets() const noexcept { return brackets_; }
  bool is_abelian() const noexcept { return brackets_.empty(); }

  std::span<const double> layer(const Point& x, int weight) const noexcept;
  std::span<double> layer(Point& x, int weight) const noexcept;
  /// Euclidean norm of the weight-`weight` block.
  double layer_norm(const Point& x, int weight) const noexcept;

  /// out = [u, v] on algebra vectors.
  void bracket(const Point& u, const Point& v, Point& out) const noexcept;

  Point zero() const { return Point(dim()); }
  /// Basis vector e_i.
  Point basis(std::size_t i) const;
  /// Throws DimensionMismatch when x is not an element of this group.
  void check(const Point& x) const;

  bool operator==(const GroupSpec& other) const noexcept { return name_ == other.name_ && weights_ == other.weights_ && same_brackets(other); }

 private:
  bool same_brackets(const GroupSpec& other) const noexcept;

  std::string name_;
  std::vector<int> layer_dims_;            // indexed by weight - 1
  std::vector<std::size_t> layer_offsets_; // indexed by weight - 1
  std::vector<int> weights_;               // per basis vector
  std::vector<BracketEntry> brackets_;
  int step_ = 0;
  int homogeneous_dim_ = 0;
};

/// Parses and validates a group spec document:
/// {"name": str, "layers": [{"dim": int, "weight": int}], "brackets": [[i, j, k, num, den]]}
GroupSpec load_group(std::string_view json_text);

/// Bundled groups: abelian-r1, abelian-r2, parabolic-plane, heisenberg-1,
/// vertical-only, filiform-4.
GroupSpec bundled_group(std::string_view name);
std::string bundled_group_json(std::string_view name);
std::vector<std::string> bundled_group_names();
/// Resolves a bundled name, or reads the file at `name_or_path`.
GroupSpec resolve_group(const std::string& name_or_path);

/// Group product via the BCH series truncated at the step.
Point multiply(const GroupSpec& g, const Point& x, const Point& y);
/// Exponential coordinates: the inverse is coordinatewise negation.
Point inverse(const GroupSpec& g, const Point& x);
/// delta_lambda, scaling layer l by lambda^l.
Point dilate(const GroupSpec& g, double lambda, const Point& x);
/// Projection onto the first layer, padded back into the group.
Point horizontal_part(const GroupSpec& g, const Point& x);

}  // namespace homlab
