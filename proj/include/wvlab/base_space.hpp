#pragma once

// Euclidean base space R^d: points, straight-line geodesics, rays, and the
// family of analytically known eikonal solutions (Busemann fields and their
// pointwise minima) used to build test fields on the measure space.

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace wvlab {

/// A point of R^d. All coordinates are finite.
class BasePoint {
 public:
  BasePoint() = default;
  explicit BasePoint(std::vector<double> coords);
  BasePoint(std::initializer_list<double> coords);

  std::size_t dim() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const noexcept { return coords_; }

  friend bool operator==(const BasePoint&, const BasePoint&) = default;

 private:
  std::vector<double> coords_;
};

BasePoint operator+(const BasePoint& a, const BasePoint& b);
BasePoint operator-(const BasePoint& a, const BasePoint& b);
BasePoint operator*(double s, const BasePoint& a);

double dot(const BasePoint& a, const BasePoint& b);
double norm(const BasePoint& a);
double distance(const BasePoint& a, const BasePoint& b);

/// Throws DimensionError when the dimensions differ.
void require_same_dim(std::size_t a, std::size_t b, const char* where);

/// Unit-norm direction. Inputs within 1e-9 of unit norm are renormalized,
/// anything further off is rejected with DomainError.
class UnitVector {
 public:
  explicit UnitVector(std::vector<double> v);
  UnitVector(std::initializer_list<double> v);
  explicit UnitVector(const BasePoint& v);

  std::size_t dim() const noexcept { return v_.dim(); }
  const BasePoint& vec() const noexcept { return v_; }
  double operator[](std::size_t i) const { return v_[i]; }

  UnitVector operator-() const;
  friend bool operator==(const UnitVector&, const UnitVector&) = default;

 private:
  BasePoint v_;
};

/// t -> origin + t * speed * direction for t >= 0.
struct BaseRay {
  BaseRay(BasePoint origin, UnitVector direction, double speed = 1.0);

  BasePoint origin;
  UnitVector direction;
  double speed;
};

BasePoint base_geodesic_eval(const BasePoint& a, const BasePoint& b, double t);
BasePoint ray_eval(const BaseRay& r, double t);

class BaseScalarField;

/// x -> -<x, v> + offset.
struct BusemannField {
  UnitVector direction;
  double offset = 0.0;
};

struct MinOfFields {
  std::vector<BaseScalarField> members;
};

/// x -> sign * min_k |x - p_k|, sign in {+1, -1}.
struct DistanceToSet {
  std::vector<BasePoint> points;
  double sign = 1.0;
};

/// Black-box field. `ray` may be empty, in which case no descent ray is known.
struct CustomField {
  std::size_t dim = 0;
  std::function<double(const BasePoint&)> eval;
  double lipschitz = 1.0;
  std::function<BaseRay(const BasePoint&)> ray;
  std::string name;
};

/// Real function on R^d; every variant is 1-Lipschitz.
class BaseScalarField {
 public:
  using Node = std::variant<BusemannField, MinOfFields, DistanceToSet, CustomField>;

  static BaseScalarField busemann(UnitVector direction, double offset = 0.0);
  static BaseScalarField distance_to(std::vector<BasePoint> points, double sign = 1.0);
  static BaseScalarField custom(CustomField field);

  std::size_t dim() const noexcept { return dim_; }
  const Node& node() const noexcept { return node_; }

  /// True when base_negative_gradient_ray is defined for this field.
  bool has_analytic_ray() const;

 private:
  friend BaseScalarField min_combine(std::vector<BaseScalarField> fields);
  BaseScalarField(Node node, std::size_t dim) : node_(std::move(node)), dim_(dim) {}

  Node node_;
  std::size_t dim_ = 0;
};

double eval_base_field(const BaseScalarField& u, const BasePoint& x);

/// Unit-speed ray along which u decreases at unit rate. For a minimum of
/// fields, the ray of the lowest-index member attaining the minimum at x.
BaseRay base_negative_gradient_ray(const BaseScalarField& u, const BasePoint& x);

/// Pointwise minimum. A singleton list returns its only member unchanged.
BaseScalarField min_combine(std::vector<BaseScalarField> fields);

}  // namespace wvlab
