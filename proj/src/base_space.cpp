#include "wvlab/base_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "overloaded.hpp"
#include "wvlab/error.hpp"

namespace wvlab {

namespace {

constexpr double kUnitTolerance = 1e-12;
constexpr double kRenormalizeTolerance = 1e-9;

using detail::Overloaded;

}  // namespace

BasePoint::BasePoint(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw Error(ErrorCode::DimensionError, "base point needs d >= 1");
  for (double c : coords_) {
    if (!std::isfinite(c)) throw Error(ErrorCode::DomainError, "non-finite coordinate");
  }
}

BasePoint::BasePoint(std::initializer_list<double> coords)
    : BasePoint(std::vector<double>(coords)) {}

void require_same_dim(std::size_t a, std::size_t b, const char* where) {
  if (a != b) {
    throw Error(ErrorCode::DimensionError, std::string(where) + ": dimension " +
                                               std::to_string(a) + " vs " + std::to_string(b));
  }
}

BasePoint operator+(const BasePoint& a, const BasePoint& b) {
  require_same_dim(a.dim(), b.dim(), "operator+");
  std::vector<double> out(a.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
  return BasePoint(std::move(out));
}

BasePoint operator-(const BasePoint& a, const BasePoint& b) {
  require_same_dim(a.dim(), b.dim(), "operator-");
  std::vector<double> out(a.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
  return BasePoint(std::move(out));
}

BasePoint operator*(double s, const BasePoint& a) {
  std::vector<double> out(a.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = s * a[i];
  return BasePoint(std::move(out));
}

double dot(const BasePoint& a, const BasePoint& b) {
  require_same_dim(a.dim(), b.dim(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const BasePoint& a) {
  double s = 0.0;
  for (double c : a.coords()) s += c * c;
  return std::sqrt(s);
}

double distance(const BasePoint& a, const BasePoint& b) {
  require_same_dim(a.dim(), b.dim(), "distance");
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

UnitVector::UnitVector(std::vector<double> v) : v_(std::move(v)) {
  const double n = norm(v_);
  if (std::abs(n - 1.0) > kRenormalizeTolerance) {
    throw Error(ErrorCode::DomainError, "direction norm " + std::to_string(n) + " is not unit");
  }
  if (std::abs(n - 1.0) > kUnitTolerance) v_ = (1.0 / n) * v_;
}

UnitVector::UnitVector(std::initializer_list<double> v) : UnitVector(std::vector<double>(v)) {}

UnitVector::UnitVector(const BasePoint& v)
    : UnitVector(std::vector<double>(v.coords().begin(), v.coords().end())) {}

UnitVector UnitVector::operator-() const {
  UnitVector out = *this;
  out.v_ = -1.0 * v_;
  return out;
}

BaseRay::BaseRay(BasePoint o, UnitVector d, double s)
    : origin(std::move(o)), direction(std::move(d)), speed(s) {
  require_same_dim(origin.dim(), direction.dim(), "BaseRay");
  if (!(speed > 0.0) || !std::isfinite(speed)) {
    throw Error(ErrorCode::DomainError, "ray speed must be positive");
  }
}

BasePoint base_geodesic_eval(const BasePoint& a, const BasePoint& b, double t) {
  require_same_dim(a.dim(), b.dim(), "base_geodesic_eval");
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::DomainError, "geodesic time outside [0,1]");
  std::vector<double> out(a.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 - t) * a[i] + t * b[i];
  return BasePoint(std::move(out));
}

BasePoint ray_eval(const BaseRay& r, double t) {
  if (!(t >= 0.0)) throw Error(ErrorCode::DomainError, "ray time must be >= 0");
  std::vector<double> out(r.origin.dim());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = r.origin[i] + t * r.speed * r.direction[i];
  }
  return BasePoint(std::move(out));
}

BaseScalarField BaseScalarField::busemann(UnitVector direction, double offset) {
  const std::size_t d = direction.dim();
  return BaseScalarField(BusemannField{std::move(direction), offset}, d);
}

BaseScalarField BaseScalarField::distance_to(std::vector<BasePoint> points, double sign) {
  if (points.empty()) throw Error(ErrorCode::EmptyCollection, "distance_to needs points");
  if (sign != 1.0 && sign != -1.0) throw Error(ErrorCode::DomainError, "sign must be +1 or -1");
  const std::size_t d = points.front().dim();
  for (const auto& p : points) require_same_dim(d, p.dim(), "distance_to");
  return BaseScalarField(DistanceToSet{std::move(points), sign}, d);
}

BaseScalarField BaseScalarField::custom(CustomField field) {
  if (!field.eval) throw Error(ErrorCode::DomainError, "custom field needs an evaluator");
  if (field.dim == 0) throw Error(ErrorCode::DimensionError, "custom field needs d >= 1");
  if (!(field.lipschitz >= 0.0 && field.lipschitz <= 1.0)) {
    throw Error(ErrorCode::DomainError, "custom field must be declared 1-Lipschitz");
  }
  const std::size_t d = field.dim;
  return BaseScalarField(std::move(field), d);
}

bool BaseScalarField::has_analytic_ray() const {
  return std::visit(
      Overloaded{
          [](const BusemannField&) { return true; },
          [](const MinOfFields& m) {
            for (const auto& f : m.members) {
              if (!f.has_analytic_ray()) return false;
            }
            return true;
          },
          [](const DistanceToSet& s) { return s.sign < 0.0 && s.points.size() == 1; },
          [](const CustomField& c) { return static_cast<bool>(c.ray); },
      },
      node_);
}

BaseScalarField min_combine(std::vector<BaseScalarField> fields) {
  if (fields.empty()) throw Error(ErrorCode::EmptyCollection, "min_combine of empty list");
  if (fields.size() == 1) return std::move(fields.front());
  const std::size_t d = fields.front().dim();
  for (const auto& f : fields) require_same_dim(d, f.dim(), "min_combine");
  return BaseScalarField(MinOfFields{std::move(fields)}, d);
}

double eval_base_field(const BaseScalarField& u, const BasePoint& x) {
  require_same_dim(u.dim(), x.dim(), "eval_base_field");
  return std::visit(
      Overloaded{
          [&](const BusemannField& b) { return -dot(x, b.direction.vec()) + b.offset; },
          [&](const MinOfFields& m) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& f : m.members) best = std::min(best, eval_base_field(f, x));
            return best;
          },
          [&](const DistanceToSet& s) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& p : s.points) best = std::min(best, distance(x, p));
            return s.sign * best;
          },
          [&](const CustomField& c) { return c.eval(x); },
      },
      u.node());
}

BaseRay base_negative_gradient_ray(const BaseScalarField& u, const BasePoint& x) {
  require_same_dim(u.dim(), x.dim(), "base_negative_gradient_ray");
  return std::visit(
      Overloaded{
          [&](const BusemannField& b) { return BaseRay(x, b.direction); },
          [&](const MinOfFields& m) {
            std::size_t arg = 0;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < m.members.size(); ++k) {
              const double v = eval_base_field(m.members[k], x);
              if (v < best) {
                best = v;
                arg = k;
              }
            }
            return base_negative_gradient_ray(m.members[arg], x);
          },
          [&](const DistanceToSet& s) {
            if (s.sign > 0.0 || s.points.size() != 1) {
              throw Error(ErrorCode::UnsupportedField,
                          "no analytic descent ray for this distance field");
            }
            const BasePoint away = x - s.points.front();
            const double n = norm(away);
            if (n == 0.0) {
              std::vector<double> e(x.dim(), 0.0);
              e[0] = 1.0;
              return BaseRay(x, UnitVector(std::move(e)));
            }
            return BaseRay(x, UnitVector((1.0 / n) * away));
          },
          [&](const CustomField& c) {
            if (!c.ray) {
              throw Error(ErrorCode::UnsupportedField,
                          "custom field '" + c.name + "' has no ray generator");
            }
            return c.ray(x);
          },
      },
      u.node());
}

}  // namespace wvlab
