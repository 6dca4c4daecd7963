#include "opcalc/core.hpp"

#include <cmath>
#include <unordered_set>

namespace opcalc {

MeasureSpace::MeasureSpace(std::string id, std::vector<std::string> labels, RealVector weights,
                           MeasureKind kind, std::optional<double> quadrature_tol)
    : id_(std::move(id)),
      labels_(std::move(labels)),
      weights_(std::move(weights)),
      kind_(kind),
      quad_tol_(quadrature_tol) {
  require(static_cast<Index>(labels_.size()) == weights_.size(), ErrorCode::InvalidArgument,
          "measure space '" + id_ + "': label count differs from weight count");
  require(weights_.size() > 0, ErrorCode::InvalidArgument,
          "measure space '" + id_ + "' has no points");
  for (Index i = 0; i < weights_.size(); ++i) {
    require(std::isfinite(weights_(i)) && weights_(i) > 0.0, ErrorCode::InvalidArgument,
            "measure space '" + id_ + "': weight of point " + labels_[i] + " is not positive");
  }
  std::unordered_set<std::string> seen;
  for (const auto& l : labels_) {
    require(seen.insert(l).second, ErrorCode::InvalidArgument,
            "measure space '" + id_ + "': duplicate point label " + l);
  }
  if (kind_ == MeasureKind::Quadrature) {
    require(quad_tol_.has_value() && *quad_tol_ > 0.0, ErrorCode::InvalidArgument,
            "quadrature space '" + id_ + "' needs a declared positive tolerance");
  }
}

SpacePtr MeasureSpace::make(std::string id, std::vector<std::string> labels, RealVector weights,
                            MeasureKind kind, std::optional<double> quadrature_tol) {
  return std::make_shared<const MeasureSpace>(std::move(id), std::move(labels), std::move(weights),
                                              kind, quadrature_tol);
}

SpacePtr MeasureSpace::uniform(std::string id, Index n, double weight) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return make(std::move(id), std::move(labels), RealVector::Constant(n, weight));
}

std::vector<Index> MeasureSpace::split(Index point) const {
  if (factors_.empty()) return {point};
  std::vector<Index> out(factors_.size());
  for (std::size_t k = factors_.size(); k-- > 0;) {
    const Index n = factors_[k]->size();
    out[k] = point % n;
    point /= n;
  }
  return out;
}

Index MeasureSpace::join(const std::vector<Index>& factor_points) const {
  if (factors_.empty()) {
    require(factor_points.size() == 1, ErrorCode::InvalidArgument, "join: expected one index");
    return factor_points[0];
  }
  require(factor_points.size() == factors_.size(), ErrorCode::InvalidArgument,
          "join: factor count mismatch");
  Index p = 0;
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    require(factor_points[k] >= 0 && factor_points[k] < factors_[k]->size(),
            ErrorCode::InvalidArgument, "join: factor index out of range");
    p = p * factors_[k]->size() + factor_points[k];
  }
  return p;
}

bool MeasureSpace::same_as(const MeasureSpace& other) const {
  if (this == &other) return true;
  if (size() != other.size() || labels_ != other.labels_) return false;
  for (Index i = 0; i < size(); ++i) {
    const double a = weights_(i), b = other.weights_(i);
    if (std::abs(a - b) > 1e-14 * std::max(std::abs(a), std::abs(b))) return false;
  }
  return true;
}

SpacePtr product_space(const SpacePtr& a, const SpacePtr& b) {
  require(a && b, ErrorCode::InvalidArgument, "product_space: null factor");
  const Index na = a->size(), nb = b->size();
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(na * nb));
  RealVector w(na * nb);
  for (Index i = 0; i < na; ++i) {
    for (Index j = 0; j < nb; ++j) {
      labels.push_back(a->labels()[i] + "|" + b->labels()[j]);
      w(i * nb + j) = a->weight(i) * b->weight(j);
    }
  }
  const bool quad = a->kind() == MeasureKind::Quadrature || b->kind() == MeasureKind::Quadrature;
  std::optional<double> tol;
  if (quad) tol = std::max(a->quadrature_tolerance().value_or(0.0), b->quadrature_tolerance().value_or(0.0));
  auto out = std::make_shared<MeasureSpace>(a->id() + "*" + b->id(), std::move(labels), std::move(w),
                                            quad ? MeasureKind::Quadrature : MeasureKind::Exact, tol);
  auto flatten = [&](const SpacePtr& s) {
    if (s->factors().empty()) {
      out->factors_.push_back(s);
    } else {
      for (const auto& f : s->factors()) out->factors_.push_back(f);
    }
  };
  flatten(a);
  flatten(b);
  return out;
}

Symbol::Symbol(SpacePtr space, Vector values) : space_(std::move(space)), values_(std::move(values)) {
  require(space_ != nullptr, ErrorCode::InvalidArgument, "symbol without a measure space");
  require(values_.size() == space_->size(), ErrorCode::DimensionMismatch,
          "symbol has " + std::to_string(values_.size()) + " values but space '" + space_->id() +
              "' has " + std::to_string(space_->size()) + " points");
}

Symbol Symbol::zero(SpacePtr space) {
  const Index n = space->size();
  return {std::move(space), Vector::Zero(n)};
}

Symbol Symbol::constant(SpacePtr space, Complex c) {
  const Index n = space->size();
  return {std::move(space), Vector::Constant(n, c)};
}

Symbol Symbol::indicator(SpacePtr space, Index point) {
  Vector v = Vector::Zero(space->size());
  v(point) = 1.0;
  return {std::move(space), std::move(v)};
}

void require_same_space(const MeasureSpace& a, const MeasureSpace& b) {
  require(a.same_as(b), ErrorCode::SpaceMismatch,
          "measure space mismatch: '" + a.id() + "' vs '" + b.id() + "'");
}

void require_same_space(const Symbol& a, const Symbol& b) {
  require(a.space() && b.space(), ErrorCode::InvalidArgument, "empty symbol");
  require_same_space(*a.space(), *b.space());
}

Symbol operator+(const Symbol& a, const Symbol& b) {
  require_same_space(a, b);
  return {a.space_, a.values_ + b.values_};
}

Symbol operator-(const Symbol& a, const Symbol& b) {
  require_same_space(a, b);
  return {a.space_, a.values_ - b.values_};
}

Symbol operator*(Complex c, const Symbol& a) { return {a.space_, c * a.values_}; }

Complex integrate(const Symbol& f) {
  require(f.space() != nullptr, ErrorCode::InvalidArgument, "integrate: empty symbol");
  return (f.space()->weights().cast<Complex>().array() * f.values().array()).sum();
}

Complex l2_inner(const Symbol& f, const Symbol& g) {
  require_same_space(f, g);
  return (f.space()->weights().cast<Complex>().array() * f.values().array() *
          g.values().array().conjugate())
      .sum();
}

double l2_norm(const Symbol& f) {
  return std::sqrt((f.space()->weights().array() * f.values().array().abs2()).sum());
}

Complex inner(const Vector& u, const Vector& v) {
  require(u.size() == v.size(), ErrorCode::DimensionMismatch, "inner: dimension mismatch");
  return v.dot(u);  // Eigen's dot conjugates its receiver
}

static void require_same_dims(const Operator& s, const Operator& t, const char* what) {
  require(s.rows() == t.rows() && s.cols() == t.cols(), ErrorCode::DimensionMismatch,
          std::string(what) + ": dimension mismatch");
}

Complex hs_inner(const Operator& s, const Operator& t) {
  require_same_dims(s, t, "hs_inner");
  return (s.array() * t.array().conjugate()).sum();
}

Complex trace(const Operator& t) {
  require(t.rows() == t.cols(), ErrorCode::DimensionMismatch, "trace of a non-square matrix");
  return t.trace();
}

double op_norm(const Operator& t) {
  if (t.size() == 0) return 0.0;
  Eigen::BDCSVD<Operator> svd(t);
  return svd.singularValues()(0);
}

double trace_norm(const Operator& t) {
  if (t.size() == 0) return 0.0;
  Eigen::BDCSVD<Operator> svd(t);
  return svd.singularValues().sum();
}

double hs_norm(const Operator& t) { return t.norm(); }

Operator rank_one(const Vector& u, const Vector& v) {
  require(u.size() == v.size(), ErrorCode::DimensionMismatch, "rank_one: dimension mismatch");
  return u * v.adjoint();
}

Operator kron(const Operator& a, const Operator& b) {
  Operator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

Vector basis_vector(Index dim, Index i) {
  Vector e = Vector::Zero(dim);
  e(i) = 1.0;
  return e;
}

bool all_finite(const Operator& t) { return t.allFinite(); }

}  // namespace opcalc
