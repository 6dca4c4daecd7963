#include "opcalc/inftensor.hpp"

#include <cmath>

#include "opcalc/parallel.hpp"

namespace opcalc {

Vector apply_mode(const Vector& x, const std::vector<Index>& dims, Index j, const Operator& a) {
  Index pre = 1, post = 1;
  for (Index k = 0; k < j; ++k) pre *= dims[static_cast<std::size_t>(k)];
  for (std::size_t k = static_cast<std::size_t>(j) + 1; k < dims.size(); ++k) post *= dims[k];
  const Index dj = dims[static_cast<std::size_t>(j)];
  require(x.size() == pre * dj * post, ErrorCode::DimensionMismatch, "apply_mode: size mismatch");
  Vector y(x.size());
  for (Index p = 0; p < pre; ++p) {
    // The slab for fixed p is a dj x post block stored row-major.
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> in(
        x.data() + p * dj * post, dj, post);
    Eigen::Map<Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> out(
        y.data() + p * dj * post, dj, post);
    out.noalias() = a * in;
  }
  return y;
}

RestrictedProduct::RestrictedProduct(std::vector<ProductFactor> factors, RestrictedLimits limits)
    : factors_(std::move(factors)), limits_(limits) {
  require(!factors_.empty(), ErrorCode::InvalidArgument, "restricted product needs a factor");
  require(factor_count() <= limits_.max_factors, ErrorCode::CapacityExceeded,
          "restricted product limited to " + std::to_string(limits_.max_factors) + " factors");
  for (std::size_t j = 0; j < factors_.size(); ++j) {
    const auto& f = factors_[j];
    const Index d = f.family.hdim();
    const std::string tag = "factor " + std::to_string(j + 1);
    require(f.base_point >= 0 && f.base_point < f.family.points(), ErrorCode::InvalidArgument,
            tag + ": base point out of range");
    const double dev =
        (f.family.op(f.base_point) - Operator::Identity(d, d)).cwiseAbs().maxCoeff();
    require(dev <= f.family.tolerance(), ErrorCode::Validation,
            tag + ": operator at the base point is not the identity");
    require(f.fiducial.size() == d && std::abs(f.fiducial.norm() - 1.0) <= f.family.tolerance(),
            ErrorCode::InvalidArgument, tag + ": fiducial vector must be a unit vector");
    dims_.push_back(d);
    dim_ *= d;
    require(dim_ <= limits_.max_dim, ErrorCode::CapacityExceeded,
            "restricted product dimension exceeds " + std::to_string(limits_.max_dim));
  }
}

void RestrictedProduct::require_level(Index n) const {
  require(n >= 1 && n <= factor_count(), ErrorCode::InvalidArgument,
          "truncation level " + std::to_string(n) + " out of range 1.." +
              std::to_string(factor_count()));
}

Index RestrictedProduct::leading_dim(Index n) const {
  Index d = 1;
  for (Index k = 0; k < n; ++k) d *= dims_[static_cast<std::size_t>(k)];
  return d;
}

SpacePtr RestrictedProduct::level_space(Index n) const {
  require_level(n);
  SpacePtr s = factors_[0].family.space();
  for (Index k = 1; k < n; ++k) s = product_space(s, factors_[static_cast<std::size_t>(k)].family.space());
  const double work = static_cast<double>(s->size()) * static_cast<double>(dim_);
  require(work <= limits_.max_work, ErrorCode::CapacityExceeded,
          "truncation level " + std::to_string(n) + " is too large to integrate");
  return s;
}

Vector RestrictedProduct::embed(Index n, const Vector& x) const {
  require(n >= 0 && n <= factor_count(), ErrorCode::InvalidArgument, "embed: level out of range");
  require(x.size() == leading_dim(n), ErrorCode::DimensionMismatch, "embed: vector size mismatch");
  Vector out = x;
  for (Index k = n; k < factor_count(); ++k) out = kron(out, factors_[static_cast<std::size_t>(k)].fiducial);
  return out;
}

Operator RestrictedProduct::level_projector(Index n) const {
  require(n >= 0 && n <= factor_count(), ErrorCode::InvalidArgument,
          "projector: level out of range");
  const Index da = leading_dim(n);
  Operator p = Operator::Identity(da, da);
  for (Index k = n; k < factor_count(); ++k) {
    const Vector& w = factors_[static_cast<std::size_t>(k)].fiducial;
    p = kron(p, rank_one(w, w));
  }
  return p;
}

Vector RestrictedProduct::apply_point(const std::vector<Index>& point, const Vector& u,
                                      bool adjoint) const {
  require(static_cast<Index>(point.size()) == factor_count(), ErrorCode::InvalidArgument,
          "restricted point needs one index per factor");
  require(u.size() == dim_, ErrorCode::DimensionMismatch, "vector dimension mismatch");
  Vector x = u;
  for (std::size_t j = 0; j < point.size(); ++j) {
    const auto& f = factors_[j];
    if (point[j] == f.base_point) continue;
    require(point[j] >= 0 && point[j] < f.family.points(), ErrorCode::InvalidArgument,
            "restricted point index out of range");
    const Operator a = adjoint ? Operator(f.family.op(point[j]).adjoint()) : f.family.op(point[j]);
    x = apply_mode(x, dims_, static_cast<Index>(j), a);
  }
  return x;
}

std::vector<Index> RestrictedProduct::base_points() const {
  std::vector<Index> b;
  for (const auto& f : factors_) b.push_back(f.base_point);
  return b;
}

Vector RestrictedProduct::apply_level(Index n, Index point, const Vector& u) const {
  require_level(n);
  std::vector<Index> full = base_points();
  Index rest = point;
  for (Index k = n; k-- > 0;) {
    const Index np = factors_[static_cast<std::size_t>(k)].family.points();
    full[static_cast<std::size_t>(k)] = rest % np;
    rest /= np;
  }
  require(rest == 0, ErrorCode::InvalidArgument, "level point out of range");
  return apply_point(full, u);
}

namespace {

Vector level_coefficients(const RestrictedProduct& rp, Index n, const SpacePtr& space,
                          const Vector& u, const Vector& v) {
  Vector vals(space->size());
  parallel_for(static_cast<std::size_t>(space->size()), [&](std::size_t s) {
    vals(static_cast<Index>(s)) = inner(rp.apply_level(n, static_cast<Index>(s), u), v);
  });
  return vals;
}

}  // namespace

double sq_defect(const RestrictedProduct& rp, Index n, const Vector& u, const Vector& v) {
  const SpacePtr space = rp.level_space(n);
  const Vector c = level_coefficients(rp, n, space, u, v);
  const double integral = (space->weights().array() * c.array().abs2()).sum();
  return std::abs(integral - u.squaredNorm() * v.squaredNorm());
}

LevelOverlap level_overlap(const RestrictedProduct& rp, Index n, Index m, const Vector& u1,
                           const Vector& v1, const Vector& u2, const Vector& v2) {
  const SpacePtr space = rp.level_space(n);
  const Operator p = rp.level_projector(m);
  const Vector pv1 = p * v1, pv2 = p * v2;
  const Vector a = level_coefficients(rp, n, space, u1, pv1);
  const Vector b = level_coefficients(rp, n, space, u2, pv2);
  LevelOverlap out;
  out.value = (space->weights().array() * (a.array() * b.array().conjugate()).abs()).sum();
  out.bound = u1.norm() * pv1.norm() * u2.norm() * pv2.norm();
  return out;
}

Operator berezin_truncated(const RestrictedProduct& rp, Index n, const Vector& u, const Symbol& f) {
  const SpacePtr space = rp.level_space(n);
  require(f.space() != nullptr, ErrorCode::InvalidArgument, "empty symbol");
  require_same_space(*space, *f.space());
  require(u.size() == rp.dim(), ErrorCode::DimensionMismatch, "vector dimension mismatch");
  const Index np = space->size();
  Operator orbit(rp.dim(), np);
  parallel_for(static_cast<std::size_t>(np), [&](std::size_t s) {
    orbit.col(static_cast<Index>(s)) = rp.apply_level(n, static_cast<Index>(s), u);
  });
  const Vector wf = space->weights().cast<Complex>().cwiseProduct(f.values());
  return orbit * wf.asDiagonal() * orbit.adjoint();
}

Complex frame_kernel_inf(const RestrictedProduct& rp, const Vector& w, const std::vector<Index>& s,
                         const std::vector<Index>& t) {
  const Vector ws = rp.apply_point(s, w, true);
  const Vector wt = rp.apply_point(t, w, true);
  return inner(wt, ws);
}

OperatorFamily adjoint_family(const OperatorFamily& fam) {
  std::vector<Operator> ops;
  ops.reserve(static_cast<std::size_t>(fam.points()));
  for (Index s = 0; s < fam.points(); ++s) ops.push_back(fam.op(s).adjoint());
  return OperatorFamily::from_matrices("adj(" + fam.name() + ")", fam.space(), std::move(ops),
                                       fam.exactness(), fam.tolerance());
}

}  // namespace opcalc
