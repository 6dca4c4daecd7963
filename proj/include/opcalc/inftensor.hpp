#pragma once

#include <vector>

#include "opcalc/family.hpp"

namespace opcalc {

struct ProductFactor {
  OperatorFamily family;
  Index base_point = 0;  // pi(base_point) = identity
  Vector fiducial;       // unit vector w_j
};

struct RestrictedLimits {
  Index max_factors = 12;
  Index max_dim = 4096;
  /// Bound on points * dim at a truncation level.
  double max_work = 2.0e8;
};

/// Finite stage J of a restricted tensor product. Vectors of the full space
/// use Kronecker order with the first factor most significant.
class RestrictedProduct {
 public:
  RestrictedProduct(std::vector<ProductFactor> factors, RestrictedLimits limits = {});

  Index factor_count() const { return static_cast<Index>(factors_.size()); }
  const ProductFactor& factor(Index j) const { return factors_.at(static_cast<std::size_t>(j)); }
  Index dim() const { return dim_; }
  /// Product of the first n factor dimensions.
  Index leading_dim(Index n) const;

  /// Product of the first n factor spaces.
  SpacePtr level_space(Index n) const;
  /// x -> x (x) w_{n+1} (x) ... (x) w_J.
  Vector embed(Index n, const Vector& x) const;
  /// Orthogonal projection onto the range of embed(n, .).
  Operator level_projector(Index n) const;
  /// pi of theta^(n)(s) applied to u, for a point s of level_space(n).
  Vector apply_level(Index n, Index point, const Vector& u) const;
  /// pi applied to u at a restricted point given by one index per factor.
  Vector apply_point(const std::vector<Index>& point, const Vector& u, bool adjoint = false) const;
  std::vector<Index> base_points() const;

 private:
  void require_level(Index n) const;

  std::vector<ProductFactor> factors_;
  std::vector<Index> dims_;
  Index dim_ = 1;
  RestrictedLimits limits_;
};

/// |int |<pi(theta s) u, v>|^2 dmu^(n) - |u|^2 |v|^2|.
double sq_defect(const RestrictedProduct& rp, Index n, const Vector& u, const Vector& v);

/// int |<pi u1, P v1><P v2, pi u2>| dmu^(n) with P the level-m projector,
/// together with the product of norms bounding it.
struct LevelOverlap {
  double value = 0.0;
  double bound = 0.0;
};
LevelOverlap level_overlap(const RestrictedProduct& rp, Index n, Index m, const Vector& u1,
                           const Vector& v1, const Vector& u2, const Vector& v2);

/// sum_s w_s f(s) lambda_{pi(theta s) u, pi(theta s) u} on the full space.
Operator berezin_truncated(const RestrictedProduct& rp, Index n, const Vector& u, const Symbol& f);

/// <w(t), w(s)> with w(s) = pi(s)* w at restricted points.
Complex frame_kernel_inf(const RestrictedProduct& rp, const Vector& w, const std::vector<Index>& s,
                         const std::vector<Index>& t);

/// The family of adjoints s -> pi(s)*.
OperatorFamily adjoint_family(const OperatorFamily& fam);

/// Applies a factor operator to mode j of a Kronecker-ordered vector.
Vector apply_mode(const Vector& x, const std::vector<Index>& dims, Index j, const Operator& a);

}  // namespace opcalc
