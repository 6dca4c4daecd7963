#pragma once

// Measure spaces realized as finitely many weighted points, symbols on them,
// and dense operators on finite-dimensional Hilbert spaces.

#include <Eigen/Dense>

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "opcalc/error.hpp"

namespace opcalc {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Operator = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Absolute tolerance on identity residuals for exact backends.
inline constexpr double kDefaultTolerance = 1e-10;

enum class MeasureKind { Exact, Quadrature };

class MeasureSpace;
using SpacePtr = std::shared_ptr<const MeasureSpace>;

/// Finite measure space: ordered point labels with strictly positive weights.
/// Quadrature spaces stand in for a continuous space and carry the accuracy
/// of the underlying rule. Product spaces remember their factors so that a
/// point index can be split back into factor indices (row-major, last factor
/// fastest).
class MeasureSpace {
 public:
  MeasureSpace(std::string id, std::vector<std::string> labels, RealVector weights,
               MeasureKind kind = MeasureKind::Exact,
               std::optional<double> quadrature_tol = std::nullopt);

  static SpacePtr make(std::string id, std::vector<std::string> labels, RealVector weights,
                       MeasureKind kind = MeasureKind::Exact,
                       std::optional<double> quadrature_tol = std::nullopt);

  /// Uniform weights with labels "0", "1", ...
  static SpacePtr uniform(std::string id, Index n, double weight);

  const std::string& id() const noexcept { return id_; }
  Index size() const noexcept { return weights_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const RealVector& weights() const noexcept { return weights_; }
  double weight(Index i) const { return weights_(i); }
  double total_mass() const { return weights_.sum(); }
  MeasureKind kind() const noexcept { return kind_; }
  std::optional<double> quadrature_tolerance() const noexcept { return quad_tol_; }

  const std::vector<SpacePtr>& factors() const noexcept { return factors_; }
  /// Factor indices of a point of a product space.
  std::vector<Index> split(Index point) const;
  /// Inverse of split.
  Index join(const std::vector<Index>& factor_points) const;

  /// Same labels and weights (to 1e-14 relative).
  bool same_as(const MeasureSpace& other) const;

 private:
  friend SpacePtr product_space(const SpacePtr& a, const SpacePtr& b);

  std::string id_;
  std::vector<std::string> labels_;
  RealVector weights_;
  MeasureKind kind_;
  std::optional<double> quad_tol_;
  std::vector<SpacePtr> factors_;
};

/// Cartesian product with product weights. Factors of factors are flattened,
/// so product_space(product_space(a, b), c) splits into three indices.
SpacePtr product_space(const SpacePtr& a, const SpacePtr& b);

/// Complex function on the points of a measure space.
class Symbol {
 public:
  Symbol() = default;
  Symbol(SpacePtr space, Vector values);

  static Symbol zero(SpacePtr space);
  static Symbol constant(SpacePtr space, Complex c);
  static Symbol indicator(SpacePtr space, Index point);

  const SpacePtr& space() const noexcept { return space_; }
  const Vector& values() const noexcept { return values_; }
  Vector& values() noexcept { return values_; }
  Index size() const noexcept { return values_.size(); }
  Complex operator()(Index i) const { return values_(i); }

  Symbol conj() const { return {space_, values_.conjugate()}; }

  friend Symbol operator+(const Symbol& a, const Symbol& b);
  friend Symbol operator-(const Symbol& a, const Symbol& b);
  friend Symbol operator*(Complex c, const Symbol& a);

 private:
  SpacePtr space_;
  Vector values_;
};

void require_same_space(const MeasureSpace& a, const MeasureSpace& b);
void require_same_space(const Symbol& a, const Symbol& b);

/// Weighted sum of the values.
Complex integrate(const Symbol& f);

/// <f, g> = sum_s w_s f(s) conj(g(s)).
Complex l2_inner(const Symbol& f, const Symbol& g);
double l2_norm(const Symbol& f);

/// Hilbert space inner product, linear in the first slot.
Complex inner(const Vector& u, const Vector& v);

/// <S, T> = Tr(S T*).
Complex hs_inner(const Operator& s, const Operator& t);
Complex trace(const Operator& t);
double op_norm(const Operator& t);
double trace_norm(const Operator& t);
double hs_norm(const Operator& t);

/// lambda_{u,v} = <., v> u, i.e. entries u_i conj(v_j).
Operator rank_one(const Vector& u, const Vector& v);

/// Kronecker products with the first factor most significant.
Operator kron(const Operator& a, const Operator& b);
Vector kron(const Vector& a, const Vector& b);

Vector basis_vector(Index dim, Index i);

bool all_finite(const Operator& t);

}  // namespace opcalc
