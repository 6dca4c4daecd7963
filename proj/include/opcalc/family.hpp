#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "opcalc/core.hpp"

namespace opcalc {

/// Produces the operator attached to each point. Sources that can act on a
/// vector faster than by forming the matrix override apply/apply_adjoint.
class OperatorSource {
 public:
  virtual ~OperatorSource() = default;
  virtual Index dim() const = 0;
  virtual Operator op(Index point) const = 0;
  virtual Vector apply(Index point, const Vector& u) const { return op(point) * u; }
  virtual Vector apply_adjoint(Index point, const Vector& u) const {
    return op(point).adjoint() * u;
  }
};

enum class Exactness { Exact, Approximate };

class OperatorFamily {
 public:
  OperatorFamily() = default;
  OperatorFamily(std::string name, SpacePtr space, std::shared_ptr<const OperatorSource> source,
                 Exactness exactness = Exactness::Exact, double tolerance = kDefaultTolerance);

  static OperatorFamily from_matrices(std::string name, SpacePtr space, std::vector<Operator> ops,
                                      Exactness exactness = Exactness::Exact,
                                      double tolerance = kDefaultTolerance);

  const std::string& name() const noexcept { return name_; }
  const SpacePtr& space() const noexcept { return space_; }
  Index points() const { return space_->size(); }
  Index hdim() const { return source_->dim(); }
  Exactness exactness() const noexcept { return exactness_; }
  bool exact() const noexcept { return exactness_ == Exactness::Exact; }
  /// Residual tolerance for identities on this family.
  double tolerance() const noexcept { return tol_; }

  Operator op(Index point) const;
  Vector apply(Index point, const Vector& u) const;
  Vector apply_adjoint(Index point, const Vector& u) const;

  const std::shared_ptr<const OperatorSource>& source() const noexcept { return source_; }

  OperatorFamily with_tolerance(double tol) const;

 private:
  std::string name_;
  SpacePtr space_;
  std::shared_ptr<const OperatorSource> source_;
  Exactness exactness_ = Exactness::Exact;
  double tol_ = kDefaultTolerance;
};

/// phi_{u,v}(s) = <pi(s) u, v>.
Symbol coefficient(const OperatorFamily& fam, const Vector& u, const Vector& v);

/// Points x hdim^2 matrix whose column i + hdim*j is phi_{e_i, e_j}.
Operator coefficient_matrix(const OperatorFamily& fam);

struct Quadruple {
  Vector u1, v1, u2, v2;
};

struct SqResidual {
  std::string label;
  double residual = 0.0;
};

struct SqReport {
  double max_deviation = 0.0;
  Index tested_pairs = 0;
  bool pass = false;
  double tolerance = 0.0;
  bool sampled = false;
  std::vector<SqResidual> residuals;
};

struct SqOptions {
  std::optional<double> tol;
  /// Above this dimension random unit quadruples replace basis quadruples.
  Index basis_limit = 8;
  Index random_trials = 200;
  std::uint64_t seed = 0;
};

/// Residual of int <pi u1, v1> conj<pi u2, v2> dmu = <u1,u2><v2,v1> over all
/// basis quadruples, or seeded random unit quadruples for large hdim.
SqReport verify_sq(const OperatorFamily& fam, const SqOptions& options = {});

/// Same residual on caller-supplied quadruples.
SqReport verify_sq_on(const OperatorFamily& fam, const std::vector<Quadruple>& quads,
                      std::optional<double> tol = std::nullopt);

/// Dimension of the set of operators commuting with every pi(s).
Index commutant_dim(const OperatorFamily& fam, double tol = 1e-9);

/// True iff the span of the columns of basis is invariant under every pi(s).
/// A matrix with zero columns stands for the zero subspace.
bool invariant_subspace_check(const OperatorFamily& fam, const Operator& basis,
                              std::optional<double> tol = std::nullopt);

/// Kronecker family on the product space.
OperatorFamily tensor(const OperatorFamily& a, const OperatorFamily& b);

/// One point of weight 1 carrying the identity on C^k.
OperatorFamily identity_family(Index k);

/// pi_0 (x) id_K: the multiplicity family.
OperatorFamily multiplicity(const OperatorFamily& fam, Index k);

/// Block-diagonal sum of families defined on one shared space.
OperatorFamily direct_sum_shared(const std::vector<OperatorFamily>& parts);

/// Block-diagonal sum over the product of the part spaces; pi(s1, s2) acts
/// by pi1(s1) on the first block and pi2(s2) on the second.
OperatorFamily direct_sum_product(const OperatorFamily& a, const OperatorFamily& b);

/// Pulls a family back along an isometry. point_map sends each point of the
/// source family's space to a point of target_space.
OperatorFamily compress(const OperatorFamily& source, const std::vector<Index>& point_map,
                        const SpacePtr& target_space, const Operator& iota,
                        std::optional<double> tol = std::nullopt);

struct OverlapReport {
  double value = 0.0;
  double bound = 0.0;
  bool within = false;
};

/// int |<pi u1,v1><v2,pi u2>| dmu for the direct sum of the given families,
/// against the product of the four norms.
OverlapReport bounded_overlap_check(const std::vector<OperatorFamily>& parts, const Quadruple& q);

/// Index of a point whose operator is the identity, if any.
std::optional<Index> identity_point(const OperatorFamily& fam, double tol = 1e-12);

}  // namespace opcalc
