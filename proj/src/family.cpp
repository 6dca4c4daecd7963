#include "opcalc/family.hpp"

#include <cmath>
#include <cstdio>

#include "opcalc/parallel.hpp"
#include "opcalc/random.hpp"

namespace opcalc {

namespace {

class MatrixSource : public OperatorSource {
 public:
  MatrixSource(Index dim, std::vector<Operator> ops) : dim_(dim), ops_(std::move(ops)) {}
  Index dim() const override { return dim_; }
  Operator op(Index point) const override { return ops_.at(static_cast<std::size_t>(point)); }
  Vector apply(Index point, const Vector& u) const override {
    return ops_[static_cast<std::size_t>(point)] * u;
  }
  Vector apply_adjoint(Index point, const Vector& u) const override {
    return ops_[static_cast<std::size_t>(point)].adjoint() * u;
  }

 private:
  Index dim_;
  std::vector<Operator> ops_;
};

class KroneckerSource : public OperatorSource {
 public:
  KroneckerSource(OperatorFamily a, OperatorFamily b) : a_(std::move(a)), b_(std::move(b)) {}
  Index dim() const override { return a_.hdim() * b_.hdim(); }
  Operator op(Index point) const override {
    const Index nb = b_.points();
    return kron(a_.op(point / nb), b_.op(point % nb));
  }

 private:
  OperatorFamily a_, b_;
};

std::string quad_label(Index i, Index j, Index k, Index l) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "e%td,e%td;e%td,e%td", i, j, k, l);
  return buf;
}

}  // namespace

OperatorFamily::OperatorFamily(std::string name, SpacePtr space,
                               std::shared_ptr<const OperatorSource> source, Exactness exactness,
                               double tolerance)
    : name_(std::move(name)),
      space_(std::move(space)),
      source_(std::move(source)),
      exactness_(exactness),
      tol_(tolerance) {
  require(space_ != nullptr && source_ != nullptr, ErrorCode::InvalidArgument,
          "family '" + name_ + "' needs a space and an operator source");
  require(source_->dim() > 0, ErrorCode::InvalidArgument,
          "family '" + name_ + "' has a zero-dimensional Hilbert space");
  require(tol_ > 0.0, ErrorCode::InvalidArgument, "family tolerance must be positive");
}

OperatorFamily OperatorFamily::from_matrices(std::string name, SpacePtr space,
                                             std::vector<Operator> ops, Exactness exactness,
                                             double tolerance) {
  require(space != nullptr, ErrorCode::InvalidArgument, "family without a space");
  require(static_cast<Index>(ops.size()) == space->size(), ErrorCode::DimensionMismatch,
          "family '" + name + "': " + std::to_string(ops.size()) + " operators for " +
              std::to_string(space->size()) + " points");
  const Index d = ops.front().rows();
  for (std::size_t s = 0; s < ops.size(); ++s) {
    require(ops[s].rows() == d && ops[s].cols() == d, ErrorCode::DimensionMismatch,
            "family '" + name + "': operator at point " + std::to_string(s) +
                " has the wrong shape");
    require(ops[s].allFinite(), ErrorCode::InvalidArgument,
            "family '" + name + "': operator at point " + std::to_string(s) +
                " has non-finite entries");
  }
  auto src = std::make_shared<MatrixSource>(d, std::move(ops));
  return {std::move(name), std::move(space), std::move(src), exactness, tolerance};
}

Operator OperatorFamily::op(Index point) const {
  require(point >= 0 && point < points(), ErrorCode::InvalidArgument, "point index out of range");
  return source_->op(point);
}

Vector OperatorFamily::apply(Index point, const Vector& u) const {
  require(u.size() == hdim(), ErrorCode::DimensionMismatch, "vector dimension differs from hdim");
  return source_->apply(point, u);
}

Vector OperatorFamily::apply_adjoint(Index point, const Vector& u) const {
  require(u.size() == hdim(), ErrorCode::DimensionMismatch, "vector dimension differs from hdim");
  return source_->apply_adjoint(point, u);
}

OperatorFamily OperatorFamily::with_tolerance(double tol) const {
  OperatorFamily out = *this;
  require(tol > 0.0, ErrorCode::InvalidArgument, "tolerance must be positive");
  out.tol_ = tol;
  return out;
}

Symbol coefficient(const OperatorFamily& fam, const Vector& u, const Vector& v) {
  require(u.size() == fam.hdim() && v.size() == fam.hdim(), ErrorCode::DimensionMismatch,
          "coefficient: vectors must have dimension " + std::to_string(fam.hdim()));
  Vector vals(fam.points());
  parallel_for(static_cast<std::size_t>(fam.points()), [&](std::size_t s) {
    vals(static_cast<Index>(s)) = inner(fam.apply(static_cast<Index>(s), u), v);
  });
  return {fam.space(), std::move(vals)};
}

Operator coefficient_matrix(const OperatorFamily& fam) {
  const Index d = fam.hdim();
  Operator c(fam.points(), d * d);
  parallel_for(static_cast<std::size_t>(fam.points()), [&](std::size_t sp) {
    const Index s = static_cast<Index>(sp);
    const Operator p = fam.op(s);
    for (Index j = 0; j < d; ++j)
      for (Index i = 0; i < d; ++i) c(s, i + d * j) = p(j, i);
  });
  return c;
}

static double sq_tol(const OperatorFamily& fam, std::optional<double> tol) {
  return tol.value_or(fam.tolerance());
}

SqReport verify_sq_on(const OperatorFamily& fam, const std::vector<Quadruple>& quads,
                      std::optional<double> tol) {
  SqReport rep;
  rep.tolerance = sq_tol(fam, tol);
  rep.sampled = true;
  rep.residuals.resize(quads.size());
  parallel_for(quads.size(), [&](std::size_t k) {
    const auto& q = quads[k];
    const Symbol a = coefficient(fam, q.u1, q.v1);
    const Symbol b = coefficient(fam, q.u2, q.v2);
    const Complex lhs = l2_inner(a, b);
    const Complex rhs = inner(q.u1, q.u2) * inner(q.v2, q.v1);
    rep.residuals[k] = {"quad" + std::to_string(k), std::abs(lhs - rhs)};
  });
  for (const auto& r : rep.residuals) rep.max_deviation = std::max(rep.max_deviation, r.residual);
  rep.tested_pairs = static_cast<Index>(quads.size());
  rep.pass = rep.max_deviation <= rep.tolerance;
  return rep;
}

SqReport verify_sq(const OperatorFamily& fam, const SqOptions& options) {
  const Index d = fam.hdim();
  if (d > options.basis_limit) {
    Rng rng(options.seed);
    std::vector<Quadruple> quads;
    quads.reserve(static_cast<std::size_t>(options.random_trials));
    for (Index t = 0; t < options.random_trials; ++t) {
      Quadruple q;
      q.u1 = rng.unit_vector(d);
      q.v1 = rng.unit_vector(d);
      q.u2 = rng.unit_vector(d);
      q.v2 = rng.unit_vector(d);
      quads.push_back(std::move(q));
    }
    return verify_sq_on(fam, quads, options.tol);
  }
  const Operator c = coefficient_matrix(fam);
  const Operator gram = c.adjoint() * fam.space()->weights().cast<Complex>().asDiagonal() * c;
  SqReport rep;
  rep.tolerance = sq_tol(fam, options.tol);
  rep.residuals.reserve(static_cast<std::size_t>(d * d * d * d));
  // gram(a, b) = <phi_b, phi_a>; b indexes (u1, v1), a indexes (u2, v2).
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      for (Index k = 0; k < d; ++k)
        for (Index l = 0; l < d; ++l) {
          const Complex expect = (i == k && j == l) ? 1.0 : 0.0;
          const double r = std::abs(gram(k + d * l, i + d * j) - expect);
          rep.residuals.push_back({quad_label(i, j, k, l), r});
          rep.max_deviation = std::max(rep.max_deviation, r);
        }
  rep.tested_pairs = d * d * d * d;
  rep.pass = rep.max_deviation <= rep.tolerance;
  return rep;
}

Index commutant_dim(const OperatorFamily& fam, double tol) {
  const Index d = fam.hdim();
  require(d <= 16, ErrorCode::CapacityExceeded,
          "commutant_dim is limited to hdim <= 16 (got " + std::to_string(d) + ")");
  const Index n = d * d;
  const Operator id = Operator::Identity(d, d);
  Operator gram = Operator::Zero(n, n);
  for (Index s = 0; s < fam.points(); ++s) {
    const Operator p = fam.op(s);
    const Operator k = kron(p.transpose(), id) - kron(id, p);
    gram += fam.space()->weight(s) * (k.adjoint() * k);
  }
  Eigen::SelfAdjointEigenSolver<Operator> es(gram, Eigen::EigenvaluesOnly);
  const RealVector ev = es.eigenvalues();
  const double cut = tol * std::max(1.0, ev.maxCoeff());
  Index count = 0;
  for (Index i = 0; i < ev.size(); ++i)
    if (ev(i) <= cut) ++count;
  return count;
}

bool invariant_subspace_check(const OperatorFamily& fam, const Operator& basis,
                              std::optional<double> tol) {
  const double t = sq_tol(fam, tol);
  if (basis.cols() == 0) return true;
  require(basis.rows() == fam.hdim(), ErrorCode::DimensionMismatch,
          "candidate basis has the wrong row count");
  Eigen::ColPivHouseholderQR<Operator> qr(basis);
  qr.setThreshold(1e-10);
  require(qr.rank() == basis.cols(), ErrorCode::InvalidArgument,
          "candidate basis vectors are linearly dependent");
  const Operator q = qr.householderQ() * Operator::Identity(basis.rows(), basis.cols());
  const Operator proj_out = Operator::Identity(fam.hdim(), fam.hdim()) - q * q.adjoint();
  for (Index s = 0; s < fam.points(); ++s) {
    if ((proj_out * fam.op(s) * q).norm() > t) return false;
  }
  return true;
}

OperatorFamily tensor(const OperatorFamily& a, const OperatorFamily& b) {
  const bool exact = a.exact() && b.exact();
  const double tol = std::max(a.tolerance(), b.tolerance());
  return {a.name() + "*" + b.name(), product_space(a.space(), b.space()),
          std::make_shared<KroneckerSource>(a, b),
          exact ? Exactness::Exact : Exactness::Approximate, tol};
}

OperatorFamily identity_family(Index k) {
  require(k >= 1, ErrorCode::InvalidArgument, "identity family needs k >= 1");
  return OperatorFamily::from_matrices("id" + std::to_string(k), MeasureSpace::uniform("pt", 1, 1.0),
                                       {Operator::Identity(k, k)});
}

OperatorFamily multiplicity(const OperatorFamily& fam, Index k) {
  return tensor(fam, identity_family(k));
}

OperatorFamily direct_sum_shared(const std::vector<OperatorFamily>& parts) {
  require(!parts.empty(), ErrorCode::InvalidArgument, "direct sum of no families");
  Index total = 0;
  bool exact = true;
  double tol = 0.0;
  std::string name = "sum(";
  for (const auto& p : parts) {
    require_same_space(*parts.front().space(), *p.space());
    total += p.hdim();
    exact = exact && p.exact();
    tol = std::max(tol, p.tolerance());
    name += (name.back() == '(' ? "" : ",") + p.name();
  }
  name += ")";
  std::vector<Operator> ops;
  ops.reserve(static_cast<std::size_t>(parts.front().points()));
  for (Index s = 0; s < parts.front().points(); ++s) {
    Operator m = Operator::Zero(total, total);
    Index off = 0;
    for (const auto& p : parts) {
      m.block(off, off, p.hdim(), p.hdim()) = p.op(s);
      off += p.hdim();
    }
    ops.push_back(std::move(m));
  }
  return OperatorFamily::from_matrices(name, parts.front().space(), std::move(ops),
                                       exact ? Exactness::Exact : Exactness::Approximate, tol);
}

OperatorFamily direct_sum_product(const OperatorFamily& a, const OperatorFamily& b) {
  const SpacePtr space = product_space(a.space(), b.space());
  const Index da = a.hdim(), db = b.hdim(), nb = b.points();
  std::vector<Operator> ops;
  ops.reserve(static_cast<std::size_t>(space->size()));
  for (Index s = 0; s < space->size(); ++s) {
    Operator m = Operator::Zero(da + db, da + db);
    m.topLeftCorner(da, da) = a.op(s / nb);
    m.bottomRightCorner(db, db) = b.op(s % nb);
    ops.push_back(std::move(m));
  }
  const bool exact = a.exact() && b.exact();
  return OperatorFamily::from_matrices(a.name() + "+" + b.name(), space, std::move(ops),
                                       exact ? Exactness::Exact : Exactness::Approximate,
                                       std::max(a.tolerance(), b.tolerance()));
}

OperatorFamily compress(const OperatorFamily& source, const std::vector<Index>& point_map,
                        const SpacePtr& target_space, const Operator& iota,
                        std::optional<double> tol) {
  const double t = sq_tol(source, tol);
  require(target_space != nullptr, ErrorCode::InvalidArgument, "compress: null target space");
  require(static_cast<Index>(point_map.size()) == source.points(), ErrorCode::DimensionMismatch,
          "compress: point map must cover every source point");
  require(iota.rows() == source.hdim() && iota.cols() >= 1, ErrorCode::DimensionMismatch,
          "compress: isometry must map into the source Hilbert space");
  const Index d1 = iota.cols();
  require((iota.adjoint() * iota - Operator::Identity(d1, d1)).cwiseAbs().maxCoeff() <= t,
          ErrorCode::Validation, "compress: iota is not an isometry");

  const Index n1 = target_space->size();
  RealVector pushed = RealVector::Zero(n1);
  for (Index s = 0; s < source.points(); ++s) {
    const Index p = point_map[static_cast<std::size_t>(s)];
    require(p >= 0 && p < n1, ErrorCode::InvalidArgument, "compress: point map out of range");
    pushed(p) += source.space()->weight(s);
  }
  for (Index p = 0; p < n1; ++p) {
    const double w = target_space->weight(p);
    require(std::abs(pushed(p) - w) <= t * std::max(1.0, w), ErrorCode::Validation,
            "compress: pushforward weight at target point " + target_space->labels()[p] +
                " does not match");
  }

  std::vector<Operator> ops(static_cast<std::size_t>(n1));
  std::vector<bool> seen(static_cast<std::size_t>(n1), false);
  for (Index s = 0; s < source.points(); ++s) {
    const auto p = static_cast<std::size_t>(point_map[static_cast<std::size_t>(s)]);
    Operator m = iota.adjoint() * source.op(s) * iota;
    if (!seen[p]) {
      ops[p] = std::move(m);
      seen[p] = true;
    } else {
      const double dev = (ops[p] - m).cwiseAbs().maxCoeff();
      require(dev <= t, ErrorCode::Validation,
              "compress: fiber inconsistency over target point " +
                  target_space->labels()[static_cast<Index>(p)] + " (deviation " +
                  std::to_string(dev) + ")");
    }
  }
  return OperatorFamily::from_matrices("compress(" + source.name() + ")", target_space,
                                       std::move(ops), source.exactness(), source.tolerance());
}

OverlapReport bounded_overlap_check(const std::vector<OperatorFamily>& parts, const Quadruple& q) {
  const OperatorFamily sum = direct_sum_shared(parts);
  const Symbol a = coefficient(sum, q.u1, q.v1);
  const Symbol b = coefficient(sum, q.u2, q.v2);
  OverlapReport rep;
  rep.value = (sum.space()->weights().array() * (a.values().array() * b.values().array().conjugate()).abs()).sum();
  rep.bound = q.u1.norm() * q.v1.norm() * q.u2.norm() * q.v2.norm();
  rep.within = rep.value <= rep.bound * (1.0 + 1e-12) + 1e-14;
  return rep;
}

std::optional<Index> identity_point(const OperatorFamily& fam, double tol) {
  const Index d = fam.hdim();
  const Operator id = Operator::Identity(d, d);
  for (Index s = 0; s < fam.points(); ++s) {
    if ((fam.op(s) - id).cwiseAbs().maxCoeff() <= tol) return s;
  }
  return std::nullopt;
}

}  // namespace opcalc
