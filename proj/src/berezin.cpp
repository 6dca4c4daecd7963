#include "opcalc/berezin.hpp"

#include <cmath>

#include "opcalc/parallel.hpp"

namespace opcalc {

namespace {

void require_symbol(const Frame& fr, const Symbol& f) {
  require(f.space() != nullptr, ErrorCode::InvalidArgument, "empty symbol");
  require_same_space(*fr.space(), *f.space());
}

Eigen::DiagonalMatrix<Complex, Eigen::Dynamic> weight_diag(const Frame& fr) {
  return fr.space()->weights().cast<Complex>().asDiagonal();
}

}  // namespace

Frame::Frame(OperatorFamily fam, Vector w, std::optional<double> tol)
    : fam_(std::move(fam)), w_(std::move(w)) {
  tol_ = tol.value_or(fam_.tolerance());
  require(w_.size() == fam_.hdim(), ErrorCode::DimensionMismatch,
          "fiducial vector must have dimension " + std::to_string(fam_.hdim()));
  require(std::abs(w_.norm() - 1.0) <= tol_, ErrorCode::InvalidArgument,
          "fiducial vector is not a unit vector");
  require(fam_.points() <= kFramePointCap, ErrorCode::CapacityExceeded,
          "frame kernel limited to " + std::to_string(kFramePointCap) + " points");
  const Index n = fam_.points(), d = fam_.hdim();
  orbit_.resize(d, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t s) {
    orbit_.col(static_cast<Index>(s)) = fam_.apply_adjoint(static_cast<Index>(s), w_);
  });
  kernel_ = orbit_.adjoint() * orbit_;
  const Operator resolution =
      orbit_ * fam_.space()->weights().cast<Complex>().asDiagonal() * orbit_.adjoint();
  resolution_ = op_norm(resolution - Operator::Identity(d, d));
  require(resolution_ <= tol_, ErrorCode::NotSquareIntegrable,
          "resolution of identity fails for '" + fam_.name() + "' (residual " +
              std::to_string(resolution_) + ")");
}

Symbol analysis(const Frame& fr, const Vector& u) {
  require(u.size() == fr.family().hdim(), ErrorCode::DimensionMismatch,
          "analysis: vector dimension mismatch");
  return {fr.space(), fr.orbit().adjoint() * u};
}

Vector synthesis(const Frame& fr, const Symbol& f) {
  require_symbol(fr, f);
  return fr.orbit() * (weight_diag(fr) * f.values());
}

Operator kernel_projector(const Frame& fr) { return fr.kernel() * weight_diag(fr); }

Operator berezin_op(const Frame& fr, const Symbol& f) {
  require_symbol(fr, f);
  const Vector wf = fr.space()->weights().cast<Complex>().cwiseProduct(f.values());
  return fr.orbit() * wf.asDiagonal() * fr.orbit().adjoint();
}

Operator toeplitz_op(const Frame& fr, const Symbol& f) {
  require_symbol(fr, f);
  const Operator p = kernel_projector(fr);
  return p * f.values().asDiagonal() * p;
}

Operator toeplitz_via_berezin(const Frame& fr, const Symbol& f) {
  return fr.orbit().adjoint() * berezin_op(fr, f) * fr.orbit() * weight_diag(fr);
}

Symbol covariant_symbol_sigma(const Frame& fr, const Operator& a) {
  const Index n = fr.family().points();
  require(a.rows() == n && a.cols() == n, ErrorCode::DimensionMismatch,
          "sigma: operator must act on symbols of the frame's space");
  const Operator& k = fr.kernel();
  const RealVector& w = fr.space()->weights();
  Vector out(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t sp) {
    const Index s = static_cast<Index>(sp);
    const Vector ks = k.col(s);  // analysis of w(s): t -> <w(s), w(t)>
    const Vector aks = a * ks;
    out(s) = (w.cast<Complex>().array() * aks.array() * ks.array().conjugate()).sum();
  });
  return {fr.space(), std::move(out)};
}

Symbol covariant_symbol_tau(const Frame& fr, const Operator& s) {
  const Index d = fr.family().hdim();
  require(s.rows() == d && s.cols() == d, ErrorCode::DimensionMismatch,
          "tau: operator dimension mismatch");
  const Operator so = s * fr.orbit();
  Vector out(fr.family().points());
  for (Index p = 0; p < out.size(); ++p) out(p) = fr.orbit().col(p).dot(so.col(p));
  return {fr.space(), std::move(out)};
}

Symbol berezin_transform(const Frame& fr, const Symbol& g) {
  require_symbol(fr, g);
  const RealVector& w = fr.space()->weights();
  const Eigen::MatrixXd k2 = fr.kernel().cwiseAbs2();
  return {fr.space(), (k2 * w.asDiagonal()).cast<Complex>() * g.values()};
}

BerezinFactorization berezin_as_quantization(const Frame& fr, const Quantizer& q, const Symbol& f) {
  require_symbol(fr, f);
  require_same_space(*fr.space(), *q.space());
  const auto& fam = fr.family();
  const Index n = fam.points();
  const RealVector& w = fam.space()->weights();
  Vector vals(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t sp) {
    const Index s = static_cast<Index>(sp);
    const Operator ps = fam.op(s);
    const Operator po = ps * fr.orbit();
    Complex acc = 0.0;
    for (Index t = 0; t < n; ++t) acc += w(t) * f(t) * fr.orbit().col(t).dot(po.col(t));
    vals(s) = acc;
  });
  BerezinFactorization out{Symbol(fam.space(), std::move(vals)), 0.0};
  out.residual = op_norm(quantize(q, out.symbol) - berezin_op(fr, f));
  return out;
}

Symbol upsilon_transform(const Frame& fr, const Quantizer& q, const Symbol& g) {
  require_symbol(fr, g);
  const Operator t = quantize(q, g);
  const Operator& orbit = fr.orbit();
  // <T w(s), w(t)> = w(t)^H T w(s), laid out with s the slow index.
  const Operator m = orbit.adjoint() * t * orbit;  // (t, s)
  const Index n = fr.family().points();
  Vector vals(n * n);
  for (Index s = 0; s < n; ++s)
    for (Index u = 0; u < n; ++u) vals(s * n + u) = m(u, s);
  return {product_space(fr.space(), fr.space()), std::move(vals)};
}

}  // namespace opcalc
