#include "opcalc/calculus.hpp"

#include <cmath>

#include "opcalc/parallel.hpp"

namespace opcalc {

namespace {

void require_capacity(const OperatorFamily& fam) {
  const double load = static_cast<double>(fam.points()) * static_cast<double>(fam.hdim()) *
                      static_cast<double>(fam.hdim());
  require(load <= kQuantizerCapacity, ErrorCode::CapacityExceeded,
          "coefficient basis of '" + fam.name() + "' would need " + std::to_string(load) +
              " entries");
}

Operator weighted_coefficients(const OperatorFamily& fam) {
  const RealVector sw = fam.space()->weights().array().sqrt();
  return sw.cast<Complex>().asDiagonal() * coefficient_matrix(fam);
}

Eigen::ColPivHouseholderQR<Operator> pivoted_qr(const Operator& m) {
  Eigen::ColPivHouseholderQR<Operator> qr(m);
  qr.setThreshold(1e-8);
  return qr;
}

void require_symbol(const Quantizer& q, const Symbol& f) {
  require(f.space() != nullptr, ErrorCode::InvalidArgument, "empty symbol");
  require_same_space(*q.space(), *f.space());
}

void require_operator(const Quantizer& q, const Operator& t) {
  require(t.rows() == q.hdim() && t.cols() == q.hdim(), ErrorCode::DimensionMismatch,
          "operator must be " + std::to_string(q.hdim()) + "x" + std::to_string(q.hdim()));
}

}  // namespace

Quantizer::Quantizer(OperatorFamily fam, std::optional<double> tol) : fam_(std::move(fam)) {
  require_capacity(fam_);
  SqOptions opts;
  opts.tol = tol;
  sq_ = verify_sq(fam_, opts);
  require(sq_.pass, ErrorCode::NotSquareIntegrable,
          "family '" + fam_.name() + "' is not square integrable (deviation " +
              std::to_string(sq_.max_deviation) + ")");
  const Operator m = weighted_coefficients(fam_);
  const auto qr = pivoted_qr(m);
  const Index r = qr.rank();
  const Operator qcols = qr.householderQ() * Operator::Identity(m.rows(), r);
  const RealVector inv_sw = fam_.space()->weights().array().sqrt().inverse();
  basis_ = inv_sw.cast<Complex>().asDiagonal() * qcols;
}

Index b2_rank(const OperatorFamily& fam) {
  require_capacity(fam);
  return pivoted_qr(weighted_coefficients(fam)).rank();
}

Operator quantize(const Quantizer& q, const Symbol& f) {
  require_symbol(q, f);
  const auto& fam = q.family();
  const Index d = fam.hdim();
  Operator out = Operator::Zero(d, d);
  for (Index s = 0; s < fam.points(); ++s) {
    const Complex c = fam.space()->weight(s) * f(s);
    if (c != Complex(0.0)) out += c * fam.op(s).adjoint();
  }
  return out;
}

Symbol dequantize(const Quantizer& q, const Operator& t) {
  require_operator(q, t);
  const auto& fam = q.family();
  Vector vals(fam.points());
  parallel_for(static_cast<std::size_t>(fam.points()), [&](std::size_t sp) {
    const Index s = static_cast<Index>(sp);
    // Tr[T P] = sum_ij T_ij P_ji
    vals(s) = (t.array() * fam.op(s).transpose().array()).sum();
  });
  return {fam.space(), std::move(vals)};
}

Symbol project_b2(const Quantizer& q, const Symbol& f) {
  require_symbol(q, f);
  const Operator& b = q.b2_basis();
  const Vector coeffs =
      b.adjoint() * (q.space()->weights().cast<Complex>().asDiagonal() * f.values());
  return {q.space(), b * coeffs};
}

Symbol star(const Quantizer& q, const Symbol& f, const Symbol& g) {
  return dequantize(q, quantize(q, f) * quantize(q, g));
}

Symbol involution(const Quantizer& q, const Symbol& f) {
  return dequantize(q, quantize(q, f).adjoint());
}

Symbol star_explicit(const Quantizer& q, const Symbol& f, const Symbol& g) {
  require_symbol(q, f);
  require_symbol(q, g);
  const auto& fam = q.family();
  const Index n = fam.points();
  const double d2 = static_cast<double>(fam.hdim() * fam.hdim());
  require(static_cast<double>(n) * static_cast<double>(n) * d2 <= 5.0e7 &&
              std::pow(static_cast<double>(n), 3) * d2 <= 2.0e9,
          ErrorCode::CapacityExceeded, "star_explicit: three-point kernel too large");
  const RealVector& w = fam.space()->weights();
  // pairs[s*n + t] = pi(s)* pi(t)*, so K(s,t,r) = sum(pairs[s*n+t] .* pi(r)^T).
  std::vector<Operator> pairs(static_cast<std::size_t>(n * n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t sp) {
    const Index s = static_cast<Index>(sp);
    const Operator as = fam.op(s).adjoint();
    for (Index t = 0; t < n; ++t) pairs[static_cast<std::size_t>(s * n + t)] = as * fam.op(t).adjoint();
  });
  Vector out(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t rp) {
    const Index r = static_cast<Index>(rp);
    const Operator pr_t = fam.op(r).transpose();
    Complex acc = 0.0;
    for (Index s = 0; s < n; ++s) {
      for (Index t = 0; t < n; ++t) {
        const Complex kernel = (pairs[static_cast<std::size_t>(s * n + t)].array() * pr_t.array()).sum();
        acc += kernel * w(s) * f(s) * w(t) * g(t);
      }
    }
    out(r) = acc;
  });
  return {fam.space(), std::move(out)};
}

Symbol involution_explicit(const Quantizer& q, const Symbol& f) {
  require_symbol(q, f);
  const auto& fam = q.family();
  const Index n = fam.points();
  const RealVector& w = fam.space()->weights();
  std::vector<Operator> ops(static_cast<std::size_t>(n));
  for (Index s = 0; s < n; ++s) ops[static_cast<std::size_t>(s)] = fam.op(s);
  Vector out(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t r) {
    Complex acc = 0.0;
    for (Index s = 0; s < n; ++s) {
      const Complex kernel = (ops[r].array() * ops[static_cast<std::size_t>(s)].transpose().array()).sum();
      acc += w(s) * kernel * std::conj(f(s));
    }
    out(static_cast<Index>(r)) = acc;
  });
  return {fam.space(), std::move(out)};
}

Symbol e_symbol(const Quantizer& q, Index point) {
  return dequantize(q, q.family().op(point).adjoint());
}

Complex pairing_with_e(const Quantizer& q, const Symbol& f, Index point) {
  return l2_inner(f, e_symbol(q, point));
}

Operator quantize_measure(const Quantizer& q, const std::vector<Atom>& atoms) {
  const auto& fam = q.family();
  const Index d = fam.hdim();
  Operator out = Operator::Zero(d, d);
  double mass = 0.0, sup = 0.0;
  for (const auto& a : atoms) {
    require(a.point >= 0 && a.point < fam.points(), ErrorCode::InvalidArgument,
            "atom point out of range");
    const Operator p = fam.op(a.point);
    out += a.mass * p.adjoint();
    mass += std::abs(a.mass);
    sup = std::max(sup, op_norm(p));
  }
  const double norm = op_norm(out);
  require(norm <= mass * sup * (1.0 + 1e-12) + 1e-14, ErrorCode::Internal,
          "quantize_measure: norm bound violated");
  return out;
}

SymbolNorms symbol_norms(const Quantizer& q, const Symbol& f) {
  const Operator t = quantize(q, f);
  Eigen::BDCSVD<Operator> svd(t);
  const RealVector sv = svd.singularValues();
  SymbolNorms n;
  n.trace = sv.sum();
  n.hilbert_schmidt = sv.norm();
  n.op = sv.size() ? sv(0) : 0.0;
  return n;
}

Complex trace_pairing(const Quantizer& q, const Symbol& f, const Symbol& g) {
  return hs_inner(quantize(q, f), quantize(q, g));
}

MixedTrace mixed_trace(const Quantizer& q, const Symbol& f, const Operator& s) {
  require_symbol(q, f);
  require_operator(q, s);
  const auto& fam = q.family();
  MixedTrace m;
  m.operator_side = (quantize(q, f) * s).trace();
  Complex acc = 0.0;
  for (Index p = 0; p < fam.points(); ++p) {
    acc += fam.space()->weight(p) * f(p) * (fam.op(p).adjoint() * s).trace();
  }
  m.integral_side = acc;
  m.residual = std::abs(m.operator_side - m.integral_side);
  return m;
}

}  // namespace opcalc
