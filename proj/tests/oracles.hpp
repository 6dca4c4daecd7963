#pragma once

// Slow reference computations written with plain loops. They deliberately
// avoid the library's algorithms so that agreement means something.

#include <cmath>
#include <complex>
#include <vector>

#include "opcalc/family.hpp"

namespace oracle {

using opcalc::Complex;
using opcalc::Index;
using opcalc::Operator;
using opcalc::Vector;

inline Complex dot(const Vector& u, const Vector& v) {
  Complex s = 0.0;
  for (Index i = 0; i < u.size(); ++i) s += u(i) * std::conj(v(i));
  return s;
}

inline Operator matmul(const Operator& a, const Operator& b) {
  Operator c = Operator::Zero(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < b.cols(); ++j)
      for (Index k = 0; k < a.cols(); ++k) c(i, j) += a(i, k) * b(k, j);
  return c;
}

inline Operator dagger(const Operator& a) {
  Operator out(a.cols(), a.rows());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
  return out;
}

inline Vector matvec(const Operator& a, const Vector& u) {
  Vector out = Vector::Zero(a.rows());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index k = 0; k < a.cols(); ++k) out(i) += a(i, k) * u(k);
  return out;
}

inline Complex tr(const Operator& a) {
  Complex s = 0.0;
  for (Index i = 0; i < a.rows(); ++i) s += a(i, i);
  return s;
}

inline double max_entry(const Operator& a) {
  double m = 0.0;
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j)));
  return m;
}

inline double max_entry(const Vector& a) {
  double m = 0.0;
  for (Index i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a(i)));
  return m;
}

// Shift-then-clock: X^a Z^b with X e_k = e_{k+1}, Z = diag(omega^k).
inline Operator weyl(Index n, Index a, Index b) {
  Operator x = Operator::Zero(n, n), z = Operator::Zero(n, n);
  for (Index k = 0; k < n; ++k) {
    x((k + 1) % n, k) = 1.0;
    z(k, k) = std::polar(1.0, 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n));
  }
  Operator xa = Operator::Identity(n, n), zb = Operator::Identity(n, n);
  for (Index i = 0; i < a; ++i) xa = matmul(x, xa);
  for (Index i = 0; i < b; ++i) zb = matmul(z, zb);
  return matmul(xa, zb);
}

inline std::vector<Operator> ops(const opcalc::OperatorFamily& fam) {
  std::vector<Operator> out;
  for (Index s = 0; s < fam.points(); ++s) out.push_back(fam.op(s));
  return out;
}

// sum_s w_s <pi u1, v1> conj(<pi u2, v2>)
inline Complex sq_integral(const opcalc::OperatorFamily& fam, const Vector& u1, const Vector& v1,
                           const Vector& u2, const Vector& v2) {
  Complex s = 0.0;
  for (Index p = 0; p < fam.points(); ++p) {
    const Operator a = fam.op(p);
    s += fam.space()->weight(p) * dot(matvec(a, u1), v1) * std::conj(dot(matvec(a, u2), v2));
  }
  return s;
}

// Largest deviation over all basis quadruples.
inline double sq_basis_deviation(const opcalc::OperatorFamily& fam) {
  const Index d = fam.hdim();
  const auto all = ops(fam);
  double worst = 0.0;
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      for (Index k = 0; k < d; ++k)
        for (Index l = 0; l < d; ++l) {
          Complex s = 0.0;
          for (Index p = 0; p < fam.points(); ++p)
            s += fam.space()->weight(p) * all[static_cast<std::size_t>(p)](j, i) *
                 std::conj(all[static_cast<std::size_t>(p)](l, k));
          const double expect = (i == k && j == l) ? 1.0 : 0.0;
          worst = std::max(worst, std::abs(s - expect));
        }
  return worst;
}

// sum_s w_s f(s) pi(s)^*
inline Operator quantize(const opcalc::OperatorFamily& fam, const Vector& f) {
  Operator t = Operator::Zero(fam.hdim(), fam.hdim());
  for (Index s = 0; s < fam.points(); ++s) t += fam.space()->weight(s) * f(s) * dagger(fam.op(s));
  return t;
}

// Tr[pi(s) T]
inline Vector dequantize(const opcalc::OperatorFamily& fam, const Operator& t) {
  Vector f(fam.points());
  for (Index s = 0; s < fam.points(); ++s) f(s) = tr(matmul(fam.op(s), t));
  return f;
}

// Rank by Gram-Schmidt with a relative drop tolerance.
inline Index rank(const std::vector<Vector>& cols, double tol = 1e-8) {
  std::vector<Vector> basis;
  double scale = 0.0;
  for (const auto& c : cols) scale = std::max(scale, c.norm());
  for (Vector c : cols) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) c -= dot(c, b) * b;
    if (c.norm() > tol * std::max(1.0, scale)) basis.push_back(c / c.norm());
  }
  return static_cast<Index>(basis.size());
}

// Weighted rank of the coefficient functions phi_{e_i, e_j}.
inline Index coefficient_rank(const opcalc::OperatorFamily& fam) {
  std::vector<Vector> cols;
  const Index d = fam.hdim();
  const auto all = ops(fam);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) {
      Vector c(fam.points());
      for (Index s = 0; s < fam.points(); ++s)
        c(s) = std::sqrt(fam.space()->weight(s)) * all[static_cast<std::size_t>(s)](j, i);
      cols.push_back(c);
    }
  return rank(cols);
}

// Dimension of {X : X pi(s) = pi(s) X for all s}, found by Gram-Schmidt on
// the rows of the stacked linear system and counting the leftover unknowns.
inline Index commutant_dim(const opcalc::OperatorFamily& fam) {
  const Index d = fam.hdim();
  std::vector<Vector> rows;
  for (Index s = 0; s < fam.points(); ++s) {
    const Operator a = fam.op(s);
    for (Index r = 0; r < d; ++r)
      for (Index c = 0; c < d; ++c) {
        // (X A - A X)(r, c) as a linear form in the entries X(p, q), index p*d + q.
        Vector row = Vector::Zero(d * d);
        for (Index k = 0; k < d; ++k) {
          row(r * d + k) += a(k, c);
          row(k * d + c) -= a(r, k);
        }
        rows.push_back(row.conjugate());
      }
  }
  return d * d - rank(rows, 1e-9);
}

// Spectral derivative -i d/dx written as a plain DFT sum on a centered grid.
inline Operator spectral_momentum(Index n, double length) {
  const double dx = length / static_cast<double>(n);
  Operator out = Operator::Zero(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index k = 0; k < n; ++k) {
      Complex s = 0.0;
      for (Index l = 0; l < n; ++l) {
        const double xi = 2.0 * M_PI * static_cast<double>(l - n / 2) / length;
        s += xi * std::polar(1.0, xi * static_cast<double>(j - k) * dx);
      }
      out(j, k) = s / static_cast<double>(n);
    }
  return out;
}

// Level-N defect of a restricted product of square-integrable factors with
// full coefficient rank: |  ||U V^*||_F^2 - |u|^2 |v|^2 | where U, V reshape
// u, v into (leading dim) x (tail dim) matrices.
inline double sq_defect_closed_form(const Vector& u, const Vector& v, Index leading) {
  const Index tail = u.size() / leading;
  Operator uv = Operator::Zero(leading, leading);
  for (Index i = 0; i < leading; ++i)
    for (Index j = 0; j < leading; ++j)
      for (Index t = 0; t < tail; ++t) uv(i, j) += u(i * tail + t) * std::conj(v(j * tail + t));
  double fro = 0.0;
  for (Index i = 0; i < leading; ++i)
    for (Index j = 0; j < leading; ++j) fro += std::norm(uv(i, j));
  return std::abs(fro - u.squaredNorm() * v.squaredNorm());
}

}  // namespace oracle
