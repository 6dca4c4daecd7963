#pragma once

#include <utility>
#include <vector>

#include "opcalc/family.hpp"

namespace opcalc {

/// Quantization against a square-integrable family, together with an
/// orthonormal basis of the span of its coefficient symbols.
class Quantizer {
 public:
  /// Fails with NotSquareIntegrable unless verify_sq passes at the family's
  /// tolerance (or the given override).
  explicit Quantizer(OperatorFamily fam, std::optional<double> tol = std::nullopt);

  const OperatorFamily& family() const noexcept { return fam_; }
  const SpacePtr& space() const noexcept { return fam_.space(); }
  Index hdim() const { return fam_.hdim(); }
  /// Columns are orthonormal for the weighted inner product.
  const Operator& b2_basis() const noexcept { return basis_; }
  Index b2_rank() const { return basis_.cols(); }
  const SqReport& sq_report() const noexcept { return sq_; }

 private:
  OperatorFamily fam_;
  Operator basis_;
  SqReport sq_;
};

/// Points * hdim^2 entries above which the coefficient basis is not formed.
inline constexpr double kQuantizerCapacity = 4.0e6;

/// Column-pivoted rank of the coefficient symbols with relative drop
/// tolerance 1e-8; does not require square integrability.
Index b2_rank(const OperatorFamily& fam);

/// sum_s w_s f(s) pi(s)*.
Operator quantize(const Quantizer& q, const Symbol& f);
/// s -> Tr[T pi(s)].
Symbol dequantize(const Quantizer& q, const Operator& t);
Symbol project_b2(const Quantizer& q, const Symbol& f);

Symbol star(const Quantizer& q, const Symbol& f, const Symbol& g);
Symbol involution(const Quantizer& q, const Symbol& f);

/// Star product from the three-point trace kernel Tr[pi(s)* pi(t)* pi(r)].
Symbol star_explicit(const Quantizer& q, const Symbol& f, const Symbol& g);
/// Involution from the two-point kernel Tr[pi(r) pi(s)].
Symbol involution_explicit(const Quantizer& q, const Symbol& f);

/// The symbol quantizing to pi(s)*.
Symbol e_symbol(const Quantizer& q, Index point);
/// <f, e_s> in L^2 of the space.
Complex pairing_with_e(const Quantizer& q, const Symbol& f, Index point);

struct Atom {
  Index point;
  Complex mass;
};

/// sum_k mass_k pi(s_k)*. Throws Internal if the norm bound is violated.
Operator quantize_measure(const Quantizer& q, const std::vector<Atom>& atoms);

struct SymbolNorms {
  double trace = 0.0;
  double hilbert_schmidt = 0.0;
  double op = 0.0;
};

SymbolNorms symbol_norms(const Quantizer& q, const Symbol& f);

/// Tr[Pi(f) Pi(g)*].
Complex trace_pairing(const Quantizer& q, const Symbol& f, const Symbol& g);

struct MixedTrace {
  Complex operator_side;  // Tr[Pi(f) S]
  Complex integral_side;  // int f(s) Tr[pi(s)* S] dmu
  double residual = 0.0;
};

MixedTrace mixed_trace(const Quantizer& q, const Symbol& f, const Operator& s);

}  // namespace opcalc
