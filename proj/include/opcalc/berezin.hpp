#pragma once

#include "opcalc/calculus.hpp"

namespace opcalc {

/// A fiducial unit vector w with its orbit w(s) = pi(s)* w and the
/// reproducing kernel p(s,t) = <w(t), w(s)>.
class Frame {
 public:
  /// Throws NotSquareIntegrable when the resolution of identity fails.
  Frame(OperatorFamily fam, Vector w, std::optional<double> tol = std::nullopt);

  const OperatorFamily& family() const noexcept { return fam_; }
  const SpacePtr& space() const noexcept { return fam_.space(); }
  const Vector& fiducial() const noexcept { return w_; }
  /// hdim x points; column s is w(s).
  const Operator& orbit() const noexcept { return orbit_; }
  /// points x points; entry (s,t) is <w(t), w(s)>.
  const Operator& kernel() const noexcept { return kernel_; }
  double resolution_residual() const noexcept { return resolution_; }
  double tolerance() const noexcept { return tol_; }

 private:
  OperatorFamily fam_;
  Vector w_;
  Operator orbit_;
  Operator kernel_;
  double resolution_ = 0.0;
  double tol_ = 0.0;
};

/// Points above which a frame refuses to store its kernel.
inline constexpr Index kFramePointCap = 8192;

/// s -> <u, w(s)>.
Symbol analysis(const Frame& fr, const Vector& u);
/// int f(s) w(s) dmu.
Vector synthesis(const Frame& fr, const Symbol& f);
/// Matrix acting on symbol values: (P f)(s) = sum_t w_t p(s,t) f(t).
Operator kernel_projector(const Frame& fr);
/// int f(s) lambda_{w(s),w(s)} dmu.
Operator berezin_op(const Frame& fr, const Symbol& f);
/// P diag(f) P on symbol values.
Operator toeplitz_op(const Frame& fr, const Symbol& f);
/// analysis o berezin_op(f) o synthesis, as a matrix on symbol values.
Operator toeplitz_via_berezin(const Frame& fr, const Symbol& f);

/// s -> <A k_s, k_s> with k_s the analysis of w(s); A acts on symbol values.
Symbol covariant_symbol_sigma(const Frame& fr, const Operator& a);
/// s -> <S w(s), w(s)>.
Symbol covariant_symbol_tau(const Frame& fr, const Operator& s);
/// s -> int g(t) |<w(s), w(t)>|^2 dmu(t).
Symbol berezin_transform(const Frame& fr, const Symbol& g);

struct BerezinFactorization {
  Symbol symbol;
  double residual = 0.0;  // || quantize(symbol) - berezin_op(f) ||
};

/// The symbol s -> int f(t) <pi(s) w(t), w(t)> dmu(t), whose quantization is
/// the Berezin operator of f.
BerezinFactorization berezin_as_quantization(const Frame& fr, const Quantizer& q, const Symbol& f);

/// (s,t) -> <g, phi_{w(t), w(s)}> on the product space.
Symbol upsilon_transform(const Frame& fr, const Quantizer& q, const Symbol& g);

}  // namespace opcalc
