#pragma once

#include <functional>

#include "opcalc/family.hpp"

namespace opcalc {

struct MagneticParams {
  Index n = 64;
  double length = 16.0;
  bool periodic = false;
  /// Vector potential at the grid points; empty means zero.
  RealVector potential;
  /// Magnetic field at the grid points; in one dimension it must vanish.
  RealVector field;
  /// Declared accuracy of the phase-space quadrature.
  double tolerance = 1e-8;
};

/// One-dimensional phase-space grid. Positions x_j = -L/2 + j*dx for
/// j < n, frequencies xi_l = 2 pi (l - n/2) / L. Shifts are whole grid steps;
/// an open grid pads with zeros and a periodic grid wraps.
///
/// Symbols for the calculus live on a doubled position grid q_h = -L/2 + h*dx/2
/// (2n-1 nodes open, 2n periodic) times the frequencies.
class MagneticGrid {
 public:
  explicit MagneticGrid(MagneticParams params);

  Index n() const noexcept { return p_.n; }
  double length() const noexcept { return p_.length; }
  bool periodic() const noexcept { return p_.periodic; }
  double spacing() const noexcept { return p_.length / static_cast<double>(p_.n); }
  double frequency_step() const noexcept { return 2.0 * M_PI / p_.length; }
  double position(Index j) const;
  double frequency(Index l) const;
  double midpoint(Index h) const;
  Index midpoint_count() const noexcept { return p_.periodic ? 2 * p_.n : 2 * p_.n - 1; }
  const RealVector& potential() const noexcept { return p_.potential; }
  const MagneticParams& params() const noexcept { return p_; }

  /// Trapezoid antiderivative of the potential, zero at the left end.
  const RealVector& circulation() const noexcept { return lambda_; }
  /// Trapezoid circulation of the potential along [x_j, x_k].
  double circulation(Index j, Index k) const { return lambda_(k) - lambda_(j); }

  /// Shifts (2n-1 open, n periodic) times frequencies, weight 1/n each.
  OperatorFamily family() const;
  /// Doubled position grid times frequencies, weight 1/(2n) each.
  const SpacePtr& phase_space() const noexcept { return phase_; }
  Symbol sample(const std::function<Complex(double, double)>& a) const;

  /// Kernel quadrature of the magnetic Weyl calculus.
  Operator op_a(const Symbol& a) const;
  /// Moyal product; the field vanishes in one dimension so no flux factor enters.
  Symbol moyal(const Symbol& a, const Symbol& b) const;

  MagneticGrid with_potential(RealVector potential) const;

 private:
  void require_symbol(const Symbol& a) const;

  MagneticParams p_;
  RealVector lambda_;
  SpacePtr phase_;
};

/// Centered differences inside, one-sided at the ends.
RealVector discrete_gradient(const MagneticGrid& grid, const RealVector& rho);

/// || Op^{A + d rho}(a) - e^{i rho} Op^A(a) e^{-i rho} || in operator norm.
double gauge_transform_check(const MagneticGrid& grid, const RealVector& rho, const Symbol& a);

/// || Op^A(a) Op^A(b) - Op^A(a # b) || in operator norm.
double composition_residual(const MagneticGrid& grid, const Symbol& a, const Symbol& b);

struct ReductionReport {
  /// Largest entry of pi^0(m,l) - c W(-m, n/2 - l) over all points.
  double max_residual = 0.0;
  /// Largest | |c| - 1 |.
  double max_phase_defect = 0.0;
};

/// Compares the zero-potential periodic family with the discrete Weyl system.
ReductionReport weyl_reduction_check(const MagneticGrid& grid);

}  // namespace opcalc
