#include "opcalc/magnetic.hpp"

#include <cmath>

#include "opcalc/backends.hpp"
#include "opcalc/parallel.hpp"

namespace opcalc {

namespace {

Index wrap(Index i, Index n) { return ((i % n) + n) % n; }

double window(Index d, Index n) {
  const Index a = d < 0 ? -d : d;
  if (2 * a < n) return 1.0;
  if (2 * a == n) return 0.5;
  return 0.0;
}

class MagneticSource : public OperatorSource {
 public:
  explicit MagneticSource(const MagneticGrid& g)
      : n_(g.n()), periodic_(g.periodic()), dx_(g.spacing()), lambda_(g.circulation()) {
    x_.resize(n_);
    xi_.resize(n_);
    for (Index j = 0; j < n_; ++j) {
      x_(j) = g.position(j);
      xi_(j) = g.frequency(j);
    }
  }

  Index dim() const override { return n_; }

  Index shift_of(Index point) const { return point / n_ - (periodic_ ? 0 : n_ - 1); }

  // Row j of pi(m,l) has its single entry in column target(j), or none.
  Index target(Index j, Index m) const {
    const Index t = j + m;
    if (periodic_) return wrap(t, n_);
    return (t >= 0 && t < n_) ? t : -1;
  }

  Complex entry(Index j, Index m, Index l, Index t) const {
    const double phase = -(x_(j) + 0.5 * static_cast<double>(m) * dx_) * xi_(l) -
                         (periodic_ ? 0.0 : lambda_(t) - lambda_(j));
    return std::polar(1.0, phase);
  }

  Operator op(Index point) const override {
    const Index m = shift_of(point), l = point % n_;
    Operator out = Operator::Zero(n_, n_);
    for (Index j = 0; j < n_; ++j) {
      const Index t = target(j, m);
      if (t >= 0) out(j, t) = entry(j, m, l, t);
    }
    return out;
  }

  Vector apply(Index point, const Vector& u) const override {
    const Index m = shift_of(point), l = point % n_;
    Vector out = Vector::Zero(n_);
    for (Index j = 0; j < n_; ++j) {
      const Index t = target(j, m);
      if (t >= 0) out(j) = entry(j, m, l, t) * u(t);
    }
    return out;
  }

  Vector apply_adjoint(Index point, const Vector& u) const override {
    const Index m = shift_of(point), l = point % n_;
    Vector out = Vector::Zero(n_);
    for (Index j = 0; j < n_; ++j) {
      const Index t = target(j, m);
      if (t >= 0) out(t) += std::conj(entry(j, m, l, t)) * u(j);
    }
    return out;
  }

 private:
  Index n_;
  bool periodic_;
  double dx_;
  RealVector lambda_;
  RealVector x_, xi_;
};

}  // namespace

MagneticGrid::MagneticGrid(MagneticParams params) : p_(std::move(params)) {
  require(p_.n >= 4 && p_.n % 2 == 0, ErrorCode::Validation,
          "magnetic grid needs an even number of points >= 4");
  require(std::isfinite(p_.length) && p_.length > 0.0, ErrorCode::Validation,
          "magnetic grid length must be positive");
  require(p_.tolerance > 0.0, ErrorCode::Validation, "quadrature tolerance must be positive");
  if (p_.potential.size() == 0) p_.potential = RealVector::Zero(p_.n);
  require(p_.potential.size() == p_.n, ErrorCode::Validation,
          "vector potential needs one sample per grid point");
  require(p_.potential.allFinite(), ErrorCode::Validation, "vector potential has non-finite samples");
  if (p_.field.size() == 0) p_.field = RealVector::Zero(p_.n);
  require(p_.field.size() == p_.n, ErrorCode::Validation,
          "magnetic field needs one sample per grid point");
  require(p_.field.allFinite() && p_.field.cwiseAbs().maxCoeff() == 0.0, ErrorCode::Validation,
          "a one-dimensional grid carries no magnetic field; field samples must be zero");
  if (p_.periodic) {
    require(p_.potential.cwiseAbs().maxCoeff() == 0.0, ErrorCode::Validation,
            "a periodic grid requires a zero vector potential");
  }
  const double dx = spacing();
  lambda_ = RealVector::Zero(p_.n);
  for (Index k = 1; k < p_.n; ++k)
    lambda_(k) = lambda_(k - 1) + 0.5 * dx * (p_.potential(k - 1) + p_.potential(k));

  const Index nh = midpoint_count();
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(nh * p_.n));
  for (Index h = 0; h < nh; ++h)
    for (Index l = 0; l < p_.n; ++l) labels.push_back(std::to_string(h) + ":" + std::to_string(l));
  phase_ = MeasureSpace::make("phase" + std::to_string(p_.n) + (p_.periodic ? "p" : "o"),
                              std::move(labels),
                              RealVector::Constant(nh * p_.n, 0.5 / static_cast<double>(p_.n)),
                              MeasureKind::Quadrature, p_.tolerance);
}

double MagneticGrid::position(Index j) const { return -0.5 * p_.length + static_cast<double>(j) * spacing(); }

double MagneticGrid::frequency(Index l) const {
  return frequency_step() * static_cast<double>(l - p_.n / 2);
}

double MagneticGrid::midpoint(Index h) const {
  return -0.5 * p_.length + 0.5 * static_cast<double>(h) * spacing();
}

OperatorFamily MagneticGrid::family() const {
  const Index shifts = p_.periodic ? p_.n : 2 * p_.n - 1;
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(shifts * p_.n));
  for (Index s = 0; s < shifts; ++s) {
    const Index m = p_.periodic ? s : s - (p_.n - 1);
    for (Index l = 0; l < p_.n; ++l) labels.push_back(std::to_string(m) + ":" + std::to_string(l));
  }
  auto space = MeasureSpace::make("shifts" + std::to_string(p_.n) + (p_.periodic ? "p" : "o"),
                                  std::move(labels),
                                  RealVector::Constant(shifts * p_.n, 1.0 / static_cast<double>(p_.n)),
                                  MeasureKind::Quadrature, p_.tolerance);
  return {"magnetic_weyl(" + std::to_string(p_.n) + ")", space,
          std::make_shared<MagneticSource>(*this), Exactness::Approximate, p_.tolerance};
}

Symbol MagneticGrid::sample(const std::function<Complex(double, double)>& a) const {
  const Index nh = midpoint_count();
  Vector v(nh * p_.n);
  for (Index h = 0; h < nh; ++h)
    for (Index l = 0; l < p_.n; ++l) v(h * p_.n + l) = a(midpoint(h), frequency(l));
  return {phase_, std::move(v)};
}

void MagneticGrid::require_symbol(const Symbol& a) const {
  require(a.space() != nullptr, ErrorCode::InvalidArgument, "empty symbol");
  require_same_space(*phase_, *a.space());
}

Operator MagneticGrid::op_a(const Symbol& a) const {
  require_symbol(a);
  const Index n = p_.n;
  // phases(d + n, l) = exp(i xi_l d dx) / n for d in (-n, n)
  Operator phases(2 * n, n);
  for (Index d = -n; d < n; ++d)
    for (Index l = 0; l < n; ++l)
      phases(d + n, l) = std::polar(1.0 / static_cast<double>(n),
                                    2.0 * M_PI * static_cast<double>((l - n / 2) * d) / static_cast<double>(n));
  const Vector& av = a.values();
  auto term = [&](Index d, Index h) {
    return (phases.row(d + n).transpose().array() * av.segment(h * n, n).array()).sum();
  };
  Operator out = Operator::Zero(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t jp) {
    const Index j = static_cast<Index>(jp);
    for (Index k = 0; k < n; ++k) {
      Complex v = 0.0;
      if (!p_.periodic) {
        const double win = window(j - k, n);
        if (win > 0.0) v = win * term(j - k, j + k);
      } else {
        Index d = wrap(j - k, n);
        if (d >= n / 2) d -= n;
        const Index h = wrap(2 * k + d, 2 * n);
        if (2 * d == -n) {
          v = 0.5 * (term(d, h) + term(d, wrap(h + n, 2 * n)));
        } else {
          v = term(d, h);
        }
      }
      out(j, k) = v * std::polar(1.0, lambda_(j) - lambda_(k));
    }
  });
  return out;
}

Symbol MagneticGrid::moyal(const Symbol& a, const Symbol& b) const {
  require_symbol(a);
  require_symbol(b);
  const Index n = p_.n, nh = midpoint_count(), np = n + 1, half = n / 2;
  const double dx = spacing(), dxi = frequency_step();
  // fwd(l, p) = exp(i xi_l p dx), p = -n/2 .. n/2
  Operator fwd(n, np);
  RealVector wp(np);
  for (Index p = 0; p < np; ++p) {
    wp(p) = window(p - half, n);
    for (Index l = 0; l < n; ++l)
      fwd(l, p) = std::polar(1.0, 2.0 * M_PI * static_cast<double>((l - half) * (p - half)) / static_cast<double>(n));
  }
  auto transform = [&](const Symbol& s) {
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
        s.values().data(), nh, n);
    Operator t = dxi * (m * fwd);
    return Operator(t * wp.cast<Complex>().asDiagonal());
  };
  const Operator ah = transform(a), bh = transform(b);
  const Operator bwd = fwd.conjugate();
  const double scale = dx * dx / (4.0 * M_PI * M_PI);
  auto node = [&](Index h) -> Index {
    if (p_.periodic) return wrap(h, 2 * n);
    return (h >= 0 && h < nh) ? h : -1;
  };
  Vector out(nh * n);
  parallel_for(static_cast<std::size_t>(nh), [&](std::size_t hp) {
    const Index h = static_cast<Index>(hp);
    // c(s, t) = A^(h + tau_t, sigma_s) B^(h - sigma_s, tau_t)
    Operator c = Operator::Zero(np, np);
    for (Index s = 0; s < np; ++s) {
      const Index hb = node(h - (s - half));
      if (hb < 0) continue;
      for (Index t = 0; t < np; ++t) {
        const Index ha = node(h + (t - half));
        if (ha < 0) continue;
        c(s, t) = ah(ha, s) * bh(hb, t);
      }
    }
    const Operator ec = bwd * c;
    for (Index l = 0; l < n; ++l) out(h * n + l) = scale * (ec.row(l).array() * bwd.row(l).array()).sum();
  });
  return {phase_, std::move(out)};
}

MagneticGrid MagneticGrid::with_potential(RealVector potential) const {
  MagneticParams p = p_;
  p.potential = std::move(potential);
  return MagneticGrid(std::move(p));
}

RealVector discrete_gradient(const MagneticGrid& grid, const RealVector& rho) {
  const Index n = grid.n();
  require(rho.size() == n, ErrorCode::DimensionMismatch, "gauge function needs one sample per grid point");
  require(rho.allFinite(), ErrorCode::InvalidArgument, "gauge function has non-finite samples");
  const double dx = grid.spacing();
  RealVector g(n);
  g(0) = (rho(1) - rho(0)) / dx;
  g(n - 1) = (rho(n - 1) - rho(n - 2)) / dx;
  for (Index j = 1; j + 1 < n; ++j) g(j) = (rho(j + 1) - rho(j - 1)) / (2.0 * dx);
  return g;
}

double gauge_transform_check(const MagneticGrid& grid, const RealVector& rho, const Symbol& a) {
  require(!grid.periodic(), ErrorCode::Validation, "gauge check needs an open grid");
  const MagneticGrid shifted = grid.with_potential(grid.potential() + discrete_gradient(grid, rho));
  Vector phase(grid.n());
  for (Index j = 0; j < grid.n(); ++j) phase(j) = std::polar(1.0, rho(j));
  const Operator conj = phase.asDiagonal() * grid.op_a(a) * phase.conjugate().asDiagonal();
  return op_norm(shifted.op_a(a) - conj);
}

double composition_residual(const MagneticGrid& grid, const Symbol& a, const Symbol& b) {
  return op_norm(grid.op_a(a) * grid.op_a(b) - grid.op_a(grid.moyal(a, b)));
}

ReductionReport weyl_reduction_check(const MagneticGrid& grid) {
  require(grid.periodic() && grid.potential().cwiseAbs().maxCoeff() == 0.0, ErrorCode::Validation,
          "the Weyl reduction is defined on a periodic grid with zero potential");
  const Index n = grid.n();
  const OperatorFamily fam = grid.family();
  ReductionReport rep;
  for (Index m = 0; m < n; ++m) {
    for (Index l = 0; l < n; ++l) {
      const Operator p0 = fam.op(m * n + l);
      const Operator w = weyl_operator(n, wrap(-m, n), wrap(n / 2 - l, n));
      const Complex c = (w.adjoint() * p0).trace() / static_cast<double>(n);
      rep.max_residual = std::max(rep.max_residual, (p0 - c * w).cwiseAbs().maxCoeff());
      rep.max_phase_defect = std::max(rep.max_phase_defect, std::abs(std::abs(c) - 1.0));
    }
  }
  return rep;
}

}  // namespace opcalc
