#include "opcalc/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "opcalc/berezin.hpp"
#include "opcalc/calculus.hpp"
#include "opcalc/inftensor.hpp"
#include "opcalc/random.hpp"

namespace opcalc {

namespace {

[[noreturn]] void invalid(const std::string& what) { fail(ErrorCode::Validation, what); }

double max_abs(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

Index int_param(const Json& p, const char* key, Index fallback, Index lo, Index hi) {
  if (!p.contains(key)) return fallback;
  const Json& v = p.at(key);
  if (!v.is_number_integer()) invalid(std::string("task parameter '") + key + "' must be an integer");
  const Index x = v.get<Index>();
  if (x < lo || x > hi)
    invalid(std::string("task parameter '") + key + "' must lie in [" + std::to_string(lo) + ", " +
            std::to_string(hi) + "]");
  return x;
}

double num_param(const Json& p, const char* key, double fallback) {
  if (!p.contains(key)) return fallback;
  const Json& v = p.at(key);
  if (!v.is_number()) invalid(std::string("task parameter '") + key + "' must be a number");
  return v.get<double>();
}

bool bool_param(const Json& p, const char* key, bool fallback) {
  if (!p.contains(key)) return fallback;
  const Json& v = p.at(key);
  if (!v.is_boolean()) invalid(std::string("task parameter '") + key + "' must be a boolean");
  return v.get<bool>();
}

struct Context {
  const Backend& backend;
  Rng& rng;
  double tol;
  std::optional<Quantizer> quantizer;

  const OperatorFamily& family() const { return backend.family; }

  const Quantizer& quant() {
    if (!quantizer) quantizer.emplace(backend.family, tol);
    return *quantizer;
  }

  Symbol random_symbol() { return {family().space(), rng.vector(family().points())}; }
  Symbol random_b2_symbol() { return project_b2(quant(), random_symbol()); }
};

Json verdict(bool ok) { return ok ? "pass" : "fail"; }

std::vector<Symbol> symbols_param(Context& ctx, const Json& p, Index fallback_random, bool in_b2) {
  std::vector<Symbol> out;
  if (p.contains("symbols")) {
    const Json& s = p.at("symbols");
    if (!s.is_array() || s.empty()) invalid("'symbols' must be a nonempty array");
    for (const auto& j : s) out.push_back(symbol_from_json(j, ctx.family().space()));
    return out;
  }
  const Index k = int_param(p, "random", fallback_random, 1, 1000);
  for (Index i = 0; i < k; ++i) out.push_back(in_b2 ? ctx.random_b2_symbol() : ctx.random_symbol());
  return out;
}

// ---------------------------------------------------------------- verify_sq

std::vector<Vector> gaussian_vectors(const MagneticGrid& g) {
  const double params[3][3] = {{0.0, 1.0, 0.0}, {0.5, 0.8, 1.0}, {-0.7, 1.2, -0.5}};
  std::vector<Vector> out;
  for (const auto& q : params) {
    Vector v(g.n());
    for (Index j = 0; j < g.n(); ++j) {
      const double x = g.position(j);
      v(j) = std::exp(-(x - q[0]) * (x - q[0]) / (2.0 * q[1] * q[1])) * std::polar(1.0, q[2] * x);
    }
    out.push_back(v / v.norm());
  }
  return out;
}

std::vector<Quadruple> gaussian_quadruples(const MagneticGrid& g) {
  const auto v = gaussian_vectors(g);
  std::vector<Quadruple> out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.push_back({v[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(j)],
                                               v[static_cast<std::size_t>((i + 1) % 3)], v[static_cast<std::size_t>((j + 2) % 3)]});
  return out;
}

Json task_verify_sq(Context& ctx, const Json& p) {
  const auto& fam = ctx.family();
  const bool gaussian = p.contains("vectors") && p.at("vectors") == "gaussian";
  if (gaussian && !ctx.backend.grid) invalid("verify_sq: gaussian vectors need a magnetic backend");
  SqReport rep;
  if (gaussian) {
    rep = verify_sq_on(fam, gaussian_quadruples(*ctx.backend.grid), ctx.tol);
  } else {
    SqOptions o;
    o.tol = ctx.tol;
    o.basis_limit = int_param(p, "basis_limit", 8, 1, 16);
    o.random_trials = int_param(p, "trials", 200, 1, 10000);
    o.seed = static_cast<std::uint64_t>(ctx.rng.index(1 << 30));
    rep = verify_sq(fam, o);
  }
  Json out = to_json(rep);
  if (bool_param(p, "commutant", fam.hdim() <= 16 && fam.points() <= 4096)) {
    out["commutant_dim"] = commutant_dim(fam);
  }
  return out;
}

// ----------------------------------------------------------------- quantize

Json task_quantize(Context& ctx, const Json& p) {
  const auto& q = ctx.quant();
  const bool explicit_symbols = p.contains("symbols");
  const bool emit = bool_param(p, "emit", explicit_symbols);
  const auto syms = symbols_param(ctx, p, 50, false);
  double roundtrip = 0.0, isometry = 0.0;
  Json ops = Json::array();
  for (std::size_t i = 0; i < syms.size(); ++i) {
    const Operator t = quantize(q, syms[i]);
    if (emit) ops.push_back(to_json(t));
    roundtrip = std::max(roundtrip, max_abs(dequantize(q, t).values() - project_b2(q, syms[i]).values()));
    const Symbol f = project_b2(q, syms[i]);
    const Symbol g = project_b2(q, syms[(i + 1) % syms.size()]);
    isometry = std::max(isometry, std::abs(hs_inner(quantize(q, f), quantize(q, g)) - l2_inner(f, g)));
  }
  Json out = {{"count", syms.size()},
              {"b2_rank", q.b2_rank()},
              {"roundtrip_residual", roundtrip},
              {"isometry_residual", isometry},
              {"verdict", verdict(roundtrip <= ctx.tol && isometry <= ctx.tol)}};
  if (emit) out["operators"] = std::move(ops);
  return out;
}

// --------------------------------------------------------------- dequantize

Json task_dequantize(Context& ctx, const Json& p) {
  const auto& q = ctx.quant();
  std::vector<Operator> ops;
  const bool explicit_ops = p.contains("operators");
  if (explicit_ops) {
    const Json& a = p.at("operators");
    if (!a.is_array() || a.empty()) invalid("'operators' must be a nonempty array");
    for (const auto& j : a) {
      Operator t = operator_from_json(j);
      if (t.rows() != q.hdim()) invalid("dequantize: operator dimension differs from hdim");
      ops.push_back(std::move(t));
    }
  } else {
    const Index k = int_param(p, "random", 20, 1, 1000);
    for (Index i = 0; i < k; ++i) ops.push_back(ctx.rng.matrix(q.hdim(), q.hdim()));
  }
  const bool emit = bool_param(p, "emit", explicit_ops);
  double roundtrip = 0.0;
  Json syms = Json::array();
  for (const auto& t : ops) {
    const Symbol f = dequantize(q, t);
    if (emit) syms.push_back(to_json(f));
    roundtrip = std::max(roundtrip, (quantize(q, f) - t).cwiseAbs().maxCoeff());
  }
  Json out = {{"count", ops.size()}, {"roundtrip_residual", roundtrip}, {"verdict", verdict(roundtrip <= ctx.tol)}};
  if (emit) out["symbols"] = std::move(syms);
  return out;
}

// --------------------------------------------------------------- star_table

Json task_star_table(Context& ctx, const Json& p) {
  const auto& q = ctx.quant();
  const auto syms = symbols_param(ctx, p, 3, true);
  const double load = std::pow(static_cast<double>(q.family().points()), 3) *
                      static_cast<double>(q.hdim() * q.hdim());
  const bool explicit_kernel = bool_param(p, "explicit", load <= 2.0e8);
  Json table = Json::array();
  double explicit_res = 0.0, assoc = 0.0, cyclic = 0.0, invol = 0.0;
  for (std::size_t i = 0; i < syms.size(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < syms.size(); ++j) {
      const Symbol fg = star(q, syms[i], syms[j]);
      row.push_back(vector_to_json(fg.values()));
      if (explicit_kernel)
        explicit_res = std::max(explicit_res, max_abs(fg.values() - star_explicit(q, syms[i], syms[j]).values()));
      const Symbol& h = syms[(i + j + 1) % syms.size()];
      assoc = std::max(assoc, max_abs(star(q, fg, h).values() - star(q, syms[i], star(q, syms[j], h)).values()));
      cyclic = std::max(cyclic, std::abs(l2_inner(fg, h) - l2_inner(syms[j], star(q, involution(q, syms[i]), h))));
    }
    table.push_back(std::move(row));
    if (explicit_kernel)
      invol = std::max(invol, max_abs(involution(q, syms[i]).values() - involution_explicit(q, syms[i]).values()));
  }
  // Product rule on coefficient symbols of random vectors.
  const Index d = q.hdim();
  const Vector u1 = ctx.rng.vector(d), v1 = ctx.rng.vector(d), u2 = ctx.rng.vector(d), v2 = ctx.rng.vector(d);
  const auto& fam = q.family();
  const double product_rule = max_abs(star(q, coefficient(fam, u1, v1), coefficient(fam, u2, v2)).values() -
                                      inner(u2, v1) * coefficient(fam, u1, v2).values());
  const double involution_rule = max_abs(involution(q, coefficient(fam, u1, v1)).values() -
                                         coefficient(fam, v1, u1).values());
  const double loose = std::max(ctx.tol, 1e-9);
  bool ok = assoc <= ctx.tol && cyclic <= ctx.tol && product_rule <= ctx.tol && involution_rule <= ctx.tol;
  if (explicit_kernel) ok = ok && explicit_res <= loose && invol <= loose;
  Json out = {{"count", syms.size()},
              {"table", std::move(table)},
              {"associativity_residual", assoc},
              {"cyclicity_residual", cyclic},
              {"product_rule_residual", product_rule},
              {"involution_rule_residual", involution_rule},
              {"verdict", verdict(ok)}};
  if (explicit_kernel) {
    out["explicit_star_residual"] = explicit_res;
    out["explicit_involution_residual"] = invol;
  }
  return out;
}

// ------------------------------------------------------------------ berezin

Json task_berezin(Context& ctx, const Json& p) {
  const auto& fam = ctx.family();
  const Index d = fam.hdim(), n = fam.points();
  Vector w;
  if (!p.contains("w")) {
    w = basis_vector(d, 0);
  } else if (p.at("w").is_number_integer()) {
    w = basis_vector(d, int_param(p, "w", 0, 0, d - 1));
  } else {
    w = vector_from_json(p.at("w"));
    if (w.size() != d) invalid("berezin: fiducial vector dimension differs from hdim");
    if (w.norm() == 0.0) invalid("berezin: fiducial vector is zero");
    w /= w.norm();
  }
  const Index trials = int_param(p, "random", 100, 1, 10000);
  const Frame fr(fam, w, ctx.tol);
  const double tol = ctx.tol;

  const Operator pw = kernel_projector(fr);
  const double idempotent = (pw * pw - pw).cwiseAbs().maxCoeff();
  const RealVector wts = fam.space()->weights();
  // Self-adjoint for the weighted inner product: W P = (W P)^*.
  const Operator wp = wts.cast<Complex>().asDiagonal() * pw;
  const double self_adjoint = (wp - wp.adjoint()).cwiseAbs().maxCoeff();
  Eigen::ComplexEigenSolver<Operator> es(pw, false);
  Index rank = 0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()(i) - 1.0) < 1e-6) ++rank;

  double inversion = 0.0, norm_excess = 0.0, min_eig = 0.0, trace_res = 0.0, toeplitz_res = 0.0,
         three_way = 0.0, factor_res = 0.0, synth_res = 0.0;
  const bool with_quantizer = static_cast<double>(n) * static_cast<double>(d * d) <= kQuantizerCapacity;
  std::optional<Quantizer> q;
  if (with_quantizer) q.emplace(fam, tol);
  for (Index t = 0; t < trials; ++t) {
    const Vector u = ctx.rng.vector(d);
    inversion = std::max(inversion, max_abs(synthesis(fr, analysis(fr, u)) - u));
    const bool real_symbol = t % 2 == 0;
    Vector vals = ctx.rng.vector(n);
    if (real_symbol) vals = vals.real().cast<Complex>();
    const Symbol f(fam.space(), vals);
    const Operator om = berezin_op(fr, f);
    norm_excess = std::max(norm_excess, op_norm(om) - max_abs(vals));
    const Symbol fpos(fam.space(), vals.cwiseAbs().cast<Complex>());
    Eigen::SelfAdjointEigenSolver<Operator> pos(berezin_op(fr, fpos), Eigen::EigenvaluesOnly);
    min_eig = std::min(min_eig, pos.eigenvalues().minCoeff());
    Complex tr_side = 0.0;
    for (Index s = 0; s < n; ++s) tr_side += wts(s) * f(s) * fr.orbit().col(s).squaredNorm();
    trace_res = std::max(trace_res, std::abs(om.trace() - tr_side));
    const Operator delta = toeplitz_op(fr, f);
    toeplitz_res = std::max(toeplitz_res, (delta - toeplitz_via_berezin(fr, f)).cwiseAbs().maxCoeff());
    const Symbol bt = berezin_transform(fr, f);
    three_way = std::max({three_way, max_abs(covariant_symbol_sigma(fr, delta).values() - bt.values()),
                          max_abs(covariant_symbol_tau(fr, om).values() - bt.values())});
    if (q) {
      factor_res = std::max(factor_res, berezin_as_quantization(fr, *q, f).residual);
      synth_res = std::max(synth_res, max_abs(synthesis(fr, f) - quantize(*q, f) * w));
    }
  }
  const double resolution = fr.resolution_residual();
  bool ok = resolution <= tol && inversion <= tol && idempotent <= tol && self_adjoint <= tol &&
            rank == d && norm_excess <= tol && min_eig >= -tol && trace_res <= tol &&
            toeplitz_res <= tol && three_way <= tol;
  Json out = {{"fiducial", vector_to_json(w)},
              {"trials", trials},
              {"resolution_residual", resolution},
              {"inversion_residual", inversion},
              {"projector_idempotence", idempotent},
              {"projector_self_adjointness", self_adjoint},
              {"projector_rank", rank},
              {"norm_bound_excess", norm_excess},
              {"min_eigenvalue_positive_symbol", min_eig},
              {"trace_residual", trace_res},
              {"toeplitz_residual", toeplitz_res},
              {"covariant_symbol_residual", three_way}};
  if (q) {
    out["factorization_residual"] = factor_res;
    out["synthesis_residual"] = synth_res;
    ok = ok && factor_res <= tol && synth_res <= tol;
    if (static_cast<double>(n) * static_cast<double>(n) <= 1.0e6) {
      double iso = 0.0;
      for (int k = 0; k < 5; ++k) {
        const Symbol g = project_b2(*q, Symbol(fam.space(), ctx.rng.vector(n)));
        iso = std::max(iso, std::abs(l2_norm(upsilon_transform(fr, *q, g)) - l2_norm(g)));
      }
      out["upsilon_isometry_residual"] = iso;
      ok = ok && iso <= tol;
    }
  }
  out["verdict"] = verdict(ok);
  return out;
}

// ---------------------------------------------------------------- inftensor

Json task_inftensor(Context& ctx, const Json& p) {
  const Backend factor_backend = p.contains("factor") ? build_backend(p.at("factor")) : ctx.backend;
  const OperatorFamily& fam = factor_backend.family;
  const Index j_count = int_param(p, "J", 3, 1, 12);
  const auto base = identity_point(fam, 1e-12);
  if (!base) invalid("inftensor: factor family has no point carrying the identity");
  Vector fid = basis_vector(fam.hdim(), 0);
  if (p.contains("fiducial")) {
    fid = vector_from_json(p.at("fiducial"));
    if (fid.size() != fam.hdim() || fid.norm() == 0.0) invalid("inftensor: bad fiducial vector");
    fid /= fid.norm();
  }
  std::vector<ProductFactor> factors(static_cast<std::size_t>(j_count), ProductFactor{fam, *base, fid});
  const RestrictedProduct rp(factors);
  const double tol = ctx.tol;

  // One random level-M vector pair per M, and an entangled witness at level J.
  std::vector<std::pair<Vector, Vector>> level_vecs;
  for (Index m = 1; m <= j_count; ++m) {
    const Index dm = rp.leading_dim(m);
    level_vecs.emplace_back(rp.embed(m, ctx.rng.unit_vector(dm)), rp.embed(m, ctx.rng.unit_vector(dm)));
  }
  const Vector witness = ctx.rng.unit_vector(rp.dim());
  const Vector product = rp.embed(0, Vector::Ones(1));

  Json rows = Json::array();
  bool exact_ok = true, witness_ok = true, omega_monotone = true;
  double prev_omega = std::numeric_limits<double>::infinity(), overlap_ratio = 0.0;
  double last_omega = 0.0, last_witness = 0.0;
  for (Index nlev = 1; nlev <= j_count; ++nlev) {
    Json defects = Json::array();
    for (Index m = 1; m <= j_count; ++m) {
      const auto& [u, v] = level_vecs[static_cast<std::size_t>(m - 1)];
      const double dfct = sq_defect(rp, nlev, u, v);
      defects.push_back(dfct);
      if (m <= nlev && dfct > tol) exact_ok = false;
    }
    const double wd = sq_defect(rp, nlev, witness, witness);
    if (nlev < j_count && !(wd > tol)) witness_ok = false;
    if (nlev == j_count && wd > tol) witness_ok = false;
    last_witness = wd;
    const SpacePtr space = rp.level_space(nlev);
    const Operator om = berezin_truncated(rp, nlev, product, Symbol::constant(space, 1.0));
    const double omega = op_norm(om - Operator::Identity(rp.dim(), rp.dim()));
    if (omega > prev_omega + tol) omega_monotone = false;
    prev_omega = omega;
    last_omega = omega;
    for (Index m = 1; m <= nlev; ++m) {
      const auto& [u1, v1] = level_vecs[static_cast<std::size_t>(m - 1)];
      const auto ov = level_overlap(rp, nlev, m, u1, v1, witness, witness);
      if (ov.bound > 0.0) overlap_ratio = std::max(overlap_ratio, ov.value / ov.bound);
    }
    rows.push_back({{"N", nlev},
                    {"sq_defect_level", std::move(defects)},
                    {"sq_defect_witness", wd},
                    {"berezin_identity_residual", omega}});
  }

  // Norm bound and positivity of the truncated Berezin operators.
  double norm_excess = 0.0, min_eig = 0.0;
  const Index trials = int_param(p, "random", 20, 1, 1000);
  for (Index t = 0; t < trials; ++t) {
    const Index nlev = 1 + (t % j_count);
    const SpacePtr space = rp.level_space(nlev);
    const Vector u = ctx.rng.vector(rp.dim());
    const Vector vals = ctx.rng.vector(space->size());
    const Operator om = berezin_truncated(rp, nlev, u, Symbol(space, vals));
    norm_excess = std::max(norm_excess, op_norm(om) - u.squaredNorm() * max_abs(vals));
    Eigen::SelfAdjointEigenSolver<Operator> es(
        berezin_truncated(rp, nlev, u, Symbol(space, vals.cwiseAbs().cast<Complex>())), Eigen::EigenvaluesOnly);
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff() / std::max(1.0, u.squaredNorm() * max_abs(vals)));
  }

  // At N = J the truncated operator matches the frame of the adjoint tensor family.
  OperatorFamily adj = adjoint_family(fam);
  OperatorFamily full = adj;
  for (Index k = 1; k < j_count; ++k) full = tensor(full, adj);
  const Frame fr(full, product, tol);
  const SpacePtr top = rp.level_space(j_count);
  const Symbol f(top, ctx.rng.vector(top->size()));
  const double cross = (berezin_truncated(rp, j_count, product, f) - berezin_op(fr, Symbol(full.space(), f.values())))
                           .cwiseAbs()
                           .maxCoeff();

  const std::vector<Index> b = rp.base_points();
  const double kernel_base = std::abs(frame_kernel_inf(rp, product, b, b) - 1.0);

  const bool ok = exact_ok && witness_ok && omega_monotone && last_omega <= tol && norm_excess <= tol &&
                  min_eig >= -tol && cross <= tol && kernel_base <= tol && overlap_ratio <= 1.0 + 1e-12;
  return {{"J", j_count},
          {"dim", rp.dim()},
          {"table", std::move(rows)},
          {"level_exactness", verdict(exact_ok)},
          {"witness_final_defect", last_witness},
          {"witness_positive_below_J", witness_ok},
          {"berezin_identity_monotone", omega_monotone},
          {"max_overlap_ratio", overlap_ratio},
          {"norm_bound_excess", norm_excess},
          {"min_eigenvalue_positive_symbol", min_eig},
          {"cross_module_residual", cross},
          {"kernel_base_residual", kernel_base},
          {"verdict", verdict(ok)}};
}

// ----------------------------------------------------------- magnetic_study

struct GaussianSymbol {
  double amplitude, q0, p0, sq, sp, tilt;
  Complex operator()(double q, double p) const {
    return amplitude * std::exp(-(q - q0) * (q - q0) / (2.0 * sq * sq) - (p - p0) * (p - p0) / (2.0 * sp * sp)) *
           Complex(1.0, tilt * p);
  }
};

GaussianSymbol gaussian_param(const Json& p, const char* key, GaussianSymbol fallback) {
  if (!p.contains(key)) return fallback;
  const Json& g = p.at(key);
  if (!g.is_object()) invalid(std::string("magnetic_study: '") + key + "' must be an object");
  GaussianSymbol s = fallback;
  s.amplitude = num_param(g, "amplitude", s.amplitude);
  s.q0 = num_param(g, "q0", s.q0);
  s.p0 = num_param(g, "p0", s.p0);
  s.sq = num_param(g, "sq", s.sq);
  s.sp = num_param(g, "sp", s.sp);
  s.tilt = num_param(g, "tilt", s.tilt);
  if (!(s.sq > 0.0 && s.sp > 0.0)) invalid("magnetic_study: symbol widths must be positive");
  return s;
}

double momentum_residual(const MagneticGrid& g) {
  // Op^0(p) against F^{-1} diag(xi) F with the grid's own frequencies.
  const Index n = g.n();
  Operator f(n, n);
  for (Index l = 0; l < n; ++l)
    for (Index j = 0; j < n; ++j) f(l, j) = std::polar(1.0 / std::sqrt(static_cast<double>(n)), -g.frequency(l) * g.position(j));
  RealVector xi(n);
  for (Index l = 0; l < n; ++l) xi(l) = g.frequency(l);
  const Operator spectral = f.adjoint() * xi.cast<Complex>().asDiagonal() * f;
  const Operator op = g.op_a(g.sample([](double, double p) { return Complex(p, 0.0); }));
  return op_norm(op - spectral) / std::max(1.0, op_norm(spectral));
}

Json task_magnetic_study(Context& ctx, const Json& p) {
  std::vector<Index> grids = {32, 64, 128};
  if (p.contains("grids")) {
    const Json& gj = p.at("grids");
    if (!gj.is_array() || gj.empty()) invalid("magnetic_study: 'grids' must be a nonempty array");
    grids.clear();
    for (const auto& x : gj) {
      if (!x.is_number_integer()) invalid("magnetic_study: grid sizes must be integers");
      const Index n = x.get<Index>();
      if (n < 4 || n % 2 || n > 256) invalid("magnetic_study: grid sizes must be even, between 4 and 256");
      grids.push_back(n);
    }
  }
  const double length = num_param(p, "L", ctx.backend.grid ? ctx.backend.grid->length() : 16.0);
  if (!(length > 0.0)) invalid("magnetic_study: L must be positive");
  const Json potential = p.contains("A") ? p.at("A") : Json{{"type", "sine"}, {"amplitude", 0.3}, {"wavenumber", 0.5}};
  const Json rho_linear = p.contains("rho_linear") ? p.at("rho_linear") : Json{{"type", "linear"}, {"slope", 0.7}};
  const Json rho_smooth = p.contains("rho_smooth") ? p.at("rho_smooth")
                                                   : Json{{"type", "gaussian"}, {"amplitude", 1.0}, {"width", 1.5}};
  const GaussianSymbol a = gaussian_param(p, "a", {1.0, 0.5, 0.0, 1.0, 3.0, 0.3});
  const GaussianSymbol b = gaussian_param(p, "b", {1.0, -0.3, 1.0, 1.0, 2.5, 0.0});
  const double comp_threshold = num_param(p, "composition_threshold", 1e-4);
  const double gauge_threshold = num_param(p, "gauge_threshold", 1e-10);
  const double reduction_threshold = num_param(p, "reduction_threshold", 1e-8);
  const Index reduction_n = int_param(p, "reduction_n", 64, 4, 256);
  if (reduction_n % 2) invalid("magnetic_study: reduction_n must be even");

  Json rows = Json::array();
  std::vector<double> comp, smooth;
  bool gauge_ok = true, sq_ok = true, unit_ok = true, adjoint_ok = true;
  for (Index n : grids) {
    MagneticParams mp;
    mp.n = n;
    mp.length = length;
    mp.potential = sample_profile(potential, n, length, "magnetic_study A");
    const MagneticGrid g(mp);
    const Symbol sa = g.sample(a), sb = g.sample(b);
    const double c = composition_residual(g, sa, sb);
    const double gl = gauge_transform_check(g, sample_profile(rho_linear, g, "rho_linear"), sa);
    const double gs = gauge_transform_check(g, sample_profile(rho_smooth, g, "rho_smooth"), sa);
    const SqReport sq = verify_sq_on(g.family(), gaussian_quadruples(g), mp.tolerance);
    const double unit = op_norm(g.op_a(Symbol::constant(g.phase_space(), 1.0)) - Operator::Identity(n, n));
    const Symbol real_a(g.phase_space(), sa.values().real().cast<Complex>());
    const Operator ra = g.op_a(real_a);
    const double adj = (ra - ra.adjoint()).cwiseAbs().maxCoeff();
    comp.push_back(c);
    smooth.push_back(gs);
    gauge_ok = gauge_ok && gl <= gauge_threshold;
    sq_ok = sq_ok && sq.pass;
    unit_ok = unit_ok && unit <= 1e-10;
    adjoint_ok = adjoint_ok && adj <= 1e-12;
    rows.push_back({{"n", n},
                    {"composition_residual", c},
                    {"gauge_residual_linear", gl},
                    {"gauge_residual_smooth", gs},
                    {"sq_deviation", sq.max_deviation},
                    {"unit_symbol_residual", unit},
                    {"self_adjoint_residual", adj}});
  }
  bool comp_monotone = true, smooth_monotone = true;
  for (std::size_t i = 1; i < comp.size(); ++i) {
    comp_monotone = comp_monotone && comp[i] < comp[i - 1];
    smooth_monotone = smooth_monotone && smooth[i] < smooth[i - 1];
  }
  MagneticParams rp;
  rp.n = reduction_n;
  rp.length = length;
  rp.periodic = true;
  const MagneticGrid pg(rp);
  const ReductionReport red = weyl_reduction_check(pg);
  const double mom = momentum_residual(pg);
  const bool red_ok = red.max_residual <= reduction_threshold && red.max_phase_defect <= reduction_threshold &&
                      mom <= reduction_threshold;
  const bool ok = comp_monotone && comp.back() <= comp_threshold && gauge_ok && smooth_monotone && sq_ok &&
                  unit_ok && adjoint_ok && red_ok;
  return {{"L", length},
          {"table", std::move(rows)},
          {"composition_monotone", comp_monotone},
          {"composition_final", comp.back()},
          {"gauge_smooth_monotone", smooth_monotone},
          {"reduction", {{"n", reduction_n},
                         {"max_residual", red.max_residual},
                         {"max_phase_defect", red.max_phase_defect},
                         {"momentum_residual", mom}}},
          {"verdict", verdict(ok)}};
}

using TaskFn = std::function<Json(Context&, const Json&)>;

const std::map<std::string, TaskFn>& task_table() {
  static const std::map<std::string, TaskFn> table = {
      {"verify_sq", task_verify_sq},     {"quantize", task_quantize},   {"dequantize", task_dequantize},
      {"star_table", task_star_table},   {"berezin", task_berezin},     {"inftensor", task_inftensor},
      {"magnetic_study", task_magnetic_study}};
  return table;
}

Json error_report(const char* stage, const std::string& message, int code) {
  return {{"error", {{"stage", stage}, {"message", message}}}, {"exit_code", code}, {"verdict", "fail"}};
}

}  // namespace

Json describe_backend(const Json& spec) {
  const Backend b = build_backend(spec);
  const auto& fam = b.family;
  Json out = {{"kind", b.kind},
              {"name", fam.name()},
              {"hdim", fam.hdim()},
              {"points", fam.points()},
              {"total_mass", fam.space()->total_mass()},
              {"exact", fam.exact()},
              {"tolerance", fam.tolerance()}};
  const double load = static_cast<double>(fam.points()) * static_cast<double>(fam.hdim() * fam.hdim());
  if (load <= kQuantizerCapacity) {
    out["b2_rank"] = b2_rank(fam);
  } else {
    out["b2_rank"] = nullptr;
    out["b2_rank_skipped"] = "coefficient matrix too large";
  }
  if (!b.metadata.empty()) out["metadata"] = b.metadata;
  return out;
}

RunOutcome run_config(const std::string& config_text, const RunOptions& options) {
  Json config;
  try {
    config = Json::parse(config_text);
  } catch (const nlohmann::json::parse_error& e) {
    return {error_report("parse", e.what(), kExitParse), kExitParse};
  }

  std::optional<Backend> backend;
  std::uint64_t seed = 0;
  double tol_override = 0.0;
  bool has_tol = false;
  std::vector<std::pair<std::string, Json>> tasks;
  try {
    if (!config.is_object()) invalid("config must be a JSON object");
    if (!config.contains("backend")) invalid("config: missing 'backend'");
    if (config.contains("seed")) {
      const Json& s = config.at("seed");
      if (!s.is_number_unsigned()) invalid("config: 'seed' must be a nonnegative integer");
      seed = s.get<std::uint64_t>();
    }
    if (options.seed) seed = *options.seed;
    if (config.contains("tol")) {
      const Json& t = config.at("tol");
      if (!t.is_number() || !(t.get<double>() > 0.0)) invalid("config: 'tol' must be a positive number");
      tol_override = t.get<double>();
      has_tol = true;
    }
    if (options.tol) {
      if (!(*options.tol > 0.0)) invalid("tolerance override must be positive");
      tol_override = *options.tol;
      has_tol = true;
    }
    if (!config.contains("tasks") || !config.at("tasks").is_array())
      invalid("config: 'tasks' must be an array");
    if (config.at("tasks").empty()) invalid("config: task list is empty");
    for (const auto& t : config.at("tasks")) {
      std::string type;
      Json params = Json::object();
      if (t.is_string()) {
        type = t.get<std::string>();
      } else if (t.is_object() && t.contains("type") && t.at("type").is_string()) {
        type = t.at("type").get<std::string>();
        params = t;
      } else {
        invalid("config: each task must be a name or an object with a 'type'");
      }
      if (!task_table().count(type)) invalid("config: unknown task type '" + type + "'");
      tasks.emplace_back(type, params);
    }
    backend.emplace(build_backend(config.at("backend")));
  } catch (const Error& e) {
    return {error_report("validation", e.what(), kExitValidation), kExitValidation};
  } catch (const nlohmann::json::exception& e) {
    return {error_report("validation", e.what(), kExitValidation), kExitValidation};
  }

  Rng rng(seed);
  const double tol = has_tol ? tol_override : backend->family.tolerance();
  Context ctx{*backend, rng, tol, std::nullopt};
  Json report = {{"seed", seed}, {"tolerance", tol}};
  try {
    report["backend"] = describe_backend(config.at("backend"));
  } catch (const Error& e) {
    return {error_report("validation", e.what(), kExitValidation), kExitValidation};
  }
  Json results = Json::array();
  int exit_code = kExitOk;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& [type, params] = tasks[i];
    const auto start = std::chrono::steady_clock::now();
    Json r;
    try {
      r = task_table().at(type)(ctx, params);
    } catch (const Error& e) {
      r = {{"verdict", "error"}, {"message", e.what()}};
    } catch (const std::exception& e) {
      r = {{"verdict", "error"}, {"message", std::string("internal: ") + e.what()}};
    }
    r["type"] = type;
    r["index"] = i;
    if (options.timings)
      r["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.value("verdict", "fail") != "pass") exit_code = kExitTaskFailed;
    results.push_back(std::move(r));
  }
  report["tasks"] = std::move(results);
  report["verdict"] = exit_code == kExitOk ? "pass" : "fail";
  report["exit_code"] = exit_code;
  return {std::move(report), exit_code};
}

std::string dump_report(const Json& report) { return report.dump(2) + "\n"; }

std::string render_table(const Json& report) {
  std::ostringstream os;
  if (report.contains("error")) {
    os << report["error"].value("stage", "") << " error: " << report["error"].value("message", "") << "\n";
    return os.str();
  }
  if (report.contains("backend")) {
    const Json& b = report["backend"];
    os << "backend " << b.value("name", "") << "  hdim " << b.value("hdim", 0) << "  points "
       << b.value("points", 0) << "\n";
  }
  char line[256];
  std::snprintf(line, sizeof line, "%-4s %-16s %-8s %s\n", "#", "task", "verdict", "headline");
  os << line;
  for (const auto& t : report.value("tasks", Json::array())) {
    std::string headline;
    for (const char* key : {"max_deviation", "roundtrip_residual", "associativity_residual", "resolution_residual",
                            "cross_module_residual", "composition_final", "message"}) {
      if (t.contains(key)) {
        headline = std::string(key) + " " + (t[key].is_string() ? t[key].get<std::string>() : t[key].dump());
        break;
      }
    }
    std::snprintf(line, sizeof line, "%-4zu %-16s %-8s ", t.value("index", std::size_t{0}),
                  t.value("type", "").c_str(), t.value("verdict", "").c_str());
    os << line << headline << "\n";
  }
  os << "overall " << report.value("verdict", "") << "\n";
  return os.str();
}

}  // namespace opcalc
