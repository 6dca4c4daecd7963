// One line per acceptance criterion; exit status is nonzero if any line fails.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "opcalc/backends.hpp"
#include "opcalc/berezin.hpp"
#include "opcalc/calculus.hpp"
#include "opcalc/inftensor.hpp"
#include "opcalc/magnetic.hpp"
#include "opcalc/opcalc.h"
#include "opcalc/random.hpp"

using namespace opcalc;

namespace {

constexpr double kExactTol = 1e-10;
constexpr double kExplicitStarTol = 1e-9;
constexpr double kReductionTol = 1e-8;
constexpr double kCompositionFinal = 1e-4;
constexpr double kTightSeconds = 5.0;
constexpr double kBerezinSeconds = 10.0;
constexpr double kTensorSeconds = 10.0;
constexpr double kMagneticSeconds = 60.0;
constexpr std::uint64_t kSeed = 20260415;

struct Line {
  bool pass = true;
  std::string detail;
  void need(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

struct NamedFamily {
  std::string name;
  OperatorFamily family;
};

std::vector<NamedFamily> exact_backends() {
  std::vector<NamedFamily> out;
  for (Index n = 2; n <= 5; ++n) out.push_back({"weyl" + std::to_string(n), discrete_weyl(n)});
  out.push_back({"S3-standard", finite_group_backend(symmetric_group_3(), s3_standard_irrep())});
  out.push_back({"Z3-k1", abelian_metaplectic({3}, 1).family});
  out.push_back({"Z3-k2", abelian_metaplectic({3}, 2).family});
  out.push_back({"weyl2xweyl3", tensor(discrete_weyl(2), discrete_weyl(3))});
  return out;
}

int failures = 0;

void report(int id, const std::string& title, const std::function<void(Line&)>& body, double budget = 0.0) {
  Line line;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(line);
  } catch (const std::exception& e) {
    line.need(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget > 0.0) line.need(secs < budget, "runtime " + sci(secs) + " s over " + sci(budget) + " s");
  if (!line.pass) ++failures;
  std::printf("[%s] %2d %s (%.2f s)%s%s\n", line.pass ? "PASS" : "FAIL", id, title.c_str(), secs,
              line.detail.empty() ? "" : ": ", line.detail.c_str());
  std::fflush(stdout);
}

double max_abs(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  report(1, "coefficient orthogonality on basis quadruples", [](Line& l) {
    for (const auto& [name, fam] : exact_backends()) {
      const SqReport rep = verify_sq(fam, {kExactTol, 8, 200, kSeed});
      l.need(!rep.sampled, name + " was sampled");
      l.need(rep.max_deviation < kExactTol, name + " deviation " + sci(rep.max_deviation));
    }
  }, kTightSeconds);

  report(2, "quantization isometry and round trip", [](Line& l) {
    Rng rng(kSeed);
    for (const auto& [name, fam] : exact_backends()) {
      const Quantizer q(fam, kExactTol);
      double iso = 0.0, rt = 0.0;
      for (int t = 0; t < 50; ++t) {
        const Symbol f(fam.space(), rng.vector(fam.points())), g(fam.space(), rng.vector(fam.points()));
        iso = std::max(iso, std::abs(hs_inner(quantize(q, f), quantize(q, g)) - l2_inner(project_b2(q, f), g)));
        rt = std::max(rt, max_abs(dequantize(q, quantize(q, f)).values() - project_b2(q, f).values()));
      }
      l.need(iso < kExactTol, name + " isometry " + sci(iso));
      l.need(rt < kExactTol, name + " round trip " + sci(rt));
    }
  }, kTightSeconds);

  report(3, "star-product identities on Weyl(3)", [](Line& l) {
    const auto fam = discrete_weyl(3);
    const Quantizer q(fam, kExactTol);
    Rng rng(kSeed + 3);
    double prod = 0.0, inv = 0.0, cyc = 0.0, assoc = 0.0;
    for (int t = 0; t < 50; ++t) {
      const Vector u1 = rng.vector(3), v1 = rng.vector(3), u2 = rng.vector(3), v2 = rng.vector(3);
      prod = std::max(prod, max_abs(star(q, coefficient(fam, u1, v1), coefficient(fam, u2, v2)).values() -
                                    inner(u2, v1) * coefficient(fam, u1, v2).values()));
      inv = std::max(inv, max_abs(involution(q, coefficient(fam, u1, v1)).values() - coefficient(fam, v1, u1).values()));
      const Symbol f(fam.space(), rng.vector(9)), g(fam.space(), rng.vector(9)), h(fam.space(), rng.vector(9));
      cyc = std::max(cyc, std::abs(l2_inner(star(q, f, g), h) - l2_inner(g, star(q, involution(q, f), h))));
      assoc = std::max(assoc, max_abs(star(q, star(q, f, g), h).values() - star(q, f, star(q, g, h)).values()));
    }
    l.need(prod < kExactTol, "product rule " + sci(prod));
    l.need(inv < kExactTol, "involution rule " + sci(inv));
    l.need(cyc < kExactTol, "cyclicity " + sci(cyc));
    l.need(assoc < kExactTol, "associativity " + sci(assoc));
  });

  report(4, "explicit-kernel star product", [](Line& l) {
    Rng rng(kSeed + 4);
    for (Index n : {2, 3}) {
      const Quantizer q(discrete_weyl(n), kExactTol);
      double worst = 0.0;
      for (int t = 0; t < 20; ++t) {
        const Symbol f = project_b2(q, Symbol(q.space(), rng.vector(n * n)));
        const Symbol g = project_b2(q, Symbol(q.space(), rng.vector(n * n)));
        worst = std::max(worst, max_abs(star_explicit(q, f, g).values() - star(q, f, g).values()));
      }
      l.need(worst < kExplicitStarTol, "N=" + std::to_string(n) + " residual " + sci(worst));
    }
  });

  report(5, "point-symbol reproduction", [](Line& l) {
    Rng rng(kSeed + 5);
    auto all = exact_backends();
    all.push_back({"Z4-character", finite_group_backend(cyclic_group(4), cyclic_character(4, 1))});
    all.push_back({"trivial", trivial_backend()});
    for (const auto& [name, fam] : all) {
      const Quantizer q(fam, kExactTol);
      const Symbol f(fam.space(), rng.vector(fam.points()));
      const Symbol pf = project_b2(q, f);
      double worst = 0.0;
      for (Index s = 0; s < fam.points(); ++s) worst = std::max(worst, std::abs(pairing_with_e(q, f, s) - pf(s)));
      l.need(worst < kExactTol, name + " residual " + sci(worst));
    }
  });

  report(6, "Berezin calculus", [](Line& l) {
    Rng rng(kSeed + 6);
    const std::vector<NamedFamily> backs = {{"weyl3", discrete_weyl(3)},
                                            {"S3-standard", finite_group_backend(symmetric_group_3(), s3_standard_irrep())}};
    for (const auto& [name, fam] : backs) {
      const Index d = fam.hdim(), n = fam.points();
      const Frame fr(fam, basis_vector(d, 0), kExactTol);
      const Quantizer q(fam, kExactTol);
      l.need(fr.resolution_residual() < kExactTol, name + " resolution " + sci(fr.resolution_residual()));
      double excess = 0.0, min_eig = 0.0, tr = 0.0, toe = 0.0, cov = 0.0, fac = 0.0;
      for (int t = 0; t < 100; ++t) {
        const Symbol f(fam.space(), rng.vector(n));
        const Operator om = berezin_op(fr, f);
        excess = std::max(excess, op_norm(om) - max_abs(f.values()));
        Eigen::SelfAdjointEigenSolver<Operator> es(berezin_op(fr, Symbol(fam.space(), f.values().cwiseAbs().cast<Complex>())),
                                                   Eigen::EigenvaluesOnly);
        min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
        Complex side = 0.0;
        for (Index s = 0; s < n; ++s) side += fam.space()->weight(s) * f(s) * fr.orbit().col(s).squaredNorm();
        tr = std::max(tr, std::abs(om.trace() - side));
        const Operator p = kernel_projector(fr);
        const Operator direct = p * f.values().asDiagonal() * p;
        toe = std::max(toe, (toeplitz_op(fr, f) - direct).cwiseAbs().maxCoeff());
        const Symbol bt = berezin_transform(fr, f);
        cov = std::max({cov, max_abs(covariant_symbol_sigma(fr, toeplitz_op(fr, f)).values() - bt.values()),
                        max_abs(covariant_symbol_tau(fr, om).values() - bt.values())});
        fac = std::max(fac, berezin_as_quantization(fr, q, f).residual);
      }
      l.need(excess <= kExactTol, name + " norm bound excess " + sci(excess));
      l.need(min_eig >= -kExactTol, name + " negative eigenvalue " + sci(min_eig));
      l.need(tr < kExactTol, name + " trace " + sci(tr));
      l.need(toe < kExactTol, name + " toeplitz " + sci(toe));
      l.need(cov < kExactTol, name + " covariant symbols " + sci(cov));
      l.need(fac < kExactTol, name + " factorization " + sci(fac));
    }
  }, kBerezinSeconds);

  report(7, "b2 rank structure", [](Line& l) {
    for (Index n = 2; n <= 5; ++n) {
      const Index r = b2_rank(discrete_weyl(n));
      l.need(r == n * n, "weyl" + std::to_string(n) + " rank " + std::to_string(r));
    }
    const Index s3 = b2_rank(finite_group_backend(symmetric_group_3(), s3_standard_irrep()));
    l.need(s3 == 4, "S3 rank " + std::to_string(s3));
    const Index z4 = b2_rank(finite_group_backend(cyclic_group(4), cyclic_character(4, 1)));
    l.need(z4 == 1, "Z4 rank " + std::to_string(z4));
  });

  report(8, "irreducibility and the direct-sum counterexample", [](Line& l) {
    auto all = exact_backends();
    all.push_back({"Z4-character", finite_group_backend(cyclic_group(4), cyclic_character(4, 1))});
    for (const auto& [name, fam] : all) {
      if (!verify_sq(fam).pass) continue;
      const Index c = commutant_dim(fam);
      l.need(c == 1, name + " commutant " + std::to_string(c));
    }
    const auto sum = direct_sum_product(discrete_weyl(2), discrete_weyl(2));
    const Index c = commutant_dim(sum);
    l.need(c >= 2, "direct sum commutant " + std::to_string(c));
    const SqReport rep = verify_sq(sum);
    l.need(!rep.pass, "direct sum passed SQ");
    l.need(std::abs(rep.max_deviation - 1.0) < 1e-9, "direct sum deviation " + sci(rep.max_deviation));
  });

  report(9, "infinite tensor truncations", [](Line& l) {
    const auto w2 = discrete_weyl(2);
    const RestrictedProduct rp(std::vector<ProductFactor>(3, ProductFactor{w2, 0, basis_vector(2, 0)}));
    Rng rng(kSeed + 9);
    for (Index m = 1; m <= 3; ++m) {
      const Vector u = rp.embed(m, rng.unit_vector(rp.leading_dim(m)));
      const Vector v = rp.embed(m, rng.unit_vector(rp.leading_dim(m)));
      for (Index n = m; n <= 3; ++n) {
        const double dft = sq_defect(rp, n, u, v);
        l.need(dft < kExactTol, "level " + std::to_string(m) + " at N=" + std::to_string(n) + " defect " + sci(dft));
      }
    }
    const Vector witness = rng.unit_vector(8);
    for (Index n = 1; n < 3; ++n) {
      const double dft = sq_defect(rp, n, witness, witness);
      l.need(dft > kExactTol, "witness defect at N=" + std::to_string(n) + " not positive");
    }
    const Vector w = rp.embed(0, Vector::Ones(1));
    double prev = std::numeric_limits<double>::infinity();
    for (Index n = 1; n <= 3; ++n) {
      const double r =
          op_norm(berezin_truncated(rp, n, w, Symbol::constant(rp.level_space(n), 1.0)) - Operator::Identity(8, 8));
      l.need(r <= prev + kExactTol, "identity residual increased at N=" + std::to_string(n));
      prev = r;
    }
    l.need(prev < kExactTol, "identity residual at N=J " + sci(prev));
  }, kTensorSeconds);

  report(10, "magnetic calculus", [](Line& l) {
    MagneticParams pp;
    pp.n = 64;
    pp.periodic = true;
    const ReductionReport red = weyl_reduction_check(MagneticGrid(pp));
    l.need(red.max_residual < kReductionTol, "reduction residual " + sci(red.max_residual));
    l.need(red.max_phase_defect < kReductionTol, "reduction phase " + sci(red.max_phase_defect));
    auto a = [](double q, double p) {
      return std::exp(-(q - 0.5) * (q - 0.5) / 2.0 - p * p / 18.0) * Complex(1.0, 0.3 * p);
    };
    auto b = [](double q, double p) { return std::exp(-(q + 0.3) * (q + 0.3) / 2.0 - (p - 1.0) * (p - 1.0) / 12.5); };
    double prev = std::numeric_limits<double>::infinity();
    for (Index n : {32, 64, 128}) {
      MagneticParams mp;
      mp.n = n;
      mp.potential = RealVector(n);
      MagneticGrid probe(mp);
      for (Index j = 0; j < n; ++j) mp.potential(j) = 0.3 * std::sin(0.5 * probe.position(j));
      const MagneticGrid g(mp);
      RealVector rho(n);
      for (Index j = 0; j < n; ++j) rho(j) = 0.7 * g.position(j);
      const double gauge = gauge_transform_check(g, rho, g.sample(a));
      l.need(gauge < kExactTol, "gauge n=" + std::to_string(n) + " " + sci(gauge));
      const double comp = composition_residual(g, g.sample(a), g.sample(b));
      l.need(comp < prev, "composition not decreasing at n=" + std::to_string(n));
      prev = comp;
    }
    l.need(prev < kCompositionFinal, "final composition " + sci(prev));
  }, kMagneticSeconds);

  report(11, "byte-identical reports across repeated runs", [](Line& l) {
    for (const char* name : {"weyl3", "s3", "inftensor", "metaplectic_z3", "magnetic"}) {
      const std::string text = slurp(std::string(OPCALC_CONFIG_DIR) + "/" + name + ".json");
      std::string first;
      for (int rep = 0; rep < 2; ++rep) {
        char* out = nullptr;
        int code = -1;
        const opc_status st = opc_run_json(text.c_str(), nullptr, &out, &code);
        l.need(st == OPC_OK, std::string(name) + ": " + opc_last_error());
        if (st != OPC_OK) break;
        const std::string s(out);
        opc_string_free(out);
        l.need(code == 0, std::string(name) + " exit code " + std::to_string(code));
        if (rep == 0) first = s;
        else l.need(s == first, std::string(name) + " reports differ");
      }
    }
  });

  std::printf("%s: %d criterion line(s) failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
