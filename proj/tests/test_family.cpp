#include <doctest.h>

#include "opcalc/backends.hpp"
#include "opcalc/random.hpp"
#include "oracles.hpp"

using namespace opcalc;

TEST_CASE("coefficient of e0 on Weyl(2) matches direct evaluation") {
  const auto fam = discrete_weyl(2);
  const Vector e0 = basis_vector(2, 0);
  const Symbol c = coefficient(fam, e0, e0);
  for (Index s = 0; s < 4; ++s) {
    const Operator m = oracle::weyl(2, s / 2, s % 2);
    CHECK(std::abs(c(s) - oracle::dot(oracle::matvec(m, e0), e0)) < 1e-15);
  }
}

TEST_CASE("coefficient orthogonality on random vectors, Weyl(3)") {
  const auto fam = discrete_weyl(3);
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const Vector u1 = rng.vector(3), v1 = rng.vector(3), u2 = rng.vector(3), v2 = rng.vector(3);
    const Complex lhs = l2_inner(coefficient(fam, u1, v1), coefficient(fam, u2, v2));
    CHECK(std::abs(lhs - oracle::sq_integral(fam, u1, v1, u2, v2)) < 1e-12);
    CHECK(std::abs(lhs - inner(u1, u2) * inner(v2, v1)) < 1e-12);
  }
}

TEST_CASE("verify_sq on Weyl(3) agrees with the brute-force basis sweep") {
  const auto fam = discrete_weyl(3);
  const SqReport rep = verify_sq(fam);
  CHECK(rep.pass);
  CHECK_FALSE(rep.sampled);
  CHECK(rep.tested_pairs == 81);
  CHECK(rep.max_deviation < 1e-12);
  CHECK(oracle::sq_basis_deviation(fam) < 1e-12);
}

TEST_CASE("direct sum over the product measure fails square integrability") {
  const auto w2 = discrete_weyl(2);
  const auto sum = direct_sum_product(w2, w2);
  CHECK(sum.hdim() == 4);
  CHECK(sum.points() == 16);
  const Vector e0 = basis_vector(4, 0);
  // The second factor only contributes its total mass.
  CHECK(std::abs(oracle::sq_integral(sum, e0, e0, e0, e0) - 2.0) < 1e-12);
  const SqReport rep = verify_sq(sum);
  CHECK_FALSE(rep.pass);
  CHECK(rep.max_deviation == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("commutant dimension against the null-space oracle") {
  CHECK(commutant_dim(discrete_weyl(2)) == 1);
  CHECK(oracle::commutant_dim(discrete_weyl(2)) == 1);
  const auto sum = direct_sum_product(discrete_weyl(2), discrete_weyl(3));
  CHECK(commutant_dim(sum) >= 2);
  CHECK(commutant_dim(sum) == oracle::commutant_dim(sum));
  const auto s3 = finite_group_backend(symmetric_group_3(), s3_standard_irrep());
  CHECK(commutant_dim(s3) == 1);
  const auto mult = multiplicity(discrete_weyl(2), 2);
  CHECK(commutant_dim(mult) == 4);
  CHECK(oracle::commutant_dim(mult) == 4);
}

TEST_CASE("invariant subspaces") {
  const auto fam = discrete_weyl(2);
  CHECK_FALSE(invariant_subspace_check(fam, basis_vector(2, 0)));
  CHECK(invariant_subspace_check(fam, Operator::Identity(2, 2)));
  CHECK(invariant_subspace_check(fam, Operator(2, 0)));
  const auto sum = direct_sum_product(discrete_weyl(2), discrete_weyl(2));
  Operator block = Operator::Zero(4, 2);
  block(0, 0) = block(1, 1) = 1.0;
  CHECK(invariant_subspace_check(sum, block));
}

TEST_CASE("tensor family: SQ and factorized coefficients") {
  const auto a = discrete_weyl(2), b = discrete_weyl(3);
  const auto t = tensor(a, b);
  CHECK(t.hdim() == 6);
  CHECK(t.points() == 36);
  CHECK(verify_sq(t).pass);
  CHECK(oracle::sq_basis_deviation(t) < 1e-12);
  Rng rng(9);
  const Vector u1 = rng.vector(2), v1 = rng.vector(2), u2 = rng.vector(3), v2 = rng.vector(3);
  const Symbol joint = coefficient(t, kron(u1, u2), kron(v1, v2));
  const Symbol ca = coefficient(a, u1, v1), cb = coefficient(b, u2, v2);
  double worst = 0.0;
  for (Index s = 0; s < t.points(); ++s) {
    const auto parts = t.space()->split(s);
    worst = std::max(worst, std::abs(joint(s) - ca(parts[0]) * cb(parts[1])));
  }
  CHECK(worst < 1e-13);
  // Lazy Kronecker application matches the dense matrix.
  const Vector x = rng.vector(6);
  for (Index s = 0; s < t.points(); s += 5) {
    CHECK(oracle::max_entry(Vector(t.apply(s, x) - t.op(s) * x)) < 1e-13);
    CHECK(oracle::max_entry(Vector(t.apply_adjoint(s, x) - t.op(s).adjoint() * x)) < 1e-13);
  }
}

TEST_CASE("compression along a non-constant fiber is rejected") {
  const auto t = tensor(discrete_weyl(2), discrete_weyl(3));
  const auto w2 = discrete_weyl(2);
  std::vector<Index> map;
  for (Index s = 0; s < t.points(); ++s) map.push_back(t.space()->split(s)[0]);
  const Vector w = basis_vector(3, 0);
  Operator iota = Operator::Zero(6, 2);
  iota.col(0) = kron(basis_vector(2, 0), w);
  iota.col(1) = kron(basis_vector(2, 1), w);
  // Weights of the product space push forward to 3/2 per point, not 1/2.
  const auto target = MeasureSpace::uniform("weyl2-heavy", 4, 1.5);
  try {
    (void)compress(t, map, target, iota);
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Validation);
    CHECK(std::string(e.what()).find("fiber") != std::string::npos);
  }
}

TEST_CASE("compression along a relabeling preserves the SQ verdict") {
  const auto fam = discrete_weyl(3);
  Rng rng(17);
  // Random unitary from a QR factorization.
  Eigen::HouseholderQR<Operator> qr(rng.matrix(3, 3));
  const Operator u = qr.householderQ();
  std::vector<Index> map(9);
  std::vector<std::string> labels(9);
  for (Index s = 0; s < 9; ++s) {
    map[static_cast<std::size_t>(s)] = (s * 4 + 1) % 9;
    labels[static_cast<std::size_t>((s * 4 + 1) % 9)] = "p" + std::to_string(s);
  }
  const auto target = MeasureSpace::make("relabel", labels, RealVector::Constant(9, 1.0 / 3.0));
  const auto c = compress(fam, map, target, u);
  CHECK(verify_sq(c).pass);
  CHECK(commutant_dim(c) == 1);
}

TEST_CASE("bounded overlap stays below the norm product") {
  Rng rng(23);
  const auto w3 = discrete_weyl(3);
  for (int t = 0; t < 10; ++t) {
    const Quadruple q{rng.unit_vector(3), rng.unit_vector(3), rng.unit_vector(3), rng.unit_vector(3)};
    const auto rep = bounded_overlap_check({w3}, q);
    CHECK(rep.within);
    CHECK(rep.value <= 1.0 + 1e-12);
  }
  const auto w2 = discrete_weyl(2);
  Vector u = Vector::Zero(4);
  u(0) = u(2) = 1.0 / std::sqrt(2.0);
  const auto rep = bounded_overlap_check({w2, w2}, {u, u, u, u});
  CHECK(rep.within);
}

TEST_CASE("identity family and identity point") {
  const auto id = identity_family(3);
  CHECK(id.points() == 1);
  CHECK(identity_point(id).value() == 0);
  CHECK(identity_point(discrete_weyl(4)).value() == 0);
}

TEST_CASE("property: random families built from unitaries keep SQ under tensoring") {
  Rng rng(31);
  for (int t = 0; t < 5; ++t) {
    const Index n1 = 2 + rng.index(3), n2 = 2 + rng.index(2);
    const auto fam = tensor(discrete_weyl(n1), discrete_weyl(n2));
    SqOptions o;
    o.basis_limit = 4;
    o.random_trials = 50;
    o.seed = 100 + static_cast<std::uint64_t>(t);
    const auto rep = verify_sq(fam, o);
    CHECK(rep.pass);
    CHECK(rep.max_deviation < 1e-12);
  }
}
