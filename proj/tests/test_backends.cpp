#include <doctest.h>

#include "opcalc/backends.hpp"
#include "opcalc/calculus.hpp"
#include "oracles.hpp"

using namespace opcalc;

TEST_CASE("weyl operators match shift-times-clock") {
  for (Index n : {2, 3, 5})
    for (Index a = 0; a < n; ++a)
      for (Index b = 0; b < n; ++b) CHECK(oracle::max_entry(Operator(weyl_operator(n, a, b) - oracle::weyl(n, a, b))) < 1e-14);
}

TEST_CASE("weyl traces are orthogonal, N = 3") {
  double worst = 0.0;
  for (Index s = 0; s < 9; ++s)
    for (Index t = 0; t < 9; ++t) {
      const Complex tr = oracle::tr(oracle::matmul(weyl_operator(3, s / 3, s % 3), oracle::dagger(weyl_operator(3, t / 3, t % 3))));
      worst = std::max(worst, std::abs(tr - (s == t ? 3.0 : 0.0)));
    }
  CHECK(worst < 1e-13);
}

TEST_CASE("discrete Weyl families are square integrable for N = 2..5") {
  for (Index n = 2; n <= 5; ++n) {
    const auto fam = discrete_weyl(n);
    CHECK(fam.points() == n * n);
    CHECK(fam.space()->total_mass() == doctest::Approx(static_cast<double>(n)));
    const auto rep = verify_sq(fam);
    CHECK(rep.pass);
    CHECK(rep.max_deviation < 1e-12);
    CHECK(oracle::sq_basis_deviation(fam) < 1e-12);
  }
}

TEST_CASE("S3 standard irrep: pass with weight 2/6, off by half with weight 1/6") {
  const auto good = finite_group_backend(symmetric_group_3(), s3_standard_irrep());
  CHECK(good.space()->weight(0) == doctest::Approx(2.0 / 6.0));
  CHECK(verify_sq(good).pass);
  CHECK(oracle::sq_basis_deviation(good) < 1e-12);
  const auto raw = finite_group_backend(symmetric_group_3(), s3_standard_irrep(), 0.5);
  const auto rep = verify_sq(raw);
  CHECK_FALSE(rep.pass);
  CHECK(rep.max_deviation == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("S3 tables and irreps are consistent") {
  const auto g = symmetric_group_3();
  CHECK(validate_group(g) == 0);
  const auto std_irrep = s3_standard_irrep();
  const auto sign = s3_sign_irrep();
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = 0; b < 6; ++b) {
      const auto c = static_cast<std::size_t>(g.table[a][b]);
      CHECK(oracle::max_entry(Operator(oracle::matmul(std_irrep[a], std_irrep[b]) - std_irrep[c])) < 1e-14);
      CHECK(std::abs(sign[a](0, 0) * sign[b](0, 0) - sign[c](0, 0)) < 1e-14);
    }
  // Characters of the standard irrep: 2 at the identity, 0 on transpositions, -1 on 3-cycles.
  std::vector<double> chars;
  for (const auto& m : std_irrep) chars.push_back(std::round(m.trace().real() * 1e9) / 1e9);
  std::sort(chars.begin(), chars.end());
  CHECK(chars == std::vector<double>{-1, -1, 0, 0, 0, 2});
}

TEST_CASE("Z4 character: weight 1/4, SQ, rank one") {
  const auto z4 = finite_group_backend(cyclic_group(4), cyclic_character(4, 1));
  CHECK(z4.space()->weight(2) == doctest::Approx(0.25));
  CHECK(verify_sq(z4).pass);
  CHECK(b2_rank(z4) == 1);
}

TEST_CASE("group validation rejects broken tables and non-homomorphisms") {
  FiniteGroup bad{"bad", {{0, 1}, {0, 0}}};
  CHECK_THROWS_AS(validate_group(bad), Error);
  FiniteGroup nonassoc{"na", {{0, 1, 2}, {1, 0, 2}, {2, 2, 0}}};
  CHECK_THROWS_AS(validate_group(nonassoc), Error);
  auto irrep = s3_standard_irrep();
  std::swap(irrep[1], irrep[2]);
  CHECK_THROWS_AS(finite_group_backend(symmetric_group_3(), irrep), Error);
}

TEST_CASE("abelian metaplectic families") {
  const auto k1 = abelian_metaplectic({3}, 1);
  CHECK(k1.family.hdim() == 3);
  CHECK(k1.family.points() == 9);
  CHECK(verify_sq(k1.family).max_deviation < 1e-12);
  CHECK(oracle::sq_basis_deviation(k1.family) < 1e-12);
  const auto k2 = abelian_metaplectic({3}, 2);
  CHECK(k2.calibration > 0.0);
  CHECK(k2.calibration_spread < 1e-12);
  CHECK(verify_sq(k2.family).pass);
  CHECK(oracle::sq_basis_deviation(k2.family) < 1e-12);
  const auto prod = abelian_metaplectic({3, 5}, 1);
  CHECK(prod.family.hdim() == 15);
  CHECK(verify_sq(prod.family).pass);
}

TEST_CASE("metaplectic k = 2 on Z2 is rejected with the automorphism message") {
  try {
    (void)abelian_metaplectic({2}, 2);
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Validation);
    CHECK(std::string(e.what()).find("automorphism") != std::string::npos);
  }
}

TEST_CASE("trivial backend") {
  const auto t = trivial_backend();
  CHECK(t.hdim() == 1);
  CHECK(t.points() == 1);
  CHECK(t.space()->total_mass() == doctest::Approx(1.0));
  CHECK(verify_sq(t).pass);
}
