#pragma once

#include <vector>

#include "opcalc/family.hpp"

namespace opcalc {

OperatorFamily trivial_backend();

/// pi(a,b) = U^a V^b on C^N with U e_k = e_{k+1}, V = diag(omega^k); points
/// ordered with a major, weight 1/N each.
OperatorFamily discrete_weyl(Index n);
/// U^a V^b on C^n.
Operator weyl_operator(Index n, Index a, Index b);

struct FiniteGroup {
  std::string name;
  /// table[g][h] is the index of g*h.
  std::vector<std::vector<Index>> table;
};

/// Checks closure, associativity, a two-sided identity and inverses.
/// Returns the identity index.
Index validate_group(const FiniteGroup& g);

/// Weights normalization * d / |G|; normalization 1 is the square-integrable one.
OperatorFamily finite_group_backend(const FiniteGroup& g, const std::vector<Operator>& irrep,
                                    double normalization = 1.0);

FiniteGroup cyclic_group(Index n);
/// Symmetric group on three letters, elements are the permutations of
/// (0,1,2) in lexicographic order.
FiniteGroup symmetric_group_3();
std::vector<Operator> s3_standard_irrep();
std::vector<Operator> s3_sign_irrep();
std::vector<Operator> trivial_irrep(Index order);
/// chi(k) = exp(2 pi i k m / n).
std::vector<Operator> cyclic_character(Index n, Index m);

struct MetaplecticBackend {
  OperatorFamily family;
  double calibration = 1.0;
  /// Spread of the calibration constant recomputed on every basis pair.
  double calibration_spread = 0.0;
};

/// G = Z_{n_1} x ... with H = functions on G and Sigma = G x dual(G).
/// k = 1: measure counting x counting/|G|. k = 2: the dual measure is scaled
/// by a constant calibrated on a basis pair.
MetaplecticBackend abelian_metaplectic(const std::vector<Index>& orders, int k);

}  // namespace opcalc
