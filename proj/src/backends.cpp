#include "opcalc/backends.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace opcalc {

OperatorFamily trivial_backend() {
  return OperatorFamily::from_matrices("trivial", MeasureSpace::uniform("point", 1, 1.0),
                                       {Operator::Identity(1, 1)});
}

Operator weyl_operator(Index n, Index a, Index b) {
  Operator out = Operator::Zero(n, n);
  for (Index k = 0; k < n; ++k) {
    const Index phase = (b * k) % n;
    out((k + a) % n, k) = std::polar(1.0, 2.0 * M_PI * static_cast<double>(phase) / static_cast<double>(n));
  }
  return out;
}

OperatorFamily discrete_weyl(Index n) {
  require(n >= 2, ErrorCode::InvalidArgument, "discrete_weyl needs N >= 2");
  std::vector<std::string> labels;
  std::vector<Operator> ops;
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) {
      labels.push_back("(" + std::to_string(a) + "," + std::to_string(b) + ")");
      ops.push_back(weyl_operator(n, a, b));
    }
  auto space = MeasureSpace::make("weyl" + std::to_string(n), std::move(labels),
                                  RealVector::Constant(n * n, 1.0 / static_cast<double>(n)));
  return OperatorFamily::from_matrices("discrete_weyl(" + std::to_string(n) + ")", space,
                                       std::move(ops));
}

Index validate_group(const FiniteGroup& g) {
  const Index n = static_cast<Index>(g.table.size());
  require(n >= 1, ErrorCode::Validation, "group table is empty");
  for (const auto& row : g.table) {
    require(static_cast<Index>(row.size()) == n, ErrorCode::Validation, "group table is not square");
    for (Index x : row)
      require(x >= 0 && x < n, ErrorCode::Validation, "group table entry out of range");
  }
  auto mul = [&](Index a, Index b) { return g.table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]; };
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b)
      for (Index c = 0; c < n; ++c)
        require(mul(mul(a, b), c) == mul(a, mul(b, c)), ErrorCode::Validation,
                "group table is not associative");
  Index e = -1;
  for (Index a = 0; a < n && e < 0; ++a) {
    bool ok = true;
    for (Index b = 0; b < n && ok; ++b) ok = mul(a, b) == b && mul(b, a) == b;
    if (ok) e = a;
  }
  require(e >= 0, ErrorCode::Validation, "group table has no identity");
  for (Index a = 0; a < n; ++a) {
    bool has_inverse = false;
    for (Index b = 0; b < n && !has_inverse; ++b) has_inverse = mul(a, b) == e;
    require(has_inverse, ErrorCode::Validation, "group element without inverse");
  }
  return e;
}

OperatorFamily finite_group_backend(const FiniteGroup& g, const std::vector<Operator>& irrep,
                                    double normalization) {
  validate_group(g);
  const Index n = static_cast<Index>(g.table.size());
  require(static_cast<Index>(irrep.size()) == n, ErrorCode::Validation,
          "representation must give one matrix per group element");
  require(normalization > 0.0, ErrorCode::Validation, "normalization must be positive");
  const Index d = irrep.front().rows();
  const double tol = kDefaultTolerance;
  for (Index a = 0; a < n; ++a) {
    const Operator& m = irrep[static_cast<std::size_t>(a)];
    require(m.rows() == d && m.cols() == d, ErrorCode::Validation, "representation matrix has wrong shape");
    require((m.adjoint() * m - Operator::Identity(d, d)).cwiseAbs().maxCoeff() <= tol,
            ErrorCode::Validation, "representation matrix is not unitary");
  }
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) {
      const Operator lhs = irrep[static_cast<std::size_t>(a)] * irrep[static_cast<std::size_t>(b)];
      const Operator& rhs = irrep[static_cast<std::size_t>(g.table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)])];
      require((lhs - rhs).cwiseAbs().maxCoeff() <= tol, ErrorCode::Validation,
              "representation is not a homomorphism");
    }
  std::vector<std::string> labels;
  for (Index a = 0; a < n; ++a) labels.push_back("g" + std::to_string(a));
  const double w = normalization * static_cast<double>(d) / static_cast<double>(n);
  auto space = MeasureSpace::make(g.name, std::move(labels), RealVector::Constant(n, w));
  return OperatorFamily::from_matrices(g.name + "/dim" + std::to_string(d), space, irrep);
}

FiniteGroup cyclic_group(Index n) {
  require(n >= 1, ErrorCode::InvalidArgument, "cyclic group needs n >= 1");
  FiniteGroup g{"Z" + std::to_string(n), {}};
  for (Index a = 0; a < n; ++a) {
    std::vector<Index> row;
    for (Index b = 0; b < n; ++b) row.push_back((a + b) % n);
    g.table.push_back(std::move(row));
  }
  return g;
}

namespace {

using Perm = std::array<int, 3>;

std::vector<Perm> s3_elements() {
  std::vector<Perm> out;
  Perm p{0, 1, 2};
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

Operator permutation_matrix(const Perm& p) {
  Operator m = Operator::Zero(3, 3);
  for (int i = 0; i < 3; ++i) m(p[static_cast<std::size_t>(i)], i) = 1.0;
  return m;
}

}  // namespace

FiniteGroup symmetric_group_3() {
  const auto el = s3_elements();
  FiniteGroup g{"S3", {}};
  for (const auto& a : el) {
    std::vector<Index> row;
    for (const auto& b : el) {
      Perm c{};
      for (int i = 0; i < 3; ++i) c[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(b[static_cast<std::size_t>(i)])];
      row.push_back(static_cast<Index>(std::find(el.begin(), el.end(), c) - el.begin()));
    }
    g.table.push_back(std::move(row));
  }
  return g;
}

std::vector<Operator> s3_standard_irrep() {
  Operator basis(3, 2);
  basis << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(6.0),
      -1.0 / std::sqrt(2.0), 1.0 / std::sqrt(6.0),
      0.0, -2.0 / std::sqrt(6.0);
  std::vector<Operator> out;
  for (const auto& p : s3_elements()) out.push_back(basis.adjoint() * permutation_matrix(p) * basis);
  return out;
}

std::vector<Operator> s3_sign_irrep() {
  std::vector<Operator> out;
  for (const auto& p : s3_elements()) {
    Operator m(1, 1);
    m(0, 0) = permutation_matrix(p).real().determinant();
    out.push_back(m);
  }
  return out;
}

std::vector<Operator> trivial_irrep(Index order) {
  return std::vector<Operator>(static_cast<std::size_t>(order), Operator::Identity(1, 1));
}

std::vector<Operator> cyclic_character(Index n, Index m) {
  std::vector<Operator> out;
  for (Index k = 0; k < n; ++k) {
    Operator c(1, 1);
    c(0, 0) = std::polar(1.0, 2.0 * M_PI * static_cast<double>(k * m % n) / static_cast<double>(n));
    out.push_back(c);
  }
  return out;
}

namespace {

// Mixed-radix helpers for Z_{n_1} x ... x Z_{n_r}, last coordinate fastest.
struct AbelianGroup {
  std::vector<Index> orders;
  Index size = 1;

  std::vector<Index> decode(Index x) const {
    std::vector<Index> c(orders.size());
    for (std::size_t i = orders.size(); i-- > 0;) {
      c[i] = x % orders[i];
      x /= orders[i];
    }
    return c;
  }
  Index encode(const std::vector<Index>& c) const {
    Index x = 0;
    for (std::size_t i = 0; i < orders.size(); ++i) x = x * orders[i] + ((c[i] % orders[i]) + orders[i]) % orders[i];
    return x;
  }
  /// <xi, z> = exp(2 pi i sum xi_i z_i / n_i) for integer coordinates.
  Complex pairing(const std::vector<Index>& xi, const std::vector<Index>& z) const {
    double phase = 0.0;
    for (std::size_t i = 0; i < orders.size(); ++i) {
      const Index prod = ((xi[i] * z[i]) % orders[i] + orders[i]) % orders[i];
      phase += static_cast<double>(prod) / static_cast<double>(orders[i]);
    }
    return std::polar(1.0, 2.0 * M_PI * phase);
  }
};

}  // namespace

MetaplecticBackend abelian_metaplectic(const std::vector<Index>& orders, int k) {
  require(!orders.empty(), ErrorCode::Validation, "abelian group needs at least one cyclic factor");
  require(k == 1 || k == 2, ErrorCode::Validation, "metaplectic variant k must be 1 or 2");
  AbelianGroup g{orders, 1};
  std::string gname;
  for (Index n : orders) {
    require(n >= 1, ErrorCode::Validation, "cyclic orders must be positive");
    g.size *= n;
    gname += (gname.empty() ? "Z" : "xZ") + std::to_string(n);
  }
  if (k == 2) {
    require(g.size % 2 == 1, ErrorCode::Validation,
            "metaplectic k=2 on " + gname + ": x -> 2x is not an automorphism of the group");
  }
  const Index n = g.size;
  std::vector<std::string> labels;
  std::vector<Operator> ops;
  for (Index x = 0; x < n; ++x) {
    const auto xc = g.decode(x);
    for (Index xi = 0; xi < n; ++xi) {
      const auto xic = g.decode(xi);
      Operator m = Operator::Zero(n, n);
      for (Index z = 0; z < n; ++z) {
        const auto zc = g.decode(z);
        std::vector<Index> arg(orders.size()), shifted(orders.size());
        for (std::size_t i = 0; i < orders.size(); ++i) {
          arg[i] = k * zc[i] + (k - 1) * xc[i];
          shifted[i] = zc[i] + xc[i];
        }
        // (pi u)(z) = <xi, kz + (k-1)x> u(z + x)
        m(z, g.encode(shifted)) = g.pairing(xic, arg);
      }
      labels.push_back("x" + std::to_string(x) + ":xi" + std::to_string(xi));
      ops.push_back(std::move(m));
    }
  }
  const double base = 1.0 / static_cast<double>(n);
  auto uncalibrated = OperatorFamily::from_matrices(
      "metaplectic", MeasureSpace::make(gname + "^", labels, RealVector::Constant(n * n, base)), ops);

  MetaplecticBackend out;
  if (k == 2) {
    // c = |u|^2 |v|^2 / int |<pi u, v>|^2 on every basis pair (u, v).
    const Operator c = coefficient_matrix(uncalibrated);
    const RealVector integrals = (c.cwiseAbs2().transpose() * RealVector::Constant(n * n, base));
    out.calibration = 1.0 / integrals(0);
    double lo = out.calibration, hi = out.calibration;
    for (Index p = 0; p < integrals.size(); ++p) {
      lo = std::min(lo, 1.0 / integrals(p));
      hi = std::max(hi, 1.0 / integrals(p));
    }
    out.calibration_spread = hi - lo;
  }
  auto space = MeasureSpace::make(gname + "^" + std::to_string(k), std::move(labels),
                                  RealVector::Constant(n * n, base * out.calibration));
  out.family = OperatorFamily::from_matrices(
      "metaplectic(" + gname + ",k=" + std::to_string(k) + ")", space, std::move(ops));
  return out;
}

}  // namespace opcalc
