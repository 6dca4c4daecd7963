#include "opcalc/serialize.hpp"

#include <cmath>

#include "opcalc/backends.hpp"

namespace opcalc {

namespace {

[[noreturn]] void invalid(const std::string& what) { fail(ErrorCode::Validation, what); }

const Json& field(const Json& j, const char* key, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key)) invalid(ctx + ": missing field '" + key + "'");
  return j.at(key);
}

double number(const Json& j, const char* key, const std::string& ctx) {
  const Json& v = field(j, key, ctx);
  if (!v.is_number()) invalid(ctx + ": field '" + key + "' must be a number");
  return v.get<double>();
}

double number_or(const Json& j, const char* key, double fallback, const std::string& ctx) {
  if (!j.contains(key)) return fallback;
  return number(j, key, ctx);
}

Index integer(const Json& j, const char* key, const std::string& ctx) {
  const Json& v = field(j, key, ctx);
  if (!v.is_number_integer()) invalid(ctx + ": field '" + key + "' must be an integer");
  return v.get<Index>();
}

std::vector<double> numbers(const Json& j, const std::string& ctx) {
  if (!j.is_array()) invalid(ctx + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number()) invalid(ctx + ": expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Json real_array(const RealVector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

OperatorFamily rescaled(const OperatorFamily& fam, double factor) {
  const auto& s = *fam.space();
  auto space = MeasureSpace::make(s.id() + "~", s.labels(), s.weights() * factor, s.kind(),
                                  s.quadrature_tolerance());
  return {fam.name(), space, fam.source(), fam.exactness(), fam.tolerance()};
}

}  // namespace

Json to_json(const Operator& t) {
  Json re = Json::array(), im = Json::array();
  for (Index i = 0; i < t.rows(); ++i) {
    Json rr = Json::array(), ir = Json::array();
    for (Index k = 0; k < t.cols(); ++k) {
      rr.push_back(t(i, k).real());
      ir.push_back(t(i, k).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ir));
  }
  return {{"dim", t.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

Json vector_to_json(const Vector& v) {
  return {{"re", real_array(v.real())}, {"im", real_array(v.imag())}};
}

Json to_json(const Symbol& f) {
  Json j = vector_to_json(f.values());
  j["space"] = f.space() ? f.space()->id() : "";
  return j;
}

Json to_json(const MeasureSpace& s) {
  Json j = {{"points", s.labels()},
            {"weights", real_array(s.weights())},
            {"kind", s.kind() == MeasureKind::Exact ? "exact" : "quadrature"}};
  if (s.quadrature_tolerance()) j["tol"] = *s.quadrature_tolerance();
  return j;
}

Json to_json(const SqReport& r) {
  Json res = Json::array();
  for (const auto& p : r.residuals) res.push_back({{"pair", p.label}, {"residual", p.residual}});
  return {{"max_deviation", r.max_deviation},
          {"tested_pairs", r.tested_pairs},
          {"tolerance", r.tolerance},
          {"sampled", r.sampled},
          {"verdict", r.pass ? "pass" : "fail"},
          {"residuals", std::move(res)}};
}

Operator operator_from_json(const Json& j) {
  const std::string ctx = "operator";
  const Json& re = field(j, "re", ctx);
  if (!re.is_array() || re.empty()) invalid("operator: 're' must be a nonempty array of rows");
  const Index n = static_cast<Index>(re.size());
  if (j.contains("dim") && integer(j, "dim", ctx) != n) invalid("operator: 'dim' disagrees with rows");
  const bool has_im = j.contains("im");
  if (has_im && (!j.at("im").is_array() || static_cast<Index>(j.at("im").size()) != n))
    invalid("operator: 'im' must match 're'");
  Operator t(n, n);
  for (Index i = 0; i < n; ++i) {
    const auto r = numbers(re.at(static_cast<std::size_t>(i)), ctx + " row");
    if (static_cast<Index>(r.size()) != n) invalid("operator: matrix must be square");
    std::vector<double> im(r.size(), 0.0);
    if (has_im) im = numbers(j.at("im").at(static_cast<std::size_t>(i)), ctx + " row");
    if (im.size() != r.size()) invalid("operator: 'im' must match 're'");
    for (Index k = 0; k < n; ++k) t(i, k) = Complex(r[static_cast<std::size_t>(k)], im[static_cast<std::size_t>(k)]);
  }
  if (!t.allFinite()) invalid("operator: entries must be finite");
  return t;
}

Vector vector_from_json(const Json& j) {
  std::vector<double> re, im;
  if (j.is_array()) {
    re = numbers(j, "vector");
  } else {
    re = numbers(field(j, "re", "vector"), "vector");
    if (j.contains("im")) im = numbers(j.at("im"), "vector");
  }
  if (im.empty()) im.assign(re.size(), 0.0);
  if (im.size() != re.size()) invalid("vector: 'im' must match 're'");
  Vector v(static_cast<Index>(re.size()));
  for (std::size_t i = 0; i < re.size(); ++i) v(static_cast<Index>(i)) = Complex(re[i], im[i]);
  if (!v.allFinite()) invalid("vector: entries must be finite");
  return v;
}

Symbol symbol_from_json(const Json& j, const SpacePtr& space) {
  if (j.contains("space")) {
    const Json& id = j.at("space");
    if (!id.is_string() || id.get<std::string>() != space->id())
      fail(ErrorCode::SpaceMismatch, "symbol is declared on space '" + id.dump() +
                                         "' but the family lives on '" + space->id() + "'");
  }
  Vector v = vector_from_json(j);
  if (v.size() != space->size())
    fail(ErrorCode::DimensionMismatch, "symbol has " + std::to_string(v.size()) +
                                           " values, space has " + std::to_string(space->size()));
  return {space, std::move(v)};
}

SpacePtr space_from_json(const Json& j, const std::string& id) {
  const std::string ctx = "measure space";
  const auto w = numbers(field(j, "weights", ctx), ctx + " weights");
  std::vector<std::string> labels;
  if (j.contains("points")) {
    const Json& pts = j.at("points");
    if (!pts.is_array()) invalid(ctx + ": 'points' must be an array");
    for (const auto& p : pts) labels.push_back(p.is_string() ? p.get<std::string>() : p.dump());
  } else {
    for (std::size_t i = 0; i < w.size(); ++i) labels.push_back(std::to_string(i));
  }
  MeasureKind kind = MeasureKind::Exact;
  std::optional<double> tol;
  if (j.contains("kind")) {
    const Json& k = j.at("kind");
    if (k == "quadrature") {
      kind = MeasureKind::Quadrature;
      tol = number(j, "tol", ctx);
    } else if (k != "exact") {
      invalid(ctx + ": kind must be 'exact' or 'quadrature'");
    }
  }
  RealVector wv = Eigen::Map<const RealVector>(w.data(), static_cast<Index>(w.size()));
  try {
    return MeasureSpace::make(id, std::move(labels), std::move(wv), kind, tol);
  } catch (const Error& e) {
    invalid(e.what());
  }
}

Json family_to_json(const OperatorFamily& fam) {
  Json ops = Json::array();
  for (Index s = 0; s < fam.points(); ++s) ops.push_back(to_json(fam.op(s)));
  return {{"space", to_json(*fam.space())}, {"operators", std::move(ops)}};
}

RealVector sample_profile(const Json& spec, Index n, double length, const char* what) {
  const std::string ctx = what;
  const double dx = length / static_cast<double>(n);
  if (spec.is_array()) {
    const auto v = numbers(spec, ctx);
    if (static_cast<Index>(v.size()) != n)
      invalid(ctx + ": expected " + std::to_string(n) + " samples");
    return Eigen::Map<const RealVector>(v.data(), n);
  }
  if (!spec.is_object()) invalid(ctx + ": expected samples or a profile object");
  const Json& t = field(spec, "type", ctx);
  if (!t.is_string()) invalid(ctx + ": 'type' must be a string");
  const std::string type = t.get<std::string>();
  RealVector out(n);
  for (Index j = 0; j < n; ++j) {
    const double x = -0.5 * length + static_cast<double>(j) * dx;
    double v = 0.0;
    if (type == "zero") {
      v = 0.0;
    } else if (type == "constant") {
      v = number(spec, "value", ctx);
    } else if (type == "linear") {
      v = number_or(spec, "offset", 0.0, ctx) + number(spec, "slope", ctx) * x;
    } else if (type == "sine") {
      v = number(spec, "amplitude", ctx) *
          std::sin(number(spec, "wavenumber", ctx) * x + number_or(spec, "phase", 0.0, ctx));
    } else if (type == "gaussian") {
      const double c = number_or(spec, "center", 0.0, ctx), w = number(spec, "width", ctx);
      v = number(spec, "amplitude", ctx) * std::exp(-(x - c) * (x - c) / (2.0 * w * w));
    } else {
      invalid(ctx + ": unknown profile type '" + type + "'");
    }
    out(j) = v;
  }
  return out;
}

RealVector sample_profile(const Json& spec, const MagneticGrid& grid, const char* what) {
  return sample_profile(spec, grid.n(), grid.length(), what);
}

namespace {

FiniteGroup group_from_json(const Json& spec) {
  const std::string ctx = "finite_group";
  if (spec.contains("table")) {
    FiniteGroup g{"G", {}};
    if (spec.contains("name") && spec.at("name").is_string()) g.name = spec.at("name").get<std::string>();
    const Json& t = spec.at("table");
    if (!t.is_array()) invalid(ctx + ": 'table' must be an array of rows");
    for (const auto& row : t) {
      if (!row.is_array()) invalid(ctx + ": 'table' must be an array of rows");
      std::vector<Index> r;
      for (const auto& x : row) {
        if (!x.is_number_integer()) invalid(ctx + ": table entries must be integers");
        r.push_back(x.get<Index>());
      }
      g.table.push_back(std::move(r));
    }
    return g;
  }
  const Json& name = field(spec, "group", ctx);
  if (!name.is_string()) invalid(ctx + ": 'group' must be a string such as \"S3\" or \"Z4\"");
  const std::string n = name.get<std::string>();
  if (n == "S3") return symmetric_group_3();
  if (n.size() > 1 && n[0] == 'Z') {
    try {
      return cyclic_group(std::stol(n.substr(1)));
    } catch (const std::logic_error&) {
    }
  }
  invalid(ctx + ": unknown group '" + n + "'");
}

std::vector<Operator> irrep_from_json(const Json& spec, const FiniteGroup& g) {
  const std::string ctx = "finite_group";
  const Json& ir = field(spec, "irrep", ctx);
  const Index order = static_cast<Index>(g.table.size());
  if (ir.is_array()) {
    std::vector<Operator> out;
    for (const auto& m : ir) out.push_back(operator_from_json(m));
    return out;
  }
  if (!ir.is_string()) invalid(ctx + ": 'irrep' must be a name or a list of matrices");
  const std::string name = ir.get<std::string>();
  if (name == "trivial") return trivial_irrep(order);
  if (g.name == "S3" && name == "standard") return s3_standard_irrep();
  if (g.name == "S3" && name == "sign") return s3_sign_irrep();
  if (g.name.size() > 1 && g.name[0] == 'Z' && name.rfind("character:", 0) == 0) {
    try {
      return cyclic_character(order, std::stol(name.substr(10)));
    } catch (const std::logic_error&) {
    }
  }
  invalid(ctx + ": unknown representation '" + name + "' for group " + g.name);
}

Backend build_backend_inner(const Json& spec) {
  if (!spec.is_object()) invalid("backend spec must be an object");
  const Json& kind_j = field(spec, "kind", "backend");
  if (!kind_j.is_string()) invalid("backend: 'kind' must be a string");
  const std::string kind = kind_j.get<std::string>();
  Backend b;
  b.kind = kind;
  double normalization = number_or(spec, "normalization", 1.0, "backend");
  if (!(normalization > 0.0)) invalid("backend: normalization must be positive");
  bool normalized = false;

  if (kind == "trivial") {
    b.family = trivial_backend();
  } else if (kind == "discrete_weyl") {
    const Index n = integer(spec, "N", kind);
    if (n < 2) invalid("discrete_weyl: N must be at least 2");
    if (n > 64) fail(ErrorCode::CapacityExceeded, "discrete_weyl: N above 64 is not supported");
    b.family = discrete_weyl(n);
  } else if (kind == "finite_group") {
    const FiniteGroup g = group_from_json(spec);
    if (g.table.size() > 512) fail(ErrorCode::CapacityExceeded, "finite_group: group too large");
    b.family = finite_group_backend(g, irrep_from_json(spec, g), normalization);
    normalized = true;
  } else if (kind == "abelian_metaplectic") {
    const Json& gj = field(spec, "G", kind);
    std::vector<Index> orders;
    if (gj.is_array()) {
      for (const auto& x : gj) {
        if (!x.is_number_integer()) invalid("abelian_metaplectic: G must list cyclic orders");
        orders.push_back(x.get<Index>());
      }
    } else if (gj.is_number_integer()) {
      orders.push_back(gj.get<Index>());
    } else if (gj.is_string() && gj.get<std::string>().size() > 1 && gj.get<std::string>()[0] == 'Z') {
      try {
        orders.push_back(std::stol(gj.get<std::string>().substr(1)));
      } catch (const std::logic_error&) {
        invalid("abelian_metaplectic: cannot read group " + gj.dump());
      }
    } else {
      invalid("abelian_metaplectic: G must be \"Zn\", an order, or a list of orders");
    }
    Index total = 1;
    for (Index o : orders) total *= std::max<Index>(o, 1);
    if (total > 32) fail(ErrorCode::CapacityExceeded, "abelian_metaplectic: |G| above 32 is not supported");
    const Index k = integer(spec, "k", kind);
    auto mb = abelian_metaplectic(orders, static_cast<int>(k));
    b.family = mb.family;
    b.metadata["calibration"] = mb.calibration;
    b.metadata["calibration_spread"] = mb.calibration_spread;
  } else if (kind == "magnetic_weyl") {
    MagneticParams p;
    p.n = integer(spec, "n", kind);
    p.length = number(spec, "L", kind);
    p.tolerance = number_or(spec, "tol", 1e-8, kind);
    if (spec.contains("boundary")) {
      const Json& bd = spec.at("boundary");
      if (bd == "periodic") {
        p.periodic = true;
      } else if (bd != "open") {
        invalid("magnetic_weyl: boundary must be 'open' or 'periodic'");
      }
    }
    if (p.n < 4 || p.n % 2 != 0) invalid("magnetic_weyl: n must be even and at least 4");
    if (p.n > 512) fail(ErrorCode::CapacityExceeded, "magnetic_weyl: n above 512 is not supported");
    if (spec.contains("A")) p.potential = sample_profile(spec.at("A"), p.n, p.length, "magnetic_weyl A");
    if (spec.contains("B")) p.field = sample_profile(spec.at("B"), p.n, p.length, "magnetic_weyl B");
    MagneticGrid grid(std::move(p));
    b.family = grid.family();
    b.grid = std::move(grid);
  } else if (kind == "tensor") {
    const Json& fs = field(spec, "factors", kind);
    if (!fs.is_array() || fs.size() < 2) invalid("tensor: 'factors' must list at least two backends");
    b.family = build_backend(fs.at(0)).family;
    for (std::size_t i = 1; i < fs.size(); ++i) b.family = tensor(b.family, build_backend(fs.at(i)).family);
    if (b.family.points() > 20000 || b.family.hdim() > 256)
      fail(ErrorCode::CapacityExceeded, "tensor: product family too large");
  } else if (kind == "direct_sum") {
    const Json& ps = field(spec, "parts", kind);
    if (!ps.is_array() || ps.size() < 2) invalid("direct_sum: 'parts' must list at least two backends");
    std::vector<OperatorFamily> parts;
    for (const auto& p : ps) parts.push_back(build_backend(p).family);
    std::string measure = "product";
    if (spec.contains("measure")) {
      if (!spec.at("measure").is_string()) invalid("direct_sum: 'measure' must be a string");
      measure = spec.at("measure").get<std::string>();
    }
    if (measure == "shared") {
      b.family = direct_sum_shared(parts);
    } else if (measure == "product") {
      if (parts.size() != 2) invalid("direct_sum over the product measure takes exactly two parts");
      b.family = direct_sum_product(parts[0], parts[1]);
    } else {
      invalid("direct_sum: measure must be 'product' or 'shared'");
    }
  } else if (kind == "multiplicity") {
    const Index k = integer(spec, "K", kind);
    if (k < 1 || k > 16) invalid("multiplicity: K must be between 1 and 16");
    b.family = multiplicity(build_backend(field(spec, "base", kind)).family, k);
  } else if (kind == "family") {
    const SpacePtr space = space_from_json(field(spec, "space", kind), "custom");
    const Json& ops = field(spec, "operators", kind);
    if (!ops.is_array()) invalid("family: 'operators' must be an array");
    std::vector<Operator> mats;
    for (const auto& m : ops) mats.push_back(operator_from_json(m));
    if (mats.empty()) invalid("family: no operators");
    const bool exact = space->kind() == MeasureKind::Exact;
    b.family = OperatorFamily::from_matrices(
        "family", space, std::move(mats), exact ? Exactness::Exact : Exactness::Approximate,
        exact ? kDefaultTolerance : *space->quadrature_tolerance());
  } else {
    invalid("unknown backend kind '" + kind + "'");
  }
  if (!normalized && normalization != 1.0) b.family = rescaled(b.family, normalization);
  if (normalization != 1.0) b.metadata["normalization"] = normalization;
  return b;
}

}  // namespace

Backend build_backend(const Json& spec) {
  try {
    return build_backend_inner(spec);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CapacityExceeded) throw;
    fail(ErrorCode::Validation, e.what());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Validation, std::string("backend spec: ") + e.what());
  }
}

}  // namespace opcalc
