#pragma once

#include <json.hpp>

#include <optional>

#include "opcalc/family.hpp"
#include "opcalc/magnetic.hpp"

namespace opcalc {

using Json = nlohmann::json;

Json to_json(const Operator& t);
Json to_json(const Symbol& f);
Json to_json(const MeasureSpace& s);
Json to_json(const SqReport& r);
Json vector_to_json(const Vector& v);

Operator operator_from_json(const Json& j);
/// Reads {"space": id, "re": [...], "im": [...]} on the given space. The id
/// must match when present.
Symbol symbol_from_json(const Json& j, const SpacePtr& space);
SpacePtr space_from_json(const Json& j, const std::string& id = "custom");
Vector vector_from_json(const Json& j);

/// Space block plus one operator per point.
Json family_to_json(const OperatorFamily& fam);

struct Backend {
  std::string kind;
  OperatorFamily family;
  /// Extra facts established while building (calibration constants).
  Json metadata = Json::object();
  std::optional<MagneticGrid> grid;
};

/// Builds a family from a declarative spec such as {"kind":"discrete_weyl","N":3}.
/// Malformed specs raise Validation errors.
Backend build_backend(const Json& spec);

/// Sampled potential or gauge function: an array of samples, or
/// {"type": "zero" | "constant" | "linear" | "sine" | "gaussian", ...}.
RealVector sample_profile(const Json& spec, const MagneticGrid& grid, const char* what);
RealVector sample_profile(const Json& spec, Index n, double length, const char* what);

}  // namespace opcalc
