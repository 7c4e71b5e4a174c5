#pragma once

#include <json.hpp>
#include <string>

#include "fplab/geometry.hpp"

namespace fplab {

// ordered_json keeps insertion order, which keeps reports byte-stable.
using Json = nlohmann::ordered_json;

Json vec_to_json(const Vec& v);
Vec vec_from_json(const Json& j, const std::string& where);

/// Basis vectors as rows, i.e. an array of arrays.
Json basis_to_json(const Subspace& F);
Subspace subspace_from_json(const Json& j, const std::string& where);

/// Doubles pass through; infinities become the string "inf" so reports
/// stay valid JSON.
Json finite_or_tag(double x);

/// Fixed 17-significant-digit rendering, round-trip safe for doubles.
std::string csv_double(double x);

}  // namespace fplab
