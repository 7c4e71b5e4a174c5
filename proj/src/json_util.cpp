#include "fplab/json_util.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

#include "fplab/errors.hpp"

namespace fplab {

Json vec_to_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec vec_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where, "expected an array of numbers");
  Vec v(static_cast<int>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(where, "expected an array of numbers");
    v[static_cast<int>(i)] = j[i].get<double>();
  }
  if (!is_finite(v)) throw ConfigError(where, "non-finite coordinate");
  return v;
}

Json basis_to_json(const Subspace& F) {
  Json a = Json::array();
  for (int c = 0; c < F.dim(); ++c) a.push_back(vec_to_json(F.basis().col(c)));
  return a;
}

Subspace subspace_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    throw ConfigError(where, "expected a non-empty array of basis vectors");
  std::vector<Vec> rows;
  for (size_t i = 0; i < j.size(); ++i)
    rows.push_back(vec_from_json(j[i], where + "/" + std::to_string(i)));
  const int d = static_cast<int>(rows[0].size());
  for (const Vec& r : rows)
    if (r.size() != d) throw ConfigError(where, "basis vectors of unequal length");
  Subspace s = orthonormalize(rows, d);
  if (s.dim() != static_cast<int>(rows.size()))
    throw ConfigError(where, "basis vectors are linearly dependent");
  return s;
}

Json finite_or_tag(double x) {
  if (std::isfinite(x)) return x;
  return x > 0 ? "inf" : "-inf";
}

std::string csv_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace fplab
