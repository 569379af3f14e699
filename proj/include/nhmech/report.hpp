#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace nhmech {

using Json = nlohmann::ordered_json;

/* Structured pass/fail record for a verified condition. The invariant
   pass == (max_residual <= tolerance) is maintained by finalize(). */
struct CheckReport {
  std::string name;
  int points_tested = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string grid_spec;
  Json extra = Json::object();        /* check-specific fields, merged in */
  std::vector<Json> per_point;        /* optional per-point records */

  CheckReport& finalize() {
    pass = max_residual <= tolerance;
    return *this;
  }

  Json to_json(bool include_per_point = false) const;
};

/* Render with 17 significant digits, locale-independent. */
std::string format_double(double x);

/* Deterministic JSON serialization: insertion order preserved, every
   floating-point number printed with 17 significant digits. */
std::string dump_json(const Json& j, int indent = 2);

}  // namespace nhmech
