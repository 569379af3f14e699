#include "nhmech/report.hpp"

#include <cstdio>
#include <sstream>

namespace nhmech {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

void escape_string(const std::string& s, std::string& out) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

void dump_rec(const Json& j, int indent, int depth, std::string& out) {
  const std::string pad(static_cast<size_t>(indent) * depth, ' ');
  const std::string pad1(static_cast<size_t>(indent) * (depth + 1), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad1;
        escape_string(it.key(), out);
        out += ": ";
        dump_rec(it.value(), indent, depth + 1, out);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& el : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad1;
        dump_rec(el, indent, depth + 1, out);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::string:
      escape_string(j.get<std::string>(), out);
      return;
    case Json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      return;
    case Json::value_t::number_integer:
      out += std::to_string(j.get<long long>());
      return;
    case Json::value_t::number_unsigned:
      out += std::to_string(j.get<unsigned long long>());
      return;
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += "null";
      return;
  }
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::string out;
  dump_rec(j, indent, 0, out);
  out += "\n";
  return out;
}

Json CheckReport::to_json(bool include_per_point) const {
  Json j = Json::object();
  j["name"] = name;
  j["points_tested"] = points_tested;
  j["max_residual"] = max_residual;
  j["tolerance"] = tolerance;
  j["pass"] = pass;
  j["grid_spec"] = grid_spec;
  for (auto it = extra.begin(); it != extra.end(); ++it)
    j[it.key()] = it.value();
  if (include_per_point && !per_point.empty()) {
    Json arr = Json::array();
    for (const auto& p : per_point) arr.push_back(p);
    j["per_point"] = arr;
  }
  return j;
}

}  // namespace nhmech
