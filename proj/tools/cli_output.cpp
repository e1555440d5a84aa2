#include "cli_output.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>

namespace cli {

double round12(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

json num(double x) {
  if (!std::isfinite(x)) {
    if (std::isnan(x)) return nullptr;
    return x > 0 ? "inf" : "-inf";
  }
  return round12(x);
}

json nums(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(num(x));
  return a;
}

void write_json(std::ostream& os, const json& j) { os << j.dump(2) << "\n"; }

std::string csv_field(const json& v) {
  if (v.is_null()) return "";
  if (v.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v.get<double>());
    return buf;
  }
  if (v.is_number()) return v.dump();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") != std::string::npos) {
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  return s;
}

void write_table(std::ostream& os, const Table& t, Format f) {
  if (f == Format::Json) {
    json a = json::array();
    for (const auto& r : t.rows) {
      json o = json::object();
      for (std::size_t k = 0; k < t.header.size() && k < r.size(); ++k) o[t.header[k]] = r[k];
      a.push_back(o);
    }
    write_json(os, a);
    return;
  }
  for (std::size_t k = 0; k < t.header.size(); ++k) os << (k ? "," : "") << t.header[k];
  os << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t k = 0; k < r.size(); ++k) os << (k ? "," : "") << csv_field(r[k]);
    os << "\n";
  }
}

namespace {

void flatten(const json& j, const std::string& prefix, Table& t) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), t);
  } else if (j.is_array()) {
    if (j.empty()) t.rows.push_back({prefix, ""});
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", t);
  } else {
    t.rows.push_back({prefix, j});
  }
}

}  // namespace

void write_object(std::ostream& os, const json& j, Format f) {
  if (f == Format::Json) {
    write_json(os, j);
    return;
  }
  Table t;
  t.header = {"key", "value"};
  flatten(j, "", t);
  write_table(os, t, Format::Csv);
}

}  // namespace cli
