#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace cli {

using json = nlohmann::ordered_json;

enum class Format { Json, Csv };

// Rounded to 12 significant digits so serialized output is stable.
double round12(double x);
json num(double x);
json nums(const std::vector<double>& xs);

// Column-oriented result: CSV with a header row, or a JSON array of objects.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<json>> rows;
};

void write_json(std::ostream& os, const json& j);
void write_table(std::ostream& os, const Table& t, Format f);
// Objects in CSV become key,value rows with dotted keys and [i] indices.
void write_object(std::ostream& os, const json& j, Format f);

std::string csv_field(const json& v);

}  // namespace cli
