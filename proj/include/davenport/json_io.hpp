#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace davenport {

// Finite values as numbers; infinities and NaN as the strings "inf", "-inf", "nan".
nlohmann::json json_number(double v);
double number_from_json(const nlohmann::json& j);

// Parses a JSON document; malformed text raises InvalidInput.
nlohmann::json parse_json_text(const std::string& text);
nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace davenport
