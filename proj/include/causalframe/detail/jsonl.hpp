#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "causalframe/detail/text.hpp"
#include "causalframe/error.hpp"

namespace causalframe::detail {

using json = nlohmann::json;

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open input file: " + path.string());
  return in;
}

inline json parse_json_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

// Calls fn(object, line_number) for every non-blank line. Blank lines are
// skipped; any other line that is not a JSON object is a SchemaError.
template <typename Fn>
void for_each_jsonl(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    if (!obj.is_object()) throw SchemaError("expected a JSON object", line_no);
    fn(obj, line_no);
  }
}

template <typename Fn>
void for_each_jsonl(const std::filesystem::path& path, Fn&& fn) {
  auto in = open_input(path);
  for_each_jsonl(in, std::forward<Fn>(fn));
}

inline const json& require(const json& obj, std::string_view key, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError("missing field '" + std::string(key) + "'", line);
  return *it;
}

inline std::string require_string(const json& obj, std::string_view key, std::size_t line) {
  const auto& v = require(obj, key, line);
  if (!v.is_string()) throw SchemaError("field '" + std::string(key) + "' must be a string", line);
  return v.get<std::string>();
}

inline double require_number(const json& obj, std::string_view key, std::size_t line) {
  const auto& v = require(obj, key, line);
  if (!v.is_number()) throw SchemaError("field '" + std::string(key) + "' must be a number", line);
  return v.get<double>();
}

inline std::size_t require_index(const json& obj, std::string_view key, std::size_t line) {
  const auto& v = require(obj, key, line);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw SchemaError("field '" + std::string(key) + "' must be a nonnegative integer", line);
  return v.get<std::size_t>();
}

inline bool in_unit_interval(double p) noexcept { return p >= 0.0 && p <= 1.0; }

}  // namespace causalframe::detail
