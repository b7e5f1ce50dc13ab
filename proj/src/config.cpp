// Copyright (c) the Foveate Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fovea/config.hpp"

#include <fstream>
#include <sstream>

namespace fovea {
namespace {

std::string trim(const std::string& s) {
  const std::size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const std::size_t end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t consumed = 0;
    const double parsed = std::stod(value, &consumed);
    if (consumed != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key +
                                "' is not a number: " + value);
  }
}

}  // namespace

ConfigError::ConfigError(std::size_t line, const std::string& what)
    : std::runtime_error("config line " + std::to_string(line) + ": " + what),
      line_(line) {}

Config Config::parse_string(const std::string& text) {
  Config config;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::size_t comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ConfigError(line_number, "malformed section header: " + line);
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw ConfigError(line_number, "empty section name");
      }
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(line_number, "expected 'key = value': " + line);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(line_number, "empty key");
    }
    config.set(section.empty() ? key : section + "." + key, value);
  }
  return config;
}

Config Config::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read config: " + path.string());
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_string(text);
}

bool Config::has(const std::string& key) const {
  return entries_.count(key) != 0;
}

void Config::set(const std::string& key, const std::string& value) {
  entries_[key] = value;
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : parse_double(key, it->second);
}

std::int64_t Config::get_int(const std::string& key,
                             std::int64_t fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    std::size_t consumed = 0;
    const long long parsed = std::stoll(it->second, &consumed, 0);
    if (consumed != it->second.size()) throw std::invalid_argument(it->second);
    return parsed;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key +
                                "' is not an integer: " + it->second);
  }
}

std::uint64_t Config::get_uint64(const std::string& key,
                                 std::uint64_t fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    std::size_t consumed = 0;
    const unsigned long long parsed = std::stoull(it->second, &consumed, 0);
    if (consumed != it->second.size()) throw std::invalid_argument(it->second);
    return parsed;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key +
                                "' is not an unsigned integer: " + it->second);
  }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw std::invalid_argument("config key '" + key +
                              "' is not a boolean: " + v);
}

std::vector<double> Config::get_double_list(
    const std::string& key, std::vector<double> fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::vector<double> values;
  std::string token;
  std::istringstream in(it->second);
  while (std::getline(in, token, ',')) {
    token = trim(token);
    if (token.empty()) {
      throw std::invalid_argument("config key '" + key +
                                  "' has an empty list entry");
    }
    values.push_back(parse_double(key, token));
  }
  if (values.empty()) {
    throw std::invalid_argument("config key '" + key + "' is an empty list");
  }
  return values;
}

}  // namespace fovea
