// Copyright 2026 The mipmot Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Flat "key = value" configuration files.
//
//   # comment
//   tracker.theta_cls = 0.85
//   kalman.r = 0.5, 0.5, 0.5, 0.05, 0.05, 0.05, 0.05
//
// Keys are dotted names; values run to the end of the line. Lists are comma
// separated. Later assignments override earlier ones.

#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mipmot/error.hpp"
#include "mipmot/io.hpp"

namespace mipmot {

struct KeyValue {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

// Error attributable to one configuration key; what() names the key.
class ConfigError : public InvalidInput {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : InvalidInput("config key '" + key + "': " + what), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

inline std::vector<KeyValue> parse_key_values(std::istream& in, const std::string& source = "<config>") {
  detail::LineReader reader(in, source);
  std::vector<KeyValue> out;
  std::string_view line;
  while (reader.next(line)) {
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) reader.fail("expected 'key = value'");
    KeyValue kv;
    kv.key = std::string(detail::trim(line.substr(0, eq)));
    kv.value = std::string(detail::trim(line.substr(eq + 1)));
    kv.line = reader.line_no();
    if (kv.key.empty()) reader.fail("empty key");
    out.push_back(std::move(kv));
  }
  return out;
}

// Parses "key=value" as given on a command line.
inline KeyValue parse_assignment(std::string_view s) {
  const auto eq = s.find('=');
  if (eq == std::string_view::npos) throw InvalidInput("expected key=value, got '" + std::string(s) + "'");
  return {std::string(detail::trim(s.substr(0, eq))), std::string(detail::trim(s.substr(eq + 1))), 0};
}

namespace kv {

inline double as_double(const KeyValue& kv) {
  const auto v = detail::parse_double(kv.value);
  if (!v) throw ConfigError(kv.key, "expected a finite number, got '" + kv.value + "'");
  return *v;
}

inline int as_int(const KeyValue& kv) {
  const auto v = detail::parse_int(kv.value);
  if (!v) throw ConfigError(kv.key, "expected an integer, got '" + kv.value + "'");
  return *v;
}

inline bool as_bool(const KeyValue& kv) {
  if (kv.value == "true" || kv.value == "1" || kv.value == "yes" || kv.value == "on") return true;
  if (kv.value == "false" || kv.value == "0" || kv.value == "no" || kv.value == "off") return false;
  throw ConfigError(kv.key, "expected a boolean, got '" + kv.value + "'");
}

inline std::vector<std::string> as_strings(const KeyValue& kv) {
  std::vector<std::string> out;
  for (auto tok : detail::split(kv.value, ",")) {
    const auto t = detail::trim(tok);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

inline std::vector<double> as_doubles(const KeyValue& kv, std::optional<std::size_t> expected = std::nullopt) {
  std::vector<double> out;
  for (const auto& tok : as_strings(kv)) {
    const auto v = detail::parse_double(tok);
    if (!v) throw ConfigError(kv.key, "bad list element '" + tok + "'");
    out.push_back(*v);
  }
  if (expected && out.size() != *expected) {
    throw ConfigError(kv.key, "expected " + std::to_string(*expected) + " values, got " + std::to_string(out.size()));
  }
  return out;
}

}  // namespace kv
}  // namespace mipmot
