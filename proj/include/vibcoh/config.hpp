// Copyright 2026 The vibcoh Authors
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

#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vibcoh/linalg.hpp"

namespace vibcoh {

// Bad keys, values or files. Distinct from numerical guards.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline bool valid_key(const std::string& k) {
  return !k.empty() && std::all_of(k.begin(), k.end(), [](unsigned char c) { return std::isalnum(c) || c == '_'; });
}

inline std::pair<std::string, std::string> split_assignment(const std::string& line, const std::string& where) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
  std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
  if (!valid_key(k)) throw ConfigError(where + ": invalid key '" + k + "'");
  if (v.empty()) throw ConfigError(where + ": empty value for '" + k + "'");
  return {std::move(k), std::move(v)};
}

}  // namespace detail

inline void set_value(KeyValues& kv, const std::string& key, const std::string& value) {
  for (auto& [k, v] : kv) {
    if (k == key) {
      v = value;
      return;
    }
  }
  kv.emplace_back(key, value);
}

inline const std::string* find_value(const KeyValues& kv, const std::string& key) {
  for (const auto& [k, v] : kv) {
    if (k == key) return &v;
  }
  return nullptr;
}

// Flat "key = value" lines; '#' starts a comment. Duplicate keys are errors.
inline KeyValues parse_config_text(const std::string& text, const std::string& origin = "config") {
  KeyValues kv;
  std::istringstream is(text);
  std::string line;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(n);
    auto [k, v] = detail::split_assignment(line, where);
    if (find_value(kv, k)) throw ConfigError(where + ": duplicate key '" + k + "'");
    kv.emplace_back(std::move(k), std::move(v));
  }
  return kv;
}

inline KeyValues read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

inline std::pair<std::string, std::string> parse_override(const std::string& s) {
  return detail::split_assignment(s, "override '" + s + "'");
}

inline double parse_number(const std::string& key, const std::string& raw) {
  std::string s = detail::trim(raw);
  double sign = 1.0;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    if (s[0] == '-') sign = -1.0;
    s.erase(0, 1);
  }
  // "pi", "pi/16", "3pi/4" style values
  if (const auto p = s.find("pi"); p != std::string::npos) {
    double mult = 1.0, div = 1.0;
    if (p > 0) mult = parse_number(key, s.substr(0, p));
    const std::string rest = s.substr(p + 2);
    if (!rest.empty()) {
      if (rest[0] != '/') throw ConfigError("bad number for '" + key + "': " + raw);
      div = parse_number(key, rest.substr(1));
    }
    return sign * mult * kPi / div;
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("bad number for '" + key + "': " + raw);
  }
  return sign * v;
}

struct ParamSpec {
  std::string key;
  std::string default_value;
  std::string help;
};

using Schema = std::vector<ParamSpec>;

// Defaults overlaid with user values; unknown keys are rejected.
class Params {
 public:
  Params(const Schema& schema, const KeyValues& given) {
    for (const auto& p : schema) values_.emplace_back(p.key, p.default_value);
    for (const auto& [k, v] : given) {
      bool known = false;
      for (auto& [rk, rv] : values_) {
        if (rk == k) {
          rv = v;
          known = true;
        }
      }
      if (!known) throw ConfigError("unknown key '" + k + "'");
    }
  }

  const KeyValues& resolved() const { return values_; }

  const std::string& str(const std::string& key) const {
    const std::string* v = find_value(values_, key);
    if (!v) throw std::logic_error("parameter not in schema: " + key);
    return *v;
  }

  double num(const std::string& key) const { return parse_number(key, str(key)); }

  int integer(const std::string& key) const {
    const double v = num(key);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("'" + key + "' must be an integer");
    return static_cast<int>(v);
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(str(key));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(key, item));
    if (out.empty()) throw ConfigError("'" + key + "' must be a non-empty list");
    return out;
  }

  std::string choice(const std::string& key, const std::vector<std::string>& allowed) const {
    const std::string& v = str(key);
    if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
      std::string msg = "'" + key + "' must be one of:";
      for (const auto& a : allowed) msg += " " + a;
      throw ConfigError(msg);
    }
    return v;
  }

 private:
  KeyValues values_;
};

}  // namespace vibcoh
