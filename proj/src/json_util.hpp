// Copyright 2026 The Endovo Authors
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

#pragma once

#include <json.hpp>
#include <set>
#include <string>

#include "endovo/error.hpp"
#include "endovo/geom.hpp"

namespace endovo::detail {

using Json = nlohmann::ordered_json;

inline Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kConfig, what + ": malformed JSON: " + e.what());
  }
}

// Strict view of a JSON object: typed lookups prefixed with the object's path
// in error messages, and finish() rejects keys that were never looked up.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("", "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const Json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const Json& require(const std::string& key) {
    const Json* v = find(key);
    if (!v) fail(key, "missing required key");
    return *v;
  }

  template <typename T>
  T value(const std::string& key) {
    return convert<T>(key, require(key));
  }

  // Leaves `out` untouched when the key is absent or null.
  template <typename T>
  void optional(const std::string& key, T& out) {
    const Json* v = find(key);
    if (v && !v->is_null()) out = convert<T>(key, *v);
  }

  Vec3 vec3(const std::string& key) { return to_vec3(key, require(key)); }

  void optional_vec3(const std::string& key, Vec3& out) {
    const Json* v = find(key);
    if (v && !v->is_null()) out = to_vec3(key, *v);
  }

  std::string child(const std::string& key) const { return join(key); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail(it.key(), "unknown key");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    const std::string where = join(key);
    throw Error(ErrorCode::kConfig, (where.empty() ? std::string("<root>") : where) +
                                        ": " + msg);
  }

 private:
  std::string join(const std::string& key) const {
    if (path_.empty()) return key;
    if (key.empty()) return path_;
    return path_ + "." + key;
  }

  template <typename T>
  T convert(const std::string& key, const Json& v) const {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) fail(key, "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) fail(key, "expected an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) fail(key, "expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) fail(key, "expected a string");
    }
    return v.get<T>();
  }

  Vec3 to_vec3(const std::string& key, const Json& v) const {
    if (!v.is_array() || v.size() != 3) fail(key, "expected an array of 3 numbers");
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
      if (!v[i].is_number()) fail(key, "expected an array of 3 numbers");
      out[i] = v[i].get<double>();
    }
    return out;
  }

  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline Json to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

}  // namespace endovo::detail
