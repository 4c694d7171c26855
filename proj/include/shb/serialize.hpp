// Copyright 2026 The shbcavity Authors
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

#include <string>
#include <string_view>

#include <json.hpp>

#include "shb/dynamics.hpp"
#include "shb/ensemble.hpp"
#include "shb/linear_response.hpp"

namespace shb {

using Json = nlohmann::json;

// JSON forms of the domain types. Readers fill absent keys from the type's
// defaults, reject wrong types with a ConfigError naming the field path, and
// run the type's own validation.

Json to_json(const Cavity& c);
Json to_json(const Ensemble& e);
Json to_json(const CombSpec& s);
Json to_json(const RandomEnsembleSpec& s);
Json to_json(const HoleSpec& s);
Json to_json(const DisorderSpec& s);
Json to_json(const DriveWaveform& w);
Json to_json(const Peak& p);

Cavity cavity_from_json(const Json& j, const std::string& path = "cavity");
Ensemble ensemble_from_json(const Json& j, const std::string& path = "ensemble");
CombSpec comb_from_json(const Json& j, const std::string& path = "ensemble");
RandomEnsembleSpec random_from_json(const Json& j, const std::string& path = "ensemble");
HoleSpec holes_from_json(const Json& j, const std::string& path = "holes");
DisorderSpec disorder_from_json(const Json& j, const std::string& path = "disorder");
DriveWaveform drive_from_json(const Json& j, const std::string& path = "drive");

/// 64-bit FNV-1a of raw bytes, as 16 hex digits.
std::string digest(std::string_view bytes);
/// digest() of the compact JSON dump.
std::string digest(const Json& j);

namespace detail {

/// Reads j[key] as T if present, else returns `fallback`.
template <typename T>
T field(const Json& j, const std::string& path, const char* key, T fallback) {
    if (!j.is_object()) throw ConfigError("field '" + path + "' must be an object");
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    try {
        return it->template get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("field '" + path + "." + key + "' has the wrong type");
    }
}

}  // namespace detail

}  // namespace shb
