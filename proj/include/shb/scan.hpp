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

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace shb {

struct ScanAxis {
    std::string name;
    std::vector<double> values;
};

/// Scalar field over the product of one or two parameter grids, stored
/// row-major (last axis fastest).
struct ScanResult {
    struct Argmax {
        std::vector<std::size_t> index;
        std::vector<double> coords;
        double value = 0.0;
    };

    std::vector<ScanAxis> axes;
    std::vector<double> values;
    Argmax argmax;
    nlohmann::json metadata = nlohmann::json::object();

    std::size_t expected_size() const;
    double at(std::size_t i, std::size_t j = 0) const;
    /// Recomputes `argmax` from `values`; first maximum wins.
    void update_argmax();
    /// Throws ConfigError if the shape or argmax is inconsistent.
    void validate() const;
};

/// Long-format CSV: one column per axis then `value`.
void write_scan_csv(std::ostream& os, const ScanResult& s);

/// Grids, argmax and metadata as JSON.
nlohmann::json scan_to_json(const ScanResult& s);

/// n points from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, int n);

}  // namespace shb
