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

#include "shb/scan.hpp"

#include <algorithm>
#include <cstdio>
#include <string>
#include <ostream>

#include "shb/core.hpp"

namespace shb {

std::size_t ScanResult::expected_size() const {
    std::size_t n = axes.empty() ? 0 : 1;
    for (const auto& a : axes) n *= a.values.size();
    return n;
}

double ScanResult::at(std::size_t i, std::size_t j) const {
    const std::size_t cols = axes.size() > 1 ? axes[1].values.size() : 1;
    return values.at(i * cols + j);
}

void ScanResult::update_argmax() {
    argmax = {};
    if (values.empty()) return;
    std::size_t best = 0;
    for (std::size_t k = 1; k < values.size(); ++k) {
        if (values[k] > values[best]) best = k;
    }
    std::size_t rest = best;
    std::vector<std::size_t> index(axes.size());
    for (std::size_t d = axes.size(); d-- > 0;) {
        index[d] = rest % axes[d].values.size();
        rest /= axes[d].values.size();
    }
    argmax.index = index;
    for (std::size_t d = 0; d < axes.size(); ++d) argmax.coords.push_back(axes[d].values[index[d]]);
    argmax.value = values[best];
}

void ScanResult::validate() const {
    if (values.size() != expected_size()) {
        throw ConfigError("scan values size " + std::to_string(values.size()) +
                          " does not match grid product " + std::to_string(expected_size()));
    }
    if (values.empty()) return;
    double mx = values.front();
    for (double v : values) mx = std::max(mx, v);
    if (argmax.value != mx) throw ConfigError("scan argmax does not equal max of values");
}

void write_scan_csv(std::ostream& os, const ScanResult& s) {
    for (const auto& a : s.axes) os << a.name << ',';
    os << "value\n";
    const std::size_t total = s.values.size();
    std::vector<std::size_t> idx(s.axes.size(), 0);
    char buf[64];
    for (std::size_t k = 0; k < total; ++k) {
        std::size_t rest = k;
        for (std::size_t d = s.axes.size(); d-- > 0;) {
            idx[d] = rest % s.axes[d].values.size();
            rest /= s.axes[d].values.size();
        }
        for (std::size_t d = 0; d < s.axes.size(); ++d) {
            std::snprintf(buf, sizeof buf, "%.10g,", s.axes[d].values[idx[d]]);
            os << buf;
        }
        std::snprintf(buf, sizeof buf, "%.12e\n", s.values[k]);
        os << buf;
    }
}

nlohmann::json scan_to_json(const ScanResult& s) {
    nlohmann::json j;
    j["axes"] = nlohmann::json::array();
    for (const auto& a : s.axes) j["axes"].push_back({{"name", a.name}, {"values", a.values}});
    j["argmax"] = {{"index", s.argmax.index},
                   {"coords", s.argmax.coords},
                   {"value", s.argmax.value}};
    j["metadata"] = s.metadata;
    return j;
}

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw ConfigError("linspace needs n >= 1");
    std::vector<double> out(static_cast<std::size_t>(n));
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    out.back() = hi;
    return out;
}

}  // namespace shb
