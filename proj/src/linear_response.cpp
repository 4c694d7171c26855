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

#include "shb/linear_response.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "shb/parallel.hpp"

namespace shb {

double transmission_at(const Ensemble& e, double omega) {
    const auto sd = spectral_density(e, omega);
    const Complex den(e.cavity.omega_a - omega - sd.delta_term,
                      -0.5 * (e.cavity.kappa + sd.rho_term));
    return 1.0 / std::norm(den);
}

SpectrumResult transmission_sweep(const Ensemble& e, double omega_min, double omega_max,
                                  int n_points, bool normalize, double prominence,
                                  int threads) {
    if (!(omega_min < omega_max)) throw ConfigError("sweep needs omega_min < omega_max");
    if (n_points < 2) throw ConfigError("sweep needs n_points >= 2");

    SpectrumResult s;
    s.omegas.resize(static_cast<std::size_t>(n_points));
    s.values.resize(s.omegas.size());
    const double step = (omega_max - omega_min) / (n_points - 1);
    for (int i = 0; i < n_points; ++i) s.omegas[i] = omega_min + step * i;
    s.omegas.back() = omega_max;

    parallel_for(s.omegas.size(), threads,
                 [&](std::size_t i) { s.values[i] = transmission_at(e, s.omegas[i]); });

    const double peak = *std::max_element(s.values.begin(), s.values.end());
    if (normalize && peak > 0.0) {
        for (auto& v : s.values) v /= peak;
        s.normalized = true;
    }
    const double scale = s.normalized ? 1.0 : peak;
    if (s.values.size() >= 3) s.peaks = find_peaks(s, prominence * scale);
    return s;
}

namespace {

// Interpolated abscissa where the segment (x0,y0)-(x1,y1) crosses `level`.
double crossing(double x0, double y0, double x1, double y1, double level) {
    if (y1 == y0) return 0.5 * (x0 + x1);
    return x0 + (level - y0) * (x1 - x0) / (y1 - y0);
}

}  // namespace

std::vector<Peak> find_peaks(const SpectrumResult& s, double prominence) {
    const auto& x = s.omegas;
    const auto& y = s.values;
    const std::size_t n = y.size();
    std::vector<Peak> peaks;
    if (n < 3) return peaks;

    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) continue;
        // Skip to the end of a flat top so a plateau yields one peak.
        std::size_t k = i;
        while (k + 1 < n && y[k + 1] == y[i]) ++k;
        if (k + 1 >= n) break;
        if (y[k + 1] > y[i]) continue;

        const double h = y[i];
        std::size_t lo = i;
        double left_min = h;
        while (lo > 0 && y[lo - 1] <= h) {
            --lo;
            left_min = std::min(left_min, y[lo]);
        }
        std::size_t hi = k;
        double right_min = h;
        while (hi + 1 < n && y[hi + 1] <= h) {
            ++hi;
            right_min = std::min(right_min, y[hi]);
        }
        const double prom = h - std::max(left_min, right_min);
        if (prom < prominence || prom <= 0.0) {
            i = k;
            continue;
        }

        Peak p;
        p.center = 0.5 * (x[i] + x[k]);
        p.height = h;
        p.prominence = prom;

        const double level = h - 0.5 * prom;
        std::size_t a = i;
        while (a > lo && y[a] > level) --a;
        std::size_t b = k;
        while (b < hi && y[b] > level) ++b;
        if (y[a] <= level && y[b] <= level) {
            const double xl = crossing(x[a], y[a], x[a + 1], y[a + 1], level);
            const double xr = crossing(x[b - 1], y[b - 1], x[b], y[b], level);
            p.fwhm = xr - xl;
        }
        peaks.push_back(p);
        i = k;
    }
    return peaks;
}

std::vector<Peak> peaks_in_gaps(const std::vector<Peak>& peaks,
                                const std::vector<Interval>& gaps) {
    std::vector<Peak> out;
    for (const auto& gap : gaps) {
        const Peak* best = nullptr;
        for (const auto& p : peaks) {
            if (gap.contains(p.center) && (best == nullptr || p.prominence > best->prominence)) {
                best = &p;
            }
        }
        if (best != nullptr) out.push_back(*best);
    }
    return out;
}

void write_spectrum_csv(std::ostream& os, const SpectrumResult& s) {
    os << "omega_eV,value\n";
    char buf[64];
    for (std::size_t i = 0; i < s.omegas.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.10f,%.12e\n", s.omegas[i], s.values[i]);
        os << buf;
    }
}

}  // namespace shb
