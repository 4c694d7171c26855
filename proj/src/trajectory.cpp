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

#include "shb/trajectory.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <ostream>

#include "shb/core.hpp"

namespace shb {

std::vector<double> time_grid(double t_max, double dt) {
    if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
    if (!(t_max >= 0.0)) throw ConfigError("t_max must be >= 0");
    const auto n = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9));
    std::vector<double> t(n + 1);
    for (std::size_t k = 0; k <= n; ++k) t[k] = dt * static_cast<double>(k);
    return t;
}

void write_trajectory_csv(std::ostream& os, const TrajectoryResult& traj) {
    os << "t_fs,photon,emitter\n";
    char buf[96];
    for (std::size_t k = 0; k < traj.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.6f,%.12e,%.12e\n", traj.times[k],
                      traj.photon_population[k], traj.emitter_population[k]);
        os << buf;
    }
}

double fit_envelope_decay(const TrajectoryResult& traj, double t_start) {
    const auto& t = traj.times;
    const auto& p = traj.photon_population;
    std::vector<double> xs, ys;
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        if (t[i] < t_start) continue;
        if (p[i] > p[i - 1] && p[i] >= p[i + 1] && p[i] > 0.0) {
            xs.push_back(t[i]);
            ys.push_back(std::log(p[i]));
        }
    }
    if (xs.size() < 5) {
        throw NumericalError("envelope fit needs >= 5 maxima after t_start=" +
                             std::to_string(t_start) + " fs, found " +
                             std::to_string(xs.size()));
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return -(sxy / sxx) * kHbar;
}

double dominant_angular_frequency(const std::vector<double>& times,
                                  const std::vector<double>& values, double t_start,
                                  double t_end, double w_min, double w_max, int n_freq) {
    std::vector<double> t, y;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] >= t_start && times[i] <= t_end) {
            t.push_back(times[i]);
            y.push_back(values[i]);
        }
    }
    if (t.size() < 8) throw NumericalError("too few samples for Fourier analysis");
    if (!(w_min < w_max) || n_freq < 2) throw ConfigError("bad frequency window");

    const std::size_t n = y.size();
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double hann = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) /
                                                 static_cast<double>(n - 1));
        y[i] = (y[i] - mean) * hann;
    }

    double best_w = w_min;
    double best_power = -1.0;
    for (int k = 0; k < n_freq; ++k) {
        const double w = w_min + (w_max - w_min) * k / (n_freq - 1);
        // Phasor recurrence; samples are uniform so the step rotation is fixed.
        const double dt = n > 1 ? t[1] - t[0] : 0.0;
        const std::complex<double> step = std::polar(1.0, -w * dt);
        std::complex<double> phase = std::polar(1.0, -w * t[0]);
        std::complex<double> acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += y[i] * phase;
            phase *= step;
        }
        const double power = std::norm(acc);
        if (power > best_power) {
            best_power = power;
            best_w = w;
        }
    }
    return best_w;
}

}  // namespace shb
