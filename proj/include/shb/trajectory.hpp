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

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

namespace shb {

/// Time series of cavity and emitter populations on a uniform grid.
struct TrajectoryResult {
    std::vector<double> times;               ///< fs
    std::vector<double> photon_population;   ///< |c_a|^2 or |<a>|^2
    std::vector<double> emitter_population;  ///< sum_i |c_i|^2
    /// Sample index at which a drive was switched off, if any.
    std::optional<std::size_t> switch_off_index;

    std::size_t size() const noexcept { return times.size(); }
};

/// Uniform grid 0, dt, 2 dt, ... up to t_max (inclusive within 1e-9 dt).
std::vector<double> time_grid(double t_max, double dt);

/// CSV with header `t_fs,photon,emitter`.
void write_trajectory_csv(std::ostream& os, const TrajectoryResult& traj);

/// Least-squares slope of log(local maxima of photon_population) against
/// time for maxima at t >= t_start, returned as a positive decay rate in eV.
/// Throws NumericalError when fewer than five maxima qualify.
double fit_envelope_decay(const TrajectoryResult& traj, double t_start);

/// Angular frequency (rad/fs) of the strongest component of `values` inside
/// [w_min, w_max], from a Hann-windowed discrete Fourier transform of the
/// mean-removed samples with t in [t_start, t_end]. `n_freq` sets the
/// frequency grid density.
double dominant_angular_frequency(const std::vector<double>& times,
                                  const std::vector<double>& values, double t_start,
                                  double t_end, double w_min, double w_max, int n_freq = 4000);

}  // namespace shb
