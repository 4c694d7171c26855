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
#include <vector>

#include "shb/ensemble.hpp"

namespace shb {

struct Peak {
    double center = 0.0;      ///< eV
    double height = 0.0;      ///< spectrum value at the peak
    double fwhm = 0.0;        ///< eV; 0 when a half-height crossing is missing
    double prominence = 0.0;  ///< same units as height
};

/// Sampled transmission curve with detected peaks.
struct SpectrumResult {
    std::vector<double> omegas;
    std::vector<double> values;
    std::vector<Peak> peaks;
    bool normalized = false;
};

/// Default probe grid and detection threshold.
struct SweepDefaults {
    static constexpr double omega_min = 1.8;
    static constexpr double omega_max = 2.2;
    static constexpr int n_points = 2001;
    static constexpr double prominence = 0.02;
};

/// Un-normalized transmission
/// |1 / (Delta_a - Omega^2 delta(w) - i [kappa + Omega^2 rho(w)] / 2)|^2.
double transmission_at(const Ensemble& e, double omega);

/// Uniform sweep of transmission_at; peaks use `prominence` relative to the
/// curve maximum when `normalize` is false.
SpectrumResult transmission_sweep(const Ensemble& e, double omega_min, double omega_max,
                                  int n_points, bool normalize,
                                  double prominence = SweepDefaults::prominence,
                                  int threads = 1);

/// Local maxima with topographic prominence >= `prominence` (absolute units
/// of `s.values`). FWHM is measured at half prominence below the peak with
/// linear interpolation between samples. Sorted by center.
std::vector<Peak> find_peaks(const SpectrumResult& s, double prominence);

/// Peaks whose centers lie inside any of `gaps`, most prominent per gap.
std::vector<Peak> peaks_in_gaps(const std::vector<Peak>& peaks, const std::vector<Interval>& gaps);

/// CSV with header `omega_eV,value`.
void write_spectrum_csv(std::ostream& os, const SpectrumResult& s);

}  // namespace shb
