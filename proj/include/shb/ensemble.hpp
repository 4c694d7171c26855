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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shb/core.hpp"

namespace shb {

/// One two-level emitter. `index` is the 1-based comb position and survives
/// hole burning unchanged.
struct Emitter {
    double omega = 0.0;  ///< transition energy, eV
    double g = 0.0;      ///< coupling to the cavity, eV
    int index = 0;

    friend bool operator==(const Emitter&, const Emitter&) = default;
};

struct Cavity {
    double omega_a = 2.0;  ///< resonance, eV
    double kappa = 0.1;    ///< energy decay rate, eV

    void validate() const;
    friend bool operator==(const Cavity&, const Cavity&) = default;
};

/// Cavity plus an emitter list sorted by transition energy. Every solver
/// reads its parameters from here.
struct Ensemble {
    Cavity cavity;
    std::vector<Emitter> emitters;
    double gamma = 0.01;  ///< emitter decay rate, eV

    std::size_t size() const noexcept { return emitters.size(); }
    bool empty() const noexcept { return emitters.empty(); }

    /// Throws ConfigError naming the first violated invariant.
    void validate() const;

    friend bool operator==(const Ensemble&, const Ensemble&) = default;
};

/// Equidistant frequency comb with q-Gaussian couplings
/// g_i = A * e_q(-beta * (omega_i - omega_e)^2).
struct CombSpec {
    int n = 50;
    double omega_e = 2.0;
    double delta_omega = 0.2;  ///< half-width of the comb, eV
    double q = 2.0;
    double beta = 0.1;       ///< eV^-2
    double amplitude = 0.0;  ///< A, eV

    void validate() const;

    /// Transition energy of comb position `index` (1-based).
    double frequency(int index) const;
    /// Coupling the q-Gaussian profile assigns at transition energy `omega`.
    double coupling(double omega) const;
    /// Comb spacing 2*delta_omega/(n-1); zero for n == 1.
    double spacing() const;
};

/// Default comb: N=50 at 2 eV, 2*dw=0.4 eV, q=2, beta=0.1, with A set so the
/// full comb has collective coupling 0.102 eV.
CombSpec default_comb();

struct HoleWindow {
    double center = 0.0;  ///< eV
    double width = 0.0;   ///< full width, eV
};

struct HoleSpec {
    enum class Mode { by_index, by_window };

    Mode mode = Mode::by_index;
    std::vector<int> indices;
    std::vector<HoleWindow> windows;

    static HoleSpec from_indices(std::vector<int> indices);
    static HoleSpec from_windows(std::vector<HoleWindow> windows);
    /// Two blocks of 2*radius+1 comb teeth centred on positions `left` and
    /// `right`, clipped to [1, n].
    static HoleSpec symmetric_blocks(int left, int right, int radius, int n);

    /// `n` is the comb size the indices refer to.
    void validate(int n) const;
};

/// Default holes: positions 12-14 and 37-39 of the 50-tooth comb.
HoleSpec default_holes();

struct DisorderSpec {
    double r = 0.0;  ///< alpha_i uniform on [-r, r], 0 <= r < 1
    std::uint64_t seed = 0;

    void validate() const;
};

struct RandomEnsembleSpec {
    int n = 5000;
    double omega_e = 2.0;
    double q = 2.0;
    double beta = 0.1;
    double g_uniform = 0.002;
    double truncation_halfwidth = 0.5;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SpectralDensity {
    double rho_term = 0.0;    ///< Omega^2 rho(omega), eV
    double delta_term = 0.0;  ///< Omega^2 delta(omega), eV
};

/// Closed interval on the energy axis.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
    double center() const noexcept { return 0.5 * (lo + hi); }
};

/// q-deformed exponential [1 + (1-q) x]_+^{1/(1-q)}; exp(x) at q == 1.
double eq_exponential(double x, double q);

Ensemble build_comb(const CombSpec& spec, double gamma, const Cavity& cavity);

/// Amplitude A that gives the comb a collective coupling of `target` eV.
double calibrate_amplitude(const CombSpec& spec, double target);

/// Removes the selected emitters. Removing every emitter is legal; a note is
/// appended to `warnings` when it is non-null.
Ensemble burn_holes(const Ensemble& e, const HoleSpec& spec,
                    std::vector<std::string>* warnings = nullptr);

/// Comb positions whose emitters fall in any closed window.
std::vector<int> indices_in_windows(const Ensemble& e, std::span<const HoleWindow> windows);

/// Per-position shifts delta_omega_i (i = 1..comb.n) for the given seed.
std::vector<double> disorder_shifts(const DisorderSpec& spec, const CombSpec& comb);

Ensemble apply_disorder(const Ensemble& e, const DisorderSpec& spec, const CombSpec& comb);

/// Untruncated q=2 (Cauchy) quantile: omega_e + tan(pi (u - 1/2)) / sqrt(beta).
double cauchy_quantile(double u, double omega_e, double beta);

Ensemble sample_random_ensemble(const RandomEnsembleSpec& spec, double gamma,
                                const Cavity& cavity);

/// Omega = sqrt(sum g_i^2).
double collective_coupling(const Ensemble& e);

SpectralDensity spectral_density(const Ensemble& e, double omega);

/// Spectral gaps left by burning: for every run of consecutive comb positions
/// present in `before` but missing from `after`, the interval between the
/// nearest surviving neighbours (or the removed extent at the comb edge).
std::vector<Interval> hole_gaps(const Ensemble& before, const Ensemble& after);

}  // namespace shb
