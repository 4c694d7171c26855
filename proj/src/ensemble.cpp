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

#include "shb/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_set>

#include "shb/rng.hpp"

namespace shb {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

void sort_by_omega(std::vector<Emitter>& emitters) {
    std::stable_sort(emitters.begin(), emitters.end(),
                     [](const Emitter& a, const Emitter& b) { return a.omega < b.omega; });
}

}  // namespace

void Cavity::validate() const {
    require(std::isfinite(omega_a), "cavity.omega_a must be finite");
    require(std::isfinite(kappa) && kappa >= 0.0, "cavity.kappa must be >= 0");
}

void Ensemble::validate() const {
    cavity.validate();
    require(std::isfinite(gamma) && gamma >= 0.0, "gamma must be >= 0");
    std::unordered_set<int> seen;
    for (std::size_t i = 0; i < emitters.size(); ++i) {
        const auto& em = emitters[i];
        require(std::isfinite(em.omega), "emitter omega must be finite");
        require(std::isfinite(em.g) && em.g >= 0.0, "emitter g must be >= 0");
        require(seen.insert(em.index).second,
                "emitter index " + std::to_string(em.index) + " is duplicated");
        if (i > 0) {
            require(emitters[i - 1].omega <= em.omega, "emitters must be sorted by omega");
        }
    }
}

void CombSpec::validate() const {
    require(n >= 1, "comb.n must be >= 1");
    require(std::isfinite(omega_e), "comb.omega_e must be finite");
    require(delta_omega >= 0.0, "comb.delta_omega must be >= 0");
    require(beta >= 0.0, "comb.beta must be >= 0");
    require(amplitude >= 0.0, "comb.amplitude must be >= 0");
    require(q < 3.0, "comb.q must be < 3");
}

double CombSpec::spacing() const { return n > 1 ? 2.0 * delta_omega / (n - 1) : 0.0; }

double CombSpec::frequency(int index) const {
    if (n == 1) return omega_e;
    return omega_e - delta_omega + spacing() * (index - 1);
}

double CombSpec::coupling(double omega) const {
    const double d = omega - omega_e;
    return amplitude * eq_exponential(-beta * d * d, q);
}

CombSpec default_comb() {
    CombSpec spec;
    spec.amplitude = calibrate_amplitude(spec, 0.102);
    return spec;
}

HoleSpec HoleSpec::from_indices(std::vector<int> indices) {
    HoleSpec h;
    h.mode = Mode::by_index;
    h.indices = std::move(indices);
    return h;
}

HoleSpec HoleSpec::from_windows(std::vector<HoleWindow> windows) {
    HoleSpec h;
    h.mode = Mode::by_window;
    h.windows = std::move(windows);
    return h;
}

HoleSpec HoleSpec::symmetric_blocks(int left, int right, int radius, int n) {
    std::set<int> picked;
    for (int c : {left, right}) {
        for (int i = c - radius; i <= c + radius; ++i) {
            if (i >= 1 && i <= n) picked.insert(i);
        }
    }
    return from_indices({picked.begin(), picked.end()});
}

void HoleSpec::validate(int n) const {
    if (mode == Mode::by_index) {
        require(!indices.empty(), "holes.indices must be nonempty");
        for (int i : indices) {
            require(i >= 1 && i <= n, "holes.indices entry " + std::to_string(i) +
                                          " outside [1, " + std::to_string(n) + "]");
        }
    } else {
        require(!windows.empty(), "holes.windows must be nonempty");
        for (const auto& w : windows) {
            require(std::isfinite(w.center), "holes.windows center must be finite");
            require(w.width > 0.0, "holes.windows width must be > 0");
        }
    }
}

HoleSpec default_holes() { return HoleSpec::from_indices({12, 13, 14, 37, 38, 39}); }

void DisorderSpec::validate() const {
    require(r >= 0.0 && r < 1.0, "disorder.r must satisfy 0 <= r < 1");
}

void RandomEnsembleSpec::validate() const {
    require(n >= 0, "random.n must be >= 0");
    require(std::isfinite(omega_e), "random.omega_e must be finite");
    require(q < 3.0, "random.q must be < 3");
    require(beta >= 0.0, "random.beta must be >= 0");
    require(g_uniform >= 0.0, "random.g_uniform must be >= 0");
    require(truncation_halfwidth > 0.0, "random.truncation_halfwidth must be > 0");
}

double eq_exponential(double x, double q) {
    const double s = 1.0 - q;
    if (std::abs(s) < 1e-12) return std::exp(x);
    const double base = 1.0 + s * x;
    if (base <= 0.0) {
        // Compact support below the cutoff for q < 1; pole for q > 1.
        return s > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return std::exp(std::log1p(s * x) / s);
}

double calibrate_amplitude(const CombSpec& spec, double target) {
    CombSpec unit = spec;
    unit.amplitude = 1.0;
    unit.validate();
    double sum = 0.0;
    for (int i = 1; i <= unit.n; ++i) {
        const double g = unit.coupling(unit.frequency(i));
        sum += g * g;
    }
    if (sum <= 0.0) throw ConfigError("comb profile vanishes; cannot calibrate amplitude");
    return target / std::sqrt(sum);
}

Ensemble build_comb(const CombSpec& spec, double gamma, const Cavity& cavity) {
    spec.validate();
    Ensemble e;
    e.cavity = cavity;
    e.gamma = gamma;
    e.emitters.reserve(static_cast<std::size_t>(spec.n));
    for (int i = 1; i <= spec.n; ++i) {
        const double w = spec.frequency(i);
        e.emitters.push_back({w, spec.coupling(w), i});
    }
    e.validate();
    return e;
}

std::vector<int> indices_in_windows(const Ensemble& e, std::span<const HoleWindow> windows) {
    std::vector<int> out;
    for (const auto& em : e.emitters) {
        for (const auto& w : windows) {
            if (em.omega >= w.center - 0.5 * w.width && em.omega <= w.center + 0.5 * w.width) {
                out.push_back(em.index);
                break;
            }
        }
    }
    return out;
}

Ensemble burn_holes(const Ensemble& e, const HoleSpec& spec, std::vector<std::string>* warnings) {
    std::unordered_set<int> removed;
    if (spec.mode == HoleSpec::Mode::by_index) {
        removed.insert(spec.indices.begin(), spec.indices.end());
    } else {
        for (int i : indices_in_windows(e, spec.windows)) removed.insert(i);
    }
    Ensemble out = e;
    std::erase_if(out.emitters, [&](const Emitter& em) { return removed.count(em.index) > 0; });
    if (out.empty() && !e.empty() && warnings != nullptr) {
        warnings->push_back("hole burning removed every emitter");
    }
    return out;
}

std::vector<double> disorder_shifts(const DisorderSpec& spec, const CombSpec& comb) {
    spec.validate();
    SplitMix64 rng(spec.seed);
    const double unit = comb.n > 1 ? comb.delta_omega / (comb.n - 1) : 0.0;
    std::vector<double> shifts(static_cast<std::size_t>(comb.n));
    for (auto& s : shifts) s = rng.uniform(-spec.r, spec.r) * unit;
    return shifts;
}

Ensemble apply_disorder(const Ensemble& e, const DisorderSpec& spec, const CombSpec& comb) {
    spec.validate();
    if (spec.r == 0.0) return e;
    const auto shifts = disorder_shifts(spec, comb);
    Ensemble out = e;
    for (auto& em : out.emitters) {
        if (em.index < 1 || em.index > comb.n) {
            throw ConfigError("emitter index " + std::to_string(em.index) +
                              " is not a position of the given comb");
        }
        em.omega += shifts[static_cast<std::size_t>(em.index - 1)];
        em.g = comb.coupling(em.omega);
    }
    sort_by_omega(out.emitters);
    return out;
}

double cauchy_quantile(double u, double omega_e, double beta) {
    if (beta <= 0.0) throw ConfigError("cauchy_quantile needs beta > 0");
    return omega_e + std::tan(kPi * (u - 0.5)) / std::sqrt(beta);
}

Ensemble sample_random_ensemble(const RandomEnsembleSpec& spec, double gamma,
                                const Cavity& cavity) {
    spec.validate();
    SplitMix64 rng(spec.seed);
    const double hw = spec.truncation_halfwidth;
    const bool cauchy = std::abs(spec.q - 2.0) < 1e-12 && spec.beta > 0.0;

    std::vector<double> omegas;
    omegas.reserve(static_cast<std::size_t>(spec.n));
    while (omegas.size() < static_cast<std::size_t>(spec.n)) {
        double w;
        if (cauchy) {
            w = cauchy_quantile(rng.uniform(), spec.omega_e, spec.beta);
            if (!(std::abs(w - spec.omega_e) <= hw)) continue;
        } else {
            // Density peaks at 1 on the window centre; accept with e_q.
            w = spec.omega_e + rng.uniform(-hw, hw);
            const double d = w - spec.omega_e;
            if (rng.uniform() >= eq_exponential(-spec.beta * d * d, spec.q)) continue;
        }
        omegas.push_back(w);
    }
    std::sort(omegas.begin(), omegas.end());

    Ensemble e;
    e.cavity = cavity;
    e.gamma = gamma;
    e.emitters.reserve(omegas.size());
    int index = 1;
    for (double w : omegas) e.emitters.push_back({w, spec.g_uniform, index++});
    e.validate();
    return e;
}

double collective_coupling(const Ensemble& e) {
    double sum = 0.0;
    for (const auto& em : e.emitters) sum += em.g * em.g;
    return std::sqrt(sum);
}

SpectralDensity spectral_density(const Ensemble& e, double omega) {
    const double half = 0.5 * e.gamma;
    SpectralDensity out;
    for (const auto& em : e.emitters) {
        const double d = em.omega - omega;
        const double den = half * half + d * d;
        if (den == 0.0) {
            std::ostringstream msg;
            msg << "spectral density is singular at omega=" << omega
                << " eV (gamma=0 and emitter " << em.index << " resonant)";
            throw SingularEvaluation(msg.str());
        }
        const double w = em.g * em.g / den;
        out.rho_term += w * e.gamma;
        out.delta_term += w * d;
    }
    return out;
}

std::vector<Interval> hole_gaps(const Ensemble& before, const Ensemble& after) {
    std::unordered_set<int> kept;
    for (const auto& em : after.emitters) kept.insert(em.index);

    std::vector<Interval> gaps;
    const auto& all = before.emitters;
    std::size_t i = 0;
    while (i < all.size()) {
        if (kept.count(all[i].index)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < all.size() && !kept.count(all[j + 1].index)) ++j;
        Interval gap;
        gap.lo = i > 0 ? all[i - 1].omega : all[i].omega;
        gap.hi = j + 1 < all.size() ? all[j + 1].omega : all[j].omega;
        gaps.push_back(gap);
        i = j + 1;
    }
    return gaps;
}

}  // namespace shb
