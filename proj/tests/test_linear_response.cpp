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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "shb/dynamics.hpp"
#include "shb/linear_response.hpp"
#include "shb/scan.hpp"

using namespace shb;

namespace {

Ensemble fig2_comb() { return build_comb(default_comb(), 0.01, Cavity{}); }
Ensemble fig2_burned() { return burn_holes(fig2_comb(), default_holes()); }

SpectrumResult synthetic(const std::vector<double>& x, const std::vector<double>& y) {
    SpectrumResult s;
    s.omegas = x;
    s.values = y;
    return s;
}

}  // namespace

TEST_CASE("empty ensemble gives the bare cavity Lorentzian") {
    const Ensemble e;
    for (double w : {1.8, 1.95, 2.0, 2.07, 2.2}) {
        const double d = 2.0 - w;
        CHECK(transmission_at(e, w) == doctest::Approx(1.0 / (d * d + 0.0025)).epsilon(1e-14));
    }
    const auto s = transmission_sweep(e, 1.8, 2.2, 2001, true);
    const auto it = std::max_element(s.values.begin(), s.values.end());
    CHECK(*it == 1.0);
    CHECK(s.omegas[static_cast<std::size_t>(it - s.values.begin())] == doctest::Approx(2.0));
    REQUIRE(s.peaks.size() == 1);
    // Width at half prominence; the base is the sample at the sweep edge.
    const double base = s.values.front();
    const double level = 1.0 - (1.0 - base) / 2;
    CHECK(s.peaks[0].prominence == doctest::Approx(1.0 - base));
    CHECK(s.peaks[0].fwhm == doctest::Approx(0.1 * std::sqrt(1.0 / level - 1.0)).epsilon(1e-3));
}

TEST_CASE("transmission matches a direct long-double evaluation") {
    for (const Ensemble& e : {fig2_comb(), fig2_burned()}) {
        for (int k = 0; k <= 200; ++k) {
            const double w = 1.8 + 0.002 * k;
            CHECK(transmission_at(e, w) ==
                  doctest::Approx(double(oracle::direct_transmission(e, w))).epsilon(1e-12));
        }
    }
}

TEST_CASE("transmission is positive and symmetric for the symmetric comb") {
    const Ensemble e = fig2_comb();
    for (int k = 0; k <= 100; ++k) {
        const double d = 0.003 * k;
        CHECK(transmission_at(e, 2.0 + d) > 0.0);
        CHECK(transmission_at(e, 2.0 + d) == doctest::Approx(transmission_at(e, 2.0 - d)).epsilon(1e-10));
    }
}

TEST_CASE("sweep validates its grid") {
    CHECK_THROWS_AS(transmission_sweep(Ensemble{}, 2.0, 1.9, 10, true), ConfigError);
    CHECK_THROWS_AS(transmission_sweep(Ensemble{}, 1.8, 2.2, 1, true), ConfigError);
}

TEST_CASE("burned comb shows two sharp in-gap peaks") {
    const Ensemble base = fig2_comb();
    const Ensemble burned = fig2_burned();
    const auto s = transmission_sweep(burned, 1.8, 2.2, 2001, true);
    const auto dark = peaks_in_gaps(s.peaks, hole_gaps(base, burned));
    REQUIRE(dark.size() == 2);
    CHECK(std::abs(dark[0].center - 1.898) < 0.01);
    CHECK(std::abs(dark[1].center - 2.102) < 0.01);
    for (const auto& p : dark) {
        CHECK(p.fwhm > 0.0);
        CHECK(p.fwhm < 0.1 / 5);
        CHECK(p.prominence > 0.5);
    }
}

TEST_CASE("unburned comb has no sharp dominant feature") {
    const auto s = transmission_sweep(fig2_comb(), 1.8, 2.2, 2001, true);
    for (const auto& p : s.peaks) {
        if (p.prominence >= 0.1) CHECK(p.fwhm > 0.1);
    }
}

TEST_CASE("burning changes the spectrum mostly inside the hole windows") {
    const Ensemble base = fig2_comb();
    const auto gaps = hole_gaps(base, fig2_burned());
    const auto a = transmission_sweep(base, 1.8, 2.2, 2001, false);
    const auto b = transmission_sweep(fig2_burned(), 1.8, 2.2, 2001, false);
    double inside = 0.0, outside = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double d = std::abs(b.values[i] - a.values[i]);
        bool in = false;
        for (const auto& g : gaps) in = in || g.contains(a.omegas[i]);
        (in ? inside : outside) = std::max(in ? inside : outside, d);
    }
    CHECK(inside > 3.0 * outside);
}

TEST_CASE("burning never lowers transmission at the hole centre") {
    const Ensemble base = fig2_comb();
    const Ensemble burned = fig2_burned();
    for (const auto& gap : hole_gaps(base, burned)) {
        const double c = gap.center();
        CHECK(spectral_density(burned, c).rho_term < spectral_density(base, c).rho_term);
        CHECK(transmission_at(burned, c) >= transmission_at(base, c));
    }
}

TEST_CASE("find_peaks on synthetic Lorentzians") {
    SUBCASE("single peak, 2000 samples") {
        const auto x = linspace(1.0, 3.0, 2000);
        const auto s = synthetic(x, oracle::lorentzian(x, 2.0, 0.1));
        const auto peaks = find_peaks(s, 0.02);
        REQUIRE(peaks.size() == 1);
        const double step = x[1] - x[0];
        CHECK(std::abs(peaks[0].fwhm - 0.1) <= step);
        CHECK(std::abs(peaks[0].center - 2.0) <= step);
    }
    SUBCASE("two separated peaks") {
        const auto x = linspace(1.0, 3.0, 4001);
        auto y = oracle::lorentzian(x, 1.6, 0.05);
        const auto y2 = oracle::lorentzian(x, 2.4, 0.08);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += 0.5 * y2[i];
        const auto peaks = find_peaks(synthetic(x, y), 0.02);
        REQUIRE(peaks.size() == 2);
        CHECK(peaks[0].center == doctest::Approx(1.6).epsilon(1e-3));
        CHECK(peaks[1].center == doctest::Approx(2.4).epsilon(1e-3));
        CHECK(peaks[0].fwhm == doctest::Approx(0.05).epsilon(0.02));
        CHECK(peaks[1].fwhm == doctest::Approx(0.08).epsilon(0.02));
    }
    SUBCASE("flat and monotone inputs have no peaks") {
        const auto x = linspace(0.0, 1.0, 11);
        CHECK(find_peaks(synthetic(x, std::vector<double>(11, 1.0)), 0.0).empty());
        CHECK(find_peaks(synthetic(x, x), 0.0).empty());
    }
    SUBCASE("prominence threshold filters ripples") {
        const auto x = linspace(0.0, 1.0, 1001);
        std::vector<double> y;
        for (double v : x) y.push_back(std::exp(-50 * (v - 0.5) * (v - 0.5)) + 0.005 * std::sin(200 * v));
        const auto peaks = find_peaks(synthetic(x, y), 0.1);
        REQUIRE(peaks.size() == 1);
        CHECK(peaks[0].center == doctest::Approx(0.5).epsilon(0.02));
    }
}

TEST_CASE("spectrum csv layout") {
    const auto s = transmission_sweep(Ensemble{}, 1.9, 2.1, 3, true);
    std::ostringstream os;
    write_spectrum_csv(os, s);
    const std::string text = os.str();
    CHECK(text.rfind("omega_eV,value\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}

TEST_CASE("transmission equals the driven steady state up to the drive normalization") {
    // Cavity-only drive: |<a>|^2 = Omega_a^2 T exactly.
    for (const Ensemble& e : {fig2_comb(), fig2_burned()}) {
        for (double w : {1.85, 1.9062, 2.0, 2.0938, 2.17}) {
            const auto s = mean_field_steady_state(e, w, {1e-3, 0.0});
            CHECK(s.photon_population() / 1e-6 ==
                  doctest::Approx(transmission_at(e, w)).epsilon(1e-10));
        }
    }
}
