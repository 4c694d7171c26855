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

#include "oracles.hpp"
#include "shb/dynamics.hpp"
#include "shb/linear_response.hpp"
#include "shb/singlex.hpp"

using namespace shb;

namespace {

Ensemble fig2_comb() { return build_comb(default_comb(), 0.01, Cavity{}); }
Ensemble fig2_burned() { return burn_holes(fig2_comb(), default_holes()); }

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

}  // namespace

TEST_CASE("drive values") {
    const auto c = DriveWaveform::constant(1e-3, 2.0, 100.0);
    CHECK(c.amplitude_e == doctest::Approx(1e-3 / 19));
    CHECK(drive_value(c, 50.0).a == 1e-3);
    CHECK(drive_value(c, 50.0).e == doctest::Approx(1e-3 / 19));
    CHECK(drive_value(c, 100.0).a == 0.0);
    CHECK(drive_value(c, 150.0).e == 0.0);

    const auto p = DriveWaveform::pulse_train(1e-3, 2.0, 42.0);
    CHECK(drive_value(p, 10.0).a == 1e-3);
    CHECK(drive_value(p, 50.0).a == -1e-3);
    CHECK(drive_value(p, 50.0).e == doctest::Approx(-1e-3 / 19));
    CHECK(drive_value(p, 90.0).a == 1e-3);

    const auto f = DriveWaveform::pulse_train(1e-3, 2.0, 42.0, 200.0,
                                              DriveWaveform::PulseConvention::full_cycle);
    CHECK(f.flip_interval() == 21.0);
    CHECK(drive_value(f, 10.0).a == 1e-3);
    CHECK(drive_value(f, 30.0).a == -1e-3);
    CHECK(drive_value(f, 50.0).a == 1e-3);
    CHECK(drive_value(f, 250.0).a == 0.0);
    CHECK(f.breakpoints(100.0) == std::vector<double>{21.0, 42.0, 63.0, 84.0});
    CHECK(f.breakpoints(1000.0).back() == 200.0);

    CHECK(drive_value(DriveWaveform{}, 1.0).a == 0.0);
}

TEST_CASE("drive validation") {
    auto p = DriveWaveform::pulse_train(1e-3, 2.0, 0.0);
    CHECK_THROWS_AS(p.validate(), ConfigError);
    auto c = DriveWaveform::constant(-1.0, 2.0);
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("driven empty cavity reaches the closed-form steady state") {
    const Ensemble e;
    const auto w = DriveWaveform::constant(1e-3, 2.0);
    const auto traj = integrate_driven(e, w, 200.0, 0.02);
    CHECK(traj.photon_population.back() == doctest::Approx(1e-6 / (0.05 * 0.05)).epsilon(1e-9));
    const auto s = mean_field_steady_state(e, 2.0, {1e-3, 0.0});
    // <a> = -i Omega / (i Delta + kappa/2)
    CHECK(std::abs(s.a_amp - Complex(0, -1e-3) / Complex(0.05, 0.0)) < 1e-15);
}

TEST_CASE("zero drive reduces to the single-excitation evolution") {
    for (const Ensemble& e : {fig2_burned(), oracle::random_small(5, 3)}) {
        MeanFieldState s0 = MeanFieldState::ground(e.size());
        s0.a_amp = 1.0;
        DriveWaveform off;
        off.probe_omega = e.cavity.omega_a;
        const auto ref = evolve_fock(e, 200.0, 0.5);
        // Fine internal step, compared on the coarse reference grid.
        std::vector<double> fine;
        integrate_mean_field(e, off, s0, 200.0, 0.01, [&](std::size_t k, const MeanFieldState& s) {
            if (k % 50 == 0) fine.push_back(s.photon_population());
            return true;
        });
        REQUIRE(fine.size() == ref.size());
        for (std::size_t i = 0; i < ref.size(); ++i) {
            CHECK(std::abs(fine[i] - ref.photon_population[i]) < 1e-9);
        }
    }
}

TEST_CASE("linearity in the drive amplitude") {
    const Ensemble e = fig2_burned();
    const auto w1 = DriveWaveform::pulse_train(1e-3, 2.0, 42.0, 150.0);
    const auto w2 = DriveWaveform::pulse_train(3.7e-3, 2.0, 42.0, 150.0);
    const auto a = integrate_driven(e, w1, 250.0, 0.05);
    const auto b = integrate_driven(e, w2, 250.0, 0.05);
    const double c2 = 3.7 * 3.7;
    for (std::size_t i = 1; i < a.size(); ++i) {
        CHECK(std::abs(b.photon_population[i] - c2 * a.photon_population[i]) <=
              1e-10 * c2 * a.photon_population[i]);
        CHECK(std::abs(b.emitter_population[i] - c2 * a.emitter_population[i]) <=
              1e-10 * c2 * a.emitter_population[i]);
    }
}

TEST_CASE("free decay never gains population") {
    const Ensemble e = fig2_burned();
    const auto w = DriveWaveform::constant(1e-3, 2.0, 100.0);
    const auto traj = integrate_driven(e, w, 400.0, 0.05);
    REQUIRE(traj.switch_off_index.has_value());
    for (std::size_t i = *traj.switch_off_index + 1; i < traj.size(); ++i) {
        const double before = traj.photon_population[i - 1] + traj.emitter_population[i - 1];
        const double after = traj.photon_population[i] + traj.emitter_population[i];
        CHECK(after <= before * (1 + 1e-12));
    }
}

TEST_CASE("an unstable step is reported") {
    MeanFieldState s0 = MeanFieldState::ground(1);
    s0.a_amp = 1.0;
    Ensemble e;
    e.cavity = {2.5, 0.0};
    e.gamma = 0.0;
    e.emitters = {{1.5, 0.1, 1}};
    DriveWaveform off;
    CHECK_THROWS_AS(integrate_mean_field(e, off, s0, 100.0, 5.0, nullptr), NumericalError);
}

TEST_CASE("algebraic fixed point") {
    const Ensemble e = fig2_burned();
    for (double w : {1.9, 2.0, 2.09}) {
        const DriveValue f{1e-3, 1e-3 / 19};
        const auto s = mean_field_steady_state(e, w, f);
        CHECK(mean_field_residual(e, w, f, s) < 1e-15);
        const auto run = integrate_to_steady_state(e, DriveWaveform::constant(1e-3, w), 0.1, 1e-12, 20000.0);
        CHECK(mean_field_residual(e, w, f, run) < 1e-8 * 1e-3);
        CHECK(std::abs(run.a_amp - s.a_amp) < 1e-8 * std::abs(s.a_amp));
    }
    CHECK_THROWS_AS(integrate_to_steady_state(e, DriveWaveform::constant(1e-3, 2.0), 0.1, 1e-14, 50.0),
                    NumericalError);
}

TEST_CASE("cavity-only steady state reproduces the transmission formula") {
    const Ensemble e = fig2_burned();
    std::vector<double> ratio;
    for (int k = 0; k <= 20; ++k) {
        const double w = 1.8 + 0.02 * k;
        auto drive = DriveWaveform::constant(1e-3, w);
        drive.amplitude_e = 0.0;
        const auto s = integrate_to_steady_state(e, drive, 0.1, 1e-12, 20000.0);
        ratio.push_back(s.photon_population() / transmission_at(e, w));
    }
    for (double r : ratio) CHECK(r == doctest::Approx(ratio.front()).epsilon(1e-6));
    CHECK(ratio.front() == doctest::Approx(1e-6).epsilon(1e-6));
}

TEST_CASE("quench protocol") {
    const Ensemble e = fig2_burned();
    SUBCASE("zero amplitude gives an identically zero trajectory") {
        const auto traj = quench_protocol(e, DriveWaveform::constant(0.0, 2.0, 100.0), 200.0, 0.1);
        for (double p : traj.photon_population) CHECK(p == 0.0);
        for (double p : traj.emitter_population) CHECK(p == 0.0);
    }
    SUBCASE("constant drive switches off once steady") {
        const auto traj = quench_protocol(e, DriveWaveform::constant(1e-3, 2.0, 3000.0), 3500.0, 0.1);
        REQUIRE(traj.switch_off_index.has_value());
        CHECK(traj.times[*traj.switch_off_index] < 3000.0);
        const auto s = mean_field_steady_state(e, 2.0, {1e-3, 1e-3 / 19});
        CHECK(traj.photon_population[*traj.switch_off_index] ==
              doctest::Approx(s.photon_population()).epsilon(1e-5));
        CHECK(traj.photon_population.back() < 1e-3 * s.photon_population());
    }
    SUBCASE("cap applies when the steady state is not reached") {
        const auto traj = quench_protocol(e, DriveWaveform::constant(1e-3, 2.0, 50.0), 100.0, 0.1);
        REQUIRE(traj.switch_off_index.has_value());
        CHECK(traj.times[*traj.switch_off_index] == doctest::Approx(50.0));
    }
    SUBCASE("pulse train switches off at t_off") {
        const auto w = DriveWaveform::pulse_train(1e-3, 2.0, 42.0, 168.0);
        const auto traj = quench_protocol(e, w, 300.0, 0.1);
        REQUIRE(traj.switch_off_index.has_value());
        CHECK(traj.times[*traj.switch_off_index] == doctest::Approx(168.0));
    }
    SUBCASE("precondition") {
        CHECK_THROWS_AS(quench_protocol(e, DriveWaveform::constant(1e-3, 2.0), 100.0, 0.1), ConfigError);
    }
}

TEST_CASE("steps never straddle a sign flip") {
    // A flip at 21 fs with dt = 0.5 lands mid-step; the result must equal a
    // run whose grid contains the flip.
    const Ensemble e = oracle::random_small(3, 8);
    const auto w = DriveWaveform::pulse_train(1e-3, 2.0, 21.0);
    MeanFieldState coarse_end, fine_end;
    coarse_end = integrate_mean_field(e, w, MeanFieldState::ground(3), 60.0, 0.4, nullptr);
    fine_end = integrate_mean_field(e, w, MeanFieldState::ground(3), 60.0, 0.001, nullptr);
    CHECK(std::abs(coarse_end.a_amp - fine_end.a_amp) < 1e-6 * std::abs(fine_end.a_amp));
}

TEST_CASE("scans") {
    const Ensemble e = fig2_burned();
    const auto pulse = DriveWaveform::pulse_train(1e-3, 2.0, 42.0, std::numeric_limits<double>::infinity(),
                                                  DriveWaveform::PulseConvention::full_cycle);
    SUBCASE("single cell equals the direct run") {
        const auto scan = pulse_grid_scan(e, {2.0}, {42.0}, 150.0, 0.05, pulse);
        REQUIRE(scan.values.size() == 1);
        const auto traj = integrate_driven(e, pulse, 150.0, 0.05);
        CHECK(scan.values[0] == max_of(traj.photon_population));
        CHECK_NOTHROW(scan.validate());
    }
    SUBCASE("grid shape, argmax and thread independence") {
        const auto a = pulse_grid_scan(e, {1.95, 2.0, 2.05}, {35.0, 42.0}, 120.0, 0.05, pulse, 1);
        const auto b = pulse_grid_scan(e, {1.95, 2.0, 2.05}, {35.0, 42.0}, 120.0, 0.05, pulse, 3);
        CHECK(a.values.size() == 6);
        CHECK(a.values == b.values);
        CHECK(a.argmax.value == *std::max_element(a.values.begin(), a.values.end()));
        CHECK_NOTHROW(a.validate());
    }
    SUBCASE("period-time rows equal standalone quench runs") {
        auto w = pulse;
        w.t_off = 84.0;
        const auto scan = period_time_scan(e, {38.0, 42.0}, 200.0, 0.1, w, 2);
        w.period = 42.0;
        const auto traj = quench_protocol(e, w, 200.0, 0.1);
        for (std::size_t i = 0; i < traj.size(); ++i) CHECK(scan.at(1, i) == traj.photon_population[i]);
    }
    SUBCASE("empty grids are rejected") {
        CHECK_THROWS_AS(pulse_grid_scan(e, {}, {42.0}, 10.0, 0.1, pulse), ConfigError);
        CHECK_THROWS_AS(period_time_scan(e, {}, 10.0, 0.1, pulse), ConfigError);
    }
}

TEST_CASE("constant-drive quench decays quickly with or without burning") {
    const auto w = DriveWaveform::constant(1e-3, 2.0, 1500.0);
    std::vector<std::vector<double>> decays;
    for (const Ensemble& e : {fig2_comb(), fig2_burned()}) {
        const auto traj = quench_protocol(e, w, 1700.0, 0.05);
        REQUIRE(traj.switch_off_index.has_value());
        const std::size_t off = *traj.switch_off_index;
        CHECK(traj.times[off] < 1500.0);
        std::vector<double> rel;
        for (std::size_t i = off + 200; i <= off + 2000 && i < traj.size(); ++i) {
            rel.push_back(traj.photon_population[i] / traj.photon_population[off]);
        }
        decays.push_back(rel);
    }
    REQUIRE(decays[0].size() == decays[1].size());
    for (std::size_t i = 0; i < decays[0].size(); ++i) {
        CHECK(decays[0][i] < 0.02);
        CHECK(decays[1][i] < 0.02);
        CHECK(std::abs(decays[0][i] - decays[1][i]) < 0.02);
    }
}
