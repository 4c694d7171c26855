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

#include <cmath>
#include <string>

#include "oracles.hpp"
#include "shb/dynamics.hpp"
#include "shb/oracle.hpp"
#include "shb/singlex.hpp"

using namespace shb;

namespace {

Ensemble one_emitter(double kappa, double gamma, double g, double detuning = 0.0) {
    Ensemble e;
    e.cavity = {2.0, kappa};
    e.gamma = gamma;
    e.emitters = {{2.0 + detuning, g, 1}};
    return e;
}

double photons(const OperatorSet& ops, const VectorizedState& rho) {
    return expectation(ops.a.adjoint() * ops.a, rho).real();
}

DenseMatrix random_density(std::size_t d, std::uint64_t seed) {
    SplitMix64 rng(seed);
    DenseMatrix b(d, d);
    for (Eigen::Index i = 0; i < b.rows(); ++i)
        for (Eigen::Index j = 0; j < b.cols(); ++j) b(i, j) = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
    DenseMatrix rho = b * b.adjoint();
    return rho / rho.trace();
}

}  // namespace

TEST_CASE("operator space limits") {
    CHECK((DenseOperatorSpace{2, 2}.dim() == 12));
    CHECK_NOTHROW((DenseOperatorSpace{4, 3}.validate()));
    try {
        DenseOperatorSpace{4, 4}.validate();
        FAIL("expected ConfigError");
    } catch (const ConfigError& err) {
        CHECK(std::string(err.what()).find("6400") != std::string::npos);
    }
    CHECK_THROWS_AS((DenseOperatorSpace{5, 1}.validate()), ConfigError);
    CHECK_THROWS_AS((DenseOperatorSpace{1, 0}.validate()), ConfigError);
    CHECK_THROWS_AS(fock_state(DenseOperatorSpace{1, 2}, 3), ConfigError);
}

TEST_CASE("operators") {
    const DenseOperatorSpace space{2, 2};
    const auto ops = build_operators(space);
    // [a, a^dag] = 1 below the cutoff; emitter operators commute with a.
    const DenseMatrix comm = ops.a * ops.a.adjoint() - ops.a.adjoint() * ops.a;
    CHECK(std::abs(comm(0, 0) - 1.0) < 1e-15);
    for (const auto& s : ops.sigma) {
        CHECK((s * ops.a - ops.a * s).norm() < 1e-15);
        CHECK((s * s).norm() < 1e-15);
    }
    CHECK((ops.sigma[0] * ops.sigma[1] - ops.sigma[1] * ops.sigma[0]).norm() < 1e-15);
}

TEST_CASE("expectation equals the trace") {
    const DenseOperatorSpace space{2, 2};
    const auto ops = build_operators(space);
    const DenseMatrix rho = random_density(space.dim(), 4);
    const auto v = VectorizedState::from_matrix(rho);
    CHECK(v.trace().real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(v.is_physical());
    const DenseMatrix obs = random_density(space.dim(), 9) * 3.0 - ops.a.adjoint() * ops.a;
    CHECK(std::abs(expectation(obs, v) - (obs * rho).trace()) < 1e-12);
    CHECK(std::abs(photons(ops, fock_state(space, 2)) - 2.0) < 1e-15);
}

TEST_CASE("Liouvillian preserves the trace") {
    const Ensemble e = oracle::random_small(2, 21);
    const DenseOperatorSpace space{2, 2};
    for (double t : {0.0, 30.0}) {
        const auto w = DriveWaveform::pulse_train(0.01, 2.0, 42.0);
        const DenseMatrix L = build_liouvillian(e, space, w, t);
        const DenseMatrix id = DenseMatrix::Identity(space.dim(), space.dim());
        const Eigen::VectorXcd tr = VectorizedState::from_matrix(id).rho_vec;
        CHECK((tr.adjoint() * L).norm() < 1e-10);
    }
}

TEST_CASE("empty cavity decays exponentially") {
    Ensemble e;
    e.cavity = {2.0, 0.1};
    const DenseOperatorSpace space{0, 2};
    const auto ops = build_operators(space);
    const LindbladGenerator gen(e, space, DriveWaveform{});
    propagate(gen, fock_state(space, 1), 50.0, 0.05, [&](std::size_t, double t, const VectorizedState& rho) {
        CHECK(photons(ops, rho) == doctest::Approx(std::exp(-0.1 * t / kHbar)).epsilon(1e-9));
        return true;
    });
}

TEST_CASE("lossless Jaynes-Cummings exchange") {
    const Ensemble e = one_emitter(0.0, 0.0, 0.02);
    const DenseOperatorSpace space{1, 2};
    const auto ops = build_operators(space);
    const LindbladGenerator gen(e, space, DriveWaveform{});
    propagate(gen, fock_state(space, 1), 200.0, 0.05, [&](std::size_t, double t, const VectorizedState& rho) {
        const double c = std::cos(0.02 * t / kHbar);
        CHECK(std::abs(photons(ops, rho) - c * c) < 1e-9);
        return true;
    });
}

TEST_CASE("vacuum is stationary without drive") {
    const Ensemble e = oracle::random_small(3, 5);
    const DenseOperatorSpace space{3, 2};
    const auto states = propagate(LindbladGenerator(e, space, DriveWaveform{}), fock_state(space, 0), 50.0, 0.1, 100);
    for (const auto& s : states) CHECK((s.rho_vec - fock_state(space, 0).rho_vec).norm() == 0.0);
}

TEST_CASE("single-photon Lindblad dynamics equals the single-excitation evolution") {
    for (int n = 1; n <= 3; ++n) {
        const Ensemble e = oracle::random_small(n, 40 + static_cast<std::uint64_t>(n));
        const auto ref = evolve_fock(e, 100.0, 0.5);
        for (int cutoff : {2, 3}) {
            const DenseOperatorSpace space{n, cutoff};
            const auto ops = build_operators(space);
            const auto states = propagate(LindbladGenerator(e, space, DriveWaveform{}), fock_state(space, 1),
                                          100.0, 0.01, 50);
            REQUIRE(states.size() == ref.size());
            for (std::size_t i = 0; i < ref.size(); ++i) {
                CHECK(std::abs(photons(ops, states[i]) - ref.photon_population[i]) < 1e-8);
                CHECK(states[i].is_physical());
            }
        }
    }
}

TEST_CASE("steady states") {
    SUBCASE("undriven dissipative system relaxes to vacuum") {
        const Ensemble e = one_emitter(0.1, 0.01, 0.03, 0.02);
        const DenseOperatorSpace space{1, 2};
        const auto ss = steady_state(build_liouvillian(e, space, DriveWaveform{}, 0.0));
        CHECK_FALSE(ss.degenerate);
        CHECK(ss.null_dimension == 1);
        CHECK((ss.state.rho_vec - fock_state(space, 0).rho_vec).norm() < 1e-12);
    }
    SUBCASE("driven empty cavity holds a coherent amplitude") {
        Ensemble e;
        e.cavity = {2.01, 0.1};
        const DenseOperatorSpace space{0, 3};
        const auto ops = build_operators(space);
        const auto ss = steady_state(build_liouvillian(e, space, DriveWaveform::constant(1e-3, 2.0), 0.0));
        const Complex expected = Complex(0, -1e-3) / Complex(0.05, 0.01);
        CHECK(std::abs(expectation(ops.a, ss.state) - expected) < 1e-8 * std::abs(expected));
        CHECK(ss.residual < 1e-12);
    }
    SUBCASE("lossless system is flagged degenerate") {
        const Ensemble e = one_emitter(0.0, 0.0, 0.03);
        const auto ss = steady_state(build_liouvillian(e, DenseOperatorSpace{1, 2}, DriveWaveform{}, 0.0));
        CHECK(ss.degenerate);
        CHECK(ss.null_dimension > 1);
    }
    SUBCASE("long-time propagation converges to the steady state") {
        Ensemble e = oracle::random_small(2, 77);
        e.gamma = 0.03;
        const DenseOperatorSpace space{2, 2};
        const auto w = DriveWaveform::constant(5e-3, 2.0);
        const auto ss = steady_state(build_liouvillian(e, space, w, 0.0));
        CHECK(ss.state.is_physical());
        const auto states = propagate(LindbladGenerator(e, space, w), fock_state(space, 0), 2000.0, 0.1, 20000);
        CHECK((states.back().rho_vec - ss.state.rho_vec).norm() < 1e-6);
    }
}

TEST_CASE("mean field agrees with the Lindblad solution at weak drive") {
    const Ensemble e = one_emitter(0.1, 0.02, 0.03, 0.01);
    const DenseOperatorSpace space{1, 3};
    const auto ops = build_operators(space);
    auto discrepancy = [&](double amp) {
        const auto w = DriveWaveform::constant(amp, 2.0);
        const auto ss = steady_state(build_liouvillian(e, space, w, 0.0));
        const auto mf = mean_field_steady_state(e, 2.0, drive_value(w, 0.0));
        return std::abs(photons(ops, ss.state) - mf.photon_population());
    };
    const double lo = discrepancy(1e-3);
    const double hi = discrepancy(1e-2);
    // The weak-drive deviation is fourth order in the amplitude.
    CHECK(hi / lo > 0.9e4);
    CHECK(hi / lo < 1.1e4);

    const auto w = DriveWaveform::constant(1e-3, 2.0);
    const auto ss = steady_state(build_liouvillian(e, space, w, 0.0));
    const auto mf = mean_field_steady_state(e, 2.0, drive_value(w, 0.0));
    CHECK(std::abs(expectation(ops.a, ss.state) - mf.a_amp) < 1e-3 * std::abs(mf.a_amp));
}

TEST_CASE("pulse-driven Lindblad trajectory tracks the mean field") {
    const Ensemble e = oracle::random_small(2, 12);
    const DenseOperatorSpace space{2, 2};
    const auto ops = build_operators(space);
    const auto w = DriveWaveform::pulse_train(1e-4, 2.0, 30.0, 100.0);
    const auto states = propagate(LindbladGenerator(e, space, w), fock_state(space, 0), 150.0, 0.05, 100);
    const auto mf = integrate_driven(e, w, 150.0, 0.05);
    for (std::size_t i = 1; i < states.size(); ++i) {
        const double ref = mf.photon_population[i * 100];
        CHECK(std::abs(photons(ops, states[i]) - ref) < 1e-4 * ref + 1e-18);
    }
}
