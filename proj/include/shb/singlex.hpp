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

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "shb/ensemble.hpp"
#include "shb/trajectory.hpp"

namespace shb {

/// One-excitation block of the damped Tavis-Cummings Hamiltonian: an
/// arrowhead matrix with diagonal [w_a - i k/2, w_1 - i G/2, ...] and real
/// couplings g_i in the first row and column.
struct SingleExcitationOperator {
    std::vector<Complex> diag;
    std::vector<double> arm;

    std::size_t dim() const noexcept { return diag.size(); }
    bool hermitian() const;
    Eigen::MatrixXcd dense() const;
    /// out = M * in in O(dim).
    void apply(std::span<const Complex> in, std::span<Complex> out) const;
};

struct EigenResult {
    std::vector<Complex> eigenvalues;   ///< eV, sorted by real part
    std::vector<double> photon_weights; ///< |cavity component|^2 of unit eigenvectors
    bool dense_fallback = false;

    /// Energy decay rate 2|Im lambda_k| in eV.
    double decay_rate(std::size_t k) const { return 2.0 * std::abs(eigenvalues[k].imag()); }
};

struct EigenOptions {
    bool force_dense = false;
    int max_newton_iterations = 200;
};

/// `hermitian` drops both decay rates.
SingleExcitationOperator build_operator(const Ensemble& e, bool hermitian = false);

/// Eigenpairs via the secular equation
///   w_a - i k/2 - lambda = sum_i g_i^2 / (w_i - i G/2 - lambda)
/// with deflation of uncoupled and degenerate emitters; falls back to a dense
/// complex eigensolver if the root set is incomplete.
EigenResult eigensolve(const SingleExcitationOperator& op, const EigenOptions& opts = {});

/// Eigensolve at every cavity energy on `omega_a_grid`.
std::vector<EigenResult> cavity_sweep_spectrum(const Ensemble& e,
                                               const std::vector<double>& omega_a_grid,
                                               bool hermitian = false, int threads = 1);

/// The two eigenvalues whose real parts fall in the burned gaps, one per gap
/// when possible, ties broken by smallest |Im lambda|. Sorted by real part.
std::vector<Complex> dark_states(const EigenResult& r, const std::vector<Interval>& gaps);

/// Free evolution from one cavity photon: c(0) = (1, 0, ..., 0),
/// dc/dt = -(i/hbar) M c. Uses the spectral resolvent expansion and falls
/// back to adaptive RK4 if that expansion is ill-conditioned.
TrajectoryResult evolve_fock(const Ensemble& e, double t_max, double dt);

/// Adaptive step-doubling RK4 reference for evolve_fock, sampled at k*dt.
TrajectoryResult evolve_fock_direct(const Ensemble& e, double t_max, double dt,
                                    double tolerance = 1e-13);

/// Amplitudes c(t) for an arbitrary initial vector via dense
/// eigendecomposition; one column per entry of `times`.
Eigen::MatrixXcd evolve_state(const SingleExcitationOperator& op, const Eigen::VectorXcd& c0,
                              const std::vector<double>& times);

/// Default envelope-fit start: three bare-cavity lifetimes hbar/kappa.
double default_envelope_start(const Cavity& cavity);

/// EigenResult as CSV `re_eV,im_eV,photon_weight`.
void write_eigen_csv(std::ostream& os, const EigenResult& r);

}  // namespace shb
