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

#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "shb/dynamics.hpp"
#include "shb/ensemble.hpp"

namespace shb {

using DenseMatrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

/// Truncated Hilbert space cavity (x) emitter_1 (x) ... (x) emitter_n.
/// Cavity index is most significant; each emitter is {ground, excited}.
struct DenseOperatorSpace {
    int n_emitters = 0;
    int photon_cutoff = 2;

    static constexpr int kMaxEmitters = 4;
    static constexpr std::size_t kMaxVectorDim = 4096;

    std::size_t dim() const;
    std::size_t vec_dim() const { return dim() * dim(); }
    /// Throws ConfigError; the message carries dim^2 when the cap is hit.
    void validate() const;
};

/// Column-stacked density matrix.
struct VectorizedState {
    Eigen::VectorXcd rho_vec;

    static VectorizedState from_matrix(const DenseMatrix& rho);
    std::size_t dim() const;
    DenseMatrix matrix() const;
    Complex trace() const;
    /// Replaces rho by (rho + rho^dagger) / 2.
    void hermitize();
    /// Hermitian, unit trace and PSD within `tol`.
    bool is_physical(double tol = 1e-8) const;
};

struct OperatorSet {
    DenseMatrix identity;
    DenseMatrix a;
    std::vector<DenseMatrix> sigma;  ///< lowering operator of each emitter
};

OperatorSet build_operators(const DenseOperatorSpace& space);

/// Cavity Fock state |n> with every emitter in its ground state.
VectorizedState fock_state(const DenseOperatorSpace& space, int photons);

/// Rotating-frame Hamiltonian at `probe_omega` with the given drive values, eV.
DenseMatrix build_hamiltonian(const Ensemble& e, const DenseOperatorSpace& space,
                              double probe_omega, DriveValue drive);

/// Liouvillian in eV (d|rho>>/dt = L|rho>> / hbar) under column stacking:
///   L = i(H_eff^* (x) I - I (x) H_eff) + k a^* (x) a + G sum_i s_i^* (x) s_i
/// with H_eff = H - i k/2 a^dag a - i G/2 sum_i s_i^dag s_i and the drive of
/// `w` evaluated at `t`.
DenseMatrix build_liouvillian(const Ensemble& e, const DenseOperatorSpace& space,
                              const DriveWaveform& w, double t);

/// Sparse time-dependent generator L(t) = L_0 + Omega_a(t) L_a + Omega_e(t) L_e.
class LindbladGenerator {
public:
    LindbladGenerator(const Ensemble& e, const DenseOperatorSpace& space, const DriveWaveform& w);
    /// Fixed generator in eV.
    explicit LindbladGenerator(const DenseMatrix& liouvillian);

    std::size_t vec_dim() const { return static_cast<std::size_t>(base_.rows()); }
    /// out = L(t) x / hbar, fs^-1.
    void apply(double t, const Eigen::VectorXcd& x, Eigen::VectorXcd& out) const;
    /// Drive discontinuities in (0, t_end).
    std::vector<double> breakpoints(double t_end) const;

private:
    SparseMatrix base_;
    SparseMatrix drive_a_;
    SparseMatrix drive_e_;
    DriveWaveform wave_;
};

using OracleObserver = std::function<bool(std::size_t sample, double t, const VectorizedState&)>;

/// Fixed-step RK4 sampled at k*dt with steps split at drive discontinuities.
/// Re-Hermitizes after every step; throws NumericalError if the trace drifts
/// by more than 1e-8.
void propagate(const LindbladGenerator& gen, const VectorizedState& rho0, double t_max,
               double dt, const OracleObserver& observer);

/// States at every `stride`-th sample.
std::vector<VectorizedState> propagate(const LindbladGenerator& gen, const VectorizedState& rho0,
                                       double t_max, double dt, std::size_t stride = 1);

/// <<O^dagger|rho>> = tr(O rho).
Complex expectation(const DenseMatrix& obs, const VectorizedState& rho);

struct SteadyStateResult {
    VectorizedState state;
    double residual = 0.0;    ///< ||L rho|| in eV
    bool degenerate = false;  ///< null space of L has dimension > 1
    long null_dimension = 0;
};

/// Least-squares solution of L rho = 0 on the trace-one slice.
SteadyStateResult steady_state(const DenseMatrix& liouvillian);

}  // namespace shb
