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

#include "shb/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <unsupported/Eigen/KroneckerProduct>

namespace shb {

std::size_t DenseOperatorSpace::dim() const {
    if (n_emitters < 0 || photon_cutoff < 0 || n_emitters > 30) return 0;
    return static_cast<std::size_t>(photon_cutoff + 1) << n_emitters;
}

void DenseOperatorSpace::validate() const {
    if (n_emitters < 0 || n_emitters > kMaxEmitters) {
        throw ConfigError("oracle n_emitters must be in [0, " + std::to_string(kMaxEmitters) +
                          "], got " + std::to_string(n_emitters));
    }
    if (photon_cutoff < 1) {
        throw ConfigError("oracle photon_cutoff must be >= 1, got " + std::to_string(photon_cutoff));
    }
    if (vec_dim() > kMaxVectorDim) {
        throw ConfigError("oracle dimension dim^2 = " + std::to_string(vec_dim()) +
                          " exceeds the cap " + std::to_string(kMaxVectorDim));
    }
}

VectorizedState VectorizedState::from_matrix(const DenseMatrix& rho) {
    if (rho.rows() != rho.cols()) throw ConfigError("density matrix must be square");
    VectorizedState s;
    s.rho_vec = Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
    return s;
}

std::size_t VectorizedState::dim() const {
    const auto n = static_cast<std::size_t>(std::llround(std::sqrt(double(rho_vec.size()))));
    if (n * n != static_cast<std::size_t>(rho_vec.size())) {
        throw ConfigError("vectorized state length " + std::to_string(rho_vec.size()) +
                          " is not a square");
    }
    return n;
}

DenseMatrix VectorizedState::matrix() const {
    const auto n = static_cast<Eigen::Index>(dim());
    return Eigen::Map<const DenseMatrix>(rho_vec.data(), n, n);
}

Complex VectorizedState::trace() const { return matrix().trace(); }

void VectorizedState::hermitize() {
    const auto n = static_cast<Eigen::Index>(dim());
    Eigen::Map<DenseMatrix> rho(rho_vec.data(), n, n);
    const DenseMatrix sym = 0.5 * (rho + rho.adjoint());
    rho = sym;
}

bool VectorizedState::is_physical(double tol) const {
    const DenseMatrix rho = matrix();
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
    if (std::abs(rho.trace() - 1.0) > tol) return false;
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(0.5 * (rho + rho.adjoint()));
    return es.eigenvalues().minCoeff() > -tol;
}

OperatorSet build_operators(const DenseOperatorSpace& space) {
    space.validate();
    const auto nc = static_cast<Eigen::Index>(space.photon_cutoff + 1);
    DenseMatrix a_mode = DenseMatrix::Zero(nc, nc);
    for (Eigen::Index n = 1; n < nc; ++n) a_mode(n - 1, n) = std::sqrt(double(n));
    DenseMatrix lower = DenseMatrix::Zero(2, 2);
    lower(0, 1) = 1.0;

    const auto emitter_dim = Eigen::Index(1) << space.n_emitters;
    OperatorSet ops;
    ops.identity = DenseMatrix::Identity(nc * emitter_dim, nc * emitter_dim);
    ops.a = Eigen::kroneckerProduct(a_mode, DenseMatrix::Identity(emitter_dim, emitter_dim)).eval();
    for (int k = 0; k < space.n_emitters; ++k) {
        const auto before = nc * (Eigen::Index(1) << k);
        const auto after = Eigen::Index(1) << (space.n_emitters - k - 1);
        DenseMatrix left = Eigen::kroneckerProduct(DenseMatrix::Identity(before, before), lower).eval();
        ops.sigma.push_back(
            Eigen::kroneckerProduct(left, DenseMatrix::Identity(after, after)).eval());
    }
    return ops;
}

VectorizedState fock_state(const DenseOperatorSpace& space, int photons) {
    space.validate();
    if (photons < 0 || photons > space.photon_cutoff) {
        throw ConfigError("Fock state |" + std::to_string(photons) + "> is outside the cutoff " +
                          std::to_string(space.photon_cutoff));
    }
    const auto d = static_cast<Eigen::Index>(space.dim());
    const Eigen::Index idx = Eigen::Index(photons) << space.n_emitters;
    DenseMatrix rho = DenseMatrix::Zero(d, d);
    rho(idx, idx) = 1.0;
    return VectorizedState::from_matrix(rho);
}

namespace {

void check_fits(const Ensemble& e, const DenseOperatorSpace& space) {
    space.validate();
    e.validate();
    if (e.size() > static_cast<std::size_t>(space.n_emitters)) {
        throw ConfigError("ensemble has " + std::to_string(e.size()) +
                          " emitters, oracle space holds " + std::to_string(space.n_emitters));
    }
}

DenseMatrix bare_hamiltonian(const Ensemble& e, const OperatorSet& ops, double probe) {
    DenseMatrix h = (e.cavity.omega_a - probe) * ops.a.adjoint() * ops.a;
    for (std::size_t k = 0; k < e.size(); ++k) {
        const auto& s = ops.sigma[k];
        const auto& em = e.emitters[k];
        h += (em.omega - probe) * s.adjoint() * s;
        h += em.g * (s.adjoint() * ops.a + ops.a.adjoint() * s);
    }
    return h;
}

DenseMatrix cavity_drive(const OperatorSet& ops) { return ops.a + ops.a.adjoint(); }

DenseMatrix emitter_drive(const Ensemble& e, const OperatorSet& ops) {
    DenseMatrix h = DenseMatrix::Zero(ops.a.rows(), ops.a.cols());
    for (std::size_t k = 0; k < e.size(); ++k) h += ops.sigma[k] + ops.sigma[k].adjoint();
    return h;
}

// -i [H, .] under column stacking.
DenseMatrix commutator_part(const DenseMatrix& h, const DenseMatrix& id) {
    return Complex(0.0, 1.0) *
           (Eigen::kroneckerProduct(h.conjugate(), id).eval() - Eigen::kroneckerProduct(id, h).eval());
}

DenseMatrix dissipator_part(const Ensemble& e, const DenseOperatorSpace& space,
                            const OperatorSet& ops) {
    const DenseMatrix& id = ops.identity;
    DenseMatrix heff_loss = Complex(0.0, -0.5 * e.cavity.kappa) * (ops.a.adjoint() * ops.a);
    DenseMatrix jumps = e.cavity.kappa * Eigen::kroneckerProduct(ops.a.conjugate(), ops.a).eval();
    for (int k = 0; k < space.n_emitters; ++k) {
        const auto& s = ops.sigma[static_cast<std::size_t>(k)];
        heff_loss += Complex(0.0, -0.5 * e.gamma) * (s.adjoint() * s);
        jumps += e.gamma * Eigen::kroneckerProduct(s.conjugate(), s).eval();
    }
    return commutator_part(heff_loss, id) + jumps;
}

}  // namespace

DenseMatrix build_hamiltonian(const Ensemble& e, const DenseOperatorSpace& space,
                              double probe_omega, DriveValue drive) {
    check_fits(e, space);
    const auto ops = build_operators(space);
    DenseMatrix h = bare_hamiltonian(e, ops, probe_omega);
    if (drive.a != 0.0) h += drive.a * cavity_drive(ops);
    if (drive.e != 0.0) h += drive.e * emitter_drive(e, ops);
    return h;
}

DenseMatrix build_liouvillian(const Ensemble& e, const DenseOperatorSpace& space,
                              const DriveWaveform& w, double t) {
    check_fits(e, space);
    const auto ops = build_operators(space);
    const DenseMatrix h = build_hamiltonian(e, space, w.probe_omega, drive_value(w, t));
    return commutator_part(h, ops.identity) + dissipator_part(e, space, ops);
}

LindbladGenerator::LindbladGenerator(const Ensemble& e, const DenseOperatorSpace& space,
                                     const DriveWaveform& w)
    : wave_(w) {
    check_fits(e, space);
    w.validate();
    const auto ops = build_operators(space);
    const DenseMatrix l0 = commutator_part(bare_hamiltonian(e, ops, w.probe_omega), ops.identity) +
                           dissipator_part(e, space, ops);
    base_ = l0.sparseView(0.0);
    drive_a_ = commutator_part(cavity_drive(ops), ops.identity).sparseView(0.0);
    drive_e_ = commutator_part(emitter_drive(e, ops), ops.identity).sparseView(0.0);
}

LindbladGenerator::LindbladGenerator(const DenseMatrix& liouvillian) {
    if (liouvillian.rows() != liouvillian.cols()) throw ConfigError("Liouvillian must be square");
    base_ = liouvillian.sparseView(0.0);
    drive_a_.resize(base_.rows(), base_.cols());
    drive_e_.resize(base_.rows(), base_.cols());
}

void LindbladGenerator::apply(double t, const Eigen::VectorXcd& x, Eigen::VectorXcd& out) const {
    out.noalias() = base_ * x;
    const DriveValue f = drive_value(wave_, t);
    if (f.a != 0.0) out.noalias() += f.a * (drive_a_ * x);
    if (f.e != 0.0) out.noalias() += f.e * (drive_e_ * x);
    out /= kHbar;
}

std::vector<double> LindbladGenerator::breakpoints(double t_end) const {
    return wave_.breakpoints(t_end);
}

void propagate(const LindbladGenerator& gen, const VectorizedState& rho0, double t_max,
               double dt, const OracleObserver& observer) {
    if (static_cast<std::size_t>(rho0.rho_vec.size()) != gen.vec_dim()) {
        throw ConfigError("initial state length " + std::to_string(rho0.rho_vec.size()) +
                          " does not match the Liouvillian dimension " +
                          std::to_string(gen.vec_dim()));
    }
    const auto times = time_grid(t_max, dt);
    const auto breaks = gen.breakpoints(times.back() + dt);
    std::size_t next_break = 0;

    VectorizedState state = rho0;
    const Complex trace0 = state.trace();
    const auto n = state.rho_vec.size();
    Eigen::VectorXcd k1(n), k2(n), k3(n), k4(n), tmp(n);

    // L depends on time only through the piecewise-constant drive, so every
    // stage of a step that never straddles a jump can use the midpoint value.
    auto rk4 = [&](double t, double h) {
        auto& y = state.rho_vec;
        const double tm = t + 0.5 * h;
        gen.apply(tm, y, k1);
        tmp = y + 0.5 * h * k1;
        gen.apply(tm, tmp, k2);
        tmp = y + 0.5 * h * k2;
        gen.apply(tm, tmp, k3);
        tmp = y + h * k3;
        gen.apply(tm, tmp, k4);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };

    if (observer && !observer(0, times[0], state)) return;
    for (std::size_t s = 1; s < times.size(); ++s) {
        double t = times[s - 1];
        const double target = times[s];
        while (t < target) {
            while (next_break < breaks.size() && breaks[next_break] <= t + 1e-12) ++next_break;
            double stop = target;
            if (next_break < breaks.size() && breaks[next_break] < target - 1e-12) {
                stop = breaks[next_break];
            }
            rk4(t, stop - t);
            t = stop;
        }
        state.hermitize();
        const double drift = std::abs(state.trace() - trace0);
        if (!(drift <= 1e-8)) {
            std::ostringstream msg;
            msg << "oracle trace drifted by " << drift << " at t=" << target << " fs";
            throw NumericalError(msg.str());
        }
        if (observer && !observer(s, target, state)) return;
    }
}

std::vector<VectorizedState> propagate(const LindbladGenerator& gen, const VectorizedState& rho0,
                                       double t_max, double dt, std::size_t stride) {
    if (stride == 0) throw ConfigError("propagate stride must be >= 1");
    std::vector<VectorizedState> out;
    propagate(gen, rho0, t_max, dt, [&](std::size_t k, double, const VectorizedState& s) {
        if (k % stride == 0) out.push_back(s);
        return true;
    });
    return out;
}

Complex expectation(const DenseMatrix& obs, const VectorizedState& rho) {
    if (obs.rows() != obs.cols() || static_cast<std::size_t>(obs.rows()) != rho.dim()) {
        throw ConfigError("observable is " + std::to_string(obs.rows()) + "x" +
                          std::to_string(obs.cols()) + ", state dimension is " +
                          std::to_string(rho.dim()));
    }
    const DenseMatrix dag = obs.adjoint();
    const Eigen::Map<const Eigen::VectorXcd> lhs(dag.data(), dag.size());
    return lhs.dot(rho.rho_vec);
}

SteadyStateResult steady_state(const DenseMatrix& liouvillian) {
    const Eigen::Index m = liouvillian.rows();
    if (m != liouvillian.cols() || m == 0) throw ConfigError("Liouvillian must be square, nonempty");
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(m))));
    if (d * d != m) throw ConfigError("Liouvillian size is not a square dimension");

    Eigen::ColPivHouseholderQR<DenseMatrix> rank_qr(liouvillian);
    rank_qr.setThreshold(1e-9);

    DenseMatrix augmented(m + 1, m);
    augmented.topRows(m) = liouvillian;
    augmented.row(m).setZero();
    for (Eigen::Index i = 0; i < d; ++i) augmented(m, i * d + i) = 1.0;
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(m + 1);
    rhs(m) = 1.0;

    SteadyStateResult out;
    out.state.rho_vec = augmented.colPivHouseholderQr().solve(rhs);
    out.state.hermitize();
    out.state.rho_vec /= out.state.trace();
    out.residual = (liouvillian * out.state.rho_vec).norm();
    out.null_dimension = m - rank_qr.rank();
    out.degenerate = out.null_dimension > 1;
    return out;
}

}  // namespace shb
