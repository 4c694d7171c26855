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

#include "shb/singlex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <map>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "shb/parallel.hpp"

namespace shb {

bool SingleExcitationOperator::hermitian() const {
    return std::all_of(diag.begin(), diag.end(), [](Complex d) { return d.imag() == 0.0; });
}

Eigen::MatrixXcd SingleExcitationOperator::dense() const {
    const auto n = static_cast<Eigen::Index>(dim());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) m(i, i) = diag[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 1; i < n; ++i) {
        m(0, i) = arm[static_cast<std::size_t>(i - 1)];
        m(i, 0) = arm[static_cast<std::size_t>(i - 1)];
    }
    return m;
}

void SingleExcitationOperator::apply(std::span<const Complex> in, std::span<Complex> out) const {
    const std::size_t n = dim();
    Complex head = diag[0] * in[0];
    for (std::size_t i = 1; i < n; ++i) {
        head += arm[i - 1] * in[i];
        out[i] = diag[i] * in[i] + arm[i - 1] * in[0];
    }
    out[0] = head;
}

SingleExcitationOperator build_operator(const Ensemble& e, bool hermitian) {
    const double kappa = hermitian ? 0.0 : e.cavity.kappa;
    const double gamma = hermitian ? 0.0 : e.gamma;
    SingleExcitationOperator op;
    op.diag.reserve(e.size() + 1);
    op.arm.reserve(e.size());
    op.diag.emplace_back(e.cavity.omega_a, -0.5 * kappa);
    for (const auto& em : e.emitters) {
        op.diag.emplace_back(em.omega, -0.5 * gamma);
        op.arm.push_back(em.g);
    }
    return op;
}

namespace {

// Arrowhead problem after deflation: cavity entry d0, distinct poles with
// effective couplings w, plus eigenvalues split off with zero photon weight.
struct Reduced {
    Complex d0;
    std::vector<Complex> poles;
    std::vector<double> w;
    std::vector<Complex> deflated;
};

Reduced deflate(const SingleExcitationOperator& op) {
    Reduced red;
    red.d0 = op.diag[0];
    // Group coupled emitters with identical diagonal entries; each group acts
    // as one emitter of coupling sqrt(sum g^2) and leaves size-1 dark copies.
    std::map<std::pair<double, double>, double> groups;
    std::map<std::pair<double, double>, int> counts;
    for (std::size_t i = 1; i < op.dim(); ++i) {
        const double g = op.arm[i - 1];
        if (g == 0.0) {
            red.deflated.push_back(op.diag[i]);
            continue;
        }
        const auto key = std::make_pair(op.diag[i].real(), op.diag[i].imag());
        groups[key] += g * g;
        counts[key] += 1;
    }
    for (const auto& [key, g2] : groups) {
        const Complex p(key.first, key.second);
        red.poles.push_back(p);
        red.w.push_back(std::sqrt(g2));
        for (int c = 1; c < counts[key]; ++c) red.deflated.push_back(p);
    }
    return red;
}

struct Secular {
    const Reduced& red;

    Complex value(Complex z) const {
        Complex s = red.d0 - z;
        for (std::size_t j = 0; j < red.poles.size(); ++j) {
            s -= red.w[j] * red.w[j] / (red.poles[j] - z);
        }
        return s;
    }

    Complex derivative(Complex z) const {
        Complex s = -1.0;
        for (std::size_t j = 0; j < red.poles.size(); ++j) {
            const Complex d = red.poles[j] - z;
            s -= red.w[j] * red.w[j] / (d * d);
        }
        return s;
    }

    double nearest_pole_distance(Complex z) const {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : red.poles) best = std::min(best, std::abs(p - z));
        return best;
    }
};

struct SecularSolution {
    bool ok = false;
    Reduced red;
    std::vector<Complex> roots;
    std::vector<Complex> residues;  ///< -1 / f'(root): cavity weight in the resolvent
};

SecularSolution solve_secular(const SingleExcitationOperator& op, int max_iter) {
    SecularSolution sol;
    sol.red = deflate(op);
    const auto& red = sol.red;
    const Secular f{red};
    const std::size_t m = red.poles.size();

    if (m == 0) {
        sol.roots = {red.d0};
        sol.residues = {1.0};
        sol.ok = true;
        return sol;
    }

    std::vector<Complex> sorted = red.poles;
    std::sort(sorted.begin(), sorted.end(),
              [](Complex a, Complex b) { return a.real() < b.real(); });
    double omega2 = 0.0;
    for (double w : red.w) omega2 += w * w;
    const double reach = std::sqrt(omega2) + std::abs(red.d0 - sorted.front()) +
                         std::abs(red.d0 - sorted.back());

    // One seed per gap between adjacent poles plus one beyond each end.
    std::vector<Complex> seeds;
    seeds.reserve(m + 2);
    seeds.push_back(sorted.front() - reach);
    for (std::size_t j = 0; j + 1 < m; ++j) seeds.push_back(0.5 * (sorted[j] + sorted[j + 1]));
    seeds.push_back(sorted.back() + reach);

    std::vector<Complex> roots;
    for (Complex z : seeds) {
        bool converged = false;
        for (int it = 0; it < max_iter; ++it) {
            const Complex fz = f.value(z);
            if (fz == 0.0) {
                converged = true;
                break;
            }
            Complex step = fz / f.derivative(z);
            const double limit = 0.5 * f.nearest_pole_distance(z);
            if (std::abs(step) > limit) step *= limit / std::abs(step);
            z -= step;
            if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) {
                converged = true;
                break;
            }
        }
        if (converged && std::isfinite(z.real()) && std::isfinite(z.imag())) roots.push_back(z);
    }

    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
        return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    });
    std::vector<Complex> unique;
    for (Complex z : roots) {
        const bool dup = std::any_of(unique.begin(), unique.end(), [&](Complex u) {
            return std::abs(u - z) <= 1e-10 * std::max(1.0, std::abs(z));
        });
        if (!dup) unique.push_back(z);
    }
    if (unique.size() != m + 1) return sol;

    Complex total = 0.0;
    double magnitude = 0.0;
    sol.residues.reserve(unique.size());
    for (Complex z : unique) {
        const Complex r = -1.0 / f.derivative(z);
        sol.residues.push_back(r);
        total += r;
        magnitude += std::abs(r);
    }
    // The cavity diagonal of the resolvent has residues summing to one.
    sol.roots = std::move(unique);
    sol.ok = std::abs(total - 1.0) < 1e-9 && magnitude < 1e6;
    return sol;
}

EigenResult dense_eigensolve(const SingleExcitationOperator& op) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(op.dense(), true);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("dense eigensolver failed for arrowhead of dimension " +
                             std::to_string(op.dim()));
    }
    EigenResult r;
    r.dense_fallback = true;
    const auto n = static_cast<Eigen::Index>(op.dim());
    std::vector<std::pair<Complex, double>> pairs;
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto v = solver.eigenvectors().col(k);
        pairs.emplace_back(solver.eigenvalues()(k), std::norm(v(0)) / v.squaredNorm());
    }
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
        return a.first.real() < b.first.real();
    });
    for (const auto& [l, w] : pairs) {
        r.eigenvalues.push_back(l);
        r.photon_weights.push_back(w);
    }
    return r;
}

}  // namespace

EigenResult eigensolve(const SingleExcitationOperator& op, const EigenOptions& opts) {
    if (op.dim() == 0) throw ConfigError("operator has no cavity entry");
    if (opts.force_dense) return dense_eigensolve(op);

    const auto sol = solve_secular(op, opts.max_newton_iterations);
    if (!sol.ok) return dense_eigensolve(op);

    std::vector<std::pair<Complex, double>> pairs;
    for (Complex z : sol.roots) {
        double norm2 = 1.0;
        for (std::size_t j = 0; j < sol.red.poles.size(); ++j) {
            norm2 += sol.red.w[j] * sol.red.w[j] / std::norm(z - sol.red.poles[j]);
        }
        pairs.emplace_back(z, 1.0 / norm2);
    }
    for (Complex z : sol.red.deflated) pairs.emplace_back(z, 0.0);
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
        return a.first.real() < b.first.real();
    });

    EigenResult r;
    for (const auto& [l, w] : pairs) {
        r.eigenvalues.push_back(l);
        r.photon_weights.push_back(w);
    }
    return r;
}

std::vector<EigenResult> cavity_sweep_spectrum(const Ensemble& e,
                                               const std::vector<double>& omega_a_grid,
                                               bool hermitian, int threads) {
    if (omega_a_grid.empty()) throw ConfigError("cavity sweep grid is empty");
    std::vector<EigenResult> out(omega_a_grid.size());
    parallel_for(omega_a_grid.size(), threads, [&](std::size_t i) {
        Ensemble shifted = e;
        shifted.cavity.omega_a = omega_a_grid[i];
        out[i] = eigensolve(build_operator(shifted, hermitian));
    });
    return out;
}

std::vector<Complex> dark_states(const EigenResult& r, const std::vector<Interval>& gaps) {
    std::vector<Complex> picked;
    for (const auto& gap : gaps) {
        const Complex* best = nullptr;
        for (const auto& l : r.eigenvalues) {
            if (!(l.real() > gap.lo && l.real() < gap.hi)) continue;
            if (best == nullptr || std::abs(l.imag()) < std::abs(best->imag())) best = &l;
        }
        if (best != nullptr) picked.push_back(*best);
    }
    std::sort(picked.begin(), picked.end(),
              [](Complex a, Complex b) { return a.real() < b.real(); });
    return picked;
}

TrajectoryResult evolve_fock(const Ensemble& e, double t_max, double dt) {
    if (!(dt > 0.0) || !(t_max >= dt)) throw ConfigError("evolve_fock needs dt > 0 and t_max >= dt");
    const auto op = build_operator(e);
    const auto sol = solve_secular(op, EigenOptions{}.max_newton_iterations);
    if (!sol.ok) return evolve_fock_direct(e, t_max, dt);

    const auto& red = sol.red;
    const std::size_t nr = sol.roots.size();
    const std::size_t m = red.poles.size();
    // Emitter amplitude of pole j in eigenmode k, times the cavity residue.
    std::vector<Complex> coef(nr * m);
    for (std::size_t k = 0; k < nr; ++k) {
        for (std::size_t j = 0; j < m; ++j) {
            coef[k * m + j] = sol.residues[k] * red.w[j] / (sol.roots[k] - red.poles[j]);
        }
    }

    TrajectoryResult traj;
    traj.times = time_grid(t_max, dt);
    traj.photon_population.resize(traj.size());
    traj.emitter_population.resize(traj.size());
    std::vector<Complex> phase(nr), amp(m);
    for (std::size_t s = 0; s < traj.size(); ++s) {
        const double t = traj.times[s];
        Complex ca = 0.0;
        for (std::size_t k = 0; k < nr; ++k) {
            phase[k] = std::exp(Complex(0.0, -1.0) * sol.roots[k] * (t / kHbar));
            ca += sol.residues[k] * phase[k];
        }
        std::fill(amp.begin(), amp.end(), Complex(0.0));
        for (std::size_t k = 0; k < nr; ++k) {
            const Complex* row = &coef[k * m];
            for (std::size_t j = 0; j < m; ++j) amp[j] += row[j] * phase[k];
        }
        double pe = 0.0;
        for (const auto& a : amp) pe += std::norm(a);
        traj.photon_population[s] = std::norm(ca);
        traj.emitter_population[s] = pe;
    }
    return traj;
}

TrajectoryResult evolve_fock_direct(const Ensemble& e, double t_max, double dt, double tolerance) {
    if (!(dt > 0.0) || !(t_max >= dt)) throw ConfigError("evolve_fock needs dt > 0 and t_max >= dt");
    auto op = build_operator(e);
    // Rotating frame at the cavity energy; populations are unaffected.
    const double ref = op.diag[0].real();
    for (auto& d : op.diag) d -= ref;

    const std::size_t n = op.dim();
    const Complex factor(0.0, -1.0 / kHbar);
    std::vector<Complex> k1(n), k2(n), k3(n), k4(n), tmp(n);
    auto rk4 = [&](const std::vector<Complex>& y, double h, std::vector<Complex>& out) {
        op.apply(y, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * factor * k1[i];
        op.apply(tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * factor * k2[i];
        op.apply(tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * factor * k3[i];
        op.apply(tmp, k4);
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = y[i] + h / 6.0 * factor * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    };

    TrajectoryResult traj;
    traj.times = time_grid(t_max, dt);
    traj.photon_population.resize(traj.size());
    traj.emitter_population.resize(traj.size());

    std::vector<Complex> y(n, 0.0), full, half, halves;
    y[0] = 1.0;
    auto record = [&](std::size_t s) {
        traj.photon_population[s] = std::norm(y[0]);
        double pe = 0.0;
        for (std::size_t i = 1; i < n; ++i) pe += std::norm(y[i]);
        traj.emitter_population[s] = pe;
    };
    record(0);

    double h = dt;
    double t = 0.0;
    for (std::size_t s = 1; s < traj.size(); ++s) {
        const double target = traj.times[s];
        while (t < target - 1e-12 * dt) {
            const double step = std::min(h, target - t);
            rk4(y, step, full);
            rk4(y, 0.5 * step, half);
            rk4(half, 0.5 * step, halves);
            double err = 0.0;
            for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(full[i] - halves[i]));
            if (err <= tolerance || step < 1e-8) {
                // Richardson extrapolation of the two estimates.
                for (std::size_t i = 0; i < n; ++i) y[i] = halves[i] + (halves[i] - full[i]) / 15.0;
                t += step;
                if (err < 0.1 * tolerance) h = std::min(2.0 * h, dt);
            } else {
                h = 0.5 * step;
            }
        }
        t = target;
        record(s);
    }
    return traj;
}

Eigen::MatrixXcd evolve_state(const SingleExcitationOperator& op, const Eigen::VectorXcd& c0,
                              const std::vector<double>& times) {
    if (static_cast<std::size_t>(c0.size()) != op.dim()) {
        throw ConfigError("initial vector dimension does not match operator");
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(op.dense(), true);
    if (solver.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
    const Eigen::MatrixXcd& v = solver.eigenvectors();
    const Eigen::VectorXcd x = v.partialPivLu().solve(c0);
    if ((v * x - c0).norm() > 1e-10 * std::max(1.0, c0.norm())) {
        throw NumericalError("eigenvector basis is ill-conditioned; use a direct integrator");
    }
    Eigen::MatrixXcd out(c0.size(), static_cast<Eigen::Index>(times.size()));
    for (std::size_t s = 0; s < times.size(); ++s) {
        Eigen::VectorXcd phased = x;
        for (Eigen::Index k = 0; k < x.size(); ++k) {
            phased(k) *= std::exp(Complex(0.0, -1.0) * solver.eigenvalues()(k) * (times[s] / kHbar));
        }
        out.col(static_cast<Eigen::Index>(s)) = v * phased;
    }
    return out;
}

double default_envelope_start(const Cavity& cavity) {
    if (!(cavity.kappa > 0.0)) throw ConfigError("envelope start needs kappa > 0");
    return 3.0 * kHbar / cavity.kappa;
}

void write_eigen_csv(std::ostream& os, const EigenResult& r) {
    os << "re_eV,im_eV,photon_weight\n";
    char buf[96];
    for (std::size_t k = 0; k < r.eigenvalues.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.12f,%.12e,%.12e\n", r.eigenvalues[k].real(),
                      r.eigenvalues[k].imag(), r.photon_weights[k]);
        os << buf;
    }
}

}  // namespace shb
