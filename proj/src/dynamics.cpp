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

#include "shb/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "shb/parallel.hpp"

namespace shb {

DriveWaveform DriveWaveform::constant(double amplitude_a, double probe_omega, double t_off) {
    DriveWaveform w;
    w.kind = Kind::constant;
    w.amplitude_a = amplitude_a;
    w.amplitude_e = amplitude_a / kDipoleRatio;
    w.probe_omega = probe_omega;
    w.t_off = t_off;
    return w;
}

DriveWaveform DriveWaveform::pulse_train(double amplitude_a, double probe_omega, double period,
                                         double t_off, PulseConvention convention) {
    DriveWaveform w;
    w.kind = Kind::pulse_train;
    w.amplitude_a = amplitude_a;
    w.amplitude_e = amplitude_a / kDipoleRatio;
    w.probe_omega = probe_omega;
    w.period = period;
    w.t_off = t_off;
    w.convention = convention;
    return w;
}

void DriveWaveform::validate() const {
    if (!(amplitude_a >= 0.0) || !(amplitude_e >= 0.0)) {
        throw ConfigError("drive amplitudes must be >= 0");
    }
    if (!std::isfinite(probe_omega)) throw ConfigError("drive.probe_omega must be finite");
    if (kind == Kind::pulse_train && !(period > 0.0)) {
        throw ConfigError("drive.period must be > 0 for a pulse train");
    }
    if (!(t_off >= 0.0)) throw ConfigError("drive.t_off must be >= 0");
}

double DriveWaveform::flip_interval() const {
    return convention == PulseConvention::full_cycle ? 0.5 * period : period;
}

std::vector<double> DriveWaveform::breakpoints(double t_end) const {
    std::vector<double> out;
    const double stop = std::min(t_end, t_off);
    if (kind == Kind::pulse_train) {
        const double step = flip_interval();
        for (long long k = 1;; ++k) {
            const double t = static_cast<double>(k) * step;
            if (!(t < stop)) break;
            out.push_back(t);
        }
    }
    if (kind != Kind::off && t_off > 0.0 && t_off < t_end) out.push_back(t_off);
    return out;
}

MeanFieldState MeanFieldState::ground(std::size_t n_emitters) {
    MeanFieldState s;
    s.sigma_amps.assign(n_emitters, 0.0);
    return s;
}

double MeanFieldState::emitter_population() const {
    double sum = 0.0;
    for (const auto& c : sigma_amps) sum += std::norm(c);
    return sum;
}

DriveValue drive_value(const DriveWaveform& w, double t) {
    if (w.kind == DriveWaveform::Kind::off || t >= w.t_off) return {};
    if (w.kind == DriveWaveform::Kind::constant) return {w.amplitude_a, w.amplitude_e};
    const auto cycle = static_cast<long long>(std::floor(t / w.flip_interval()));
    const double sign = (cycle % 2 == 0) ? 1.0 : -1.0;
    return {sign * w.amplitude_a, sign * w.amplitude_e};
}

namespace {

// Arrowhead generator in the probe frame, stored as diagonal + couplings.
struct ProbeFrame {
    std::vector<Complex> diag;
    std::vector<double> g;

    ProbeFrame(const Ensemble& e, double probe) {
        diag.reserve(e.size() + 1);
        diag.emplace_back(e.cavity.omega_a - probe, -0.5 * e.cavity.kappa);
        for (const auto& em : e.emitters) {
            diag.emplace_back(em.omega - probe, -0.5 * e.gamma);
            g.push_back(em.g);
        }
    }

    std::size_t dim() const { return diag.size(); }

    // out = -(i/hbar) (M y + f)
    void rate(const std::vector<Complex>& y, DriveValue f, std::vector<Complex>& out) const {
        const Complex factor(0.0, -1.0 / kHbar);
        Complex head = diag[0] * y[0] + f.a;
        for (std::size_t i = 1; i < diag.size(); ++i) {
            head += g[i - 1] * y[i];
            out[i] = factor * (diag[i] * y[i] + g[i - 1] * y[0] + f.e);
        }
        out[0] = factor * head;
    }
};

double norm2(const std::vector<Complex>& y) {
    double s = 0.0;
    for (const auto& c : y) s += std::norm(c);
    return s;
}

MeanFieldState to_state(const std::vector<Complex>& y, double t) {
    MeanFieldState s;
    s.a_amp = y[0];
    s.sigma_amps.assign(y.begin() + 1, y.end());
    s.t = t;
    return s;
}

}  // namespace

MeanFieldState integrate_mean_field(const Ensemble& e, const DriveWaveform& w,
                                    const MeanFieldState& initial, double t_max, double dt,
                                    const MeanFieldObserver& observer) {
    w.validate();
    if (initial.sigma_amps.size() != e.size()) {
        throw ConfigError("initial state has " + std::to_string(initial.sigma_amps.size()) +
                          " emitter amplitudes, ensemble has " + std::to_string(e.size()));
    }
    const auto times = time_grid(t_max, dt);
    const ProbeFrame frame(e, w.probe_omega);
    const std::size_t n = frame.dim();

    std::vector<Complex> y(n), k1(n), k2(n), k3(n), k4(n), tmp(n);
    y[0] = initial.a_amp;
    std::copy(initial.sigma_amps.begin(), initial.sigma_amps.end(), y.begin() + 1);

    auto rk4 = [&](double h, DriveValue f) {
        frame.rate(y, f, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        frame.rate(tmp, f, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        frame.rate(tmp, f, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
        frame.rate(tmp, f, k4);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    };

    const auto breaks = w.breakpoints(times.back() + dt);
    std::size_t next_break = 0;

    if (observer && !observer(0, to_state(y, times[0]))) return to_state(y, times[0]);
    for (std::size_t s = 1; s < times.size(); ++s) {
        double t = times[s - 1];
        const double target = times[s];
        while (t < target) {
            while (next_break < breaks.size() && breaks[next_break] <= t + 1e-12) ++next_break;
            double stop = target;
            if (next_break < breaks.size() && breaks[next_break] < target - 1e-12) {
                stop = breaks[next_break];
            }
            const double h = stop - t;
            const DriveValue f = drive_value(w, t + 0.5 * h);
            const bool free = f.a == 0.0 && f.e == 0.0;
            const double before = free ? norm2(y) : 0.0;
            rk4(h, f);
            if (free && norm2(y) > before * (1.0 + 1e-10) + 1e-300) {
                std::ostringstream msg;
                msg << "population grew without drive at t=" << stop << " fs; step " << h
                    << " fs is unstable, reduce dt";
                throw NumericalError(msg.str());
            }
            t = stop;
        }
        if (observer && !observer(s, to_state(y, target))) return to_state(y, target);
    }
    return to_state(y, times.back());
}

TrajectoryResult integrate_driven(const Ensemble& e, const DriveWaveform& w, double t_max,
                                  double dt) {
    TrajectoryResult traj;
    traj.times = time_grid(t_max, dt);
    traj.photon_population.resize(traj.size());
    traj.emitter_population.resize(traj.size());
    integrate_mean_field(e, w, MeanFieldState::ground(e.size()), t_max, dt,
                         [&](std::size_t k, const MeanFieldState& s) {
                             traj.photon_population[k] = s.photon_population();
                             traj.emitter_population[k] = s.emitter_population();
                             return true;
                         });
    if (w.kind != DriveWaveform::Kind::off && w.t_off < t_max) {
        traj.switch_off_index = static_cast<std::size_t>(std::ceil(w.t_off / dt - 1e-9));
    }
    return traj;
}

TrajectoryResult quench_protocol(const Ensemble& e, const DriveWaveform& w, double t_total,
                                 double dt) {
    w.validate();
    if (!(w.t_off < t_total)) throw ConfigError("quench needs drive.t_off < t_total");
    if (w.kind != DriveWaveform::Kind::constant) {
        auto traj = integrate_driven(e, w, t_total, dt);
        return traj;
    }

    TrajectoryResult traj;
    traj.times = time_grid(t_total, dt);
    traj.photon_population.assign(traj.size(), 0.0);
    traj.emitter_population.assign(traj.size(), 0.0);

    const double optical = 2.0 * kPi * kHbar / std::abs(w.probe_omega);
    const auto lag = static_cast<std::size_t>(std::max(1.0, std::round(optical / dt)));
    const auto cap = static_cast<std::size_t>(std::ceil(w.t_off / dt - 1e-9));
    std::vector<double> modulus;
    std::size_t off_index = cap;
    std::size_t quiet = 0;  // consecutive samples below tolerance

    const auto on_state = integrate_mean_field(
        e, w, MeanFieldState::ground(e.size()), t_total, dt,
        [&](std::size_t k, const MeanFieldState& s) {
            traj.photon_population[k] = s.photon_population();
            traj.emitter_population[k] = s.emitter_population();
            modulus.push_back(std::abs(s.a_amp));
            if (k >= cap) return false;
            if (k >= lag) {
                const double now = modulus[k];
                const double then = modulus[k - lag];
                quiet = (now > 0.0 && std::abs(now - then) < 1e-6 * now) ? quiet + 1 : 0;
                if (quiet > lag) {
                    off_index = k;
                    return false;
                }
            }
            return true;
        });

    DriveWaveform off = w;
    off.kind = DriveWaveform::Kind::off;
    const double rest = traj.times.back() - traj.times[off_index];
    if (rest > 0.0) {
        integrate_mean_field(e, off, on_state, rest, dt,
                             [&](std::size_t k, const MeanFieldState& s) {
                                 const std::size_t idx = off_index + k;
                                 if (idx >= traj.size()) return false;
                                 traj.photon_population[idx] = s.photon_population();
                                 traj.emitter_population[idx] = s.emitter_population();
                                 return true;
                             });
    }
    traj.switch_off_index = off_index;
    return traj;
}

MeanFieldState mean_field_steady_state(const Ensemble& e, double probe_omega, DriveValue drive) {
    const ProbeFrame frame(e, probe_omega);
    // Eliminate the emitters: s_i = -(f_e + g_i a) / m_i.
    Complex lhs = frame.diag[0];
    Complex rhs = -drive.a;
    for (std::size_t i = 1; i < frame.dim(); ++i) {
        const Complex m = frame.diag[i];
        if (m == 0.0) throw SingularEvaluation("lossless emitter resonant with the probe");
        lhs -= frame.g[i - 1] * frame.g[i - 1] / m;
        rhs += frame.g[i - 1] * drive.e / m;
    }
    if (lhs == 0.0) throw SingularEvaluation("mean-field fixed point is singular");
    MeanFieldState s;
    s.a_amp = rhs / lhs;
    s.sigma_amps.resize(e.size());
    for (std::size_t i = 1; i < frame.dim(); ++i) {
        s.sigma_amps[i - 1] = -(drive.e + frame.g[i - 1] * s.a_amp) / frame.diag[i];
    }
    return s;
}

double mean_field_residual(const Ensemble& e, double probe_omega, DriveValue drive,
                           const MeanFieldState& s) {
    const ProbeFrame frame(e, probe_omega);
    std::vector<Complex> y(frame.dim()), r(frame.dim());
    y[0] = s.a_amp;
    std::copy(s.sigma_amps.begin(), s.sigma_amps.end(), y.begin() + 1);
    frame.rate(y, drive, r);
    double sum = 0.0;
    for (const auto& v : r) sum += std::norm(v);
    return std::sqrt(sum) * kHbar;
}

MeanFieldState integrate_to_steady_state(const Ensemble& e, const DriveWaveform& w, double dt,
                                         double rel_tol, double t_cap) {
    if (w.kind != DriveWaveform::Kind::constant) {
        throw ConfigError("steady-state integration needs a constant drive");
    }
    const double optical = 2.0 * kPi * kHbar / std::max(std::abs(w.probe_omega), 1e-3);
    const auto lag = static_cast<std::size_t>(std::max(1.0, std::round(optical / dt)));
    std::vector<Complex> history;
    std::size_t quiet = 0;  // consecutive samples below tolerance
    bool converged = false;
    auto last = integrate_mean_field(e, w, MeanFieldState::ground(e.size()), t_cap, dt,
                                     [&](std::size_t k, const MeanFieldState& s) {
                                         history.push_back(s.a_amp);
                                         if (k < lag) return true;
                                         const double now = std::abs(s.a_amp);
                                         const double change = std::abs(s.a_amp - history[k - lag]);
                                         quiet = (now > 0.0 && change < rel_tol * now) ? quiet + 1 : 0;
                                         if (quiet > lag) {
                                             converged = true;
                                             return false;
                                         }
                                         return true;
                                     });
    if (!converged) {
        throw NumericalError("mean-field state did not converge before t_cap=" +
                             std::to_string(t_cap) + " fs");
    }
    return last;
}

ScanResult pulse_grid_scan(const Ensemble& e, const std::vector<double>& omega_grid,
                           const std::vector<double>& period_grid, double t_max, double dt,
                           const DriveWaveform& pulse, int threads) {
    if (omega_grid.empty() || period_grid.empty()) throw ConfigError("scan grids must be nonempty");
    ScanResult scan;
    scan.axes = {{"omega_eV", omega_grid}, {"period_fs", period_grid}};
    scan.values.assign(omega_grid.size() * period_grid.size(), 0.0);
    const std::size_t cols = period_grid.size();
    parallel_for(scan.values.size(), threads, [&](std::size_t cell) {
        DriveWaveform w = pulse;
        w.kind = DriveWaveform::Kind::pulse_train;
        w.probe_omega = omega_grid[cell / cols];
        w.period = period_grid[cell % cols];
        double best = 0.0;
        integrate_mean_field(e, w, MeanFieldState::ground(e.size()), t_max, dt,
                             [&](std::size_t, const MeanFieldState& s) {
                                 best = std::max(best, s.photon_population());
                                 return true;
                             });
        scan.values[cell] = best;
    });
    scan.update_argmax();
    scan.metadata = {{"observable", "max_t photon population"},
                     {"t_max_fs", t_max},
                     {"dt_fs", dt},
                     {"amplitude_a_eV", pulse.amplitude_a},
                     {"amplitude_e_eV", pulse.amplitude_e},
                     {"pulse_convention", pulse.convention == DriveWaveform::PulseConvention::full_cycle
                                              ? "full_cycle"
                                              : "flip_every_period"}};
    return scan;
}

ScanResult period_time_scan(const Ensemble& e, const std::vector<double>& period_grid,
                            double t_max, double dt, const DriveWaveform& pulse, int threads) {
    if (period_grid.empty()) throw ConfigError("period grid must be nonempty");
    const auto times = time_grid(t_max, dt);
    ScanResult scan;
    scan.axes = {{"period_fs", period_grid}, {"t_fs", times}};
    scan.values.assign(period_grid.size() * times.size(), 0.0);
    parallel_for(period_grid.size(), threads, [&](std::size_t row) {
        DriveWaveform w = pulse;
        w.kind = DriveWaveform::Kind::pulse_train;
        w.period = period_grid[row];
        const auto traj = quench_protocol(e, w, t_max, dt);
        std::copy(traj.photon_population.begin(), traj.photon_population.end(),
                  scan.values.begin() + static_cast<std::ptrdiff_t>(row * times.size()));
    });
    scan.update_argmax();
    scan.metadata = {{"observable", "photon population"},
                     {"probe_omega_eV", pulse.probe_omega},
                     {"t_off_fs", pulse.t_off},
                     {"dt_fs", dt},
                     {"amplitude_a_eV", pulse.amplitude_a}};
    return scan;
}

}  // namespace shb
