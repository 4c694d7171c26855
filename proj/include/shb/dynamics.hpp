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
#include <limits>
#include <vector>

#include "shb/ensemble.hpp"
#include "shb/scan.hpp"
#include "shb/trajectory.hpp"

namespace shb {

/// Cavity-to-emitter dipole ratio mu_a / mu_e.
inline constexpr double kDipoleRatio = 19.0;
/// Default cavity drive amplitude, eV (deep linear regime).
inline constexpr double kDefaultDriveAmplitude = 1e-3;

/// Laser drive in the frame rotating at `probe_omega`.
struct DriveWaveform {
    enum class Kind { off, constant, pulse_train };

    /// How `period` maps onto the pi phase switches of a pulse train.
    enum class PulseConvention {
        flip_every_period,  ///< sign flips at every multiple of `period`
        full_cycle,         ///< `period` is one +/- cycle; flips every period/2
    };

    Kind kind = Kind::off;
    double amplitude_a = 0.0;  ///< Omega_a, eV
    double amplitude_e = 0.0;  ///< Omega_e, eV
    double probe_omega = 2.0;  ///< eV
    double period = 0.0;       ///< fs, pulse_train only
    double t_off = std::numeric_limits<double>::infinity();  ///< fs
    PulseConvention convention = PulseConvention::flip_every_period;

    /// Constant drive with amplitude_e = amplitude_a / kDipoleRatio.
    static DriveWaveform constant(double amplitude_a, double probe_omega,
                                  double t_off = std::numeric_limits<double>::infinity());
    /// Pi phase-switched rectangular train, amplitude_e = amplitude_a / kDipoleRatio.
    static DriveWaveform pulse_train(double amplitude_a, double probe_omega, double period,
                                     double t_off = std::numeric_limits<double>::infinity(),
                                     PulseConvention convention = PulseConvention::flip_every_period);

    void validate() const;
    /// Time between consecutive sign flips, fs.
    double flip_interval() const;
    /// Times in (0, t_end) where the drive value jumps.
    std::vector<double> breakpoints(double t_end) const;
};

struct DriveValue {
    double a = 0.0;  ///< cavity drive, eV
    double e = 0.0;  ///< per-emitter drive, eV
};

/// Linear-regime expectation values <a>, <sigma_i^->.
struct MeanFieldState {
    Complex a_amp = 0.0;
    std::vector<Complex> sigma_amps;
    double t = 0.0;

    static MeanFieldState ground(std::size_t n_emitters);
    double photon_population() const { return std::norm(a_amp); }
    double emitter_population() const;
};

DriveValue drive_value(const DriveWaveform& w, double t);

/// Observer called at every sample time; return false to stop early.
using MeanFieldObserver = std::function<bool(std::size_t sample, const MeanFieldState&)>;

/// Fourth-order fixed-step integration of
///   d<a>/dt   = -(i/hbar) [(D_a - i k/2) <a> + sum g_i <s_i> + Omega_a(t)]
///   d<s_i>/dt = -(i/hbar) [(D_i - i G/2) <s_i> + g_i <a> + Omega_e(t)]
/// with D = w - probe. Samples at k*dt; steps never straddle a drive
/// discontinuity. Returns the state at the last sample reached.
MeanFieldState integrate_mean_field(const Ensemble& e, const DriveWaveform& w,
                                    const MeanFieldState& initial, double t_max, double dt,
                                    const MeanFieldObserver& observer);

/// Trajectory from the all-ground state.
TrajectoryResult integrate_driven(const Ensemble& e, const DriveWaveform& w, double t_max,
                                  double dt);

/// Drive until steady (relative change of |<a>| over one optical period
/// below 1e-6 for a full period) or until w.t_off, whichever comes first,
/// then free decay up to t_total. Pulse trains switch off at w.t_off.
TrajectoryResult quench_protocol(const Ensemble& e, const DriveWaveform& w, double t_total,
                                 double dt);

/// Algebraic fixed point of the linear equations for a constant drive value.
MeanFieldState mean_field_steady_state(const Ensemble& e, double probe_omega, DriveValue drive);

/// |M c + f| for the state under a constant drive value.
double mean_field_residual(const Ensemble& e, double probe_omega, DriveValue drive,
                           const MeanFieldState& s);

/// Integrates a constant drive until the change of <a> over one optical
/// period, relative to |<a>|, stays below `rel_tol` for a full period;
/// throws NumericalError at `t_cap`.
MeanFieldState integrate_to_steady_state(const Ensemble& e, const DriveWaveform& w, double dt,
                                         double rel_tol, double t_cap);

/// Max over t of the photon population for a pulse train at each (omega, T).
/// `pulse` supplies amplitudes, t_off and convention; probe and period are
/// overwritten per cell.
ScanResult pulse_grid_scan(const Ensemble& e, const std::vector<double>& omega_grid,
                           const std::vector<double>& period_grid, double t_max, double dt,
                           const DriveWaveform& pulse, int threads = 1);

/// Photon population(T, t) from quench_protocol of a pulse train at fixed
/// probe, one row per period.
ScanResult period_time_scan(const Ensemble& e, const std::vector<double>& period_grid,
                            double t_max, double dt, const DriveWaveform& pulse, int threads = 1);

}  // namespace shb
