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

#include "shb/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "shb/parallel.hpp"
#include "shb/rng.hpp"
#include "shb/singlex.hpp"

namespace shb {

namespace fs = std::filesystem;

void NumericsSpec::validate() const {
    if (!(dt > 0.0)) throw ConfigError("numerics.dt must be > 0");
    if (!(t_max >= dt)) throw ConfigError("numerics.t_max must be >= numerics.dt");
    if (sweep_points < 3) throw ConfigError("numerics.sweep_points must be >= 3");
    if (!(omega_min < omega_max)) {
        throw ConfigError("numerics.omega_min must be < numerics.omega_max");
    }
    if (!(prominence >= 0.0)) throw ConfigError("numerics.prominence must be >= 0");
}

const std::vector<double>& ExperimentConfig::grid(const std::string& name) const {
    const auto it = grids.find(name);
    if (it == grids.end() || it->second.empty()) {
        throw ConfigError("field 'grids." + name + "' is required by scenario " + scenario);
    }
    return it->second;
}

void ExperimentConfig::validate() const {
    find_scenario(scenario);
    cavity.validate();
    if (!(gamma >= 0.0)) throw ConfigError("gamma must be >= 0");
    if (ensemble.kind == EnsembleSource::Kind::comb) {
        ensemble.comb.validate();
        if (holes) holes->validate(ensemble.comb.n);
    } else {
        ensemble.random.validate();
        if (holes) holes->validate(ensemble.random.n);
        if (disorder) throw ConfigError("disorder applies to comb ensembles only");
    }
    if (disorder) disorder->validate();
    if (drive) drive->validate();
    numerics.validate();
    for (const auto& [name, values] : grids) {
        for (double v : values) {
            if (!std::isfinite(v)) throw ConfigError("grids." + name + " has a non-finite entry");
        }
    }
}

// --- config <-> JSON --------------------------------------------------------

Json config_to_json(const ExperimentConfig& cfg) {
    Json j;
    j["units"] = {{"energy", "eV"}, {"time", "fs"}};
    j["scenario"] = cfg.scenario;
    if (cfg.ensemble.kind == EnsembleSource::Kind::comb) {
        j["ensemble"] = to_json(cfg.ensemble.comb);
    } else {
        j["ensemble"] = to_json(cfg.ensemble.random);
        j["ensemble"].erase("seed");
    }
    j["cavity"] = to_json(cfg.cavity);
    j["gamma"] = cfg.gamma;
    j["holes"] = cfg.holes ? to_json(*cfg.holes) : Json(nullptr);
    if (cfg.disorder) {
        j["disorder"] = to_json(*cfg.disorder);
        j["disorder"].erase("seed");
    } else {
        j["disorder"] = nullptr;
    }
    j["drive"] = cfg.drive ? to_json(*cfg.drive) : Json(nullptr);
    j["grids"] = Json::object();
    for (const auto& [name, values] : cfg.grids) j["grids"][name] = values;
    j["numerics"] = {{"dt", cfg.numerics.dt},
                     {"t_max", cfg.numerics.t_max},
                     {"sweep_points", cfg.numerics.sweep_points},
                     {"omega_min", cfg.numerics.omega_min},
                     {"omega_max", cfg.numerics.omega_max},
                     {"prominence", cfg.numerics.prominence}};
    j["rng"] = SplitMix64::kName;
    j["seed"] = cfg.seed;
    j["output_dir"] = cfg.output_dir;
    return j;
}

namespace {

std::vector<double> grid_from_json(const Json& v, const std::string& path) {
    if (v.is_array()) {
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) {
                throw ConfigError("field '" + path + "[" + std::to_string(i) + "]' must be a number");
            }
            out.push_back(v[i].get<double>());
        }
        return out;
    }
    if (v.is_object()) {
        const double lo = detail::field(v, path, "lo", 0.0);
        const double hi = detail::field(v, path, "hi", 0.0);
        const int n = detail::field(v, path, "n", 0);
        if (n < 1) throw ConfigError("field '" + path + ".n' must be >= 1");
        return linspace(lo, hi, n);
    }
    throw ConfigError("field '" + path + "' must be an array or {lo, hi, n}");
}

}  // namespace

ExperimentConfig config_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    const auto units = detail::field(j, "config", "units", Json(nullptr));
    if (!units.is_object() || units.value("energy", "") != "eV" || units.value("time", "") != "fs") {
        throw ConfigError("field 'units' must be {\"energy\": \"eV\", \"time\": \"fs\"}");
    }
    const auto name = detail::field<std::string>(j, "config", "scenario", "");
    if (name.empty()) throw ConfigError("field 'scenario' is required");
    ExperimentConfig cfg = find_scenario(name).defaults;

    if (j.contains("rng")) {
        const auto rng = detail::field<std::string>(j, "config", "rng", std::string(SplitMix64::kName));
        if (rng != SplitMix64::kName) {
            throw ConfigError("field 'rng' must be " + std::string(SplitMix64::kName));
        }
    }
    if (j.contains("ensemble") && !j.at("ensemble").is_null()) {
        const Json& ej = j.at("ensemble");
        const auto kind = detail::field<std::string>(ej, "ensemble", "kind", "comb");
        if (kind == "comb") {
            cfg.ensemble.kind = EnsembleSource::Kind::comb;
            cfg.ensemble.comb = comb_from_json(ej);
        } else if (kind == "random") {
            cfg.ensemble.kind = EnsembleSource::Kind::random;
            cfg.ensemble.random = random_from_json(ej);
        } else {
            throw ConfigError("field 'ensemble.kind' must be comb or random, got " + kind);
        }
    }
    if (j.contains("cavity")) cfg.cavity = cavity_from_json(j.at("cavity"));
    cfg.gamma = detail::field(j, "config", "gamma", cfg.gamma);
    if (j.contains("holes")) {
        cfg.holes = j.at("holes").is_null() ? std::nullopt
                                            : std::optional<HoleSpec>(holes_from_json(j.at("holes")));
    }
    if (j.contains("disorder")) {
        cfg.disorder = j.at("disorder").is_null()
                           ? std::nullopt
                           : std::optional<DisorderSpec>(disorder_from_json(j.at("disorder")));
    }
    if (j.contains("drive")) {
        cfg.drive = j.at("drive").is_null()
                        ? std::nullopt
                        : std::optional<DriveWaveform>(drive_from_json(j.at("drive")));
    }
    if (j.contains("grids")) {
        const Json& g = j.at("grids");
        if (!g.is_object()) throw ConfigError("field 'grids' must be an object");
        for (const auto& [key, value] : g.items()) {
            cfg.grids[key] = grid_from_json(value, "grids." + key);
        }
    }
    if (j.contains("numerics")) {
        const Json& n = j.at("numerics");
        auto& num = cfg.numerics;
        num.dt = detail::field(n, "numerics", "dt", num.dt);
        num.t_max = detail::field(n, "numerics", "t_max", num.t_max);
        num.sweep_points = detail::field(n, "numerics", "sweep_points", num.sweep_points);
        num.omega_min = detail::field(n, "numerics", "omega_min", num.omega_min);
        num.omega_max = detail::field(n, "numerics", "omega_max", num.omega_max);
        num.prominence = detail::field(n, "numerics", "prominence", num.prominence);
    }
    cfg.seed = detail::field(j, "config", "seed", cfg.seed);
    cfg.output_dir = detail::field(j, "config", "output_dir", cfg.output_dir);
    cfg.validate();
    return cfg;
}

// --- ensembles and analysis helpers ----------------------------------------

Ensemble build_base_ensemble(const ExperimentConfig& cfg) {
    if (cfg.ensemble.kind == EnsembleSource::Kind::random) {
        RandomEnsembleSpec spec = cfg.ensemble.random;
        spec.seed = cfg.seed;
        return sample_random_ensemble(spec, cfg.gamma, cfg.cavity);
    }
    Ensemble e = build_comb(cfg.ensemble.comb, cfg.gamma, cfg.cavity);
    if (cfg.disorder) {
        DisorderSpec d = *cfg.disorder;
        d.seed = cfg.seed;
        e = apply_disorder(e, d, cfg.ensemble.comb);
    }
    return e;
}

Ensemble build_burned_ensemble(const ExperimentConfig& cfg) {
    const Ensemble base = build_base_ensemble(cfg);
    return cfg.holes ? burn_holes(base, *cfg.holes) : base;
}

std::vector<Interval> hole_intervals(const ExperimentConfig& cfg) {
    if (!cfg.holes) return {};
    if (cfg.holes->mode == HoleSpec::Mode::by_window) {
        std::vector<Interval> out;
        for (const auto& w : cfg.holes->windows) {
            out.push_back({w.center - 0.5 * w.width, w.center + 0.5 * w.width});
        }
        return out;
    }
    const Ensemble base = build_base_ensemble(cfg);
    return hole_gaps(base, burn_holes(base, *cfg.holes));
}

double hole_contrast(const SpectrumResult& s, const std::vector<Interval>& windows,
                     double omega_ref) {
    if (windows.empty()) throw ConfigError("hole contrast needs at least one window");
    if (s.omegas.empty()) throw ConfigError("hole contrast needs a nonempty spectrum");
    const auto nearest = std::min_element(s.omegas.begin(), s.omegas.end(), [&](double a, double b) {
        return std::abs(a - omega_ref) < std::abs(b - omega_ref);
    });
    const double ref = s.values[static_cast<std::size_t>(nearest - s.omegas.begin())];
    if (!(ref > 0.0)) throw NumericalError("reference transmission is not positive");
    double sum = 0.0;
    for (const auto& w : windows) {
        double best = -1.0;
        for (std::size_t i = 0; i < s.omegas.size(); ++i) {
            if (w.contains(s.omegas[i])) best = std::max(best, s.values[i]);
        }
        if (best < 0.0) {
            std::ostringstream msg;
            msg << "no spectrum sample inside [" << w.lo << ", " << w.hi << "] eV";
            throw ConfigError(msg.str());
        }
        sum += best / ref;
    }
    return sum / static_cast<double>(windows.size());
}

ScanResult gamma_scan(const ExperimentConfig& base, const std::vector<double>& gammas,
                      int threads) {
    if (gammas.empty()) throw ConfigError("gamma list must be nonempty");
    const auto& num = base.numerics;
    const auto omegas = linspace(num.omega_min, num.omega_max, num.sweep_points);
    const auto windows = hole_intervals(base);
    ScanResult scan;
    scan.axes = {{"gamma_eV", gammas}, {"omega_eV", omegas}};
    scan.values.reserve(gammas.size() * omegas.size());
    Json contrast = Json::array();
    for (double g : gammas) {
        ExperimentConfig cfg = base;
        cfg.gamma = g;
        const Ensemble burned = build_burned_ensemble(cfg);
        const auto s = transmission_sweep(burned, num.omega_min, num.omega_max, num.sweep_points,
                                          true, num.prominence, threads);
        scan.values.insert(scan.values.end(), s.values.begin(), s.values.end());
        contrast.push_back(windows.empty() ? Json(nullptr)
                                           : Json(hole_contrast(s, windows, base.ensemble.center())));
    }
    scan.update_argmax();
    scan.metadata = {{"observable", "normalized transmission"},
                     {"hole_contrast", contrast},
                     {"seed", base.seed}};
    return scan;
}

// --- scenario execution ------------------------------------------------------

namespace {

struct Context {
    const ExperimentConfig& cfg;
    int threads;
    fs::path dir;
    std::vector<std::string> files;
    Json summary = Json::object();

    void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
        std::ofstream os(dir / name, std::ios::binary);
        if (!os) throw ConfigError("cannot write " + (dir / name).string());
        body(os);
        if (!os) throw ConfigError("write failed for " + (dir / name).string());
        files.push_back(name);
    }
    void write_json(const std::string& name, const Json& j) {
        write(name, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
    }
};

Json peaks_json(const std::vector<Peak>& peaks) {
    Json out = Json::array();
    for (const auto& p : peaks) out.push_back(to_json(p));
    return out;
}

Json complex_list(const std::vector<Complex>& zs) {
    Json out = Json::array();
    for (const auto& z : zs) out.push_back({{"re", z.real()}, {"im", z.imag()}});
    return out;
}

SpectrumResult sweep(const Context& ctx, const Ensemble& e) {
    const auto& n = ctx.cfg.numerics;
    return transmission_sweep(e, n.omega_min, n.omega_max, n.sweep_points, true, n.prominence,
                              ctx.threads);
}

// Envelope rate of the part of a trajectory after `from`, null if too few maxima.
Json envelope_rate(const TrajectoryResult& traj, double from) {
    try {
        return fit_envelope_decay(traj, from);
    } catch (const NumericalError&) {
        return nullptr;
    }
}

int round_index(double v, const char* what) {
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-9) {
        throw ConfigError(std::string("grid ") + what + " entries must be integers");
    }
    return static_cast<int>(r);
}

std::string tag(const char* prefix, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%g", prefix, v);
    return buf;
}

void write_eigen_long(std::ostream& os, const std::vector<double>& grid,
                      const std::vector<EigenResult>& results) {
    os << "omega_a_eV,re_eV,im_eV,photon_weight\n";
    char buf[160];
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto& r = results[k];
        for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.10g,%.12e,%.12e,%.12e\n", grid[k],
                          r.eigenvalues[i].real(), r.eigenvalues[i].imag(), r.photon_weights[i]);
            os << buf;
        }
    }
}

void run_fig1c(Context& ctx) {
    const auto& grid = ctx.cfg.grid("omega_a");
    const Ensemble burned = build_burned_ensemble(ctx.cfg);
    const auto lossy = cavity_sweep_spectrum(burned, grid, false, ctx.threads);
    const auto lossless = cavity_sweep_spectrum(burned, grid, true, ctx.threads);
    ctx.write("fig1c_spectrum.csv", [&](std::ostream& os) { write_eigen_long(os, grid, lossy); });
    ctx.write("fig1c_spectrum_hermitian.csv",
              [&](std::ostream& os) { write_eigen_long(os, grid, lossless); });
    ctx.summary["n_emitters"] = burned.size();
    ctx.summary["gaps"] = Json::array();
    for (const auto& g : hole_intervals(ctx.cfg)) ctx.summary["gaps"].push_back({g.lo, g.hi});
}

void run_fig2a(Context& ctx) {
    const Ensemble base = build_base_ensemble(ctx.cfg);
    const Ensemble burned = build_burned_ensemble(ctx.cfg);
    const auto before = sweep(ctx, base);
    const auto after = sweep(ctx, burned);
    ctx.write("fig2a_unburned.csv", [&](std::ostream& os) { write_spectrum_csv(os, before); });
    ctx.write("fig2a_burned.csv", [&](std::ostream& os) { write_spectrum_csv(os, after); });

    const auto gaps = hole_intervals(ctx.cfg);
    const auto dark = dark_states(eigensolve(build_operator(burned)), gaps);
    Json dark_json = complex_list(dark);
    for (std::size_t k = 0; k < dark.size(); ++k) {
        dark_json[k]["decay_rate"] = 2.0 * std::abs(dark[k].imag());
    }
    ctx.summary["collective_coupling_eV"] = collective_coupling(base);
    ctx.summary["dark_states"] = dark_json;
    ctx.summary["dark_peaks"] = peaks_json(peaks_in_gaps(after.peaks, gaps));
    ctx.write_json("fig2a_peaks.json", {{"unburned", peaks_json(before.peaks)},
                                        {"burned", peaks_json(after.peaks)}});
}

void run_fig2b(Context& ctx) {
    const auto& n = ctx.cfg.numerics;
    const Ensemble base = build_base_ensemble(ctx.cfg);
    const Ensemble burned = build_burned_ensemble(ctx.cfg);
    const auto traj_base = evolve_fock(base, n.t_max, n.dt);
    const auto traj_burned = evolve_fock(burned, n.t_max, n.dt);
    ctx.write("fig2b_unburned.csv", [&](std::ostream& os) { write_trajectory_csv(os, traj_base); });
    ctx.write("fig2b_burned.csv", [&](std::ostream& os) { write_trajectory_csv(os, traj_burned); });
    const double t_start = default_envelope_start(ctx.cfg.cavity);
    const auto dark = dark_states(eigensolve(build_operator(burned)), hole_intervals(ctx.cfg));
    ctx.summary["envelope_t_start_fs"] = t_start;
    ctx.summary["envelope_rate_unburned_eV"] = envelope_rate(traj_base, t_start);
    ctx.summary["envelope_rate_burned_eV"] = envelope_rate(traj_burned, t_start);
    ctx.summary["dark_states"] = complex_list(dark);
}

void run_fig2c(Context& ctx) {
    const auto& lefts = ctx.cfg.grid("hole_left");
    const int n_comb = ctx.cfg.ensemble.comb.n;
    const Ensemble base = build_base_ensemble(ctx.cfg);
    const auto& num = ctx.cfg.numerics;
    ScanResult scan;
    scan.axes = {{"hole_left_index", lefts},
                 {"omega_eV", linspace(num.omega_min, num.omega_max, num.sweep_points)}};
    Json rows = Json::array();
    for (double l : lefts) {
        const int left = round_index(l, "hole_left");
        const auto holes = HoleSpec::symmetric_blocks(left, n_comb + 1 - left, 1, n_comb);
        const Ensemble burned = burn_holes(base, holes);
        const auto s = sweep(ctx, burned);
        scan.values.insert(scan.values.end(), s.values.begin(), s.values.end());
        rows.push_back({{"hole_left", left},
                        {"hole_right", n_comb + 1 - left},
                        {"dark_peaks", peaks_json(peaks_in_gaps(s.peaks, hole_gaps(base, burned)))}});
    }
    scan.update_argmax();
    scan.metadata = {{"observable", "normalized transmission"}, {"rows", rows}};
    ctx.write("fig2c_scan.csv", [&](std::ostream& os) { write_scan_csv(os, scan); });
    ctx.write_json("fig2c_scan.json", scan_to_json(scan));
}

void run_fig2d(Context& ctx) {
    const auto& lefts = ctx.cfg.grid("hole_left");
    const auto& n = ctx.cfg.numerics;
    const int n_comb = ctx.cfg.ensemble.comb.n;
    const Ensemble base = build_base_ensemble(ctx.cfg);
    const double t_start = default_envelope_start(ctx.cfg.cavity);
    Json rows = Json::array();
    for (double l : lefts) {
        const int left = round_index(l, "hole_left");
        const auto holes = HoleSpec::symmetric_blocks(left, n_comb + 1 - left, 1, n_comb);
        const Ensemble burned = burn_holes(base, holes);
        const auto traj = evolve_fock(burned, n.t_max, n.dt);
        ctx.write("fig2d_trajectory_" + tag("L", left) + ".csv",
                  [&](std::ostream& os) { write_trajectory_csv(os, traj); });
        const auto dark = dark_states(eigensolve(build_operator(burned)), hole_gaps(base, burned));
        Json row = {{"hole_left", left}, {"hole_right", n_comb + 1 - left},
                    {"dark_states", complex_list(dark)}};
        if (dark.size() == 2) {
            row["splitting_rad_per_fs"] = std::abs(dark[1].real() - dark[0].real()) / kHbar;
        }
        row["dominant_rad_per_fs"] = dominant_angular_frequency(
            traj.times, traj.photon_population, t_start, n.t_max, 0.05, 1.0);
        rows.push_back(row);
    }
    ctx.summary["rows"] = rows;
}

DriveWaveform required_drive(const Context& ctx) {
    if (!ctx.cfg.drive) throw ConfigError("field 'drive' is required by scenario " + ctx.cfg.scenario);
    return *ctx.cfg.drive;
}

Json quench_summary(const TrajectoryResult& traj, const Cavity& cavity) {
    Json j;
    const std::size_t off = traj.switch_off_index.value_or(traj.size() - 1);
    j["switch_off_fs"] = traj.times[std::min(off, traj.size() - 1)];
    j["max_photon"] = *std::max_element(traj.photon_population.begin(), traj.photon_population.end());
    j["post_off_envelope_rate_eV"] =
        envelope_rate(traj, traj.times[std::min(off, traj.size() - 1)] +
                                default_envelope_start(cavity));
    return j;
}

void run_fig3a(Context& ctx) {
    const auto& n = ctx.cfg.numerics;
    const auto w = required_drive(ctx);
    const auto a = quench_protocol(build_base_ensemble(ctx.cfg), w, n.t_max, n.dt);
    const auto b = quench_protocol(build_burned_ensemble(ctx.cfg), w, n.t_max, n.dt);
    ctx.write("fig3a_unburned.csv", [&](std::ostream& os) { write_trajectory_csv(os, a); });
    ctx.write("fig3a_burned.csv", [&](std::ostream& os) { write_trajectory_csv(os, b); });
    ctx.summary["unburned"] = quench_summary(a, ctx.cfg.cavity);
    ctx.summary["burned"] = quench_summary(b, ctx.cfg.cavity);
}

void run_fig3b(Context& ctx) {
    const auto& n = ctx.cfg.numerics;
    const Ensemble burned = build_burned_ensemble(ctx.cfg);
    auto scan = pulse_grid_scan(burned, ctx.cfg.grid("omega"), ctx.cfg.grid("period"), n.t_max,
                                n.dt, required_drive(ctx), ctx.threads);
    scan.metadata["ensemble_digest"] = digest(to_json(burned));
    scan.metadata["seed"] = ctx.cfg.seed;
    ctx.write("fig3b_scan.csv", [&](std::ostream& os) { write_scan_csv(os, scan); });
    ctx.write_json("fig3b_scan.json", scan_to_json(scan));
    ctx.summary["argmax"] = {{"omega_eV", scan.argmax.coords[0]},
                             {"period_fs", scan.argmax.coords[1]},
                             {"value", scan.argmax.value}};
    ctx.summary["rabi_period_fs"] =
        2.0 * kPi * kHbar / collective_coupling(build_base_ensemble(ctx.cfg));
}

void run_fig3c(Context& ctx) {
    const auto& n = ctx.cfg.numerics;
    const auto pulse = required_drive(ctx);
    const auto constant = DriveWaveform::constant(pulse.amplitude_a, pulse.probe_omega, pulse.t_off);
    const Ensemble base = build_base_ensemble(ctx.cfg);
    const Ensemble burned = build_burned_ensemble(ctx.cfg);
    const auto pb = quench_protocol(burned, pulse, n.t_max, n.dt);
    const auto pu = quench_protocol(base, pulse, n.t_max, n.dt);
    const auto cb = integrate_driven(burned, constant, n.t_max, n.dt);
    ctx.write("fig3c_pulse_burned.csv", [&](std::ostream& os) { write_trajectory_csv(os, pb); });
    ctx.write("fig3c_pulse_unburned.csv", [&](std::ostream& os) { write_trajectory_csv(os, pu); });
    ctx.write("fig3c_constant_burned.csv", [&](std::ostream& os) { write_trajectory_csv(os, cb); });
    ctx.summary["pulse_burned"] = quench_summary(pb, ctx.cfg.cavity);
    ctx.summary["pulse_unburned"] = quench_summary(pu, ctx.cfg.cavity);
    ctx.summary["constant_burned"] = quench_summary(cb, ctx.cfg.cavity);
    ctx.summary["pulse_to_constant_max_ratio"] =
        ctx.summary["pulse_burned"]["max_photon"].get<double>() /
        ctx.summary["constant_burned"]["max_photon"].get<double>();
}

void run_fig3d(Context& ctx) {
    const auto& n = ctx.cfg.numerics;
    const Ensemble burned = build_burned_ensemble(ctx.cfg);
    auto scan = period_time_scan(burned, ctx.cfg.grid("period"), n.t_max, n.dt,
                                 required_drive(ctx), ctx.threads);
    scan.metadata["ensemble_digest"] = digest(to_json(burned));
    ctx.write("fig3d_scan.csv", [&](std::ostream& os) { write_scan_csv(os, scan); });
    ctx.write_json("fig3d_scan.json", scan_to_json(scan));
}

void run_fig4a(Context& ctx) {
    const auto& seeds = ctx.cfg.grid("seed_offset");
    const auto& num = ctx.cfg.numerics;
    ScanResult scan;
    scan.axes = {{"seed", {}}, {"omega_eV", linspace(num.omega_min, num.omega_max, num.sweep_points)}};
    Json rows = Json::array();
    int with_two = 0;
    for (double offset : seeds) {
        ExperimentConfig cfg = ctx.cfg;
        cfg.seed = ctx.cfg.seed + static_cast<std::uint64_t>(round_index(offset, "seed_offset"));
        scan.axes[0].values.push_back(static_cast<double>(cfg.seed));
        const Ensemble base = build_base_ensemble(cfg);
        const Ensemble burned = build_burned_ensemble(cfg);
        const auto s = sweep(ctx, burned);
        scan.values.insert(scan.values.end(), s.values.begin(), s.values.end());
        const auto dark = peaks_in_gaps(s.peaks, hole_gaps(base, burned));
        if (dark.size() == 2) ++with_two;
        rows.push_back({{"seed", cfg.seed}, {"dark_peaks", peaks_json(dark)}});
    }
    scan.update_argmax();
    scan.metadata = {{"observable", "normalized transmission"}};
    ctx.write("fig4a_scan.csv", [&](std::ostream& os) { write_scan_csv(os, scan); });
    ctx.summary["rows"] = rows;
    ctx.summary["fraction_with_two_dark_peaks"] =
        static_cast<double>(with_two) / static_cast<double>(seeds.size());
}

void run_fig4b(Context& ctx) {
    const Ensemble base = build_base_ensemble(ctx.cfg);
    const Ensemble burned = build_burned_ensemble(ctx.cfg);
    const auto before = sweep(ctx, base);
    const auto after = sweep(ctx, burned);
    ctx.write("fig4b_unburned.csv", [&](std::ostream& os) { write_spectrum_csv(os, before); });
    ctx.write("fig4b_burned.csv", [&](std::ostream& os) { write_spectrum_csv(os, after); });
    ctx.summary["collective_coupling_eV"] = collective_coupling(base);
    ctx.summary["n_burned"] = base.size() - burned.size();
    const auto windows = hole_intervals(ctx.cfg);
    if (!windows.empty()) {
        ctx.summary["hole_contrast"] = hole_contrast(after, windows, ctx.cfg.ensemble.center());
    }
}

void run_fig4c(Context& ctx) {
    const auto& sizes = ctx.cfg.grid("n");
    const auto& num = ctx.cfg.numerics;
    const auto windows = hole_intervals(ctx.cfg);
    ScanResult scan;
    scan.axes = {{"n", sizes}, {"omega_eV", linspace(num.omega_min, num.omega_max, num.sweep_points)}};
    Json contrast = Json::array();
    for (double n : sizes) {
        ExperimentConfig cfg = ctx.cfg;
        cfg.ensemble.random.n = round_index(n, "n");
        const auto s = sweep(ctx, build_burned_ensemble(cfg));
        scan.values.insert(scan.values.end(), s.values.begin(), s.values.end());
        contrast.push_back(hole_contrast(s, windows, ctx.cfg.ensemble.center()));
    }
    scan.update_argmax();
    scan.metadata = {{"observable", "normalized transmission"}, {"hole_contrast", contrast}};
    ctx.write("fig4c_scan.csv", [&](std::ostream& os) { write_scan_csv(os, scan); });
    ctx.write_json("fig4c_scan.json", scan_to_json(scan));
    ctx.summary["hole_contrast"] = contrast;
}

void run_fig4d(Context& ctx) {
    auto scan = gamma_scan(ctx.cfg, ctx.cfg.grid("gamma"), ctx.threads);
    ctx.write("fig4d_scan.csv", [&](std::ostream& os) { write_scan_csv(os, scan); });
    ctx.write_json("fig4d_scan.json", scan_to_json(scan));
    ctx.summary["hole_contrast"] = scan.metadata["hole_contrast"];
}

// --- registry ------------------------------------------------------------------

ExperimentConfig comb_defaults(const std::string& name) {
    ExperimentConfig cfg;
    cfg.scenario = name;
    cfg.holes = default_holes();
    cfg.output_dir = "out/" + name;
    return cfg;
}

ExperimentConfig random_defaults(const std::string& name) {
    ExperimentConfig cfg;
    cfg.scenario = name;
    cfg.ensemble.kind = EnsembleSource::Kind::random;
    cfg.holes = HoleSpec::from_windows({{1.9, 0.033}, {2.1, 0.033}});
    cfg.seed = 1;
    cfg.output_dir = "out/" + name;
    return cfg;
}

constexpr double kPulsePeriod = 42.0;  // fs
constexpr double kPulseOff = 4.0 * kPulsePeriod;

DriveWaveform default_pulse() {
    return DriveWaveform::pulse_train(kDefaultDriveAmplitude, 2.0, kPulsePeriod, kPulseOff,
                                      DriveWaveform::PulseConvention::full_cycle);
}

struct Entry {
    ScenarioInfo info;
    void (*run)(Context&);
};

std::vector<Entry> make_registry() {
    std::vector<Entry> out;
    auto add = [&](ExperimentConfig cfg, std::string summary, void (*run)(Context&)) {
        out.push_back({{cfg.scenario, std::move(summary), std::move(cfg)}, run});
    };
    {
        auto cfg = comb_defaults("fig1c");
        cfg.grids["omega_a"] = linspace(1.8, 2.2, 201);
        add(cfg, "single-excitation spectrum versus cavity energy, burned comb", run_fig1c);
    }
    add(comb_defaults("fig2a"), "transmission spectra before and after hole burning", run_fig2a);
    {
        auto cfg = comb_defaults("fig2b");
        cfg.numerics.dt = 0.1;
        // Ends before the discrete comb revives at 2 pi hbar / spacing.
        cfg.numerics.t_max = 300.0;
        add(cfg, "Rabi oscillation from one cavity photon, burned and unburned", run_fig2b);
    }
    {
        auto cfg = comb_defaults("fig2c");
        cfg.grids["hole_left"] = linspace(10, 20, 11);
        add(cfg, "transmission versus symmetric hole position", run_fig2c);
    }
    {
        auto cfg = comb_defaults("fig2d");
        cfg.grids["hole_left"] = {13, 19};
        add(cfg, "tunable Rabi frequency for two hole placements", run_fig2d);
    }
    {
        auto cfg = comb_defaults("fig3a");
        // The cap sits past the time both ensembles need to become steady.
        cfg.drive = DriveWaveform::constant(kDefaultDriveAmplitude, 2.0, 1500.0);
        cfg.numerics.dt = 0.02;
        cfg.numerics.t_max = 2000.0;
        add(cfg, "constant-drive quench, burned and unburned", run_fig3a);
    }
    {
        auto cfg = comb_defaults("fig3b");
        cfg.drive = DriveWaveform::pulse_train(kDefaultDriveAmplitude, 2.0, kPulsePeriod,
                                               std::numeric_limits<double>::infinity(),
                                               DriveWaveform::PulseConvention::full_cycle);
        cfg.grids["omega"] = linspace(1.9, 2.1, 20);
        cfg.grids["period"] = linspace(30.0, 55.0, 20);
        cfg.numerics.dt = 0.02;
        cfg.numerics.t_max = 300.0;
        add(cfg, "pulse grid scan", run_fig3b);
    }
    {
        auto cfg = comb_defaults("fig3c");
        cfg.drive = default_pulse();
        cfg.numerics.dt = 0.02;
        add(cfg, "pulse-train quench against constant drive", run_fig3c);
    }
    {
        auto cfg = comb_defaults("fig3d");
        cfg.drive = default_pulse();
        cfg.grids["period"] = linspace(35.0, 45.0, 11);
        cfg.numerics.dt = 0.1;
        add(cfg, "photon population over time and pulse period", run_fig3d);
    }
    {
        auto cfg = comb_defaults("fig4a");
        cfg.disorder = DisorderSpec{0.5, 0};
        cfg.grids["seed_offset"] = linspace(0, 19, 20);
        add(cfg, "burned spectra of disordered combs", run_fig4a);
    }
    add(random_defaults("fig4b"), "burned spectrum of a sampled dense ensemble", run_fig4b);
    {
        auto cfg = random_defaults("fig4c");
        cfg.grids["n"] = {2000, 4000, 6000};
        add(cfg, "hole contrast versus emitter number", run_fig4c);
    }
    {
        auto cfg = random_defaults("fig4d");
        cfg.grids["gamma"] = {0.01, 0.03, 0.05};
        add(cfg, "hole contrast versus emitter decay rate", run_fig4d);
    }
    return out;
}

const std::vector<Entry>& registry() {
    static const std::vector<Entry> entries = make_registry();
    return entries;
}

const Entry& find_entry(const std::string& name) {
    for (const auto& e : registry()) {
        if (e.info.name == name) return e;
    }
    throw ConfigError("unknown scenario '" + name + "'");
}

}  // namespace

const std::vector<ScenarioInfo>& scenario_list() {
    static const std::vector<ScenarioInfo> infos = [] {
        std::vector<ScenarioInfo> out;
        for (const auto& e : registry()) out.push_back(e.info);
        return out;
    }();
    return infos;
}

const ScenarioInfo& find_scenario(const std::string& name) {
    for (const auto& s : scenario_list()) {
        if (s.name == name) return s;
    }
    throw ConfigError("unknown scenario '" + name + "'");
}

RunReport run_scenario(const ExperimentConfig& cfg, const RunOptions& opts) {
    cfg.validate();
    const Entry& entry = find_entry(cfg.scenario);
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);

    Context ctx{cfg, std::max(1, opts.threads), dir, {}, Json::object()};
    try {
        entry.run(ctx);
    } catch (const SingularEvaluation& err) {
        throw SingularEvaluation("scenario " + cfg.scenario + ": " + err.what());
    } catch (const NumericalError& err) {
        throw NumericalError("scenario " + cfg.scenario + ": " + err.what());
    } catch (const ConfigError& err) {
        throw ConfigError("scenario " + cfg.scenario + ": " + err.what());
    }

    Json files = Json::array();
    for (const auto& f : ctx.files) {
        std::ifstream is(dir / f, std::ios::binary);
        std::stringstream buf;
        buf << is.rdbuf();
        files.push_back({{"name", f}, {"fnv1a64", digest(std::string_view(buf.str()))}});
    }
    const Json manifest = {{"scenario", cfg.scenario},
                           {"figure_panel", entry.info.summary},
                           {"seed", cfg.seed},
                           {"rng", SplitMix64::kName},
                           {"units", {{"energy", "eV"}, {"time", "fs"}}},
                           {"config", config_to_json(cfg)},
                           {"files", files},
                           {"summary", ctx.summary}};
    std::ofstream os(dir / "manifest.json", std::ios::binary);
    os << manifest.dump(2) << '\n';
    if (!os) throw ConfigError("cannot write " + (dir / "manifest.json").string());

    RunReport report;
    report.files = ctx.files;
    report.summary = ctx.summary;
    report.manifest_path = (dir / "manifest.json").string();
    return report;
}

}  // namespace shb
