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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shb/dynamics.hpp"
#include "shb/ensemble.hpp"
#include "shb/linear_response.hpp"
#include "shb/scan.hpp"
#include "shb/serialize.hpp"

namespace shb {

struct NumericsSpec {
    double dt = 0.1;         ///< fs
    double t_max = 500.0;    ///< fs
    int sweep_points = SweepDefaults::n_points;
    double omega_min = SweepDefaults::omega_min;
    double omega_max = SweepDefaults::omega_max;
    double prominence = SweepDefaults::prominence;

    void validate() const;
};

/// Either a deterministic comb or a sampled dense ensemble.
struct EnsembleSource {
    enum class Kind { comb, random };
    Kind kind = Kind::comb;
    CombSpec comb = default_comb();
    RandomEnsembleSpec random;

    double center() const { return kind == Kind::comb ? comb.omega_e : random.omega_e; }
};

/// One experiment. Energies in eV, times in fs. The top-level seed drives
/// every random draw (random ensembles and disorder).
struct ExperimentConfig {
    std::string scenario;
    EnsembleSource ensemble;
    Cavity cavity;
    double gamma = 0.01;
    std::optional<HoleSpec> holes;
    std::optional<DisorderSpec> disorder;
    std::optional<DriveWaveform> drive;
    /// Named scan grids, e.g. "omega", "period", "gamma", "n", "hole_left".
    std::map<std::string, std::vector<double>> grids;
    NumericsSpec numerics;
    std::uint64_t seed = 0;
    std::string output_dir = "out";

    /// Throws ConfigError naming the offending field.
    void validate() const;
    /// Grid by name; throws ConfigError if absent or empty.
    const std::vector<double>& grid(const std::string& name) const;
};

Json config_to_json(const ExperimentConfig& cfg);

/// Reads a config document. Keys absent from the document keep the registered
/// defaults of its scenario. The `units` header must read eV / fs.
ExperimentConfig config_from_json(const Json& j);

struct ScenarioInfo {
    std::string name;
    std::string summary;  ///< one-line description of the panel
    ExperimentConfig defaults;
};

const std::vector<ScenarioInfo>& scenario_list();
/// Throws ConfigError for unknown names.
const ScenarioInfo& find_scenario(const std::string& name);

struct RunOptions {
    int threads = 1;
};

struct RunReport {
    std::vector<std::string> files;  ///< paths relative to output_dir
    Json summary;
    std::string manifest_path;
};

/// Runs the scenario and writes its CSV/JSON outputs plus manifest.json into
/// cfg.output_dir. Identical config and seed give byte-identical files.
RunReport run_scenario(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Base ensemble (comb with optional disorder, or sampled) before burning.
Ensemble build_base_ensemble(const ExperimentConfig& cfg);
/// Base ensemble with cfg.holes removed.
Ensemble build_burned_ensemble(const ExperimentConfig& cfg);

/// Hole contrast of a sampled spectrum: for each window, the largest sample
/// inside the closed window divided by the sample nearest `omega_ref`,
/// averaged over windows.
double hole_contrast(const SpectrumResult& s, const std::vector<Interval>& windows,
                     double omega_ref);

/// Energy intervals covered by cfg.holes: the windows themselves, or the
/// burned gaps for index holes.
std::vector<Interval> hole_intervals(const ExperimentConfig& cfg);

/// Normalized burned spectra for each decay rate: axes (gamma_eV, omega_eV),
/// metadata["hole_contrast"] lists the contrast per gamma.
ScanResult gamma_scan(const ExperimentConfig& base, const std::vector<double>& gammas,
                      int threads = 1);

}  // namespace shb
