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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "shb/runner.hpp"

namespace {

shb::Json error_json(const std::string& kind, const std::string& message) {
    return {{"error", kind}, {"message", message}};
}

shb::ExperimentConfig load_config(const std::string& source) {
    if (!std::filesystem::exists(source)) {
        // A bare scenario name runs its registered defaults.
        return shb::find_scenario(source).defaults;
    }
    std::ifstream is(source);
    if (!is) throw shb::ConfigError("cannot open config " + source);
    shb::Json j;
    try {
        j = shb::Json::parse(is);
    } catch (const shb::Json::parse_error& err) {
        throw shb::ConfigError("config " + source + " is not valid JSON: " + err.what());
    }
    // A manifest embeds the resolved config it was produced from.
    if (j.is_object() && j.contains("config") && j.contains("files")) j = j.at("config");
    return shb::config_from_json(j);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cavity and emitter-ensemble spectral hole burning simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    int threads = 1;

    auto* run = app.add_subcommand("run", "Run a scenario from a JSON config, manifest or scenario name");
    run->add_option("config", config_path, "config file, manifest.json, or scenario name")->required();
    run->add_option("--seed", seed, "override the config seed");
    run->add_option("--out", out_dir, "override the output directory");
    run->add_option("--threads", threads, "worker threads for sweeps and scans")
        ->check(CLI::Range(1, 1024));

    auto* list = app.add_subcommand("list", "List registered scenarios");

    std::string scenario;
    auto* describe = app.add_subcommand("describe", "Print a scenario's default config");
    describe->add_option("scenario", scenario, "scenario name")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*list) {
            for (const auto& s : shb::scenario_list()) std::cout << s.name << ": " << s.summary << '\n';
        } else if (*describe) {
            const auto& s = shb::find_scenario(scenario);
            // Plain JSON so the output can be edited and fed back to `run`.
            std::cout << shb::config_to_json(s.defaults).dump(2) << '\n';
        } else if (*run) {
            auto cfg = load_config(config_path);
            if (seed) cfg.seed = *seed;
            if (out_dir) cfg.output_dir = *out_dir;
            const auto report = shb::run_scenario(cfg, {threads});
            std::cout << report.manifest_path << '\n';
        }
    } catch (const shb::ConfigError& err) {
        std::cerr << error_json("config", err.what()).dump() << '\n';
        return 2;
    } catch (const shb::NumericalError& err) {
        std::cerr << error_json("numerical", err.what()).dump() << '\n';
        return 3;
    } catch (const std::exception& err) {
        std::cerr << error_json("internal", err.what()).dump() << '\n';
        return 1;
    }
    return EXIT_SUCCESS;
}
