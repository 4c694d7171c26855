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

#include "shb/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace shb {

using detail::field;

namespace {

template <typename F>
void validated(const std::string& path, F&& check) {
    try {
        check();
    } catch (const ConfigError& err) {
        throw ConfigError(path + ": " + err.what());
    }
}

void require_object(const Json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError("field '" + path + "' must be an object");
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

const char* convention_name(DriveWaveform::PulseConvention c) {
    return c == DriveWaveform::PulseConvention::full_cycle ? "full_cycle" : "flip_every_period";
}

const char* kind_name(DriveWaveform::Kind k) {
    switch (k) {
        case DriveWaveform::Kind::constant: return "constant";
        case DriveWaveform::Kind::pulse_train: return "pulse_train";
        case DriveWaveform::Kind::off: break;
    }
    return "off";
}

}  // namespace

Json to_json(const Cavity& c) { return {{"omega_a", c.omega_a}, {"kappa", c.kappa}}; }

Json to_json(const Ensemble& e) {
    Json emitters = Json::array();
    for (const auto& em : e.emitters) {
        emitters.push_back({{"index", em.index}, {"omega", em.omega}, {"g", em.g}});
    }
    return {{"cavity", to_json(e.cavity)}, {"gamma", e.gamma}, {"emitters", emitters}};
}

Json to_json(const CombSpec& s) {
    return {{"kind", "comb"},          {"n", s.n},       {"omega_e", s.omega_e},
            {"delta_omega", s.delta_omega}, {"q", s.q}, {"beta", s.beta},
            {"amplitude", s.amplitude}};
}

Json to_json(const RandomEnsembleSpec& s) {
    return {{"kind", "random"},
            {"n", s.n},
            {"omega_e", s.omega_e},
            {"q", s.q},
            {"beta", s.beta},
            {"g_uniform", s.g_uniform},
            {"truncation_halfwidth", s.truncation_halfwidth},
            {"seed", s.seed}};
}

Json to_json(const HoleSpec& s) {
    if (s.mode == HoleSpec::Mode::by_index) return {{"mode", "by_index"}, {"indices", s.indices}};
    Json windows = Json::array();
    for (const auto& w : s.windows) windows.push_back({{"center", w.center}, {"width", w.width}});
    return {{"mode", "by_window"}, {"windows", windows}};
}

Json to_json(const DisorderSpec& s) { return {{"r", s.r}, {"seed", s.seed}}; }

Json to_json(const DriveWaveform& w) {
    return {{"kind", kind_name(w.kind)},
            {"amplitude_a", w.amplitude_a},
            {"amplitude_e", w.amplitude_e},
            {"probe_omega", w.probe_omega},
            {"period", w.period},
            {"t_off", finite_or_null(w.t_off)},
            {"convention", convention_name(w.convention)}};
}

Json to_json(const Peak& p) {
    return {{"center", p.center}, {"height", p.height}, {"fwhm", p.fwhm},
            {"prominence", p.prominence}};
}

Cavity cavity_from_json(const Json& j, const std::string& path) {
    require_object(j, path);
    Cavity c;
    c.omega_a = field(j, path, "omega_a", c.omega_a);
    c.kappa = field(j, path, "kappa", c.kappa);
    validated(path, [&] { c.validate(); });
    return c;
}

Ensemble ensemble_from_json(const Json& j, const std::string& path) {
    require_object(j, path);
    Ensemble e;
    if (j.contains("cavity")) e.cavity = cavity_from_json(j.at("cavity"), path + ".cavity");
    e.gamma = field(j, path, "gamma", e.gamma);
    const Json list = field(j, path, "emitters", Json::array());
    if (!list.is_array()) throw ConfigError("field '" + path + ".emitters' must be an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string p = path + ".emitters[" + std::to_string(i) + "]";
        Emitter em;
        em.index = field(list[i], p, "index", static_cast<int>(i) + 1);
        em.omega = field(list[i], p, "omega", 0.0);
        em.g = field(list[i], p, "g", 0.0);
        e.emitters.push_back(em);
    }
    validated(path, [&] { e.validate(); });
    return e;
}

CombSpec comb_from_json(const Json& j, const std::string& path) {
    require_object(j, path);
    CombSpec s = default_comb();
    s.n = field(j, path, "n", s.n);
    s.omega_e = field(j, path, "omega_e", s.omega_e);
    s.delta_omega = field(j, path, "delta_omega", s.delta_omega);
    s.q = field(j, path, "q", s.q);
    s.beta = field(j, path, "beta", s.beta);
    if (j.contains("amplitude") && !j.at("amplitude").is_null()) {
        s.amplitude = field(j, path, "amplitude", s.amplitude);
    } else {
        s.amplitude = 0.0;
        validated(path, [&] { s.validate(); });
        s.amplitude = calibrate_amplitude(s, field(j, path, "collective_coupling", 0.102));
    }
    validated(path, [&] { s.validate(); });
    return s;
}

RandomEnsembleSpec random_from_json(const Json& j, const std::string& path) {
    require_object(j, path);
    RandomEnsembleSpec s;
    s.n = field(j, path, "n", s.n);
    s.omega_e = field(j, path, "omega_e", s.omega_e);
    s.q = field(j, path, "q", s.q);
    s.beta = field(j, path, "beta", s.beta);
    s.g_uniform = field(j, path, "g_uniform", s.g_uniform);
    s.truncation_halfwidth = field(j, path, "truncation_halfwidth", s.truncation_halfwidth);
    s.seed = field(j, path, "seed", s.seed);
    validated(path, [&] { s.validate(); });
    return s;
}

HoleSpec holes_from_json(const Json& j, const std::string& path) {
    require_object(j, path);
    const auto mode = field<std::string>(j, path, "mode", j.contains("windows") ? "by_window" : "by_index");
    if (mode == "by_index") {
        return HoleSpec::from_indices(field(j, path, "indices", std::vector<int>{}));
    }
    if (mode != "by_window") {
        throw ConfigError("field '" + path + ".mode' must be by_index or by_window, got " + mode);
    }
    const Json list = field(j, path, "windows", Json::array());
    if (!list.is_array()) throw ConfigError("field '" + path + ".windows' must be an array");
    std::vector<HoleWindow> windows;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string p = path + ".windows[" + std::to_string(i) + "]";
        windows.push_back({field(list[i], p, "center", 0.0), field(list[i], p, "width", 0.0)});
    }
    return HoleSpec::from_windows(std::move(windows));
}

DisorderSpec disorder_from_json(const Json& j, const std::string& path) {
    require_object(j, path);
    DisorderSpec s;
    s.r = field(j, path, "r", s.r);
    s.seed = field(j, path, "seed", s.seed);
    validated(path, [&] { s.validate(); });
    return s;
}

DriveWaveform drive_from_json(const Json& j, const std::string& path) {
    require_object(j, path);
    const auto kind = field<std::string>(j, path, "kind", "constant");
    const double amp = field(j, path, "amplitude_a", kDefaultDriveAmplitude);
    const double probe = field(j, path, "probe_omega", 2.0);
    const double t_off =
        field(j, path, "t_off", std::numeric_limits<double>::infinity());
    const auto conv = field<std::string>(j, path, "convention", "flip_every_period");
    DriveWaveform::PulseConvention convention;
    if (conv == "flip_every_period") {
        convention = DriveWaveform::PulseConvention::flip_every_period;
    } else if (conv == "full_cycle") {
        convention = DriveWaveform::PulseConvention::full_cycle;
    } else {
        throw ConfigError("field '" + path +
                          ".convention' must be flip_every_period or full_cycle, got " + conv);
    }

    DriveWaveform w;
    if (kind == "constant") {
        w = DriveWaveform::constant(amp, probe, t_off);
    } else if (kind == "pulse_train") {
        w = DriveWaveform::pulse_train(amp, probe, field(j, path, "period", 42.0), t_off,
                                       convention);
    } else if (kind == "off") {
        w.kind = DriveWaveform::Kind::off;
        w.probe_omega = probe;
    } else {
        throw ConfigError("field '" + path + ".kind' must be constant, pulse_train or off, got " +
                          kind);
    }
    w.convention = convention;
    w.amplitude_e = field(j, path, "amplitude_e", w.amplitude_e);
    validated(path, [&] { w.validate(); });
    return w;
}

std::string digest(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string digest(const Json& j) { return digest(std::string_view(j.dump())); }

}  // namespace shb
