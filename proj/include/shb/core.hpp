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

#include <complex>
#include <stdexcept>
#include <string>

namespace shb {

using Complex = std::complex<double>;

/// Fixed physical constants. Energies are in eV and times in fs throughout.
struct PhysicalConstants {
    /// Reduced Planck constant in eV*fs.
    static constexpr double hbar = 0.6582119569;
};

inline constexpr double kHbar = PhysicalConstants::hbar;
inline constexpr double kPi = 3.14159265358979323846;

/// A configuration or construction invariant was violated.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A solver failed to produce a trustworthy result.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Evaluation hit a pole of a lossless Lorentzian kernel.
class SingularEvaluation : public NumericalError {
public:
    explicit SingularEvaluation(const std::string& what) : NumericalError(what) {}
};

}  // namespace shb
