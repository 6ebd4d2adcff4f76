// Copyright 2026 The qconvsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QCONVSIM_FRINGE_FIT_H
#define QCONVSIM_FRINGE_FIT_H

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qconvsim {

enum class ScanVariable { AlicePhase, SourceTheta };

/// Angular frequency of the fringe in the scan variable: the source phase
/// enters the two-photon state twice.
inline constexpr double scan_frequency(ScanVariable v) { return v == ScanVariable::SourceTheta ? 2.0 : 1.0; }
std::string scan_name(ScanVariable v);
ScanVariable parse_scan_variable(const std::string &name);

struct FringePoint {
    double scan_value = 0.0;
    std::uint64_t coincidences = 0;

    double std_error() const;
};

struct FringeDataset {
    ScanVariable scan = ScanVariable::AlicePhase;
    std::vector<FringePoint> points;
    /// Values held fixed during the scan.
    double phi_a = 0.0;
    double phi_b = 0.0;
    double theta = 0.0;
    std::uint64_t pulses_per_point = 0;

    /// Throws unless scan values are strictly increasing.
    void validate() const;
};

/// C(x) = A (1 + V cos(w x + phi0)).
struct FringeFit {
    double amplitude = 0.0;
    double visibility = 0.0;
    double phase_offset = 0.0;
    /// Weighted sum of squared residuals (chi-square with Poisson variances).
    double residual = 0.0;
    double visibility_stderr = 0.0;
    int iterations = 0;

    double model(double x, double w) const;
};

class FringeFitError : public std::runtime_error {
   public:
    FringeFitError(const std::string &what, double residual) : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

   private:
    double residual_;
};

/// Poisson-weighted least squares on the linear form a + b cos(wx) + c sin(wx),
/// reweighted with the model variance until the parameters settle. The visibility
/// error comes from the fit covariance by the delta method.
FringeFit fit_visibility(const FringeDataset &d);

inline constexpr double kBellThreshold = 0.70710678118654752440;

/// Strictly above 1/sqrt(2).
bool bell_check(const FringeFit &fit);

}  // namespace qconvsim

#endif  // QCONVSIM_FRINGE_FIT_H
