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

#ifndef QCONVSIM_TOOLS_REPORT_H
#define QCONVSIM_TOOLS_REPORT_H

#include <optional>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"
#include "qconvsim/experiments.h"

namespace qconvsim::cli {

inline constexpr const char *kToolVersion = "0.1.0";

using ReportJson = nlohmann::ordered_json;

ReportJson density_json(const DensityMatrix &rho);
ReportJson counts_json(const CountSet &c);

ReportJson tomo_results(const Scenario &s, const std::vector<ConversionOutcome> &outcomes);
ReportJson convert_results(const Scenario &s, const std::vector<ConversionAnalysis> &analysis);
ReportJson fringe_results(const FringeDataset &d, const std::optional<FringeFit> &fit, const std::string &fit_error);
ReportJson qkd_results(const Scenario &s, const QkdReport &r);
ReportJson standalone_results(const CountSet &c, const TomoResult &t, const FlaggedDensity &linear,
                              const std::optional<Projector> &target);

/// Envelope around a results object. Only `wall_clock_s` varies between reruns.
ReportJson make_report(const std::string &experiment, const std::string &scenario_hash, std::uint64_t seed,
                       ReportJson results, double wall_clock_s);

/// scan_value_rad,coincidences,stderr with shortest round-trip number formatting.
std::string fringe_csv(const FringeDataset &d);

}  // namespace qconvsim::cli

#endif  // QCONVSIM_TOOLS_REPORT_H
