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

#ifndef QCONVSIM_TOOLS_SCENARIO_FILE_H
#define QCONVSIM_TOOLS_SCENARIO_FILE_H

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"
#include "qconvsim/experiments.h"
#include "qconvsim/tomography.h"

namespace qconvsim::cli {

struct SchemaError {
    /// Dotted path of the offending field, e.g. "source.mean_pairs_per_pulse".
    std::string path;
    std::string message;

    std::string str() const;
};

/// Thrown when a document fails validation; carries every violation found.
class SchemaViolation : public std::runtime_error {
   public:
    explicit SchemaViolation(std::vector<SchemaError> errors);
    const std::vector<SchemaError> &errors() const { return errors_; }

   private:
    std::vector<SchemaError> errors_;
};

/// Scenario plus the raw interference extinction ratios it was built from.
struct ScenarioFile {
    Scenario scenario;
    double interference_er_alice_db = 0.0;
    double interference_er_bob_db = 0.0;
};

/// Validate and convert a parsed scenario document. Unknown fields are errors.
ScenarioFile parse_scenario(const nlohmann::json &doc);
ScenarioFile load_scenario(const std::string &path);

/// Effective scenario as JSON with every field spelled out (defaults included).
nlohmann::json scenario_to_json(const ScenarioFile &f);

/// FNV-1a over the canonical (sorted-key, compact) dump of scenario_to_json.
std::string scenario_hash(const ScenarioFile &f);

struct CountsFile {
    CountSet counts;
    std::optional<Projector> target;
};

CountsFile parse_counts(const nlohmann::json &doc);
CountsFile load_counts(const std::string &path);

/// Reads and parses a JSON file; parse failures become a SchemaViolation.
nlohmann::json read_json_file(const std::string &path);

}  // namespace qconvsim::cli

#endif  // QCONVSIM_TOOLS_SCENARIO_FILE_H
