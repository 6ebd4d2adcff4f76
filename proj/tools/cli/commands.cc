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

#include "commands.h"

#include <chrono>
#include <fstream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qconvsim/experiments.h"
#include "report.h"
#include "scenario_file.h"

namespace qconvsim::cli {

namespace {

struct RunFlags {
    std::string experiment;
    std::string path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::uint64_t pulses = 0;
    bool pulses_given = false;
    std::string out_path;
    std::string csv_path;
    bool quiet = false;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void write_text(const std::string &path, const std::string &text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    f << text;
    if (!f) {
        throw std::runtime_error("failed writing '" + path + "'");
    }
}

void emit_report(const ReportJson &report, const RunFlags &flags, std::ostream &out) {
    std::string text = report.dump(2) + "\n";
    if (flags.out_path.empty()) {
        out << text;
    } else {
        write_text(flags.out_path, text);
    }
}

int cmd_validate(const std::string &path, std::ostream &out) {
    ScenarioFile f = load_scenario(path);
    out << "ok " << f.scenario.name << " " << scenario_hash(f) << "\n";
    return kExitOk;
}

int cmd_run(RunFlags flags, std::ostream &out, std::ostream &err) {
    const auto start = std::chrono::steady_clock::now();
    ScenarioFile f = load_scenario(flags.path);
    Scenario &s = f.scenario;
    if (flags.seed_given) {
        s.seed = flags.seed;
    }
    if (flags.pulses_given) {
        if (flags.pulses == 0) {
            throw SchemaViolation(std::vector<SchemaError>{{"--pulses", "must be >= 1"}});
        }
        if (flags.experiment == "qkd") {
            s.pulses = flags.pulses;
        } else if (flags.experiment == "fringe") {
            s.fringe.pulses_per_point = flags.pulses;
        } else if (flags.experiment == "tomo") {
            s.tomography.shots_per_basis = flags.pulses;
        }
    }
    const unsigned threads = default_thread_count();

    ReportJson results;
    std::string summary;
    if (flags.experiment == "tomo") {
        auto outcomes = run_single_qubit_conversion(s, cardinal_inputs());
        results = tomo_results(s, outcomes);
        summary = "average fidelity " + std::to_string(average_fidelity(outcomes));
    } else if (flags.experiment == "convert") {
        results = convert_results(s, analyze_conversion(s));
        summary = "average fidelity " + results["average_fidelity"].dump();
    } else if (flags.experiment == "fringe") {
        FringeDataset d = run_fringe_scan(s, s.fringe, threads);
        std::optional<FringeFit> fit;
        std::string fit_error;
        try {
            fit = fit_visibility(d);
        } catch (const std::exception &e) {
            fit_error = e.what();
        }
        results = fringe_results(d, fit, fit_error);
        if (!flags.csv_path.empty()) {
            write_text(flags.csv_path, fringe_csv(d));
        }
        summary = fit ? "visibility " + std::to_string(fit->visibility) + " +- " +
                            std::to_string(fit->visibility_stderr) + (bell_check(*fit) ? " (Bell pass)" : " (Bell fail)")
                      : "fit failed: " + fit_error;
    } else {
        QkdReport r = run_bbm92(s, threads);
        results = qkd_results(s, r);
        summary = "qber " + std::to_string(r.qber) + ", raw key rate " + std::to_string(r.raw_key_rate) + " bps";
    }
    if (flags.experiment != "fringe" && !flags.csv_path.empty()) {
        throw std::runtime_error("--fringe-csv only applies to 'run fringe'");
    }
    emit_report(make_report(flags.experiment, scenario_hash(f), s.seed, std::move(results), seconds_since(start)),
                flags, out);
    if (!flags.quiet) {
        err << flags.experiment << ": " << summary << "\n";
    }
    return kExitOk;
}

int cmd_standalone(const RunFlags &flags, std::ostream &out, std::ostream &err) {
    const auto start = std::chrono::steady_clock::now();
    CountsFile c = load_counts(flags.path);
    MleOptions opts;
    opts.seed = flags.seed_given ? flags.seed : 1;
    std::optional<DensityMatrix> target;
    if (c.target) {
        target = density_of(projector_state(*c.target));
    }
    TomoResult t = mle_reconstruct(c.counts, opts, target);
    FlaggedDensity linear = linear_reconstruct(c.counts);
    emit_report(make_report("tomo-standalone", "", opts.seed, standalone_results(c.counts, t, linear, c.target),
                            seconds_since(start)),
                flags, out);
    if (!flags.quiet) {
        err << "tomo-standalone: likelihood " << t.likelihood;
        if (t.fidelity_vs_target) {
            err << ", fidelity " << *t.fidelity_vs_target;
        }
        err << "\n";
    }
    return kExitOk;
}

void add_common_flags(CLI::App *cmd, RunFlags &flags) {
    cmd->add_option("--seed", flags.seed, "Override the scenario seed")->each([&](const std::string &) {
        flags.seed_given = true;
    });
    cmd->add_option("--out", flags.out_path, "Write the JSON report here instead of stdout");
    cmd->add_flag("--quiet", flags.quiet, "Suppress the summary line on stderr");
}

}  // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"qconvsim: time-bin/path qubit converter simulator"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    std::string validate_path;
    auto *validate = app.add_subcommand("validate", "Check a scenario file against the schema");
    validate->add_option("scenario", validate_path, "Scenario JSON")->required();

    RunFlags run_flags;
    auto *run = app.add_subcommand("run", "Run one experiment on a scenario");
    run->add_option("experiment", run_flags.experiment, "tomo | fringe | qkd | convert")
        ->required()
        ->check(CLI::IsMember({"tomo", "fringe", "qkd", "convert"}));
    run->add_option("scenario", run_flags.path, "Scenario JSON")->required();
    add_common_flags(run, run_flags);
    run->add_option("--fringe-csv", run_flags.csv_path, "Write fringe points as CSV");
    run->add_option("--pulses", run_flags.pulses, "Override pulses (qkd), pulses per point (fringe) or shots per basis (tomo)")
        ->each([&](const std::string &) { run_flags.pulses_given = true; });

    RunFlags tomo_flags;
    auto *standalone = app.add_subcommand("tomo-standalone", "Reconstruct a qubit from measured counts");
    standalone->add_option("counts", tomo_flags.path, "Counts JSON")->required();
    add_common_flags(standalone, tomo_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kExitOk;
        }
        err << "usage error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    try {
        if (*validate) {
            return cmd_validate(validate_path, out);
        }
        if (*run) {
            return cmd_run(run_flags, out, err);
        }
        return cmd_standalone(tomo_flags, out, err);
    } catch (const SchemaViolation &e) {
        err << e.what() << "\n";
        return kExitSchema;
    } catch (const MleConvergenceError &e) {
        err << "error: " << e.what() << " (best likelihood " << e.best_so_far().likelihood << ")\n";
        return kExitRuntime;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace qconvsim::cli
