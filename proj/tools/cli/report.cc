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

#include "report.h"

#include <array>
#include <charconv>
#include <cmath>

namespace qconvsim::cli {

namespace {

const char *bases_name(KeyBases b) {
    return b == KeyBases::ZOnly ? "z" : b == KeyBases::XOnly ? "x" : "both";
}

ReportJson basis_json(const BasisStats &b) {
    return ReportJson{{"sifted_bits", b.sifted}, {"error_bits", b.errors}, {"qber", b.qber()}};
}

ReportJson matrix_json(const CountMatrix &m) {
    ReportJson rows = ReportJson::array();
    for (const auto &row : m) {
        rows.push_back(row);
    }
    return rows;
}

void append_number(std::string &out, double v) {
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    out.append(buf.data(), res.ptr);
}

}  // namespace

ReportJson density_json(const DensityMatrix &rho) {
    ReportJson rows = ReportJson::array();
    for (std::size_t i = 0; i < rho.dim(); ++i) {
        ReportJson row = ReportJson::array();
        for (std::size_t j = 0; j < rho.dim(); ++j) {
            row.push_back({rho(i, j).real(), rho(i, j).imag()});
        }
        rows.push_back(row);
    }
    return rows;
}

ReportJson counts_json(const CountSet &c) {
    return ReportJson{{"n_0", c[Projector::Zero]},      {"n_1", c[Projector::One]},
                      {"n_plus", c[Projector::Plus]},   {"n_minus", c[Projector::Minus]},
                      {"n_plus_i", c[Projector::PlusI]}, {"n_minus_i", c[Projector::MinusI]}};
}

ReportJson tomo_results(const Scenario &s, const std::vector<ConversionOutcome> &outcomes) {
    ReportJson states = ReportJson::array();
    double min_f = 1.0;
    for (const auto &o : outcomes) {
        double f = o.tomo.fidelity_vs_target.value_or(std::nan(""));
        min_f = std::min(min_f, f);
        states.push_back({{"state", o.input.label},
                          {"fidelity", f},
                          {"likelihood", o.tomo.likelihood},
                          {"delivered_efficiency", o.delivered.efficiency},
                          {"optimizer_evaluations", o.tomo.iterations},
                          {"restarts", o.tomo.restarts},
                          {"counts", counts_json(o.counts)},
                          {"rho_rec", density_json(o.tomo.rho_rec)}});
    }
    return ReportJson{{"shots_per_basis", s.tomography.shots_per_basis},
                      {"noisy", s.tomography.noisy},
                      {"average_fidelity", average_fidelity(outcomes)},
                      {"min_fidelity", min_f},
                      {"states", states}};
}

ReportJson convert_results(const Scenario &s, const std::vector<ConversionAnalysis> &analysis) {
    TimingSlip slip = timing_slip(s.converter_alice, s.channel_alice);
    ReportJson states = ReportJson::array();
    double sum = 0.0;
    for (const auto &a : analysis) {
        sum += a.fidelity;
        states.push_back({{"state", a.input.label},
                          {"fidelity", a.fidelity},
                          {"delivered_efficiency", a.delivered.efficiency},
                          {"round_trip_fidelity", a.round_trip_fidelity},
                          {"round_trip_efficiency", a.round_trip_efficiency},
                          {"rho_delivered", density_json(a.delivered.rho)}});
    }
    return ReportJson{{"crosstalk_through", s.converter_alice.eos.crosstalk_through()},
                      {"crosstalk_cross", s.converter_alice.eos.crosstalk_cross()},
                      {"misroute_t0", slip.t0_late},
                      {"misroute_t1", slip.t1_early},
                      {"window_acceptance_leak",
                       window_acceptance(s.converter_alice.delay_dt_ps, s.window_ps(), s.detector_a(0).jitter_fwhm_ps)},
                      {"average_fidelity", analysis.empty() ? 0.0 : sum / static_cast<double>(analysis.size())},
                      {"states", states}};
}

ReportJson fringe_results(const FringeDataset &d, const std::optional<FringeFit> &fit, const std::string &fit_error) {
    ReportJson points = ReportJson::array();
    for (const auto &p : d.points) {
        points.push_back({{"scan_value_rad", p.scan_value}, {"coincidences", p.coincidences}});
    }
    ReportJson fit_json = nullptr;
    if (fit) {
        fit_json = {{"amplitude", fit->amplitude},
                    {"visibility", fit->visibility},
                    {"visibility_stderr", fit->visibility_stderr},
                    {"phase_offset_rad", fit->phase_offset},
                    {"residual", fit->residual},
                    {"iterations", fit->iterations},
                    {"bell_pass", bell_check(*fit)}};
    }
    ReportJson out{{"scan", scan_name(d.scan)},
                   {"frequency", scan_frequency(d.scan)},
                   {"phi_a_rad", d.phi_a},
                   {"phi_b_rad", d.phi_b},
                   {"theta_rad", d.theta},
                   {"pulses_per_point", d.pulses_per_point},
                   {"points", points},
                   {"fit", fit_json}};
    if (!fit_error.empty()) {
        out["fit_error"] = fit_error;
    }
    return out;
}

ReportJson qkd_results(const Scenario &s, const QkdReport &r) {
    return ReportJson{{"pulses", r.tally.pulses},
                      {"elapsed_s", r.elapsed_s},
                      {"bases", bases_name(s.qkd.bases)},
                      {"sifted_bits", r.sifted},
                      {"error_bits", r.errors},
                      {"qber", r.qber},
                      {"raw_key_rate", r.raw_key_rate},
                      {"z", basis_json(r.z)},
                      {"x", basis_json(r.x)},
                      {"coincidences", r.tally.total_coincidences()},
                      {"accidentals", r.tally.total_accidentals()},
                      {"car", r.tally.car()},
                      {"singles_alice", r.tally.singles_a},
                      {"singles_bob", r.tally.singles_b},
                      {"coincidence_matrix", matrix_json(r.tally.coincidences)}};
}

ReportJson standalone_results(const CountSet &c, const TomoResult &t, const FlaggedDensity &linear,
                              const std::optional<Projector> &target) {
    ReportJson out{{"counts", counts_json(c)},
                   {"linear_physical", linear.physical},
                   {"rho_linear", density_json(linear.rho)},
                   {"rho_rec", density_json(t.rho_rec)},
                   {"likelihood", t.likelihood},
                   {"optimizer_evaluations", t.iterations},
                   {"restarts", t.restarts}};
    if (target) {
        out["target_state"] = std::string(projector_label(*target));
        out["fidelity"] = t.fidelity_vs_target.value_or(std::nan(""));
    }
    return out;
}

ReportJson make_report(const std::string &experiment, const std::string &scenario_hash, std::uint64_t seed,
                       ReportJson results, double wall_clock_s) {
    return ReportJson{{"tool_version", kToolVersion},
                      {"scenario_hash", scenario_hash},
                      {"seed", seed},
                      {"experiment", experiment},
                      {"results", std::move(results)},
                      {"wall_clock_s", wall_clock_s}};
}

std::string fringe_csv(const FringeDataset &d) {
    std::string out = "scan_value_rad,coincidences,stderr\n";
    for (const auto &p : d.points) {
        append_number(out, p.scan_value);
        out += ',';
        out += std::to_string(p.coincidences);
        out += ',';
        append_number(out, p.std_error());
        out += '\n';
    }
    return out;
}

}  // namespace qconvsim::cli
