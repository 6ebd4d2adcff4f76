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

#include "scenario_file.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <set>

namespace qconvsim::cli {

namespace {

using nlohmann::json;

std::string join_path(const std::string &prefix, const std::string &key) {
    return prefix.empty() ? key : prefix + "." + key;
}

/// Walks one JSON object, recording every problem instead of stopping at the first.
class ObjectReader {
   public:
    ObjectReader(const json &obj, std::string path, std::vector<SchemaError> &errors)
        : obj_(obj), path_(std::move(path)), errors_(errors) {
        if (!obj_.is_object()) {
            fail(path_, "must be an object");
            valid_ = false;
        }
    }

    bool valid() const { return valid_; }
    const std::string &path() const { return path_; }

    /// Returns the member if present; records an error if required and missing.
    const json *member(const std::string &key, bool required) {
        seen_.insert(key);
        if (!valid_) {
            return nullptr;
        }
        auto it = obj_.find(key);
        if (it == obj_.end()) {
            if (required) {
                fail(join_path(path_, key), "is required");
            }
            return nullptr;
        }
        return &*it;
    }

    /// Reads a number. `check` returns an error message or "" when the value is acceptable.
    double number(const std::string &key, std::optional<double> fallback,
                  const std::function<std::string(double)> &check = {}) {
        const json *v = member(key, !fallback.has_value());
        if (v == nullptr) {
            return fallback.value_or(0.0);
        }
        if (!v->is_number()) {
            fail(join_path(path_, key), "must be a number");
            return fallback.value_or(0.0);
        }
        double x = v->get<double>();
        if (check) {
            std::string msg = check(x);
            if (!msg.empty()) {
                fail(join_path(path_, key), msg);
            }
        }
        return x;
    }

    std::uint64_t count(const std::string &key, std::optional<std::uint64_t> fallback, std::uint64_t min_value) {
        const json *v = member(key, !fallback.has_value());
        if (v == nullptr) {
            return fallback.value_or(0);
        }
        std::uint64_t out = 0;
        if (v->is_number_unsigned()) {
            out = v->get<std::uint64_t>();
        } else if (v->is_number_float() && std::floor(v->get<double>()) == v->get<double>() &&
                   v->get<double>() >= 0.0 && v->get<double>() < 1.8446744073709552e19) {
            out = static_cast<std::uint64_t>(v->get<double>());
        } else {
            fail(join_path(path_, key), "must be a nonnegative integer");
            return fallback.value_or(0);
        }
        if (out < min_value) {
            fail(join_path(path_, key), "must be >= " + std::to_string(min_value));
        }
        return out;
    }

    bool boolean(const std::string &key, bool fallback) {
        const json *v = member(key, false);
        if (v == nullptr) {
            return fallback;
        }
        if (!v->is_boolean()) {
            fail(join_path(path_, key), "must be true or false");
            return fallback;
        }
        return v->get<bool>();
    }

    std::string string(const std::string &key, std::optional<std::string> fallback,
                       const std::vector<std::string> &allowed = {}) {
        const json *v = member(key, !fallback.has_value());
        if (v == nullptr) {
            return fallback.value_or("");
        }
        if (!v->is_string()) {
            fail(join_path(path_, key), "must be a string");
            return fallback.value_or("");
        }
        std::string s = v->get<std::string>();
        if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
            std::string opts;
            for (const auto &a : allowed) {
                opts += (opts.empty() ? "" : ", ") + a;
            }
            fail(join_path(path_, key), "must be one of: " + opts);
        }
        return s;
    }

    void fail(const std::string &path, const std::string &message) { errors_.push_back({path, message}); }
    std::vector<SchemaError> &errors() { return errors_; }

    /// Reader for a nested object member, or nullopt when absent.
    std::optional<ObjectReader> child(const std::string &key, bool required) {
        const json *v = member(key, required);
        if (v == nullptr) {
            return std::nullopt;
        }
        return std::optional<ObjectReader>(std::in_place, *v, join_path(path_, key), errors_);
    }

    /// Flags members that no reader asked for.
    void reject_unknown() {
        if (!valid_) {
            return;
        }
        for (const auto &[key, _] : obj_.items()) {
            if (!seen_.contains(key)) {
                fail(join_path(path_, key), "unknown field");
            }
        }
    }

   private:
    const json &obj_;
    std::string path_;
    std::vector<SchemaError> &errors_;
    std::set<std::string> seen_;
    bool valid_ = true;
};

std::function<std::string(double)> at_least(double lo) {
    return [lo](double x) {
        return x >= lo ? std::string() : "must be >= " + nlohmann::json(lo).dump();
    };
}

std::function<std::string(double)> positive() {
    return [](double x) { return x > 0.0 ? std::string() : std::string("must be > 0"); };
}

std::function<std::string(double)> unit_interval() {
    return [](double x) { return x >= 0.0 && x <= 1.0 ? std::string() : std::string("must lie in [0, 1]"); };
}

std::function<std::string(double)> finite() {
    return [](double x) { return std::isfinite(x) ? std::string() : std::string("must be finite"); };
}

void read_drive(ObjectReader &parent, DriveWaveform &d) {
    auto r = parent.child("drive", false);
    if (!r || !r->valid()) {
        return;
    }
    d.v0 = r->number("v0_v", d.v0, finite());
    d.v_pi = r->number("v_pi_v", d.v_pi, positive());
    d.edge_position_ps = r->number("edge_position_ps", d.edge_position_ps, finite());
    d.edge_width_ps = r->number("edge_width_ps", d.edge_width_ps, at_least(0.0));
    r->reject_unknown();
}

void read_converter(ObjectReader &parent, const std::string &key, ConverterModel &m) {
    auto r = parent.child(key, true);
    if (!r || !r->valid()) {
        return;
    }
    m.eos.er_through_db = r->number("er_through_db", std::nullopt, at_least(0.0));
    m.eos.er_cross_db = r->number("er_cross_db", std::nullopt, at_least(0.0));
    m.delay_dt_ps = r->number("delay_dt_ps", std::nullopt, positive());
    m.compensation_phase = r->number("compensation_phase_rad", 0.0, finite());
    m.path_phase = r->number("path_phase_rad", 0.0, finite());
    m.excess_loss_long_db = r->number("excess_loss_long_db", 0.0, at_least(0.0));
    m.excess_loss_short_db = r->number("excess_loss_short_db", 0.0, at_least(0.0));
    read_drive(*r, m.eos.drive);
    r->reject_unknown();
    if (m.delay_dt_ps > 0.0) {
        try {
            m.eos.drive.validate(m.delay_dt_ps);
        } catch (const std::invalid_argument &e) {
            r->fail(join_path(r->path(), "drive"), e.what());
        }
    }
}

void read_channel(ObjectReader &parent, const std::string &key, FiberChannel &c) {
    auto r = parent.child(key, false);
    if (!r || !r->valid()) {
        return;
    }
    c.length_km = r->number("length_km", 0.0, at_least(0.0));
    c.atten_db_per_km = r->number("atten_db_per_km", 0.2, at_least(0.0));
    c.pol_penalty_db = r->number("pol_penalty_db", 0.0, at_least(0.0));
    c.arrival_sigma_ps = r->number("arrival_sigma_ps", 0.0, at_least(0.0));
    r->reject_unknown();
}

void read_detectors(ObjectReader &parent, std::vector<Detector> &out) {
    const json *v = parent.member("detectors", true);
    if (v == nullptr) {
        return;
    }
    const std::string path = join_path(parent.path(), "detectors");
    if (!v->is_array() || !(v->size() == 1 || v->size() == 2 || v->size() == 8)) {
        parent.fail(path, "must be an array of 1, 2 or 8 detectors");
        return;
    }
    out.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
        ObjectReader r((*v)[i], path + "[" + std::to_string(i) + "]", parent.errors());
        Detector d;
        if (r.valid()) {
            d.efficiency = r.number("efficiency", std::nullopt, unit_interval());
            d.dark_rate_hz = r.number("dark_rate_hz", std::nullopt, at_least(0.0));
            d.jitter_fwhm_ps = r.number("jitter_fwhm_ps", std::nullopt, at_least(0.0));
            d.window_ps = r.number("window_ps", std::nullopt, positive());
            r.reject_unknown();
        }
        out.push_back(d);
    }
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (out[i].window_ps != out[0].window_ps) {
            parent.fail(path + "[" + std::to_string(i) + "].window_ps", "must equal detectors[0].window_ps");
        }
    }
}

}  // namespace

std::string SchemaError::str() const {
    return (path.empty() ? std::string("<document>") : path) + ": " + message;
}

namespace {

std::string summarize(const std::vector<SchemaError> &errors) {
    std::string s = "scenario schema violation";
    for (const auto &e : errors) {
        s += "\n  " + e.str();
    }
    return s;
}

}  // namespace

SchemaViolation::SchemaViolation(std::vector<SchemaError> errors)
    : std::runtime_error(summarize(errors)), errors_(std::move(errors)) {}

ScenarioFile parse_scenario(const json &doc) {
    std::vector<SchemaError> errors;
    ScenarioFile f;
    Scenario &s = f.scenario;
    ObjectReader root(doc, "", errors);
    if (!root.valid()) {
        throw SchemaViolation(std::move(errors));
    }
    s.name = root.string("name", std::string("unnamed"));
    s.seed = root.count("seed", 1, 0);
    s.pulses = root.count("pulses", std::nullopt, 1);

    if (auto r = root.child("source", true); r && r->valid()) {
        s.source.mean_pairs_per_pulse = r->number("mean_pairs_per_pulse", std::nullopt, at_least(0.0));
        s.source.rep_rate_hz = r->number("rep_rate_hz", std::nullopt, positive());
        s.source.theta = r->number("theta_rad", 0.0, finite());
        r->reject_unknown();
    }
    read_converter(root, "converter_alice", s.converter_alice);
    read_converter(root, "converter_bob", s.converter_bob);
    if (s.converter_alice.delay_dt_ps != s.converter_bob.delay_dt_ps) {
        root.fail("converter_bob.delay_dt_ps", "must equal converter_alice.delay_dt_ps");
    }
    read_channel(root, "channel_alice", s.channel_alice);
    read_channel(root, "channel_bob", s.channel_bob);
    read_detectors(root, s.detectors);

    if (auto r = root.child("analysis", false); r && r->valid()) {
        s.phi_a = r->number("phi_a_rad", 0.0, finite());
        s.phi_b = r->number("phi_b_rad", 0.0, finite());
        r->reject_unknown();
    }
    f.interference_er_alice_db = root.number("interference_er_alice_db", std::nullopt, at_least(0.0));
    f.interference_er_bob_db = root.number("interference_er_bob_db", std::nullopt, at_least(0.0));
    s.insertion_loss_alice_db = root.number("insertion_loss_alice_db", std::nullopt, at_least(0.0));
    s.insertion_loss_bob_db = root.number("insertion_loss_bob_db", std::nullopt, at_least(0.0));
    s.basis_split_loss_db = root.number("basis_split_loss_db", 0.0, at_least(0.0));
    if (s.insertion_loss_alice_db < s.basis_split_loss_db) {
        root.fail("insertion_loss_alice_db", "must be >= basis_split_loss_db");
    }
    if (s.insertion_loss_bob_db < s.basis_split_loss_db) {
        root.fail("insertion_loss_bob_db", "must be >= basis_split_loss_db");
    }

    if (auto r = root.child("tomography", false); r && r->valid()) {
        s.tomography.shots_per_basis = r->count("shots_per_basis", s.tomography.shots_per_basis, 1);
        s.tomography.noisy = r->boolean("noisy", s.tomography.noisy);
        r->reject_unknown();
    }
    if (auto r = root.child("fringe", false); r && r->valid()) {
        std::string scan = r->string("scan", scan_name(s.fringe.scan), {"alice_phase", "source_theta"});
        s.fringe.scan = scan == "source_theta" ? ScanVariable::SourceTheta : ScanVariable::AlicePhase;
        s.fringe.grid_points = static_cast<int>(r->count("grid_points", 16, 8));
        if (s.fringe.grid_points > 100000) {
            r->fail(join_path(r->path(), "grid_points"), "must be <= 100000");
        }
        s.fringe.pulses_per_point = r->count("pulses_per_point", s.fringe.pulses_per_point, 1);
        s.fringe.phi_b = r->number("phi_b_rad", 0.0, finite());
        s.fringe.grid_offset = r->number("grid_offset", 0.0, [](double x) {
            return x >= 0.0 && x < 1.0 ? std::string() : std::string("must lie in [0, 1)");
        });
        r->reject_unknown();
    }
    if (auto r = root.child("qkd", false); r && r->valid()) {
        s.qkd.flip_z = r->boolean("flip_z", false);
        s.qkd.flip_x = r->boolean("flip_x", false);
        std::string b = r->string("bases", std::string("both"), {"both", "z", "x"});
        s.qkd.bases = b == "z" ? KeyBases::ZOnly : b == "x" ? KeyBases::XOnly : KeyBases::Both;
        r->reject_unknown();
    }
    root.reject_unknown();

    if (errors.empty()) {
        s.interference_visibility_alice = visibility_from_interference_er(f.interference_er_alice_db);
        s.interference_visibility_bob = visibility_from_interference_er(f.interference_er_bob_db);
        try {
            s.validate();
        } catch (const std::invalid_argument &e) {
            errors.push_back({"", e.what()});
        }
    }
    if (!errors.empty()) {
        throw SchemaViolation(std::move(errors));
    }
    return f;
}

json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw SchemaViolation(std::vector<SchemaError>{{"", "cannot open '" + path + "'"}});
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error &e) {
        throw SchemaViolation(std::vector<SchemaError>{{"", std::string("invalid JSON: ") + e.what()}});
    }
}

ScenarioFile load_scenario(const std::string &path) {
    return parse_scenario(read_json_file(path));
}

namespace {

json converter_json(const ConverterModel &m) {
    return json{
        {"er_through_db", m.eos.er_through_db},
        {"er_cross_db", m.eos.er_cross_db},
        {"delay_dt_ps", m.delay_dt_ps},
        {"compensation_phase_rad", m.compensation_phase},
        {"path_phase_rad", m.path_phase},
        {"excess_loss_long_db", m.excess_loss_long_db},
        {"excess_loss_short_db", m.excess_loss_short_db},
        {"drive",
         {{"v0_v", m.eos.drive.v0},
          {"v_pi_v", m.eos.drive.v_pi},
          {"edge_position_ps", m.eos.drive.edge_position_ps},
          {"edge_width_ps", m.eos.drive.edge_width_ps}}},
    };
}

json channel_json(const FiberChannel &c) {
    return json{{"length_km", c.length_km},
                {"atten_db_per_km", c.atten_db_per_km},
                {"pol_penalty_db", c.pol_penalty_db},
                {"arrival_sigma_ps", c.arrival_sigma_ps}};
}

}  // namespace

json scenario_to_json(const ScenarioFile &f) {
    const Scenario &s = f.scenario;
    json detectors = json::array();
    for (const Detector &d : s.detectors) {
        detectors.push_back({{"efficiency", d.efficiency},
                             {"dark_rate_hz", d.dark_rate_hz},
                             {"jitter_fwhm_ps", d.jitter_fwhm_ps},
                             {"window_ps", d.window_ps}});
    }
    const char *bases = s.qkd.bases == KeyBases::ZOnly ? "z" : s.qkd.bases == KeyBases::XOnly ? "x" : "both";
    return json{
        {"name", s.name},
        {"seed", s.seed},
        {"pulses", s.pulses},
        {"source",
         {{"mean_pairs_per_pulse", s.source.mean_pairs_per_pulse},
          {"rep_rate_hz", s.source.rep_rate_hz},
          {"theta_rad", s.source.theta}}},
        {"converter_alice", converter_json(s.converter_alice)},
        {"converter_bob", converter_json(s.converter_bob)},
        {"channel_alice", channel_json(s.channel_alice)},
        {"channel_bob", channel_json(s.channel_bob)},
        {"detectors", detectors},
        {"analysis", {{"phi_a_rad", s.phi_a}, {"phi_b_rad", s.phi_b}}},
        {"interference_er_alice_db", f.interference_er_alice_db},
        {"interference_er_bob_db", f.interference_er_bob_db},
        {"insertion_loss_alice_db", s.insertion_loss_alice_db},
        {"insertion_loss_bob_db", s.insertion_loss_bob_db},
        {"basis_split_loss_db", s.basis_split_loss_db},
        {"tomography", {{"shots_per_basis", s.tomography.shots_per_basis}, {"noisy", s.tomography.noisy}}},
        {"fringe",
         {{"scan", scan_name(s.fringe.scan)},
          {"grid_points", s.fringe.grid_points},
          {"pulses_per_point", s.fringe.pulses_per_point},
          {"phi_b_rad", s.fringe.phi_b},
          {"grid_offset", s.fringe.grid_offset}}},
        {"qkd", {{"flip_z", s.qkd.flip_z}, {"flip_x", s.qkd.flip_x}, {"bases", bases}}},
    };
}

std::string scenario_hash(const ScenarioFile &f) {
    const std::string canonical = scenario_to_json(f).dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

CountsFile parse_counts(const json &doc) {
    std::vector<SchemaError> errors;
    ObjectReader root(doc, "", errors);
    if (!root.valid()) {
        throw SchemaViolation(std::move(errors));
    }
    static const std::array<const char *, kProjectorCount> kKeys = {"n_0",     "n_1",      "n_plus",
                                                                    "n_minus", "n_plus_i", "n_minus_i"};
    CountsFile out;
    for (std::size_t i = 0; i < kKeys.size(); ++i) {
        out.counts.n[i] = root.count(kKeys[i], std::nullopt, 0);
    }
    if (auto r = root.child("totals", false); r && r->valid()) {
        const std::array<std::pair<const char *, Basis>, 3> bases = {
            {{"z", Basis::Z}, {"x", Basis::X}, {"y", Basis::Y}}};
        for (const auto &[key, basis] : bases) {
            if (r->member(key, false) == nullptr) {
                continue;
            }
            std::uint64_t declared = r->count(key, 0, 0);
            if (declared != out.counts.total(basis)) {
                r->fail(join_path(r->path(), key), "does not match the sum of that basis' counts");
            }
        }
        r->reject_unknown();
    }
    std::string target = root.string("target_state", std::string(), {"", "0", "1", "+", "-", "+i", "-i"});
    root.reject_unknown();
    for (Basis b : {Basis::Z, Basis::X, Basis::Y}) {
        if (out.counts.total(b) == 0) {
            errors.push_back({"", "incomplete tomography: a basis has no counts"});
            break;
        }
    }
    if (!errors.empty()) {
        throw SchemaViolation(std::move(errors));
    }
    for (int p = 0; p < kProjectorCount; ++p) {
        if (!target.empty() && projector_label(static_cast<Projector>(p)) == target) {
            out.target = static_cast<Projector>(p);
        }
    }
    return out;
}

CountsFile load_counts(const std::string &path) {
    return parse_counts(read_json_file(path));
}

}  // namespace qconvsim::cli
