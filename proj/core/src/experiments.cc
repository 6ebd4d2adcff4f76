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

#include "qconvsim/experiments.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qconvsim {

namespace {

constexpr std::uint64_t kStreamTomography = 0x70;
constexpr std::uint64_t kStreamFringe = 0xf000;
constexpr std::uint64_t kStreamQkd = 0x9d;

constexpr int kRows = 8;
constexpr int kPartyOutcomeVectors = kSlotCount * kOutputsPerParty + 2;

using RowVector8 = Eigen::Matrix<cd, 1, kRows>;

struct OutcomeVector {
    int outcome;
    RowVector8 u;
};

/// Rank-one pieces of one party's measurement on the converter output rows.
std::array<OutcomeVector, kPartyOutcomeVectors> party_outcomes(double phase) {
    const AnalyzerMap a = user_analyzer(phase);
    std::array<OutcomeVector, kPartyOutcomeVectors> out;
    std::size_t k = 0;
    for (int s = 0; s < kSlotCount; ++s) {
        for (int o = 0; o < kOutputsPerParty; ++o) {
            RowVector8 u = RowVector8::Zero();
            u(2 * s) = a(o, 0);
            u(2 * s + 1) = a(o, 1);
            out[k++] = OutcomeVector{1 + kOutputsPerParty * s + o, u};
        }
    }
    for (int p = 0; p < 2; ++p) {
        RowVector8 u = RowVector8::Zero();
        u(2 * kLostSlot + p) = 1.0;
        out[k++] = OutcomeVector{0, u};
    }
    return out;
}

/// Coherence factor between two converter rows of one party.
double coherence_factor(int r, int r2, double v) {
    const int slot = r / 2;
    if (slot == r2 / 2 && slot != kLostSlot && r != r2) {
        return v;
    }
    return 1.0;
}

std::array<std::pair<Routing, double>, 3> routing_branches(const TimingSlip &slip) {
    return {{{Routing::Nominal, std::max(0.0, 1.0 - slip.t0_late - slip.t1_early)},
             {Routing::T0Misrouted, slip.t0_late},
             {Routing::T1Misrouted, slip.t1_early}}};
}

void require(bool ok, const char *msg) {
    if (!ok) {
        throw std::invalid_argument(msg);
    }
}

}  // namespace

void Scenario::validate() const {
    source.validate();
    converter_alice.validate();
    converter_bob.validate();
    channel_alice.validate();
    channel_bob.validate();
    require(detectors.size() == 1 || detectors.size() == 2 || detectors.size() == 2 * kOutputsPerParty,
            "detectors must list 1, 2 or 8 entries");
    for (const Detector &d : detectors) {
        d.validate();
        require(d.window_ps == detectors.front().window_ps, "all detectors must share one coincidence window");
    }
    require(converter_alice.delay_dt_ps == converter_bob.delay_dt_ps, "both converters must share one bin spacing");
    require(interference_visibility_alice >= 0.0 && interference_visibility_alice <= 1.0 &&
                interference_visibility_bob >= 0.0 && interference_visibility_bob <= 1.0,
            "interference visibilities must lie in [0, 1]");
    require(basis_split_loss_db >= 0.0, "basis split loss must be nonnegative");
    require(insertion_loss_alice_db >= basis_split_loss_db && insertion_loss_bob_db >= basis_split_loss_db,
            "insertion losses must include the basis split loss");
    require(pulses > 0, "pulses must be positive");
    require(tomography.shots_per_basis > 0, "tomography shots must be positive");
    require(fringe.grid_points >= 8, "fringe grid needs at least 8 points");
    require(fringe.pulses_per_point > 0, "fringe pulses per point must be positive");
    require(fringe.grid_offset >= 0.0 && fringe.grid_offset < 1.0, "fringe grid offset must lie in [0, 1)");
}

const Detector &Scenario::detector_a(int output) const {
    if (detectors.size() == 2 * kOutputsPerParty) {
        return detectors.at(static_cast<std::size_t>(output));
    }
    return detectors.front();
}

const Detector &Scenario::detector_b(int output) const {
    if (detectors.size() == 2 * kOutputsPerParty) {
        return detectors.at(static_cast<std::size_t>(kOutputsPerParty + output));
    }
    return detectors.back();
}

double Scenario::transmission_a() const {
    return survival(channel_alice.loss_db() + insertion_loss_alice_db - basis_split_loss_db);
}

double Scenario::transmission_b() const {
    return survival(channel_bob.loss_db() + insertion_loss_bob_db - basis_split_loss_db);
}

Scenario ideal_scenario() {
    Scenario s;
    s.name = "ideal";
    s.source.mean_pairs_per_pulse = 1e-3;
    s.converter_alice = ConverterModel::ideal();
    s.converter_bob = ConverterModel::ideal();
    Detector d;
    d.efficiency = 1.0;
    d.dark_rate_hz = 0.0;
    d.jitter_fwhm_ps = 0.0;
    d.window_ps = 50.0;
    s.detectors = {d};
    return s;
}

double visibility_from_interference_er(double er_db) {
    require(er_db >= 0.0, "interference extinction ratio must be nonnegative");
    if (std::isinf(er_db)) {
        return 1.0;
    }
    return std::sqrt(1.0 - std::pow(10.0, -er_db / 10.0));
}

double ideal_fringe(double theta, double phi_a, double phi_b) {
    return 0.5 * (1.0 + std::cos(phi_a + phi_b + 2.0 * theta));
}

const std::vector<CardinalInput> &cardinal_inputs() {
    static const std::vector<CardinalInput> kInputs = {
        {"t0", 0.0, 0.0},
        {"t1", 1.0, 0.0},
        {"+", 0.5, 0.0},
        {"-", 0.5, std::numbers::pi},
        {"+i", 0.5, std::numbers::pi / 2},
        {"-i", 0.5, -std::numbers::pi / 2},
    };
    return kInputs;
}

TimingSlip timing_slip(const ConverterModel &m, const FiberChannel &channel) {
    return TimingSlip{misroute_prob(channel.arrival_sigma_ps, m.eos.drive.t0_margin_ps()),
                      misroute_prob(channel.arrival_sigma_ps, m.eos.drive.t1_margin_ps(m.delay_dt_ps))};
}

DeliveredQubit delivered_qubit(const Scenario &s, const CardinalInput &in) {
    SlotState out = convert(in.time_bin(), s.converter_alice, timing_slip(s.converter_alice, s.channel_alice));
    const Detector &d = s.detector_a(0);
    DensityMatrix w = windowed_qubit(out, d.window_ps, d.jitter_fwhm_ps);
    double eff = w.trace();
    if (!(eff > 0.0)) {
        throw std::runtime_error("converter delivers no light for input " + in.label);
    }
    return DeliveredQubit{w.normalized(), eff};
}

std::vector<ConversionOutcome> run_single_qubit_conversion(const Scenario &s,
                                                           const std::vector<CardinalInput> &inputs) {
    s.validate();
    std::vector<ConversionOutcome> out;
    out.reserve(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        ConversionOutcome r{inputs[i], delivered_qubit(s, inputs[i]), {}, {}};
        Rng rng = make_substream(s.seed, kStreamTomography, i);
        r.counts = run_tomography(r.delivered.rho, s.tomography.shots_per_basis, s.tomography.noisy, rng);
        MleOptions opts;
        opts.seed = s.seed + i;
        r.tomo = mle_reconstruct(r.counts, opts, density_of(inputs[i].path_target()));
        out.push_back(std::move(r));
    }
    return out;
}

double average_fidelity(const std::vector<ConversionOutcome> &outcomes) {
    require(!outcomes.empty(), "no conversion outcomes to average");
    double sum = 0.0;
    for (const auto &o : outcomes) {
        sum += o.tomo.fidelity_vs_target.value();
    }
    return sum / static_cast<double>(outcomes.size());
}

std::vector<ConversionAnalysis> analyze_conversion(const Scenario &s) {
    s.validate();
    std::vector<ConversionAnalysis> out;
    for (const CardinalInput &in : cardinal_inputs()) {
        ConversionAnalysis a{in, delivered_qubit(s, in), 0.0, 0.0, 0.0};
        a.fidelity = fidelity(a.delivered.rho, density_of(in.path_target()));
        SlotState back = reverse_convert(a.delivered.rho, s.converter_alice);
        a.round_trip_efficiency = back.aligned().trace();
        a.round_trip_fidelity = a.round_trip_efficiency > 0.0
                                    ? fidelity(back.aligned().normalized(), density_of(in.time_bin()))
                                    : 0.0;
        out.push_back(std::move(a));
    }
    return out;
}

JointTable joint_outcome_table(const Scenario &s, double phi_a, double phi_b, double theta) {
    // Two-photon state over time bins, index 2 * alice + bob.
    Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
    psi(0) = 1.0 / std::sqrt(2.0);
    psi(3) = std::exp(cd(0.0, 2.0 * theta)) / std::sqrt(2.0);
    const Eigen::Matrix4cd rho_in = psi * psi.adjoint();

    constexpr int kJointRows = kRows * kRows;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(kJointRows, kJointRows);
    for (const auto &[ra, wa] : routing_branches(timing_slip(s.converter_alice, s.channel_alice))) {
        if (wa <= 0.0) {
            continue;
        }
        const ConverterKraus ka = converter_kraus(s.converter_alice, ra);
        for (const auto &[rb, wb] : routing_branches(timing_slip(s.converter_bob, s.channel_bob))) {
            if (wb <= 0.0) {
                continue;
            }
            const ConverterKraus kb = converter_kraus(s.converter_bob, rb);
            Eigen::MatrixXcd m(kJointRows, 4);
            for (int i = 0; i < kRows; ++i) {
                for (int j = 0; j < kRows; ++j) {
                    for (int a = 0; a < 2; ++a) {
                        for (int b = 0; b < 2; ++b) {
                            m(kRows * i + j, 2 * a + b) = ka(i, a) * kb(j, b);
                        }
                    }
                }
            }
            rho += (wa * wb) * (m * rho_in * m.adjoint());
        }
    }

    // Imperfect interferometers wash out each side's path coherence.
    const double va = s.interference_visibility_alice;
    const double vb = s.interference_visibility_bob;
    for (int r = 0; r < kJointRows; ++r) {
        for (int c = 0; c < kJointRows; ++c) {
            rho(r, c) *= coherence_factor(r / kRows, c / kRows, va) * coherence_factor(r % kRows, c % kRows, vb);
        }
    }

    const auto alice = party_outcomes(phi_a);
    const auto bob = party_outcomes(phi_b);
    JointTable table{};
    Eigen::Matrix<cd, 1, kJointRows> v;
    for (const auto &oa : alice) {
        for (const auto &ob : bob) {
            for (int i = 0; i < kRows; ++i) {
                for (int j = 0; j < kRows; ++j) {
                    v(kRows * i + j) = oa.u(i) * ob.u(j);
                }
            }
            double p = (v * rho * v.adjoint())(0, 0).real();
            table[static_cast<std::size_t>(kPhotonOutcomes * oa.outcome + ob.outcome)] += std::max(0.0, p);
        }
    }
    return table;
}

JointTable uncorrelated_table(const JointTable &t) {
    std::array<double, kPhotonOutcomes> pa{};
    std::array<double, kPhotonOutcomes> pb{};
    for (int i = 0; i < kPhotonOutcomes; ++i) {
        for (int j = 0; j < kPhotonOutcomes; ++j) {
            double p = t[static_cast<std::size_t>(kPhotonOutcomes * i + j)];
            pa[static_cast<std::size_t>(i)] += p;
            pb[static_cast<std::size_t>(j)] += p;
        }
    }
    JointTable out{};
    for (int i = 0; i < kPhotonOutcomes; ++i) {
        for (int j = 0; j < kPhotonOutcomes; ++j) {
            out[static_cast<std::size_t>(kPhotonOutcomes * i + j)] =
                pa[static_cast<std::size_t>(i)] * pb[static_cast<std::size_t>(j)];
        }
    }
    return out;
}

LinkModel build_link_model(const Scenario &s, double phi_a, double phi_b, double theta) {
    s.validate();
    LinkModel m;
    m.mean_pairs_per_pulse = s.source.mean_pairs_per_pulse;
    m.coherent = joint_outcome_table(s, phi_a, phi_b, theta);
    m.background = uncorrelated_table(m.coherent);
    m.transmission_a = s.transmission_a();
    m.transmission_b = s.transmission_b();
    for (int o = 0; o < kOutputsPerParty; ++o) {
        m.detectors_a[static_cast<std::size_t>(o)] = s.detector_a(o);
        m.detectors_b[static_cast<std::size_t>(o)] = s.detector_b(o);
    }
    m.slot_spacing_ps = s.converter_alice.delay_dt_ps;
    m.window_ps = s.window_ps();
    return m;
}

std::uint64_t fringe_counts(const Tally &t) {
    return t.coincidences[1][1] + t.coincidences[2][2];
}

FringeDataset run_fringe_scan(const Scenario &s, const FringeConfig &cfg, unsigned threads) {
    s.validate();
    if (cfg.grid_points < 8) {
        throw std::invalid_argument("fringe grid needs at least 8 points");
    }
    FringeDataset d;
    d.scan = cfg.scan;
    d.phi_a = s.phi_a;
    d.phi_b = cfg.phi_b;
    d.theta = s.source.theta;
    d.pulses_per_point = cfg.pulses_per_point;
    // One full fringe period of the scanned variable.
    const double span = 2.0 * std::numbers::pi / scan_frequency(cfg.scan);
    const double step = span / cfg.grid_points;
    for (int k = 0; k < cfg.grid_points; ++k) {
        const double x = (k + cfg.grid_offset) * step;
        const double phi_a = cfg.scan == ScanVariable::AlicePhase ? x : s.phi_a;
        const double theta = cfg.scan == ScanVariable::SourceTheta ? x : s.source.theta;
        Tally t = simulate_link(build_link_model(s, phi_a, cfg.phi_b, theta), cfg.pulses_per_point, s.seed,
                                kStreamFringe + static_cast<std::uint64_t>(k), threads);
        d.points.push_back(FringePoint{x, fringe_counts(t)});
    }
    return d;
}

double BasisStats::qber() const {
    return sifted == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(sifted);
}

QkdReport sift(const Tally &t, const QkdConfig &cfg, double rep_rate_hz) {
    QkdReport r;
    r.tally = t;
    auto tally_basis = [&](int out0, int out1, bool flip, BasisStats &stats) {
        const int outs[2] = {out0, out1};
        for (int bit_a = 0; bit_a < 2; ++bit_a) {
            for (int bit_b = 0; bit_b < 2; ++bit_b) {
                std::uint64_t n = t.coincidences[static_cast<std::size_t>(outs[bit_a])]
                                                [static_cast<std::size_t>(outs[bit_b])];
                stats.sifted += n;
                if ((bit_a != bit_b) != flip) {
                    stats.errors += n;
                }
            }
        }
    };
    tally_basis(0, 3, cfg.flip_z, r.z);
    tally_basis(1, 2, cfg.flip_x, r.x);
    if (cfg.bases != KeyBases::XOnly) {
        r.sifted += r.z.sifted;
        r.errors += r.z.errors;
    }
    if (cfg.bases != KeyBases::ZOnly) {
        r.sifted += r.x.sifted;
        r.errors += r.x.errors;
    }
    if (r.sifted == 0) {
        throw std::runtime_error("no key");
    }
    r.qber = static_cast<double>(r.errors) / static_cast<double>(r.sifted);
    r.elapsed_s = static_cast<double>(t.pulses) / rep_rate_hz;
    r.raw_key_rate = static_cast<double>(r.sifted) / r.elapsed_s;
    return r;
}

QkdReport run_bbm92(const Scenario &s, unsigned threads) {
    s.validate();
    Tally t = simulate_link(build_link_model(s, s.phi_a, s.phi_b, s.source.theta), s.pulses, s.seed, kStreamQkd,
                            threads);
    return sift(t, s.qkd, s.source.rep_rate_hz);
}

double qber_visibility_consistency(const QkdReport &report, const FringeFit &fit) {
    return std::abs(report.x.qber() - 0.5 * (1.0 - fit.visibility));
}

}  // namespace qconvsim
