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

#ifndef QCONVSIM_STOCHASTICS_H
#define QCONVSIM_STOCHASTICS_H

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace qconvsim {

using Rng = std::mt19937_64;

/// Independent generator for (master seed, stream, index). Used so that every
/// Monte Carlo batch draws from its own stream regardless of which thread runs it.
Rng make_substream(std::uint64_t master_seed, std::uint64_t stream, std::uint64_t index);

/// Thread cap from QCONVSIM_THREADS, else hardware concurrency (at least 1).
unsigned default_thread_count();

struct PairSource {
    double mean_pairs_per_pulse = 6e-4;
    double rep_rate_hz = 100e6;
    /// Source phase; the two-photon state is (|t0 t0> + e^{2i theta}|t1 t1>)/sqrt2.
    double theta = 0.0;

    void validate() const;
};

struct FiberChannel {
    double length_km = 0.0;
    double atten_db_per_km = 0.2;
    /// Lumped polarization-drift penalty of the link.
    double pol_penalty_db = 0.0;
    /// Gaussian arrival-time fluctuation at the switch.
    double arrival_sigma_ps = 0.0;

    double loss_db() const { return length_km * atten_db_per_km + pol_penalty_db; }
    void validate() const;
};

struct Detector {
    double efficiency = 0.9;
    double dark_rate_hz = 100.0;
    double jitter_fwhm_ps = 150.0;
    /// Coincidence half-window: events within +-window_ps pair up.
    double window_ps = 200.0;

    double jitter_sigma_ps() const;
    /// Dark-click probability per coincidence window (full width 2 * window_ps).
    double dark_probability() const;
    void validate() const;
};

/// k ~ Poisson(mu). Throws std::invalid_argument for mu < 0.
int draw_pairs(double mu, Rng &rng);

/// Power transmission 10^(-loss/10). Throws for negative loss.
double survival(double loss_db);

/// Probability that a Gaussian arrival error of width sigma exceeds the edge
/// margin on one side: erfc(offset / (sigma sqrt2)) / 2.
double misroute_prob(double arrival_sigma_ps, double edge_offset_ps);

/// A single detector exposure: photon present with arrival_prob, plus a dark
/// click. Returns the time tag on a click.
std::optional<double> detect(double arrival_prob, const Detector &d, Rng &rng, double true_time_ps = 0.0);

inline constexpr int kOutputsPerParty = 4;
/// No click sentinel for a detector time slot.
inline constexpr double kNoClick = 1e300;

using PartyTimes = std::array<double, kOutputsPerParty>;

/// Clicks of one party in one pulse. Time tags are relative to the pulse's
/// aligned arrival time; kNoClick marks a silent detector.
struct PartyPulse {
    std::uint64_t pulse = 0;
    PartyTimes times{kNoClick, kNoClick, kNoClick, kNoClick};
};

using CountMatrix = std::array<std::array<std::uint64_t, kOutputsPerParty>, kOutputsPerParty>;

struct Tally {
    std::array<std::uint64_t, kOutputsPerParty> singles_a{};
    std::array<std::uint64_t, kOutputsPerParty> singles_b{};
    /// coincidences[a][b]: Alice output a and Bob output b within the window.
    CountMatrix coincidences{};
    /// Same, pairing Alice's pulse n with Bob's pulse n + 1.
    CountMatrix accidentals{};
    std::uint64_t pulses = 0;

    std::uint64_t total_coincidences() const;
    std::uint64_t total_accidentals() const;
    /// Coincidence-to-accidental ratio; +inf when no accidentals were seen.
    double car() const;

    Tally &operator+=(const Tally &other);
    bool operator==(const Tally &other) const = default;
};

/// Count singles and same-pulse coincidences of one pulse.
void accumulate_pulse(Tally &t, const PartyTimes &a, const PartyTimes &b, double window_ps);
/// Count offset-pulse (accidental) coincidences between Alice's earlier pulse and Bob's next one.
void accumulate_offset(Tally &t, const PartyTimes &a_prev, const PartyTimes &b_next, double window_ps);

/// Coincidence counting over two sparse, pulse-ordered click streams that
/// share the pulse clock.
Tally coincide(const std::vector<PartyPulse> &alice, const std::vector<PartyPulse> &bob, double window_ps,
               std::uint64_t total_pulses);

/// Outcome of one photon at the analysis circuit: lost, or (slot, output).
/// Encoded as 0 = lost, 1 + 4 * slot + output with slot in {early, aligned, late}.
inline constexpr int kPhotonOutcomes = 1 + 3 * kOutputsPerParty;
inline constexpr int kJointOutcomes = kPhotonOutcomes * kPhotonOutcomes;

/// Joint outcome distribution for one photon pair, index = 13 * alice + bob.
using JointTable = std::array<double, kJointOutcomes>;

/// Everything the pulse-level engine needs; built by the experiments layer.
struct LinkModel {
    double mean_pairs_per_pulse = 0.0;
    /// Table for the first pair of a pulse.
    JointTable coherent{};
    /// Table for additional pairs in the same pulse (phase-randomized source).
    JointTable background{};
    /// Photon survival after the analysis circuit (channel + insertion loss).
    double transmission_a = 1.0;
    double transmission_b = 1.0;
    std::array<Detector, kOutputsPerParty> detectors_a{};
    std::array<Detector, kOutputsPerParty> detectors_b{};
    double slot_spacing_ps = 100.0;
    double window_ps = 200.0;
};

/// Pulses per Monte Carlo batch; fixed so results do not depend on threads.
inline constexpr std::uint64_t kPulsesPerBatch = std::uint64_t{1} << 27;

/// Monte Carlo over `pulses` pulses. Empty pulses are skipped exactly by
/// drawing geometric gaps between pair and dark-count events, so laboratory-scale
/// pulse counts (1e9..1e11) are cheap. Deterministic in (seed, stream).
Tally simulate_link(const LinkModel &model, std::uint64_t pulses, std::uint64_t seed, std::uint64_t stream,
                    unsigned threads);

}  // namespace qconvsim

#endif  // QCONVSIM_STOCHASTICS_H
