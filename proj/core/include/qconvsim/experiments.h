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

#ifndef QCONVSIM_EXPERIMENTS_H
#define QCONVSIM_EXPERIMENTS_H

#include <cstdint>
#include <string>
#include <vector>

#include "qconvsim/devices.h"
#include "qconvsim/fringe_fit.h"
#include "qconvsim/statekit.h"
#include "qconvsim/stochastics.h"
#include "qconvsim/tomography.h"

namespace qconvsim {

enum class KeyBases { Both, ZOnly, XOnly };

struct TomographyConfig {
    std::uint64_t shots_per_basis = 100000;
    bool noisy = true;
};

struct FringeConfig {
    ScanVariable scan = ScanVariable::AlicePhase;
    int grid_points = 16;
    std::uint64_t pulses_per_point = 5000000000;
    /// Bob's analysis phase during the scan.
    double phi_b = 0.0;
    /// Grid shift as a fraction of one step, in [0, 1).
    double grid_offset = 0.0;
};

struct QkdConfig {
    bool flip_z = false;
    bool flip_x = false;
    KeyBases bases = KeyBases::Both;
};

struct Scenario {
    std::string name = "unnamed";
    PairSource source;
    ConverterModel converter_alice;
    ConverterModel converter_bob;
    FiberChannel channel_alice;
    FiberChannel channel_bob;
    /// One entry (shared), two (Alice, Bob) or eight (Alice outputs 0..3, then Bob's).
    std::vector<Detector> detectors{Detector{}};
    double phi_a = 0.0;
    double phi_b = 0.0;
    /// Per-side interferometer visibility; scales that side's path coherence.
    double interference_visibility_alice = 1.0;
    double interference_visibility_bob = 1.0;
    /// Insertion loss quoted per output port, including the intrinsic basis split.
    double insertion_loss_alice_db = 0.0;
    double insertion_loss_bob_db = 0.0;
    double basis_split_loss_db = 0.0;
    std::uint64_t pulses = 1000000;
    std::uint64_t seed = 1;
    TomographyConfig tomography;
    FringeConfig fringe;
    QkdConfig qkd;

    void validate() const;
    const Detector &detector_a(int output) const;
    const Detector &detector_b(int output) const;
    double window_ps() const { return detectors.front().window_ps; }
    /// Photon survival from the source to a detector, excluding detector efficiency
    /// and the analyzer's own basis split.
    double transmission_a() const;
    double transmission_b() const;
};

/// Lossless, noiseless devices; used as the exactness reference.
Scenario ideal_scenario();

/// Visibility factor of an unbalanced interferometer with interference
/// extinction ratio er_db: sqrt(1 - 10^(-er/10)).
double visibility_from_interference_er(double er_db);

/// 0.5 * (1 + cos(phi_a + phi_b + 2 theta)).
double ideal_fringe(double theta, double phi_a, double phi_b);

/// Time-bin input prepared by the TO-MZI (cross fraction) and TOPS (phase).
struct CardinalInput {
    std::string label;
    double split = 0.0;
    double phase = 0.0;

    StateVector time_bin() const { return prepare_time_bin(split, phase); }
    /// Path qubit an ideal converter produces.
    StateVector path_target() const { return time_bin(); }
};

/// |t0>, |t1>, |+>, |->, |+i>, |-i>.
const std::vector<CardinalInput> &cardinal_inputs();

/// Switch misrouting probabilities from the channel's arrival-time spread.
TimingSlip timing_slip(const ConverterModel &m, const FiberChannel &channel);

/// Qubit delivered to the tomography chip, renormalized, plus the kept fraction.
struct DeliveredQubit {
    DensityMatrix rho = DensityMatrix::maximally_mixed(2);
    double efficiency = 0.0;
};
DeliveredQubit delivered_qubit(const Scenario &s, const CardinalInput &in);

struct ConversionOutcome {
    CardinalInput input;
    DeliveredQubit delivered;
    CountSet counts;
    TomoResult tomo;
};

/// prepare -> convert -> window -> tomography counts -> MLE, per input.
std::vector<ConversionOutcome> run_single_qubit_conversion(const Scenario &s,
                                                           const std::vector<CardinalInput> &inputs);
double average_fidelity(const std::vector<ConversionOutcome> &outcomes);

/// Noiseless analysis of the converter: delivered state, its fidelity to the
/// target, and the reverse-conversion round trip.
struct ConversionAnalysis {
    CardinalInput input;
    DeliveredQubit delivered;
    double fidelity = 0.0;
    double round_trip_fidelity = 0.0;
    double round_trip_efficiency = 0.0;
};
std::vector<ConversionAnalysis> analyze_conversion(const Scenario &s);

/// Joint outcome distribution of one pair, index 13 * alice + bob.
JointTable joint_outcome_table(const Scenario &s, double phi_a, double phi_b, double theta);
/// Same marginals, no correlation between the two photons.
JointTable uncorrelated_table(const JointTable &t);
LinkModel build_link_model(const Scenario &s, double phi_a, double phi_b, double theta);

/// Coincidences counted at a fringe point: X outputs 1-1 plus 2-2.
std::uint64_t fringe_counts(const Tally &t);

FringeDataset run_fringe_scan(const Scenario &s, const FringeConfig &cfg, unsigned threads);

struct BasisStats {
    std::uint64_t sifted = 0;
    std::uint64_t errors = 0;

    double qber() const;
};

struct QkdReport {
    BasisStats z;
    BasisStats x;
    std::uint64_t sifted = 0;
    std::uint64_t errors = 0;
    double qber = 0.0;
    double raw_key_rate = 0.0;
    double elapsed_s = 0.0;
    Tally tally;
};

/// Sift matched-basis coincidences. Bits: Z output 0 -> 0, 3 -> 1; X output
/// 1 -> 0, 2 -> 1; Bob's bit inverted by the flip flags. Throws
/// std::runtime_error("no key") when nothing survives sifting.
QkdReport sift(const Tally &t, const QkdConfig &cfg, double rep_rate_hz);

QkdReport run_bbm92(const Scenario &s, unsigned threads);

/// |QBER_X - (1 - V) / 2|.
double qber_visibility_consistency(const QkdReport &report, const FringeFit &fit);

}  // namespace qconvsim

#endif  // QCONVSIM_EXPERIMENTS_H
