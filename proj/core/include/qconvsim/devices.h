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

#ifndef QCONVSIM_DEVICES_H
#define QCONVSIM_DEVICES_H

#include <array>

#include "qconvsim/statekit.h"

namespace qconvsim {

/// 2x2 amplitude transfer of a two-port component: transmissivity * unitary.
class Transfer2 {
   public:
    explicit Transfer2(const Eigen::Matrix2cd &unitary, double amplitude_transmissivity = 1.0);

    /// Full transfer matrix (transmissivity already folded in).
    Eigen::Matrix2cd matrix() const { return t_ * u_; }
    const Eigen::Matrix2cd &unitary_part() const { return u_; }
    double amplitude_transmissivity() const { return t_; }
    bool lossless() const { return t_ == 1.0; }

    /// Cascade: (*this) applied after `first`.
    Transfer2 operator*(const Transfer2 &first) const;

   private:
    Eigen::Matrix2cd u_;
    double t_;
};

/// Thermo-optic MZI configured by its cross-port power fraction. The internal
/// arm phase is derived: cross = cos^2(phase / 2).
struct MziSetting {
    double cross_fraction = 0.0;

    double internal_phase() const;
};

/// Thermo-optic phase shifter. Heater power maps linearly to phase.
struct TopsSetting {
    double phase = 0.0;

    static TopsSetting from_heater_power(double heater_power_mw, double rad_per_mw);
};

/// Square-wave drive of the electro-optic switch. Only the edge geometry
/// determines routing; voltages are carried for reporting and validation.
struct DriveWaveform {
    double v0 = 0.0;
    double v_pi = 3.5;
    /// Edge centre relative to the t0 bin centre.
    double edge_position_ps = 50.0;
    double edge_width_ps = 20.0;

    /// Throws std::invalid_argument unless v_pi > 0, the edge is steeper than
    /// the bin spacing and it sits between the two bins.
    void validate(double delay_dt_ps) const;

    /// Clean-routing margin of each bin from the edge (>= 0).
    double t0_margin_ps() const;
    double t1_margin_ps(double delay_dt_ps) const;
};

struct EosModel {
    double er_through_db = 17.0;
    double er_cross_db = 17.0;
    DriveWaveform drive;

    double crosstalk_through() const;
    double crosstalk_cross() const;
};

/// Time-bin <-> path converter: one EOS followed by matched delay lines whose
/// lengths differ by delay_dt. Long arm = path |0>, short arm = path |1>.
struct ConverterModel {
    EosModel eos;
    double delay_dt_ps = 100.0;
    /// Phase set on the compensation TOPS.
    double compensation_phase = 0.0;
    /// Intrinsic short-minus-long propagation phase that compensation cancels.
    double path_phase = 0.0;
    double excess_loss_long_db = 0.0;
    double excess_loss_short_db = 0.0;

    /// Phase carried by the |1> component of the aligned output.
    double residual_phase() const { return path_phase - compensation_phase; }

    void validate() const;

    /// Lossless, crosstalk-free, exactly compensated model.
    static ConverterModel ideal(double delay_dt_ps = 100.0);
};

/// Probability that a photon's arrival time error pushes a bin across the
/// switching edge: t0 arriving late enough to see the cross state, or t1
/// arriving early enough to see the through state.
struct TimingSlip {
    double t0_late = 0.0;
    double t1_early = 0.0;
};

/// Output slot of a photon leaving the converter, relative to the aligned time.
enum class Slot : int { Early = 0, Aligned = 1, Late = 2 };
inline constexpr int kSlotCount = 3;
/// Offset of a slot in units of delay_dt.
inline constexpr int slot_offset(Slot s) { return static_cast<int>(s) - 1; }

/// Subnormalized state over path (x) slot. Leaked photons never carry
/// coherence with other slots, so the state is stored as one 2x2 path block
/// per slot. Trace deficit = photon loss.
class SlotState {
   public:
    SlotState(std::array<DensityMatrix, kSlotCount> blocks, double slot_spacing_ps);

    const DensityMatrix &block(Slot s) const { return blocks_[static_cast<std::size_t>(s)]; }
    const DensityMatrix &aligned() const { return block(Slot::Aligned); }
    double slot_spacing_ps() const { return spacing_; }
    double trace() const;
    /// Full 6x6 matrix, index = 2 * slot + path.
    DensityMatrix matrix() const;

   private:
    std::array<DensityMatrix, kSlotCount> blocks_;
    double spacing_;
};

/// Routing branch of a converter for one photon.
enum class Routing { Nominal, T0Misrouted, T1Misrouted };

/// Amplitude map of the converter for a fixed routing branch: input is the
/// time-bin qubit, output rows are index = 2 * slot + path over four slots
/// {early, aligned, late, lost}. The map is an isometry; the `lost` rows carry
/// the excess-loss amplitude of each arm.
using ConverterKraus = Eigen::Matrix<cd, 8, 2>;
ConverterKraus converter_kraus(const ConverterModel &m, Routing routing);
inline constexpr int kLostSlot = 3;

/// Beam splitter with cross power fraction r: [[sqrt(1-r), i sqrt(r)], [i sqrt(r), sqrt(1-r)]].
Transfer2 bs_transfer(double r);

/// Two 50:50 couplers around an internal phase chosen to give the requested
/// cross power.
Transfer2 mzi_transfer(const MziSetting &s);

/// Phase shifter on arm 0: diag(e^{i phase}, 1).
Transfer2 tops_transfer(const TopsSetting &s);

/// sqrt(1-r)|t0> + e^{i phi} sqrt(r)|t1>; the TO-MZI cross port feeds t1.
StateVector prepare_time_bin(double r, double phi);

/// Crosstalk power fraction 1 / (1 + 10^(ER/10)) for an extinction ratio in dB.
/// +infinity maps to 0.
double eos_crosstalk(double er_db);

/// Time-bin -> path conversion.
SlotState convert(const StateVector &time_bin, const ConverterModel &m, const TimingSlip &slip = {});

/// Path -> time-bin conversion (converter run backwards). Output blocks are
/// over {|t0>, |t1>}; light the EOS fails to route leaves through its idle
/// port, so it only shows up as trace deficit.
SlotState reverse_convert(const StateVector &path_state, const ConverterModel &m);
SlotState reverse_convert(const DensityMatrix &path_rho, const ConverterModel &m);

/// Probability that a photon displaced by offset_ps lands within +-window_ps
/// under Gaussian timing jitter of the given FWHM.
double window_acceptance(double offset_ps, double window_ps, double jitter_fwhm_ps);

/// Path qubit seen by a detector that cannot resolve slots: the aligned block
/// plus the accepted share of leaked populations (which carry no path
/// coherence). Subnormalized.
DensityMatrix windowed_qubit(const SlotState &s, double window_ps, double jitter_fwhm_ps);

/// User analysis circuit: BS1/BS2 split each path between the Z outputs
/// (0 from path |0>, 3 from path |1>) and BS3, where the two halves interfere
/// behind the MODL phase `phase`. Output 1 projects on (|0> + e^{-i phase}|1>)/sqrt2
/// (scaled by 1/2), output 2 on the orthogonal state. Rows are outputs 0..3.
using AnalyzerMap = Eigen::Matrix<cd, 4, 2>;
AnalyzerMap user_analyzer(double phase);

/// FWHM -> sigma for a Gaussian.
inline constexpr double kFwhmPerSigma = 2.3548200450309493;

}  // namespace qconvsim

#endif  // QCONVSIM_DEVICES_H
