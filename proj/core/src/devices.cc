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

#include "qconvsim/devices.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qconvsim {

namespace {

const cd kI(0.0, 1.0);

double amplitude_of_loss(double loss_db) {
    return std::pow(10.0, -loss_db / 20.0);
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

}  // namespace

Transfer2::Transfer2(const Eigen::Matrix2cd &unitary, double amplitude_transmissivity)
    : u_(unitary), t_(amplitude_transmissivity) {
    if (!(t_ >= 0.0 && t_ <= 1.0)) {
        throw std::invalid_argument("transmissivity must lie in [0, 1]");
    }
    if (!is_unitary(Eigen::MatrixXcd(u_))) {
        throw std::invalid_argument("Transfer2 requires a unitary core");
    }
}

Transfer2 Transfer2::operator*(const Transfer2 &first) const {
    return Transfer2(u_ * first.u_, t_ * first.t_);
}

double MziSetting::internal_phase() const {
    return 2.0 * std::acos(std::sqrt(std::clamp(cross_fraction, 0.0, 1.0)));
}

TopsSetting TopsSetting::from_heater_power(double heater_power_mw, double rad_per_mw) {
    return TopsSetting{rad_per_mw * heater_power_mw};
}

void DriveWaveform::validate(double delay_dt_ps) const {
    if (!(v_pi > 0.0)) {
        throw std::invalid_argument("drive.v_pi must be positive");
    }
    if (!(edge_width_ps >= 0.0 && edge_width_ps < delay_dt_ps)) {
        throw std::invalid_argument("drive edge must be steeper than the bin separation");
    }
    if (t0_margin_ps() < 0.0 || t1_margin_ps(delay_dt_ps) < 0.0) {
        throw std::invalid_argument("drive edge must lie between the two time bins");
    }
}

double DriveWaveform::t0_margin_ps() const {
    return edge_position_ps - 0.5 * edge_width_ps;
}

double DriveWaveform::t1_margin_ps(double delay_dt_ps) const {
    return delay_dt_ps - edge_position_ps - 0.5 * edge_width_ps;
}

double EosModel::crosstalk_through() const {
    return eos_crosstalk(er_through_db);
}

double EosModel::crosstalk_cross() const {
    return eos_crosstalk(er_cross_db);
}

void ConverterModel::validate() const {
    if (!(delay_dt_ps > 0.0)) {
        throw std::invalid_argument("delay_dt must be positive");
    }
    if (!(eos.er_through_db >= 0.0) || !(eos.er_cross_db >= 0.0)) {
        throw std::invalid_argument("extinction ratios must be nonnegative");
    }
    if (!(excess_loss_long_db >= 0.0) || !(excess_loss_short_db >= 0.0)) {
        throw std::invalid_argument("excess losses must be nonnegative");
    }
    eos.drive.validate(delay_dt_ps);
}

ConverterModel ConverterModel::ideal(double delay_dt_ps) {
    ConverterModel m;
    m.eos.er_through_db = std::numeric_limits<double>::infinity();
    m.eos.er_cross_db = std::numeric_limits<double>::infinity();
    m.eos.drive.edge_position_ps = 0.5 * delay_dt_ps;
    m.eos.drive.edge_width_ps = 0.2 * delay_dt_ps;
    m.delay_dt_ps = delay_dt_ps;
    return m;
}

SlotState::SlotState(std::array<DensityMatrix, kSlotCount> blocks, double slot_spacing_ps)
    : blocks_(std::move(blocks)), spacing_(slot_spacing_ps) {
    for (const auto &b : blocks_) {
        if (b.dim() != 2) {
            throw std::invalid_argument("slot blocks must be 2x2");
        }
    }
}

double SlotState::trace() const {
    double t = 0.0;
    for (const auto &b : blocks_) {
        t += b.trace();
    }
    return t;
}

DensityMatrix SlotState::matrix() const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2 * kSlotCount, 2 * kSlotCount);
    for (int s = 0; s < kSlotCount; ++s) {
        m.block(2 * s, 2 * s, 2, 2) = blocks_[static_cast<std::size_t>(s)].matrix();
    }
    return DensityMatrix(std::move(m));
}

ConverterKraus converter_kraus(const ConverterModel &m, Routing routing) {
    const double ct = m.eos.crosstalk_through();
    const double cx = m.eos.crosstalk_cross();
    const double eta_long = amplitude_of_loss(m.excess_loss_long_db);
    const double eta_short = amplitude_of_loss(m.excess_loss_short_db);
    const cd short_phase = std::exp(kI * m.residual_phase());

    // Row helpers: index = 2 * slot + path; slot 3 = lost, where the second
    // index labels the input bin instead of a path.
    constexpr int kEarly = 0, kAligned = 1, kLate = 2;
    auto row = [](int slot, int path) { return 2 * slot + path; };

    // Fraction of t0 light entering the long arm, and of t1 light entering the short arm.
    double t0_long = 1.0 - ct;
    double t1_short = 1.0 - cx;
    if (routing == Routing::T0Misrouted) {
        t0_long = cx;
    } else if (routing == Routing::T1Misrouted) {
        t1_short = ct;
    }
    const double t0_short = 1.0 - t0_long;
    const double t1_long = 1.0 - t1_short;

    ConverterKraus k = ConverterKraus::Zero();
    // t0 via the long arm is delayed into alignment; via the short arm it exits one slot early.
    k(row(kAligned, 0), 0) = std::sqrt(t0_long) * eta_long;
    k(row(kEarly, 1), 0) = std::sqrt(t0_short) * eta_short * short_phase;
    // t1 via the short arm is aligned; via the long arm it exits one slot late.
    k(row(kAligned, 1), 1) = std::sqrt(t1_short) * eta_short * short_phase;
    k(row(kLate, 0), 1) = std::sqrt(t1_long) * eta_long;

    const double lost_t0 = t0_long * (1.0 - eta_long * eta_long) + t0_short * (1.0 - eta_short * eta_short);
    const double lost_t1 = t1_long * (1.0 - eta_long * eta_long) + t1_short * (1.0 - eta_short * eta_short);
    k(row(kLostSlot, 0), 0) = std::sqrt(std::max(0.0, lost_t0));
    k(row(kLostSlot, 1), 1) = std::sqrt(std::max(0.0, lost_t1));
    return k;
}

Transfer2 bs_transfer(double r) {
    if (!(r >= 0.0 && r <= 1.0)) {
        throw std::invalid_argument("beam splitter cross fraction must lie in [0, 1]");
    }
    const double t = std::sqrt(1.0 - r);
    const double x = std::sqrt(r);
    Eigen::Matrix2cd u;
    u << t, kI * x, kI * x, t;
    return Transfer2(u);
}

Transfer2 mzi_transfer(const MziSetting &s) {
    if (!(s.cross_fraction >= 0.0 && s.cross_fraction <= 1.0)) {
        throw std::invalid_argument("MZI cross fraction must lie in [0, 1]");
    }
    Transfer2 coupler = bs_transfer(0.5);
    return coupler * tops_transfer(TopsSetting{s.internal_phase()}) * coupler;
}

Transfer2 tops_transfer(const TopsSetting &s) {
    Eigen::Matrix2cd u = Eigen::Matrix2cd::Zero();
    u(0, 0) = std::exp(kI * s.phase);
    u(1, 1) = 1.0;
    return Transfer2(u);
}

StateVector prepare_time_bin(double r, double phi) {
    if (!(r >= 0.0 && r <= 1.0)) {
        throw std::invalid_argument("beam splitting ratio must lie in [0, 1]");
    }
    return StateVector{cd(std::sqrt(1.0 - r), 0.0), std::exp(kI * phi) * std::sqrt(r)};
}

double eos_crosstalk(double er_db) {
    if (std::isnan(er_db) || er_db < 0.0) {
        throw std::invalid_argument("extinction ratio must be nonnegative");
    }
    if (std::isinf(er_db)) {
        return 0.0;
    }
    return 1.0 / (1.0 + std::pow(10.0, er_db / 10.0));
}

SlotState convert(const StateVector &time_bin, const ConverterModel &m, const TimingSlip &slip) {
    if (time_bin.dim() != 2) {
        throw std::invalid_argument("convert expects a single time-bin qubit");
    }
    const double p_nominal = 1.0 - slip.t0_late - slip.t1_early;
    if (slip.t0_late < 0.0 || slip.t1_early < 0.0 || p_nominal < -kInvariantTol) {
        throw std::invalid_argument("timing slip probabilities must be nonnegative and sum to <= 1");
    }
    const Eigen::Vector2cd psi = time_bin.amplitudes();
    std::array<Eigen::Matrix2cd, kSlotCount> acc;
    acc.fill(Eigen::Matrix2cd::Zero());

    auto add_branch = [&](Routing routing, double weight) {
        if (weight <= 0.0) {
            return;
        }
        Eigen::Matrix<cd, 8, 1> out = converter_kraus(m, routing) * psi;
        for (int s = 0; s < kSlotCount; ++s) {
            Eigen::Vector2cd v = out.segment<2>(2 * s);
            acc[static_cast<std::size_t>(s)] += weight * v * v.adjoint();
        }
    };
    add_branch(Routing::Nominal, std::max(0.0, p_nominal));
    add_branch(Routing::T0Misrouted, slip.t0_late);
    add_branch(Routing::T1Misrouted, slip.t1_early);

    return SlotState({DensityMatrix(Eigen::MatrixXcd(acc[0])), DensityMatrix(Eigen::MatrixXcd(acc[1])),
                      DensityMatrix(Eigen::MatrixXcd(acc[2]))},
                     m.delay_dt_ps);
}

SlotState reverse_convert(const DensityMatrix &path_rho, const ConverterModel &m) {
    if (path_rho.dim() != 2) {
        throw std::invalid_argument("reverse_convert expects a single path qubit");
    }
    // |0> returns through the long arm and meets the through state in bin t0,
    // |1> returns through the short arm and meets the cross state in bin t1.
    const double keep0 = std::sqrt(1.0 - m.eos.crosstalk_through()) * amplitude_of_loss(m.excess_loss_long_db);
    const double keep1 = std::sqrt(1.0 - m.eos.crosstalk_cross()) * amplitude_of_loss(m.excess_loss_short_db);
    Eigen::Matrix2cd k = Eigen::Matrix2cd::Zero();
    k(0, 0) = keep0;
    k(1, 1) = keep1 * std::exp(kI * m.residual_phase());
    Eigen::Matrix2cd aligned = k * path_rho.matrix() * k.adjoint();
    return SlotState({DensityMatrix::zero(2), DensityMatrix(Eigen::MatrixXcd(aligned)), DensityMatrix::zero(2)},
                     m.delay_dt_ps);
}

SlotState reverse_convert(const StateVector &path_state, const ConverterModel &m) {
    return reverse_convert(density_of(path_state), m);
}

double window_acceptance(double offset_ps, double window_ps, double jitter_fwhm_ps) {
    if (!(window_ps > 0.0)) {
        throw std::invalid_argument("window must be positive");
    }
    const double sigma = jitter_fwhm_ps / kFwhmPerSigma;
    if (sigma <= 0.0) {
        return std::abs(offset_ps) <= window_ps ? 1.0 : 0.0;
    }
    return normal_cdf((window_ps - offset_ps) / sigma) - normal_cdf((-window_ps - offset_ps) / sigma);
}

DensityMatrix windowed_qubit(const SlotState &s, double window_ps, double jitter_fwhm_ps) {
    const double w_early = window_acceptance(-s.slot_spacing_ps(), window_ps, jitter_fwhm_ps);
    const double w_late = window_acceptance(s.slot_spacing_ps(), window_ps, jitter_fwhm_ps);
    Eigen::MatrixXcd out = s.aligned().matrix();
    for (int p = 0; p < 2; ++p) {
        out(p, p) += w_early * s.block(Slot::Early)(p, p).real() + w_late * s.block(Slot::Late)(p, p).real();
    }
    return DensityMatrix(std::move(out));
}

AnalyzerMap user_analyzer(double phase) {
    const double r2 = 1.0 / std::sqrt(2.0);
    const cd e = std::exp(kI * phase);
    AnalyzerMap a;
    a << r2, 0.0,
        0.5, 0.5 * e,
        0.5, -0.5 * e,
        0.0, r2;
    return a;
}

}  // namespace qconvsim
