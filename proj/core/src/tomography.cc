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

#include "qconvsim/tomography.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace qconvsim {

namespace {

constexpr double kProbFloor = 1e-12;

/// Projector expectations for the six cardinal states from the Stokes vector.
std::array<double, kProjectorCount> cardinal_probs(double s1, double s2, double s3) {
    return {0.5 * (1 + s3), 0.5 * (1 - s3), 0.5 * (1 + s1), 0.5 * (1 - s1), 0.5 * (1 + s2), 0.5 * (1 - s2)};
}

double likelihood_from_probs(const std::array<double, kProjectorCount> &p, const CountSet &c) {
    double l = 0.0;
    for (int i = 0; i < kProjectorCount; ++i) {
        auto proj = static_cast<Projector>(i);
        double n_total = static_cast<double>(c.total_for(proj));
        double predicted = n_total * std::max(p[static_cast<std::size_t>(i)], kProbFloor);
        double diff = predicted - static_cast<double>(c[proj]);
        l += diff * diff / (2.0 * predicted);
    }
    return l;
}

/// Likelihood directly from the T parameters (no allocation; the optimizer's hot path).
double likelihood_from_t(const Eigen::VectorXd &t, const CountSet &c) {
    const double tr = t.squaredNorm();
    if (!(tr > 0.0)) {
        return std::numeric_limits<double>::infinity();
    }
    const double s1 = 2.0 * t(1) * t(2) / tr;
    const double s2 = 2.0 * t(1) * t(3) / tr;
    const double s3 = (t(0) * t(0) + t(2) * t(2) + t(3) * t(3) - t(1) * t(1)) / tr;
    return likelihood_from_probs(cardinal_probs(s1, s2, s3), c);
}

Eigen::VectorXd as_vector(const TParams &t) {
    Eigen::VectorXd v(4);
    v << t.t0, t.t1, t.t2, t.t3;
    return v;
}

TParams as_params(const Eigen::VectorXd &v) {
    return TParams{v(0), v(1), v(2), v(3)};
}

void require_complete(const CountSet &c) {
    for (Basis b : {Basis::Z, Basis::X, Basis::Y}) {
        if (c.total(b) == 0) {
            throw IncompleteTomography();
        }
    }
}

}  // namespace

MeasSetting setting_for(Basis b) {
    switch (b) {
        case Basis::Z:
            return MeasSetting{b, MziSetting{0.0}, TopsSetting{0.0}};
        case Basis::X:
            return MeasSetting{b, MziSetting{0.5}, TopsSetting{0.0}};
        case Basis::Y:
            return MeasSetting{b, MziSetting{0.5}, TopsSetting{std::numbers::pi / 2}};
    }
    throw std::invalid_argument("unknown basis");
}

StateVector projector_state(Projector p) {
    const double r = 1.0 / std::sqrt(2.0);
    const cd i(0.0, 1.0);
    switch (p) {
        case Projector::Zero:
            return StateVector{1.0, 0.0};
        case Projector::One:
            return StateVector{0.0, 1.0};
        case Projector::Plus:
            return StateVector{r, r};
        case Projector::Minus:
            return StateVector{r, -r};
        case Projector::PlusI:
            return StateVector{r, i * r};
        case Projector::MinusI:
            return StateVector{r, -i * r};
    }
    throw std::invalid_argument("unknown projector");
}

std::string_view projector_label(Projector p) {
    static constexpr std::array<std::string_view, kProjectorCount> kLabels = {"0", "1", "+", "-", "+i", "-i"};
    return kLabels[static_cast<std::size_t>(p)];
}

PortProbs expected_probs(const DensityMatrix &rho, const MeasSetting &s) {
    if (rho.dim() != 2) {
        throw std::invalid_argument("expected_probs expects a single qubit");
    }
    Eigen::Matrix2cd u = (mzi_transfer(s.mzi) * tops_transfer(s.tops)).matrix();
    Eigen::Matrix2cd out = u * rho.matrix() * u.adjoint();
    double p0 = out(0, 0).real();
    double p1 = out(1, 1).real();
    double sum = p0 + p1;
    return PortProbs{p0 / sum, p1 / sum};
}

std::uint64_t CountSet::total(Basis b) const {
    auto i = static_cast<std::size_t>(2 * static_cast<int>(b));
    return n[i] + n[i + 1];
}

FlaggedDensity linear_reconstruct(const CountSet &c) {
    require_complete(c);
    auto ratio = [&](Projector a, Projector b) {
        return (static_cast<double>(c[a]) - static_cast<double>(c[b])) / static_cast<double>(c.total_for(a));
    };
    StokesVector s{1.0, ratio(Projector::Plus, Projector::Minus), ratio(Projector::PlusI, Projector::MinusI),
                   ratio(Projector::Zero, Projector::One)};
    return density_from_stokes(s);
}

DensityMatrix density_from_t(const TParams &t) {
    const cd i(0.0, 1.0);
    Eigen::Matrix2cd tm;
    tm << t.t0, 0.0, cd(t.t2, 0.0) + i * t.t3, t.t1;
    Eigen::Matrix2cd m = tm.adjoint() * tm;
    double tr = m.trace().real();
    if (!(tr > 0.0)) {
        throw std::invalid_argument("T parameters must not all vanish");
    }
    return DensityMatrix(Eigen::MatrixXcd(m / tr));
}

TParams t_from_density(const DensityMatrix &rho) {
    if (rho.dim() != 2) {
        throw std::invalid_argument("t_from_density expects a single qubit");
    }
    const double r11 = std::max(0.0, rho(1, 1).real());
    const cd r10 = rho(1, 0);
    TParams t;
    t.t1 = std::sqrt(r11);
    if (t.t1 > 1e-12) {
        cd lower = r10 / t.t1;
        t.t2 = lower.real();
        t.t3 = lower.imag();
    } else {
        t.t2 = 0.0;
        t.t3 = 0.0;
    }
    t.t0 = std::sqrt(std::max(0.0, rho(0, 0).real() - t.t2 * t.t2 - t.t3 * t.t3));
    return t;
}

double likelihood(const DensityMatrix &rho, const CountSet &c) {
    StokesVector s = stokes_of(rho);
    return likelihood_from_probs(cardinal_probs(s.s1 / s.s0, s.s2 / s.s0, s.s3 / s.s0), c);
}

TomoResult mle_reconstruct(const CountSet &c, const MleOptions &opts, const std::optional<DensityMatrix> &target) {
    require_complete(c);
    std::vector<Eigen::VectorXd> starts;

    FlaggedDensity lin = linear_reconstruct(c);
    if (lin.physical) {
        starts.push_back(as_vector(t_from_density(lin.rho)));
    } else {
        // Pull the Bloch vector just inside the ball.
        StokesVector s = stokes_of(lin.rho);
        double scale = 0.99 / s.bloch_length();
        StokesVector shrunk{1.0, s.s1 * scale, s.s2 * scale, s.s3 * scale};
        starts.push_back(as_vector(t_from_density(density_from_stokes(shrunk).rho)));
    }
    starts.push_back(as_vector(t_from_density(DensityMatrix::maximally_mixed(2))));
    Rng rng = make_substream(opts.seed, 0x7014, 0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int r = 0; r < opts.random_restarts; ++r) {
        Eigen::VectorXd v(4);
        for (int k = 0; k < 4; ++k) {
            v(k) = gauss(rng);
        }
        starts.push_back(v);
    }

    auto objective = [&](const Eigen::VectorXd &t) { return likelihood_from_t(t, c); };
    std::optional<SimplexResult> best;
    bool any_converged = false;
    std::size_t evaluations = 0;
    for (const auto &start : starts) {
        SimplexResult r = nelder_mead(objective, start, opts.simplex);
        evaluations += r.evaluations;
        any_converged = any_converged || r.converged;
        // Strict comparison keeps the earliest restart on ties.
        if (!best || r.value < best->value) {
            best = r;
        }
    }

    TomoResult out;
    out.rho_rec = density_from_t(as_params(best->x));
    out.likelihood = best->value;
    out.iterations = evaluations;
    out.restarts = static_cast<int>(starts.size());
    if (target) {
        out.fidelity_vs_target = fidelity(out.rho_rec, *target);
    }
    if (!any_converged) {
        throw MleConvergenceError(std::move(out));
    }
    return out;
}

CountSet run_tomography(const DensityMatrix &rho_true, std::uint64_t shots_per_basis, bool noisy, Rng &rng) {
    if (shots_per_basis == 0) {
        throw std::invalid_argument("shots per basis must be positive");
    }
    CountSet c;
    for (Basis b : {Basis::Z, Basis::X, Basis::Y}) {
        PortProbs p = expected_probs(rho_true, setting_for(b));
        double p0 = std::clamp(p.port0, 0.0, 1.0);
        std::uint64_t n0;
        if (noisy) {
            std::binomial_distribution<std::uint64_t> bd(shots_per_basis, p0);
            n0 = bd(rng);
        } else {
            n0 = static_cast<std::uint64_t>(std::llround(p0 * static_cast<double>(shots_per_basis)));
        }
        auto i = static_cast<std::size_t>(2 * static_cast<int>(b));
        c.n[i] = n0;
        c.n[i + 1] = shots_per_basis - n0;
    }
    return c;
}

}  // namespace qconvsim
