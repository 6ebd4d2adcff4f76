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

#ifndef QCONVSIM_TOMOGRAPHY_H
#define QCONVSIM_TOMOGRAPHY_H

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>

#include "qconvsim/devices.h"
#include "qconvsim/nelder_mead.h"
#include "qconvsim/statekit.h"
#include "qconvsim/stochastics.h"

namespace qconvsim {

enum class Basis { Z = 0, X = 1, Y = 2 };

/// Tomography TO-MZI and MODL TOPS configuration for one projective basis.
struct MeasSetting {
    Basis basis;
    MziSetting mzi;
    TopsSetting tops;
};

MeasSetting setting_for(Basis b);

/// The six cardinal projectors, two per basis, port 0 first.
enum class Projector { Zero = 0, One, Plus, Minus, PlusI, MinusI };
inline constexpr int kProjectorCount = 6;

StateVector projector_state(Projector p);
std::string_view projector_label(Projector p);
inline constexpr Basis basis_of(Projector p) { return static_cast<Basis>(static_cast<int>(p) / 2); }

struct PortProbs {
    double port0;
    double port1;
};

/// Born-rule port probabilities of the configured analyzer.
PortProbs expected_probs(const DensityMatrix &rho, const MeasSetting &s);

/// Counts for the six projectors; per-basis totals are the port sums.
struct CountSet {
    std::array<std::uint64_t, kProjectorCount> n{};

    std::uint64_t operator[](Projector p) const { return n[static_cast<std::size_t>(p)]; }
    std::uint64_t total(Basis b) const;
    std::uint64_t total_for(Projector p) const { return total(basis_of(p)); }
    bool operator==(const CountSet &) const = default;
};

/// Thrown when a basis has no counts.
class IncompleteTomography : public std::invalid_argument {
   public:
    IncompleteTomography() : std::invalid_argument("incomplete tomography") {}
};

/// Stokes inversion: S1 from X, S2 from Y, S3 from Z, S0 = 1.
FlaggedDensity linear_reconstruct(const CountSet &c);

/// Lower-triangular parametrization T = [[t0, 0], [t2 + i t3, t1]],
/// rho = T^dagger T / Tr(T^dagger T).
struct TParams {
    double t0 = 1.0;
    double t1 = 1.0;
    double t2 = 0.0;
    double t3 = 0.0;
};

DensityMatrix density_from_t(const TParams &t);
/// Inverse of density_from_t for a PSD trace-1 matrix (Cholesky factor).
TParams t_from_density(const DensityMatrix &rho);

/// Least-squares likelihood sum_i (N p_i - n_i)^2 / (2 N p_i) over the six
/// projectors, N being the total of projector i's basis and p_i clamped below
/// at 1e-12.
double likelihood(const DensityMatrix &rho, const CountSet &c);

struct MleOptions {
    SimplexOptions simplex{};
    /// Random starting points in addition to the linear-inversion and
    /// maximally-mixed starts.
    int random_restarts = 3;
    std::uint64_t seed = 0x5eed;
};

struct TomoResult {
    DensityMatrix rho_rec = DensityMatrix::maximally_mixed(2);
    double likelihood = 0.0;
    std::optional<double> fidelity_vs_target;
    std::size_t iterations = 0;
    int restarts = 0;
};

/// Carries the best point found when no restart met the tolerance.
class MleConvergenceError : public std::runtime_error {
   public:
    explicit MleConvergenceError(TomoResult best)
        : std::runtime_error("maximum-likelihood optimizer did not converge"), best_(std::move(best)) {}
    const TomoResult &best_so_far() const { return best_; }

   private:
    TomoResult best_;
};

TomoResult mle_reconstruct(const CountSet &c, const MleOptions &opts = {},
                           const std::optional<DensityMatrix> &target = std::nullopt);

/// Synthesizes counts: multinomial (per-basis binomial) sampling of
/// expected_probs when `noisy`, else round(N p).
CountSet run_tomography(const DensityMatrix &rho_true, std::uint64_t shots_per_basis, bool noisy, Rng &rng);

}  // namespace qconvsim

#endif  // QCONVSIM_TOMOGRAPHY_H
