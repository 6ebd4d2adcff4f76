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

#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>

#include "test_util.h"

using namespace qconvsim;
using qconvsim::testing::max_abs_diff;
using qconvsim::testing::random_mixed;
using qconvsim::testing::random_pure;

namespace {

const double kR = 1.0 / std::sqrt(2.0);

/// Objective written directly from projector states, independent of the
/// library's Stokes shortcut.
double oracle_likelihood(const DensityMatrix &rho, const CountSet &c) {
    double l = 0.0;
    for (int i = 0; i < kProjectorCount; ++i) {
        auto p = static_cast<Projector>(i);
        Eigen::VectorXcd phi = projector_state(p).amplitudes();
        double prob = std::max((phi.adjoint() * rho.matrix() * phi)(0, 0).real(), 1e-12);
        double n_total = static_cast<double>(c.total_for(p));
        double d = n_total * prob - static_cast<double>(c[p]);
        l += d * d / (2.0 * n_total * prob);
    }
    return l;
}

CountSet exact_counts(const DensityMatrix &rho, std::uint64_t n) {
    Rng unused(0);
    return run_tomography(rho, n, false, unused);
}

/// Lowest objective over a cubic grid restricted to the Bloch ball.
double bloch_grid_minimum(const CountSet &c, double step) {
    double best = std::numeric_limits<double>::infinity();
    const int k = static_cast<int>(std::lround(1.0 / step));
    for (int i = -k; i <= k; ++i) {
        for (int j = -k; j <= k; ++j) {
            for (int l = -k; l <= k; ++l) {
                double x = i * step, y = j * step, z = l * step;
                if (x * x + y * y + z * z > 1.0) {
                    continue;
                }
                best = std::min(best, oracle_likelihood(density_from_stokes({1.0, x, y, z}).rho, c));
            }
        }
    }
    return best;
}

}  // namespace

TEST(tomography, settings_table) {
    MeasSetting z = setting_for(Basis::Z);
    EXPECT_EQ(z.mzi.cross_fraction, 0.0);
    EXPECT_EQ(z.tops.phase, 0.0);
    MeasSetting x = setting_for(Basis::X);
    EXPECT_EQ(x.mzi.cross_fraction, 0.5);
    EXPECT_EQ(x.tops.phase, 0.0);
    MeasSetting y = setting_for(Basis::Y);
    EXPECT_EQ(y.mzi.cross_fraction, 0.5);
    EXPECT_DOUBLE_EQ(y.tops.phase, std::numbers::pi / 2);
}

TEST(tomography, expected_probs_examples) {
    PortProbs z = expected_probs(density_of(StateVector{1.0, 0.0}), setting_for(Basis::Z));
    EXPECT_NEAR(z.port0, 1.0, 1e-12);
    PortProbs x = expected_probs(density_of(StateVector{kR, kR}), setting_for(Basis::X));
    EXPECT_NEAR(x.port0, 1.0, 1e-12);
    for (Basis b : {Basis::Z, Basis::X, Basis::Y}) {
        PortProbs m = expected_probs(DensityMatrix::maximally_mixed(2), setting_for(b));
        EXPECT_NEAR(m.port0, 0.5, 1e-12);
        EXPECT_NEAR(m.port1, 0.5, 1e-12);
    }
}

TEST(tomography, port_zero_selects_first_projector_of_each_basis) {
    for (int i = 0; i < kProjectorCount; ++i) {
        auto p = static_cast<Projector>(i);
        PortProbs probs = expected_probs(density_of(projector_state(p)), setting_for(basis_of(p)));
        EXPECT_NEAR(i % 2 == 0 ? probs.port0 : probs.port1, 1.0, 1e-12) << projector_label(p);
    }
}

TEST(tomography, expected_probs_normalized_for_random_states) {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 100; ++t) {
        DensityMatrix rho = random_mixed(rng, 2);
        for (Basis b : {Basis::Z, Basis::X, Basis::Y}) {
            PortProbs p = expected_probs(rho, setting_for(b));
            EXPECT_NEAR(p.port0 + p.port1, 1.0, 1e-12);
            // Born rule against the ideal projector.
            Eigen::VectorXcd phi = projector_state(static_cast<Projector>(2 * static_cast<int>(b))).amplitudes();
            EXPECT_NEAR(p.port0, (phi.adjoint() * rho.matrix() * phi)(0, 0).real(), 1e-12);
        }
    }
}

TEST(tomography, linear_reconstruct_examples) {
    FlaggedDensity zero = linear_reconstruct(exact_counts(density_of(StateVector{1.0, 0.0}), 1000000));
    EXPECT_TRUE(zero.physical);
    Eigen::Matrix2cd want = Eigen::Matrix2cd::Zero();
    want(0, 0) = 1.0;
    EXPECT_LT(max_abs_diff(zero.rho.matrix(), want), 1e-12);

    CountSet bad;
    bad.n = {100, 0, 100, 0, 100, 0};
    FlaggedDensity flagged = linear_reconstruct(bad);
    EXPECT_FALSE(flagged.physical);
    EXPECT_NEAR(stokes_of(flagged.rho).bloch_length(), std::sqrt(3.0), 1e-12);
    EXPECT_LT(flagged.rho.min_eigenvalue(), 0.0);

    FlaggedDensity mixed = linear_reconstruct(exact_counts(DensityMatrix::maximally_mixed(2), 1000000));
    EXPECT_LT(max_abs_diff(mixed.rho.matrix(), DensityMatrix::maximally_mixed(2).matrix()), 1e-12);
}

TEST(tomography, incomplete_counts_rejected) {
    CountSet c;
    c.n = {5, 5, 0, 0, 5, 5};
    EXPECT_THROW(linear_reconstruct(c), IncompleteTomography);
    EXPECT_THROW(mle_reconstruct(c), IncompleteTomography);
    try {
        linear_reconstruct(c);
    } catch (const std::invalid_argument &e) {
        EXPECT_STREQ(e.what(), "incomplete tomography");
    }
}

TEST(tomography, t_parametrization_round_trip) {
    std::mt19937_64 rng(32);
    for (int t = 0; t < 100; ++t) {
        DensityMatrix rho = random_mixed(rng, 2);
        DensityMatrix back = density_from_t(t_from_density(rho));
        EXPECT_LT(max_abs_diff(back.matrix(), rho.matrix()), 1e-12);
    }
    DensityMatrix pure = density_of(StateVector{kR, kR});
    EXPECT_LT(max_abs_diff(density_from_t(t_from_density(pure)).matrix(), pure.matrix()), 1e-12);
    EXPECT_THROW(density_from_t(TParams{0, 0, 0, 0}), std::invalid_argument);
}

TEST(tomography, likelihood_matches_oracle) {
    std::mt19937_64 rng(33);
    CountSet c;
    c.n = {70, 30, 55, 45, 12, 88};
    for (int t = 0; t < 100; ++t) {
        DensityMatrix rho = random_mixed(rng, 2);
        EXPECT_NEAR(likelihood(rho, c), oracle_likelihood(rho, c), 1e-9);
    }
    // Hand value for I/2 against these counts: sum (50 - n)^2 / 100.
    double hand = (400.0 + 400.0 + 25.0 + 25.0 + 38.0 * 38.0 + 38.0 * 38.0) / 100.0;
    EXPECT_NEAR(likelihood(DensityMatrix::maximally_mixed(2), c), hand, 1e-12);
}

TEST(tomography, mle_exact_zero_state) {
    CountSet c = exact_counts(density_of(StateVector{1.0, 0.0}), 1000000);
    TomoResult r = mle_reconstruct(c, {}, density_of(StateVector{1.0, 0.0}));
    EXPECT_GT(*r.fidelity_vs_target, 0.9999);
    EXPECT_GE(r.restarts, 5);
}

TEST(tomography, mle_noisy_plus_i_median_fidelity) {
    const DensityMatrix target = density_of(StateVector{kR, cd(0.0, kR)});
    std::vector<double> f;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng = make_substream(77, 0, seed);
        CountSet c = run_tomography(target, 10000, true, rng);
        f.push_back(*mle_reconstruct(c, {}, target).fidelity_vs_target);
    }
    std::nth_element(f.begin(), f.begin() + 50, f.end());
    EXPECT_GE(f[50], 0.99);
}

TEST(tomography, mle_nonphysical_matches_bloch_grid) {
    CountSet c;
    c.n = {100, 0, 100, 0, 100, 0};
    TomoResult r = mle_reconstruct(c);
    EXPECT_GE(r.rho_rec.min_eigenvalue(), -1e-9);
    EXPECT_LE(stokes_of(r.rho_rec).bloch_length(), 1.0 + 1e-9);
    const double grid = bloch_grid_minimum(c, 0.02);
    EXPECT_LE(r.likelihood, grid + 1e-9);
    EXPECT_NEAR(r.likelihood, grid, 0.05 * grid);
    EXPECT_NEAR(r.likelihood, oracle_likelihood(r.rho_rec, c), 1e-9);
}

TEST(tomography, mle_always_valid_density) {
    std::mt19937_64 rng(34);
    std::uniform_int_distribution<int> counts(0, 500);
    for (int t = 0; t < 100; ++t) {
        CountSet c;
        for (auto &v : c.n) {
            v = static_cast<std::uint64_t>(counts(rng));
        }
        if (c.total(Basis::Z) == 0 || c.total(Basis::X) == 0 || c.total(Basis::Y) == 0) {
            continue;
        }
        TomoResult r = mle_reconstruct(c);
        EXPECT_GE(r.rho_rec.min_eigenvalue(), -1e-9);
        EXPECT_NEAR(r.rho_rec.trace(), 1.0, 1e-12);
        EXPECT_LT(max_abs_diff(r.rho_rec.matrix(), r.rho_rec.matrix().adjoint()), 1e-9);
    }
}

TEST(tomography, mle_beats_random_physical_states) {
    std::mt19937_64 rng(35);
    Rng sampler(36);
    CountSet c = run_tomography(random_mixed(rng, 2), 2000, true, sampler);
    TomoResult r = mle_reconstruct(c);
    for (int t = 0; t < 1000; ++t) {
        DensityMatrix rho = t % 2 == 0 ? random_mixed(rng, 2) : density_of(random_pure(rng, 2));
        EXPECT_LE(r.likelihood, likelihood(rho, c) + 1e-9);
    }
}

TEST(tomography, mle_agrees_with_physical_linear_inversion) {
    std::mt19937_64 rng(37);
    for (int t = 0; t < 20; ++t) {
        DensityMatrix rho = random_mixed(rng, 2);
        CountSet c = exact_counts(rho, 1000000);
        FlaggedDensity lin = linear_reconstruct(c);
        ASSERT_TRUE(lin.physical);
        TomoResult r = mle_reconstruct(c);
        EXPECT_GE(fidelity(r.rho_rec, lin.rho), 1.0 - 1e-6);
        EXPECT_LE(r.likelihood, likelihood(lin.rho, c) + 1e-9);
    }
}

TEST(tomography, fidelity_improves_with_shots) {
    std::mt19937_64 rng(38);
    const DensityMatrix truth = density_of(random_pure(rng, 2));
    double prev = 0.0;
    for (std::uint64_t n : {100u, 10000u, 1000000u}) {
        std::vector<double> f;
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            Rng r = make_substream(5, n, seed);
            f.push_back(*mle_reconstruct(run_tomography(truth, n, true, r), {}, truth).fidelity_vs_target);
        }
        std::nth_element(f.begin(), f.begin() + 25, f.end());
        EXPECT_GT(f[25], prev);
        prev = f[25];
    }
    EXPECT_GT(prev, 0.9999);
}

TEST(tomography, non_convergence_reports_best_point) {
    CountSet c;
    c.n = {70, 30, 55, 45, 12, 88};
    MleOptions opts;
    opts.simplex.max_evaluations = 6;
    opts.simplex.f_tol = 0.0;
    try {
        mle_reconstruct(c, opts);
        FAIL() << "expected MleConvergenceError";
    } catch (const MleConvergenceError &e) {
        EXPECT_NEAR(e.best_so_far().rho_rec.trace(), 1.0, 1e-12);
        EXPECT_TRUE(e.best_so_far().rho_rec.is_psd());
        EXPECT_GT(e.best_so_far().likelihood, 0.0);
    }
}

TEST(tomography, run_tomography_examples) {
    Rng rng(39);
    CountSet exact = run_tomography(density_of(prepare_time_bin(0.3, 0.0)), 1000, false, rng);
    EXPECT_EQ(exact[Projector::Zero], 700u);
    EXPECT_EQ(exact.total(Basis::X), 1000u);

    CountSet mixed = run_tomography(DensityMatrix::maximally_mixed(2), 1000000, true, rng);
    for (Basis b : {Basis::Z, Basis::X, Basis::Y}) {
        EXPECT_EQ(mixed.total(b), 1000000u);
        double port0 = static_cast<double>(mixed.n[static_cast<std::size_t>(2 * static_cast<int>(b))]);
        EXPECT_LT(std::abs(port0 - 5e5), 4.0 * std::sqrt(1e6 * 0.25));
    }

    CountSet one = run_tomography(density_of(StateVector{0.0, 1.0}), 5000, true, rng);
    EXPECT_EQ(one[Projector::Zero], 0u);
    EXPECT_EQ(one[Projector::One], 5000u);
    EXPECT_THROW(run_tomography(DensityMatrix::maximally_mixed(2), 0, true, rng), std::invalid_argument);
}
