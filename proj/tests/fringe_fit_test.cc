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

#include "qconvsim/fringe_fit.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace qconvsim;

namespace {

constexpr double kPi = std::numbers::pi;

FringeDataset sampled(ScanVariable scan, int n, double span, double amp, double vis, double phase,
                      std::mt19937_64 *rng) {
    FringeDataset d;
    d.scan = scan;
    const double w = scan_frequency(scan);
    for (int k = 0; k < n; ++k) {
        double x = k * span / n;
        double mean = amp * (1.0 + vis * std::cos(w * x + phase));
        std::uint64_t c = rng ? std::poisson_distribution<std::uint64_t>(mean)(*rng)
                              : static_cast<std::uint64_t>(std::llround(mean));
        d.points.push_back(FringePoint{x, c});
    }
    return d;
}

}  // namespace

TEST(fringe_fit, scan_names) {
    EXPECT_EQ(parse_scan_variable("alice_phase"), ScanVariable::AlicePhase);
    EXPECT_EQ(parse_scan_variable("source_theta"), ScanVariable::SourceTheta);
    EXPECT_EQ(scan_name(ScanVariable::SourceTheta), "source_theta");
    EXPECT_THROW(parse_scan_variable("bob_phase"), std::invalid_argument);
    EXPECT_EQ(scan_frequency(ScanVariable::AlicePhase), 1.0);
    EXPECT_EQ(scan_frequency(ScanVariable::SourceTheta), 2.0);
}

TEST(fringe_fit, point_error_is_poisson) {
    EXPECT_DOUBLE_EQ(FringePoint({0.0, 400}).std_error(), 20.0);
}

TEST(fringe_fit, exact_full_visibility) {
    // Two periods sampled at multiples of pi/2: counts 2000, 1000, 0, 1000, ...
    FringeDataset d;
    for (int k = 0; k < 8; ++k) {
        double x = k * kPi / 2;
        d.points.push_back(FringePoint{x, static_cast<std::uint64_t>(std::llround(1000.0 * (1.0 + std::cos(x))))});
    }
    FringeFit f = fit_visibility(d);
    EXPECT_NEAR(f.visibility, 1.0, 1e-9);
    EXPECT_NEAR(f.amplitude, 1000.0, 1e-6);
    EXPECT_NEAR(f.phase_offset, 0.0, 1e-9);
    EXPECT_NEAR(f.residual, 0.0, 1e-9);
}

TEST(fringe_fit, recovers_phase_offset) {
    FringeDataset d = sampled(ScanVariable::AlicePhase, 16, 2 * kPi, 1e6, 0.6, 0.7, nullptr);
    FringeFit f = fit_visibility(d);
    EXPECT_NEAR(f.visibility, 0.6, 1e-5);
    EXPECT_NEAR(f.phase_offset, 0.7, 1e-5);
    EXPECT_NEAR(f.model(0.3, 1.0), 1e6 * (1.0 + 0.6 * std::cos(1.0)), 5.0);
}

TEST(fringe_fit, theta_scan_uses_double_frequency) {
    FringeDataset d = sampled(ScanVariable::SourceTheta, 16, kPi, 1e6, 0.9, -0.4, nullptr);
    FringeFit f = fit_visibility(d);
    EXPECT_NEAR(f.visibility, 0.9, 1e-5);
    EXPECT_NEAR(f.phase_offset, -0.4, 1e-5);
}

TEST(fringe_fit, poisson_visibility_is_unbiased) {
    std::mt19937_64 rng(41);
    const int runs = 50;
    double sum = 0.0, sum_sq = 0.0, sum_err = 0.0;
    for (int r = 0; r < runs; ++r) {
        FringeFit f = fit_visibility(sampled(ScanVariable::AlicePhase, 16, 2 * kPi, 500.0, 0.8, 0.3, &rng));
        sum += f.visibility;
        sum_sq += f.visibility * f.visibility;
        sum_err += f.visibility_stderr;
    }
    double mean = sum / runs;
    double sd = std::sqrt(sum_sq / runs - mean * mean);
    EXPECT_LT(std::abs(mean - 0.8), 3.0 * sd / std::sqrt(runs));
    // Reported error matches the scatter it describes.
    EXPECT_NEAR(sum_err / runs, sd, 0.35 * sd);
}

TEST(fringe_fit, flat_data_has_zero_visibility) {
    FringeDataset d;
    for (int k = 0; k < 12; ++k) {
        d.points.push_back(FringePoint{0.5 * k, 321});
    }
    FringeFit f = fit_visibility(d);
    EXPECT_NEAR(f.visibility, 0.0, 1e-12);
    EXPECT_NEAR(f.amplitude, 321.0, 1e-9);
}

TEST(fringe_fit, rescaling_counts_keeps_visibility) {
    std::mt19937_64 rng(42);
    FringeDataset d = sampled(ScanVariable::AlicePhase, 16, 2 * kPi, 300.0, 0.7, 1.1, &rng);
    FringeDataset scaled = d;
    for (auto &p : scaled.points) {
        p.coincidences *= 7;
    }
    // IRLS weights have a floor at 1 count, so compare well above it.
    EXPECT_NEAR(fit_visibility(d).visibility, fit_visibility(scaled).visibility, 1e-6);
}

TEST(fringe_fit, rejects_bad_input) {
    FringeDataset few = sampled(ScanVariable::AlicePhase, 7, 2 * kPi, 100.0, 0.5, 0.0, nullptr);
    EXPECT_THROW(fit_visibility(few), std::invalid_argument);

    FringeDataset empty;
    for (int k = 0; k < 8; ++k) {
        empty.points.push_back(FringePoint{double(k), 0});
    }
    EXPECT_THROW(fit_visibility(empty), std::invalid_argument);

    FringeDataset unordered = sampled(ScanVariable::AlicePhase, 8, 2 * kPi, 100.0, 0.5, 0.0, nullptr);
    unordered.points[3].scan_value = unordered.points[2].scan_value;
    EXPECT_THROW(unordered.validate(), std::invalid_argument);
    EXPECT_THROW(fit_visibility(unordered), std::invalid_argument);
}

TEST(fringe_fit, bell_check_examples) {
    FringeFit f;
    f.visibility = 0.9134;
    EXPECT_TRUE(bell_check(f));
    f.visibility = 0.70711;
    EXPECT_TRUE(bell_check(f));
    f.visibility = kBellThreshold;
    EXPECT_FALSE(bell_check(f));
    f.visibility = 0.707;
    EXPECT_FALSE(bell_check(f));
    f.visibility = 0.5;
    EXPECT_FALSE(bell_check(f));
}
