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

#include "qconvsim/stochastics.h"

#include <gtest/gtest.h>

#include <cmath>

using namespace qconvsim;

namespace {

/// Binomial standard deviation of a fraction estimated from n trials.
double binomial_sigma(double p, double n) {
    return std::sqrt(p * (1.0 - p) / n);
}

/// Link with no photons: only dark counts reach the detectors.
LinkModel dark_only(double dark_hz, double window_ps) {
    LinkModel m;
    m.mean_pairs_per_pulse = 0.0;
    m.coherent[0] = 1.0;
    m.background[0] = 1.0;
    Detector d;
    d.efficiency = 1.0;
    d.dark_rate_hz = dark_hz;
    d.window_ps = window_ps;
    m.detectors_a.fill(d);
    m.detectors_b.fill(d);
    m.window_ps = window_ps;
    return m;
}

/// Perfectly correlated pairs: both photons exit output 0 in the aligned slot.
LinkModel correlated(double mu) {
    LinkModel m;
    m.mean_pairs_per_pulse = mu;
    const int aligned_out0 = 1 + kOutputsPerParty * 1 + 0;
    m.coherent[static_cast<std::size_t>(kPhotonOutcomes * aligned_out0 + aligned_out0)] = 1.0;
    m.background = m.coherent;
    Detector d;
    d.efficiency = 1.0;
    d.dark_rate_hz = 0.0;
    d.jitter_fwhm_ps = 0.0;
    d.window_ps = 100.0;
    m.detectors_a.fill(d);
    m.detectors_b.fill(d);
    m.window_ps = 100.0;
    return m;
}

}  // namespace

TEST(stochastics, draw_pairs_zero_mean) {
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        EXPECT_EQ(draw_pairs(0.0, rng), 0);
    }
    EXPECT_THROW(draw_pairs(-1.0, rng), std::invalid_argument);
}

TEST(stochastics, draw_pairs_low_mean) {
    Rng rng(2);
    const double mu = 6e-4;
    const int n = 10000000;
    long long sum = 0;
    for (int i = 0; i < n; ++i) {
        sum += draw_pairs(mu, rng);
    }
    double mean = static_cast<double>(sum) / n;
    EXPECT_LT(std::abs(mean - mu), 3.0 * std::sqrt(mu / n));
}

TEST(stochastics, draw_pairs_variance_matches_mean) {
    Rng rng(3);
    const int n = 1000000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        double k = draw_pairs(2.0, rng);
        s += k;
        s2 += k * k;
    }
    double mean = s / n;
    double var = s2 / n - mean * mean;
    EXPECT_NEAR(var / mean, 1.0, 0.02);
}

TEST(stochastics, survival_examples) {
    EXPECT_DOUBLE_EQ(survival(0.0), 1.0);
    EXPECT_NEAR(survival(10.0), 0.1, 1e-15);
    EXPECT_NEAR(survival(15.5), 0.02818, 5e-6);
    EXPECT_THROW(survival(-0.1), std::invalid_argument);
    for (double a : {0.3, 2.0, 7.7}) {
        for (double b : {0.0, 1.1, 12.4}) {
            EXPECT_NEAR(survival(a + b), survival(a) * survival(b), 1e-12);
        }
    }
}

TEST(stochastics, misroute_examples) {
    EXPECT_EQ(misroute_prob(0.0, 50.0), 0.0);
    EXPECT_EQ(misroute_prob(10.0, 0.0), 0.5);
    // Tail of a 5-sigma Gaussian.
    EXPECT_NEAR(misroute_prob(10.0, 50.0), 2.8665e-7, 1e-10);
    EXPECT_THROW(misroute_prob(-1.0, 1.0), std::invalid_argument);
}

TEST(stochastics, misroute_monotone) {
    double prev = 1.0;
    for (double off = 0.0; off <= 100.0; off += 5.0) {
        double p = misroute_prob(18.0, off);
        EXPECT_LE(p, prev);
        prev = p;
    }
    prev = 0.0;
    for (double sigma = 0.0; sigma <= 100.0; sigma += 5.0) {
        double p = misroute_prob(sigma, 40.0);
        EXPECT_GE(p, prev);
        prev = p;
    }
}

TEST(stochastics, detect_examples) {
    Rng rng(4);
    Detector perfect;
    perfect.efficiency = 1.0;
    perfect.dark_rate_hz = 0.0;
    Detector blind;
    blind.efficiency = 0.0;
    blind.dark_rate_hz = 0.0;
    for (int i = 0; i < 1000; ++i) {
        EXPECT_TRUE(detect(1.0, perfect, rng).has_value());
        EXPECT_FALSE(detect(1.0, blind, rng).has_value());
    }
    EXPECT_THROW(detect(1.5, perfect, rng), std::invalid_argument);
}

TEST(stochastics, detect_click_rate) {
    Rng rng(5);
    Detector d;
    d.efficiency = 0.7;
    d.dark_rate_hz = 0.0;
    const int n = 1000000;
    int clicks = 0;
    for (int i = 0; i < n; ++i) {
        clicks += detect(0.5, d, rng).has_value() ? 1 : 0;
    }
    EXPECT_LT(std::abs(static_cast<double>(clicks) / n - 0.35), 3.0 * binomial_sigma(0.35, n));
}

TEST(stochastics, detect_click_rate_with_dark_counts) {
    Rng rng(6);
    Detector d;
    d.efficiency = 0.6;
    d.dark_rate_hz = 2.5e8;  // 0.1 per 400 ps window
    d.window_ps = 200.0;
    const double p_dark = 2.5e8 * 400e-12;
    const double want = 1.0 - (1.0 - 0.6 * 0.3) * (1.0 - p_dark);
    const int n = 1000000;
    int clicks = 0;
    for (int i = 0; i < n; ++i) {
        clicks += detect(0.3, d, rng).has_value() ? 1 : 0;
    }
    EXPECT_LT(std::abs(static_cast<double>(clicks) / n - want), 4.0 * binomial_sigma(want, n));
}

TEST(stochastics, detect_jitter_width) {
    Rng rng(7);
    Detector d;
    d.efficiency = 1.0;
    d.dark_rate_hz = 0.0;
    d.jitter_fwhm_ps = 150.0;
    const int n = 200000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        double t = *detect(1.0, d, rng, 100.0);
        s += t;
        s2 += t * t;
    }
    double mean = s / n;
    double sd = std::sqrt(s2 / n - mean * mean);
    EXPECT_NEAR(mean, 100.0, 1.0);
    EXPECT_NEAR(sd, 150.0 / (2.0 * std::sqrt(2.0 * std::log(2.0))), 0.5);
}

TEST(stochastics, coincide_identical_streams) {
    std::vector<PartyPulse> stream;
    for (std::uint64_t p : {3u, 9u, 10u, 500u}) {
        PartyPulse e;
        e.pulse = p;
        e.times[2] = 5.0;
        stream.push_back(e);
    }
    Tally t = coincide(stream, stream, 100.0, 1000);
    EXPECT_EQ(t.coincidences[2][2], t.singles_a[2]);
    EXPECT_EQ(t.total_coincidences(), 4u);
    EXPECT_EQ(t.singles_b[2], 4u);
    // Pulses 9 and 10 are adjacent, giving one offset pairing.
    EXPECT_EQ(t.total_accidentals(), 1u);
    EXPECT_EQ(t.pulses, 1000u);
}

TEST(stochastics, coincide_respects_window) {
    PartyPulse a;
    a.pulse = 1;
    a.times[0] = 0.0;
    PartyPulse b;
    b.pulse = 1;
    b.times[3] = 150.0;
    EXPECT_EQ(coincide({a}, {b}, 200.0, 2).coincidences[0][3], 1u);
    EXPECT_EQ(coincide({a}, {b}, 100.0, 2).coincidences[0][3], 0u);
}

TEST(stochastics, tally_addition_and_car) {
    Tally a;
    a.coincidences[1][1] = 10;
    a.accidentals[0][0] = 2;
    a.pulses = 5;
    Tally b = a;
    b += a;
    EXPECT_EQ(b.coincidences[1][1], 20u);
    EXPECT_EQ(b.pulses, 10u);
    EXPECT_DOUBLE_EQ(b.car(), 5.0);
    EXPECT_TRUE(std::isinf(Tally{}.car()));
}

TEST(stochastics, substreams_are_independent_and_reproducible) {
    Rng a = make_substream(1, 2, 3);
    Rng b = make_substream(1, 2, 3);
    Rng c = make_substream(1, 2, 4);
    EXPECT_EQ(a(), b());
    EXPECT_NE(make_substream(1, 2, 3)(), c());
}

TEST(stochastics, simulate_link_reproducible_and_thread_independent) {
    LinkModel m = correlated(0.01);
    const std::uint64_t pulses = 3 * kPulsesPerBatch + 12345;
    Tally one = simulate_link(m, pulses, 99, 1, 1);
    Tally again = simulate_link(m, pulses, 99, 1, 1);
    Tally many = simulate_link(m, pulses, 99, 1, 4);
    EXPECT_EQ(one, again);
    EXPECT_EQ(one, many);
    EXPECT_NE(one, simulate_link(m, pulses, 100, 1, 1));
}

TEST(stochastics, simulate_link_pair_rate) {
    // Every pulse with >= 1 pair gives exactly one coincidence at output 0-0.
    const double mu = 0.02;
    const std::uint64_t pulses = 20000000;
    Tally t = simulate_link(correlated(mu), pulses, 5, 0, 1);
    const double p = -std::expm1(-mu);
    const double n = static_cast<double>(pulses);
    EXPECT_LT(std::abs(static_cast<double>(t.coincidences[0][0]) / n - p), 4.0 * binomial_sigma(p, n));
    EXPECT_EQ(t.total_coincidences(), t.coincidences[0][0]);
    // Accidentals need a pair in two consecutive pulses: probability p^2.
    EXPECT_LT(std::abs(static_cast<double>(t.accidentals[0][0]) / n - p * p), 4.0 * binomial_sigma(p * p, n));
}

TEST(stochastics, simulate_link_dark_counts_give_equal_true_and_offset_rates) {
    // Only dark clicks: same-pulse and offset-pulse pairings are statistically identical.
    LinkModel m = dark_only(2e6, 200.0);
    const std::uint64_t pulses = 200000000;
    Tally t = simulate_link(m, pulses, 8, 0, 1);
    const double p_dark = 2e6 * 400e-12;
    const double n = static_cast<double>(pulses);
    EXPECT_LT(std::abs(static_cast<double>(t.singles_a[0]) / n - p_dark), 4.0 * binomial_sigma(p_dark, n));
    const double c = static_cast<double>(t.total_coincidences());
    const double a = static_cast<double>(t.total_accidentals());
    // 16 detector pairs clicking together with probability p_dark^2; two tags
    // uniform on [-W, W] lie within W of each other with probability 3/4.
    const double want = 16.0 * p_dark * p_dark * 0.75 * n;
    EXPECT_LT(std::abs(c - want), 4.0 * std::sqrt(want));
    EXPECT_LT(std::abs(a - want), 4.0 * std::sqrt(want));
}

TEST(stochastics, simulate_link_car_falls_with_mean_pair_number) {
    // Lossy correlated link; CAR ~ 1/mu.
    double prev = std::numeric_limits<double>::infinity();
    for (double mu : {1e-3, 1e-2, 1e-1}) {
        LinkModel m = correlated(mu);
        m.transmission_a = 0.3;
        m.transmission_b = 0.3;
        Tally t = simulate_link(m, static_cast<std::uint64_t>(2e6 / mu), 9, 0, 1);
        EXPECT_LT(t.car(), prev);
        prev = t.car();
    }
}
