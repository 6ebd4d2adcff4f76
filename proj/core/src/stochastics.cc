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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include "qconvsim/devices.h"

namespace qconvsim {

namespace {

constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();

double uniform01(Rng &rng) {
    // 53-bit mantissa in [0, 1).
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Failures before the first success of a Bernoulli(p) sequence.
std::uint64_t geometric_gap(double p, Rng &rng) {
    if (p >= 1.0) {
        return 0;
    }
    if (p <= 0.0) {
        return kNever;
    }
    double u = 1.0 - uniform01(rng);  // (0, 1]
    double g = std::floor(std::log(u) / std::log1p(-p));
    if (!(g < 1.8e19)) {
        return kNever;
    }
    return static_cast<std::uint64_t>(g);
}

std::uint64_t advance(std::uint64_t from, std::uint64_t gap) {
    if (gap == kNever || from > kNever - 1 - gap) {
        return kNever;
    }
    return from + gap;
}

/// k ~ Poisson(mu) conditioned on k >= 1.
int draw_nonzero_pairs(double mu, Rng &rng) {
    if (mu > 1.0) {
        std::poisson_distribution<int> pd(mu);
        int k = 0;
        while (k == 0) {
            k = pd(rng);
        }
        return k;
    }
    const double norm = -std::expm1(-mu);
    double u = uniform01(rng) * norm;
    double term = mu * std::exp(-mu);
    int k = 1;
    double cumulative = term;
    while (u >= cumulative && k < 64) {
        ++k;
        term *= mu / k;
        cumulative += term;
    }
    return k;
}

struct CumulativeTable {
    std::array<double, kJointOutcomes> cdf{};

    explicit CumulativeTable(const JointTable &t) {
        double acc = 0.0;
        for (int i = 0; i < kJointOutcomes; ++i) {
            acc += std::max(0.0, t[static_cast<std::size_t>(i)]);
            cdf[static_cast<std::size_t>(i)] = acc;
        }
        if (!(acc > 0.0)) {
            throw std::invalid_argument("joint outcome table has no weight");
        }
        for (double &c : cdf) {
            c /= acc;
        }
        cdf.back() = 1.0;
    }

    int sample(Rng &rng) const {
        double u = uniform01(rng);
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(), kJointOutcomes - 1));
    }
};

class BatchRunner {
   public:
    explicit BatchRunner(const LinkModel &m)
        : m_(m), coherent_(m.coherent), background_(m.background) {
        p_pair_ = -std::expm1(-m.mean_pairs_per_pulse);
        for (int d = 0; d < kOutputsPerParty; ++d) {
            p_dark_[static_cast<std::size_t>(d)] = m.detectors_a[static_cast<std::size_t>(d)].dark_probability();
            p_dark_[static_cast<std::size_t>(d + kOutputsPerParty)] =
                m.detectors_b[static_cast<std::size_t>(d)].dark_probability();
        }
    }

    Tally run(std::uint64_t begin, std::uint64_t end, Rng &rng) const {
        Tally t;
        t.pulses = end - begin;
        std::normal_distribution<double> gauss(0.0, 1.0);

        std::uint64_t next_pair = advance(begin, geometric_gap(p_pair_, rng));
        std::array<std::uint64_t, 2 * kOutputsPerParty> next_dark{};
        for (std::size_t i = 0; i < next_dark.size(); ++i) {
            next_dark[i] = advance(begin, geometric_gap(p_dark_[i], rng));
        }

        PartyTimes prev_a{};
        std::uint64_t prev_pulse = kNever;
        while (true) {
            std::uint64_t n = next_pair;
            for (std::uint64_t d : next_dark) {
                n = std::min(n, d);
            }
            if (n >= end) {
                break;
            }
            PartyTimes a;
            PartyTimes b;
            a.fill(kNoClick);
            b.fill(kNoClick);

            if (next_pair == n) {
                int k = draw_nonzero_pairs(m_.mean_pairs_per_pulse, rng);
                for (int j = 0; j < k; ++j) {
                    int joint = (j == 0 ? coherent_ : background_).sample(rng);
                    emit(joint / kPhotonOutcomes, m_.transmission_a, m_.detectors_a, a, rng, gauss);
                    emit(joint % kPhotonOutcomes, m_.transmission_b, m_.detectors_b, b, rng, gauss);
                }
                next_pair = advance(n + 1, geometric_gap(p_pair_, rng));
            }
            for (std::size_t i = 0; i < next_dark.size(); ++i) {
                if (next_dark[i] != n) {
                    continue;
                }
                double tag = (2.0 * uniform01(rng) - 1.0) * m_.window_ps;
                PartyTimes &party = i < kOutputsPerParty ? a : b;
                double &slot = party[i % kOutputsPerParty];
                slot = std::min(slot, tag);
                next_dark[i] = advance(n + 1, geometric_gap(p_dark_[i], rng));
            }

            accumulate_pulse(t, a, b, m_.window_ps);
            if (prev_pulse != kNever && prev_pulse + 1 == n) {
                accumulate_offset(t, prev_a, b, m_.window_ps);
            }
            prev_a = a;
            prev_pulse = n;
        }
        return t;
    }

   private:
    void emit(int outcome, double transmission, const std::array<Detector, kOutputsPerParty> &detectors,
              PartyTimes &times, Rng &rng, std::normal_distribution<double> &gauss) const {
        if (outcome == 0) {
            return;
        }
        int slot = (outcome - 1) / kOutputsPerParty;
        int output = (outcome - 1) % kOutputsPerParty;
        const Detector &d = detectors[static_cast<std::size_t>(output)];
        if (uniform01(rng) >= transmission * d.efficiency) {
            return;
        }
        double tag = (slot - 1) * m_.slot_spacing_ps + d.jitter_sigma_ps() * gauss(rng);
        double &cur = times[static_cast<std::size_t>(output)];
        cur = std::min(cur, tag);
    }

    const LinkModel &m_;
    CumulativeTable coherent_;
    CumulativeTable background_;
    double p_pair_ = 0.0;
    std::array<double, 2 * kOutputsPerParty> p_dark_{};
};

}  // namespace

Rng make_substream(std::uint64_t master_seed, std::uint64_t stream, std::uint64_t index) {
    auto lo = [](std::uint64_t x) { return static_cast<std::uint32_t>(x & 0xffffffffu); };
    auto hi = [](std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); };
    std::seed_seq seq{lo(master_seed), hi(master_seed), lo(stream), hi(stream), lo(index), hi(index)};
    return Rng(seq);
}

unsigned default_thread_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char *env = std::getenv("QCONVSIM_THREADS")) {
        try {
            long v = std::stol(env);
            if (v >= 1) {
                return static_cast<unsigned>(v);
            }
        } catch (const std::exception &) {
        }
    }
    return hw;
}

void PairSource::validate() const {
    if (!(mean_pairs_per_pulse >= 0.0)) {
        throw std::invalid_argument("mean_pairs_per_pulse must be >= 0");
    }
    if (!(rep_rate_hz > 0.0)) {
        throw std::invalid_argument("rep_rate_hz must be > 0");
    }
}

void FiberChannel::validate() const {
    if (!(length_km >= 0.0) || !(atten_db_per_km >= 0.0) || !(pol_penalty_db >= 0.0) ||
        !(arrival_sigma_ps >= 0.0)) {
        throw std::invalid_argument("fiber channel parameters must be nonnegative");
    }
}

double Detector::jitter_sigma_ps() const {
    return jitter_fwhm_ps / kFwhmPerSigma;
}

double Detector::dark_probability() const {
    return std::min(1.0, dark_rate_hz * 2.0 * window_ps * 1e-12);
}

void Detector::validate() const {
    if (!(efficiency >= 0.0 && efficiency <= 1.0)) {
        throw std::invalid_argument("detector efficiency must lie in [0, 1]");
    }
    if (!(dark_rate_hz >= 0.0) || !(jitter_fwhm_ps >= 0.0)) {
        throw std::invalid_argument("detector dark rate and jitter must be nonnegative");
    }
    if (!(window_ps > 0.0)) {
        throw std::invalid_argument("detector window must be positive");
    }
}

int draw_pairs(double mu, Rng &rng) {
    if (!(mu >= 0.0)) {
        throw std::invalid_argument("mean pair number must be >= 0");
    }
    if (mu == 0.0) {
        return 0;
    }
    std::poisson_distribution<int> pd(mu);
    return pd(rng);
}

double survival(double loss_db) {
    if (!(loss_db >= 0.0)) {
        throw std::invalid_argument("loss must be >= 0 dB");
    }
    return std::pow(10.0, -loss_db / 10.0);
}

double misroute_prob(double arrival_sigma_ps, double edge_offset_ps) {
    if (arrival_sigma_ps < 0.0 || edge_offset_ps < 0.0) {
        throw std::invalid_argument("misroute_prob expects nonnegative arguments");
    }
    if (edge_offset_ps == 0.0) {
        return 0.5;
    }
    if (arrival_sigma_ps == 0.0) {
        return 0.0;
    }
    return 0.5 * std::erfc(edge_offset_ps / (arrival_sigma_ps * std::sqrt(2.0)));
}

std::optional<double> detect(double arrival_prob, const Detector &d, Rng &rng, double true_time_ps) {
    if (!(arrival_prob >= 0.0 && arrival_prob <= 1.0)) {
        throw std::invalid_argument("arrival probability must lie in [0, 1]");
    }
    double tag = kNoClick;
    if (uniform01(rng) < d.efficiency * arrival_prob) {
        std::normal_distribution<double> gauss(0.0, d.jitter_sigma_ps());
        tag = true_time_ps + (d.jitter_fwhm_ps > 0.0 ? gauss(rng) : 0.0);
    }
    if (uniform01(rng) < d.dark_probability()) {
        tag = std::min(tag, (2.0 * uniform01(rng) - 1.0) * d.window_ps);
    }
    if (tag == kNoClick) {
        return std::nullopt;
    }
    return tag;
}

std::uint64_t Tally::total_coincidences() const {
    std::uint64_t s = 0;
    for (const auto &row : coincidences) {
        for (auto v : row) {
            s += v;
        }
    }
    return s;
}

std::uint64_t Tally::total_accidentals() const {
    std::uint64_t s = 0;
    for (const auto &row : accidentals) {
        for (auto v : row) {
            s += v;
        }
    }
    return s;
}

double Tally::car() const {
    auto acc = total_accidentals();
    if (acc == 0) {
        return std::numeric_limits<double>::infinity();
    }
    return static_cast<double>(total_coincidences()) / static_cast<double>(acc);
}

Tally &Tally::operator+=(const Tally &other) {
    for (int i = 0; i < kOutputsPerParty; ++i) {
        singles_a[static_cast<std::size_t>(i)] += other.singles_a[static_cast<std::size_t>(i)];
        singles_b[static_cast<std::size_t>(i)] += other.singles_b[static_cast<std::size_t>(i)];
        for (int j = 0; j < kOutputsPerParty; ++j) {
            coincidences[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
                other.coincidences[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            accidentals[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
                other.accidentals[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    }
    pulses += other.pulses;
    return *this;
}

void accumulate_pulse(Tally &t, const PartyTimes &a, const PartyTimes &b, double window_ps) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != kNoClick) {
            ++t.singles_a[i];
        }
        if (b[i] != kNoClick) {
            ++t.singles_b[i];
        }
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == kNoClick) {
            continue;
        }
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (b[j] != kNoClick && std::abs(a[i] - b[j]) <= window_ps) {
                ++t.coincidences[i][j];
            }
        }
    }
}

void accumulate_offset(Tally &t, const PartyTimes &a_prev, const PartyTimes &b_next, double window_ps) {
    for (std::size_t i = 0; i < a_prev.size(); ++i) {
        if (a_prev[i] == kNoClick) {
            continue;
        }
        for (std::size_t j = 0; j < b_next.size(); ++j) {
            if (b_next[j] != kNoClick && std::abs(a_prev[i] - b_next[j]) <= window_ps) {
                ++t.accidentals[i][j];
            }
        }
    }
}

Tally coincide(const std::vector<PartyPulse> &alice, const std::vector<PartyPulse> &bob, double window_ps,
               std::uint64_t total_pulses) {
    Tally t;
    t.pulses = total_pulses;
    PartyTimes silent;
    silent.fill(kNoClick);

    std::size_t ia = 0;
    std::size_t ib = 0;
    const PartyTimes *prev_a = nullptr;
    std::uint64_t prev_pulse = kNever;
    while (ia < alice.size() || ib < bob.size()) {
        std::uint64_t n = kNever;
        if (ia < alice.size()) {
            n = alice[ia].pulse;
        }
        if (ib < bob.size()) {
            n = std::min(n, bob[ib].pulse);
        }
        const PartyTimes &a = (ia < alice.size() && alice[ia].pulse == n) ? alice[ia++].times : silent;
        const PartyTimes &b = (ib < bob.size() && bob[ib].pulse == n) ? bob[ib++].times : silent;
        accumulate_pulse(t, a, b, window_ps);
        if (prev_a != nullptr && prev_pulse + 1 == n) {
            accumulate_offset(t, *prev_a, b, window_ps);
        }
        prev_a = &a;
        prev_pulse = n;
    }
    return t;
}

Tally simulate_link(const LinkModel &model, std::uint64_t pulses, std::uint64_t seed, std::uint64_t stream,
                    unsigned threads) {
    if (!(model.mean_pairs_per_pulse >= 0.0)) {
        throw std::invalid_argument("mean pair number must be >= 0");
    }
    const BatchRunner runner(model);
    const std::uint64_t batches = (pulses + kPulsesPerBatch - 1) / kPulsesPerBatch;
    std::vector<Tally> results(batches);
    std::atomic<std::uint64_t> next{0};

    auto worker = [&] {
        for (std::uint64_t b = next++; b < batches; b = next++) {
            Rng rng = make_substream(seed, stream, b);
            std::uint64_t begin = b * kPulsesPerBatch;
            std::uint64_t end = std::min(pulses, begin + kPulsesPerBatch);
            results[b] = runner.run(begin, end, rng);
        }
    };
    unsigned n_threads = static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, threads), batches));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned i = 0; i < n_threads; ++i) {
            pool.emplace_back(worker);
        }
        for (auto &th : pool) {
            th.join();
        }
    }

    Tally total;
    for (const Tally &t : results) {
        total += t;
    }
    total.pulses = pulses;
    return total;
}

}  // namespace qconvsim
