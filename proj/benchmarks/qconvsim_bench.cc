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

#include <benchmark/benchmark.h>

#include <numbers>

#include "qconvsim/experiments.h"
#include "qconvsim/fringe_fit.h"
#include "qconvsim/statekit.h"
#include "qconvsim/tomography.h"

using namespace qconvsim;

namespace {

void BM_fidelity_qubit(benchmark::State &state) {
    DensityMatrix a = density_of(prepare_time_bin(0.3, 0.4)) * 0.9 + DensityMatrix::maximally_mixed(2) * 0.1;
    DensityMatrix b = density_of(prepare_time_bin(0.5, 0.0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fidelity(a, b));
    }
}
BENCHMARK(BM_fidelity_qubit);

void BM_convert(benchmark::State &state) {
    ConverterModel m;
    StateVector in = prepare_time_bin(0.5, std::numbers::pi / 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(convert(in, m));
    }
}
BENCHMARK(BM_convert);

void BM_mle_reconstruct(benchmark::State &state) {
    Rng rng(7);
    CountSet c = run_tomography(density_of(prepare_time_bin(0.5, 1.0)), static_cast<std::uint64_t>(state.range(0)),
                                true, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(mle_reconstruct(c));
    }
}
BENCHMARK(BM_mle_reconstruct)->Arg(1000)->Arg(100000);

void BM_joint_outcome_table(benchmark::State &state) {
    Scenario s;
    s.channel_alice.arrival_sigma_ps = 18.0;
    s.channel_bob.arrival_sigma_ps = 18.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(joint_outcome_table(s, 0.3, 0.0, 0.0));
    }
}
BENCHMARK(BM_joint_outcome_table);

void BM_simulate_link(benchmark::State &state) {
    Scenario s;
    s.basis_split_loss_db = 3.0103;
    s.insertion_loss_alice_db = 10.0;
    s.insertion_loss_bob_db = 15.5;
    LinkModel m = build_link_model(s, 0.0, 0.0, 0.0);
    const auto pulses = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_link(m, pulses, 1, 0, 1));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_simulate_link)->Arg(100000000)->Arg(1000000000)->Unit(benchmark::kMillisecond);

void BM_fit_visibility(benchmark::State &state) {
    FringeDataset d;
    for (int k = 0; k < 16; ++k) {
        double x = (k + 0.5) * std::numbers::pi / 8;
        d.points.push_back(FringePoint{x, static_cast<std::uint64_t>(500.0 * (1.0 + 0.9 * std::cos(x + 0.2)))});
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_visibility(d));
    }
}
BENCHMARK(BM_fit_visibility);

}  // namespace

BENCHMARK_MAIN();
