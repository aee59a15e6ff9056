// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

// Serial reference kernels against their OpenMP counterparts.

#include <random>

#include <benchmark/benchmark.h>

#include "slotnoc/evolutionary.hpp"
#include "slotnoc/experiments.hpp"
#include "slotnoc/synthetic.hpp"

namespace slotnoc {
namespace {

struct Population {
    MeshTopology mesh{16, 16, {}, 256};
    ChannelLoads loads{mesh};
    ea::Context ctx;
    std::vector<ea::Genome> genomes;

    explicit Population(std::size_t size) {
        std::mt19937_64 rng(4);
        for (std::size_t ch = 0; ch < loads.size(); ++ch) loads.add(ch, std::uniform_int_distribution<Slot>(0, 99)(rng));
        ctx = {&mesh, {1, 2}, {13, 11}, &loads, 5, FitnessKind::SumLoad};
        const auto candidates = ea::candidate_nodes(mesh, ctx.src, ctx.dst);
        genomes.resize(size);
        for (auto &g : genomes) {
            g.resize(std::uniform_int_distribution<std::size_t>(0, 3)(rng));
            for (NodeId &n : g) {
                n = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
            }
        }
    }
};

void BM_PopulationSerial(benchmark::State &state) {
    const Population p(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(ea::evaluate_population_serial(p.ctx, p.genomes));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PopulationParallel(benchmark::State &state) {
    const Population p(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(ea::evaluate_population(p.ctx, p.genomes));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(BM_PopulationSerial)->Arg(64)->Arg(512)->Arg(4096);
BENCHMARK(BM_PopulationParallel)->Arg(64)->Arg(512)->Arg(4096);

WorkloadSpec sweep_workload() {
    SyntheticParams p;
    p.max_flows = 120;
    return resolve_workload(generate_workload(p, 4).spec);
}

PipelineOptions sweep_options() {
    PipelineOptions o;
    o.routing.ea.population_size = 16;
    o.routing.ea.generations = 8;
    return o;
}

const std::vector<int> kWidths{256, 512, 1024, 2048};

void BM_CompareSerial(benchmark::State &state) {
    const WorkloadSpec spec = sweep_workload();
    const PipelineOptions o = sweep_options();
    for (auto _ : state) benchmark::DoNotOptimize(run_comparison_serial(spec, "bench", kWidths, kAllSchemes, o));
}

void BM_CompareParallel(benchmark::State &state) {
    const WorkloadSpec spec = sweep_workload();
    const PipelineOptions o = sweep_options();
    for (auto _ : state) benchmark::DoNotOptimize(run_comparison(spec, "bench", kWidths, kAllSchemes, o));
}

BENCHMARK(BM_CompareSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CompareParallel)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace slotnoc

BENCHMARK_MAIN();
