// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

#include "slotnoc/synthetic.hpp"

#include <algorithm>
#include <random>

#include <fmt/format.h>

namespace slotnoc {

void SyntheticParams::validate() const {
    auto fail = [](const std::string &why) { throw Error(ErrorKind::InvalidWorkload, why); };
    if (width < 1 || height < 1) fail("mesh dimensions must be positive");
    if (layers < 0) fail("layer count must be >= 0");
    if (min_tiles < 1 || max_tiles < min_tiles) fail("bad tile range");
    if (layers * min_tiles > width * height) fail("layers cannot fit on the mesh");
    if (min_iterations < 1 || max_iterations < min_iterations) fail("bad iteration range");
    if (min_tile_bits < 1 || max_tile_bits < min_tile_bits) fail("bad tensor size range");
    if (min_compute < 1 || max_compute < min_compute) fail("bad compute range");
    if (max_flows < 1) fail("flow budget must be positive");
}

int expected_flow_count(const WorkloadSpec &spec) {
    int flows = 0;
    for (const LayerSpec &l : spec.layers) {
        flows += l.iterations * (l.tile_count > 1 ? 3 : 2);
        if (!has_downstream(spec, l.name)) ++flows;
    }
    return flows;
}

WorkloadFile generate_workload(const SyntheticParams &params, std::uint64_t seed) {
    params.validate();
    std::mt19937_64 rng(seed);
    auto pick = [&](auto lo, auto hi) {
        using T = decltype(lo);
        return static_cast<T>(std::uniform_int_distribution<long long>(lo, hi)(rng));
    };

    WorkloadFile file;
    file.name = fmt::format("synthetic-{}", seed);
    file.note = "synthetic workload";
    file.wire_widths = {params.wire_width};
    file.spec.mesh = MeshTopology(params.width, params.height,
                                  MeshTopology::edge_midpoint_controllers(params.width, params.height,
                                                                          params.memory_controllers),
                                  params.wire_width, params.slot_cost);

    int free_tiles = params.width * params.height;
    for (int i = 0; i < params.layers; ++i) {
        const int reserve = (params.layers - i - 1) * params.min_tiles;
        const int hi = std::min(params.max_tiles, free_tiles - reserve);
        if (hi < params.min_tiles) break;
        LayerSpec l;
        l.name = fmt::format("layer{}", i);
        l.tile_count = pick(params.min_tiles, hi);
        l.iterations = pick(params.min_iterations, params.max_iterations);
        l.weight_tile_bits = pick(params.min_tile_bits, params.max_tile_bits);
        l.input_tile_bits = pick(params.min_tile_bits, params.max_tile_bits);
        l.output_tile_bits = pick(params.min_tile_bits, params.max_tile_bits);
        l.compute_slots_per_iteration = pick(params.min_compute, params.max_compute);
        if (i > 0 && std::uniform_real_distribution<double>(0.0, 1.0)(rng) < params.chain_probability) {
            l.upstream = file.spec.layers.back().name;
        }
        free_tiles -= l.tile_count;
        file.spec.layers.push_back(std::move(l));
    }
    // Trim iterations, largest first, until the flow budget holds.
    while (expected_flow_count(file.spec) > params.max_flows) {
        auto it = std::max_element(file.spec.layers.begin(), file.spec.layers.end(),
                                   [](const LayerSpec &a, const LayerSpec &b) { return a.iterations < b.iterations; });
        if (it->iterations > 1) {
            --it->iterations;
        } else {
            file.spec.layers.pop_back();
        }
    }
    return file;
}

CommunicationGraph hotspot_burst(const MeshTopology &mesh, NodeId mc, Bits volume) {
    if (!mesh.is_mc(mc)) throw Error(ErrorKind::InvalidWorkload, fmt::format("{} is not a memory controller", to_string(mc)));
    CommunicationGraph g;
    for (int y = 0; y < mesh.height(); ++y) {
        for (int x = 0; x < mesh.width(); ++x) {
            const NodeId t{x, y};
            if (t == mc) continue;
            const FlowId id = static_cast<FlowId>(g.flows.size());
            g.flows.push_back({id, PatternKind::Unicast, volume, {t}, {mc}, PortKind::Tile, PortKind::Memory, 0, 1});
            g.tags.push_back({0, 0, Provenance::OutputSpill});
        }
    }
    return g;
}

}  // namespace slotnoc
