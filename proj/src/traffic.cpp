// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

#include "slotnoc/traffic.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include <fmt/format.h>

namespace slotnoc {

namespace {

// Position `d` on the Hilbert curve filling an n x n square (n = 2^k).
NodeId hilbert_point(int n, int d) {
    int x = 0;
    int y = 0;
    int t = d;
    for (int s = 1; s < n; s *= 2) {
        const int rx = 1 & (t / 2);
        const int ry = 1 & (t ^ rx);
        if (ry == 0) {
            if (rx == 1) {
                x = s - 1 - x;
                y = s - 1 - y;
            }
            std::swap(x, y);
        }
        x += s * rx;
        y += s * ry;
        t /= 4;
    }
    return {x, y};
}

NodeId nearest_in(const std::vector<NodeId> &candidates, NodeId target) {
    NodeId best = candidates.front();
    int best_d = std::numeric_limits<int>::max();
    for (const NodeId &c : candidates) {
        const int d = manhattan(c, target);
        if (d < best_d || (d == best_d && c < best)) {
            best = c;
            best_d = d;
        }
    }
    return best;
}

}  // namespace

const LayerSpec *WorkloadSpec::find_layer(const std::string &name) const {
    for (const LayerSpec &l : layers) {
        if (l.name == name) return &l;
    }
    return nullptr;
}

std::string_view to_string(Provenance p) {
    switch (p) {
        case Provenance::Weights: return "weights";
        case Provenance::Inputs: return "inputs";
        case Provenance::PsumReduce: return "psum_reduce";
        case Provenance::OutputSpill: return "output_spill";
        case Provenance::InterLayer: return "inter_layer";
    }
    return "?";
}

std::vector<NodeId> hilbert_order(int width, int height) {
    int n = 1;
    while (n < width || n < height) n *= 2;
    std::vector<NodeId> out;
    out.reserve(static_cast<std::size_t>(width) * height);
    for (int d = 0; d < n * n; ++d) {
        const NodeId p = hilbert_point(n, d);
        if (p.x < width && p.y < height) out.push_back(p);
    }
    return out;
}

WorkloadSpec place_regions(WorkloadSpec workload) {
    const MeshTopology &mesh = workload.mesh;
    std::set<NodeId> taken;
    long demanded = 0;
    for (const LayerSpec &l : workload.layers) {
        if (l.tile_count < 1) {
            throw Error(ErrorKind::CapacityExceeded, fmt::format("layer '{}' asks for {} tiles", l.name, l.tile_count));
        }
        demanded += l.tile_count;
        taken.insert(l.region.begin(), l.region.end());
    }
    if (demanded > mesh.node_count()) {
        throw Error(ErrorKind::CapacityExceeded,
                    fmt::format("{} tiles demanded on a {}-tile mesh", demanded, mesh.node_count()));
    }
    const std::vector<NodeId> order = hilbert_order(mesh.width(), mesh.height());
    std::size_t cursor = 0;
    for (LayerSpec &l : workload.layers) {
        if (!l.region.empty()) continue;
        while (static_cast<int>(l.region.size()) < l.tile_count) {
            if (cursor >= order.size()) {
                throw Error(ErrorKind::CapacityExceeded, fmt::format("no free tiles left for layer '{}'", l.name));
            }
            const NodeId n = order[cursor++];
            if (taken.insert(n).second) l.region.push_back(n);
        }
    }
    return workload;
}

bool has_downstream(const WorkloadSpec &workload, const std::string &layer) {
    return std::any_of(workload.layers.begin(), workload.layers.end(),
                       [&](const LayerSpec &l) { return l.upstream && *l.upstream == layer; });
}

WorkloadSpec resolve_workload(WorkloadSpec workload) {
    const bool needs_placement = std::any_of(workload.layers.begin(), workload.layers.end(),
                                             [](const LayerSpec &l) { return l.region.empty(); });
    if (needs_placement) workload = place_regions(std::move(workload));

    const auto &mcs = workload.mesh.mc_nodes();
    for (LayerSpec &l : workload.layers) {
        if (l.region.empty()) continue;
        if (!workload.mc_assignment.contains(l.name)) {
            if (mcs.empty()) {
                throw Error(ErrorKind::InvalidWorkload, "mesh has no memory controllers");
            }
            // Closest controller to any tile of the region; list order breaks ties.
            NodeId best = mcs.front();
            int best_d = std::numeric_limits<int>::max();
            for (const NodeId &mc : mcs) {
                int d = std::numeric_limits<int>::max();
                for (const NodeId &t : l.region) d = std::min(d, manhattan(mc, t));
                if (d < best_d) {
                    best_d = d;
                    best = mc;
                }
            }
            workload.mc_assignment[l.name] = best;
        }
        if (!l.reduction_tile) l.reduction_tile = nearest_in(l.region, workload.mc_assignment.at(l.name));
    }
    validate_workload(workload);
    return workload;
}

void validate_workload(const WorkloadSpec &workload) {
    const MeshTopology &mesh = workload.mesh;
    auto fail = [](const std::string &why) { throw Error(ErrorKind::InvalidWorkload, why); };
    std::set<std::string> names;
    std::set<NodeId> used;
    for (const LayerSpec &l : workload.layers) {
        if (l.name.empty()) fail("layer without a name");
        if (!names.insert(l.name).second) fail(fmt::format("duplicate layer '{}'", l.name));
        if (l.tile_count < 1) {
            throw Error(ErrorKind::CapacityExceeded, fmt::format("layer '{}' asks for {} tiles", l.name, l.tile_count));
        }
        if (static_cast<int>(l.region.size()) != l.tile_count) {
            fail(fmt::format("layer '{}' region has {} tiles, expected {}", l.name, l.region.size(), l.tile_count));
        }
        for (const NodeId &n : l.region) {
            if (!mesh.contains(n)) fail(fmt::format("layer '{}' tile {} outside mesh", l.name, to_string(n)));
            if (!used.insert(n).second) {
                fail(fmt::format("tile {} assigned to more than one layer", to_string(n)));
            }
        }
        if (!l.reduction_tile ||
            std::find(l.region.begin(), l.region.end(), *l.reduction_tile) == l.region.end()) {
            fail(fmt::format("layer '{}' reduction tile must lie in its region", l.name));
        }
        if (l.weight_tile_bits <= 0 || l.input_tile_bits <= 0 || l.output_tile_bits <= 0) {
            fail(fmt::format("layer '{}' tensor sizes must be positive", l.name));
        }
        if (l.iterations < 1) fail(fmt::format("layer '{}' needs at least one iteration", l.name));
        if (l.compute_slots_per_iteration < 1) fail(fmt::format("layer '{}' compute slots must be >= 1", l.name));
        auto mc = workload.mc_assignment.find(l.name);
        if (mc == workload.mc_assignment.end() || !mesh.is_mc(mc->second)) {
            fail(fmt::format("layer '{}' has no valid memory controller", l.name));
        }
    }
    for (const LayerSpec &l : workload.layers) {
        if (!l.upstream) continue;
        if (*l.upstream == l.name || !names.contains(*l.upstream)) {
            throw Error(ErrorKind::DanglingUpstream,
                        fmt::format("layer '{}' names unknown upstream '{}'", l.name, *l.upstream));
        }
    }
}

CommunicationGraph extract_flows(const WorkloadSpec &workload) {
    struct Pending {
        TrafficFlow flow;
        FlowTag tag;
    };
    std::vector<Pending> pending;

    for (std::size_t li = 0; li < workload.layers.size(); ++li) {
        const LayerSpec &layer = workload.layers[li];
        const Slot period = layer.compute_slots_per_iteration;
        const int m = static_cast<int>(layer.region.size());
        const NodeId mc = workload.mc_assignment.at(layer.name);
        const NodeId reducer = *layer.reduction_tile;
        const LayerSpec *upstream = nullptr;
        if (layer.upstream) {
            upstream = workload.find_layer(*layer.upstream);
            if (upstream == nullptr) {
                throw Error(ErrorKind::DanglingUpstream,
                            fmt::format("layer '{}' names unknown upstream '{}'", layer.name, *layer.upstream));
            }
        }
        const FlowId none = 0;

        for (int i = 0; i < layer.iterations; ++i) {
            // Iteration i computes during [(i+1)P, (i+2)P); its operands are
            // prefetched while iteration i-1 computes.
            const Slot prefetch_ready = i * period;
            const Slot compute_start = (i + 1) * period;

            TrafficFlow weights{none,
                                m > 1 ? PatternKind::Multicast : PatternKind::Unicast,
                                layer.weight_tile_bits * m,
                                {mc},
                                layer.region,
                                PortKind::Memory,
                                PortKind::Tile,
                                prefetch_ready,
                                compute_start};
            pending.push_back({weights, {static_cast<int>(li), i, Provenance::Weights}});

            TrafficFlow inputs = weights;
            inputs.volume = layer.input_tile_bits * m;
            Provenance inputs_tag = Provenance::Inputs;
            if (upstream != nullptr) {
                inputs.sources = {*upstream->reduction_tile};
                inputs.source_port = PortKind::Tile;
                inputs.kind = m > 1 ? PatternKind::Multicast : PatternKind::LinkTransfer;
                inputs_tag = Provenance::InterLayer;
            }
            pending.push_back({inputs, {static_cast<int>(li), i, inputs_tag}});

            if (m > 1) {
                TrafficFlow reduce{none,
                                   PatternKind::Reduce,
                                   layer.output_tile_bits,
                                   layer.region,
                                   {reducer},
                                   PortKind::Tile,
                                   PortKind::Tile,
                                   (i + 2) * period,
                                   (i + 3) * period};
                pending.push_back({reduce, {static_cast<int>(li), i, Provenance::PsumReduce}});
            }
        }

        if (!has_downstream(workload, layer.name)) {
            const Slot ready = (layer.iterations + 1) * period + (m > 1 ? period : 0);
            TrafficFlow spill{none,
                              PatternKind::Unicast,
                              layer.output_tile_bits * layer.iterations,
                              {reducer},
                              {mc},
                              PortKind::Tile,
                              PortKind::Memory,
                              ready,
                              ready + period};
            pending.push_back({spill, {static_cast<int>(li), layer.iterations - 1, Provenance::OutputSpill}});
        }
    }

    std::stable_sort(pending.begin(), pending.end(),
                     [](const Pending &a, const Pending &b) { return a.flow.ready_time < b.flow.ready_time; });

    CommunicationGraph graph;
    graph.flows.reserve(pending.size());
    graph.tags.reserve(pending.size());
    for (std::size_t i = 0; i < pending.size(); ++i) {
        pending[i].flow.id = static_cast<FlowId>(i);
        validate_flow(pending[i].flow, workload.mesh);
        graph.flows.push_back(std::move(pending[i].flow));
        graph.tags.push_back(pending[i].tag);
    }
    return graph;
}

Slot qos_slack(const TrafficFlow &flow, Slot now) { return flow.qos_deadline - now; }

}  // namespace slotnoc
