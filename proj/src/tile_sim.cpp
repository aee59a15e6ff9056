// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

#include <algorithm>
#include <optional>

#include <fmt/format.h>

#include "slotnoc/metrics.hpp"
#include "slotnoc/simulator.hpp"

namespace slotnoc {

TileReport simulate_tiles(const WorkloadSpec &workload, const CommunicationGraph &graph,
                          std::span<const Slot> completion) {
    if (completion.size() != graph.size()) {
        throw Error(ErrorKind::InvalidWorkload,
                    fmt::format("{} arrival times for {} flows", completion.size(), graph.size()));
    }
    struct IterationData {
        Slot prefetch = 0;
        std::optional<Slot> reduced;
    };
    std::vector<std::vector<IterationData>> data(workload.layers.size());
    std::vector<Slot> layer_comm(workload.layers.size(), 0);
    std::vector<Slot> spill_arrival(workload.layers.size(), 0);
    for (std::size_t li = 0; li < workload.layers.size(); ++li) {
        const LayerSpec &l = workload.layers[li];
        data[li].resize(static_cast<std::size_t>(l.iterations));
        for (int i = 0; i < l.iterations; ++i) data[li][static_cast<std::size_t>(i)].prefetch = i * l.compute_slots_per_iteration;
    }

    TileReport report;
    for (std::size_t f = 0; f < graph.size(); ++f) {
        const TrafficFlow &flow = graph.flows[f];
        const FlowTag &tag = graph.tags[f];
        const Slot arrival = completion[f] + 1;
        const std::size_t li = static_cast<std::size_t>(tag.layer);
        const Slot comm = arrival - flow.ready_time;
        report.communication += comm;
        layer_comm[li] += comm;
        IterationData &it = data[li][static_cast<std::size_t>(tag.iteration)];
        switch (tag.provenance) {
            case Provenance::Weights:
            case Provenance::Inputs:
            case Provenance::InterLayer: it.prefetch = std::max(it.prefetch, arrival); break;
            case Provenance::PsumReduce: it.reduced = std::max(it.reduced.value_or(arrival), arrival); break;
            case Provenance::OutputSpill: spill_arrival[li] = std::max(spill_arrival[li], arrival); break;
        }
    }

    long tiles = 0;
    double weighted = 0.0;
    for (std::size_t li = 0; li < workload.layers.size(); ++li) {
        const LayerSpec &l = workload.layers[li];
        const Slot period = l.compute_slots_per_iteration;
        LayerTiming lt;
        lt.name = l.name;
        lt.tiles = static_cast<int>(l.region.size());
        lt.compute = period * l.iterations;
        lt.communication = layer_comm[li];
        Slot end = period;
        Slot transmission = 0;
        for (int i = 0; i < l.iterations; ++i) {
            const IterationData &it = data[li][static_cast<std::size_t>(i)];
            Slot start = std::max(end, it.prefetch);
            if (i >= 2) {
                // Output half of the double buffer is free only once iteration
                // i-2 has been reduced out of it.
                const auto &older = data[li][static_cast<std::size_t>(i - 2)].reduced;
                if (older) start = std::max(start, *older);
            }
            lt.stall += start - end;
            end = start + period;
            Slot comm = it.prefetch - i * period;
            if (it.reduced) comm = std::max(comm, *it.reduced - (i + 2) * period);
            transmission += comm;
        }
        lt.end = end;
        lt.bounded_ratio = bounded_ratio(transmission, lt.compute);
        report.total_compute += lt.compute * lt.tiles;
        report.total_stall += lt.stall * lt.tiles;
        report.makespan = std::max({report.makespan, end, spill_arrival[li]});
        report.max_bounded_ratio = std::max(report.max_bounded_ratio, lt.bounded_ratio);
        weighted += lt.bounded_ratio * lt.tiles;
        tiles += lt.tiles;
        report.layers.push_back(std::move(lt));
    }
    report.mean_bounded_ratio = tiles > 0 ? weighted / static_cast<double>(tiles) : 0.0;
    return report;
}

std::vector<Slot> instant_arrivals(const CommunicationGraph &graph) {
    std::vector<Slot> out(graph.size());
    for (std::size_t f = 0; f < graph.size(); ++f) out[f] = graph.flows[f].ready_time - 1;
    return out;
}

std::vector<Slot> completions(const SimResult &result) {
    std::vector<Slot> out(result.flows.size());
    for (std::size_t f = 0; f < result.flows.size(); ++f) out[f] = result.flows[f].tail;
    return out;
}

}  // namespace slotnoc
