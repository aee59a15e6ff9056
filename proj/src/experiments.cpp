// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

#include "slotnoc/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <exception>

#include <fmt/format.h>

namespace slotnoc {

double bounded_ratio(Slot transmission_slots, Slot computation_slots) {
    if (computation_slots <= 0) {
        throw Error(ErrorKind::ZeroCompute, fmt::format("computation time {} is not positive", computation_slots));
    }
    return static_cast<double>(transmission_slots) / static_cast<double>(computation_slots);
}

std::string_view to_string(Scheme s) {
    switch (s) {
        case Scheme::METRO: return "METRO";
        case Scheme::DOR: return "DOR";
        case Scheme::XYYX: return "XYYX";
        case Scheme::ROMM: return "ROMM";
        case Scheme::MAD: return "MAD";
    }
    return "?";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    for (Scheme s : kAllSchemes) {
        if (to_string(s) == upper) return s;
    }
    return std::nullopt;
}

MetroRun plan_metro(const WorkloadSpec &workload, const PipelineOptions &options) {
    const MeshTopology &mesh = workload.mesh;
    MetroRun run;
    run.graph = extract_flows(workload);
    run.plans = route_all(mesh, run.graph, options.routing);
    run.config = build_config(mesh, run.graph, run.plans, options.framing);
    run.schedule = schedule(mesh, run.graph, run.plans, run.config);
    run.conflicts = verify_schedule(mesh, run.schedule.timeline);
    return run;
}

MetroRun run_metro(const WorkloadSpec &workload, const PipelineOptions &options) {
    MetroRun run = plan_metro(workload, options);
    if (!run.conflicts.empty()) {
        throw Error(ErrorKind::RuntimeConflict,
                    fmt::format("schedule has {} channel conflicts", run.conflicts.size()));
    }
    run.sim = simulate_metro(workload.mesh, run.config, run.schedule, options.trace);
    return run;
}

namespace {

BaselineAlgorithm algorithm_of(Scheme s) {
    switch (s) {
        case Scheme::DOR: return BaselineAlgorithm::DOR;
        case Scheme::XYYX: return BaselineAlgorithm::XYYX;
        case Scheme::ROMM: return BaselineAlgorithm::ROMM;
        case Scheme::MAD: return BaselineAlgorithm::MAD;
        case Scheme::METRO: break;
    }
    throw Error(ErrorKind::InvalidWorkload, "METRO has no baseline algorithm");
}

CellResult evaluate_cell(const WorkloadSpec &base, const std::string &name, int wire_width, Scheme scheme,
                         const PipelineOptions &options) {
    WorkloadSpec workload = base;
    workload.mesh = base.mesh.with_wire_width(wire_width);
    CellResult cell;
    cell.workload = name;
    cell.wire_width = wire_width;
    cell.scheme = scheme;
    std::vector<Slot> done;
    CommunicationGraph graph;
    if (scheme == Scheme::METRO) {
        MetroRun run = run_metro(workload, options);
        done = completions(run.sim);
        graph = std::move(run.graph);
    } else {
        graph = extract_flows(workload);
        BaselineParams params = options.baseline;
        params.algorithm = algorithm_of(scheme);
        params.trace = options.trace;
        done = completions(simulate_baseline(workload.mesh, graph, params));
    }
    cell.tiles = simulate_tiles(workload, graph, done);
    cell.ideal_makespan = simulate_tiles(workload, graph, instant_arrivals(graph)).makespan;
    cell.normalized_makespan = cell.ideal_makespan > 0 ? static_cast<double>(cell.tiles.makespan) /
                                                             static_cast<double>(cell.ideal_makespan)
                                                       : 1.0;
    return cell;
}

struct CellKey {
    int width;
    Scheme scheme;
};

std::vector<CellKey> cell_keys(std::span<const int> widths, std::span<const Scheme> schemes) {
    std::vector<CellKey> keys;
    for (int w : widths) {
        for (Scheme s : schemes) keys.push_back({w, s});
    }
    return keys;
}

}  // namespace

CellResult run_cell(const WorkloadSpec &workload, const std::string &name, int wire_width, Scheme scheme,
                    const PipelineOptions &options) {
    try {
        return evaluate_cell(workload, name, wire_width, scheme, options);
    } catch (const Error &e) {
        throw e.within(fmt::format("cell {}/{}/{}", name, wire_width, to_string(scheme)));
    }
}

ExperimentReport run_comparison_serial(const WorkloadSpec &workload, const std::string &name,
                                       std::span<const int> widths, std::span<const Scheme> schemes,
                                       const PipelineOptions &options) {
    ExperimentReport report;
    if (workload.layers.empty()) return report;
    for (const CellKey &k : cell_keys(widths, schemes)) {
        report.cells.push_back(run_cell(workload, name, k.width, k.scheme, options));
    }
    return report;
}

ExperimentReport run_comparison(const WorkloadSpec &workload, const std::string &name, std::span<const int> widths,
                                std::span<const Scheme> schemes, const PipelineOptions &options) {
    if (workload.layers.empty()) return {};
    const std::vector<CellKey> keys = cell_keys(widths, schemes);
    std::vector<CellResult> cells(keys.size());
    std::vector<std::exception_ptr> errors(keys.size());
    const long n = static_cast<long>(keys.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        try {
            cells[i] = run_cell(workload, name, keys[i].width, keys[i].scheme, options);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const std::exception_ptr &e : errors) {
        if (e) std::rethrow_exception(e);
    }
    ExperimentReport report;
    report.cells = std::move(cells);
    return report;
}

std::vector<AblationRow> run_ablation(const WorkloadSpec &base, int wire_width, const PipelineOptions &options) {
    if (base.layers.empty()) return {};
    WorkloadSpec workload = base;
    workload.mesh = base.mesh.with_wire_width(wire_width);
    const CommunicationGraph graph = extract_flows(workload);
    std::vector<AblationRow> rows;

    auto record = [&](const std::string &stage, std::span<const Slot> done) {
        const TileReport tiles = simulate_tiles(workload, graph, done);
        AblationRow row{stage, tiles.communication, tiles.makespan, tiles.mean_bounded_ratio, 0.0};
        if (!rows.empty() && rows.back().communication > 0) {
            row.reduction = 1.0 - static_cast<double>(row.communication) /
                                      static_cast<double>(rows.back().communication);
        }
        rows.push_back(row);
    };

    // The same single-VC, 2-cycle routers, but traffic is injected as soon as
    // it is ready and every packet competes for buffers.
    BaselineParams routers = options.baseline;
    routers.algorithm = BaselineAlgorithm::DOR;
    routers.vcs = 1;
    routers.vc_depth = 4;
    routers.router_delay = workload.mesh.channel_slot_cost() - 1;
    routers.link_delay = 1;
    routers.header_flit = true;
    routers.packet_payload_flits = options.framing.packet_payload_flits;
    routers.blocked_window = 0;
    record("metro-routers", completions(simulate_baseline(workload.mesh, graph, routers)));

    struct Stage {
        const char *name;
        bool dual_phase;
        bool use_ea;
        FramingKind framing;
    };
    const Stage stages[] = {
        {"+injection-control", false, false, FramingKind::Packet},
        {"+dual-phase", true, false, FramingKind::Packet},
        {"+ea-balancing", true, true, FramingKind::Packet},
        {"+chunk-framing", true, true, FramingKind::Chunk},
    };
    for (const Stage &s : stages) {
        PipelineOptions o = options;
        o.routing.dual_phase = s.dual_phase;
        o.routing.use_ea = s.use_ea;
        o.framing.kind = s.framing;
        try {
            record(s.name, completions(run_metro(workload, o).sim));
        } catch (const Error &e) {
            throw e.within(fmt::format("ablation stage {}", s.name));
        }
    }
    return rows;
}

std::optional<int> ideal_width(std::span<const CellResult> cells, Scheme scheme) {
    std::optional<int> best;
    for (const CellResult &c : cells) {
        if (c.scheme != scheme || c.tiles.mean_bounded_ratio > 1.0) continue;
        if (!best || c.wire_width < *best) best = c.wire_width;
    }
    return best;
}

}  // namespace slotnoc
