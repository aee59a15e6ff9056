// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slotnoc/hw_config.hpp"
#include "slotnoc/injection.hpp"
#include "slotnoc/metrics.hpp"
#include "slotnoc/routing.hpp"
#include "slotnoc/simulator.hpp"
#include "slotnoc/workload_file.hpp"

namespace slotnoc {

enum class Scheme : std::uint8_t { METRO, DOR, XYYX, ROMM, MAD };
std::string_view to_string(Scheme s);
// Case-insensitive; nullopt for unknown names.
std::optional<Scheme> parse_scheme(std::string_view name);
inline constexpr Scheme kAllSchemes[] = {Scheme::METRO, Scheme::DOR, Scheme::XYYX, Scheme::ROMM, Scheme::MAD};

struct PipelineOptions {
    RoutingOptions routing;
    FramingParams framing;
    // Template for baseline runs; the algorithm is set per scheme.
    BaselineParams baseline;
    bool trace = false;
};

// Every artifact of one scheduled run.
struct MetroRun {
    CommunicationGraph graph;
    std::vector<RoutePlan> plans;
    AcceleratorConfig config;
    InjectionSchedule schedule;
    std::vector<Conflict> conflicts;
    SimResult sim;
};

// extract, route, emit, schedule, verify, simulate. The mesh of `workload`
// fixes wire width and slot cost.
MetroRun run_metro(const WorkloadSpec &workload, const PipelineOptions &options);

// Stops after scheduling (no simulation).
MetroRun plan_metro(const WorkloadSpec &workload, const PipelineOptions &options);

struct CellResult {
    std::string workload;
    int wire_width = 0;
    Scheme scheme = Scheme::METRO;
    TileReport tiles;
    Slot ideal_makespan = 0;
    // makespan / ideal_makespan
    double normalized_makespan = 1.0;
};

struct AblationRow {
    std::string stage;
    Slot communication = 0;
    Slot makespan = 0;
    double mean_bounded_ratio = 0.0;
    // Fractional cut in communication time against the previous row.
    double reduction = 0.0;
};

struct ExperimentReport {
    std::vector<CellResult> cells;
    std::vector<AblationRow> ablation;
};

CellResult run_cell(const WorkloadSpec &workload, const std::string &name, int wire_width, Scheme scheme,
                    const PipelineOptions &options);

// Cells are evaluated in parallel; the order of `cells` is (width, scheme).
ExperimentReport run_comparison(const WorkloadSpec &workload, const std::string &name, std::span<const int> widths,
                                std::span<const Scheme> schemes, const PipelineOptions &options);
// Reference: same cells, one after another.
ExperimentReport run_comparison_serial(const WorkloadSpec &workload, const std::string &name,
                                       std::span<const int> widths, std::span<const Scheme> schemes,
                                       const PipelineOptions &options);

// Cumulative feature ladder: unscheduled single-VC routers, then slot
// injection control, dual-phase routing, EA balancing, chunk framing.
std::vector<AblationRow> run_ablation(const WorkloadSpec &workload, int wire_width, const PipelineOptions &options);

// Smallest width in `cells` at which `scheme` has mean bounded ratio <= 1.
std::optional<int> ideal_width(std::span<const CellResult> cells, Scheme scheme);

}  // namespace slotnoc
