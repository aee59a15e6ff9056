// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "slotnoc/hw_config.hpp"
#include "slotnoc/injection.hpp"
#include "slotnoc/routing.hpp"
#include "slotnoc/traffic.hpp"

namespace slotnoc {

struct DeliveryRecord {
    FlowId flow_id = 0;
    // METRO: stream index. Baseline: unicast leg index.
    int stream = 0;
    NodeId node;
    PortKind port = PortKind::Tile;
    Slot head = -1;
    Slot tail = -1;
    Slot flits = 0;
};

struct FlowRecord {
    FlowId flow_id = 0;
    Slot inject = -1;
    Slot head = -1;
    // Cycle the last tail flit of the flow was ejected anywhere.
    Slot tail = -1;
    Slot flits_injected = 0;
    Slot flits_ejected = 0;
};

struct SimResult {
    // Indexed by flow id.
    std::vector<FlowRecord> flows;
    std::vector<DeliveryRecord> deliveries;
    // Flits that crossed each channel, by channel index.
    std::vector<Slot> channel_flits;
    Slot makespan = 0;
    // Flit-cycles spent waiting for a buffer, a VC, or the switch.
    Slot blocked_flit_cycles = 0;
    // Baseline only, when a window is configured: link channels found blocked
    // at least once in each consecutive window.
    std::vector<std::vector<std::size_t>> blocked_windows;
    std::string trace;
};

// Cycle-level model of the scheduled fabric: single-flit input registers,
// head decode then table lookup, no arbitration. Throws RuntimeConflict when
// two streams meet on one port.
SimResult simulate_metro(const MeshTopology &mesh, const AcceleratorConfig &config, const InjectionSchedule &schedule,
                         bool trace = false);

struct BaselineParams {
    BaselineAlgorithm algorithm = BaselineAlgorithm::DOR;
    int vcs = 8;
    int vc_depth = 8;
    // Cycles from a flit's arrival until it may cross the switch.
    int router_delay = 4;
    int link_delay = 1;
    int credit_delay = 1;
    int packet_payload_flits = 8;
    // One header flit in front of every packet.
    bool header_flit = true;
    Slot deadlock_budget = 100000;
    std::uint64_t seed = 1;
    // Records blocked link channels per window of this many cycles when > 0.
    Slot blocked_window = 0;
    bool trace = false;

    void validate() const;
};

struct BaselinePacket {
    FlowId flow_id = 0;
    int leg = 0;
    NodeId src;
    NodeId dst;
    PortKind src_port = PortKind::Tile;
    PortKind dst_port = PortKind::Tile;
    Slot ready = 0;
    Slot flits = 0;
};

// Collectives become one unicast per (source, destination) pair, each carrying
// the whole volume, cut into packets.
std::vector<BaselinePacket> lower_to_packets(const MeshTopology &mesh, const CommunicationGraph &graph,
                                             const BaselineParams &params);

SimResult simulate_packets(const MeshTopology &mesh, std::span<const BaselinePacket> packets, std::size_t flow_count,
                           const BaselineParams &params);

SimResult simulate_baseline(const MeshTopology &mesh, const CommunicationGraph &graph, const BaselineParams &params);

struct LayerTiming {
    std::string name;
    int tiles = 0;
    Slot compute = 0;
    Slot stall = 0;
    Slot end = 0;
    // Transmission time over computation time for each iteration's data.
    double bounded_ratio = 0.0;
    Slot communication = 0;
};

struct TileReport {
    std::vector<LayerTiming> layers;
    double mean_bounded_ratio = 0.0;
    double max_bounded_ratio = 0.0;
    Slot total_compute = 0;
    Slot total_stall = 0;
    // Sum over flows of (arrival - ready).
    Slot communication = 0;
    Slot makespan = 0;
};

// `completion[f]` is the cycle flow f's last tail was ejected. Iteration i of
// a layer starts once iteration i-1 ended, its prefetched operands arrived,
// and the output buffer it reuses has been reduced away.
TileReport simulate_tiles(const WorkloadSpec &workload, const CommunicationGraph &graph,
                          std::span<const Slot> completion);

// Completion times with every flow arriving the moment it is ready.
std::vector<Slot> instant_arrivals(const CommunicationGraph &graph);

std::vector<Slot> completions(const SimResult &result);

}  // namespace slotnoc
