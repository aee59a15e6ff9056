// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "slotnoc/core_model.hpp"
#include "slotnoc/traffic.hpp"

namespace slotnoc {

// Accumulated flit-slots per channel, indexed by MeshTopology::channel_index.
class ChannelLoads {
   public:
    ChannelLoads() = default;
    explicit ChannelLoads(const MeshTopology &mesh) : loads_(mesh.channel_space(), 0) {}

    Slot at(std::size_t channel) const { return loads_[channel]; }
    void add(std::size_t channel, Slot amount) { loads_[channel] += amount; }
    std::size_t size() const { return loads_.size(); }
    bool empty() const { return loads_.empty(); }
    Slot max() const;

   private:
    std::vector<Slot> loads_;
};

// Multicast tree rooted at a hub. Only nodes on some terminal-to-root path
// are kept.
struct SpanningTree {
    NodeId root;
    std::vector<NodeId> terminals;
    std::map<NodeId, NodeId> parent;
    std::map<NodeId, int> depth;
    std::map<NodeId, std::vector<Direction>> children;

    bool contains(NodeId n) const { return depth.contains(n); }
    bool is_terminal(NodeId n) const;
    int max_depth() const;
    std::size_t edge_count() const { return parent.size(); }
    // Nodes in non-decreasing depth order, root first.
    std::vector<NodeId> nodes_by_depth() const;
    // n, parent(n), ..., root
    std::vector<NodeId> path_to_root(NodeId n) const;
    std::vector<ChannelId> edges() const;

    static SpanningTree single(NodeId n);
};

enum class FitnessKind : std::uint8_t { MaxLoad, SumLoad };

struct EaParams {
    int population_size = 64;
    int generations = 100;
    double mutation_rate = 0.1;
    int max_intermediate_nodes = 2;
    std::uint64_t rng_seed = 1;
    FitnessKind fitness = FitnessKind::MaxLoad;

    void validate() const;
};

struct RoutingOptions {
    bool dual_phase = true;
    bool use_ea = true;
    EaParams ea;
};

// One wormhole transfer: a source-routed leg, optionally followed by a
// table-driven broadcast over `tree` (rooted at path.back()).
struct Stream {
    FlowId flow_id = 0;
    int index = 0;
    std::vector<NodeId> path;
    std::optional<SpanningTree> tree;
    PortKind source_port = PortKind::Tile;
    PortKind destination_port = PortKind::Tile;
    // The stream may only start once every earlier stream of its flow has
    // delivered (reduce hub -> destination leg).
    bool after_previous = false;

    NodeId source() const { return path.front(); }
    int hops() const { return static_cast<int>(path.size()) - 1; }
    // Every node that consumes the data, with its hop depth from the source.
    std::vector<std::pair<NodeId, int>> deliveries() const;
};

struct RoutePlan {
    FlowId flow_id = 0;
    PatternKind kind = PatternKind::Unicast;
    NodeId hub;
    bool dual_phase = false;
    // terminal -> hub for Multicast, hub -> destination for Reduce, whole
    // path for one-to-one flows.
    std::vector<NodeId> phase1_path;
    SpanningTree phase2_tree;
    std::vector<Stream> streams;
    std::map<ChannelId, Slot> total_channel_loads;
};

NodeId select_hub(const TrafficFlow &flow);

std::vector<NodeId> xy_route(NodeId src, NodeId dst);
std::vector<NodeId> yx_route(NodeId src, NodeId dst);
std::vector<NodeId> expand_intermediates(NodeId src, NodeId dst, std::span<const NodeId> intermediates);
// Drops every cycle so each node appears at most once; adjacency is kept.
std::vector<NodeId> loop_erase(std::span<const NodeId> path);

std::vector<NodeId> ea_route(const MeshTopology &mesh, NodeId src, NodeId dst, const ChannelLoads &existing,
                             Slot flits, const EaParams &params, std::uint64_t stream_key);
std::vector<NodeId> ea_route_phase1(const MeshTopology &mesh, const TrafficFlow &flow, NodeId hub,
                                    const ChannelLoads &existing, Slot flits, const EaParams &params);

SpanningTree bfs_spanning_tree(const MeshTopology &mesh, NodeId hub, std::span<const NodeId> terminals);

double hop_savings(double mean_terminal_hops, double mean_region_hops, int terminal_count);

// Exact per-instance savings: sum of unicast hops minus (terminal->hub hops
// plus every terminal's tree depth).
long exact_hop_savings(NodeId terminal, NodeId hub, std::span<const NodeId> group, const SpanningTree &tree);

enum class BaselineAlgorithm : std::uint8_t { DOR, XYYX, ROMM, MAD };
std::string_view to_string(BaselineAlgorithm a);

// Static path of DOR/XYYX/ROMM. MAD adapts per hop inside the simulator and
// has no static path (std::invalid_argument).
std::vector<NodeId> baseline_path(BaselineAlgorithm alg, NodeId src, NodeId dst, std::mt19937_64 &rng,
                                  Slot inject_slot);

// Flit-slots a flow contributes to each channel it touches.
Slot flow_flits(const TrafficFlow &flow, const MeshTopology &mesh);

RoutePlan route_flow(const MeshTopology &mesh, const TrafficFlow &flow, ChannelLoads &loads,
                     const RoutingOptions &options);

// Routes flows one at a time in graph order (ready time), accumulating loads.
std::vector<RoutePlan> route_all(const MeshTopology &mesh, const CommunicationGraph &graph,
                                 const RoutingOptions &options);

}  // namespace slotnoc
