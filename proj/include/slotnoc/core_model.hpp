// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slotnoc/error.hpp"

namespace slotnoc {

// One slot is the time a single flit needs to cross one channel stage. The
// simulators use the same unit as their cycle.
using Slot = std::int64_t;
using FlowId = std::uint32_t;
using Bits = std::int64_t;

// Mesh coordinate. x grows East, y grows South; R(0,0) is the north-west
// corner. Ordering is row-major (y first, then x) which is also the project
// wide tie-break order.
struct NodeId {
    int x = 0;
    int y = 0;

    friend bool operator==(const NodeId &, const NodeId &) = default;
    friend std::strong_ordering operator<=>(const NodeId &a, const NodeId &b) {
        if (auto c = a.y <=> b.y; c != 0) return c;
        return a.x <=> b.x;
    }
};

std::string to_string(const NodeId &n);

enum class Direction : std::uint8_t { East = 0, South = 1, West = 2, North = 3 };
inline constexpr Direction kAllDirections[] = {
    Direction::East, Direction::South, Direction::West, Direction::North};

Direction opposite(Direction d);
std::string_view to_string(Direction d);
NodeId step(NodeId n, Direction d);

// Local attachment point of a router: the compute tile, or the memory
// controller hanging off a boundary router.
enum class PortKind : std::uint8_t { Tile = 0, Memory = 1 };
std::string_view to_string(PortKind p);

enum class ChannelKind : std::uint8_t { Link = 0, Inject = 1, Eject = 2 };

// Directed channel. For local ports `from == to` and `kind` says which way
// the data crosses the router boundary.
struct ChannelId {
    NodeId from;
    NodeId to;
    ChannelKind kind = ChannelKind::Link;
    PortKind port = PortKind::Tile;

    friend bool operator==(const ChannelId &, const ChannelId &) = default;
    friend auto operator<=>(const ChannelId &, const ChannelId &) = default;

    static ChannelId link(NodeId from, NodeId to) { return {from, to, ChannelKind::Link, PortKind::Tile}; }
    static ChannelId inject(NodeId n, PortKind p) { return {n, n, ChannelKind::Inject, p}; }
    static ChannelId eject(NodeId n, PortKind p) { return {n, n, ChannelKind::Eject, p}; }
};

std::string to_string(const ChannelId &c);

class MeshTopology {
   public:
    // Per-node channel slots in the dense channel index space.
    static constexpr std::size_t kChannelsPerNode = 8;
    // 150 GB/s per controller at 1 GHz.
    static constexpr Bits kDefaultMemoryInjectionBits = 1200;

    MeshTopology() = default;
    MeshTopology(int width, int height, std::vector<NodeId> mc_nodes, int wire_width,
                 int channel_slot_cost = 1, Bits memory_injection_bits = kDefaultMemoryInjectionBits);

    // `count` controllers spread evenly over the middles of the four edges
    // (two per edge for the usual count of 8).
    static std::vector<NodeId> edge_midpoint_controllers(int width, int height, int count = 8);

    int width() const { return width_; }
    int height() const { return height_; }
    int node_count() const { return width_ * height_; }
    int wire_width() const { return wire_width_; }
    int channel_slot_cost() const { return channel_slot_cost_; }
    Bits memory_injection_bits() const { return memory_injection_bits_; }
    const std::vector<NodeId> &mc_nodes() const { return mc_nodes_; }

    MeshTopology with_wire_width(int wire_width) const;
    MeshTopology with_channel_slot_cost(int slot_cost) const;

    bool contains(NodeId n) const { return n.x >= 0 && n.y >= 0 && n.x < width_ && n.y < height_; }
    bool is_mc(NodeId n) const;
    bool on_boundary(NodeId n) const;
    std::optional<NodeId> neighbor(NodeId n, Direction d) const;

    std::size_t node_index(NodeId n) const { return static_cast<std::size_t>(n.y) * width_ + n.x; }
    NodeId node_at(std::size_t index) const {
        return {static_cast<int>(index % width_), static_cast<int>(index / width_)};
    }

    // Dense index space covering every possible channel (holes at the mesh
    // boundary and at non-controller memory ports).
    std::size_t channel_space() const { return static_cast<std::size_t>(node_count()) * kChannelsPerNode; }
    std::size_t channel_index(const ChannelId &c) const;
    ChannelId channel_at(std::size_t index) const;
    bool channel_exists(const ChannelId &c) const;

    std::vector<ChannelId> channels() const;
    std::size_t link_count() const;

   private:
    int width_ = 0;
    int height_ = 0;
    int wire_width_ = 256;
    int channel_slot_cost_ = 1;
    Bits memory_injection_bits_ = kDefaultMemoryInjectionBits;
    std::vector<NodeId> mc_nodes_;
};

enum class PatternKind : std::uint8_t { Multicast, Reduce, LinkTransfer, Unicast };
std::string_view to_string(PatternKind k);

struct TrafficFlow {
    FlowId id = 0;
    PatternKind kind = PatternKind::Unicast;
    Bits volume = 0;
    std::vector<NodeId> sources;
    std::vector<NodeId> destinations;
    PortKind source_port = PortKind::Tile;
    PortKind destination_port = PortKind::Tile;
    Slot ready_time = 0;
    Slot qos_deadline = 0;

    NodeId source() const { return sources.front(); }
    NodeId destination() const { return destinations.front(); }
};

// Throws InvalidWorkload when the pattern arity or timing invariants fail.
void validate_flow(const TrafficFlow &flow, const MeshTopology &mesh);

enum class FlitRole : std::uint8_t { Head, Body, Tail, HeadTail };
std::string_view to_string(FlitRole r);

struct Flit {
    FlowId flow_id = 0;
    int sequence = 0;
    FlitRole role = FlitRole::Body;
    int payload_bits = 0;
};

int manhattan(NodeId a, NodeId b);
bool adjacent(NodeId a, NodeId b);

// Direction of the single hop a -> b; throws NonAdjacentHop otherwise.
Direction direction_between(NodeId a, NodeId b);

std::vector<ChannelId> channels_of_path(std::span<const NodeId> path);

std::int64_t flit_count(Bits volume, Bits wire_width);

}  // namespace slotnoc
