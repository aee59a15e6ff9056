// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

#include "slotnoc/core_model.hpp"

#include <algorithm>
#include <cstdlib>

#include <fmt/format.h>

namespace slotnoc {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NonAdjacentHop: return "NonAdjacentHop";
        case ErrorKind::CapacityExceeded: return "CapacityExceeded";
        case ErrorKind::DanglingUpstream: return "DanglingUpstream";
        case ErrorKind::InvalidWorkload: return "InvalidWorkload";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::UnreachableTerminal: return "UnreachableTerminal";
        case ErrorKind::MalformedHeader: return "MalformedHeader";
        case ErrorKind::TableOverflow: return "TableOverflow";
        case ErrorKind::HeaderOverflow: return "HeaderOverflow";
        case ErrorKind::RuntimeConflict: return "RuntimeConflict";
        case ErrorKind::DeadlockDetected: return "DeadlockDetected";
        case ErrorKind::ZeroCompute: return "ZeroCompute";
    }
    return "Unknown";
}

std::string to_string(const NodeId &n) { return fmt::format("({},{})", n.x, n.y); }

Direction opposite(Direction d) {
    switch (d) {
        case Direction::East: return Direction::West;
        case Direction::South: return Direction::North;
        case Direction::West: return Direction::East;
        case Direction::North: return Direction::South;
    }
    return d;
}

std::string_view to_string(Direction d) {
    switch (d) {
        case Direction::East: return "E";
        case Direction::South: return "S";
        case Direction::West: return "W";
        case Direction::North: return "N";
    }
    return "?";
}

NodeId step(NodeId n, Direction d) {
    switch (d) {
        case Direction::East: return {n.x + 1, n.y};
        case Direction::South: return {n.x, n.y + 1};
        case Direction::West: return {n.x - 1, n.y};
        case Direction::North: return {n.x, n.y - 1};
    }
    return n;
}

std::string_view to_string(PortKind p) { return p == PortKind::Tile ? "tile" : "mem"; }

std::string to_string(const ChannelId &c) {
    switch (c.kind) {
        case ChannelKind::Link: return fmt::format("{}->{}", to_string(c.from), to_string(c.to));
        case ChannelKind::Inject: return fmt::format("inj:{}@{}", to_string(c.port), to_string(c.from));
        case ChannelKind::Eject: return fmt::format("ej:{}@{}", to_string(c.port), to_string(c.from));
    }
    return "?";
}

MeshTopology::MeshTopology(int width, int height, std::vector<NodeId> mc_nodes, int wire_width,
                           int channel_slot_cost, Bits memory_injection_bits)
    : width_(width),
      height_(height),
      wire_width_(wire_width),
      channel_slot_cost_(channel_slot_cost),
      memory_injection_bits_(memory_injection_bits),
      mc_nodes_(std::move(mc_nodes)) {
    if (width <= 0 || height <= 0) {
        throw Error(ErrorKind::InvalidWorkload, fmt::format("mesh {}x{} is empty", width, height));
    }
    if (wire_width <= 0) throw Error(ErrorKind::InvalidWorkload, "wire width must be positive");
    if (channel_slot_cost < 1) throw Error(ErrorKind::InvalidWorkload, "channel slot cost must be >= 1");
    if (memory_injection_bits <= 0) {
        throw Error(ErrorKind::InvalidWorkload, "memory injection bandwidth must be positive");
    }
    for (std::size_t i = 0; i < mc_nodes_.size(); ++i) {
        const NodeId n = mc_nodes_[i];
        if (!contains(n) || !on_boundary(n)) {
            throw Error(ErrorKind::InvalidWorkload,
                        fmt::format("memory controller {} is not on the mesh boundary", to_string(n)));
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (mc_nodes_[j] == n) {
                throw Error(ErrorKind::InvalidWorkload,
                            fmt::format("memory controller {} listed twice", to_string(n)));
            }
        }
    }
}

std::vector<NodeId> MeshTopology::edge_midpoint_controllers(int width, int height, int count) {
    std::vector<NodeId> out;
    auto push = [&](NodeId n) {
        if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
    };
    // top, bottom, left, right
    for (int edge = 0; edge < 4; ++edge) {
        const int k = count / 4 + (edge < count % 4 ? 1 : 0);
        const int len = edge < 2 ? width : height;
        const int start = std::max(0, (len - k) / 2);
        for (int i = 0; i < k && start + i < len; ++i) {
            const int p = start + i;
            switch (edge) {
                case 0: push({p, 0}); break;
                case 1: push({p, height - 1}); break;
                case 2: push({0, p}); break;
                case 3: push({width - 1, p}); break;
            }
        }
    }
    return out;
}

MeshTopology MeshTopology::with_wire_width(int wire_width) const {
    MeshTopology m = *this;
    if (wire_width <= 0) throw Error(ErrorKind::InvalidWorkload, "wire width must be positive");
    m.wire_width_ = wire_width;
    return m;
}

MeshTopology MeshTopology::with_channel_slot_cost(int slot_cost) const {
    MeshTopology m = *this;
    if (slot_cost < 1) throw Error(ErrorKind::InvalidWorkload, "channel slot cost must be >= 1");
    m.channel_slot_cost_ = slot_cost;
    return m;
}

bool MeshTopology::is_mc(NodeId n) const {
    return std::find(mc_nodes_.begin(), mc_nodes_.end(), n) != mc_nodes_.end();
}

bool MeshTopology::on_boundary(NodeId n) const {
    return n.x == 0 || n.y == 0 || n.x == width_ - 1 || n.y == height_ - 1;
}

std::optional<NodeId> MeshTopology::neighbor(NodeId n, Direction d) const {
    const NodeId m = step(n, d);
    if (!contains(m)) return std::nullopt;
    return m;
}

std::size_t MeshTopology::channel_index(const ChannelId &c) const {
    const std::size_t base = node_index(c.from) * kChannelsPerNode;
    switch (c.kind) {
        case ChannelKind::Link: return base + static_cast<std::size_t>(direction_between(c.from, c.to));
        case ChannelKind::Inject: return base + (c.port == PortKind::Tile ? 4 : 6);
        case ChannelKind::Eject: return base + (c.port == PortKind::Tile ? 5 : 7);
    }
    return base;
}

ChannelId MeshTopology::channel_at(std::size_t index) const {
    const NodeId n = node_at(index / kChannelsPerNode);
    const std::size_t slot = index % kChannelsPerNode;
    if (slot < 4) return ChannelId::link(n, step(n, static_cast<Direction>(slot)));
    switch (slot) {
        case 4: return ChannelId::inject(n, PortKind::Tile);
        case 5: return ChannelId::eject(n, PortKind::Tile);
        case 6: return ChannelId::inject(n, PortKind::Memory);
        default: return ChannelId::eject(n, PortKind::Memory);
    }
}

bool MeshTopology::channel_exists(const ChannelId &c) const {
    if (!contains(c.from)) return false;
    switch (c.kind) {
        case ChannelKind::Link: return contains(c.to) && adjacent(c.from, c.to);
        case ChannelKind::Inject:
        case ChannelKind::Eject: return c.from == c.to && (c.port == PortKind::Tile || is_mc(c.from));
    }
    return false;
}

std::vector<ChannelId> MeshTopology::channels() const {
    std::vector<ChannelId> out;
    for (std::size_t i = 0; i < channel_space(); ++i) {
        const NodeId n = node_at(i / kChannelsPerNode);
        const std::size_t slot = i % kChannelsPerNode;
        if (slot < 4 && !contains(step(n, static_cast<Direction>(slot)))) continue;
        const ChannelId c = channel_at(i);
        if (channel_exists(c)) out.push_back(c);
    }
    return out;
}

std::size_t MeshTopology::link_count() const {
    return 2 * (2 * static_cast<std::size_t>(width_) * height_ - width_ - height_);
}

std::string_view to_string(PatternKind k) {
    switch (k) {
        case PatternKind::Multicast: return "Multicast";
        case PatternKind::Reduce: return "Reduce";
        case PatternKind::LinkTransfer: return "LinkTransfer";
        case PatternKind::Unicast: return "Unicast";
    }
    return "?";
}

void validate_flow(const TrafficFlow &flow, const MeshTopology &mesh) {
    auto fail = [&](const std::string &why) {
        throw Error(ErrorKind::InvalidWorkload, fmt::format("flow {}: {}", flow.id, why));
    };
    if (flow.sources.empty() || flow.destinations.empty()) fail("needs at least one source and destination");
    if (flow.volume <= 0) fail("volume must be positive");
    if (flow.ready_time > flow.qos_deadline) fail("ready time after QoS deadline");
    switch (flow.kind) {
        case PatternKind::Multicast:
            if (flow.sources.size() != 1) fail("multicast needs exactly one source");
            break;
        case PatternKind::Reduce:
            if (flow.destinations.size() != 1) fail("reduce needs exactly one destination");
            break;
        case PatternKind::LinkTransfer:
        case PatternKind::Unicast:
            if (flow.sources.size() != 1 || flow.destinations.size() != 1) fail("one-to-one flow arity");
            break;
    }
    for (const NodeId &n : flow.sources) {
        if (!mesh.contains(n)) fail("source outside mesh");
    }
    for (const NodeId &n : flow.destinations) {
        if (!mesh.contains(n)) fail("destination outside mesh");
    }
    if (flow.source_port == PortKind::Memory && !mesh.is_mc(flow.source())) fail("memory source is not a controller");
    if (flow.destination_port == PortKind::Memory && !mesh.is_mc(flow.destination())) {
        fail("memory destination is not a controller");
    }
}

std::string_view to_string(FlitRole r) {
    switch (r) {
        case FlitRole::Head: return "head";
        case FlitRole::Body: return "body";
        case FlitRole::Tail: return "tail";
        case FlitRole::HeadTail: return "head_tail";
    }
    return "?";
}

int manhattan(NodeId a, NodeId b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

bool adjacent(NodeId a, NodeId b) { return manhattan(a, b) == 1; }

Direction direction_between(NodeId a, NodeId b) {
    if (!adjacent(a, b)) {
        throw Error(ErrorKind::NonAdjacentHop, fmt::format("{} -> {}", to_string(a), to_string(b)));
    }
    if (b.x == a.x + 1) return Direction::East;
    if (b.x == a.x - 1) return Direction::West;
    if (b.y == a.y + 1) return Direction::South;
    return Direction::North;
}

std::vector<ChannelId> channels_of_path(std::span<const NodeId> path) {
    std::vector<ChannelId> out;
    if (path.size() < 2) return out;
    out.reserve(path.size() - 1);
    for (std::size_t i = 1; i < path.size(); ++i) {
        direction_between(path[i - 1], path[i]);
        out.push_back(ChannelId::link(path[i - 1], path[i]));
    }
    return out;
}

std::int64_t flit_count(Bits volume, Bits wire_width) { return (volume + wire_width - 1) / wire_width; }

}  // namespace slotnoc
