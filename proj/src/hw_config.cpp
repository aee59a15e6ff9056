// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

#include "slotnoc/hw_config.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

namespace slotnoc {

namespace {

BitString to_bits(std::uint64_t value, int width) {
    BitString out(static_cast<std::size_t>(width), '0');
    for (int i = 0; i < width; ++i) {
        if ((value >> i) & 1U) out[static_cast<std::size_t>(width - 1 - i)] = '1';
    }
    return out;
}

BitString direction_codes(std::span<const NodeId> path) {
    BitString out;
    for (std::size_t i = 1; i < path.size(); ++i) out += code_bits(route_code(direction_between(path[i - 1], path[i])));
    return out;
}

}  // namespace

std::string_view to_string(RouteCode c) {
    switch (c) {
        case RouteCode::Nop: return "NOP";
        case RouteCode::East: return "E";
        case RouteCode::South: return "S";
        case RouteCode::West: return "W";
        case RouteCode::North: return "N";
        case RouteCode::Output: return "OUT";
    }
    return "?";
}

RouteCode route_code(Direction d) {
    switch (d) {
        case Direction::East: return RouteCode::East;
        case Direction::South: return RouteCode::South;
        case Direction::West: return RouteCode::West;
        case Direction::North: return RouteCode::North;
    }
    return RouteCode::Nop;
}

BitString code_bits(RouteCode c) { return to_bits(static_cast<std::uint64_t>(c), kRouteCodeBits); }

bool is_direction(RouteCode c) { return c != RouteCode::Nop && c != RouteCode::Output; }

Direction direction_of(RouteCode c) {
    switch (c) {
        case RouteCode::East: return Direction::East;
        case RouteCode::South: return Direction::South;
        case RouteCode::West: return Direction::West;
        case RouteCode::North: return Direction::North;
        default: break;
    }
    throw Error(ErrorKind::MalformedHeader, fmt::format("{} is not a direction", to_string(c)));
}

BitString encode_source_route(std::span<const NodeId> path) { return direction_codes(path) + code_bits(RouteCode::Nop); }

BitString encode_unicast_route(std::span<const NodeId> path) {
    return direction_codes(path) + code_bits(RouteCode::Output) + code_bits(RouteCode::Nop);
}

DecodedPort decode_next_port(std::string_view field) {
    if (field.size() < kRouteCodeBits || field.size() % kRouteCodeBits != 0) {
        throw Error(ErrorKind::MalformedHeader, fmt::format("route field of {} bits", field.size()));
    }
    unsigned value = 0;
    for (int i = 0; i < kRouteCodeBits; ++i) {
        const char b = field[static_cast<std::size_t>(i)];
        if (b != '0' && b != '1') throw Error(ErrorKind::MalformedHeader, "route field is not binary");
        value = value * 2 + static_cast<unsigned>(b - '0');
    }
    if (value > static_cast<unsigned>(RouteCode::Output)) {
        throw Error(ErrorKind::MalformedHeader, fmt::format("reserved route code {}", field.substr(0, kRouteCodeBits)));
    }
    return {static_cast<RouteCode>(value), BitString(field.substr(kRouteCodeBits))};
}

std::vector<Direction> decode_directions(std::string_view field) {
    std::vector<Direction> out;
    BitString rest(field);
    while (!rest.empty()) {
        DecodedPort p = decode_next_port(rest);
        if (!is_direction(p.code)) break;
        out.push_back(direction_of(p.code));
        rest = std::move(p.rest);
    }
    return out;
}

std::uint8_t one_hot(Direction d) {
    switch (d) {
        case Direction::East: return 0b00001;
        case Direction::South: return 0b00010;
        case Direction::West: return 0b00100;
        case Direction::North: return 0b01000;
    }
    return 0;
}

BitString mask_bits(std::uint8_t mask) { return to_bits(mask, 5); }

std::map<NodeId, RoutingTableEntry> build_routing_tables(const SpanningTree &tree, int table_id) {
    std::map<NodeId, RoutingTableEntry> out;
    for (const auto &[n, depth] : tree.depth) {
        std::uint8_t mask = tree.is_terminal(n) ? kOutputMask : 0;
        if (auto it = tree.children.find(n); it != tree.children.end()) {
            for (Direction d : it->second) mask |= one_hot(d);
        }
        if (mask != 0) out[n] = {table_id, mask};
    }
    return out;
}

std::string_view to_string(FramingKind k) { return k == FramingKind::Chunk ? "chunk" : "packet"; }

BitString ChunkHeader::bits(const FramingParams &framing) const {
    return to_bits(static_cast<std::uint64_t>(table_id), framing.table_id_bits) +
           (endpoint == PortKind::Memory ? "1" : "0") + to_bits(static_cast<std::uint64_t>(length), framing.length_bits) +
           route;
}

int ChunkHeader::width(const FramingParams &framing) const {
    return framing.table_id_bits + 1 + framing.length_bits + static_cast<int>(route.size());
}

Bits flit_payload_bits(const TrafficFlow &flow, const MeshTopology &mesh) {
    Bits width = mesh.wire_width();
    if (flow.source_port == PortKind::Memory) width = std::min(width, mesh.memory_injection_bits());
    return width;
}

Slot payload_flits(Bits volume, Bits flit_bits) { return flit_count(volume, flit_bits); }

Slot chunk_flits(Bits volume, int header_bits, Bits flit_bits) {
    if (volume + header_bits <= flit_bits) return 1;
    return 1 + payload_flits(volume, flit_bits);
}

Slot packet_flits(Slot payload, int packet_payload_flits) {
    return payload + (payload + packet_payload_flits - 1) / packet_payload_flits;
}

std::vector<Flit> serialize_chunk(const TrafficFlow &flow, const ChunkHeader &header, Bits wire_width,
                                  const FramingParams &framing, Bits flit_bits) {
    if (flow.volume <= 0) throw Error(ErrorKind::InvalidWorkload, "chunk with no payload");
    if (flit_bits <= 0) flit_bits = wire_width;
    const int hbits = header.width(framing);
    if (hbits > wire_width) {
        throw Error(ErrorKind::HeaderOverflow,
                    fmt::format("flow {} header needs {} bits, wire has {}", flow.id, hbits, wire_width));
    }
    if (flow.volume + hbits <= flit_bits) {
        return {Flit{flow.id, 0, FlitRole::HeadTail, static_cast<int>(flow.volume)}};
    }
    const Slot body = payload_flits(flow.volume, flit_bits);
    if (body >= (Slot{1} << framing.length_bits)) {
        throw Error(ErrorKind::HeaderOverflow, fmt::format("flow {} length {} overflows the length field", flow.id, body));
    }
    std::vector<Flit> out;
    out.reserve(static_cast<std::size_t>(body + 1));
    out.push_back({flow.id, 0, FlitRole::Head, 0});
    Bits left = flow.volume;
    for (Slot i = 0; i < body; ++i) {
        const Bits carried = std::min(left, flit_bits);
        left -= carried;
        out.push_back({flow.id, static_cast<int>(i + 1), i + 1 == body ? FlitRole::Tail : FlitRole::Body,
                       static_cast<int>(carried)});
    }
    return out;
}

const StreamConfig &AcceleratorConfig::stream(FlowId flow, int index) const {
    auto it = streams.find({flow, index});
    if (it == streams.end()) {
        throw Error(ErrorKind::RuntimeConflict, fmt::format("no configuration for stream {}.{}", flow, index));
    }
    return it->second;
}

std::uint8_t AcceleratorConfig::lookup(NodeId router, int table_id) const {
    if (auto it = tables.find(router); it != tables.end()) {
        for (const RoutingTableEntry &e : it->second) {
            if (e.table_id == table_id) return e.mask;
        }
    }
    return 0;
}

Slot stream_flits(const MeshTopology &mesh, const TrafficFlow &flow, const Stream &stream,
                  const FramingParams &framing) {
    const Bits w = flit_payload_bits(flow, mesh);
    if (framing.kind == FramingKind::Packet) {
        return packet_flits(payload_flits(flow.volume, w), framing.packet_payload_flits);
    }
    const BitString route = stream.tree ? encode_source_route(stream.path) : encode_unicast_route(stream.path);
    const int header = framing.table_id_bits + 1 + framing.length_bits + static_cast<int>(route.size());
    return chunk_flits(flow.volume, header, w);
}

AcceleratorConfig build_config(const MeshTopology &mesh, const CommunicationGraph &graph,
                               std::span<const RoutePlan> plans, const FramingParams &framing) {
    AcceleratorConfig config;
    config.wire_width = mesh.wire_width();
    config.slot_cost = mesh.channel_slot_cost();
    config.framing = framing;

    using TreeKey = std::pair<NodeId, std::vector<NodeId>>;
    std::map<TreeKey, int> tree_ids;
    std::map<NodeId, std::set<int>> used;
    const int id_limit = 1 << framing.table_id_bits;

    auto assign_tree = [&](const SpanningTree &tree) {
        const TreeKey key{tree.root, tree.terminals};
        if (auto it = tree_ids.find(key); it != tree_ids.end()) return it->second;
        const std::map<NodeId, RoutingTableEntry> masks = build_routing_tables(tree, 0);
        int id = 0;
        for (; id < id_limit; ++id) {
            const bool clash = std::any_of(masks.begin(), masks.end(), [&](const auto &kv) {
                auto u = used.find(kv.first);
                return u != used.end() && u->second.contains(id);
            });
            if (!clash) break;
        }
        if (id == id_limit) {
            throw Error(ErrorKind::TableOverflow,
                        fmt::format("no free {}-bit table id for the tree rooted at {}", framing.table_id_bits,
                                    to_string(tree.root)));
        }
        for (const auto &[n, entry] : masks) {
            std::vector<RoutingTableEntry> &table = config.tables[n];
            if (static_cast<int>(table.size()) >= framing.max_table_entries) {
                throw Error(ErrorKind::TableOverflow,
                            fmt::format("router {} needs more than {} table entries", to_string(n),
                                        framing.max_table_entries));
            }
            table.push_back({id, entry.mask});
            used[n].insert(id);
        }
        tree_ids.emplace(key, id);
        return id;
    };

    for (const RoutePlan &plan : plans) {
        const TrafficFlow &flow = graph.flows.at(plan.flow_id);
        for (const Stream &s : plan.streams) {
            StreamConfig sc;
            sc.flow_id = flow.id;
            sc.stream = s.index;
            sc.source = s.source();
            sc.source_port = s.source_port;
            sc.header.flow_id = flow.id;
            sc.header.endpoint = s.destination_port;
            sc.header.route = s.tree ? encode_source_route(s.path) : encode_unicast_route(s.path);
            if (s.tree) sc.header.table_id = assign_tree(*s.tree);
            sc.flits = stream_flits(mesh, flow, s, framing);
            sc.header.length = framing.kind == FramingKind::Chunk && sc.flits > 1 ? sc.flits - 1 : 0;
            const int hbits = sc.header.width(framing);
            if (hbits > mesh.wire_width()) {
                throw Error(ErrorKind::HeaderOverflow, fmt::format("flow {} header needs {} bits, wire has {}",
                                                                   flow.id, hbits, mesh.wire_width()));
            }
            if (sc.header.length >= (Slot{1} << framing.length_bits)) {
                throw Error(ErrorKind::HeaderOverflow,
                            fmt::format("flow {} length {} overflows the length field", flow.id, sc.header.length));
            }
            config.streams.emplace(std::make_pair(flow.id, s.index), std::move(sc));
        }
    }
    for (auto &[n, table] : config.tables) {
        std::sort(table.begin(), table.end(),
                  [](const RoutingTableEntry &a, const RoutingTableEntry &b) { return a.table_id < b.table_id; });
    }
    return config;
}

std::string dump_config(const AcceleratorConfig &config) {
    std::string out = "# slotnoc router configuration v1\n";
    out += fmt::format("wire_width {}\nslot_cost {}\nframing {}\n", config.wire_width, config.slot_cost,
                       to_string(config.framing.kind));
    for (const auto &[n, table] : config.tables) {
        out += fmt::format("router {} {}", n.x, n.y);
        for (const RoutingTableEntry &e : table) {
            out += fmt::format(" {}:{}", to_bits(static_cast<std::uint64_t>(e.table_id), config.framing.table_id_bits),
                               mask_bits(e.mask));
        }
        out += '\n';
    }
    for (const auto &[key, sc] : config.streams) {
        out += fmt::format("stream {} {} flits {} header {}\n", key.first, key.second, sc.flits,
                           sc.header.bits(config.framing));
    }
    return out;
}

}  // namespace slotnoc
