// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slotnoc/routing.hpp"

namespace slotnoc {

// Bit strings are kept as '0'/'1' text, MSB first, which is also how they are
// dumped.
using BitString = std::string;

enum class RouteCode : std::uint8_t { Nop = 0, East = 1, South = 2, West = 3, North = 4, Output = 5 };

inline constexpr int kRouteCodeBits = 3;

std::string_view to_string(RouteCode c);
RouteCode route_code(Direction d);
BitString code_bits(RouteCode c);
bool is_direction(RouteCode c);
Direction direction_of(RouteCode c);

// Direction codes for every hop, then NOP. Table mode takes over at the last
// node.
BitString encode_source_route(std::span<const NodeId> path);
// Direction codes, Output, NOP: the stream leaves the network at the last node.
BitString encode_unicast_route(std::span<const NodeId> path);

struct DecodedPort {
    RouteCode code = RouteCode::Nop;
    BitString rest;
};

// Pops the leading 3-bit entry. Throws MalformedHeader for reserved codes or
// a field that is not a whole number of entries.
DecodedPort decode_next_port(std::string_view field);

// Direction sequence of a header; stops at the first NOP or Output.
std::vector<Direction> decode_directions(std::string_view field);

// One-hot output mask, MSB to LSB: Output, North, West, South, East.
inline constexpr std::uint8_t kOutputMask = 0b10000;
std::uint8_t one_hot(Direction d);
BitString mask_bits(std::uint8_t mask);

struct RoutingTableEntry {
    int table_id = 0;
    std::uint8_t mask = 0;

    friend bool operator==(const RoutingTableEntry &, const RoutingTableEntry &) = default;
};

std::map<NodeId, RoutingTableEntry> build_routing_tables(const SpanningTree &tree, int table_id);

enum class FramingKind : std::uint8_t { Chunk, Packet };
std::string_view to_string(FramingKind k);

struct FramingParams {
    FramingKind kind = FramingKind::Chunk;
    // Packet framing only: payload flits carried behind each header flit.
    int packet_payload_flits = 8;
    int table_id_bits = 2;
    int length_bits = 16;
    int max_table_entries = 3;
};

struct ChunkHeader {
    FlowId flow_id = 0;
    int table_id = 0;
    PortKind endpoint = PortKind::Tile;
    BitString route;
    // Payload flits behind the head.
    Slot length = 0;

    // table id | endpoint | length | route codes
    BitString bits(const FramingParams &framing) const;
    int width(const FramingParams &framing) const;
};

// Payload bits one flit can carry for this flow: the wire width, capped by
// the controller's injection rate when the flow leaves a memory port.
Bits flit_payload_bits(const TrafficFlow &flow, const MeshTopology &mesh);

Slot payload_flits(Bits volume, Bits flit_bits);
// Head plus payload, or a single head_tail flit when everything fits.
Slot chunk_flits(Bits volume, int header_bits, Bits flit_bits);
// Payload plus one header flit per packet.
Slot packet_flits(Slot payload, int packet_payload_flits);

// Throws HeaderOverflow when the header is wider than the wire or the length
// does not fit its field.
std::vector<Flit> serialize_chunk(const TrafficFlow &flow, const ChunkHeader &header, Bits wire_width,
                                  const FramingParams &framing = {}, Bits flit_bits = 0);

struct StreamConfig {
    FlowId flow_id = 0;
    int stream = 0;
    NodeId source;
    PortKind source_port = PortKind::Tile;
    ChunkHeader header;
    Slot flits = 0;
};

struct AcceleratorConfig {
    int wire_width = 0;
    int slot_cost = 1;
    FramingParams framing;
    std::map<NodeId, std::vector<RoutingTableEntry>> tables;
    std::map<std::pair<FlowId, int>, StreamConfig> streams;

    const StreamConfig &stream(FlowId flow, int index) const;
    std::uint8_t lookup(NodeId router, int table_id) const;
};

// Assigns table ids (identical trees share one), fills every router table,
// and builds one header per stream. Throws TableOverflow or HeaderOverflow.
AcceleratorConfig build_config(const MeshTopology &mesh, const CommunicationGraph &graph,
                               std::span<const RoutePlan> plans, const FramingParams &framing = {});

// Flits a stream occupies on the wire under the given framing.
Slot stream_flits(const MeshTopology &mesh, const TrafficFlow &flow, const Stream &stream,
                  const FramingParams &framing);

std::string dump_config(const AcceleratorConfig &config);

}  // namespace slotnoc
