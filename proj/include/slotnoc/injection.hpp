// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

#pragma once

#include <span>
#include <string>
#include <vector>

#include "slotnoc/hw_config.hpp"
#include "slotnoc/routing.hpp"

namespace slotnoc {

// Half-open slot range [start, end) held by one stream.
struct Interval {
    Slot start = 0;
    Slot end = 0;
    FlowId flow_id = 0;
    int stream = 0;
};

struct Reservation {
    ChannelId channel;
    Interval slots;
};

class ReservationTimeline {
   public:
    ReservationTimeline() = default;
    explicit ReservationTimeline(const MeshTopology &mesh) : channels_(mesh.channel_space()) {}

    std::size_t channel_count() const { return channels_.size(); }
    const std::vector<Interval> &on(std::size_t channel) const { return channels_[channel]; }

    // Latest-ending interval on `channel` overlapping [start, end), or null.
    const Interval *find_conflict(std::size_t channel, Slot start, Slot end) const;

    // Inserts without checking; verify_schedule() reports any overlap.
    void add(std::size_t channel, const Interval &slots);
    // Throws RuntimeConflict on overlap.
    void reserve(std::size_t channel, const Interval &slots);

   private:
    std::vector<std::vector<Interval>> channels_;
};

// S_tr + S_ser for one flow: H * S_c + ceil(L / F).
Slot flow_latency(int hops, int slot_cost, Bits volume, Bits flit_bits);

struct FootprintEntry {
    ChannelId channel;
    std::size_t index = 0;
    // Slot the head crosses this channel, relative to injection.
    Slot offset = 0;
};

struct DeliveryOffset {
    NodeId node;
    PortKind port = PortKind::Tile;
    Slot offset = 0;
};

// Every channel a stream holds and when, relative to its injection slot.
// Each channel is held for `flits` consecutive slots.
struct StreamFootprint {
    std::vector<FootprintEntry> entries;
    std::vector<DeliveryOffset> deliveries;
    Slot flits = 0;

    // Slots from injection to the last tail ejection, inclusive of both.
    Slot latency() const;
};

StreamFootprint footprint(const MeshTopology &mesh, const Stream &stream, Slot flits);

std::vector<Reservation> occupancy(const StreamFootprint &fp, Slot inject_at, FlowId flow_id = 0, int stream = 0);

Slot earliest_feasible_injection(const StreamFootprint &fp, const ReservationTimeline &timeline, Slot ready);

struct DeliveryTiming {
    NodeId node;
    PortKind port = PortKind::Tile;
    Slot head = 0;
    Slot tail = 0;
};

struct ScheduledStream {
    FlowId flow_id = 0;
    int stream = 0;
    Slot inject = 0;
    Slot flits = 0;
    // Slot the last tail flit is ejected.
    Slot completion = 0;
    std::vector<DeliveryTiming> deliveries;
};

struct FlowTiming {
    FlowId flow_id = 0;
    Slot ready = 0;
    Slot deadline = 0;
    Slot inject = 0;
    Slot completion = 0;
    // Slots the data arrives after its deadline; zero when on time.
    Slot lateness = 0;
};

struct InjectionSchedule {
    std::vector<ScheduledStream> streams;
    // Indexed by flow id.
    std::vector<FlowTiming> flows;
    ReservationTimeline timeline;

    Slot makespan() const;
    Slot total_lateness() const;
};

// Scheduling input for one flow: its streams in dependency order and the
// flits each puts on the wire.
struct FlowJob {
    FlowId id = 0;
    Slot ready = 0;
    Slot deadline = 0;
    std::vector<Stream> streams;
    std::vector<Slot> flits;
};

// (deadline, ready, id) ascending.
std::vector<std::size_t> priority_order(std::span<const FlowJob> jobs);

// Greedy earliest-deadline-first reservation. `order` overrides the priority
// order when given (exhaustive search uses it). Flow ids must be dense.
InjectionSchedule schedule_jobs(const MeshTopology &mesh, std::span<const FlowJob> jobs,
                                std::span<const std::size_t> order = {});

InjectionSchedule schedule(const MeshTopology &mesh, const CommunicationGraph &graph, std::span<const RoutePlan> plans,
                           const AcceleratorConfig &config);

std::vector<FlowJob> make_jobs(const CommunicationGraph &graph, std::span<const RoutePlan> plans,
                               const AcceleratorConfig &config);

struct Conflict {
    ChannelId channel;
    Interval first;
    Interval second;
};

std::vector<Conflict> verify_schedule(const MeshTopology &mesh, const ReservationTimeline &timeline);

// Slot table: one row per stream, injection and completion, plus lateness.
std::string dump_schedule(const InjectionSchedule &schedule);

}  // namespace slotnoc
