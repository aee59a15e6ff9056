// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

#include "slotnoc/injection.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

namespace slotnoc {

const Interval *ReservationTimeline::find_conflict(std::size_t channel, Slot start, Slot end) const {
    const std::vector<Interval> &list = channels_[channel];
    // Intervals are sorted by start and never overlap once reserved, so only
    // the ones starting before `end` can matter; walk back from there.
    auto it = std::lower_bound(list.begin(), list.end(), end,
                               [](const Interval &iv, Slot s) { return iv.start < s; });
    const Interval *hit = nullptr;
    while (it != list.begin()) {
        --it;
        if (it->end > start) {
            if (hit == nullptr || it->end > hit->end) hit = &*it;
        } else {
            break;
        }
    }
    return hit;
}

void ReservationTimeline::add(std::size_t channel, const Interval &slots) {
    std::vector<Interval> &list = channels_[channel];
    auto it = std::upper_bound(list.begin(), list.end(), slots.start,
                               [](Slot s, const Interval &iv) { return s < iv.start; });
    list.insert(it, slots);
}

void ReservationTimeline::reserve(std::size_t channel, const Interval &slots) {
    if (const Interval *c = find_conflict(channel, slots.start, slots.end)) {
        throw Error(ErrorKind::RuntimeConflict,
                    fmt::format("flow {} slots [{},{}) collide with flow {} [{},{})", slots.flow_id, slots.start,
                                slots.end, c->flow_id, c->start, c->end));
    }
    add(channel, slots);
}

Slot flow_latency(int hops, int slot_cost, Bits volume, Bits flit_bits) {
    return static_cast<Slot>(hops) * slot_cost + flit_count(volume, flit_bits);
}

Slot StreamFootprint::latency() const {
    Slot last = 0;
    for (const DeliveryOffset &d : deliveries) last = std::max(last, d.offset);
    return last + flits;
}

StreamFootprint footprint(const MeshTopology &mesh, const Stream &stream, Slot flits) {
    const Slot sc = mesh.channel_slot_cost();
    const Slot arrive = static_cast<Slot>(stream.hops()) * sc;
    StreamFootprint fp;
    fp.flits = flits;
    auto add = [&](const ChannelId &c, Slot offset) { fp.entries.push_back({c, mesh.channel_index(c), offset}); };

    add(ChannelId::inject(stream.source(), stream.source_port), 0);
    for (int h = 1; h <= stream.hops(); ++h) add(ChannelId::link(stream.path[h - 1], stream.path[h]), (h - 1) * sc);
    if (stream.tree) {
        const SpanningTree &tree = *stream.tree;
        // Branches fork in the same slot: a flit leaves on every child link
        // of a node at once.
        for (NodeId n : tree.nodes_by_depth()) {
            if (n == tree.root) continue;
            const NodeId p = tree.parent.at(n);
            add(ChannelId::link(p, n), arrive + tree.depth.at(p) * sc);
        }
        for (const NodeId &t : tree.terminals) {
            const Slot off = arrive + tree.depth.at(t) * sc;
            add(ChannelId::eject(t, stream.destination_port), off);
            fp.deliveries.push_back({t, stream.destination_port, off});
        }
    } else {
        add(ChannelId::eject(stream.path.back(), stream.destination_port), arrive);
        fp.deliveries.push_back({stream.path.back(), stream.destination_port, arrive});
    }
    return fp;
}

std::vector<Reservation> occupancy(const StreamFootprint &fp, Slot inject_at, FlowId flow_id, int stream) {
    std::vector<Reservation> out;
    out.reserve(fp.entries.size());
    for (const FootprintEntry &e : fp.entries) {
        out.push_back({e.channel, {inject_at + e.offset, inject_at + e.offset + fp.flits, flow_id, stream}});
    }
    return out;
}

Slot earliest_feasible_injection(const StreamFootprint &fp, const ReservationTimeline &timeline, Slot ready) {
    Slot t = ready;
    bool moved = true;
    while (moved) {
        moved = false;
        for (const FootprintEntry &e : fp.entries) {
            const Slot start = t + e.offset;
            if (const Interval *c = timeline.find_conflict(e.index, start, start + fp.flits)) {
                t = c->end - e.offset;
                moved = true;
            }
        }
    }
    return t;
}

Slot InjectionSchedule::makespan() const {
    Slot out = 0;
    for (const FlowTiming &f : flows) out = std::max(out, f.completion + 1);
    return out;
}

Slot InjectionSchedule::total_lateness() const {
    return std::accumulate(flows.begin(), flows.end(), Slot{0},
                           [](Slot acc, const FlowTiming &f) { return acc + f.lateness; });
}

std::vector<std::size_t> priority_order(std::span<const FlowJob> jobs) {
    std::vector<std::size_t> order(jobs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const FlowJob &x = jobs[a];
        const FlowJob &y = jobs[b];
        return std::tie(x.deadline, x.ready, x.id) < std::tie(y.deadline, y.ready, y.id);
    });
    return order;
}

InjectionSchedule schedule_jobs(const MeshTopology &mesh, std::span<const FlowJob> jobs,
                                std::span<const std::size_t> order) {
    std::vector<std::size_t> default_order;
    if (order.empty()) {
        default_order = priority_order(jobs);
        order = default_order;
    }
    InjectionSchedule out;
    out.timeline = ReservationTimeline(mesh);
    FlowId max_id = 0;
    for (const FlowJob &j : jobs) max_id = std::max(max_id, j.id);
    out.flows.resize(jobs.empty() ? 0 : max_id + 1);

    for (std::size_t idx : order) {
        const FlowJob &job = jobs[idx];
        FlowTiming timing{job.id, job.ready, job.deadline, 0, job.ready - 1, 0};
        bool first = true;
        Slot gate = job.ready;
        for (std::size_t s = 0; s < job.streams.size(); ++s) {
            const Stream &stream = job.streams[s];
            const StreamFootprint fp = footprint(mesh, stream, job.flits[s]);
            const Slot ready = stream.after_previous ? std::max(job.ready, timing.completion + 1) : gate;
            const Slot t = earliest_feasible_injection(fp, out.timeline, ready);
            for (const Reservation &r : occupancy(fp, t, job.id, stream.index)) {
                out.timeline.reserve(mesh.channel_index(r.channel), r.slots);
            }
            ScheduledStream ss{job.id, stream.index, t, fp.flits, t + fp.latency() - 1, {}};
            for (const DeliveryOffset &d : fp.deliveries) {
                ss.deliveries.push_back({d.node, d.port, t + d.offset, t + d.offset + fp.flits - 1});
            }
            timing.inject = first ? t : std::min(timing.inject, t);
            timing.completion = std::max(timing.completion, ss.completion);
            first = false;
            out.streams.push_back(std::move(ss));
        }
        timing.lateness = std::max<Slot>(0, timing.completion + 1 - job.deadline);
        out.flows[job.id] = timing;
    }
    return out;
}

std::vector<FlowJob> make_jobs(const CommunicationGraph &graph, std::span<const RoutePlan> plans,
                               const AcceleratorConfig &config) {
    std::vector<FlowJob> jobs;
    jobs.reserve(plans.size());
    for (const RoutePlan &plan : plans) {
        const TrafficFlow &flow = graph.flows.at(plan.flow_id);
        FlowJob job{flow.id, flow.ready_time, flow.qos_deadline, plan.streams, {}};
        for (const Stream &s : plan.streams) job.flits.push_back(config.stream(flow.id, s.index).flits);
        jobs.push_back(std::move(job));
    }
    return jobs;
}

InjectionSchedule schedule(const MeshTopology &mesh, const CommunicationGraph &graph, std::span<const RoutePlan> plans,
                           const AcceleratorConfig &config) {
    const std::vector<FlowJob> jobs = make_jobs(graph, plans, config);
    return schedule_jobs(mesh, jobs);
}

std::vector<Conflict> verify_schedule(const MeshTopology &mesh, const ReservationTimeline &timeline) {
    std::vector<Conflict> out;
    for (std::size_t c = 0; c < timeline.channel_count(); ++c) {
        const std::vector<Interval> &list = timeline.on(c);
        // Sorted by start: track the interval reaching furthest so far.
        std::size_t reach = 0;
        for (std::size_t i = 1; i < list.size(); ++i) {
            if (list[i].start < list[reach].end) out.push_back({mesh.channel_at(c), list[reach], list[i]});
            if (list[i].end > list[reach].end) reach = i;
        }
    }
    return out;
}

std::string dump_schedule(const InjectionSchedule &schedule) {
    std::string out = fmt::format("{:>6} {:>6} {:>8} {:>6} {:>10}\n", "flow", "stream", "inject", "flits", "complete");
    for (const ScheduledStream &s : schedule.streams) {
        out += fmt::format("{:>6} {:>6} {:>8} {:>6} {:>10}\n", s.flow_id, s.stream, s.inject, s.flits, s.completion);
    }
    Slot late = 0;
    for (const FlowTiming &f : schedule.flows) late += f.lateness > 0 ? 1 : 0;
    out += fmt::format("# flows {} late {} total_lateness {} makespan {}\n", schedule.flows.size(), late,
                       schedule.total_lateness(), schedule.makespan());
    return out;
}

}  // namespace slotnoc
