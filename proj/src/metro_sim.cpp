// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

#include <algorithm>
#include <map>

#include <fmt/format.h>

#include "slotnoc/simulator.hpp"

namespace slotnoc {

namespace {

// Input ports: the four links by arrival side, then the two local ports.
constexpr int kLocalTile = 4;
constexpr int kLocalMemory = 5;
constexpr int kInputsPerNode = 6;

int local_port(PortKind p) { return p == PortKind::Memory ? kLocalMemory : kLocalTile; }

struct HeadState {
    BitString route;
    bool table_mode = false;
};

struct Arrival {
    int stream = 0;
    Slot seq = 0;
    NodeId node;
    int input = 0;
    // Only meaningful on the head flit.
    HeadState head;
};

struct InputState {
    int stream = -1;
    std::vector<std::size_t> outputs;
};

class MetroFabric {
   public:
    MetroFabric(const MeshTopology &mesh, const AcceleratorConfig &config, const InjectionSchedule &schedule,
                bool trace)
        : mesh_(mesh), config_(config), schedule_(schedule), tracing_(trace) {
        inputs_.resize(static_cast<std::size_t>(mesh.node_count()) * kInputsPerNode);
        owner_.assign(mesh.channel_space(), -1);
        last_cycle_.assign(mesh.channel_space(), -1);
        result_.channel_flits.assign(mesh.channel_space(), 0);
        result_.flows.resize(schedule.flows.size());
        for (std::size_t f = 0; f < result_.flows.size(); ++f) result_.flows[f].flow_id = static_cast<FlowId>(f);
        streams_.reserve(schedule.streams.size());
        for (const ScheduledStream &s : schedule.streams) streams_.push_back(&config.stream(s.flow_id, s.stream));
    }

    SimResult run() {
        for (std::size_t i = 0; i < schedule_.streams.size(); ++i) {
            const ScheduledStream &s = schedule_.streams[i];
            if (s.flits > 0) inject(static_cast<int>(i), 0, s.inject);
        }
        while (!events_.empty()) {
            auto bucket = events_.begin();
            const Slot cycle = bucket->first;
            std::vector<Arrival> arrivals = std::move(bucket->second);
            events_.erase(bucket);
            for (Arrival &a : arrivals) process(a, cycle);
            result_.makespan = std::max(result_.makespan, cycle + 1);
        }
        for (auto &[key, d] : open_deliveries_) result_.deliveries.push_back(d);
        return std::move(result_);
    }

   private:
    void inject(int stream, Slot seq, Slot cycle) {
        const StreamConfig &sc = *streams_[static_cast<std::size_t>(stream)];
        Arrival a{stream, seq, sc.source, local_port(sc.source_port), {}};
        if (seq == 0) a.head.route = sc.header.route;
        events_[cycle].push_back(std::move(a));
    }

    void enter(int stream, Slot seq, Slot cycle) {
        const StreamConfig &sc = *streams_[static_cast<std::size_t>(stream)];
        const std::size_t ch = mesh_.channel_index(ChannelId::inject(sc.source, sc.source_port));
        claim(ch, stream, cycle);
        release_if_tail(ch, stream, seq);
        FlowRecord &fr = result_.flows[sc.flow_id];
        if (fr.inject < 0 || cycle < fr.inject) fr.inject = cycle;
        ++fr.flits_injected;
    }

    [[noreturn]] void conflict(const std::string &what, Slot cycle) const {
        throw Error(ErrorKind::RuntimeConflict, fmt::format("cycle {}: {}", cycle, what));
    }

    void claim(std::size_t ch, int stream, Slot cycle) {
        if (owner_[ch] != -1 && owner_[ch] != stream) {
            conflict(fmt::format("{} held by stream {} requested by stream {}", to_string(mesh_.channel_at(ch)),
                                 describe(owner_[ch]), describe(stream)),
                     cycle);
        }
        if (last_cycle_[ch] == cycle) {
            conflict(fmt::format("two flits on {} in one cycle", to_string(mesh_.channel_at(ch))), cycle);
        }
        owner_[ch] = stream;
        last_cycle_[ch] = cycle;
        ++result_.channel_flits[ch];
    }

    void release_if_tail(std::size_t ch, int stream, Slot seq) {
        if (seq + 1 == schedule_.streams[static_cast<std::size_t>(stream)].flits) owner_[ch] = -1;
    }

    std::string describe(int stream) const {
        const ScheduledStream &s = schedule_.streams[static_cast<std::size_t>(stream)];
        return fmt::format("{}.{}", s.flow_id, s.stream);
    }

    std::vector<std::size_t> route_head(HeadState &head, NodeId node, const StreamConfig &sc, Slot cycle) {
        auto eject = [&] { return mesh_.channel_index(ChannelId::eject(node, sc.header.endpoint)); };
        auto link = [&](Direction d) {
            const NodeId next = step(node, d);
            if (!mesh_.contains(next)) {
                conflict(fmt::format("stream {} routed off the mesh at {}", describe_config(sc), to_string(node)),
                         cycle);
            }
            return mesh_.channel_index(ChannelId::link(node, next));
        };
        if (!head.table_mode) {
            DecodedPort p = decode_next_port(head.route);
            head.route = std::move(p.rest);
            if (is_direction(p.code)) return {link(direction_of(p.code))};
            if (p.code == RouteCode::Output) return {eject()};
            head.table_mode = true;
        }
        const std::uint8_t mask = config_.lookup(node, sc.header.table_id);
        if (mask == 0) {
            conflict(fmt::format("stream {} has no table entry {} at {}", describe_config(sc), sc.header.table_id,
                                 to_string(node)),
                     cycle);
        }
        std::vector<std::size_t> out;
        for (Direction d : kAllDirections) {
            if (mask & one_hot(d)) out.push_back(link(d));
        }
        if (mask & kOutputMask) out.push_back(eject());
        return out;
    }

    static std::string describe_config(const StreamConfig &sc) { return fmt::format("{}.{}", sc.flow_id, sc.stream); }

    void process(Arrival &a, Slot cycle) {
        const StreamConfig &sc = *streams_[static_cast<std::size_t>(a.stream)];
        const Slot flits = schedule_.streams[static_cast<std::size_t>(a.stream)].flits;
        InputState &in = inputs_[mesh_.node_index(a.node) * kInputsPerNode + static_cast<std::size_t>(a.input)];
        const bool injected = a.input >= kLocalTile;
        if (injected) enter(a.stream, a.seq, cycle);

        if (a.seq == 0) {
            if (in.stream != -1) {
                conflict(fmt::format("stream {} interleaves stream {} at {} input {}", describe(a.stream),
                                     describe(in.stream), to_string(a.node), a.input),
                         cycle);
            }
            in.stream = a.stream;
            in.outputs = route_head(a.head, a.node, sc, cycle);
        } else if (in.stream != a.stream) {
            conflict(fmt::format("body flit of stream {} at {} without its head", describe(a.stream), to_string(a.node)),
                     cycle);
        }

        for (std::size_t ch : in.outputs) {
            claim(ch, a.stream, cycle);
            const ChannelId c = mesh_.channel_at(ch);
            if (tracing_) {
                result_.trace += fmt::format("{} {} flit {} {}\n", cycle, describe(a.stream), a.seq, to_string(c));
            }
            if (c.kind == ChannelKind::Eject) {
                deliver(a, sc, c, cycle, flits);
            } else {
                Arrival next{a.stream, a.seq, c.to, static_cast<int>(opposite(direction_between(c.from, c.to))), {}};
                if (a.seq == 0) next.head = a.head;
                events_[cycle + mesh_.channel_slot_cost()].push_back(std::move(next));
            }
            release_if_tail(ch, a.stream, a.seq);
        }
        if (a.seq + 1 == flits) {
            in.stream = -1;
            in.outputs.clear();
        }
        if (injected && a.seq + 1 < flits) inject(a.stream, a.seq + 1, cycle + 1);
    }

    void deliver(const Arrival &a, const StreamConfig &sc, const ChannelId &c, Slot cycle, Slot flits) {
        DeliveryRecord &d = open_deliveries_[{a.stream, c.to}];
        if (d.head < 0) {
            d = {sc.flow_id, sc.stream, c.to, c.port, cycle, -1, 0};
        }
        ++d.flits;
        FlowRecord &fr = result_.flows[sc.flow_id];
        ++fr.flits_ejected;
        if (a.seq == 0 && (fr.head < 0 || cycle < fr.head)) fr.head = cycle;
        if (a.seq + 1 == flits) {
            d.tail = cycle;
            fr.tail = std::max(fr.tail, cycle);
        }
    }

    const MeshTopology &mesh_;
    const AcceleratorConfig &config_;
    const InjectionSchedule &schedule_;
    bool tracing_ = false;
    std::vector<const StreamConfig *> streams_;
    std::vector<InputState> inputs_;
    std::vector<int> owner_;
    std::vector<Slot> last_cycle_;
    std::map<Slot, std::vector<Arrival>> events_;
    std::map<std::pair<int, NodeId>, DeliveryRecord> open_deliveries_;
    SimResult result_;
};

}  // namespace

SimResult simulate_metro(const MeshTopology &mesh, const AcceleratorConfig &config, const InjectionSchedule &schedule,
                         bool trace) {
    return MetroFabric(mesh, config, schedule, trace).run();
}

}  // namespace slotnoc
