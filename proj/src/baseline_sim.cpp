// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

#include <algorithm>
#include <array>
#include <deque>
#include <map>
#include <random>
#include <set>

#include <fmt/format.h>

#include "slotnoc/simulator.hpp"

namespace slotnoc {

namespace {

constexpr int kPorts = 6;  // E, S, W, N, tile, memory
constexpr int kTilePort = 4;
constexpr int kMemoryPort = 5;

int local_port(PortKind p) { return p == PortKind::Memory ? kMemoryPort : kTilePort; }
bool is_link(int port) { return port < 4; }

struct BFlit {
    int packet = -1;
    Slot seq = 0;
    Slot eligible = 0;
};

struct VirtualChannel {
    std::deque<BFlit> buffer;
    int packet = -1;
    int out_port = -1;
    int out_vc = -1;
};

struct Packet {
    BaselinePacket spec;
    std::vector<NodeId> path;
    int hop = 0;
    bool escape = false;
};

struct Event {
    enum Kind { FlitArrival, CreditReturn } kind = FlitArrival;
    int node = 0;
    int port = 0;
    int vc = 0;
    BFlit flit;
    bool tail = false;
};

struct Injector {
    std::deque<int> queue;
    int current = -1;
    int vc = -1;
    Slot next_seq = 0;
};

Direction dor_direction(NodeId at, NodeId dst) {
    if (dst.x > at.x) return Direction::East;
    if (dst.x < at.x) return Direction::West;
    return dst.y > at.y ? Direction::South : Direction::North;
}

class BaselineNetwork {
   public:
    BaselineNetwork(const MeshTopology &mesh, std::span<const BaselinePacket> packets, std::size_t flow_count,
                    const BaselineParams &params)
        : mesh_(mesh), params_(params), nodes_(static_cast<std::size_t>(mesh.node_count())) {
        params.validate();
        const std::size_t vcs = static_cast<std::size_t>(params.vcs);
        vcs_.resize(nodes_ * kPorts * vcs);
        credits_.assign(nodes_ * 4 * vcs, params.vc_depth);
        vc_owner_.assign(nodes_ * 4 * vcs, -1);
        eject_owner_.assign(nodes_ * 2, -1);
        va_ptr_.assign(nodes_ * kPorts, 0);
        sa_in_ptr_.assign(nodes_ * kPorts, 0);
        sa_out_ptr_.assign(nodes_ * kPorts, 0);
        buffered_.assign(nodes_, 0);

        result_.channel_flits.assign(mesh.channel_space(), 0);
        result_.flows.resize(flow_count);
        for (std::size_t f = 0; f < flow_count; ++f) result_.flows[f].flow_id = static_cast<FlowId>(f);

        std::mt19937_64 rng(params.seed);
        packets_.reserve(packets.size());
        std::vector<std::size_t> order(packets.size());
        for (std::size_t i = 0; i < packets.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return packets[a].ready < packets[b].ready; });
        injectors_.resize(nodes_ * 2);
        for (std::size_t i = 0; i < packets.size(); ++i) {
            const BaselinePacket &spec = packets[i];
            Packet p{spec, {}, 0, false};
            if (params.algorithm != BaselineAlgorithm::MAD) {
                p.path = baseline_path(params.algorithm, spec.src, spec.dst, rng, static_cast<Slot>(i));
            }
            packets_.push_back(std::move(p));
        }
        for (std::size_t i : order) {
            const BaselinePacket &spec = packets[i];
            injectors_[mesh.node_index(spec.src) * 2 + (spec.src_port == PortKind::Memory ? 1 : 0)].queue.push_back(
                static_cast<int>(i));
            pending_ready_.insert(spec.ready);
        }
    }

    SimResult run() {
        std::size_t remaining = packets_.size();
        Slot cycle = pending_ready_.empty() ? 0 : *pending_ready_.begin();
        Slot last_progress = cycle;
        std::set<std::size_t> window;
        Slot window_index = params_.blocked_window > 0 ? cycle / params_.blocked_window : 0;

        while (remaining > 0) {
            if (params_.blocked_window > 0 && cycle / params_.blocked_window != window_index) {
                while (window_index < cycle / params_.blocked_window) {
                    result_.blocked_windows.emplace_back(window.begin(), window.end());
                    window.clear();
                    ++window_index;
                }
            }
            bool progress = deliver_events(cycle);
            progress |= inject(cycle);
            for (std::size_t n = 0; n < nodes_; ++n) {
                if (buffered_[n] == 0) continue;
                allocate_vcs(n, cycle, window);
                progress |= switch_traversal(n, cycle, window, remaining);
            }
            if (progress) last_progress = cycle;
            if (cycle - last_progress > params_.deadlock_budget) {
                throw Error(ErrorKind::DeadlockDetected,
                            fmt::format("no flit moved for {} cycles ({} packets pending)", params_.deadlock_budget,
                                        remaining));
            }
            result_.makespan = std::max(result_.makespan, cycle + 1);
            cycle = next_cycle(cycle);
        }
        if (params_.blocked_window > 0) result_.blocked_windows.emplace_back(window.begin(), window.end());
        for (auto &[key, d] : deliveries_) result_.deliveries.push_back(d);
        return std::move(result_);
    }

   private:
    std::size_t vc_index(std::size_t node, int port, int vc) const {
        return (node * kPorts + static_cast<std::size_t>(port)) * static_cast<std::size_t>(params_.vcs) +
               static_cast<std::size_t>(vc);
    }
    std::size_t out_index(std::size_t node, int port, int vc) const {
        return (node * 4 + static_cast<std::size_t>(port)) * static_cast<std::size_t>(params_.vcs) +
               static_cast<std::size_t>(vc);
    }
    int escape_vc() const { return params_.vcs > 1 ? params_.vcs - 1 : -1; }
    int normal_vcs() const { return params_.vcs > 1 ? params_.vcs - 1 : 1; }

    Slot next_cycle(Slot cycle) {
        bool busy = !events_.empty();
        for (std::size_t n = 0; n < nodes_ && !busy; ++n) busy = buffered_[n] > 0;
        for (const Injector &inj : injectors_) {
            if (busy) break;
            // A queued packet that is already ready waits on a free VC, not on time.
            busy = inj.current >= 0 ||
                   (!inj.queue.empty() && packets_[static_cast<std::size_t>(inj.queue.front())].spec.ready <= cycle);
        }
        if (busy) return cycle + 1;
        // Nothing in flight: jump to the next packet that becomes ready.
        auto it = pending_ready_.upper_bound(cycle);
        return it == pending_ready_.end() ? cycle + 1 : *it;
    }

    bool deliver_events(Slot cycle) {
        auto bucket = events_.find(cycle);
        if (bucket == events_.end()) return false;
        for (const Event &e : bucket->second) {
            if (e.kind == Event::FlitArrival) {
                VirtualChannel &vc = vcs_[vc_index(static_cast<std::size_t>(e.node), e.port, e.vc)];
                if (static_cast<int>(vc.buffer.size()) >= params_.vc_depth) {
                    throw Error(ErrorKind::DeadlockDetected, "credit accounting overflowed a VC buffer");
                }
                if (e.flit.seq == 0) vc.packet = e.flit.packet;
                vc.buffer.push_back(e.flit);
                ++buffered_[static_cast<std::size_t>(e.node)];
            } else {
                const std::size_t oi = out_index(static_cast<std::size_t>(e.node), e.port, e.vc);
                ++credits_[oi];
                if (credits_[oi] > params_.vc_depth) {
                    throw Error(ErrorKind::DeadlockDetected, "credit counter exceeded buffer depth");
                }
                if (e.tail) vc_owner_[oi] = -1;
            }
        }
        events_.erase(bucket);
        return true;
    }

    bool inject(Slot cycle) {
        bool progress = false;
        for (std::size_t i = 0; i < injectors_.size(); ++i) {
            Injector &inj = injectors_[i];
            const std::size_t node = i / 2;
            const int port = i % 2 == 1 ? kMemoryPort : kTilePort;
            if (inj.current < 0) {
                if (inj.queue.empty() || packets_[static_cast<std::size_t>(inj.queue.front())].spec.ready > cycle) {
                    continue;
                }
                for (int k = 0; k < params_.vcs; ++k) {
                    const int v = (va_ptr_[node * kPorts + static_cast<std::size_t>(port)] + k) % params_.vcs;
                    VirtualChannel &vc = vcs_[vc_index(node, port, v)];
                    if (vc.packet == -1 && vc.buffer.empty()) {
                        inj.current = inj.queue.front();
                        inj.queue.pop_front();
                        inj.vc = v;
                        inj.next_seq = 0;
                        vc.packet = inj.current;
                        va_ptr_[node * kPorts + static_cast<std::size_t>(port)] = (v + 1) % params_.vcs;
                        break;
                    }
                }
                if (inj.current < 0) continue;
            }
            VirtualChannel &vc = vcs_[vc_index(node, port, inj.vc)];
            if (static_cast<int>(vc.buffer.size()) >= params_.vc_depth) continue;
            Packet &p = packets_[static_cast<std::size_t>(inj.current)];
            vc.buffer.push_back({inj.current, inj.next_seq, cycle});
            ++buffered_[node];
            FlowRecord &fr = result_.flows[p.spec.flow_id];
            if (fr.inject < 0 || cycle < fr.inject) fr.inject = cycle;
            ++fr.flits_injected;
            ++result_.channel_flits[mesh_.channel_index(ChannelId::inject(p.spec.src, p.spec.src_port))];
            progress = true;
            if (++inj.next_seq == p.spec.flits) inj.current = -1;
        }
        return progress;
    }

    int route(Packet &p, std::size_t node) {
        const NodeId at = mesh_.node_at(node);
        if (at == p.spec.dst) return local_port(p.spec.dst_port);
        if (p.escape || params_.algorithm == BaselineAlgorithm::DOR) {
            return static_cast<int>(dor_direction(at, p.spec.dst));
        }
        if (params_.algorithm == BaselineAlgorithm::MAD) {
            std::vector<Direction> options;
            if (p.spec.dst.x != at.x) options.push_back(p.spec.dst.x > at.x ? Direction::East : Direction::West);
            if (p.spec.dst.y != at.y) options.push_back(p.spec.dst.y > at.y ? Direction::South : Direction::North);
            Direction best = options.front();
            int best_credits = -1;
            for (Direction d : options) {
                int sum = 0;
                for (int v = 0; v < normal_vcs(); ++v) sum += credits_[out_index(node, static_cast<int>(d), v)];
                // Strictly more credits wins, so X (listed first) keeps ties.
                if (sum > best_credits) {
                    best = d;
                    best_credits = sum;
                }
            }
            return static_cast<int>(best);
        }
        return static_cast<int>(direction_between(at, p.path[static_cast<std::size_t>(p.hop) + 1]));
    }

    void mark_blocked(std::size_t node, int out_port, std::set<std::size_t> &window) {
        if (params_.blocked_window <= 0 || !is_link(out_port)) return;
        const NodeId at = mesh_.node_at(node);
        window.insert(mesh_.channel_index(ChannelId::link(at, step(at, static_cast<Direction>(out_port)))));
    }

    bool grab_vc(std::size_t node, int port, int vc_id, int packet) {
        const std::size_t oi = out_index(node, port, vc_id);
        if (vc_owner_[oi] != -1) return false;
        vc_owner_[oi] = packet;
        return true;
    }

    void allocate_vcs(std::size_t node, Slot cycle, std::set<std::size_t> &window) {
        for (int k = 0; k < kPorts; ++k) {
            const int ip = static_cast<int>((static_cast<Slot>(k) + cycle) % kPorts);
            for (int v = 0; v < params_.vcs; ++v) {
                VirtualChannel &vc = vcs_[vc_index(node, ip, v)];
                if (vc.buffer.empty() || vc.out_port >= 0) continue;
                const BFlit &front = vc.buffer.front();
                if (front.seq != 0 || front.eligible > cycle) continue;
                Packet &p = packets_[static_cast<std::size_t>(front.packet)];
                const int op = route(p, node);
                if (!is_link(op)) {
                    int &owner = eject_owner_[node * 2 + (op == kMemoryPort ? 1 : 0)];
                    if (owner == -1) {
                        owner = front.packet;
                        vc.out_port = op;
                        vc.out_vc = 0;
                    }
                    continue;
                }
                bool granted = false;
                if (!p.escape) {
                    int &ptr = va_ptr_[node * kPorts + static_cast<std::size_t>(op)];
                    for (int j = 0; j < normal_vcs() && !granted; ++j) {
                        const int cand = (ptr + j) % normal_vcs();
                        if (grab_vc(node, op, cand, front.packet)) {
                            vc.out_port = op;
                            vc.out_vc = cand;
                            ptr = (cand + 1) % normal_vcs();
                            granted = true;
                        }
                    }
                }
                if (!granted && escape_vc() >= 0) {
                    const int dor = static_cast<int>(dor_direction(mesh_.node_at(node), p.spec.dst));
                    if (grab_vc(node, dor, escape_vc(), front.packet)) {
                        p.escape = true;
                        vc.out_port = dor;
                        vc.out_vc = escape_vc();
                        granted = true;
                    }
                }
                if (!granted) mark_blocked(node, op, window);
            }
        }
    }

    bool switch_traversal(std::size_t node, Slot cycle, std::set<std::size_t> &window, std::size_t &remaining) {
        // Input-first separable allocation: each input nominates one VC, each
        // output then grants one input.
        std::array<int, kPorts> nominee{};
        nominee.fill(-1);
        std::array<std::vector<int>, kPorts> requests;
        for (int ip = 0; ip < kPorts; ++ip) {
            int &ptr = sa_in_ptr_[node * kPorts + static_cast<std::size_t>(ip)];
            for (int j = 0; j < params_.vcs; ++j) {
                const int v = (ptr + j) % params_.vcs;
                VirtualChannel &vc = vcs_[vc_index(node, ip, v)];
                if (vc.buffer.empty() || vc.buffer.front().eligible > cycle) continue;
                if (vc.out_port < 0) {
                    ++result_.blocked_flit_cycles;
                    continue;
                }
                if (is_link(vc.out_port) && credits_[out_index(node, vc.out_port, vc.out_vc)] == 0) {
                    ++result_.blocked_flit_cycles;
                    mark_blocked(node, vc.out_port, window);
                    continue;
                }
                if (nominee[static_cast<std::size_t>(ip)] < 0) {
                    nominee[static_cast<std::size_t>(ip)] = v;
                } else {
                    ++result_.blocked_flit_cycles;
                }
            }
            if (nominee[static_cast<std::size_t>(ip)] >= 0) {
                const VirtualChannel &vc = vcs_[vc_index(node, ip, nominee[static_cast<std::size_t>(ip)])];
                requests[static_cast<std::size_t>(vc.out_port)].push_back(ip);
            }
        }
        bool progress = false;
        for (int op = 0; op < kPorts; ++op) {
            std::vector<int> &req = requests[static_cast<std::size_t>(op)];
            if (req.empty()) continue;
            int &ptr = sa_out_ptr_[node * kPorts + static_cast<std::size_t>(op)];
            int winner = req.front();
            for (int j = 0; j < kPorts; ++j) {
                const int cand = (ptr + j) % kPorts;
                if (std::find(req.begin(), req.end(), cand) != req.end()) {
                    winner = cand;
                    break;
                }
            }
            result_.blocked_flit_cycles += static_cast<Slot>(req.size()) - 1;
            ptr = (winner + 1) % kPorts;
            const int v = nominee[static_cast<std::size_t>(winner)];
            sa_in_ptr_[node * kPorts + static_cast<std::size_t>(winner)] = (v + 1) % params_.vcs;
            traverse(node, winner, v, cycle, remaining);
            progress = true;
        }
        return progress;
    }

    void traverse(std::size_t node, int ip, int v, Slot cycle, std::size_t &remaining) {
        VirtualChannel &vc = vcs_[vc_index(node, ip, v)];
        const BFlit flit = vc.buffer.front();
        vc.buffer.pop_front();
        --buffered_[node];
        Packet &p = packets_[static_cast<std::size_t>(flit.packet)];
        const bool tail = flit.seq + 1 == p.spec.flits;
        const NodeId at = mesh_.node_at(node);
        const int op = vc.out_port;
        const int out_vc = vc.out_vc;

        if (is_link(ip)) {
            const NodeId up = step(at, static_cast<Direction>(ip));
            Event credit{Event::CreditReturn, static_cast<int>(mesh_.node_index(up)),
                         static_cast<int>(opposite(static_cast<Direction>(ip))), v, {}, tail};
            events_[cycle + params_.credit_delay].push_back(credit);
        }
        if (params_.trace) {
            result_.trace += fmt::format("{} pkt {} flit {} at {} -> port {}\n", cycle, flit.packet, flit.seq,
                                         to_string(at), op);
        }
        if (is_link(op)) {
            const NodeId next = step(at, static_cast<Direction>(op));
            --credits_[out_index(node, op, out_vc)];
            ++result_.channel_flits[mesh_.channel_index(ChannelId::link(at, next))];
            Event arrival{Event::FlitArrival, static_cast<int>(mesh_.node_index(next)),
                          static_cast<int>(opposite(static_cast<Direction>(op))), out_vc,
                          {flit.packet, flit.seq, cycle + params_.link_delay + params_.router_delay}, tail};
            events_[cycle + params_.link_delay].push_back(arrival);
            if (flit.seq == 0 && !p.path.empty() && !p.escape) ++p.hop;
        } else {
            eject(p, flit, cycle, tail, remaining);
            if (tail) eject_owner_[node * 2 + (op == kMemoryPort ? 1 : 0)] = -1;
        }
        if (tail) {
            vc.packet = -1;
            vc.out_port = -1;
            vc.out_vc = -1;
        }
    }

    void eject(const Packet &p, const BFlit &flit, Slot cycle, bool tail, std::size_t &remaining) {
        ++result_.channel_flits[mesh_.channel_index(ChannelId::eject(p.spec.dst, p.spec.dst_port))];
        FlowRecord &fr = result_.flows[p.spec.flow_id];
        ++fr.flits_ejected;
        DeliveryRecord &d = deliveries_[{p.spec.flow_id, p.spec.leg}];
        if (d.head < 0) d = {p.spec.flow_id, p.spec.leg, p.spec.dst, p.spec.dst_port, -1, -1, 0};
        ++d.flits;
        if (flit.seq == 0 && (d.head < 0 || cycle < d.head)) d.head = cycle;
        if (flit.seq == 0 && (fr.head < 0 || cycle < fr.head)) fr.head = cycle;
        if (tail) {
            d.tail = std::max(d.tail, cycle);
            fr.tail = std::max(fr.tail, cycle);
            --remaining;
        }
    }

    const MeshTopology &mesh_;
    const BaselineParams &params_;
    std::size_t nodes_ = 0;
    std::vector<VirtualChannel> vcs_;
    std::vector<int> credits_;
    std::vector<int> vc_owner_;
    std::vector<int> eject_owner_;
    std::vector<int> va_ptr_;
    std::vector<int> sa_in_ptr_;
    std::vector<int> sa_out_ptr_;
    std::vector<int> buffered_;
    std::vector<Packet> packets_;
    std::vector<Injector> injectors_;
    std::set<Slot> pending_ready_;
    std::map<Slot, std::vector<Event>> events_;
    std::map<std::pair<FlowId, int>, DeliveryRecord> deliveries_;
    SimResult result_;
};

}  // namespace

void BaselineParams::validate() const {
    if (vcs < 1 || vc_depth < 1) throw Error(ErrorKind::InvalidWorkload, "baseline needs at least one VC and buffer");
    if (router_delay < 0 || link_delay < 1 || credit_delay < 1) {
        throw Error(ErrorKind::InvalidWorkload, "baseline delays must be positive");
    }
    if (packet_payload_flits < 1) throw Error(ErrorKind::InvalidWorkload, "packets need at least one payload flit");
    if (deadlock_budget < 1) throw Error(ErrorKind::InvalidWorkload, "deadlock budget must be positive");
}

std::vector<BaselinePacket> lower_to_packets(const MeshTopology &mesh, const CommunicationGraph &graph,
                                             const BaselineParams &params) {
    std::vector<BaselinePacket> out;
    for (const TrafficFlow &flow : graph.flows) {
        std::vector<std::pair<NodeId, NodeId>> legs;
        if (flow.kind == PatternKind::Reduce) {
            for (const NodeId &s : flow.sources) {
                if (s != flow.destination()) legs.emplace_back(s, flow.destination());
            }
        } else {
            for (const NodeId &d : flow.destinations) legs.emplace_back(flow.source(), d);
        }
        const Slot payload = payload_flits(flow.volume, flit_payload_bits(flow, mesh));
        for (std::size_t leg = 0; leg < legs.size(); ++leg) {
            for (Slot sent = 0; sent < payload; sent += params.packet_payload_flits) {
                const Slot body = std::min<Slot>(params.packet_payload_flits, payload - sent);
                out.push_back({flow.id, static_cast<int>(leg), legs[leg].first, legs[leg].second, flow.source_port,
                               flow.destination_port, flow.ready_time, body + (params.header_flit ? 1 : 0)});
            }
        }
    }
    return out;
}

SimResult simulate_packets(const MeshTopology &mesh, std::span<const BaselinePacket> packets, std::size_t flow_count,
                           const BaselineParams &params) {
    return BaselineNetwork(mesh, packets, flow_count, params).run();
}

SimResult simulate_baseline(const MeshTopology &mesh, const CommunicationGraph &graph, const BaselineParams &params) {
    const std::vector<BaselinePacket> packets = lower_to_packets(mesh, graph, params);
    return simulate_packets(mesh, packets, graph.size(), params);
}

}  // namespace slotnoc
