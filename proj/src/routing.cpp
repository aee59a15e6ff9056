// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

#include "slotnoc/routing.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

#include "slotnoc/evolutionary.hpp"

namespace slotnoc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

void append_leg(std::vector<NodeId> &path, const std::vector<NodeId> &leg) {
    if (leg.empty()) return;
    auto begin = leg.begin();
    if (!path.empty() && path.back() == leg.front()) ++begin;
    path.insert(path.end(), begin, leg.end());
}

bool is_connected(const std::set<NodeId> &nodes, NodeId start) {
    std::set<NodeId> seen{start};
    std::deque<NodeId> queue{start};
    while (!queue.empty()) {
        const NodeId n = queue.front();
        queue.pop_front();
        for (Direction d : kAllDirections) {
            const NodeId m = step(n, d);
            if (nodes.contains(m) && seen.insert(m).second) queue.push_back(m);
        }
    }
    return seen.size() == nodes.size();
}

}  // namespace

Slot ChannelLoads::max() const {
    Slot best = 0;
    for (Slot v : loads_) best = std::max(best, v);
    return best;
}

bool SpanningTree::is_terminal(NodeId n) const {
    return std::find(terminals.begin(), terminals.end(), n) != terminals.end();
}

int SpanningTree::max_depth() const {
    int best = 0;
    for (const auto &[n, d] : depth) best = std::max(best, d);
    return best;
}

std::vector<NodeId> SpanningTree::nodes_by_depth() const {
    std::vector<NodeId> out;
    out.reserve(depth.size());
    for (const auto &[n, d] : depth) out.push_back(n);
    std::stable_sort(out.begin(), out.end(), [&](NodeId a, NodeId b) { return depth.at(a) < depth.at(b); });
    return out;
}

std::vector<NodeId> SpanningTree::path_to_root(NodeId n) const {
    std::vector<NodeId> out{n};
    while (n != root) {
        n = parent.at(n);
        out.push_back(n);
    }
    return out;
}

std::vector<ChannelId> SpanningTree::edges() const {
    std::vector<ChannelId> out;
    out.reserve(parent.size());
    for (NodeId n : nodes_by_depth()) {
        if (n == root) continue;
        out.push_back(ChannelId::link(parent.at(n), n));
    }
    return out;
}

SpanningTree SpanningTree::single(NodeId n) {
    SpanningTree t;
    t.root = n;
    t.terminals = {n};
    t.depth[n] = 0;
    return t;
}

void EaParams::validate() const {
    if (population_size < 2) throw Error(ErrorKind::InvalidWorkload, "EA population must be >= 2");
    if (generations < 1) throw Error(ErrorKind::InvalidWorkload, "EA needs at least one generation");
    if (mutation_rate < 0.0 || mutation_rate > 1.0) {
        throw Error(ErrorKind::InvalidWorkload, "EA mutation rate must lie in [0,1]");
    }
    if (max_intermediate_nodes < 0) throw Error(ErrorKind::InvalidWorkload, "EA intermediate count must be >= 0");
}

std::vector<std::pair<NodeId, int>> Stream::deliveries() const {
    std::vector<std::pair<NodeId, int>> out;
    if (tree) {
        for (const NodeId &t : tree->terminals) out.emplace_back(t, hops() + tree->depth.at(t));
    } else {
        out.emplace_back(path.back(), hops());
    }
    return out;
}

NodeId select_hub(const TrafficFlow &flow) {
    const bool multicast = flow.kind == PatternKind::Multicast;
    const bool reduce = flow.kind == PatternKind::Reduce;
    if (!multicast && !reduce) return flow.destination();
    const NodeId terminal = multicast ? flow.source() : flow.destination();
    const std::vector<NodeId> &group = multicast ? flow.destinations : flow.sources;
    NodeId best = group.front();
    int best_d = std::numeric_limits<int>::max();
    for (const NodeId &n : group) {
        const int d = manhattan(n, terminal);
        if (d < best_d || (d == best_d && n < best)) {
            best = n;
            best_d = d;
        }
    }
    return best;
}

std::vector<NodeId> xy_route(NodeId src, NodeId dst) {
    std::vector<NodeId> path{src};
    NodeId cur = src;
    while (cur.x != dst.x) {
        cur.x += dst.x > cur.x ? 1 : -1;
        path.push_back(cur);
    }
    while (cur.y != dst.y) {
        cur.y += dst.y > cur.y ? 1 : -1;
        path.push_back(cur);
    }
    return path;
}

std::vector<NodeId> yx_route(NodeId src, NodeId dst) {
    std::vector<NodeId> path{src};
    NodeId cur = src;
    while (cur.y != dst.y) {
        cur.y += dst.y > cur.y ? 1 : -1;
        path.push_back(cur);
    }
    while (cur.x != dst.x) {
        cur.x += dst.x > cur.x ? 1 : -1;
        path.push_back(cur);
    }
    return path;
}

std::vector<NodeId> expand_intermediates(NodeId src, NodeId dst, std::span<const NodeId> intermediates) {
    std::vector<NodeId> path;
    NodeId from = src;
    for (const NodeId &via : intermediates) {
        append_leg(path, xy_route(from, via));
        from = via;
    }
    append_leg(path, xy_route(from, dst));
    return path;
}

std::vector<NodeId> loop_erase(std::span<const NodeId> path) {
    std::vector<NodeId> out;
    out.reserve(path.size());
    for (const NodeId &n : path) {
        auto seen = std::find(out.begin(), out.end(), n);
        if (seen != out.end()) {
            out.erase(seen + 1, out.end());
        } else {
            out.push_back(n);
        }
    }
    return out;
}

std::vector<NodeId> ea_route(const MeshTopology &mesh, NodeId src, NodeId dst, const ChannelLoads &existing,
                             Slot flits, const EaParams &params, std::uint64_t stream_key) {
    ea::Context ctx{&mesh, src, dst, &existing, flits, params.fitness};
    return ea::search(ctx, params, splitmix64(params.rng_seed ^ splitmix64(stream_key))).path;
}

std::vector<NodeId> ea_route_phase1(const MeshTopology &mesh, const TrafficFlow &flow, NodeId hub,
                                    const ChannelLoads &existing, Slot flits, const EaParams &params) {
    const std::uint64_t key = static_cast<std::uint64_t>(flow.id) << 16;
    if (flow.kind == PatternKind::Reduce) {
        return ea_route(mesh, hub, flow.destination(), existing, flits, params, key);
    }
    return ea_route(mesh, flow.source(), hub, existing, flits, params, key);
}

SpanningTree bfs_spanning_tree(const MeshTopology &mesh, NodeId hub, std::span<const NodeId> terminals) {
    if (terminals.empty()) throw Error(ErrorKind::UnreachableTerminal, "spanning tree needs terminals");

    std::set<NodeId> members(terminals.begin(), terminals.end());
    members.insert(hub);
    int x0 = hub.x, x1 = hub.x, y0 = hub.y, y1 = hub.y;
    for (const NodeId &t : members) {
        x0 = std::min(x0, t.x);
        x1 = std::max(x1, t.x);
        y0 = std::min(y0, t.y);
        y1 = std::max(y1, t.y);
    }
    // Stay on the terminal tiles themselves when they form a connected
    // region; otherwise fall back to their bounding rectangle.
    const bool region_only = is_connected(members, hub);
    auto allowed = [&](NodeId n) {
        if (!mesh.contains(n)) return false;
        if (region_only) return members.contains(n);
        return n.x >= x0 && n.x <= x1 && n.y >= y0 && n.y <= y1;
    };

    std::map<NodeId, NodeId> parent;
    std::map<NodeId, int> depth{{hub, 0}};
    std::deque<NodeId> queue{hub};
    while (!queue.empty()) {
        const NodeId n = queue.front();
        queue.pop_front();
        for (Direction d : kAllDirections) {
            const NodeId m = step(n, d);
            if (!allowed(m) || depth.contains(m)) continue;
            depth[m] = depth[n] + 1;
            parent[m] = n;
            queue.push_back(m);
        }
    }

    SpanningTree tree;
    tree.root = hub;
    tree.terminals.assign(terminals.begin(), terminals.end());
    std::sort(tree.terminals.begin(), tree.terminals.end());
    tree.terminals.erase(std::unique(tree.terminals.begin(), tree.terminals.end()), tree.terminals.end());
    tree.depth[hub] = 0;
    for (const NodeId &t : tree.terminals) {
        if (!depth.contains(t)) {
            throw Error(ErrorKind::UnreachableTerminal, fmt::format("{} unreachable from hub {}", to_string(t),
                                                                    to_string(hub)));
        }
        NodeId n = t;
        while (n != hub && !tree.parent.contains(n)) {
            tree.parent[n] = parent.at(n);
            tree.depth[n] = depth.at(n);
            n = parent.at(n);
        }
    }
    for (const auto &[child, par] : tree.parent) tree.children[par].push_back(direction_between(par, child));
    for (auto &[n, dirs] : tree.children) std::sort(dirs.begin(), dirs.end());
    return tree;
}

double hop_savings(double mean_terminal_hops, double mean_region_hops, int terminal_count) {
    return mean_terminal_hops * (terminal_count - 1) - mean_region_hops * terminal_count;
}

long exact_hop_savings(NodeId terminal, NodeId hub, std::span<const NodeId> group, const SpanningTree &tree) {
    long unicast = 0;
    long dual = manhattan(terminal, hub);
    for (const NodeId &g : group) {
        unicast += manhattan(terminal, g);
        dual += tree.depth.at(g);
    }
    return unicast - dual;
}

std::string_view to_string(BaselineAlgorithm a) {
    switch (a) {
        case BaselineAlgorithm::DOR: return "DOR";
        case BaselineAlgorithm::XYYX: return "XYYX";
        case BaselineAlgorithm::ROMM: return "ROMM";
        case BaselineAlgorithm::MAD: return "MAD";
    }
    return "?";
}

std::vector<NodeId> baseline_path(BaselineAlgorithm alg, NodeId src, NodeId dst, std::mt19937_64 &rng,
                                  Slot inject_slot) {
    switch (alg) {
        case BaselineAlgorithm::DOR: return xy_route(src, dst);
        case BaselineAlgorithm::XYYX: return inject_slot % 2 == 0 ? xy_route(src, dst) : yx_route(src, dst);
        case BaselineAlgorithm::ROMM: {
            std::uniform_int_distribution<int> dx(std::min(src.x, dst.x), std::max(src.x, dst.x));
            std::uniform_int_distribution<int> dy(std::min(src.y, dst.y), std::max(src.y, dst.y));
            const int x = dx(rng);
            const NodeId via{x, dy(rng)};
            std::vector<NodeId> path = xy_route(src, via);
            append_leg(path, xy_route(via, dst));
            return path;
        }
        case BaselineAlgorithm::MAD: break;
    }
    throw std::invalid_argument("MAD routing has no static path");
}

Slot flow_flits(const TrafficFlow &flow, const MeshTopology &mesh) {
    Bits width = mesh.wire_width();
    if (flow.source_port == PortKind::Memory) width = std::min(width, mesh.memory_injection_bits());
    return flit_count(flow.volume, width);
}

RoutePlan route_flow(const MeshTopology &mesh, const TrafficFlow &flow, ChannelLoads &loads,
                     const RoutingOptions &options) {
    const Slot flits = flow_flits(flow, mesh);
    RoutePlan plan;
    plan.flow_id = flow.id;
    plan.kind = flow.kind;

    int leg_index = 0;
    auto charge = [&](const std::vector<ChannelId> &channels) {
        for (const ChannelId &c : channels) {
            loads.add(mesh.channel_index(c), flits);
            plan.total_channel_loads[c] += flits;
        }
    };
    auto leg = [&](NodeId a, NodeId b) {
        const std::uint64_t key = (static_cast<std::uint64_t>(flow.id) << 16) | static_cast<std::uint64_t>(leg_index++);
        return options.use_ea ? ea_route(mesh, a, b, loads, flits, options.ea, key) : xy_route(a, b);
    };
    auto push = [&](Stream s) {
        s.flow_id = flow.id;
        s.index = static_cast<int>(plan.streams.size());
        charge(channels_of_path(s.path));
        if (s.tree) charge(s.tree->edges());
        plan.streams.push_back(std::move(s));
    };

    if (flow.kind == PatternKind::Unicast || flow.kind == PatternKind::LinkTransfer) {
        plan.hub = flow.destination();
        plan.phase1_path = leg(flow.source(), flow.destination());
        plan.phase2_tree = SpanningTree::single(plan.hub);
        push({0, 0, plan.phase1_path, std::nullopt, flow.source_port, flow.destination_port, false});
        return plan;
    }

    const bool multicast = flow.kind == PatternKind::Multicast;
    const NodeId terminal = multicast ? flow.source() : flow.destination();
    const std::vector<NodeId> &group = multicast ? flow.destinations : flow.sources;
    plan.hub = select_hub(flow);
    plan.phase2_tree = bfs_spanning_tree(mesh, plan.hub, group);
    const long savings = exact_hop_savings(terminal, plan.hub, group, plan.phase2_tree);
    // Trees leaving the group would claim table entries in other layers'
    // routers, so those collectives stay on unicasts.
    const bool tree_in_group = std::all_of(plan.phase2_tree.depth.begin(), plan.phase2_tree.depth.end(),
                                           [&](const auto &kv) { return plan.phase2_tree.is_terminal(kv.first); });
    plan.dual_phase = options.dual_phase && group.size() >= 2 && savings > 0 && tree_in_group;

    if (plan.dual_phase && multicast) {
        plan.phase1_path = leg(flow.source(), plan.hub);
        // One stream carries both phases, so a detour that reuses a tree link
        // would hold that channel twice. A minimal X-Y leg only ever moves
        // toward the hub while tree edges move away from it.
        const std::vector<ChannelId> tree_edges = plan.phase2_tree.edges();
        for (const ChannelId &c : channels_of_path(plan.phase1_path)) {
            if (std::find(tree_edges.begin(), tree_edges.end(), c) != tree_edges.end()) {
                plan.phase1_path = xy_route(flow.source(), plan.hub);
                break;
            }
        }
        push({0, 0, plan.phase1_path, plan.phase2_tree, flow.source_port, PortKind::Tile, false});
    } else if (plan.dual_phase) {
        for (const NodeId &s : flow.sources) {
            if (s == plan.hub) continue;
            push({0, 0, plan.phase2_tree.path_to_root(s), std::nullopt, flow.source_port, PortKind::Tile, false});
        }
        plan.phase1_path = leg(plan.hub, flow.destination());
        if (plan.hub != flow.destination()) {
            push({0, 0, plan.phase1_path, std::nullopt, PortKind::Tile, flow.destination_port, true});
        }
    } else if (multicast) {
        for (const NodeId &d : flow.destinations) {
            std::vector<NodeId> path = leg(flow.source(), d);
            if (d == plan.hub) plan.phase1_path = path;
            push({0, 0, std::move(path), std::nullopt, flow.source_port, flow.destination_port, false});
        }
    } else {
        for (const NodeId &s : flow.sources) {
            if (s == flow.destination()) continue;
            push({0, 0, leg(s, flow.destination()), std::nullopt, flow.source_port, flow.destination_port, false});
        }
        plan.phase1_path = xy_route(plan.hub, flow.destination());
    }
    return plan;
}

std::vector<RoutePlan> route_all(const MeshTopology &mesh, const CommunicationGraph &graph,
                                 const RoutingOptions &options) {
    if (options.use_ea) options.ea.validate();
    ChannelLoads loads(mesh);
    std::vector<RoutePlan> plans;
    plans.reserve(graph.size());
    for (const TrafficFlow &flow : graph.flows) plans.push_back(route_flow(mesh, flow, loads, options));
    return plans;
}

}  // namespace slotnoc
