// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

// End-to-end acceptance gate. One PASS/FAIL line per criterion; the exit code
// is non-zero if any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "slotnoc/experiments.hpp"
#include "slotnoc/synthetic.hpp"
#include "slotnoc/workload_file.hpp"

namespace fs = std::filesystem;
using namespace slotnoc;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

using Path = std::vector<NodeId>;

std::vector<fs::path> bundled() {
    std::vector<fs::path> out;
    for (const auto &e : fs::directory_iterator(SLOTNOC_WORKLOADS)) {
        if (e.path().extension() == ".yaml") out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

PipelineOptions small_ea() {
    PipelineOptions o;
    o.routing.ea.population_size = 12;
    o.routing.ea.generations = 6;
    return o;
}

// Counts of everything criteria 1 and 2 look at, accumulated over one run.
struct ScheduleTally {
    long workloads = 0;
    long flows = 0;
    long conflicts = 0;
    long runtime_conflicts = 0;
    long other_errors = 0;
    long tails_checked = 0;
    long tails_matching = 0;
    std::string first_error;
};

void check_workload(const WorkloadSpec &spec, const PipelineOptions &options, ScheduleTally &t) {
    ++t.workloads;
    try {
        const MetroRun planned = plan_metro(spec, options);
        t.flows += static_cast<long>(planned.graph.size());
        t.conflicts += static_cast<long>(planned.conflicts.size());
        const MetroRun run = run_metro(spec, options);
        for (const FlowTiming &ft : run.schedule.flows) {
            ++t.tails_checked;
            t.tails_matching += run.sim.flows[ft.flow_id].tail == ft.completion;
        }
    } catch (const Error &e) {
        if (e.kind() == ErrorKind::RuntimeConflict) {
            ++t.runtime_conflicts;
        } else {
            ++t.other_errors;
        }
        if (t.first_error.empty()) t.first_error = e.what();
    }
}

ScheduleTally &corpus_tally() {
    static std::optional<ScheduleTally> tally;
    if (tally) return *tally;
    tally.emplace();
    const PipelineOptions options = small_ea();
    for (const fs::path &p : bundled()) {
        const WorkloadFile f = load_workload(p);
        for (int w : f.wire_widths) {
            WorkloadSpec spec = f.spec;
            spec.mesh = spec.mesh.with_wire_width(w);
            check_workload(spec, options, *tally);
        }
    }
    std::mt19937_64 rng(1000);
    auto u = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const std::array<int, 3> widths{256, 512, 1024};
    for (int i = 0; i < 1000; ++i) {
        SyntheticParams p;
        p.width = u(4, 8);
        p.height = u(4, 8);
        p.memory_controllers = std::min(8, 2 * (p.width + p.height) - 4);
        p.layers = u(1, 5);
        p.max_tiles = std::min(8, p.width * p.height / p.layers);
        p.wire_width = widths[static_cast<std::size_t>(u(0, 2))];
        p.max_flows = 200;
        const WorkloadSpec spec = resolve_workload(generate_workload(p, static_cast<std::uint64_t>(i) + 1).spec);
        check_workload(spec, small_ea(), *tally);
    }
    return *tally;
}

Verdict conflict_free() {
    const auto start = std::chrono::steady_clock::now();
    const ScheduleTally &t = corpus_tally();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = t.conflicts == 0 && t.runtime_conflicts == 0 && t.other_errors == 0 && seconds < 300.0;
    std::string detail = fmt::format("{} workloads, {} flows, {} verify conflicts, {} runtime conflicts, {} other errors, {:.1f}s",
                                     t.workloads, t.flows, t.conflicts, t.runtime_conflicts, t.other_errors, seconds);
    if (!t.first_error.empty()) detail += "; first error: " + t.first_error;
    return {pass, detail};
}

Verdict analytic_equals_simulated() {
    const ScheduleTally &t = corpus_tally();
    return {t.tails_checked > 0 && t.tails_checked == t.tails_matching,
            fmt::format("{}/{} flow tails match the prediction", t.tails_matching, t.tails_checked)};
}

Stream unicast(FlowId id, Path path, PortKind src = PortKind::Tile) {
    Stream s;
    s.flow_id = id;
    s.path = std::move(path);
    s.source_port = src;
    return s;
}

FlowJob job(FlowId id, Slot ready, Slot deadline, Stream s, Slot flits) {
    return FlowJob{id, ready, deadline, {std::move(s)}, {flits}};
}

Verdict worked_example() {
    const MeshTopology mesh(4, 3, {{0, 0}}, 256, 1);
    const std::vector<FlowJob> jobs{
        job(0, 0, 20, unicast(0, {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {3, 1}}, PortKind::Memory), 2),
        job(1, 0, 20, unicast(1, {{0, 0}, {0, 1}, {0, 2}}, PortKind::Memory), 2),
        job(2, 0, 20, unicast(2, {{3, 0}, {3, 1}, {3, 2}}), 4),
        job(3, 0, 20, unicast(3, {{3, 0}, {3, 1}}), 2),
    };
    const InjectionSchedule s = schedule_jobs(mesh, jobs);
    const Slot a = s.flows[0].inject + 1, b = s.flows[1].inject + 1, c = s.flows[2].inject + 1,
               d = s.flows[3].inject + 1;
    const bool pass = verify_schedule(mesh, s.timeline).empty() && a == 1 && b == 3 && c - b == 3 && d == 1;
    return {pass, fmt::format("injection slots {} {} {} {} (expected 1 3 6 1)", a, b, c, d)};
}

Verdict encodings() {
    int bad = 0;
    const std::array<std::pair<RouteCode, const char *>, 6> codes{{{RouteCode::Nop, "000"},
                                                                    {RouteCode::East, "001"},
                                                                    {RouteCode::South, "010"},
                                                                    {RouteCode::West, "011"},
                                                                    {RouteCode::North, "100"},
                                                                    {RouteCode::Output, "101"}}};
    for (const auto &[c, bits] : codes) bad += code_bits(c) != bits;
    const std::array<std::pair<Direction, const char *>, 4> hot{{{Direction::East, "00001"},
                                                                 {Direction::South, "00010"},
                                                                 {Direction::West, "00100"},
                                                                 {Direction::North, "01000"}}};
    for (const auto &[d, bits] : hot) bad += mask_bits(one_hot(d)) != bits;
    bad += mask_bits(kOutputMask) != "10000";

    const MeshTopology mesh4(4, 4, {}, 256);
    const std::vector<NodeId> broadcast{{0, 1}, {1, 2}};
    bad += mask_bits(build_routing_tables(bfs_spanning_tree(mesh4, {1, 1}, broadcast), 0).at({1, 1}).mask) != "00110";
    const std::vector<NodeId> esout{{1, 1}, {2, 1}, {1, 2}};
    bad += mask_bits(build_routing_tables(bfs_spanning_tree(mesh4, {1, 1}, esout), 0).at({1, 1}).mask) != "10011";

    std::mt19937_64 rng(2024);
    const MeshTopology mesh(16, 16, {}, 256);
    int trips = 0, round_trips = 0;
    for (int i = 0; i < 10000; ++i) {
        Path p{{std::uniform_int_distribution<int>(0, 15)(rng), std::uniform_int_distribution<int>(0, 15)(rng)}};
        std::vector<Direction> dirs;
        const int hops = std::uniform_int_distribution<int>(0, 30)(rng);
        while (static_cast<int>(dirs.size()) < hops) {
            const Direction d = kAllDirections[static_cast<std::size_t>(std::uniform_int_distribution<int>(0, 3)(rng))];
            if (const auto n = mesh.neighbor(p.back(), d)) {
                p.push_back(*n);
                dirs.push_back(d);
            }
        }
        ++trips;
        round_trips += decode_directions(encode_source_route(p)) == dirs &&
                       decode_directions(encode_unicast_route(p)) == dirs;
    }
    return {bad == 0 && round_trips == trips,
            fmt::format("{} golden mismatches, {}/{} round trips", bad, round_trips, trips)};
}

std::vector<NodeId> rectangle(NodeId corner, int w, int h) {
    std::vector<NodeId> out;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) out.push_back({corner.x + x, corner.y + y});
    }
    return out;
}

// Traversals counted by walking routes, against the closed form evaluated
// with each instance's true per-destination hop counts.
Verdict hop_savings_match() {
    const MeshTopology mesh(16, 16, {}, 256);
    std::mt19937_64 rng(21);
    auto u = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    int exact = 0, mean_form = 0;
    for (int i = 0; i < 100; ++i) {
        const int w = u(1, 5), h = u(1, 5);
        const std::vector<NodeId> region = rectangle({u(0, 16 - w), u(0, 16 - h)}, w, h);
        NodeId src{u(0, 15), u(0, 15)};
        while (std::find(region.begin(), region.end(), src) != region.end()) src = {u(0, 15), u(0, 15)};
        const TrafficFlow flow{0, PatternKind::Multicast, 1024, {src}, region, PortKind::Tile, PortKind::Tile, 0, 100};
        const NodeId hub = select_hub(flow);
        const SpanningTree tree = bfs_spanning_tree(mesh, hub, region);
        long unicast_hops = 0, dual = static_cast<long>(channels_of_path(xy_route(src, hub)).size());
        for (const NodeId &d : region) {
            unicast_hops += static_cast<long>(channels_of_path(xy_route(src, d)).size());
            dual += static_cast<long>(tree.path_to_root(d).size()) - 1;
        }
        const long measured = unicast_hops - dual;
        exact += measured == exact_hop_savings(src, hub, region, tree);
        const int m = static_cast<int>(region.size());
        const double l = static_cast<double>(unicast_hops) / m;
        double k = 0;
        for (const NodeId &d : region) k += tree.depth.at(d);
        k /= m;
        const double predicted = hop_savings(l, k, m) + (l - manhattan(src, hub));
        mean_form += std::abs(predicted - static_cast<double>(measured)) < 1e-9;
    }
    return {exact == 100 && mean_form == 100,
            fmt::format("{}/100 exact, {}/100 closed form with per-destination hops", exact, mean_form)};
}

// Independent list scheduler over a channel booking map, scanning one slot
// at a time; also used to enumerate every order for the optimum.
struct Unicast {
    NodeId src, dst;
    Path path;
    Slot ready = 0, deadline = 0, flits = 1;
};

Slot reference_makespan(const std::vector<Unicast> &flows, const std::vector<std::size_t> &order, Slot sc,
                        std::vector<Slot> *inject = nullptr) {
    std::map<ChannelId, std::vector<std::pair<Slot, Slot>>> booked;
    Slot makespan = 0;
    if (inject) inject->assign(flows.size(), 0);
    for (std::size_t i : order) {
        const Unicast &f = flows[i];
        std::vector<std::pair<ChannelId, Slot>> chans{{ChannelId::inject(f.src, PortKind::Tile), 0}};
        for (std::size_t h = 1; h < f.path.size(); ++h) {
            chans.push_back({ChannelId::link(f.path[h - 1], f.path[h]), static_cast<Slot>(h - 1) * sc});
        }
        chans.push_back({ChannelId::eject(f.dst, PortKind::Tile), static_cast<Slot>(f.path.size() - 1) * sc});
        Slot t = f.ready;
        for (;; ++t) {
            bool free = true;
            for (const auto &[c, off] : chans) {
                for (const auto &[a, b] : booked[c]) free = free && (t + off + f.flits <= a || b <= t + off);
            }
            if (free) break;
        }
        for (const auto &[c, off] : chans) booked[c].push_back({t + off, t + off + f.flits});
        if (inject) (*inject)[i] = t;
        makespan = std::max(makespan, t + chans.back().second + f.flits);
    }
    return makespan;
}

Verdict greedy_vs_optimum() {
    std::mt19937_64 rng(606);
    auto u = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    int optimal = 0, disagreements = 0, below_optimum = 0;
    double worst = 1.0;
    for (int k = 0; k < 200; ++k) {
        const int w = u(2, 4), h = u(2, 4), n = u(2, 5);
        const Slot sc = u(1, 3);
        const MeshTopology mesh(w, h, {}, 256, static_cast<int>(sc));
        std::vector<Unicast> flows;
        while (static_cast<int>(flows.size()) < n) {
            const NodeId a{u(0, w - 1), u(0, h - 1)}, b{u(0, w - 1), u(0, h - 1)};
            if (a == b) continue;
            Unicast f{a, b, u(0, 1) ? xy_route(a, b) : yx_route(a, b)};
            f.ready = u(0, 6);
            // Flows released together for one phase share its deadline.
            f.deadline = 40;
            f.flits = u(1, 6);
            flows.push_back(f);
        }
        std::vector<FlowJob> jobs;
        for (FlowId i = 0; i < flows.size(); ++i) {
            jobs.push_back(job(i, flows[i].ready, flows[i].deadline, unicast(i, flows[i].path), flows[i].flits));
        }
        const InjectionSchedule greedy = schedule_jobs(mesh, jobs);
        std::vector<Slot> ref;
        reference_makespan(flows, priority_order(jobs), sc, &ref);
        for (std::size_t i = 0; i < flows.size(); ++i) disagreements += greedy.flows[i].inject != ref[i];

        std::vector<std::size_t> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        Slot best = std::numeric_limits<Slot>::max();
        do {
            best = std::min(best, reference_makespan(flows, order, sc));
        } while (std::next_permutation(order.begin(), order.end()));
        below_optimum += greedy.makespan() < best;
        optimal += greedy.makespan() == best;
        worst = std::max(worst, static_cast<double>(greedy.makespan()) / static_cast<double>(best));
    }
    const bool pass = worst <= 1.5 && optimal * 2 >= 200 && disagreements == 0 && below_optimum == 0;
    return {pass, fmt::format("worst ratio {:.3f}, optimal in {}/200, {} slot disagreements with the reference",
                              worst, optimal, disagreements)};
}

Verdict zero_load() {
    const MeshTopology mesh(31, 2, {}, 256);
    int cases = 0, exact = 0;
    for (int H = 0; H <= 30; ++H) {
        for (Slot flits : {1, 2, 9}) {
            const std::vector<BaselinePacket> pk{{0, 0, {0, 1}, {H, 1}, PortKind::Tile, PortKind::Tile, 7, flits}};
            const SimResult r = simulate_packets(mesh, pk, 1, BaselineParams{});
            const FlowRecord &f = r.flows[0];
            ++cases;
            exact += f.head - f.inject == H * (4 + 1) && f.tail - f.inject + 1 == H * (4 + 1) + flits;
        }
    }
    return {exact == cases, fmt::format("{}/{} (H, flits) cases exact for H in 0..30", exact, cases)};
}

Verdict hotspot() {
    const MeshTopology mesh(8, 8, MeshTopology::edge_midpoint_controllers(8, 8), 256, 3);
    const NodeId mc = mesh.mc_nodes().front();
    const CommunicationGraph g = hotspot_burst(mesh, mc, 8192);
    BaselineParams p;
    p.blocked_window = 20;
    const SimResult base = simulate_baseline(mesh, g, p);
    // The burst lasts until the first source drains its whole message.
    Slot burst_end = std::numeric_limits<Slot>::max();
    for (const FlowRecord &f : base.flows) burst_end = std::min(burst_end, f.tail);
    std::size_t windows = 0, shrinks = 0, peak = 0;
    for (std::size_t i = 1; i < base.blocked_windows.size() && static_cast<Slot>(i + 1) * p.blocked_window <= burst_end;
         ++i) {
        ++windows;
        const auto &prev = base.blocked_windows[i - 1], &cur = base.blocked_windows[i];
        shrinks += !std::includes(cur.begin(), cur.end(), prev.begin(), prev.end());
        peak = std::max(peak, cur.size());
    }
    const MetroRun metro = [&] {
        MetroRun r;
        RoutingOptions opt;
        opt.ea.population_size = 16;
        opt.ea.generations = 10;
        r.plans = route_all(mesh, g, opt);
        r.config = build_config(mesh, g, r.plans);
        r.schedule = schedule(mesh, g, r.plans, r.config);
        r.conflicts = verify_schedule(mesh, r.schedule.timeline);
        r.sim = simulate_metro(mesh, r.config, r.schedule);
        return r;
    }();
    const bool pass = windows >= 2 && peak > 0 && shrinks == 0 && metro.conflicts.empty() &&
                      metro.sim.blocked_flit_cycles == 0;
    return {pass, fmt::format("baseline: {} windows before slot {}, {} shrinking, peak {} blocked links; METRO: {} "
                              "blocked flit-cycles",
                              windows, burst_end, shrinks, peak, metro.sim.blocked_flit_cycles)};
}

Verdict directional() {
    bool pass = true;
    std::string detail;
    int seen = 0;
    for (const fs::path &path : bundled()) {
        const WorkloadFile f = load_workload(path);
        if (path.filename().string().rfind("hybrid", 0) != 0) continue;
        ++seen;
        const ExperimentReport r = run_comparison(f.spec, f.name, f.wire_widths, kAllSchemes, PipelineOptions{});
        std::map<Scheme, double> at256;
        for (const CellResult &c : r.cells) {
            if (c.wire_width == 256) at256[c.scheme] = c.tiles.mean_bounded_ratio;
        }
        const std::optional<int> metro_w = ideal_width(r.cells, Scheme::METRO);
        bool ok = at256.size() == std::size(kAllSchemes) && metro_w.has_value();
        std::string widths;
        for (Scheme s : kAllSchemes) {
            const std::optional<int> w = ideal_width(r.cells, s);
            if (s != Scheme::METRO) {
                ok = ok && at256[Scheme::METRO] <= at256[s];
                ok = ok && (!w || (metro_w && *metro_w <= *w));
            }
            widths += fmt::format(" {}={:.3f}@{}", to_string(s), at256[s], w ? std::to_string(*w) : "none");
        }
        pass = pass && ok;
        detail += fmt::format("{}{}:{}", detail.empty() ? "" : "; ", f.name, widths);
    }
    return {pass && seen > 0, detail};
}

Verdict ablation_monotone() {
    bool pass = true;
    std::string detail;
    for (const fs::path &path : bundled()) {
        const WorkloadFile f = load_workload(path);
        for (int w : f.wire_widths) {
            const std::vector<AblationRow> rows = run_ablation(f.spec, w, PipelineOptions{});
            for (std::size_t i = 1; i < rows.size(); ++i) {
                if (rows[i].communication > rows[i - 1].communication) {
                    pass = false;
                    detail += fmt::format("{}{}@{} {} {} -> {}", detail.empty() ? "" : "; ", f.name, w,
                                          rows[i].stage, rows[i - 1].communication, rows[i].communication);
                }
            }
        }
    }
    return {pass, detail.empty() ? "no stage increases communication" : "increases: " + detail};
}

std::pair<int, std::string> run_cli(const std::string &args) {
    const std::string cmd = std::string(SLOTNOC_CLI) + " " + args + " 2>/dev/null";
    std::string out;
    FILE *p = popen(cmd.c_str(), "r");
    if (!p) return {-1, out};
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
    const int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

Verdict cli_determinism() {
    std::vector<std::string> commands{"gen-workload --seed 13", "gen-workload --seed 14 --max-flows 80"};
    for (const fs::path &p : bundled()) {
        const std::string w = p.string();
        for (const char *c : {"extract", "route", "schedule", "emit-config"}) commands.push_back(fmt::format("{} {}", c, w));
        commands.push_back("simulate " + w + " --scheme METRO --trace");
        commands.push_back("simulate " + w + " --scheme ROMM --seed 9 --format csv");
        commands.push_back("compare " + w + " --format json --ea-generations 5");
        commands.push_back("ablate " + w + " --format csv --ea-generations 5");
    }
    int identical = 0;
    std::string failed;
    for (const std::string &c : commands) {
        const auto a = run_cli(c);
        const auto b = run_cli(c);
        if (a.first == 0 && !a.second.empty() && a == b) {
            ++identical;
        } else if (failed.empty()) {
            failed = fmt::format("{} (exit {}/{}, {})", c, a.first, b.first, a.second == b.second ? "same bytes" : "bytes differ");
        }
    }
    return {identical == static_cast<int>(commands.size()),
            fmt::format("{}/{} invocations byte-identical{}", identical, commands.size(),
                        failed.empty() ? "" : "; first failure: " + failed)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char *, std::function<Verdict()>>> criteria{
        {"conflict-free scheduling", conflict_free},
        {"analytic equals simulated", analytic_equals_simulated},
        {"worked example", worked_example},
        {"bit-exact encodings", encodings},
        {"dual-phase hop savings", hop_savings_match},
        {"greedy vs exhaustive", greedy_vs_optimum},
        {"baseline zero load", zero_load},
        {"tree saturation", hotspot},
        {"directional comparison", directional},
        {"ablation monotonicity", ablation_monotone},
        {"CLI determinism", cli_determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception &e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        failures += !v.pass;
        fmt::print("criterion {:>2} {}: {} ({})\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first, v.detail);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
