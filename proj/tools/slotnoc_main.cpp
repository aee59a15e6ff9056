// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "slotnoc/experiments.hpp"
#include "slotnoc/report.hpp"
#include "slotnoc/synthetic.hpp"

namespace {

using namespace slotnoc;

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitSimulation = 3;

struct Globals {
    std::vector<int> wire_widths;
    std::uint64_t seed = 1;
    std::string out_dir;
    std::string format = "table";
    bool trace = false;
    bool no_ea = false;
    bool no_dual_phase = false;
    int ea_population = 0;
    int ea_generations = 0;
    std::string framing = "chunk";
};

ReportFormat format_of(const Globals &g) { return *parse_format(g.format); }

void emit(const Globals &g, const std::string &stem, const std::string &text) {
    if (g.out_dir.empty()) {
        std::cout << text;
        return;
    }
    std::filesystem::create_directories(g.out_dir);
    const std::string ext = g.format == "json" ? "json" : g.format == "csv" ? "csv" : "txt";
    const std::filesystem::path path = std::filesystem::path(g.out_dir) / fmt::format("{}.{}", stem, ext);
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::ParseError, fmt::format("cannot write {}", path.string()));
    out << text;
    std::cerr << "wrote " << path.string() << "\n";
}

PipelineOptions options_of(const Globals &g) {
    PipelineOptions o;
    o.routing.use_ea = !g.no_ea;
    o.routing.dual_phase = !g.no_dual_phase;
    o.routing.ea.rng_seed = g.seed;
    if (g.ea_population > 0) o.routing.ea.population_size = g.ea_population;
    if (g.ea_generations > 0) o.routing.ea.generations = g.ea_generations;
    o.framing.kind = g.framing == "packet" ? FramingKind::Packet : FramingKind::Chunk;
    o.baseline.seed = g.seed;
    o.trace = g.trace;
    return o;
}

WorkloadFile load_for(const Globals &g, const std::string &path) {
    WorkloadFile file = load_workload(path);
    if (!g.wire_widths.empty()) file.spec.mesh = file.spec.mesh.with_wire_width(g.wire_widths.front());
    return file;
}

std::string join(const std::vector<NodeId> &nodes) {
    std::string out;
    for (const NodeId &n : nodes) out += (out.empty() ? "" : " ") + to_string(n);
    return out;
}

std::string flows_text(const CommunicationGraph &graph, ReportFormat format) {
    if (format == ReportFormat::Json) {
        nlohmann::ordered_json out = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < graph.size(); ++i) {
            const TrafficFlow &f = graph.flows[i];
            out.push_back({{"id", f.id},
                           {"kind", to_string(f.kind)},
                           {"provenance", to_string(graph.tags[i].provenance)},
                           {"layer", graph.tags[i].layer},
                           {"iteration", graph.tags[i].iteration},
                           {"volume", f.volume},
                           {"sources", join(f.sources)},
                           {"destinations", join(f.destinations)},
                           {"ready", f.ready_time},
                           {"deadline", f.qos_deadline}});
        }
        return out.dump(2) + "\n";
    }
    const char *sep = format == ReportFormat::Csv ? "," : " ";
    std::string out = fmt::format("id{0}kind{0}provenance{0}layer{0}iteration{0}volume{0}sources{0}destinations{0}"
                                  "ready{0}deadline\n",
                                  sep);
    for (std::size_t i = 0; i < graph.size(); ++i) {
        const TrafficFlow &f = graph.flows[i];
        out += fmt::format("{1}{0}{2}{0}{3}{0}{4}{0}{5}{0}{6}{0}\"{7}\"{0}\"{8}\"{0}{9}{0}{10}\n", sep, f.id,
                           to_string(f.kind), to_string(graph.tags[i].provenance), graph.tags[i].layer,
                           graph.tags[i].iteration, f.volume, join(f.sources), join(f.destinations), f.ready_time,
                           f.qos_deadline);
    }
    return out;
}

std::string routes_text(const MeshTopology &mesh, const std::vector<RoutePlan> &plans) {
    std::string out = "flow kind hub dual_phase streams phase1_hops tree_depth\n";
    ChannelLoads loads(mesh);
    for (const RoutePlan &p : plans) {
        for (const auto &[c, v] : p.total_channel_loads) loads.add(mesh.channel_index(c), v);
        out += fmt::format("{} {} {} {} {} {} {}\n", p.flow_id, to_string(p.kind), to_string(p.hub),
                           p.dual_phase ? 1 : 0, p.streams.size(), static_cast<int>(p.phase1_path.size()) - 1,
                           p.phase2_tree.max_depth());
    }
    out += fmt::format("# max channel load {} flit-slots\n", loads.max());
    return out;
}

std::string sim_text(const SimResult &sim, const TileReport &tiles, ReportFormat format) {
    const char *sep = format == ReportFormat::Csv ? "," : " ";
    std::string out = fmt::format("flow{0}inject{0}head{0}tail{0}flits_injected{0}flits_ejected\n", sep);
    for (const FlowRecord &f : sim.flows) {
        out += fmt::format("{1}{0}{2}{0}{3}{0}{4}{0}{5}{0}{6}\n", sep, f.flow_id, f.inject, f.head, f.tail,
                           f.flits_injected, f.flits_ejected);
    }
    out += fmt::format("# makespan {} mean_bounded_ratio {:.6f} max_bounded_ratio {:.6f} communication {} stall {}\n",
                       tiles.makespan, tiles.mean_bounded_ratio, tiles.max_bounded_ratio, tiles.communication,
                       tiles.total_stall);
    return out;
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::RuntimeConflict:
        case ErrorKind::DeadlockDetected:
        case ErrorKind::ZeroCompute: return kExitSimulation;
        default: return kExitValidation;
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Slot-scheduled mesh NoC planner and simulator"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--wire-width", g.wire_widths, "Flit width(s) in bits, comma separated")->delimiter(',');
    app.add_option("--seed", g.seed, "Seed for the EA, ROMM and workload generation");
    app.add_option("--out", g.out_dir, "Write reports into this directory instead of stdout");
    app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"csv", "json", "table"}));
    app.add_flag("--trace", g.trace, "Append a per-cycle flit trace (simulate)");
    app.add_flag("--no-ea", g.no_ea, "Route phase 1 with plain X-Y");
    app.add_flag("--no-dual-phase", g.no_dual_phase, "Send collectives as unicasts");
    app.add_option("--ea-population", g.ea_population, "EA population size");
    app.add_option("--ea-generations", g.ea_generations, "EA generation count");
    app.add_option("--framing", g.framing, "Flit framing")->check(CLI::IsMember({"chunk", "packet"}));
    app.fallthrough();

    std::string path;
    std::string scheme_name = "METRO";
    std::vector<std::string> scheme_names;

    auto *extract = app.add_subcommand("extract", "List the flows a workload generates");
    extract->add_option("workload", path, "Workload file")->required()->check(CLI::ExistingFile);
    auto *route = app.add_subcommand("route", "Route every flow and summarize the plans");
    route->add_option("workload", path)->required()->check(CLI::ExistingFile);
    auto *sched = app.add_subcommand("schedule", "Slot table and lateness summary");
    sched->add_option("workload", path)->required()->check(CLI::ExistingFile);
    auto *emit_config = app.add_subcommand("emit-config", "Router tables and stream headers");
    emit_config->add_option("workload", path)->required()->check(CLI::ExistingFile);
    auto *simulate = app.add_subcommand("simulate", "Simulate one scheme at one width");
    simulate->add_option("workload", path)->required()->check(CLI::ExistingFile);
    simulate->add_option("--scheme", scheme_name, "METRO, DOR, XYYX, ROMM or MAD");
    auto *compare = app.add_subcommand("compare", "Bounded ratios across widths and schemes");
    compare->add_option("workload", path)->required()->check(CLI::ExistingFile);
    compare->add_option("--schemes", scheme_names, "Subset of schemes")->delimiter(',');
    auto *ablate = app.add_subcommand("ablate", "Cumulative feature ladder");
    ablate->add_option("workload", path)->required()->check(CLI::ExistingFile);

    SyntheticParams synth;
    auto *gen = app.add_subcommand("gen-workload", "Write a random synthetic workload");
    gen->add_option("--width", synth.width);
    gen->add_option("--height", synth.height);
    gen->add_option("--layers", synth.layers);
    gen->add_option("--max-tiles", synth.max_tiles);
    gen->add_option("--max-iterations", synth.max_iterations);
    gen->add_option("--max-flows", synth.max_flows);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        const ReportFormat format = format_of(g);
        const PipelineOptions options = options_of(g);

        if (*gen) {
            if (!g.wire_widths.empty()) synth.wire_width = g.wire_widths.front();
            emit(g, "workload", write_workload(generate_workload(synth, g.seed)));
            return 0;
        }

        const WorkloadFile file = load_for(g, path);
        const std::string name = file.name.empty() ? std::filesystem::path(path).stem().string() : file.name;
        const WorkloadSpec &spec = file.spec;

        if (*extract) {
            emit(g, "flows", flows_text(extract_flows(spec), format));
        } else if (*route) {
            const CommunicationGraph graph = extract_flows(spec);
            emit(g, "routes", routes_text(spec.mesh, route_all(spec.mesh, graph, options.routing)));
        } else if (*sched) {
            const MetroRun run = plan_metro(spec, options);
            std::string text = dump_schedule(run.schedule);
            text += fmt::format("# conflicts {}\n", run.conflicts.size());
            emit(g, "schedule", text);
        } else if (*emit_config) {
            emit(g, "config", dump_config(plan_metro(spec, options).config));
        } else if (*simulate) {
            const auto scheme = parse_scheme(scheme_name);
            if (!scheme) {
                std::cerr << "unknown scheme '" << scheme_name << "'\n";
                return kExitUsage;
            }
            SimResult sim;
            CommunicationGraph graph;
            if (*scheme == Scheme::METRO) {
                MetroRun run = run_metro(spec, options);
                sim = std::move(run.sim);
                graph = std::move(run.graph);
            } else {
                graph = extract_flows(spec);
                BaselineParams params = options.baseline;
                params.algorithm = static_cast<BaselineAlgorithm>(static_cast<int>(*scheme) - 1);
                params.trace = g.trace;
                sim = simulate_baseline(spec.mesh, graph, params);
            }
            std::string text = sim_text(sim, simulate_tiles(spec, graph, completions(sim)), format);
            if (g.trace) text += sim.trace;
            emit(g, "simulation", text);
        } else if (*compare) {
            std::vector<int> widths = g.wire_widths;
            if (widths.empty()) widths = file.wire_widths;
            if (widths.empty()) widths = {spec.mesh.wire_width()};
            std::vector<Scheme> schemes;
            for (const std::string &s : scheme_names) {
                const auto parsed = parse_scheme(s);
                if (!parsed) {
                    std::cerr << "unknown scheme '" << s << "'\n";
                    return kExitUsage;
                }
                schemes.push_back(*parsed);
            }
            if (schemes.empty()) schemes.assign(std::begin(kAllSchemes), std::end(kAllSchemes));
            const ExperimentReport report = run_comparison(spec, name, widths, schemes, options);
            emit(g, "compare", format_cells(report.cells, format));
        } else if (*ablate) {
            const int width = g.wire_widths.empty() ? spec.mesh.wire_width() : g.wire_widths.front();
            emit(g, "ablation", format_ablation(name, width, run_ablation(spec, width, options), format));
        }
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSimulation;
    }
    return 0;
}
