// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "slotnoc/report.hpp"
#include "slotnoc/synthetic.hpp"

namespace slotnoc {
namespace {

namespace fs = std::filesystem;

const char *kLight = R"(version: 1
name: light
mesh:
  width: 8
  height: 8
  memory_controllers: edge-midpoints
  slot_cost: 3
layers:
  - name: a
    tiles: 4
    iterations: 2
    weight_bits: 2048
    input_bits: 2048
    output_bits: 2048
    compute_slots: 2000
  - name: b
    tiles: 4
    iterations: 2
    weight_bits: 2048
    input_bits: 2048
    output_bits: 2048
    compute_slots: 2000
    upstream: a
)";

ErrorKind kind_of(auto &&fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorKind::InvalidWorkload;
}

PipelineOptions quick() {
    PipelineOptions o;
    o.routing.ea.population_size = 16;
    o.routing.ea.generations = 10;
    return o;
}

TEST(BoundedRatio, Examples) {
    EXPECT_DOUBLE_EQ(bounded_ratio(0, 1000), 0.0);
    EXPECT_DOUBLE_EQ(bounded_ratio(1000, 1000), 1.0);
    EXPECT_FALSE(communication_bound(bounded_ratio(1000, 1000)));
    EXPECT_DOUBLE_EQ(bounded_ratio(1100, 1000), 1.1);
    EXPECT_TRUE(communication_bound(bounded_ratio(1100, 1000)));
    EXPECT_EQ(kind_of([] { bounded_ratio(5, 0); }), ErrorKind::ZeroCompute);
}

TEST(Scheme, ParsesCaseInsensitively) {
    EXPECT_EQ(parse_scheme("metro"), Scheme::METRO);
    EXPECT_EQ(parse_scheme("Romm"), Scheme::ROMM);
    EXPECT_FALSE(parse_scheme("torus").has_value());
}

TEST(WorkloadFile, ParsesLayersAndMesh) {
    const WorkloadFile f = parse_workload(kLight);
    EXPECT_EQ(f.name, "light");
    EXPECT_EQ(f.spec.mesh.width(), 8);
    EXPECT_EQ(f.spec.mesh.channel_slot_cost(), 3);
    EXPECT_EQ(f.spec.mesh.mc_nodes().size(), 8u);
    ASSERT_EQ(f.spec.layers.size(), 2u);
    EXPECT_EQ(f.spec.layers[1].upstream, "a");
    EXPECT_EQ(f.spec.layers[0].region.size(), 4u);
    EXPECT_TRUE(f.spec.layers[0].reduction_tile.has_value());
}

TEST(WorkloadFile, RejectsUnknownKeysAndVersions) {
    std::string text = kLight;
    EXPECT_EQ(kind_of([&] { parse_workload(text + "colour: blue\n"); }), ErrorKind::ParseError);
    std::string layer_key = text;
    layer_key.replace(layer_key.find("    upstream: a"), 15, "    upstrem: a");
    EXPECT_EQ(kind_of([&] { parse_workload(layer_key); }), ErrorKind::ParseError);
    std::string v2 = text;
    v2.replace(0, 10, "version: 2");
    EXPECT_EQ(kind_of([&] { parse_workload(v2); }), ErrorKind::ParseError);
    EXPECT_EQ(kind_of([] { parse_workload("version: [1\n"); }), ErrorKind::ParseError);
    std::string zero = text;
    zero.replace(zero.find("tiles: 4"), 8, "tiles: 0");
    EXPECT_EQ(kind_of([&] { parse_workload(zero); }), ErrorKind::CapacityExceeded);
}

TEST(WorkloadFile, RoundTripsBundledAndSynthetic) {
    std::vector<WorkloadFile> files;
    for (const auto &entry : fs::directory_iterator(SLOTNOC_WORKLOADS)) files.push_back(load_workload(entry.path()));
    ASSERT_GE(files.size(), 4u);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) files.push_back(generate_workload(SyntheticParams{}, seed));
    for (const WorkloadFile &f : files) {
        // Parsing pins placement, so the text is a fixed point after one pass.
        const WorkloadFile back = parse_workload(write_workload(f));
        const std::string pinned = write_workload(back);
        EXPECT_EQ(write_workload(parse_workload(pinned)), pinned) << f.name;
        EXPECT_EQ(parse_workload(pinned).spec.layers.size(), f.spec.layers.size()) << f.name;
        EXPECT_EQ(extract_flows(back.spec).size(), extract_flows(resolve_workload(f.spec)).size()) << f.name;
    }
}

TEST(Synthetic, RespectsFlowBudget) {
    SyntheticParams p;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const WorkloadSpec spec = resolve_workload(generate_workload(p, seed).spec);
        const std::size_t n = extract_flows(spec).size();
        EXPECT_LE(n, static_cast<std::size_t>(p.max_flows));
        EXPECT_EQ(n, static_cast<std::size_t>(expected_flow_count(spec)));
    }
    EXPECT_EQ(write_workload(generate_workload(p, 8)), write_workload(generate_workload(p, 8)));
}

TEST(Comparison, ParallelMatchesSerial) {
    const WorkloadSpec spec = resolve_workload(generate_workload(SyntheticParams{}, 4).spec);
    const std::vector<int> widths{256, 1024};
    const ExperimentReport par = run_comparison(spec, "w", widths, kAllSchemes, quick());
    const ExperimentReport ser = run_comparison_serial(spec, "w", widths, kAllSchemes, quick());
    ASSERT_EQ(par.cells.size(), 10u);
    EXPECT_EQ(format_cells(par.cells, ReportFormat::Csv), format_cells(ser.cells, ReportFormat::Csv));
    EXPECT_EQ(format_layers(par.cells, ReportFormat::Json), format_layers(ser.cells, ReportFormat::Json));
}

TEST(Comparison, ComputeTotalsDoNotDependOnScheme) {
    const WorkloadSpec spec = resolve_workload(generate_workload(SyntheticParams{}, 12).spec);
    const std::vector<int> widths{256};
    const ExperimentReport r = run_comparison(spec, "w", widths, kAllSchemes, quick());
    for (const CellResult &c : r.cells) {
        EXPECT_EQ(c.tiles.total_compute, r.cells.front().tiles.total_compute);
        EXPECT_EQ(c.ideal_makespan, r.cells.front().ideal_makespan);
        EXPECT_GE(c.normalized_makespan, 1.0);
        for (std::size_t l = 0; l < c.tiles.layers.size(); ++l) {
            EXPECT_EQ(c.tiles.layers[l].compute, r.cells.front().tiles.layers[l].compute);
        }
    }
}

TEST(Comparison, EmptyWorkloadGivesEmptyReport) {
    const WorkloadFile f = parse_workload("version: 1\nmesh:\n  width: 4\n  height: 4\n  memory_controllers: edge-midpoints\n");
    const std::vector<int> widths{256, 512};
    const ExperimentReport r = run_comparison(f.spec, "empty", widths, kAllSchemes, quick());
    EXPECT_TRUE(r.cells.empty());
    EXPECT_TRUE(run_ablation(f.spec, 256, quick()).empty());
    const std::string csv = format_cells(r.cells, ReportFormat::Csv);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1);
}

TEST(Comparison, LightTrafficIsHiddenAtWideWires) {
    const WorkloadFile f = parse_workload(kLight);
    const std::vector<int> widths{2048};
    const ExperimentReport r = run_comparison(f.spec, "light", widths, kAllSchemes, quick());
    for (const CellResult &c : r.cells) {
        EXPECT_LE(c.tiles.mean_bounded_ratio, 1.0) << to_string(c.scheme);
        EXPECT_EQ(c.tiles.total_stall, 0) << to_string(c.scheme);
    }
    EXPECT_EQ(ideal_width(r.cells, Scheme::METRO), 2048);
}

TEST(Comparison, IdealWidthPicksSmallestWidthAtOrBelowOne) {
    std::vector<CellResult> cells(3);
    const std::array<std::pair<int, double>, 3> points{{{256, 1.7}, {512, 0.9}, {1024, 0.4}}};
    for (std::size_t i = 0; i < cells.size(); ++i) {
        cells[i].wire_width = points[i].first;
        cells[i].tiles.mean_bounded_ratio = points[i].second;
    }
    EXPECT_EQ(ideal_width(cells, Scheme::METRO), 512);
    EXPECT_FALSE(ideal_width(cells, Scheme::DOR).has_value());
}

const AblationRow &stage(const std::vector<AblationRow> &rows, const std::string &name) {
    for (const AblationRow &r : rows) {
        if (r.stage == name) return r;
    }
    throw std::runtime_error("missing stage " + name);
}

TEST(Ablation, StageNamesInOrder) {
    const WorkloadFile f = parse_workload(kLight);
    const std::vector<AblationRow> rows = run_ablation(f.spec, 512, quick());
    std::vector<std::string> names;
    for (const AblationRow &r : rows) names.push_back(r.stage);
    EXPECT_EQ(names, (std::vector<std::string>{"metro-routers", "+injection-control", "+dual-phase", "+ea-balancing",
                                               "+chunk-framing"}));
}

TEST(Ablation, DegenerateEaMatchesPlainRouting) {
    const WorkloadSpec spec = resolve_workload(generate_workload(SyntheticParams{}, 21).spec);
    PipelineOptions o = quick();
    o.routing.ea.max_intermediate_nodes = 0;
    const std::vector<AblationRow> rows = run_ablation(spec, 256, o);
    EXPECT_EQ(stage(rows, "+ea-balancing").communication, stage(rows, "+dual-phase").communication);
    EXPECT_EQ(stage(rows, "+ea-balancing").makespan, stage(rows, "+dual-phase").makespan);
}

TEST(Ablation, ChunkFramingChangesNothingForOneFlitPayloads) {
    // Every flow carries exactly one full flit, so a header never shares a
    // flit with payload under either framing.
    const std::string text = R"(version: 1
mesh:
  width: 4
  height: 4
  memory_controllers: edge-midpoints
  wire_width: 256
layers:
  - name: a
    tiles: 1
    iterations: 1
    weight_bits: 256
    input_bits: 256
    output_bits: 256
    compute_slots: 50
  - name: b
    tiles: 1
    iterations: 1
    weight_bits: 256
    input_bits: 256
    output_bits: 256
    compute_slots: 80
)";
    const WorkloadFile f = parse_workload(text);
    const std::vector<AblationRow> rows = run_ablation(f.spec, 256, quick());
    EXPECT_EQ(stage(rows, "+chunk-framing").communication, stage(rows, "+ea-balancing").communication);
    EXPECT_DOUBLE_EQ(stage(rows, "+chunk-framing").reduction, 0.0);
}

TEST(Report, FormatsAreStable) {
    const WorkloadFile f = parse_workload(kLight);
    const std::vector<int> widths{1024};
    const std::vector<Scheme> schemes{Scheme::METRO, Scheme::DOR};
    const ExperimentReport r = run_comparison(f.spec, "light", widths, schemes, quick());
    const std::string csv = format_cells(r.cells, ReportFormat::Csv);
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "workload,wire_width,scheme,mean_bounded_ratio,max_bounded_ratio,communication,makespan,ideal_makespan,"
              "normalized_makespan,total_compute,total_stall");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
    EXPECT_EQ(format_cells(r.cells, ReportFormat::Json).front(), '[');
    EXPECT_EQ(parse_format("json"), ReportFormat::Json);
    EXPECT_FALSE(parse_format("xml").has_value());
}

struct CliRun {
    int code = -1;
    std::string out;
};

CliRun cli(const std::string &args) {
    const std::string cmd = std::string(SLOTNOC_CLI) + " " + args + " 2>/dev/null";
    CliRun r;
    FILE *p = popen(cmd.c_str(), "r");
    if (!p) return r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

class CliTest : public ::testing::Test {
   protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("slotnoc-cli-" + std::to_string(::getpid()));
        fs::create_directories(dir_);
        std::ofstream(dir_ / "light.yaml") << kLight;
        std::ofstream(dir_ / "bad.yaml") << std::string(kLight) + "colour: blue\n";
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string &name) const { return (dir_ / name).string(); }
    fs::path dir_;
};

TEST_F(CliTest, ExitCodes) {
    EXPECT_EQ(cli("--help").code, 0);
    EXPECT_EQ(cli("").code, 1);
    EXPECT_EQ(cli("frobnicate").code, 1);
    EXPECT_EQ(cli("schedule " + path("light.yaml") + " --format yaml").code, 1);
    EXPECT_EQ(cli("schedule " + path("missing.yaml")).code, 1);
    EXPECT_EQ(cli("schedule " + path("bad.yaml")).code, 2);
    EXPECT_EQ(cli("simulate " + path("light.yaml") + " --scheme torus").code, 1);
    EXPECT_EQ(cli("schedule " + path("light.yaml")).code, 0);
}

TEST_F(CliTest, EverySubcommandIsByteIdenticalAcrossRuns) {
    const std::string w = path("light.yaml");
    const std::vector<std::string> commands{
        "extract " + w,
        "route " + w + " --seed 5",
        "schedule " + w + " --wire-width 256",
        "emit-config " + w,
        "simulate " + w + " --scheme ROMM --seed 9 --format csv",
        "simulate " + w + " --scheme METRO --trace",
        "compare " + w + " --wire-width 256,1024 --format csv --ea-generations 5",
        "ablate " + w + " --wire-width 1024 --format json --ea-generations 5",
        "gen-workload --seed 13",
    };
    for (const std::string &c : commands) {
        const CliRun a = cli(c);
        const CliRun b = cli(c);
        EXPECT_EQ(a.code, 0) << c;
        EXPECT_FALSE(a.out.empty()) << c;
        EXPECT_EQ(a.out, b.out) << c;
    }
}

TEST_F(CliTest, OutDirectoryAndGeneratedWorkload) {
    const CliRun gen = cli("gen-workload --seed 3 --max-flows 60");
    ASSERT_EQ(gen.code, 0);
    std::ofstream(dir_ / "gen.yaml") << gen.out;
    const WorkloadFile f = load_workload(dir_ / "gen.yaml");
    EXPECT_LE(extract_flows(f.spec).size(), 60u);

    const CliRun r = cli("compare " + path("gen.yaml") + " --format csv --ea-generations 5 --out " + path("reports"));
    ASSERT_EQ(r.code, 0);
    bool found = false;
    for (const auto &e : fs::directory_iterator(dir_ / "reports")) found = found || e.path().extension() == ".csv";
    EXPECT_TRUE(found);
}

TEST_F(CliTest, EmptyWorkloadExitsCleanly) {
    std::ofstream(dir_ / "empty.yaml") << "version: 1\nmesh:\n  width: 4\n  height: 4\n  memory_controllers: edge-midpoints\n";
    const CliRun r = cli("compare " + path("empty.yaml") + " --format csv");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1);
}

}  // namespace
}  // namespace slotnoc
