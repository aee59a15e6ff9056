// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "slotnoc/traffic.hpp"

namespace slotnoc {
namespace {

// Textbook d2xy on an n x n grid, n a power of two.
NodeId hilbert_d2xy(int n, int d) {
    int x = 0, y = 0, t = d;
    for (int s = 1; s < n; s *= 2) {
        const int rx = 1 & (t / 2);
        const int ry = 1 & (t ^ rx);
        if (ry == 0) {
            if (rx == 1) {
                x = s - 1 - x;
                y = s - 1 - y;
            }
            std::swap(x, y);
        }
        x += s * rx;
        y += s * ry;
        t /= 4;
    }
    return {x, y};
}

std::vector<NodeId> hilbert_oracle(int w, int h) {
    int n = 1;
    while (n < std::max(w, h)) n *= 2;
    std::vector<NodeId> out;
    for (int d = 0; d < n * n; ++d) {
        const NodeId p = hilbert_d2xy(n, d);
        if (p.x < w && p.y < h) out.push_back(p);
    }
    return out;
}

LayerSpec layer(const std::string &name, int tiles, int iterations, Slot compute = 100) {
    LayerSpec l;
    l.name = name;
    l.tile_count = tiles;
    l.iterations = iterations;
    l.weight_tile_bits = 1024;
    l.input_tile_bits = 512;
    l.output_tile_bits = 256;
    l.compute_slots_per_iteration = compute;
    return l;
}

WorkloadSpec workload(int w, int h, std::vector<LayerSpec> layers) {
    WorkloadSpec spec;
    spec.mesh = MeshTopology(w, h, MeshTopology::edge_midpoint_controllers(w, h), 256);
    spec.layers = std::move(layers);
    return resolve_workload(std::move(spec));
}

TEST(Hilbert, TwoByTwo) {
    const std::vector<NodeId> want{{0, 0}, {0, 1}, {1, 1}, {1, 0}};
    EXPECT_EQ(hilbert_order(2, 2), want);
}

TEST(Hilbert, MatchesD2xyOracle) {
    for (int w : {1, 2, 3, 4, 5, 8, 12, 16}) {
        for (int h : {1, 2, 4, 7, 8, 16}) {
            EXPECT_EQ(hilbert_order(w, h), hilbert_oracle(w, h)) << w << "x" << h;
        }
    }
}

TEST(PlaceRegions, ConsecutiveHilbertRuns) {
    WorkloadSpec spec;
    spec.mesh = MeshTopology(4, 4, {{0, 1}}, 256);
    spec.layers = {layer("a", 4, 1), layer("b", 4, 1)};
    const WorkloadSpec placed = place_regions(spec);
    const std::vector<NodeId> order = hilbert_oracle(4, 4);
    EXPECT_EQ(placed.layers[0].region, std::vector<NodeId>(order.begin(), order.begin() + 4));
    EXPECT_EQ(placed.layers[1].region, std::vector<NodeId>(order.begin() + 4, order.begin() + 8));
}

TEST(PlaceRegions, WholeTwoByTwo) {
    WorkloadSpec spec;
    spec.mesh = MeshTopology(2, 2, {{0, 0}}, 256);
    spec.layers = {layer("a", 4, 1)};
    const std::vector<NodeId> want{{0, 0}, {0, 1}, {1, 1}, {1, 0}};
    EXPECT_EQ(place_regions(spec).layers[0].region, want);
}

TEST(PlaceRegions, CapacityErrors) {
    WorkloadSpec spec;
    spec.mesh = MeshTopology(2, 2, {{0, 0}}, 256);
    spec.layers = {layer("a", 3, 1), layer("b", 2, 1)};
    try {
        place_regions(spec);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::CapacityExceeded);
    }
    spec.layers = {layer("a", 0, 1)};
    EXPECT_THROW(resolve_workload(spec), Error);
}

TEST(ExtractFlows, SingleTileLayerGivesThreeUnicasts) {
    const CommunicationGraph g = extract_flows(workload(4, 4, {layer("a", 1, 1)}));
    ASSERT_EQ(g.size(), 3u);
    std::multiset<Provenance> kinds;
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_EQ(g.flows[i].kind, PatternKind::Unicast);
        kinds.insert(g.tags[i].provenance);
    }
    EXPECT_EQ(kinds, (std::multiset<Provenance>{Provenance::Weights, Provenance::Inputs, Provenance::OutputSpill}));
}

TEST(ExtractFlows, FourTileTwoIterationSkeleton) {
    const Slot P = 100;
    const WorkloadSpec spec = workload(4, 4, {layer("a", 4, 2, P)});
    const CommunicationGraph g = extract_flows(spec);
    struct Row {
        PatternKind kind;
        Provenance prov;
        int iteration;
        Slot ready, deadline;
    };
    // Hand-enumerated double-buffered pipeline: operands for iteration i are
    // fetched while i-1 computes, partial sums leave while i+1 computes.
    const std::vector<Row> want{
        {PatternKind::Multicast, Provenance::Weights, 0, 0, P},
        {PatternKind::Multicast, Provenance::Inputs, 0, 0, P},
        {PatternKind::Multicast, Provenance::Weights, 1, P, 2 * P},
        {PatternKind::Multicast, Provenance::Inputs, 1, P, 2 * P},
        {PatternKind::Reduce, Provenance::PsumReduce, 0, 2 * P, 3 * P},
        {PatternKind::Reduce, Provenance::PsumReduce, 1, 3 * P, 4 * P},
        {PatternKind::Unicast, Provenance::OutputSpill, 1, 4 * P, 5 * P},
    };
    ASSERT_EQ(g.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
        SCOPED_TRACE(i);
        EXPECT_EQ(g.flows[i].id, i);
        EXPECT_EQ(g.flows[i].kind, want[i].kind);
        EXPECT_EQ(g.tags[i].provenance, want[i].prov);
        EXPECT_EQ(g.tags[i].iteration, want[i].iteration);
        EXPECT_EQ(g.flows[i].ready_time, want[i].ready);
        EXPECT_EQ(g.flows[i].qos_deadline, want[i].deadline);
    }
    const LayerSpec &l = spec.layers[0];
    EXPECT_EQ(g.flows[0].volume, l.weight_tile_bits * 4);
    EXPECT_EQ(g.flows[4].destinations, std::vector<NodeId>{*l.reduction_tile});
    EXPECT_EQ(g.flows[6].destinations, std::vector<NodeId>{spec.mc_assignment.at("a")});
}

TEST(ExtractFlows, UpstreamFeedsInputs) {
    LayerSpec b = layer("b", 3, 1);
    b.upstream = "a";
    const WorkloadSpec spec = workload(4, 4, {layer("a", 2, 1), b});
    const CommunicationGraph g = extract_flows(spec);
    bool found = false;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.tags[i].layer == 1 && g.tags[i].provenance == Provenance::InterLayer) {
            found = true;
            EXPECT_EQ(g.flows[i].source(), *spec.layers[0].reduction_tile);
            EXPECT_EQ(g.flows[i].source_port, PortKind::Tile);
            EXPECT_EQ(g.flows[i].destinations, spec.layers[1].region);
        }
        // Only the last layer spills.
        if (g.tags[i].provenance == Provenance::OutputSpill) EXPECT_EQ(g.tags[i].layer, 1);
    }
    EXPECT_TRUE(found);
}

TEST(ExtractFlows, DanglingUpstream) {
    WorkloadSpec spec;
    spec.mesh = MeshTopology(4, 4, MeshTopology::edge_midpoint_controllers(4, 4), 256);
    LayerSpec b = layer("b", 2, 1);
    b.upstream = "ghost";
    spec.layers = {b};
    try {
        extract_flows(resolve_workload(spec));
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::DanglingUpstream);
    }
}

class ExtractProperties : public ::testing::TestWithParam<int> {};

TEST_P(ExtractProperties, ConservationRegionsAndDeterminism) {
    std::mt19937_64 rng(GetParam());
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    std::vector<LayerSpec> layers;
    const int n = pick(1, 4);
    for (int i = 0; i < n; ++i) {
        LayerSpec l = layer("l" + std::to_string(i), pick(1, 8), pick(1, 3), pick(10, 200));
        l.weight_tile_bits = pick(1, 5000);
        l.input_tile_bits = pick(1, 5000);
        l.output_tile_bits = pick(1, 5000);
        if (i > 0 && pick(0, 1) == 1) l.upstream = "l" + std::to_string(i - 1);
        layers.push_back(l);
    }
    const WorkloadSpec spec = workload(8, 8, layers);
    const CommunicationGraph g = extract_flows(spec);

    std::set<NodeId> claimed;
    for (const LayerSpec &l : spec.layers) {
        for (const NodeId &t : l.region) EXPECT_TRUE(claimed.insert(t).second);
    }

    std::map<int, Bits> mc_bits;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const TrafficFlow &f = g.flows[i];
        const LayerSpec &l = spec.layers[g.tags[i].layer];
        const NodeId mc = spec.mc_assignment.at(l.name);
        if (i > 0) EXPECT_LE(g.flows[i - 1].ready_time, f.ready_time);
        for (const NodeId &d : f.destinations) {
            const bool in_region = std::find(l.region.begin(), l.region.end(), d) != l.region.end();
            EXPECT_TRUE(in_region || d == mc);
        }
        if (f.kind == PatternKind::Reduce) EXPECT_EQ(f.destination(), *l.reduction_tile);
        if (f.source_port == PortKind::Memory) mc_bits[g.tags[i].layer] += f.volume;
    }
    for (std::size_t li = 0; li < spec.layers.size(); ++li) {
        const LayerSpec &l = spec.layers[li];
        const Bits per_iteration = l.weight_tile_bits + (l.upstream ? 0 : l.input_tile_bits);
        EXPECT_EQ(mc_bits[static_cast<int>(li)], l.iterations * per_iteration * l.tile_count);
    }

    const CommunicationGraph again = extract_flows(spec);
    ASSERT_EQ(again.size(), g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_EQ(again.flows[i].sources, g.flows[i].sources);
        EXPECT_EQ(again.flows[i].destinations, g.flows[i].destinations);
        EXPECT_EQ(again.flows[i].ready_time, g.flows[i].ready_time);
    }
}

INSTANTIATE_TEST_SUITE_P(Seeds, ExtractProperties, ::testing::Range(1, 41));

TEST(QosSlack, Examples) {
    TrafficFlow f;
    f.qos_deadline = 10;
    EXPECT_EQ(qos_slack(f, 4), 6);
    EXPECT_EQ(qos_slack(f, 10), 0);
    f.qos_deadline = 5;
    EXPECT_EQ(qos_slack(f, 9), -4);
}

}  // namespace
}  // namespace slotnoc
