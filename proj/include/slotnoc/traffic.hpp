// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slotnoc/core_model.hpp"

namespace slotnoc {

struct LayerSpec {
    std::string name;
    int tile_count = 0;
    // Empty until place_regions() assigns a Hilbert run.
    std::vector<NodeId> region;
    Bits weight_tile_bits = 0;
    Bits input_tile_bits = 0;
    Bits output_tile_bits = 0;
    int iterations = 1;
    Slot compute_slots_per_iteration = 1;
    // Tile accumulating partial sums; chosen by resolve_workload() when unset.
    std::optional<NodeId> reduction_tile;
    std::optional<std::string> upstream;
};

struct WorkloadSpec {
    MeshTopology mesh;
    std::vector<LayerSpec> layers;
    // Memory controller serving each layer, keyed by layer name.
    std::map<std::string, NodeId> mc_assignment;

    const LayerSpec *find_layer(const std::string &name) const;
};

enum class Provenance : std::uint8_t { Weights, Inputs, PsumReduce, OutputSpill, InterLayer };
std::string_view to_string(Provenance p);

struct FlowTag {
    int layer = 0;
    int iteration = 0;
    Provenance provenance = Provenance::Weights;
};

struct CommunicationGraph {
    // Ordered by ready time; ids are dense and equal the index.
    std::vector<TrafficFlow> flows;
    std::vector<FlowTag> tags;

    std::size_t size() const { return flows.size(); }
    bool empty() const { return flows.empty(); }
};

// Hilbert-curve visiting order of every mesh node. Non power-of-two meshes
// are padded to the enclosing 2^k square and out-of-mesh points skipped.
std::vector<NodeId> hilbert_order(int width, int height);

// Gives every layer with an empty region a consecutive run of the Hilbert
// order, in layer order, skipping tiles already claimed by explicit regions.
WorkloadSpec place_regions(WorkloadSpec workload);

// Fills memory-controller and reduction-tile defaults, then validates.
WorkloadSpec resolve_workload(WorkloadSpec workload);

void validate_workload(const WorkloadSpec &workload);

CommunicationGraph extract_flows(const WorkloadSpec &workload);

Slot qos_slack(const TrafficFlow &flow, Slot now);

// Downstream consumers of a layer (layers naming it as upstream).
bool has_downstream(const WorkloadSpec &workload, const std::string &layer);

}  // namespace slotnoc
