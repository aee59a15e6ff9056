// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

#pragma once

#include <cstdint>

#include "slotnoc/traffic.hpp"
#include "slotnoc/workload_file.hpp"

namespace slotnoc {

struct SyntheticParams {
    int width = 8;
    int height = 8;
    int memory_controllers = 8;
    int wire_width = 256;
    int slot_cost = 3;
    int layers = 3;
    int min_tiles = 1;
    int max_tiles = 8;
    int min_iterations = 1;
    int max_iterations = 4;
    Bits min_tile_bits = 256;
    Bits max_tile_bits = 4096;
    Slot min_compute = 50;
    Slot max_compute = 400;
    // Chance that a layer consumes the previous layer's output.
    double chain_probability = 0.5;
    // Upper bound on extracted flows; iterations are trimmed to fit.
    int max_flows = 200;

    void validate() const;
};

// Deterministic for a given seed. Regions are left for Hilbert placement.
WorkloadFile generate_workload(const SyntheticParams &params, std::uint64_t seed);

// Flows extract_flows() will produce for this layer list.
int expected_flow_count(const WorkloadSpec &spec);

// Every tile sends `volume` bits to the memory port of `mc` at slot 0: the
// reduction-style burst that saturates the channels around a controller.
CommunicationGraph hotspot_burst(const MeshTopology &mesh, NodeId mc, Bits volume);

}  // namespace slotnoc
