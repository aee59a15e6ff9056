// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

#pragma once

#include <compare>
#include <span>
#include <vector>

#include "slotnoc/routing.hpp"

namespace slotnoc::ea {

using Genome = std::vector<NodeId>;

// Lower is better: channel load first, then path length.
struct Fitness {
    Slot load = 0;
    int length = 0;

    friend bool operator==(const Fitness &, const Fitness &) = default;
    friend auto operator<=>(const Fitness &, const Fitness &) = default;
};

struct Context {
    const MeshTopology *mesh = nullptr;
    NodeId src;
    NodeId dst;
    const ChannelLoads *loads = nullptr;
    Slot flits = 0;
    FitnessKind kind = FitnessKind::MaxLoad;
};

// Fitness of the loop-erased X-Y expansion of a genome.
Fitness evaluate(const Context &ctx, const Genome &genome);

// Reference kernel.
std::vector<Fitness> evaluate_population_serial(const Context &ctx, std::span<const Genome> population);

// OpenMP kernel; bit-identical to the serial one.
std::vector<Fitness> evaluate_population(const Context &ctx, std::span<const Genome> population);

// Nodes a gene may take: src/dst bounding box grown by one ring, clipped to
// the mesh.
std::vector<NodeId> candidate_nodes(const MeshTopology &mesh, NodeId src, NodeId dst);

struct SearchResult {
    Genome best;
    Fitness fitness;
    std::vector<NodeId> path;
};

// `parallel` selects the population kernel; results do not depend on it.
SearchResult search(const Context &ctx, const EaParams &params, std::uint64_t seed, bool parallel = true);

}  // namespace slotnoc::ea
