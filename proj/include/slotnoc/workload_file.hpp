// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "slotnoc/traffic.hpp"

namespace slotnoc {

inline constexpr int kWorkloadFormatVersion = 1;

// A versioned YAML document:
//
//   version: 1
//   name: hybrid-a
//   wire_widths: [256, 512, 1024, 2048]
//   mesh: {width: 16, height: 16, memory_controllers: edge-midpoints,
//          slot_cost: 3, memory_injection_bits: 1200}
//   layers:
//     - {name: conv1, tiles: 16, iterations: 8, weight_bits: 8192,
//        input_bits: 4096, output_bits: 2048, compute_slots: 900}
//
// Optional layer keys: upstream, region ([[x, y], ...]), reduction_tile
// ([x, y]), memory_controller ([x, y]). `memory_controllers` is either
// `edge-midpoints` or a list of [x, y]. Unknown keys are errors.
struct WorkloadFile {
    std::string name;
    std::string note;
    std::vector<int> wire_widths;
    WorkloadSpec spec;
};

// Throws ParseError for malformed text, InvalidWorkload for bad values.
// The returned spec is resolved (regions, controllers, reduction tiles).
WorkloadFile parse_workload(std::string_view text);
WorkloadFile load_workload(const std::filesystem::path &path);

// Emits whatever placement the spec carries. A resolved spec writes its
// regions, reduction tiles and controllers, so re-parsing reproduces it.
std::string write_workload(const WorkloadFile &file);

}  // namespace slotnoc
