// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

#pragma once

#include <optional>
#include <span>
#include <string>

#include "slotnoc/experiments.hpp"

namespace slotnoc {

enum class ReportFormat : std::uint8_t { Csv, Json, Table };
std::optional<ReportFormat> parse_format(std::string_view name);

std::string format_cells(std::span<const CellResult> cells, ReportFormat format);
std::string format_ablation(const std::string &workload, int wire_width, std::span<const AblationRow> rows,
                            ReportFormat format);

// Per-layer rows behind each cell (bounded ratio, stall, compute).
std::string format_layers(std::span<const CellResult> cells, ReportFormat format);

}  // namespace slotnoc
