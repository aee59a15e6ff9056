// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

#include "slotnoc/report.hpp"

#include <fmt/format.h>
#include <json.hpp>

namespace slotnoc {

namespace {

using nlohmann::ordered_json;

std::string fixed(double v) { return fmt::format("{:.6f}", v); }

// Columns right-aligned to their widest entry.
std::string render_table(const std::vector<std::vector<std::string>> &rows) {
    if (rows.empty()) return {};
    std::vector<std::size_t> width(rows.front().size(), 0);
    for (const auto &r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    }
    std::string out;
    for (const auto &r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            out += fmt::format("{:>{}}", r[i], width[i]);
            out += i + 1 < r.size() ? "  " : "\n";
        }
    }
    return out;
}

std::string render_csv(const std::vector<std::vector<std::string>> &rows) {
    std::string out;
    for (const auto &r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            out += r[i];
            out += i + 1 < r.size() ? "," : "\n";
        }
    }
    return out;
}

std::string render(const std::vector<std::vector<std::string>> &rows, ReportFormat format) {
    return format == ReportFormat::Table ? render_table(rows) : render_csv(rows);
}

}  // namespace

std::optional<ReportFormat> parse_format(std::string_view name) {
    if (name == "csv") return ReportFormat::Csv;
    if (name == "json") return ReportFormat::Json;
    if (name == "table") return ReportFormat::Table;
    return std::nullopt;
}

std::string format_cells(std::span<const CellResult> cells, ReportFormat format) {
    if (format == ReportFormat::Json) {
        ordered_json out = ordered_json::array();
        for (const CellResult &c : cells) {
            ordered_json layers = ordered_json::array();
            for (const LayerTiming &l : c.tiles.layers) {
                layers.push_back({{"layer", l.name},
                                  {"tiles", l.tiles},
                                  {"bounded_ratio", l.bounded_ratio},
                                  {"compute", l.compute},
                                  {"stall", l.stall},
                                  {"communication", l.communication}});
            }
            out.push_back({{"workload", c.workload},
                           {"wire_width", c.wire_width},
                           {"scheme", to_string(c.scheme)},
                           {"mean_bounded_ratio", c.tiles.mean_bounded_ratio},
                           {"max_bounded_ratio", c.tiles.max_bounded_ratio},
                           {"communication", c.tiles.communication},
                           {"makespan", c.tiles.makespan},
                           {"ideal_makespan", c.ideal_makespan},
                           {"normalized_makespan", c.normalized_makespan},
                           {"total_compute", c.tiles.total_compute},
                           {"total_stall", c.tiles.total_stall},
                           {"layers", layers}});
        }
        return out.dump(2) + "\n";
    }
    std::vector<std::vector<std::string>> rows{{"workload", "wire_width", "scheme", "mean_bounded_ratio",
                                                "max_bounded_ratio", "communication", "makespan", "ideal_makespan",
                                                "normalized_makespan", "total_compute", "total_stall"}};
    for (const CellResult &c : cells) {
        rows.push_back({c.workload, std::to_string(c.wire_width), std::string(to_string(c.scheme)),
                        fixed(c.tiles.mean_bounded_ratio), fixed(c.tiles.max_bounded_ratio),
                        std::to_string(c.tiles.communication), std::to_string(c.tiles.makespan),
                        std::to_string(c.ideal_makespan), fixed(c.normalized_makespan),
                        std::to_string(c.tiles.total_compute), std::to_string(c.tiles.total_stall)});
    }
    return render(rows, format);
}

std::string format_layers(std::span<const CellResult> cells, ReportFormat format) {
    std::vector<std::vector<std::string>> rows{
        {"workload", "wire_width", "scheme", "layer", "tiles", "bounded_ratio", "compute", "stall", "communication"}};
    for (const CellResult &c : cells) {
        for (const LayerTiming &l : c.tiles.layers) {
            rows.push_back({c.workload, std::to_string(c.wire_width), std::string(to_string(c.scheme)), l.name,
                            std::to_string(l.tiles), fixed(l.bounded_ratio), std::to_string(l.compute),
                            std::to_string(l.stall), std::to_string(l.communication)});
        }
    }
    return render(rows, format == ReportFormat::Json ? ReportFormat::Csv : format);
}

std::string format_ablation(const std::string &workload, int wire_width, std::span<const AblationRow> rows,
                            ReportFormat format) {
    if (format == ReportFormat::Json) {
        ordered_json out = ordered_json::array();
        for (const AblationRow &r : rows) {
            out.push_back({{"workload", workload},
                           {"wire_width", wire_width},
                           {"stage", r.stage},
                           {"communication", r.communication},
                           {"makespan", r.makespan},
                           {"mean_bounded_ratio", r.mean_bounded_ratio},
                           {"reduction", r.reduction}});
        }
        return out.dump(2) + "\n";
    }
    std::vector<std::vector<std::string>> table{
        {"workload", "wire_width", "stage", "communication", "makespan", "mean_bounded_ratio", "reduction"}};
    for (const AblationRow &r : rows) {
        table.push_back({workload, std::to_string(wire_width), r.stage, std::to_string(r.communication),
                         std::to_string(r.makespan), fixed(r.mean_bounded_ratio), fixed(r.reduction)});
    }
    return render(table, format);
}

}  // namespace slotnoc
