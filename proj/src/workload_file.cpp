// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

#include "slotnoc/workload_file.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace slotnoc {

namespace {

[[noreturn]] void parse_fail(const std::string &why) { throw Error(ErrorKind::ParseError, why); }

void only_keys(const YAML::Node &map, const std::set<std::string> &allowed, const std::string &where) {
    if (!map.IsMap()) parse_fail(fmt::format("{} must be a mapping", where));
    for (const auto &kv : map) {
        const std::string key = kv.first.as<std::string>();
        if (!allowed.contains(key)) parse_fail(fmt::format("unknown key '{}' in {}", key, where));
    }
}

template <typename T>
T scalar(const YAML::Node &node, const std::string &what) {
    if (!node || !node.IsScalar()) parse_fail(fmt::format("{} must be a scalar", what));
    try {
        return node.as<T>();
    } catch (const YAML::Exception &) {
        parse_fail(fmt::format("{} has the wrong type", what));
    }
}

template <typename T>
T required(const YAML::Node &map, const std::string &key, const std::string &where) {
    if (!map[key]) parse_fail(fmt::format("{} is missing '{}'", where, key));
    return scalar<T>(map[key], fmt::format("{}.{}", where, key));
}

NodeId node_of(const YAML::Node &node, const std::string &what) {
    if (!node.IsSequence() || node.size() != 2) parse_fail(fmt::format("{} must be [x, y]", what));
    return {scalar<int>(node[0], what), scalar<int>(node[1], what)};
}

std::vector<NodeId> nodes_of(const YAML::Node &node, const std::string &what) {
    if (!node.IsSequence()) parse_fail(fmt::format("{} must be a list of [x, y]", what));
    std::vector<NodeId> out;
    for (const auto &n : node) out.push_back(node_of(n, what));
    return out;
}

void emit_node(YAML::Emitter &out, NodeId n) { out << YAML::Flow << YAML::BeginSeq << n.x << n.y << YAML::EndSeq; }

}  // namespace

WorkloadFile parse_workload(std::string_view text) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::Exception &e) {
        parse_fail(fmt::format("line {}: {}", e.mark.line + 1, e.msg));
    }
    only_keys(root, {"version", "name", "note", "wire_widths", "mesh", "layers"}, "workload");
    const int version = required<int>(root, "version", "workload");
    if (version != kWorkloadFormatVersion) parse_fail(fmt::format("unsupported workload version {}", version));

    WorkloadFile file;
    if (root["name"]) file.name = scalar<std::string>(root["name"], "name");
    if (root["note"]) file.note = scalar<std::string>(root["note"], "note");
    if (const YAML::Node w = root["wire_widths"]) {
        if (!w.IsSequence()) parse_fail("wire_widths must be a list");
        for (const auto &v : w) file.wire_widths.push_back(scalar<int>(v, "wire_widths"));
    }

    const YAML::Node mesh = root["mesh"];
    if (!mesh) parse_fail("workload is missing 'mesh'");
    only_keys(mesh, {"width", "height", "memory_controllers", "wire_width", "slot_cost", "memory_injection_bits"},
              "mesh");
    const int width = required<int>(mesh, "width", "mesh");
    const int height = required<int>(mesh, "height", "mesh");
    if (width < 1 || height < 1) throw Error(ErrorKind::InvalidWorkload, "mesh dimensions must be positive");
    std::vector<NodeId> mcs;
    const YAML::Node mc = mesh["memory_controllers"];
    if (!mc || (mc.IsScalar() && mc.as<std::string>() == "edge-midpoints")) {
        mcs = MeshTopology::edge_midpoint_controllers(width, height);
    } else {
        mcs = nodes_of(mc, "mesh.memory_controllers");
    }
    int wire = file.wire_widths.empty() ? 256 : file.wire_widths.front();
    if (mesh["wire_width"]) wire = scalar<int>(mesh["wire_width"], "mesh.wire_width");
    const int slot_cost = mesh["slot_cost"] ? scalar<int>(mesh["slot_cost"], "mesh.slot_cost") : 3;
    const Bits mc_bits = mesh["memory_injection_bits"]
                             ? scalar<Bits>(mesh["memory_injection_bits"], "mesh.memory_injection_bits")
                             : MeshTopology::kDefaultMemoryInjectionBits;
    file.spec.mesh = MeshTopology(width, height, mcs, wire, slot_cost, mc_bits);

    if (const YAML::Node layers = root["layers"]) {
        if (!layers.IsSequence()) parse_fail("layers must be a list");
        for (std::size_t i = 0; i < layers.size(); ++i) {
            const YAML::Node l = layers[i];
            const std::string where = fmt::format("layers[{}]", i);
            only_keys(l,
                      {"name", "tiles", "iterations", "weight_bits", "input_bits", "output_bits", "compute_slots",
                       "upstream", "region", "reduction_tile", "memory_controller"},
                      where);
            LayerSpec spec;
            spec.name = required<std::string>(l, "name", where);
            spec.tile_count = required<int>(l, "tiles", where);
            spec.iterations = required<int>(l, "iterations", where);
            spec.weight_tile_bits = required<Bits>(l, "weight_bits", where);
            spec.input_tile_bits = required<Bits>(l, "input_bits", where);
            spec.output_tile_bits = required<Bits>(l, "output_bits", where);
            spec.compute_slots_per_iteration = required<Slot>(l, "compute_slots", where);
            if (l["upstream"]) spec.upstream = scalar<std::string>(l["upstream"], where + ".upstream");
            if (l["region"]) spec.region = nodes_of(l["region"], where + ".region");
            if (l["reduction_tile"]) spec.reduction_tile = node_of(l["reduction_tile"], where + ".reduction_tile");
            if (l["memory_controller"]) {
                file.spec.mc_assignment[spec.name] = node_of(l["memory_controller"], where + ".memory_controller");
            }
            file.spec.layers.push_back(std::move(spec));
        }
    }
    file.spec = resolve_workload(std::move(file.spec));
    return file;
}

WorkloadFile load_workload(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, fmt::format("cannot read {}", path.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_workload(buf.str());
}

std::string write_workload(const WorkloadFile &file) {
    const MeshTopology &mesh = file.spec.mesh;
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "version" << YAML::Value << kWorkloadFormatVersion;
    if (!file.name.empty()) out << YAML::Key << "name" << YAML::Value << file.name;
    if (!file.note.empty()) out << YAML::Key << "note" << YAML::Value << file.note;
    if (!file.wire_widths.empty()) {
        out << YAML::Key << "wire_widths" << YAML::Value << YAML::Flow << file.wire_widths;
    }
    out << YAML::Key << "mesh" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "width" << YAML::Value << mesh.width();
    out << YAML::Key << "height" << YAML::Value << mesh.height();
    out << YAML::Key << "memory_controllers" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const NodeId &n : mesh.mc_nodes()) emit_node(out, n);
    out << YAML::EndSeq;
    out << YAML::Key << "wire_width" << YAML::Value << mesh.wire_width();
    out << YAML::Key << "slot_cost" << YAML::Value << mesh.channel_slot_cost();
    out << YAML::Key << "memory_injection_bits" << YAML::Value << mesh.memory_injection_bits();
    out << YAML::EndMap;

    out << YAML::Key << "layers" << YAML::Value << YAML::BeginSeq;
    for (const LayerSpec &l : file.spec.layers) {
        out << YAML::BeginMap;
        out << YAML::Key << "name" << YAML::Value << l.name;
        out << YAML::Key << "tiles" << YAML::Value << l.tile_count;
        out << YAML::Key << "iterations" << YAML::Value << l.iterations;
        out << YAML::Key << "weight_bits" << YAML::Value << l.weight_tile_bits;
        out << YAML::Key << "input_bits" << YAML::Value << l.input_tile_bits;
        out << YAML::Key << "output_bits" << YAML::Value << l.output_tile_bits;
        out << YAML::Key << "compute_slots" << YAML::Value << l.compute_slots_per_iteration;
        if (l.upstream) out << YAML::Key << "upstream" << YAML::Value << *l.upstream;
        if (!l.region.empty()) {
            out << YAML::Key << "region" << YAML::Value << YAML::Flow << YAML::BeginSeq;
            for (const NodeId &n : l.region) emit_node(out, n);
            out << YAML::EndSeq;
        }
        if (l.reduction_tile) {
            out << YAML::Key << "reduction_tile" << YAML::Value;
            emit_node(out, *l.reduction_tile);
        }
        if (auto it = file.spec.mc_assignment.find(l.name); it != file.spec.mc_assignment.end()) {
            out << YAML::Key << "memory_controller" << YAML::Value;
            emit_node(out, it->second);
        }
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace slotnoc
