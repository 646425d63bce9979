#include "dcmg/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace dcmg {

namespace {

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& path, const std::string& what) const
    {
        std::ostringstream where;
        where << source_;
        if (node.IsDefined() && node.Mark().line >= 0) {
            where << ':' << node.Mark().line + 1 << ':' << node.Mark().column + 1;
        }
        if (!path.empty()) {
            where << ": " << path;
        }
        throw ScenarioError(where.str(), what);
    }

    void keys(const YAML::Node& node, const std::string& path, std::initializer_list<const char*> allowed) const
    {
        if (!node.IsMap()) {
            fail(node, path, "expected a mapping");
        }
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& kv : node) {
            const auto key = kv.first.as<std::string>();
            if (!ok.count(key)) {
                fail(kv.first, path, "unknown key '" + key + "'");
            }
        }
    }

    YAML::Node require(const YAML::Node& node, const char* key, const std::string& path) const
    {
        const YAML::Node child = node[key];
        if (!child.IsDefined() || child.IsNull()) {
            fail(node, join(path, key), "missing required field");
        }
        return child;
    }

    double number(const YAML::Node& node, const std::string& path) const
    {
        try {
            return node.as<double>();
        } catch (const YAML::Exception&) {
            fail(node, path, "expected a number");
        }
    }

    double number_or(const YAML::Node& parent, const char* key, const std::string& path, double fallback) const
    {
        const YAML::Node n = parent[key];
        return n.IsDefined() && !n.IsNull() ? number(n, join(path, key)) : fallback;
    }

    long integer(const YAML::Node& node, const std::string& path) const
    {
        try {
            return node.as<long>();
        } catch (const YAML::Exception&) {
            fail(node, path, "expected an integer");
        }
    }

    std::uint64_t unsigned_integer(const YAML::Node& node, const std::string& path) const
    {
        try {
            return node.as<std::uint64_t>();
        } catch (const YAML::Exception&) {
            fail(node, path, "expected a non-negative integer");
        }
    }

    bool boolean(const YAML::Node& node, const std::string& path) const
    {
        try {
            return node.as<bool>();
        } catch (const YAML::Exception&) {
            fail(node, path, "expected true or false");
        }
    }

    std::string text(const YAML::Node& node, const std::string& path) const
    {
        if (!node.IsScalar()) {
            fail(node, path, "expected a string");
        }
        return node.as<std::string>();
    }

    Vec2 vec2(const YAML::Node& node, const std::string& path) const
    {
        if (node.IsScalar()) {
            const double v = number(node, path);
            return {v, v};
        }
        if (!node.IsSequence() || node.size() != 2) {
            fail(node, path, "expected a number or a two-element list");
        }
        return {number(node[0], path + "[0]"), number(node[1], path + "[1]")};
    }

    std::pair<NodeId, NodeId> pair(const YAML::Node& node, const std::string& path) const
    {
        if (!node.IsSequence() || node.size() != 2) {
            fail(node, path, "expected a two-element list of node ids");
        }
        return {static_cast<NodeId>(integer(node[0], path + "[0]")),
                static_cast<NodeId>(integer(node[1], path + "[1]"))};
    }

    static std::string join(const std::string& path, const std::string& key)
    {
        return path.empty() ? key : path + "." + key;
    }

    static std::string index(const std::string& path, std::size_t k)
    {
        return path + "[" + std::to_string(k) + "]";
    }

private:
    std::string source_;
};

/// Overlays `over` on `base` (shallow, mapping keys only).
YAML::Node merged(const YAML::Node& base, const YAML::Node& over)
{
    YAML::Node out(YAML::NodeType::Map);
    if (base.IsDefined() && base.IsMap()) {
        for (const auto& kv : base) {
            out[kv.first.as<std::string>()] = kv.second;
        }
    }
    for (const auto& kv : over) {
        out[kv.first.as<std::string>()] = kv.second;
    }
    return out;
}

LineParams read_line_params(const Reader& rd, const YAML::Node& n, const std::string& path)
{
    LineParams p;
    p.resistance = rd.number(rd.require(n, "resistance", path), Reader::join(path, "resistance"));
    p.inductance = rd.number_or(n, "inductance", path, 0.0);
    p.comm_weight = rd.number(rd.require(n, "comm_weight", path), Reader::join(path, "comm_weight"));
    return p;
}

double read_impedance(const Reader& rd, const YAML::Node& parent, const std::string& path)
{
    const YAML::Node n = parent["impedance"];
    if (!n.IsDefined() || n.IsNull()) {
        return std::numeric_limits<double>::infinity();
    }
    if (n.IsScalar()) {
        const auto s = n.as<std::string>();
        if (s == "inf" || s == "none") {
            return std::numeric_limits<double>::infinity();
        }
    }
    return rd.number(n, Reader::join(path, "impedance"));
}

DerParams read_der(const Reader& rd, const YAML::Node& n, const std::string& path)
{
    rd.keys(n, path,
            {"id", "filter_resistance", "filter_inductance", "filter_capacitance", "rated_current",
             "reference_voltage", "load"});
    DerParams p;
    auto num = [&](const char* key) { return rd.number(rd.require(n, key, path), Reader::join(path, key)); };
    p.filter_resistance = num("filter_resistance");
    p.filter_inductance = num("filter_inductance");
    p.filter_capacitance = num("filter_capacitance");
    p.rated_current = num("rated_current");
    p.zip.reference_voltage = num("reference_voltage");
    const YAML::Node load = n["load"];
    if (load.IsDefined() && !load.IsNull()) {
        const std::string lp = Reader::join(path, "load");
        rd.keys(load, lp, {"impedance", "constant_current", "constant_power"});
        p.zip.impedance = read_impedance(rd, load, lp);
        p.zip.constant_current = rd.number_or(load, "constant_current", lp, 0.0);
        p.zip.constant_power = rd.number_or(load, "constant_power", lp, 0.0);
    }
    return p;
}

BiasSignal read_signal(const Reader& rd, const YAML::Node& n, const std::string& path)
{
    BiasSignal s;
    try {
        s.shape = parse_bias_shape(rd.text(rd.require(n, "shape", path), Reader::join(path, "shape")));
        if (n["target"]) {
            s.target = parse_bias_target(rd.text(n["target"], Reader::join(path, "target")));
        }
    } catch (const AttackError& e) {
        rd.fail(n, path, e.what());
    }
    s.amplitude = rd.number_or(n, "amplitude", path, 0.0);
    s.frequency = rd.number_or(n, "frequency", path, 0.0);
    s.slope = rd.number_or(n, "slope", path, 0.0);
    s.start_time = rd.number_or(n, "start_time", path, 0.0);
    const YAML::Node w = n["windows"];
    if (w.IsDefined() && !w.IsNull()) {
        const std::string wp = Reader::join(path, "windows");
        if (!w.IsSequence()) {
            rd.fail(w, wp, "expected a list of [on, off] pairs");
        }
        for (std::size_t k = 0; k < w.size(); ++k) {
            const Vec2 v = rd.vec2(w[k], Reader::index(wp, k));
            if (w[k].IsScalar()) {
                rd.fail(w[k], Reader::index(wp, k), "expected [on, off]");
            }
            s.windows.push_back({v(0), v(1)});
        }
    }
    return s;
}

void read_control(const Reader& rd, const YAML::Node& n, ControlConfig& c)
{
    const std::string path = "control";
    rd.keys(n, path,
            {"primary", "secondary_period", "tau", "uio_poles", "hold_steps", "grace_steps",
             "residual_floor", "mitigation", "load_error", "load_error_scope"});
    if (const YAML::Node p = n["primary"]) {
        rd.keys(p, "control.primary", {"proportional", "integral"});
        if (p["proportional"]) {
            c.primary.proportional = rd.vec2(p["proportional"], "control.primary.proportional");
        }
        c.primary.integral = rd.number_or(p, "integral", "control.primary", c.primary.integral);
    }
    if (n["secondary_period"]) {
        c.secondary_period = static_cast<int>(rd.integer(n["secondary_period"], "control.secondary_period"));
    }
    c.tau = rd.number_or(n, "tau", path, c.tau);
    if (n["uio_poles"]) {
        const Vec2 p = rd.vec2(n["uio_poles"], "control.uio_poles");
        c.poles = {p(0), p(1)};
    }
    if (n["hold_steps"]) {
        c.hold_steps = static_cast<int>(rd.integer(n["hold_steps"], "control.hold_steps"));
    }
    if (n["grace_steps"]) {
        c.grace_steps = static_cast<int>(rd.integer(n["grace_steps"], "control.grace_steps"));
    }
    c.residual_floor = rd.number_or(n, "residual_floor", path, c.residual_floor);
    if (n["mitigation"]) {
        c.mitigation = rd.boolean(n["mitigation"], "control.mitigation");
    }
    c.load_error = rd.number_or(n, "load_error", path, c.load_error);
    if (n["load_error_scope"]) {
        const std::string s = rd.text(n["load_error_scope"], "control.load_error_scope");
        if (s == "current") {
            c.load_error_total = false;
        } else if (s == "total") {
            c.load_error_total = true;
        } else {
            rd.fail(n["load_error_scope"], "control.load_error_scope", "expected 'current' or 'total'");
        }
    }
}

void read_noise(const Reader& rd, const YAML::Node& n, NoiseConfig& c)
{
    const std::string path = "noise";
    rd.keys(n, path,
            {"seed", "process", "measurement", "line_sensor", "calibrate_mismatch", "mismatch_margin",
             "extra_process"});
    if (n["seed"]) {
        c.seed = rd.unsigned_integer(n["seed"], "noise.seed");
    }
    if (n["process"]) {
        c.process = rd.vec2(n["process"], "noise.process");
    }
    if (n["measurement"]) {
        c.measurement = rd.vec2(n["measurement"], "noise.measurement");
    }
    c.line_sensor = rd.number_or(n, "line_sensor", path, c.line_sensor);
    if (n["calibrate_mismatch"]) {
        c.calibrate_mismatch = rd.boolean(n["calibrate_mismatch"], "noise.calibrate_mismatch");
    }
    c.mismatch_margin = rd.number_or(n, "mismatch_margin", path, c.mismatch_margin);
    if (n["extra_process"]) {
        c.extra_process = rd.vec2(n["extra_process"], "noise.extra_process");
    }
}

Event read_event(const Reader& rd, const YAML::Node& n, const std::string& path, const YAML::Node& line_defaults)
{
    Event e;
    e.time = rd.number(rd.require(n, "time", path), Reader::join(path, "time"));
    const std::string kind = rd.text(rd.require(n, "kind", path), Reader::join(path, "kind"));
    if (kind == "load_change") {
        rd.keys(n, path, {"time", "kind", "node", "impedance", "current"});
        e.kind = EventKind::LoadChange;
        e.node = static_cast<NodeId>(rd.integer(rd.require(n, "node", path), Reader::join(path, "node")));
        const double z = read_impedance(rd, n, path);
        if (!(z > 0.0)) {
            rd.fail(n["impedance"], Reader::join(path, "impedance"), "must be positive");
        }
        e.impedance = z;
        e.load_current = rd.number_or(n, "current", path, 0.0);
    } else if (kind == "der_plugin") {
        rd.keys(n, path, {"time", "kind", "node", "lines"});
        e.kind = EventKind::DerPlugin;
        e.node = static_cast<NodeId>(rd.integer(rd.require(n, "node", path), Reader::join(path, "node")));
        const YAML::Node lines = rd.require(n, "lines", path);
        const std::string lp = Reader::join(path, "lines");
        if (!lines.IsSequence()) {
            rd.fail(lines, lp, "expected a list");
        }
        for (std::size_t k = 0; k < lines.size(); ++k) {
            const std::string ip = Reader::index(lp, k);
            rd.keys(lines[k], ip, {"to", "resistance", "inductance", "comm_weight"});
            const YAML::Node m = merged(line_defaults, lines[k]);
            PluginLine pl;
            pl.to = static_cast<NodeId>(rd.integer(rd.require(lines[k], "to", ip), Reader::join(ip, "to")));
            pl.params = read_line_params(rd, m, ip);
            e.lines.push_back(pl);
        }
    } else if (kind == "line_cut") {
        rd.keys(n, path, {"time", "kind", "line"});
        e.kind = EventKind::LineCut;
        const auto [a, b] = rd.pair(rd.require(n, "line", path), Reader::join(path, "line"));
        e.line = Edge(a, b);
    } else if (kind == "attack_start" || kind == "attack_stop") {
        rd.keys(n, path, {"time", "kind", "attack"});
        e.kind = kind == "attack_start" ? EventKind::AttackStart : EventKind::AttackStop;
        e.attack = rd.text(rd.require(n, "attack", path), Reader::join(path, "attack"));
    } else {
        rd.fail(n["kind"], Reader::join(path, "kind"), "unknown event kind '" + kind + "'");
    }
    return e;
}

MicrogridTopology read_topology(const Reader& rd, const YAML::Node& n, const std::string& path,
                                const YAML::Node& line_defaults, bool lenient_lines)
{
    rd.keys(n, path, {"nodes", "lines"});
    MicrogridTopology topo;
    const YAML::Node nodes = rd.require(n, "nodes", path);
    const std::string np = Reader::join(path, "nodes");
    if (!nodes.IsSequence()) {
        rd.fail(nodes, np, "expected a list of node ids");
    }
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const NodeId id = static_cast<NodeId>(rd.integer(nodes[k], Reader::index(np, k)));
        if (topo.has_node(id)) {
            rd.fail(nodes[k], Reader::index(np, k), "duplicate node " + std::to_string(id));
        }
        topo.add_node(id);
    }
    const bool has_defaults = line_defaults.IsDefined() && !line_defaults.IsNull();
    const YAML::Node lines = n["lines"];
    if (lines.IsDefined() && !lines.IsNull()) {
        const std::string lp = Reader::join(path, "lines");
        if (!lines.IsSequence()) {
            rd.fail(lines, lp, "expected a list");
        }
        for (std::size_t k = 0; k < lines.size(); ++k) {
            const std::string ip = Reader::index(lp, k);
            const YAML::Node item = lines[k];
            std::pair<NodeId, NodeId> ends;
            LineParams params{1.0, 0.0, 1.0};
            if (item.IsSequence()) {
                if (!lenient_lines && !has_defaults) {
                    rd.fail(item, ip, "line needs resistance and comm_weight (or a defaults.line section)");
                }
                ends = rd.pair(item, ip);
                if (has_defaults) {
                    params = read_line_params(rd, line_defaults, "defaults.line");
                }
            } else {
                rd.keys(item, ip, {"between", "resistance", "inductance", "comm_weight"});
                ends = rd.pair(rd.require(item, "between", ip), Reader::join(ip, "between"));
                YAML::Node m = merged(line_defaults, item);
                if (lenient_lines) {
                    if (!m["resistance"]) m["resistance"] = 1.0;
                    if (!m["comm_weight"]) m["comm_weight"] = 1.0;
                }
                params = read_line_params(rd, m, ip);
            }
            try {
                topo.add_line(ends.first, ends.second, params);
            } catch (const TopologyError& e) {
                rd.fail(item, ip, e.what());
            }
        }
    }
    return topo;
}

YAML::Node load_yaml(const std::string& text, const std::string& source)
{
    try {
        return YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        std::ostringstream where;
        where << source << ':' << e.mark.line + 1 << ':' << e.mark.column + 1;
        throw ScenarioError(where.str(), e.msg);
    }
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ScenarioError(path, "cannot open file");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& source)
{
    const Reader rd(source);
    const YAML::Node root = load_yaml(text, source);
    if (!root.IsMap()) {
        throw ScenarioError(source, "scenario must be a mapping");
    }
    rd.keys(root, "",
            {"name", "sampling_time", "duration", "plant", "horizons", "defaults", "topology", "ders",
             "control", "noise", "sensors", "attacks", "events"});

    Scenario s;
    if (root["name"]) {
        s.name = rd.text(root["name"], "name");
    }
    s.sampling_time = rd.number(rd.require(root, "sampling_time", ""), "sampling_time");
    s.duration = rd.number(rd.require(root, "duration", ""), "duration");
    if (root["plant"]) {
        const std::string p = rd.text(root["plant"], "plant");
        if (p == "coupled") {
            s.plant = PlantMode::Coupled;
        } else if (p == "local_zoh") {
            s.plant = PlantMode::LocalZoh;
        } else {
            rd.fail(root["plant"], "plant", "expected 'coupled' or 'local_zoh'");
        }
    }
    if (const YAML::Node h = root["horizons"]) {
        rd.keys(h, "horizons", {"primary_start", "secondary_start", "detector_start"});
        s.horizons.primary_start = rd.number_or(h, "primary_start", "horizons", 0.0);
        s.horizons.secondary_start = rd.number_or(h, "secondary_start", "horizons", s.horizons.primary_start);
        s.horizons.detector_start = rd.number_or(h, "detector_start", "horizons", s.horizons.secondary_start);
    }

    YAML::Node der_defaults;
    YAML::Node line_defaults;
    if (const YAML::Node d = root["defaults"]) {
        rd.keys(d, "defaults", {"der", "line"});
        der_defaults = d["der"];
        line_defaults = d["line"];
    }

    const YAML::Node topo = rd.require(root, "topology", "");
    s.topology = read_topology(rd, topo, "topology", line_defaults, false);

    const YAML::Node ders = rd.require(root, "ders", "");
    if (!ders.IsSequence()) {
        rd.fail(ders, "ders", "expected a list");
    }
    for (std::size_t k = 0; k < ders.size(); ++k) {
        const std::string path = Reader::index("ders", k);
        const NodeId id = static_cast<NodeId>(rd.integer(rd.require(ders[k], "id", path), path + ".id"));
        if (s.ders.count(id)) {
            rd.fail(ders[k], path, "duplicate DER id " + std::to_string(id));
        }
        YAML::Node m = merged(der_defaults, ders[k]);
        if (der_defaults.IsDefined() && der_defaults["load"] && ders[k]["load"]) {
            m["load"] = merged(der_defaults["load"], ders[k]["load"]);
        }
        s.ders[id] = read_der(rd, m, path);
    }

    if (const YAML::Node c = root["control"]) {
        read_control(rd, c, s.control);
    }
    if (const YAML::Node n = root["noise"]) {
        read_noise(rd, n, s.noise);
    }

    if (const YAML::Node sn = root["sensors"]) {
        if (sn.IsScalar() && sn.as<std::string>() == "auto") {
            s.sensors.reset();
        } else if (sn.IsSequence()) {
            std::vector<DirectedEdge> list;
            for (std::size_t k = 0; k < sn.size(); ++k) {
                const auto [a, b] = rd.pair(sn[k], Reader::index("sensors", k));
                list.push_back({a, b});
            }
            s.sensors = list;
        } else {
            rd.fail(sn, "sensors", "expected 'auto' or a list of [at, toward] pairs");
        }
    }

    if (const YAML::Node at = root["attacks"]) {
        if (!at.IsSequence()) {
            rd.fail(at, "attacks", "expected a list");
        }
        for (std::size_t k = 0; k < at.size(); ++k) {
            const std::string path = Reader::index("attacks", k);
            const YAML::Node n = at[k];
            rd.keys(n, path,
                    {"id", "link", "shape", "amplitude", "frequency", "slope", "start_time", "windows",
                     "target", "enabled"});
            AttackSpec spec;
            spec.id = n["id"] ? rd.text(n["id"], path + ".id") : "attack" + std::to_string(k);
            const auto [recv, send] = rd.pair(rd.require(n, "link", path), path + ".link");
            spec.link = {recv, send};
            spec.signal = read_signal(rd, n, path);
            if (n["enabled"]) {
                spec.enabled = rd.boolean(n["enabled"], path + ".enabled");
            }
            s.attacks.push_back(spec);
        }
    }

    if (const YAML::Node ev = root["events"]) {
        if (!ev.IsSequence()) {
            rd.fail(ev, "events", "expected a list");
        }
        for (std::size_t k = 0; k < ev.size(); ++k) {
            s.events.push_back(read_event(rd, ev[k], Reader::index("events", k), line_defaults));
        }
    }

    try {
        s.validate();
    } catch (const ScenarioError& e) {
        throw ScenarioError(source + ": " + e.where(), e.message());
    }
    return s;
}

Scenario load_scenario(const std::string& path)
{
    return parse_scenario(read_file(path), path);
}

MicrogridTopology parse_topology(const std::string& text, const std::string& source)
{
    const Reader rd(source);
    const YAML::Node root = load_yaml(text, source);
    if (!root.IsMap()) {
        throw ScenarioError(source, "graph file must be a mapping");
    }
    if (root["topology"]) {
        YAML::Node line_defaults;
        if (root["defaults"] && root["defaults"]["line"]) {
            line_defaults = root["defaults"]["line"];
        }
        return read_topology(rd, root["topology"], "topology", line_defaults, true);
    }
    return read_topology(rd, root, "", YAML::Node(), true);
}

MicrogridTopology load_topology(const std::string& path)
{
    return parse_topology(read_file(path), path);
}

namespace {

void emit_vec2(YAML::Emitter& out, const Vec2& v)
{
    out << YAML::Flow << YAML::BeginSeq << v(0) << v(1) << YAML::EndSeq;
}

void emit_pair(YAML::Emitter& out, NodeId a, NodeId b)
{
    out << YAML::Flow << YAML::BeginSeq << a << b << YAML::EndSeq;
}

void emit_impedance(YAML::Emitter& out, double z)
{
    out << YAML::Key << "impedance";
    if (std::isinf(z)) {
        out << YAML::Value << "inf";
    } else {
        out << YAML::Value << z;
    }
}

void emit_line_params(YAML::Emitter& out, const LineParams& p)
{
    out << YAML::Key << "resistance" << YAML::Value << p.resistance;
    out << YAML::Key << "inductance" << YAML::Value << p.inductance;
    out << YAML::Key << "comm_weight" << YAML::Value << p.comm_weight;
}

}  // namespace

std::string serialize_scenario(const Scenario& s)
{
    YAML::Emitter out;
    out.SetDoublePrecision(std::numeric_limits<double>::max_digits10);
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << s.name;
    out << YAML::Key << "sampling_time" << YAML::Value << s.sampling_time;
    out << YAML::Key << "duration" << YAML::Value << s.duration;
    out << YAML::Key << "plant" << YAML::Value << to_string(s.plant);

    out << YAML::Key << "horizons" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "primary_start" << YAML::Value << s.horizons.primary_start;
    out << YAML::Key << "secondary_start" << YAML::Value << s.horizons.secondary_start;
    out << YAML::Key << "detector_start" << YAML::Value << s.horizons.detector_start;
    out << YAML::EndMap;

    out << YAML::Key << "topology" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "nodes" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (NodeId n : s.topology.nodes()) {
        out << n;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "lines" << YAML::Value << YAML::BeginSeq;
    for (const auto& [edge, p] : s.topology.lines()) {
        out << YAML::Flow << YAML::BeginMap;
        out << YAML::Key << "between" << YAML::Value;
        emit_pair(out, edge.a, edge.b);
        emit_line_params(out, p);
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::EndMap;

    out << YAML::Key << "ders" << YAML::Value << YAML::BeginSeq;
    for (const auto& [id, p] : s.ders) {
        out << YAML::Flow << YAML::BeginMap;
        out << YAML::Key << "id" << YAML::Value << id;
        out << YAML::Key << "filter_resistance" << YAML::Value << p.filter_resistance;
        out << YAML::Key << "filter_inductance" << YAML::Value << p.filter_inductance;
        out << YAML::Key << "filter_capacitance" << YAML::Value << p.filter_capacitance;
        out << YAML::Key << "rated_current" << YAML::Value << p.rated_current;
        out << YAML::Key << "reference_voltage" << YAML::Value << p.zip.reference_voltage;
        out << YAML::Key << "load" << YAML::Value << YAML::BeginMap;
        emit_impedance(out, p.zip.impedance);
        out << YAML::Key << "constant_current" << YAML::Value << p.zip.constant_current;
        out << YAML::Key << "constant_power" << YAML::Value << p.zip.constant_power;
        out << YAML::EndMap;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;

    const ControlConfig& c = s.control;
    out << YAML::Key << "control" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "primary" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "proportional" << YAML::Value;
    emit_vec2(out, c.primary.proportional);
    out << YAML::Key << "integral" << YAML::Value << c.primary.integral;
    out << YAML::EndMap;
    out << YAML::Key << "secondary_period" << YAML::Value << c.secondary_period;
    out << YAML::Key << "tau" << YAML::Value << c.tau;
    out << YAML::Key << "uio_poles" << YAML::Value;
    emit_vec2(out, Vec2(c.poles.first, c.poles.second));
    out << YAML::Key << "hold_steps" << YAML::Value << c.hold_steps;
    out << YAML::Key << "grace_steps" << YAML::Value << c.grace_steps;
    out << YAML::Key << "residual_floor" << YAML::Value << c.residual_floor;
    out << YAML::Key << "mitigation" << YAML::Value << c.mitigation;
    out << YAML::Key << "load_error" << YAML::Value << c.load_error;
    out << YAML::Key << "load_error_scope" << YAML::Value << (c.load_error_total ? "total" : "current");
    out << YAML::EndMap;

    const NoiseConfig& n = s.noise;
    out << YAML::Key << "noise" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "seed" << YAML::Value << n.seed;
    out << YAML::Key << "process" << YAML::Value;
    emit_vec2(out, n.process);
    out << YAML::Key << "measurement" << YAML::Value;
    emit_vec2(out, n.measurement);
    out << YAML::Key << "line_sensor" << YAML::Value << n.line_sensor;
    out << YAML::Key << "calibrate_mismatch" << YAML::Value << n.calibrate_mismatch;
    out << YAML::Key << "mismatch_margin" << YAML::Value << n.mismatch_margin;
    out << YAML::Key << "extra_process" << YAML::Value;
    emit_vec2(out, n.extra_process);
    out << YAML::EndMap;

    out << YAML::Key << "sensors" << YAML::Value;
    if (!s.sensors) {
        out << "auto";
    } else {
        out << YAML::BeginSeq;
        for (const auto& d : *s.sensors) {
            emit_pair(out, d.from, d.to);
        }
        out << YAML::EndSeq;
    }

    out << YAML::Key << "attacks" << YAML::Value << YAML::BeginSeq;
    for (const auto& a : s.attacks) {
        out << YAML::BeginMap;
        out << YAML::Key << "id" << YAML::Value << a.id;
        out << YAML::Key << "link" << YAML::Value;
        emit_pair(out, a.link.from, a.link.to);
        out << YAML::Key << "shape" << YAML::Value << to_string(a.signal.shape);
        out << YAML::Key << "target" << YAML::Value << to_string(a.signal.target);
        out << YAML::Key << "amplitude" << YAML::Value << a.signal.amplitude;
        out << YAML::Key << "frequency" << YAML::Value << a.signal.frequency;
        out << YAML::Key << "slope" << YAML::Value << a.signal.slope;
        out << YAML::Key << "start_time" << YAML::Value << a.signal.start_time;
        out << YAML::Key << "windows" << YAML::Value << YAML::BeginSeq;
        for (const auto& w : a.signal.windows) {
            emit_vec2(out, Vec2(w.on, w.off));
        }
        out << YAML::EndSeq;
        out << YAML::Key << "enabled" << YAML::Value << a.enabled;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;

    out << YAML::Key << "events" << YAML::Value << YAML::BeginSeq;
    for (const auto& e : s.events) {
        out << YAML::BeginMap;
        out << YAML::Key << "time" << YAML::Value << e.time;
        out << YAML::Key << "kind" << YAML::Value << to_string(e.kind);
        switch (e.kind) {
        case EventKind::LoadChange:
            out << YAML::Key << "node" << YAML::Value << e.node;
            emit_impedance(out, e.impedance);
            out << YAML::Key << "current" << YAML::Value << e.load_current;
            break;
        case EventKind::DerPlugin:
            out << YAML::Key << "node" << YAML::Value << e.node;
            out << YAML::Key << "lines" << YAML::Value << YAML::BeginSeq;
            for (const auto& l : e.lines) {
                out << YAML::Flow << YAML::BeginMap;
                out << YAML::Key << "to" << YAML::Value << l.to;
                emit_line_params(out, l.params);
                out << YAML::EndMap;
            }
            out << YAML::EndSeq;
            break;
        case EventKind::LineCut:
            out << YAML::Key << "line" << YAML::Value;
            emit_pair(out, e.line.a, e.line.b);
            break;
        case EventKind::AttackStart:
        case EventKind::AttackStop:
            out << YAML::Key << "attack" << YAML::Value << e.attack;
            break;
        }
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;

    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace dcmg
