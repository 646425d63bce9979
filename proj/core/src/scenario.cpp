#include "dcmg/scenario.hpp"

#include <cmath>
#include <set>

namespace dcmg {

std::string to_string(PlantMode mode)
{
    return mode == PlantMode::Coupled ? "coupled" : "local_zoh";
}

std::string to_string(EventKind kind)
{
    switch (kind) {
    case EventKind::LoadChange: return "load_change";
    case EventKind::DerPlugin: return "der_plugin";
    case EventKind::LineCut: return "line_cut";
    case EventKind::AttackStart: return "attack_start";
    case EventKind::AttackStop: return "attack_stop";
    }
    return "load_change";
}

long Scenario::steps() const
{
    return std::lround(duration / sampling_time);
}

long Scenario::step_of(double time) const
{
    return std::lround(time / sampling_time);
}

TopologyHistory topology_history(const Scenario& scenario)
{
    TopologyHistory h;
    h.nodes = scenario.topology.nodes();
    for (const auto& [edge, params] : scenario.topology.lines()) {
        h.ever.insert(edge);
    }
    for (const Event& e : scenario.events) {
        if (e.kind == EventKind::DerPlugin) {
            h.nodes.insert(e.node);
            for (const auto& l : e.lines) {
                h.ever.insert(Edge(e.node, l.to));
            }
        }
    }
    return h;
}

namespace {

std::string pair_text(NodeId a, NodeId b)
{
    return "(" + std::to_string(a) + "," + std::to_string(b) + ")";
}

void check_line_params(const LineParams& p, const std::string& where)
{
    if (!(p.resistance > 0.0) || !std::isfinite(p.resistance)) {
        throw ScenarioError(where + ".resistance", "must be positive");
    }
    if (!(p.comm_weight > 0.0) || !std::isfinite(p.comm_weight)) {
        throw ScenarioError(where + ".comm_weight", "must be positive");
    }
    if (!(p.inductance >= 0.0)) {
        throw ScenarioError(where + ".inductance", "must be non-negative");
    }
}

}  // namespace

void Scenario::validate() const
{
    if (!(sampling_time > 0.0) || !std::isfinite(sampling_time)) {
        throw ScenarioError("sampling_time", "must be positive");
    }
    if (!(duration > 0.0) || !std::isfinite(duration)) {
        throw ScenarioError("duration", "must be positive");
    }
    if (!(horizons.primary_start >= 0.0)) {
        throw ScenarioError("horizons.primary_start", "must be non-negative");
    }
    if (!(horizons.secondary_start >= horizons.primary_start)) {
        throw ScenarioError("horizons.secondary_start", "must not precede primary_start");
    }
    if (!(horizons.detector_start >= horizons.secondary_start)) {
        throw ScenarioError("horizons.detector_start", "must not precede secondary_start");
    }
    if (topology.nodes().empty()) {
        throw ScenarioError("topology.nodes", "at least one node required");
    }

    for (const auto& [edge, params] : topology.lines()) {
        check_line_params(params, "topology.lines" + pair_text(edge.a, edge.b));
    }
    for (NodeId n : topology.nodes()) {
        auto it = ders.find(n);
        if (it == ders.end()) {
            throw ScenarioError("ders", "no parameters for node " + std::to_string(n));
        }
        try {
            it->second.validate();
        } catch (const ModelError& e) {
            throw ScenarioError("ders[" + std::to_string(n) + "]", e.what());
        }
    }
    for (const auto& [id, params] : ders) {
        if (!topology.has_node(id)) {
            throw ScenarioError("ders[" + std::to_string(id) + "]", "node not in topology");
        }
    }

    if (control.secondary_period < 1) {
        throw ScenarioError("control.secondary_period", "must be at least 1");
    }
    if (!(control.tau > 0.0)) {
        throw ScenarioError("control.tau", "must be positive");
    }
    if (control.hold_steps < 0) {
        throw ScenarioError("control.hold_steps", "must be non-negative");
    }
    if (control.grace_steps < 0) {
        throw ScenarioError("control.grace_steps", "must be non-negative");
    }
    if (!(control.residual_floor >= 0.0)) {
        throw ScenarioError("control.residual_floor", "must be non-negative");
    }
    if (!(control.load_error > -1.0) || !std::isfinite(control.load_error)) {
        throw ScenarioError("control.load_error", "must be greater than -1");
    }
    if (!(std::abs(control.poles.first) < 1.0) || !(std::abs(control.poles.second) < 1.0)) {
        throw ScenarioError("control.uio_poles", "must lie inside the unit circle");
    }

    auto nonneg = [](const Vec2& v) { return (v.array() >= 0.0).all() && v.allFinite(); };
    if (!nonneg(noise.process)) {
        throw ScenarioError("noise.process", "bounds must be non-negative");
    }
    if (!nonneg(noise.measurement)) {
        throw ScenarioError("noise.measurement", "bounds must be non-negative");
    }
    if (!nonneg(noise.extra_process)) {
        throw ScenarioError("noise.extra_process", "bounds must be non-negative");
    }
    if (!(noise.line_sensor >= 0.0)) {
        throw ScenarioError("noise.line_sensor", "bound must be non-negative");
    }
    if (!(noise.mismatch_margin >= 0.0)) {
        throw ScenarioError("noise.mismatch_margin", "must be non-negative");
    }

    const TopologyHistory history = topology_history(*this);

    if (sensors) {
        for (std::size_t k = 0; k < sensors->size(); ++k) {
            const DirectedEdge& s = (*sensors)[k];
            if (!history.ever.count(Edge(s.from, s.to))) {
                throw ScenarioError("sensors[" + std::to_string(k) + "]",
                                    "no line " + pair_text(s.from, s.to));
            }
        }
    }

    std::set<std::string> ids;
    for (std::size_t k = 0; k < attacks.size(); ++k) {
        const AttackSpec& a = attacks[k];
        const std::string where = "attacks[" + std::to_string(k) + "]";
        if (a.id.empty() || !ids.insert(a.id).second) {
            throw ScenarioError(where + ".id", "must be unique and non-empty");
        }
        if (!history.ever.count(Edge(a.link.from, a.link.to))) {
            throw ScenarioError(where + ".link", "no communication link " + pair_text(a.link.from, a.link.to));
        }
        try {
            a.signal.validate();
        } catch (const AttackError& e) {
            throw ScenarioError(where, e.what());
        }
    }

    // Replay the timeline to check that every event refers to something that exists.
    MicrogridTopology live = topology;
    double last_time = 0.0;
    for (std::size_t k = 0; k < events.size(); ++k) {
        const Event& e = events[k];
        const std::string where = "events[" + std::to_string(k) + "]";
        if (!(e.time >= last_time) || !std::isfinite(e.time)) {
            throw ScenarioError(where + ".time", "event times must be non-negative and nondecreasing");
        }
        last_time = e.time;
        switch (e.kind) {
        case EventKind::LoadChange:
            if (!live.has_node(e.node)) {
                throw ScenarioError(where + ".node", "unknown node " + std::to_string(e.node));
            }
            if (!(e.impedance > 0.0) || !std::isfinite(e.load_current)) {
                throw ScenarioError(where, "load needs a positive impedance and a finite current");
            }
            break;
        case EventKind::DerPlugin:
            if (!live.has_node(e.node)) {
                throw ScenarioError(where + ".node", "unknown node " + std::to_string(e.node));
            }
            if (e.lines.empty()) {
                throw ScenarioError(where + ".lines", "plug-in needs at least one line");
            }
            for (std::size_t l = 0; l < e.lines.size(); ++l) {
                const std::string lw = where + ".lines[" + std::to_string(l) + "]";
                check_line_params(e.lines[l].params, lw);
                try {
                    live.add_line(e.node, e.lines[l].to, e.lines[l].params);
                } catch (const TopologyError& err) {
                    throw ScenarioError(lw, err.what());
                }
            }
            break;
        case EventKind::LineCut:
            if (!live.has_line(e.line.a, e.line.b)) {
                throw ScenarioError(where + ".line", "no line " + pair_text(e.line.a, e.line.b));
            }
            live.remove_line(e.line.a, e.line.b);
            break;
        case EventKind::AttackStart:
        case EventKind::AttackStop:
            if (!ids.count(e.attack)) {
                throw ScenarioError(where + ".attack", "unknown attack id '" + e.attack + "'");
            }
            break;
        }
    }

    // Connectivity: nodes with lines form one component; isolated nodes must
    // be plugged in later.
    std::set<NodeId> plugged;
    for (const Event& e : events) {
        if (e.kind == EventKind::DerPlugin) {
            plugged.insert(e.node);
        }
    }
    if (topology.nodes().size() > 1) {
        int grid_components = 0;
        for (const auto& comp : topology.components()) {
            if (comp.size() == 1) {
                const NodeId n = *comp.begin();
                if (!plugged.count(n)) {
                    throw ScenarioError("topology", "node " + std::to_string(n) +
                                                        " is isolated and never plugged in");
                }
                continue;
            }
            ++grid_components;
        }
        if (grid_components > 1) {
            throw ScenarioError("topology", "electrical graph is not connected");
        }
    }
}

}  // namespace dcmg
