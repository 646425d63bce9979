#pragma once

#include "dcmg/attack.hpp"
#include "dcmg/control.hpp"
#include "dcmg/detect.hpp"
#include "dcmg/model.hpp"
#include "dcmg/topology.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcmg {

/// Validation or parse failure. `where` names the offending field
/// (e.g. "events[2].node") and, for files, carries "file:line:col".
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(const std::string& where, const std::string& what)
        : std::runtime_error(where.empty() ? what : where + ": " + what), where_(where), message_(what)
    {
    }
    const std::string& where() const { return where_; }
    const std::string& message() const { return message_; }

private:
    std::string where_;
    std::string message_;
};

enum class PlantMode {
    Coupled,   // exact discretization of the interconnected network
    LocalZoh,  // every DER advanced by its own discrete model with d held over the step
};

std::string to_string(PlantMode mode);

enum class EventKind { LoadChange, DerPlugin, LineCut, AttackStart, AttackStop };

std::string to_string(EventKind kind);

struct PluginLine {
    NodeId to = 0;
    LineParams params;

    bool operator==(const PluginLine&) const = default;
};

struct Event {
    double time = 0.0;
    EventKind kind = EventKind::LoadChange;
    NodeId node = 0;                  // load_change, der_plugin
    double impedance = std::numeric_limits<double>::infinity();  // load_change, linearised Z_L
    double load_current = 0.0;                                    // load_change, linearised I_L
    std::vector<PluginLine> lines;    // der_plugin
    Edge line;                        // line_cut
    std::string attack;               // attack_start / attack_stop

    LinearizedLoad load() const { return LinearizedLoad::from_impedance(impedance, load_current); }

    bool operator==(const Event&) const = default;
};

struct ControlConfig {
    PrimaryGains primary;
    int secondary_period = 1;   // secondary update every n steps
    double tau = 0.05;          // completion threshold on the sharing error
    UioPoles poles;
    int hold_steps = 10;        // consecutive normal steps before an alarm drops
    int grace_steps = 5;        // detection frozen after an observer re-init
    double residual_floor = 1e-9;
    bool mitigation = true;
    double load_error = 0.0;    // relative error of the local load estimate
    bool load_error_total = false;  // apply the error to the resistive part too

    bool operator==(const ControlConfig& o) const
    {
        return primary.proportional == o.primary.proportional && primary.integral == o.primary.integral &&
               secondary_period == o.secondary_period && tau == o.tau && poles == o.poles &&
               hold_steps == o.hold_steps && grace_steps == o.grace_steps &&
               residual_floor == o.residual_floor && mitigation == o.mitigation &&
               load_error == o.load_error && load_error_total == o.load_error_total;
    }
};

struct NoiseConfig {
    std::uint64_t seed = 1;
    Vec2 process = Vec2::Zero();      // actual process noise bound, also used by the detector
    Vec2 measurement = Vec2::Zero();  // actual output noise bound
    double line_sensor = 0.0;         // line current sensor noise bound
    bool calibrate_mismatch = true;   // fold plant/model mismatch into the detector's process bound
    double mismatch_margin = 2.0;
    Vec2 extra_process = Vec2::Zero();  // manual addition to the detector's process bound

    bool operator==(const NoiseConfig&) const = default;
};

struct Horizons {
    double primary_start = 0.0;
    double secondary_start = 0.0;
    double detector_start = 0.0;

    bool operator==(const Horizons&) const = default;
};

struct Scenario {
    std::string name;
    double sampling_time = 1e-3;
    double duration = 1.0;
    PlantMode plant = PlantMode::Coupled;
    Horizons horizons;
    MicrogridTopology topology;
    std::map<NodeId, DerParams> ders;
    ControlConfig control;
    NoiseConfig noise;
    std::optional<std::vector<DirectedEdge>> sensors;  // nullopt: planned automatically
    std::vector<AttackSpec> attacks;
    std::vector<Event> events;

    long steps() const;
    long step_of(double time) const;

    /// Throws ScenarioError naming the first offending field.
    void validate() const;

    bool operator==(const Scenario&) const = default;
};

/// Topology after every der_plugin and line_cut has been applied in order;
/// nodes and lines that ever exist appear in `ever`.
struct TopologyHistory {
    std::set<NodeId> nodes;
    std::set<Edge> ever;
};
TopologyHistory topology_history(const Scenario& scenario);

Scenario parse_scenario(const std::string& text, const std::string& source = "<string>");
Scenario load_scenario(const std::string& path);
std::string serialize_scenario(const Scenario& scenario);

/// Bare graph files for the planner: `nodes` plus `lines` (pairs or maps).
MicrogridTopology parse_topology(const std::string& text, const std::string& source = "<string>");
MicrogridTopology load_topology(const std::string& path);

}  // namespace dcmg
