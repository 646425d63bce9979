#include "fixtures.hpp"

#include "dcmg/scenario.hpp"

#include <catch_amalgamated.hpp>

#include <string>

using namespace dcmg;

namespace {

const std::string kBase = R"(name: mini
sampling_time: 1.0e-3
duration: 1.0
defaults:
  der: {filter_resistance: 0.2, filter_inductance: 1.0e-3, filter_capacitance: 0.5e-3,
        rated_current: 10.0, load: {impedance: 10.0, constant_current: 0.5}}
  line: {resistance: 1.5, comm_weight: 0.05}
topology:
  nodes: [1, 2, 3]
  lines: [[1, 2], [2, 3]]
ders:
  - {id: 1, reference_voltage: 40.0}
  - {id: 2, reference_voltage: 40.0}
  - {id: 3, reference_voltage: 40.0}
)";

std::string error_of(const std::string& text)
{
    try {
        parse_scenario(text, "case.yaml");
    } catch (const ScenarioError& e) {
        return e.what();
    }
    return {};
}

bool contains(const std::string& text, const std::string& part)
{
    return text.find(part) != std::string::npos;
}

}  // namespace

TEST_CASE("bundled scenarios round-trip through the canonical form")
{
    for (const char* file : {"fig3_ring4.yaml", "der16_mesh.yaml", "der16_partition.yaml"}) {
        INFO(file);
        const Scenario a = fixture::bundled(file);
        const std::string text = serialize_scenario(a);
        const Scenario b = parse_scenario(text, "canonical");
        CHECK(a == b);
        CHECK(serialize_scenario(b) == text);
    }
}

TEST_CASE("a minimal scenario picks up defaults")
{
    const Scenario s = parse_scenario(kBase);
    CHECK(s.name == "mini");
    CHECK(s.steps() == 1000);
    CHECK(s.ders.at(2).filter_capacitance == 0.5e-3);
    CHECK(s.ders.at(3).zip.reference_voltage == 40.0);
    CHECK(s.topology.line(2, 3).resistance == 1.5);
    CHECK(s.plant == PlantMode::Coupled);
    CHECK_FALSE(s.sensors);
    CHECK(s.control.hold_steps == 10);
    CHECK(parse_scenario(serialize_scenario(s)) == s);
}

TEST_CASE("events and attacks parse")
{
    const Scenario s = parse_scenario(kBase + R"(attacks:
  - {id: a, link: [2, 1], shape: sine, target: both, amplitude: 1.0, frequency: 2.0,
     start_time: 0.2, windows: [[0.2, 0.4], [0.5, 0.9]]}
events:
  - {time: 0.3, kind: load_change, node: 2, impedance: 5.0, current: 1.0}
  - {time: 0.6, kind: attack_stop, attack: a}
  - {time: 0.7, kind: line_cut, line: [2, 3]}
)");
    REQUIRE(s.attacks.size() == 1);
    CHECK(s.attacks[0].link == DirectedEdge{2, 1});
    CHECK(s.attacks[0].signal.shape == BiasShape::Sine);
    CHECK(s.attacks[0].signal.target == BiasTarget::Both);
    CHECK(s.attacks[0].signal.windows.size() == 2);
    REQUIRE(s.events.size() == 3);
    CHECK(s.events[0].load().admittance == 0.2);
    CHECK(s.events[1].kind == EventKind::AttackStop);
    CHECK(s.events[2].line == Edge(2, 3));
    CHECK(parse_scenario(serialize_scenario(s)) == s);
}

TEST_CASE("missing sections are named")
{
    std::string text = kBase;
    text.replace(text.find("topology:"), std::string("topology:").size(), "topo_logy:");
    const std::string err = error_of(text);
    CHECK(contains(err, "case.yaml"));
    CHECK((contains(err, "topology") || contains(err, "topo_logy")));
    CHECK(contains(error_of("name: x\n"), "sampling_time"));
}

TEST_CASE("malformed YAML reports file, line and column")
{
    const std::string err = error_of("name: broken\ntopology:\n  nodes: [1, 2\n  lines: [[1, 2]]\n");
    CHECK(contains(err, "case.yaml:"));
    CHECK(std::count(err.begin(), err.end(), ':') >= 3);
}

TEST_CASE("semantic errors point at the offending entry")
{
    CHECK(contains(error_of(kBase + "events:\n  - {time: 0.5, kind: load_change, node: 7, impedance: 10.0, current: 1.0}\n"),
                   "events[0]"));
    CHECK(contains(error_of(kBase + "events:\n  - {time: 0.5, kind: line_cut, line: [1, 3]}\n"), "events[0]"));
    CHECK(contains(error_of(kBase + "events:\n  - {time: 0.5, kind: explode}\n"), "events[0]"));
    CHECK(contains(error_of(kBase + "attacks:\n  - {id: a, link: [1, 3], shape: step, amplitude: 1.0}\n"),
                   "attacks[0]"));
    CHECK(contains(error_of(kBase + "attacks:\n  - {id: a, link: [2, 1], shape: zigzag, amplitude: 1.0}\n"),
                   "attacks[0]"));
    CHECK(contains(error_of(kBase + "attacks:\n  - {id: a, link: [2, 1], shape: sine, amplitude: 1.0}\n"),
                   "frequency"));
    CHECK(contains(error_of(kBase + "control: {uio_poles: [1.2, 0.3]}\n"), "uio_poles"));
    CHECK(contains(error_of(kBase + "sensors: [[1, 3]]\n"), "sensors[0]"));
    CHECK(contains(error_of(kBase + "noise: {process: [-1.0, 0.0]}\n"), "noise.process"));
}

TEST_CASE("disconnected and isolated grids are rejected")
{
    std::string text = kBase;
    text.replace(text.find("[[1, 2], [2, 3]]"), std::string("[[1, 2], [2, 3]]").size(), "[[1, 2]]");
    CHECK(contains(error_of(text), "isolated"));
    const std::string plugged = text + "events:\n  - {time: 0.5, kind: der_plugin, node: 3, lines: [{to: 2}]}\n";
    CHECK(error_of(plugged).empty());
}

TEST_CASE("validation catches out-of-range fields")
{
    Scenario s = parse_scenario(kBase);
    s.sampling_time = 0.0;
    CHECK_THROWS_AS(s.validate(), ScenarioError);
    s = parse_scenario(kBase);
    s.horizons.detector_start = -1.0;
    CHECK_THROWS_AS(s.validate(), ScenarioError);
    s = parse_scenario(kBase);
    s.control.load_error = -1.0;
    CHECK_THROWS_AS(s.validate(), ScenarioError);
    s = parse_scenario(kBase);
    s.ders.at(1).filter_inductance = 0.0;
    try {
        s.validate();
        FAIL("accepted a zero inductance");
    } catch (const ScenarioError& e) {
        CHECK(e.where() == "ders[1]");
    }
}

TEST_CASE("graph files accept pairs or line maps")
{
    const MicrogridTopology pairs = parse_topology("nodes: [1, 2, 3]\nlines: [[1, 2], [2, 3]]\n");
    CHECK(pairs.lines().size() == 2);
    const MicrogridTopology maps =
        parse_topology("nodes: [1, 2]\nlines:\n  - {between: [1, 2], resistance: 0.7, comm_weight: 0.1}\n");
    CHECK(maps.line(1, 2).resistance == 0.7);
    CHECK(load_topology(fixture::scenario_path("graphs/mesh16.yaml")).nodes().size() == 16);
    CHECK_THROWS_AS(parse_topology("lines: [[1, 2]]\n"), ScenarioError);
    CHECK_THROWS_AS(load_scenario("/nonexistent/file.yaml"), ScenarioError);
}
