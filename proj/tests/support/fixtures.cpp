#include "fixtures.hpp"

#include <algorithm>
#include <stdexcept>

namespace fixture {

std::string scenario_path(const std::string& file)
{
    return std::string(DCMG_SCENARIO_DIR) + "/" + file;
}

dcmg::Scenario bundled(const std::string& file)
{
    return dcmg::load_scenario(scenario_path(file));
}

dcmg::DerParams paper_der(double reference_voltage)
{
    dcmg::DerParams p;
    p.filter_resistance = 0.2;
    p.filter_inductance = 1e-3;
    p.filter_capacitance = 0.5e-3;
    p.rated_current = 10.0;
    p.zip.impedance = 10.0;
    p.zip.constant_current = 0.5;
    p.zip.reference_voltage = reference_voltage;
    return p;
}

dcmg::Scenario ring4(dcmg::PlantMode plant)
{
    dcmg::Scenario s = bundled("fig3_ring4.yaml");
    s.name = "ring4";
    s.plant = plant;
    s.attacks.clear();
    s.events.clear();
    s.control.mitigation = true;
    return s;
}

dcmg::Scenario without_noise(dcmg::Scenario s)
{
    s.noise.process.setZero();
    s.noise.measurement.setZero();
    s.noise.line_sensor = 0.0;
    return s;
}

dcmg::Scenario without_attacks(dcmg::Scenario s)
{
    s.attacks.clear();
    std::erase_if(s.events, [](const dcmg::Event& e) {
        return e.kind == dcmg::EventKind::AttackStart || e.kind == dcmg::EventKind::AttackStop;
    });
    return s;
}

std::vector<dcmg::StepRecord> run_all(const dcmg::Scenario& s)
{
    dcmg::RunOptions opts;
    opts.keep_records = true;
    return dcmg::run_scenario(s, opts).records;
}

std::size_t link_index(const dcmg::TraceSchema& schema, dcmg::NodeId receiver, dcmg::NodeId sender)
{
    const auto it = std::find(schema.links.begin(), schema.links.end(), dcmg::DirectedEdge{receiver, sender});
    if (it == schema.links.end()) {
        throw std::out_of_range("no link in schema");
    }
    return static_cast<std::size_t>(it - schema.links.begin());
}

std::size_t node_index(const dcmg::TraceSchema& schema, dcmg::NodeId node)
{
    const auto it = std::find(schema.nodes.begin(), schema.nodes.end(), node);
    if (it == schema.nodes.end()) {
        throw std::out_of_range("no node in schema");
    }
    return static_cast<std::size_t>(it - schema.nodes.begin());
}

dcmg::AttackSpec current_step(const std::string& id, dcmg::NodeId receiver, dcmg::NodeId sender,
                              double amplitude, double start)
{
    dcmg::AttackSpec a;
    a.id = id;
    a.link = {receiver, sender};
    a.signal.shape = dcmg::BiasShape::Step;
    a.signal.amplitude = amplitude;
    a.signal.start_time = start;
    a.signal.target = dcmg::BiasTarget::Current;
    return a;
}

}  // namespace fixture
