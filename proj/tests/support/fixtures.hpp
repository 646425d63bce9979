#pragma once

#include "dcmg/engine.hpp"
#include "dcmg/scenario.hpp"

#include <string>
#include <vector>

namespace fixture {

std::string scenario_path(const std::string& file);
dcmg::Scenario bundled(const std::string& file);

/// R_t = 0.2, L_t = 1e-3, C_t = 0.5e-3, 10 A rating, 10 ohm + 0.5 A load at 40 V.
dcmg::DerParams paper_der(double reference_voltage = 40.0);

/// Four-DER ring with the bundled defaults, no attacks, no events.
dcmg::Scenario ring4(dcmg::PlantMode plant = dcmg::PlantMode::LocalZoh);

dcmg::Scenario without_noise(dcmg::Scenario s);
dcmg::Scenario without_attacks(dcmg::Scenario s);

/// Every record of a run, one per step.
std::vector<dcmg::StepRecord> run_all(const dcmg::Scenario& s);

std::size_t link_index(const dcmg::TraceSchema& schema, dcmg::NodeId receiver, dcmg::NodeId sender);
std::size_t node_index(const dcmg::TraceSchema& schema, dcmg::NodeId node);

dcmg::AttackSpec current_step(const std::string& id, dcmg::NodeId receiver, dcmg::NodeId sender,
                              double amplitude, double start);

}  // namespace fixture
