#pragma once

#include "dcmg/detect.hpp"
#include "dcmg/mitigate.hpp"
#include "dcmg/model.hpp"
#include "dcmg/scenario.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace dcmg {

std::vector<double> linspace(double first, double last, std::size_t count);

struct EtaGrid {
    std::vector<double> filter_resistance;
    std::vector<double> filter_inductance;
    std::vector<double> filter_capacitance;
    std::vector<double> sampling_time;
};

/// Electrical context shared by every grid point.
struct EtaContext {
    double load_admittance = 0.1;              // siemens
    std::vector<double> neighbor_resistances{1.5};
};

struct EtaPoint {
    double filter_resistance = 0.0;
    double filter_inductance = 0.0;
    double filter_capacitance = 0.0;
    double sampling_time = 0.0;
    double eta = 0.0;
    double eta_approx = 0.0;
    bool approx_reliable = true;

    double approx_error() const { return std::abs(eta - eta_approx); }
    bool stable() const { return std::abs(eta) < 1.0; }
};

EtaPoint evaluate_eta(double r, double l, double c, double t, const EtaContext& ctx = {});

/// Full Cartesian product of the grid axes.
std::vector<EtaPoint> sweep_eta(const EtaGrid& grid, const EtaContext& ctx = {});

void write_eta_csv(std::ostream& out, const std::vector<EtaPoint>& points);

struct UioLinkReport {
    DirectedEdge link;  // (receiver, sender)
    bool ok = false;
    std::string error;
    double tm_residual = 0.0;  // max |T m_d|
    double f_eig_1 = 0.0;
    double f_eig_2 = 0.0;
    double nu = 0.0;
    double sigma = 0.0;
    double eta = 0.0;
    double reconstruction_bound = 0.0;
};

struct UioReport {
    bool ok = true;
    Vec2 process_bound = Vec2::Zero();
    std::vector<UioLinkReport> links;
};

/// Synthesises the observer of every link of the initial topology and checks
/// decoupling, pole placement and reconstruction stability.
UioReport verify_uio(const Scenario& scenario, const Vec2& process_bound);

void write_uio_report(std::ostream& out, const UioReport& report);

}  // namespace dcmg
