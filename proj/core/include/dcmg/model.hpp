#pragma once

#include "dcmg/linalg.hpp"
#include "dcmg/topology.hpp"

#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

namespace dcmg {

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// ZIP load as specified at the PCC. An infinite impedance means no
/// constant-impedance component.
struct ZipLoad {
    double impedance = std::numeric_limits<double>::infinity();  // ohms
    double constant_current = 0.0;                               // amperes
    double constant_power = 0.0;                                 // watts
    double reference_voltage = 0.0;                              // volts

    void validate() const;
    bool operator==(const ZipLoad&) const = default;
};

/// Load after linearising the CPL part around the reference voltage:
/// i_load = admittance * V + current.
///
/// A zero admittance is the pure current source case (the CPL cancels the
/// resistive part exactly); `impedance()` then reports +inf.
struct LinearizedLoad {
    double admittance = 0.0;  // siemens
    double current = 0.0;     // amperes

    bool is_pure_current_source() const { return admittance == 0.0; }
    double impedance() const
    {
        return is_pure_current_source() ? std::numeric_limits<double>::infinity() : 1.0 / admittance;
    }
    static LinearizedLoad from_impedance(double impedance, double current)
    {
        return {impedance == std::numeric_limits<double>::infinity() ? 0.0 : 1.0 / impedance, current};
    }

    bool operator==(const LinearizedLoad&) const = default;
};

LinearizedLoad linearize_zip(const ZipLoad& zip);

struct DerParams {
    double filter_resistance = 0.0;   // R_t, ohms
    double filter_inductance = 0.0;   // L_t, henries
    double filter_capacitance = 0.0;  // C_t, farads
    double rated_current = 0.0;       // amperes
    ZipLoad zip;

    void validate() const;
    bool operator==(const DerParams&) const = default;
};

/// x' = A x + b u + m d with x = (V, I_t) and
/// d = I_L - sum_j V_j / R_ij (load current plus neighbour coupling).
struct ContinuousModel {
    Mat2 a = Mat2::Zero();
    Vec2 b = Vec2::Zero();
    Vec2 m = Vec2::Zero();
};

struct DiscreteModel {
    Mat2 a = Mat2::Zero();
    Vec2 b = Vec2::Zero();
    Vec2 m = Vec2::Zero();
    double sampling_time = 0.0;
};

struct NoiseBounds {
    Vec2 process = Vec2::Zero();
    Vec2 measurement = Vec2::Zero();
};

ContinuousModel build_continuous(const DerParams& params, const LinearizedLoad& load,
                                 std::span<const double> neighbor_line_resistances);

/// Uses the linearised ZIP load carried in `params`.
ContinuousModel build_continuous(const DerParams& params,
                                 std::span<const double> neighbor_line_resistances);

DiscreteModel discretize(const ContinuousModel& model, double sampling_time);

/// Electrical description of one DER as the simulator currently sees it.
struct DerCircuit {
    DerParams params;
    LinearizedLoad load;
};

/// Coupled ground-truth plant over the stacked state
/// (V_1, I_t1, V_2, I_t2, ...) in ascending node order. Inputs are the N
/// converter commands followed by the N constant load currents, both held
/// over the sampling interval.
struct GlobalPlant {
    std::vector<NodeId> order;
    std::map<NodeId, Eigen::Index> index;
    MatX a_cont;
    MatX a;        // 2N x 2N
    MatX b_input;  // 2N x N
    MatX b_load;   // 2N x N
    double sampling_time = 0.0;

    Eigen::Index size() const { return static_cast<Eigen::Index>(order.size()); }
};

GlobalPlant build_global_plant(const MicrogridTopology& topology,
                               const std::map<NodeId, DerCircuit>& ders, double sampling_time);

/// Per-DER continuous model in the grid context (neighbour resistances taken
/// from the topology).
ContinuousModel build_continuous(const MicrogridTopology& topology, NodeId node,
                                 const DerCircuit& der);

}  // namespace dcmg
