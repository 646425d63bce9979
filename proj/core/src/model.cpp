#include "dcmg/model.hpp"

#include <cmath>
#include <string>

namespace dcmg {

void ZipLoad::validate() const
{
    if (!(impedance > 0.0)) {
        throw ModelError("zip load: impedance must be positive (use .inf for none)");
    }
    if (!(reference_voltage > 0.0)) {
        throw ModelError("zip load: reference voltage must be positive");
    }
    if (!(constant_power >= 0.0)) {
        throw ModelError("zip load: constant power must be non-negative");
    }
    if (!std::isfinite(constant_current)) {
        throw ModelError("zip load: constant current must be finite");
    }
}

LinearizedLoad linearize_zip(const ZipLoad& zip)
{
    zip.validate();
    const double v2 = zip.reference_voltage * zip.reference_voltage;
    const double y_z = std::isinf(zip.impedance) ? 0.0 : 1.0 / zip.impedance;
    LinearizedLoad out;
    out.admittance = y_z - zip.constant_power / v2;
    out.current = zip.constant_current + 2.0 * zip.constant_power / zip.reference_voltage;
    return out;
}

void DerParams::validate() const
{
    auto positive = [](double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw ModelError(std::string("der: ") + what + " must be positive");
        }
    };
    positive(filter_resistance, "filter_resistance");
    positive(filter_inductance, "filter_inductance");
    positive(filter_capacitance, "filter_capacitance");
    positive(rated_current, "rated_current");
    zip.validate();
}

ContinuousModel build_continuous(const DerParams& params, const LinearizedLoad& load,
                                 std::span<const double> neighbor_line_resistances)
{
    const double c = params.filter_capacitance;
    const double l = params.filter_inductance;
    double coupling = 0.0;
    for (double r : neighbor_line_resistances) {
        if (!(r > 0.0)) {
            throw ModelError("line resistance must be positive");
        }
        coupling += 1.0 / r;
    }
    ContinuousModel m;
    m.a << -(load.admittance + coupling) / c, 1.0 / c,
           -1.0 / l, -params.filter_resistance / l;
    m.b << 0.0, 1.0 / l;
    m.m << -1.0 / c, 0.0;
    return m;
}

ContinuousModel build_continuous(const DerParams& params,
                                 std::span<const double> neighbor_line_resistances)
{
    return build_continuous(params, linearize_zip(params.zip), neighbor_line_resistances);
}

ContinuousModel build_continuous(const MicrogridTopology& topology, NodeId node,
                                 const DerCircuit& der)
{
    std::vector<double> resistances;
    for (NodeId j : topology.neighbors(node)) {
        resistances.push_back(topology.line(node, j).resistance);
    }
    return build_continuous(der.params, der.load, resistances);
}

DiscreteModel discretize(const ContinuousModel& model, double sampling_time)
{
    MatX inputs(2, 2);
    inputs.col(0) = model.b;
    inputs.col(1) = model.m;
    const ZohResult z = zoh(model.a, inputs, sampling_time);
    DiscreteModel d;
    d.a = z.state;
    d.b = z.input.col(0);
    d.m = z.input.col(1);
    d.sampling_time = sampling_time;
    return d;
}

GlobalPlant build_global_plant(const MicrogridTopology& topology,
                               const std::map<NodeId, DerCircuit>& ders, double sampling_time)
{
    GlobalPlant g;
    for (NodeId n : topology.nodes()) {
        if (!ders.count(n)) {
            throw ModelError("no DER parameters for node " + std::to_string(n));
        }
        g.index[n] = static_cast<Eigen::Index>(g.order.size());
        g.order.push_back(n);
    }
    const Eigen::Index n = g.size();
    g.a_cont = MatX::Zero(2 * n, 2 * n);
    MatX inputs = MatX::Zero(2 * n, 2 * n);

    for (NodeId node : g.order) {
        const Eigen::Index k = g.index.at(node);
        const DerCircuit& der = ders.at(node);
        const ContinuousModel local = build_continuous(topology, node, der);
        g.a_cont.block(2 * k, 2 * k, 2, 2) = local.a;
        for (NodeId j : topology.neighbors(node)) {
            g.a_cont(2 * k, 2 * g.index.at(j)) +=
                1.0 / (der.params.filter_capacitance * topology.line(node, j).resistance);
        }
        inputs.block(2 * k, k, 2, 1) = local.b;
        inputs.block(2 * k, n + k, 2, 1) = local.m;
    }

    const ZohResult z = zoh(g.a_cont, inputs, sampling_time);
    g.a = z.state;
    g.b_input = z.input.leftCols(n);
    g.b_load = z.input.rightCols(n);
    g.sampling_time = sampling_time;
    return g;
}

}  // namespace dcmg
