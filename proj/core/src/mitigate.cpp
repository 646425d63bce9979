#include "dcmg/mitigate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dcmg {

ReconstructionGains make_reconstruction_gains(const UioGains& uio)
{
    ReconstructionGains g;
    g.t1 = uio.t.col(0);
    g.t2 = uio.t.col(1);
    const double n2 = g.t2.squaredNorm();
    if (!(n2 > 0.0)) {
        throw MitigationError("second column of T vanishes; current bias not reconstructible");
    }
    g.t2_tilde = g.t2 / n2;
    g.ta = uio.t * uio.model.a;
    g.eta = reconstruction_eigenvalue(uio.model.a, uio.model.m);
    g.zeta = -uio.model.m(1) / uio.model.m(0);
    return g;
}

double reconstruction_eigenvalue(const Mat2& a_d, const Vec2& m_d)
{
    if (m_d(0) == 0.0) {
        throw MitigationError("m_d has a zero voltage entry; reconstruction eigenvalue undefined");
    }
    const double zeta = -m_d(1) / m_d(0);
    return zeta * a_d(0, 1) + a_d(1, 1);
}

double reconstruction_eigenvalue(const Mat2& t, const Mat2& a_d)
{
    const Vec2 t2 = t.col(1);
    const double n2 = t2.squaredNorm();
    if (!(n2 > 0.0)) {
        throw MitigationError("second column of T vanishes");
    }
    return (t2 / n2).dot(t * a_d.col(1));
}

EtaApprox eta_approx(double a22, double sampling_time)
{
    return {1.0 + a22 * sampling_time, std::abs(a22 * sampling_time) < 1.0};
}

EtaApprox eta_approx(const Mat2& a_cont, double sampling_time)
{
    EtaApprox e = eta_approx(a_cont(1, 1), sampling_time);
    e.reliable = (a_cont.cwiseAbs() * sampling_time).maxCoeff() < 1.0;
    return e;
}

double reconstruction_error_bound(const UioGains& uio, const ReconstructionGains& rg,
                                  const NoiseBounds& noise)
{
    if (!rg.stable()) {
        std::ostringstream os;
        os << "reconstruction eigenvalue " << rg.eta << " is not inside the unit circle";
        throw MitigationError(os.str());
    }
    const Vec2 chi = abs(uio.t) * noise.measurement + abs(rg.ta) * noise.measurement +
                     abs(uio.t) * noise.process;
    return abs(rg.t2_tilde).dot(chi) / (1.0 - std::abs(rg.eta));
}

double observe_voltage_bias(const Vec2& received, const Vec2& local, double resistance,
                            double line_current)
{
    return received(0) - (local(0) - resistance * line_current);
}

double estimate_load_current(const LinearizedLoad& load, double voltage, double relative_error,
                             bool scale_total)
{
    const double resistive = load.admittance * voltage;
    if (scale_total) {
        return (1.0 + relative_error) * (resistive + load.current);
    }
    return resistive + (1.0 + relative_error) * load.current;
}

double estimate_outgoing_current_sum(double converter_current, double voltage, double previous_voltage,
                                     double capacitance, double sampling_time, double load_estimate)
{
    return converter_current - capacitance / sampling_time * (voltage - previous_voltage) -
           load_estimate;
}

std::optional<double> resolve_line_current(const SensorPlan& plan, const std::vector<NodeId>& neighbors,
                                           NodeId at, NodeId toward,
                                           const std::map<NodeId, double>& readings,
                                           double current_sum)
{
    if (plan.has_sensor(at, toward)) {
        auto it = readings.find(toward);
        if (it == readings.end()) {
            return std::nullopt;
        }
        return it->second;
    }
    double rest = current_sum;
    for (NodeId other : neighbors) {
        if (other == toward) {
            continue;
        }
        auto it = readings.find(other);
        if (!plan.has_sensor(at, other) || it == readings.end()) {
            return std::nullopt;
        }
        rest -= it->second;
    }
    return rest;
}

void start_reconstruction(ReconstructionState& state, double phi_v_ob, const Vec2& residual, long k)
{
    state.active = true;
    state.discard = false;
    state.activation_step = k;
    state.phi_re = Vec2(phi_v_ob, 0.0);
    state.prev_r = residual;
    state.hold = false;
}

void start_discard(ReconstructionState& state, long k)
{
    state.active = true;
    state.discard = true;
    state.activation_step = k;
    state.phi_re.setZero();
    state.hold = false;
}

double reconstruct_current_bias(ReconstructionState& state, const UioGains& uio,
                                const ReconstructionGains& rg, const Vec2& residual_next,
                                double phi_v_ob_next)
{
    if (state.hold) {
        state.hold = false;
        state.phi_re(0) = phi_v_ob_next;
        state.prev_r = residual_next;
        return state.phi_re(1);
    }
    const Vec2 psi = residual_next - uio.f * state.prev_r;
    const double phi_i = rg.t2_tilde.dot(rg.ta * state.phi_re - rg.t1 * phi_v_ob_next + psi);
    state.phi_re = Vec2(phi_v_ob_next, phi_i);
    state.prev_r = residual_next;
    return phi_i;
}

void reset_reconstruction(ReconstructionState& state)
{
    state = ReconstructionState{};
}

Vec2 correct_measurement(const Vec2& received, ReconstructionState& state, const Vec2& local, long k)
{
    if (!state.active) {
        return received;
    }
    if (state.discard) {
        state.phi_re = received - local;
        return local;
    }
    if (k == state.activation_step) {
        return received;
    }
    return received - state.phi_re;
}

}  // namespace dcmg
