#pragma once

#include "dcmg/detect.hpp"
#include "dcmg/linalg.hpp"
#include "dcmg/model.hpp"
#include "dcmg/topology.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace dcmg {

class MitigationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ReconstructionGains {
    Vec2 t1 = Vec2::Zero();
    Vec2 t2 = Vec2::Zero();
    Vec2 t2_tilde = Vec2::Zero();
    Mat2 ta = Mat2::Zero();  // T A_d
    double zeta = 0.0;
    double eta = 0.0;

    bool stable() const { return std::abs(eta) < 1.0; }
};

ReconstructionGains make_reconstruction_gains(const UioGains& uio);

/// eta = [zeta, 1] A_d (0, 1)' with zeta = -m2/m1. Throws MitigationError
/// when m1 vanishes.
double reconstruction_eigenvalue(const Mat2& a_d, const Vec2& m_d);

/// The same eigenvalue written through an arbitrary projector T with
/// T m_d = 0: t2_tilde' T A_d (0, 1)'.
double reconstruction_eigenvalue(const Mat2& t, const Mat2& a_d);

struct EtaApprox {
    double value = 0.0;
    bool reliable = true;  // false when some |a_rc T| >= 1
};

EtaApprox eta_approx(double a22, double sampling_time);
/// Checks every entry of the continuous generator for the reliability flag.
EtaApprox eta_approx(const Mat2& a_cont, double sampling_time);

/// |t2_tilde|' chi / (1 - |eta|), chi = |T| rho + |T A_d| rho + |T| omega.
double reconstruction_error_bound(const UioGains& uio, const ReconstructionGains& rg,
                                  const NoiseBounds& noise);

/// phi_V = V^s - (V_i - R_ij I_ij), line current positive from i toward j.
double observe_voltage_bias(const Vec2& received, const Vec2& local, double resistance,
                            double line_current);

/// Load current as DER i estimates it: the resistive part is taken as exact,
/// the constant-current part carries the relative error. `scale_total`
/// applies the error to both parts.
double estimate_load_current(const LinearizedLoad& load, double voltage, double relative_error,
                             bool scale_total = false);

/// I_t - (C / T)(V(k) - V(k-1)) - I_L_hat: current leaving the PCC into the lines.
double estimate_outgoing_current_sum(double converter_current, double voltage, double previous_voltage,
                                     double capacitance, double sampling_time, double load_estimate);

/// Current on line (at, toward) as seen by DER `at`. `readings` holds the
/// local sensor values keyed by far-end node. Empty when the line is neither
/// sensed nor recoverable from the current sum.
std::optional<double> resolve_line_current(const SensorPlan& plan, const std::vector<NodeId>& neighbors,
                                           NodeId at, NodeId toward,
                                           const std::map<NodeId, double>& readings,
                                           double current_sum);

/// Reconstruction memory of one directed link.
struct ReconstructionState {
    bool active = false;
    bool discard = false;
    long activation_step = -1;
    Vec2 phi_re = Vec2::Zero();  // (phi_V^ob, phi_I^re)
    Vec2 prev_r = Vec2::Zero();
    bool hold = false;  // skip one update after the observer was re-initialised
};

/// Arms reconstruction at the alarm step: phi_re = (phi_V^ob, 0).
void start_reconstruction(ReconstructionState& state, double phi_v_ob, const Vec2& residual, long k);

/// Arms the discard fallback at the alarm step.
void start_discard(ReconstructionState& state, long k);

/// One recursion of the current-bias estimate:
/// phi_I(k+1) = t2_tilde' (T A_d phi_re(k) - t1 phi_V^ob(k+1) + r(k+1) - F r(k)).
double reconstruct_current_bias(ReconstructionState& state, const UioGains& uio,
                                const ReconstructionGains& rg, const Vec2& residual_next,
                                double phi_v_ob_next);

/// Clears everything (alarm dropped).
void reset_reconstruction(ReconstructionState& state);

/// Data handed to the consensus law. Passes y^s through while inactive and at
/// the activation step of an observable link; the discard fallback substitutes
/// the local output and records the implied bias.
Vec2 correct_measurement(const Vec2& received, ReconstructionState& state, const Vec2& local, long k);

}  // namespace dcmg
