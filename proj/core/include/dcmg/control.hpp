#pragma once

#include "dcmg/linalg.hpp"

#include <span>

namespace dcmg {

struct PrimaryGains {
    Vec2 proportional = Vec2::Zero();  // applied to the full local output (V, I_t)
    double integral = 0.03;
};

/// PI voltage loop. The command is u = gP' y + gI * sum_l (V_ref + alpha - V).
class PrimaryController {
public:
    PrimaryController() = default;
    explicit PrimaryController(const PrimaryGains& gains) : gains_(gains) {}

    /// Advances the integrator once and returns the converter command.
    double step(const Vec2& local_output, double reference_voltage, double alpha);
    /// Command for the current integrator state without accumulating.
    double hold(const Vec2& local_output) const;

    void reset() { accumulated_ = 0.0; }
    double accumulated_error() const { return accumulated_; }
    const PrimaryGains& gains() const { return gains_; }

private:
    PrimaryGains gains_;
    double accumulated_ = 0.0;
};

/// One neighbour's contribution to the consensus law.
struct ConsensusInput {
    double weight = 0.0;
    double neighbor_current = 0.0;  // corrected (or raw) received I_t of DER j
    double neighbor_rating = 1.0;
};

inline double normalized_difference(const ConsensusInput& in, double local_current, double local_rating)
{
    return in.neighbor_current / in.neighbor_rating - local_current / local_rating;
}

/// Integral consensus on normalised output currents.
class SecondaryConsensus {
public:
    /// Adds sum_j a_ij (I_j / I_j^s - I_i / I_i^s) to alpha and returns it.
    double step(std::span<const ConsensusInput> neighbors, double local_current, double local_rating);

    static double increment(std::span<const ConsensusInput> neighbors, double local_current,
                            double local_rating);

    double alpha() const { return alpha_; }
    void reset() { alpha_ = 0.0; }

private:
    double alpha_ = 0.0;
};

/// sum_j |I_j^co / I_j^s - I_i / I_i^s|, the completion test of the mitigation.
double sharing_error(std::span<const ConsensusInput> neighbors, double local_current, double local_rating);

}  // namespace dcmg
