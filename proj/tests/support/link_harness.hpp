#pragma once

#include "dcmg/detect.hpp"
#include "dcmg/mitigate.hpp"
#include "dcmg/model.hpp"

#include <cstdint>
#include <vector>

namespace harness {

/// One sender DER driven by a smooth command and an unknown input, observed
/// over one attacked link. The receiver knows the exact voltage bias (as a
/// sensed line would give it) and reconstructs the current bias from the
/// alarm step on.
struct LinkSetup {
    dcmg::DiscreteModel model;
    std::vector<dcmg::Vec2> phi;  // bias per step, phi[0..n]
    long activation = 0;          // reconstruction armed at this step
    dcmg::NoiseBounds noise;
    std::uint64_t seed = 1;
    double disturbance = 5.0;     // amplitude of the unknown input, amperes
};

struct LinkRun {
    std::vector<dcmg::Vec2> residual;  // r(k), k = 0..n
    std::vector<double> phi_i_re;      // zero before activation
    std::vector<double> error;         // phi_I - phi_I^re, zero before activation
};

LinkRun run_link(const LinkSetup& setup);

/// Paper-style DER filter with `neighbors` lines of 1.5 ohm.
dcmg::DiscreteModel der_model(int neighbors, double sampling_time = 1e-3);

}  // namespace harness
