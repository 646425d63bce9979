#pragma once

#include "dcmg/linalg.hpp"
#include "dcmg/topology.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dcmg {

class AttackError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class BiasShape { Step, Ramp, Sine, Triangle, Rectangle };
enum class BiasTarget { Voltage, Current, Both };

std::string to_string(BiasShape shape);
std::string to_string(BiasTarget target);
BiasShape parse_bias_shape(const std::string& text);
BiasTarget parse_bias_target(const std::string& text);

/// Window [on, off) in absolute simulation time.
struct ActiveWindow {
    double on = 0.0;
    double off = 0.0;

    bool operator==(const ActiveWindow&) const = default;
};

struct BiasSignal {
    BiasShape shape = BiasShape::Step;
    double amplitude = 0.0;  // volts or amperes; caps the ramp magnitude when positive
    double frequency = 0.0;  // hertz, periodic shapes
    double slope = 0.0;      // units per second, ramp
    double start_time = 0.0;
    std::vector<ActiveWindow> windows;  // empty: always on after start_time
    BiasTarget target = BiasTarget::Current;

    void validate() const;
    bool operator==(const BiasSignal&) const = default;
};

/// Bias on the data DER `link.from` receives from DER `link.to`.
struct AttackSpec {
    std::string id;
    DirectedEdge link;
    BiasSignal signal;
    bool enabled = true;  // toggled by attack_start / attack_stop events

    bool operator==(const AttackSpec&) const = default;
};

/// Scalar waveform at time t, zero before start and outside the windows.
double waveform(const BiasSignal& signal, double t);

/// (phi_V, phi_I) at time t.
Vec2 bias_value(const BiasSignal& signal, double t);

/// Sum of the biases of every enabled spec on `link` at time t.
Vec2 link_bias(std::span<const AttackSpec> specs, DirectedEdge link, double t);

/// Transmitted copy y^s = y + phi.
Vec2 apply_sfdia(const Vec2& y, std::span<const AttackSpec> specs, DirectedEdge link, double t);

}  // namespace dcmg
