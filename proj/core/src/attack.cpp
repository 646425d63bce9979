#include "dcmg/attack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace dcmg {

std::string to_string(BiasShape shape)
{
    switch (shape) {
    case BiasShape::Step: return "step";
    case BiasShape::Ramp: return "ramp";
    case BiasShape::Sine: return "sine";
    case BiasShape::Triangle: return "triangle";
    case BiasShape::Rectangle: return "rectangle";
    }
    return "step";
}

std::string to_string(BiasTarget target)
{
    switch (target) {
    case BiasTarget::Voltage: return "voltage";
    case BiasTarget::Current: return "current";
    case BiasTarget::Both: return "both";
    }
    return "current";
}

BiasShape parse_bias_shape(const std::string& text)
{
    if (text == "step") return BiasShape::Step;
    if (text == "ramp") return BiasShape::Ramp;
    if (text == "sine") return BiasShape::Sine;
    if (text == "triangle") return BiasShape::Triangle;
    if (text == "rectangle") return BiasShape::Rectangle;
    throw AttackError("unknown bias shape '" + text + "'");
}

BiasTarget parse_bias_target(const std::string& text)
{
    if (text == "voltage") return BiasTarget::Voltage;
    if (text == "current") return BiasTarget::Current;
    if (text == "both") return BiasTarget::Both;
    throw AttackError("unknown bias target '" + text + "'");
}

void BiasSignal::validate() const
{
    if (!(start_time >= 0.0)) {
        throw AttackError("bias start_time must be non-negative");
    }
    if (!std::isfinite(amplitude) || !std::isfinite(slope)) {
        throw AttackError("bias amplitude and slope must be finite");
    }
    const bool periodic =
        shape == BiasShape::Sine || shape == BiasShape::Triangle || shape == BiasShape::Rectangle;
    if (periodic && !(frequency > 0.0 && std::isfinite(frequency))) {
        throw AttackError("periodic bias needs a positive frequency");
    }
    double last_off = -std::numeric_limits<double>::infinity();
    for (const auto& w : windows) {
        if (!(w.on < w.off)) {
            throw AttackError("bias window must have on < off");
        }
        if (w.on < last_off) {
            throw AttackError("bias windows must be ordered and disjoint");
        }
        last_off = w.off;
    }
}

double waveform(const BiasSignal& s, double t)
{
    if (t < s.start_time) {
        return 0.0;
    }
    if (!s.windows.empty()) {
        bool on = false;
        for (const auto& w : s.windows) {
            if (t >= w.on && t < w.off) {
                on = true;
                break;
            }
        }
        if (!on) {
            return 0.0;
        }
    }
    const double tau = t - s.start_time;
    const double cycles = s.frequency * tau;
    const double phase = cycles - std::floor(cycles);
    switch (s.shape) {
    case BiasShape::Step:
        return s.amplitude;
    case BiasShape::Ramp: {
        const double v = s.slope * tau;
        if (s.amplitude > 0.0) {
            return std::clamp(v, -s.amplitude, s.amplitude);
        }
        return v;
    }
    case BiasShape::Sine:
        return s.amplitude * std::sin(2.0 * std::numbers::pi * cycles);
    case BiasShape::Triangle: {
        double unit;
        if (phase < 0.25) {
            unit = 4.0 * phase;
        } else if (phase < 0.75) {
            unit = 2.0 - 4.0 * phase;
        } else {
            unit = 4.0 * phase - 4.0;
        }
        return s.amplitude * unit;
    }
    case BiasShape::Rectangle:
        return phase < 0.5 ? s.amplitude : -s.amplitude;
    }
    return 0.0;
}

Vec2 bias_value(const BiasSignal& signal, double t)
{
    const double v = waveform(signal, t);
    switch (signal.target) {
    case BiasTarget::Voltage: return {v, 0.0};
    case BiasTarget::Current: return {0.0, v};
    case BiasTarget::Both: return {v, v};
    }
    return Vec2::Zero();
}

Vec2 link_bias(std::span<const AttackSpec> specs, DirectedEdge link, double t)
{
    Vec2 sum = Vec2::Zero();
    for (const auto& spec : specs) {
        if (spec.enabled && spec.link == link) {
            sum += bias_value(spec.signal, t);
        }
    }
    return sum;
}

Vec2 apply_sfdia(const Vec2& y, std::span<const AttackSpec> specs, DirectedEdge link, double t)
{
    return y + link_bias(specs, link, t);
}

}  // namespace dcmg
