#include "dcmg/attack.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

using namespace dcmg;
using Catch::Approx;

namespace {

BiasSignal signal(BiasShape shape, double amplitude, double start = 1.0)
{
    BiasSignal s;
    s.shape = shape;
    s.amplitude = amplitude;
    s.start_time = start;
    return s;
}

AttackSpec spec(const std::string& id, DirectedEdge link, BiasSignal s)
{
    return {id, link, std::move(s), true};
}

}  // namespace

TEST_CASE("nothing before the start time")
{
    for (BiasShape shape : {BiasShape::Step, BiasShape::Ramp, BiasShape::Sine, BiasShape::Triangle,
                            BiasShape::Rectangle}) {
        BiasSignal s = signal(shape, 3.0);
        s.frequency = 2.0;
        s.slope = 1.0;
        CHECK(bias_value(s, 0.999) == Vec2::Zero());
    }
}

TEST_CASE("step on the current entry")
{
    const BiasSignal s = signal(BiasShape::Step, 2.0);
    CHECK(bias_value(s, 1.0) == Vec2(0.0, 2.0));
    CHECK(bias_value(s, 50.0) == Vec2(0.0, 2.0));
}

TEST_CASE("sine peaks at a quarter period")
{
    BiasSignal s = signal(BiasShape::Sine, 1.0);
    s.frequency = 0.5;
    const Vec2 v = bias_value(s, 1.5);
    CHECK(v(0) == 0.0);
    CHECK(v(1) == Approx(1.0).margin(1e-15));
    CHECK(bias_value(s, 2.0)(1) == Approx(0.0).margin(1e-12));
    CHECK(bias_value(s, 2.5)(1) == Approx(-1.0).margin(1e-12));
}

TEST_CASE("ramp grows with its slope and saturates at the amplitude")
{
    BiasSignal s = signal(BiasShape::Ramp, 0.0);
    s.slope = 2.0;
    CHECK(waveform(s, 1.5) == Approx(1.0));
    CHECK(waveform(s, 11.0) == Approx(20.0));
    s.amplitude = 3.0;
    CHECK(waveform(s, 11.0) == 3.0);
    s.slope = -2.0;
    CHECK(waveform(s, 11.0) == -3.0);
}

TEST_CASE("triangle and rectangle shapes")
{
    BiasSignal tri = signal(BiasShape::Triangle, 4.0, 0.0);
    tri.frequency = 1.0;
    CHECK(waveform(tri, 0.0) == Approx(0.0).margin(1e-12));
    CHECK(waveform(tri, 0.25) == Approx(4.0));
    CHECK(waveform(tri, 0.5) == Approx(0.0).margin(1e-12));
    CHECK(waveform(tri, 0.75) == Approx(-4.0));
    CHECK(waveform(tri, 0.125) == Approx(2.0));

    BiasSignal rect = signal(BiasShape::Rectangle, 1.5, 0.0);
    rect.frequency = 2.0;
    CHECK(waveform(rect, 0.1) == 1.5);
    CHECK(waveform(rect, 0.3) == -1.5);
    CHECK(waveform(rect, 0.6) == 1.5);
}

TEST_CASE("targets route the waveform")
{
    BiasSignal s = signal(BiasShape::Step, 1.5);
    s.target = BiasTarget::Voltage;
    CHECK(bias_value(s, 2.0) == Vec2(1.5, 0.0));
    s.target = BiasTarget::Both;
    CHECK(bias_value(s, 2.0) == Vec2(1.5, 1.5));
}

TEST_CASE("windows gate the waveform on [on, off)")
{
    BiasSignal s = signal(BiasShape::Step, 2.0, 0.0);
    s.windows = {{1.0, 2.0}, {3.0, 3.5}};
    CHECK(waveform(s, 0.5) == 0.0);
    CHECK(waveform(s, 1.0) == 2.0);
    CHECK(waveform(s, 1.999) == 2.0);
    CHECK(waveform(s, 2.0) == 0.0);
    CHECK(waveform(s, 3.25) == 2.0);
    CHECK(waveform(s, 3.5) == 0.0);
}

TEST_CASE("sfdia passes data through when nothing is active")
{
    const Vec2 y(40.0, 5.0);
    std::vector<AttackSpec> specs;
    CHECK(apply_sfdia(y, specs, {2, 1}, 3.0) == y);
    specs.push_back(spec("a", {2, 1}, signal(BiasShape::Step, 2.0)));
    CHECK(apply_sfdia(y, specs, {2, 1}, 0.5) == y);
    CHECK(apply_sfdia(y, specs, {1, 2}, 3.0) == y);
    CHECK(apply_sfdia(y, specs, {2, 1}, 3.0) == Vec2(40.0, 7.0));
    specs[0].enabled = false;
    CHECK(apply_sfdia(y, specs, {2, 1}, 3.0) == y);
}

TEST_CASE("biases on one link add up")
{
    std::vector<AttackSpec> specs{spec("a", {2, 1}, signal(BiasShape::Step, 1.0)),
                                  spec("b", {2, 1}, signal(BiasShape::Step, 1.0))};
    CHECK(link_bias(specs, {2, 1}, 2.0) == Vec2(0.0, 2.0));

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-5.0, 5.0), t(0.0, 10.0);
    for (int i = 0; i < 100; ++i) {
        BiasSignal s1 = signal(BiasShape::Sine, u(rng), 0.0);
        s1.frequency = 1.3;
        s1.target = BiasTarget::Both;
        BiasSignal s2 = signal(BiasShape::Ramp, 0.0, 0.5);
        s2.slope = u(rng);
        const std::vector<AttackSpec> both{spec("x", {3, 4}, s1), spec("y", {3, 4}, s2)};
        const double at = t(rng);
        CHECK((link_bias(both, {3, 4}, at) - bias_value(s1, at) - bias_value(s2, at)).norm() <= 1e-12);
    }
}

TEST_CASE("signal validation")
{
    BiasSignal s = signal(BiasShape::Sine, 1.0);
    CHECK_THROWS_AS(s.validate(), AttackError);
    s.frequency = 1.0;
    CHECK_NOTHROW(s.validate());
    s.windows = {{2.0, 1.0}};
    CHECK_THROWS_AS(s.validate(), AttackError);
    s.windows = {{1.0, 3.0}, {2.0, 4.0}};
    CHECK_THROWS_AS(s.validate(), AttackError);
    s.windows.clear();
    s.start_time = -1.0;
    CHECK_THROWS_AS(s.validate(), AttackError);
}

TEST_CASE("shape and target names round-trip")
{
    for (BiasShape shape : {BiasShape::Step, BiasShape::Ramp, BiasShape::Sine, BiasShape::Triangle,
                            BiasShape::Rectangle}) {
        CHECK(parse_bias_shape(to_string(shape)) == shape);
    }
    for (BiasTarget target : {BiasTarget::Voltage, BiasTarget::Current, BiasTarget::Both}) {
        CHECK(parse_bias_target(to_string(target)) == target);
    }
    CHECK_THROWS_AS(parse_bias_shape("square"), AttackError);
    CHECK_THROWS_AS(parse_bias_target("power"), AttackError);
}
