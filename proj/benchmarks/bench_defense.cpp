#include "dcmg/engine.hpp"
#include "dcmg/scenario.hpp"

#include <benchmark/benchmark.h>

#include <memory>

namespace {

const dcmg::Scenario& mesh()
{
    static const dcmg::Scenario s = dcmg::load_scenario(DCMG_SCENARIO_DIR "/der16_mesh.yaml");
    return s;
}

const dcmg::Vec2& mesh_process_bound()
{
    static const dcmg::Vec2 p = dcmg::detector_process_bound(mesh());
    return p;
}

// Engine advanced to the first attack step, so every link is detecting and
// the attacked ones are mitigating.
std::unique_ptr<dcmg::Engine> engine_under_attack()
{
    const dcmg::Scenario& s = mesh();
    auto engine = std::make_unique<dcmg::Engine>(s, mesh_process_bound());
    const long attack = s.step_of(s.attacks.front().signal.start_time);
    while (engine->current_step() < attack) {
        engine->step();
    }
    return engine;
}

// Full sampling instant of the 16-DER system: events, measurements, attacks,
// detection, mitigation, control and plant. The defense_us counter is the
// detection and mitigation phase alone.
void BM_Mesh16Step(benchmark::State& state)
{
    auto engine = engine_under_attack();
    double defense = 0.0;
    long steps = 0;
    for (auto _ : state) {
        if (engine->done()) {
            state.PauseTiming();
            engine = engine_under_attack();
            state.ResumeTiming();
        }
        engine->step();
        defense += engine->last_defense_seconds();
        ++steps;
    }
    state.counters["defense_us"] = benchmark::Counter(steps ? defense / static_cast<double>(steps) * 1e6 : 0.0);
}
BENCHMARK(BM_Mesh16Step)->Unit(benchmark::kMicrosecond);

// One link: observer update, threshold recursion and latch.
void BM_LinkDetect(benchmark::State& state)
{
    const dcmg::Engine engine(mesh(), mesh_process_bound());
    const dcmg::UioGains& gains = engine.uio_gains(1);
    dcmg::UioState uio;
    dcmg::uio_init(uio, gains, dcmg::Vec2(48.0, 5.0));
    dcmg::ResidualBound bound(gains, engine.detector_noise());
    dcmg::AlarmLatch latch;
    long k = 0;
    dcmg::Vec2 y(48.0, 5.0);
    for (auto _ : state) {
        y(1) = 5.0 + 1e-3 * static_cast<double>(k & 7);
        const dcmg::Vec2& r = dcmg::uio_step(uio, gains, 48.0, y);
        bound.advance();
        benchmark::DoNotOptimize(latch.update(r, bound.value(), k));
        ++k;
    }
}
BENCHMARK(BM_LinkDetect);

}  // namespace

BENCHMARK_MAIN();
