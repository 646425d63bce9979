#include "dcmg/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace dcmg {

TraceSchema make_schema(const Scenario& scenario)
{
    const TopologyHistory h = topology_history(scenario);
    TraceSchema s;
    s.nodes.assign(h.nodes.begin(), h.nodes.end());
    std::set<DirectedEdge> links;
    for (const Edge& e : h.ever) {
        links.insert({e.a, e.b});
        links.insert({e.b, e.a});
    }
    s.links.assign(links.begin(), links.end());
    return s;
}

Engine::Engine(const Scenario& scenario, const Vec2& detector_process)
    : scenario_(scenario),
      schema_(make_schema(scenario)),
      topology_(scenario.topology),
      attacks_(scenario.attacks),
      rng_(scenario.noise.seed)
{
    detector_noise_.process = detector_process;
    detector_noise_.measurement = scenario_.noise.measurement;

    for (NodeId id : schema_.nodes) {
        Der d;
        d.id = id;
        d.params = scenario_.ders.at(id);
        d.load = linearize_zip(d.params.zip);
        d.primary = PrimaryController(scenario_.control.primary);
        index_[id] = ders_.size();
        ders_.push_back(std::move(d));
    }
    for (const DirectedEdge& l : schema_.links) {
        Link link;
        link.link = l;
        link.latch = AlarmLatch(scenario_.control.hold_steps, scenario_.control.residual_floor);
        link_index_[l] = links_.size();
        links_.push_back(std::move(link));
    }

    steps_ = scenario_.steps();
    primary_start_ = scenario_.step_of(scenario_.horizons.primary_start);
    secondary_start_ = scenario_.step_of(scenario_.horizons.secondary_start);
    detector_start_ = scenario_.step_of(scenario_.horizons.detector_start);

    record_.ders.resize(ders_.size());
    record_.links.resize(links_.size());

    rebuild_models();
    replan_sensors();
}

const UioGains& Engine::uio_gains(NodeId sender) const
{
    return ders_.at(der_index(sender)).uio;
}

const ReconstructionGains& Engine::reconstruction_gains(NodeId sender) const
{
    return ders_.at(der_index(sender)).rg;
}

void Engine::rebuild_models()
{
    const double ts = scenario_.sampling_time;
    for (Der& d : ders_) {
        d.neighbors = topology_.neighbors(d.id);
        d.in_links.clear();
        for (NodeId j : d.neighbors) {
            d.in_links.push_back(link_index_.at({d.id, j}));
        }
        const ContinuousModel cont = build_continuous(topology_, d.id, {d.params, d.load});
        const DiscreteModel model = discretize(cont, ts);
        const bool changed = !d.synthesized || model.a != d.model.a || model.b != d.model.b ||
                             model.m != d.model.m;
        d.cont = cont;
        if (!changed) {
            continue;
        }
        d.model = model;
        d.uio = synthesize_uio(model, scenario_.control.poles, "of DER " + std::to_string(d.id));
        try {
            d.rg = make_reconstruction_gains(d.uio);
            d.rg_ok = d.rg.stable();
        } catch (const MitigationError&) {
            d.rg_ok = false;
        }
        d.synthesized = true;
        for (Link& l : links_) {
            if (l.link.to == d.id) {
                l.pending_init = true;
            }
        }
    }

    for (Link& l : links_) {
        const bool now = topology_.has_line(l.link.from, l.link.to);
        if (now != l.exists) {
            l.exists = now;
            l.pending_init = true;
            l.uio = UioState{};
            l.latch = AlarmLatch(scenario_.control.hold_steps, scenario_.control.residual_floor);
            reset_reconstruction(l.rec);
        }
    }

    if (scenario_.plant == PlantMode::Coupled) {
        std::map<NodeId, DerCircuit> circuits;
        for (const Der& d : ders_) {
            circuits[d.id] = {d.params, d.load};
        }
        plant_ = build_global_plant(topology_, circuits, ts);
    }
}

void Engine::replan_sensors()
{
    if (scenario_.sensors) {
        plan_ = SensorPlan{};
        for (const DirectedEdge& s : *scenario_.sensors) {
            if (topology_.has_line(s.from, s.to)) {
                plan_.sensors.insert(s);
            }
        }
    } else {
        plan_ = plan_sensors_per_component(topology_);
    }
}

void Engine::apply_events()
{
    bool models = false;
    bool graph = false;
    const auto& events = scenario_.events;
    while (next_event_ < events.size() && scenario_.step_of(events[next_event_].time) <= k_) {
        const Event& e = events[next_event_++];
        switch (e.kind) {
        case EventKind::LoadChange:
            ders_[der_index(e.node)].load = e.load();
            models = true;
            break;
        case EventKind::DerPlugin:
            for (const auto& l : e.lines) {
                topology_.add_line(e.node, l.to, l.params);
            }
            models = graph = true;
            break;
        case EventKind::LineCut:
            topology_.remove_line(e.line.a, e.line.b);
            models = graph = true;
            break;
        case EventKind::AttackStart:
        case EventKind::AttackStop:
            for (auto& a : attacks_) {
                if (a.id == e.attack) {
                    a.enabled = e.kind == EventKind::AttackStart;
                }
            }
            break;
        }
    }
    if (models) {
        rebuild_models();
    }
    if (graph) {
        replan_sensors();
    }
}

void Engine::measure()
{
    for (Der& d : ders_) {
        d.y = d.x + draw_bounded_noise(rng_, scenario_.noise.measurement);
    }
    for (Der& d : ders_) {
        d.readings.clear();
        for (NodeId j : d.neighbors) {
            if (plan_.has_sensor(d.id, j)) {
                const double truth = (d.x(0) - ders_[der_index(j)].x(0)) / topology_.line(d.id, j).resistance;
                d.readings[j] = truth + draw_bounded_noise(rng_, scenario_.noise.line_sensor);
            }
        }
        const double load = estimate_load_current(d.load, d.y(0), scenario_.control.load_error,
                                                  scenario_.control.load_error_total);
        const double previous = d.has_prev ? d.y_prev(0) : d.y(0);
        d.current_sum = estimate_outgoing_current_sum(d.y(1), d.y(0), previous, d.params.filter_capacitance,
                                                      scenario_.sampling_time, load);
    }
}

void Engine::detect_and_mitigate()
{
    const auto start = std::chrono::steady_clock::now();
    const bool detecting = k_ >= detector_start_;
    const bool mitigation = scenario_.control.mitigation;

    for (std::size_t idx = 0; idx < links_.size(); ++idx) {
        Link& l = links_[idx];
        LinkRecord& out = record_.links[idx];
        if (!l.exists) {
            out = LinkRecord{};
            continue;
        }
        const Der& receiver = ders_[der_index(l.link.from)];
        const Der& sender = ders_[der_index(l.link.to)];

        out.exists = true;
        out.detecting = detecting;
        out.phi_true = link_bias(attacks_, l.link, t_);
        out.received = sender.y + out.phi_true;

        if (!detecting) {
            out.residual.setZero();
            out.bound.setZero();
            out.alarm = false;
            out.phi_v_ob = 0.0;
            out.phi_i_re = 0.0;
            out.corrected = out.received;
            out.mitigating = out.discard = false;
            continue;
        }

        if (l.pending_init) {
            uio_init(l.uio, sender.uio, out.received);
            l.bound = ResidualBound(sender.uio, detector_noise_);
            l.latch.suppress(scenario_.control.grace_steps);
            if (l.rec.active) {
                l.rec.hold = true;
            }
            l.pending_init = false;
        } else {
            uio_step(l.uio, sender.uio, sender.u, out.received);
            l.bound.advance();
        }
        out.residual = l.uio.r;
        out.bound = l.bound.value();
        out.alarm = l.latch.update(out.residual, out.bound, k_);

        out.phi_v_ob = 0.0;
        if (mitigation) {
            const std::optional<double> line_current =
                resolve_line_current(plan_, receiver.neighbors, l.link.from, l.link.to, receiver.readings,
                                     receiver.current_sum);
            const bool observable = line_current.has_value() && sender.rg_ok;
            if (observable) {
                out.phi_v_ob = observe_voltage_bias(out.received, receiver.y,
                                                    topology_.line(l.link.from, l.link.to).resistance,
                                                    *line_current);
            }
            if (out.alarm) {
                if (!l.rec.active) {
                    if (observable) {
                        start_reconstruction(l.rec, out.phi_v_ob, out.residual, k_);
                    } else {
                        start_discard(l.rec, k_);
                    }
                } else if (!l.rec.discard) {
                    if (observable) {
                        reconstruct_current_bias(l.rec, sender.uio, sender.rg, out.residual, out.phi_v_ob);
                    } else {
                        start_discard(l.rec, k_);
                    }
                }
            } else if (l.rec.active) {
                reset_reconstruction(l.rec);
            }
            out.corrected = correct_measurement(out.received, l.rec, receiver.y, k_);
        } else {
            out.corrected = out.received;
        }
        out.mitigating = l.rec.active;
        out.discard = l.rec.active && l.rec.discard;
        out.phi_i_re = l.rec.active ? l.rec.phi_re(1) : 0.0;
    }

    defense_seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void Engine::control()
{
    const bool secondary_tick =
        k_ >= secondary_start_ && (k_ - secondary_start_) % scenario_.control.secondary_period == 0;
    std::vector<ConsensusInput> inputs;
    for (Der& d : ders_) {
        inputs.clear();
        for (std::size_t li : d.in_links) {
            const LinkRecord& rec = record_.links[li];
            const NodeId j = links_[li].link.to;
            inputs.push_back({topology_.line(d.id, j).comm_weight, rec.corrected(1),
                              ders_[der_index(j)].params.rated_current});
        }
        d.sharing_error = sharing_error(inputs, d.y(1), d.params.rated_current);
        if (secondary_tick) {
            d.secondary.step(inputs, d.y(1), d.params.rated_current);
        }
        if (k_ >= primary_start_) {
            d.u = d.primary.step(d.y, d.params.zip.reference_voltage, d.secondary.alpha());
        } else {
            d.u = 0.0;
        }
    }
}

void Engine::advance_plant()
{
    const std::size_t n = ders_.size();
    std::vector<Vec2> predicted;
    if (track_mismatch_ || scenario_.plant == PlantMode::LocalZoh) {
        predicted.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Der& d = ders_[i];
            double coupling = 0.0;
            for (NodeId j : d.neighbors) {
                coupling += ders_[der_index(j)].x(0) / topology_.line(d.id, j).resistance;
            }
            const double dist = d.load.current - coupling;
            predicted[i] = d.model.a * d.x + d.model.b * d.u + d.model.m * dist;
        }
    }

    std::vector<Vec2> next(n);
    if (scenario_.plant == PlantMode::Coupled) {
        VecX x(2 * n);
        VecX u(n);
        VecX load(n);
        for (std::size_t i = 0; i < n; ++i) {
            x.segment<2>(2 * i) = ders_[i].x;
            u(i) = ders_[i].u;
            load(i) = ders_[i].load.current;
        }
        const VecX xn = plant_.a * x + plant_.b_input * u + plant_.b_load * load;
        for (std::size_t i = 0; i < n; ++i) {
            next[i] = xn.segment<2>(2 * i);
        }
    } else {
        next = predicted;
    }

    if (track_mismatch_ && k_ >= detector_start_) {
        for (std::size_t i = 0; i < n; ++i) {
            mismatch_ = mismatch_.cwiseMax((next[i] - predicted[i]).cwiseAbs());
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        Der& d = ders_[i];
        d.x = next[i] + draw_bounded_noise(rng_, scenario_.noise.process);
        d.y_prev = d.y;
        d.has_prev = true;
    }
}

void Engine::fill_record()
{
    record_.step = k_;
    record_.time = t_;
    for (std::size_t i = 0; i < ders_.size(); ++i) {
        const Der& d = ders_[i];
        DerRecord& r = record_.ders[i];
        r.voltage = d.x(0);
        r.current = d.x(1);
        r.command = d.u;
        r.alpha = d.secondary.alpha();
        r.sharing_error = d.sharing_error;
    }
}

void Engine::step()
{
    t_ = static_cast<double>(k_) * scenario_.sampling_time;
    apply_events();
    measure();
    detect_and_mitigate();
    control();
    fill_record();
    advance_plant();
    ++k_;
}

Vec2 measure_model_mismatch(const Scenario& scenario)
{
    Scenario dry = scenario;
    dry.noise.process.setZero();
    dry.noise.measurement.setZero();
    dry.noise.line_sensor = 0.0;
    dry.attacks.clear();
    dry.control.mitigation = false;
    std::erase_if(dry.events, [](const Event& e) {
        return e.kind == EventKind::AttackStart || e.kind == EventKind::AttackStop;
    });
    Engine engine(dry, Vec2::Zero());
    engine.track_model_mismatch(true);
    while (!engine.done()) {
        engine.step();
    }
    return engine.model_mismatch();
}

Vec2 detector_process_bound(const Scenario& scenario)
{
    Vec2 bound = scenario.noise.process + scenario.noise.extra_process;
    if (scenario.noise.calibrate_mismatch && scenario.plant == PlantMode::Coupled) {
        bound += scenario.noise.mismatch_margin * measure_model_mismatch(scenario);
    }
    return bound;
}

double current_sharing_error(const MicrogridTopology& topology, const std::vector<NodeId>& nodes,
                             const std::vector<double>& currents, const std::vector<double>& ratings)
{
    std::map<NodeId, std::size_t> pos;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        pos[nodes[i]] = i;
    }
    double worst = 0.0;
    for (const auto& comp : topology.components()) {
        if (comp.size() < 2) {
            continue;
        }
        double mean = 0.0;
        for (NodeId n : comp) {
            mean += currents[pos.at(n)] / ratings[pos.at(n)];
        }
        mean /= static_cast<double>(comp.size());
        for (NodeId n : comp) {
            const std::size_t i = pos.at(n);
            worst = std::max(worst, std::abs(currents[i] - ratings[i] * mean));
        }
    }
    return worst;
}

RunResult run_scenario(const Scenario& input, const RunOptions& options)
{
    Scenario scenario = input;
    if (options.seed) {
        scenario.noise.seed = *options.seed;
    }
    scenario.validate();

    const Vec2 process = detector_process_bound(scenario);
    Engine engine(scenario, process);

    RunResult result;
    result.schema = engine.schema();
    RunSummary& sum = result.summary;
    sum.scenario = scenario.name;
    sum.seed = scenario.noise.seed;
    sum.steps = engine.total_steps();
    sum.sampling_time = scenario.sampling_time;
    sum.detector_process = process;
    sum.nodes = result.schema.nodes;
    for (const auto& l : result.schema.links) {
        sum.links.push_back({l, std::nullopt, 0, Vec2::Zero(), 0.0});
    }

    const long stride = std::max<long>(1, options.stride);
    while (!engine.done()) {
        engine.step();
        const StepRecord& rec = engine.record();
        if (options.observer) {
            options.observer(engine, rec);
        }
        if (options.keep_records && rec.step % stride == 0) {
            result.records.push_back(rec);
        }
        for (std::size_t i = 0; i < rec.links.size(); ++i) {
            const LinkRecord& lr = rec.links[i];
            LinkSummary& ls = sum.links[i];
            if (!lr.exists || !lr.detecting) {
                continue;
            }
            ls.max_abs_residual = ls.max_abs_residual.cwiseMax(lr.residual.cwiseAbs());
            if (lr.alarm) {
                ++ls.alarm_steps;
                ++sum.total_alarm_steps;
                if (!ls.first_alarm_time) {
                    ls.first_alarm_time = rec.time;
                }
            }
            if (lr.mitigating && !lr.discard) {
                ls.final_reconstruction_error = std::abs(lr.phi_true(1) - lr.phi_i_re);
            }
        }
    }

    const StepRecord& last = engine.record();
    std::vector<double> ratings;
    for (std::size_t i = 0; i < sum.nodes.size(); ++i) {
        const DerRecord& d = last.ders[i];
        sum.final_voltage.push_back(d.voltage);
        sum.final_current.push_back(d.current);
        sum.final_alpha.push_back(d.alpha);
        sum.final_sharing_error.push_back(d.sharing_error);
        ratings.push_back(scenario.ders.at(sum.nodes[i]).rated_current);
        sum.mean_voltage += d.voltage;
    }
    if (!sum.nodes.empty()) {
        sum.mean_voltage /= static_cast<double>(sum.nodes.size());
    }
    sum.final_current_sharing_error =
        current_sharing_error(engine.topology(), sum.nodes, sum.final_current, ratings);
    sum.sensors = engine.sensor_plan().sensors.size();
    return result;
}

}  // namespace dcmg
