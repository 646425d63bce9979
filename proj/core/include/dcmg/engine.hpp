#pragma once

#include "dcmg/attack.hpp"
#include "dcmg/control.hpp"
#include "dcmg/detect.hpp"
#include "dcmg/mitigate.hpp"
#include "dcmg/model.hpp"
#include "dcmg/noise.hpp"
#include "dcmg/scenario.hpp"
#include "dcmg/topology.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace dcmg {

struct DerRecord {
    double voltage = 0.0;
    double current = 0.0;
    double command = 0.0;
    double alpha = 0.0;
    double sharing_error = 0.0;  // alpha tilde over the corrected neighbour data
};

struct LinkRecord {
    bool exists = false;
    bool detecting = false;
    Vec2 received = Vec2::Zero();   // y^s
    Vec2 residual = Vec2::Zero();
    Vec2 bound = Vec2::Zero();
    bool alarm = false;
    Vec2 phi_true = Vec2::Zero();
    double phi_v_ob = 0.0;
    double phi_i_re = 0.0;
    Vec2 corrected = Vec2::Zero();  // y^co
    bool mitigating = false;
    bool discard = false;
};

struct StepRecord {
    long step = 0;
    double time = 0.0;
    std::vector<DerRecord> ders;    // schema node order
    std::vector<LinkRecord> links;  // schema link order
};

/// Fixed column layout: every node and every directed link that exists at
/// some point of the run.
struct TraceSchema {
    std::vector<NodeId> nodes;
    std::vector<DirectedEdge> links;  // (receiver, sender)
};

TraceSchema make_schema(const Scenario& scenario);

/// Simulation of one scenario, one call to `step()` per sampling instant.
/// Within a step: events, measurements, attacks, detection, mitigation,
/// secondary and primary control, plant update.
class Engine {
public:
    /// `detector_process` is the process bound handed to the residual
    /// thresholds (see `detector_process_bound`).
    Engine(const Scenario& scenario, const Vec2& detector_process);

    bool done() const { return k_ >= steps_; }
    void step();

    long current_step() const { return k_; }
    long total_steps() const { return steps_; }
    const StepRecord& record() const { return record_; }
    const TraceSchema& schema() const { return schema_; }
    const MicrogridTopology& topology() const { return topology_; }
    const SensorPlan& sensor_plan() const { return plan_; }
    const UioGains& uio_gains(NodeId sender) const;
    const ReconstructionGains& reconstruction_gains(NodeId sender) const;
    NoiseBounds detector_noise() const { return detector_noise_; }

    /// Wall time of the detection and mitigation phase of the last step.
    double last_defense_seconds() const { return defense_seconds_; }

    /// Largest |x(k+1) - (A_d x + b_d u + m_d d)| seen so far, per component,
    /// over all DERs, from the detector start on. Only tracked when enabled
    /// before the run.
    void track_model_mismatch(bool on) { track_mismatch_ = on; }
    Vec2 model_mismatch() const { return mismatch_; }

private:
    struct Der {
        NodeId id = 0;
        DerParams params;
        LinearizedLoad load;
        ContinuousModel cont;
        DiscreteModel model;
        UioGains uio;
        ReconstructionGains rg;
        bool rg_ok = false;
        PrimaryController primary;
        SecondaryConsensus secondary;
        Vec2 x = Vec2::Zero();
        double u = 0.0;  // command held over the current interval
        Vec2 y = Vec2::Zero();
        Vec2 y_prev = Vec2::Zero();
        bool has_prev = false;
        std::map<NodeId, double> readings;
        double current_sum = 0.0;
        double sharing_error = 0.0;
        std::vector<NodeId> neighbors;
        std::vector<std::size_t> in_links;
        bool synthesized = false;
    };

    struct Link {
        DirectedEdge link;
        bool exists = false;
        bool pending_init = true;
        UioState uio;
        ResidualBound bound;
        AlarmLatch latch;
        ReconstructionState rec;
    };

    void apply_events();
    void rebuild_models();
    void replan_sensors();
    void measure();
    void detect_and_mitigate();
    void control();
    void advance_plant();
    void fill_record();

    std::size_t der_index(NodeId id) const { return index_.at(id); }

    Scenario scenario_;
    TraceSchema schema_;
    NoiseBounds detector_noise_;
    MicrogridTopology topology_;
    SensorPlan plan_;
    std::vector<AttackSpec> attacks_;
    std::vector<Der> ders_;
    std::map<NodeId, std::size_t> index_;
    std::vector<Link> links_;
    std::map<DirectedEdge, std::size_t> link_index_;
    GlobalPlant plant_;
    Rng rng_;
    std::size_t next_event_ = 0;
    long k_ = 0;
    long steps_ = 0;
    long secondary_start_ = 0;
    long primary_start_ = 0;
    long detector_start_ = 0;
    double t_ = 0.0;
    StepRecord record_;
    double defense_seconds_ = 0.0;
    bool track_mismatch_ = false;
    Vec2 mismatch_ = Vec2::Zero();
};

/// Noise-free, attack-free replay of the scenario measuring the largest
/// per-step deviation of the plant from the local models the observers use.
Vec2 measure_model_mismatch(const Scenario& scenario);

/// Process bound for the residual thresholds: configured bound plus manual
/// extra plus, when calibration is on, margin times the measured mismatch.
Vec2 detector_process_bound(const Scenario& scenario);

struct LinkSummary {
    DirectedEdge link;
    std::optional<double> first_alarm_time;
    long alarm_steps = 0;
    Vec2 max_abs_residual = Vec2::Zero();
    double final_reconstruction_error = 0.0;  // |phi_I - phi_I^re| at the last step while mitigating
};

struct RunSummary {
    std::string scenario;
    std::uint64_t seed = 0;
    long steps = 0;
    double sampling_time = 0.0;
    Vec2 detector_process = Vec2::Zero();
    std::size_t sensors = 0;
    long total_alarm_steps = 0;
    std::vector<LinkSummary> links;
    std::vector<NodeId> nodes;
    std::vector<double> final_voltage;
    std::vector<double> final_current;
    std::vector<double> final_alpha;
    std::vector<double> final_sharing_error;
    double final_current_sharing_error = 0.0;  // amperes, worst node, within each island
    double mean_voltage = 0.0;
};

struct RunOptions {
    long stride = 1;              // keep every n-th record
    bool keep_records = true;
    std::optional<std::uint64_t> seed;
    std::function<void(const Engine&, const StepRecord&)> observer;
};

struct RunResult {
    TraceSchema schema;
    std::vector<StepRecord> records;
    RunSummary summary;
};

RunResult run_scenario(const Scenario& scenario, const RunOptions& options = {});

/// max_i |I_i - I_i^s mean_j(I_j / I_j^s)| with the mean taken over each
/// connected island separately.
double current_sharing_error(const MicrogridTopology& topology, const std::vector<NodeId>& nodes,
                             const std::vector<double>& currents, const std::vector<double>& ratings);

}  // namespace dcmg
