#include "dcmg/trace.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <limits>

namespace dcmg {

std::string format_number(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

const char* const kDerFields[] = {"V", "I", "u", "alpha", "alpha_tilde"};
const char* const kLinkFields[] = {"ys_V",  "ys_I",     "r_V",      "r_I",   "rbar_V", "rbar_I", "alarm",
                                   "phi_V", "phi_I",    "phiob_V",  "phire_I", "yco_V", "yco_I",  "mitigating"};

std::string link_prefix(const DirectedEdge& l)
{
    return "link_" + std::to_string(l.from) + "_" + std::to_string(l.to) + "_";
}

}  // namespace

std::vector<std::string> trace_columns(const TraceSchema& schema)
{
    std::vector<std::string> cols{"step", "time"};
    for (NodeId n : schema.nodes) {
        for (const char* f : kDerFields) {
            cols.push_back(std::string(f) + "_" + std::to_string(n));
        }
    }
    for (const auto& l : schema.links) {
        for (const char* f : kLinkFields) {
            cols.push_back(link_prefix(l) + f);
        }
    }
    return cols;
}

void write_trace_header(std::ostream& out, const TraceSchema& schema)
{
    const auto cols = trace_columns(schema);
    for (std::size_t i = 0; i < cols.size(); ++i) {
        out << (i ? "," : "") << cols[i];
    }
    out << '\n';
}

void write_trace_row(std::ostream& out, const StepRecord& r)
{
    out << r.step << ',' << format_number(r.time);
    for (const DerRecord& d : r.ders) {
        for (double v : {d.voltage, d.current, d.command, d.alpha, d.sharing_error}) {
            out << ',' << format_number(v);
        }
    }
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    for (const LinkRecord& l : r.links) {
        if (!l.exists) {
            for (std::size_t i = 0; i < std::size(kLinkFields); ++i) {
                out << ",nan";
            }
            continue;
        }
        const double values[] = {l.received(0),  l.received(1),  l.residual(0), l.residual(1),
                                 l.bound(0),     l.bound(1),     l.alarm ? 1.0 : 0.0,
                                 l.phi_true(0),  l.phi_true(1),
                                 l.mitigating && !l.discard ? l.phi_v_ob : nan,
                                 l.mitigating ? l.phi_i_re : nan,
                                 l.corrected(0), l.corrected(1), l.mitigating ? 1.0 : 0.0};
        for (double v : values) {
            out << ',' << format_number(v);
        }
    }
    out << '\n';
}

void write_trace_csv(std::ostream& out, const TraceSchema& schema, const std::vector<StepRecord>& records)
{
    write_trace_header(out, schema);
    for (const auto& r : records) {
        write_trace_row(out, r);
    }
}

void write_summary(std::ostream& out, const RunSummary& s)
{
    YAML::Emitter e;
    e.SetDoublePrecision(std::numeric_limits<double>::max_digits10);
    e << YAML::BeginMap;
    e << YAML::Key << "scenario" << YAML::Value << s.scenario;
    e << YAML::Key << "seed" << YAML::Value << s.seed;
    e << YAML::Key << "steps" << YAML::Value << s.steps;
    e << YAML::Key << "sampling_time" << YAML::Value << s.sampling_time;
    e << YAML::Key << "detector_process_bound" << YAML::Value << YAML::Flow << YAML::BeginSeq
      << s.detector_process(0) << s.detector_process(1) << YAML::EndSeq;
    e << YAML::Key << "sensors" << YAML::Value << s.sensors;
    e << YAML::Key << "total_alarm_steps" << YAML::Value << s.total_alarm_steps;
    e << YAML::Key << "mean_voltage" << YAML::Value << s.mean_voltage;
    e << YAML::Key << "current_sharing_error" << YAML::Value << s.final_current_sharing_error;

    e << YAML::Key << "ders" << YAML::Value << YAML::BeginSeq;
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
        e << YAML::Flow << YAML::BeginMap;
        e << YAML::Key << "id" << YAML::Value << s.nodes[i];
        e << YAML::Key << "voltage" << YAML::Value << s.final_voltage[i];
        e << YAML::Key << "current" << YAML::Value << s.final_current[i];
        e << YAML::Key << "alpha" << YAML::Value << s.final_alpha[i];
        e << YAML::Key << "alpha_tilde" << YAML::Value << s.final_sharing_error[i];
        e << YAML::EndMap;
    }
    e << YAML::EndSeq;

    e << YAML::Key << "links" << YAML::Value << YAML::BeginSeq;
    for (const auto& l : s.links) {
        e << YAML::Flow << YAML::BeginMap;
        e << YAML::Key << "link" << YAML::Value << YAML::Flow << YAML::BeginSeq << l.link.from << l.link.to
          << YAML::EndSeq;
        e << YAML::Key << "first_alarm_time" << YAML::Value;
        if (l.first_alarm_time) {
            e << *l.first_alarm_time;
        } else {
            e << YAML::Null;
        }
        e << YAML::Key << "alarm_steps" << YAML::Value << l.alarm_steps;
        e << YAML::Key << "max_abs_residual" << YAML::Value << YAML::Flow << YAML::BeginSeq
          << l.max_abs_residual(0) << l.max_abs_residual(1) << YAML::EndSeq;
        e << YAML::Key << "final_reconstruction_error" << YAML::Value << l.final_reconstruction_error;
        e << YAML::EndMap;
    }
    e << YAML::EndSeq;
    e << YAML::EndMap;
    out << e.c_str() << '\n';
}

}  // namespace dcmg
