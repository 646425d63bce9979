#include "dcmg/analysis.hpp"
#include "dcmg/engine.hpp"
#include "dcmg/scenario.hpp"
#include "dcmg/topology.hpp"
#include "dcmg/trace.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kInternal = 1;
constexpr int kInvalid = 2;

struct InvalidInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string default_out_dir()
{
    if (const char* env = std::getenv("DCMG_OUTPUT_DIR"); env && *env) {
        return env;
    }
    return "out";
}

std::ofstream open_output(const fs::path& path)
{
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

// "a:b:n" for n evenly spaced points, or a comma list.
std::vector<double> parse_axis(const std::string& text, const std::string& name)
{
    std::vector<double> out;
    try {
        if (text.find(':') != std::string::npos) {
            std::stringstream ss(text);
            std::string a, b, n;
            std::getline(ss, a, ':');
            std::getline(ss, b, ':');
            std::getline(ss, n, ':');
            const long count = std::stol(n);
            if (count < 1) {
                throw InvalidInput(name + ": point count must be positive");
            }
            return dcmg::linspace(std::stod(a), std::stod(b), static_cast<std::size_t>(count));
        }
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) {
            out.push_back(std::stod(item));
        }
    } catch (const std::invalid_argument&) {
        throw InvalidInput(name + ": cannot parse '" + text + "'");
    } catch (const std::out_of_range&) {
        throw InvalidInput(name + ": value out of range in '" + text + "'");
    }
    if (out.empty()) {
        throw InvalidInput(name + ": empty grid axis");
    }
    for (double v : out) {
        if (!(v > 0.0)) {
            throw InvalidInput(name + ": values must be positive");
        }
    }
    return out;
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir, std::optional<std::uint64_t> seed,
            long stride, bool no_trace)
{
    const dcmg::Scenario scenario = dcmg::load_scenario(scenario_path);
    const std::string stem = scenario.name.empty() ? fs::path(scenario_path).stem().string() : scenario.name;
    const fs::path dir(out_dir);

    dcmg::RunOptions opts;
    opts.seed = seed;
    opts.keep_records = false;

    std::ofstream trace;
    if (!no_trace) {
        trace = open_output(dir / (stem + "_trace.csv"));
        dcmg::write_trace_header(trace, dcmg::make_schema(scenario));
        opts.observer = [&](const dcmg::Engine&, const dcmg::StepRecord& rec) {
            if (rec.step % stride == 0) {
                dcmg::write_trace_row(trace, rec);
            }
        };
    }
    const dcmg::RunResult result = dcmg::run_scenario(scenario, opts);

    std::ofstream summary = open_output(dir / (stem + "_summary.yaml"));
    dcmg::write_summary(summary, result.summary);

    std::cout << "scenario " << stem << ": " << result.summary.steps << " steps, "
              << result.summary.total_alarm_steps << " alarm steps, sharing error "
              << result.summary.final_current_sharing_error << " A\n";
    if (!no_trace) {
        std::cout << "trace   " << (dir / (stem + "_trace.csv")).string() << '\n';
    }
    std::cout << "summary " << (dir / (stem + "_summary.yaml")).string() << '\n';
    return kOk;
}

bool looks_like_scenario(const std::string& path)
{
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("ders:", 0) == 0) {
            return true;
        }
    }
    return false;
}

// The grid a scenario plans for: initial lines plus every plugged-in DER.
dcmg::MicrogridTopology planning_topology(const dcmg::Scenario& scenario)
{
    dcmg::MicrogridTopology topo = scenario.topology;
    for (const dcmg::Event& e : scenario.events) {
        if (e.kind == dcmg::EventKind::DerPlugin) {
            for (const auto& l : e.lines) {
                topo.add_line(e.node, l.to, l.params);
            }
        }
    }
    return topo;
}

int cmd_plan(const std::string& input, const std::string& out_path)
{
    const dcmg::MicrogridTopology topo = looks_like_scenario(input)
                                             ? planning_topology(dcmg::load_scenario(input))
                                             : dcmg::load_topology(input);
    if (!topo.is_connected()) {
        throw InvalidInput(input + ": graph is not connected");
    }
    const dcmg::SensorPlan plan = dcmg::plan_sensors(topo);
    const std::string text = dcmg::format_sensor_plan(plan, topo.nodes().size());
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
    } else {
        std::ofstream out = open_output(out_path);
        out << text;
        std::cout << "sensors " << plan.sensors.size() << " -> " << out_path << '\n';
    }
    return kOk;
}

int cmd_sweep(const std::string& r, const std::string& l, const std::string& c, const std::string& t,
              const std::string& out_path)
{
    dcmg::EtaGrid grid;
    grid.filter_resistance = parse_axis(r, "--resistance");
    grid.filter_inductance = parse_axis(l, "--inductance");
    grid.filter_capacitance = parse_axis(c, "--capacitance");
    grid.sampling_time = parse_axis(t, "--sampling-time");
    const auto points = dcmg::sweep_eta(grid);

    std::size_t unstable = 0;
    std::size_t unreliable = 0;
    double max_err = 0.0;
    for (const auto& p : points) {
        unstable += p.stable() ? 0 : 1;
        unreliable += p.approx_reliable ? 0 : 1;
        max_err = std::max(max_err, p.approx_error());
    }
    if (out_path.empty() || out_path == "-") {
        dcmg::write_eta_csv(std::cout, points);
    } else {
        std::ofstream out = open_output(out_path);
        dcmg::write_eta_csv(out, points);
    }
    std::cerr << points.size() << " points, " << unstable << " with |eta| >= 1, max |eta - eta_appr| "
              << max_err;
    if (unreliable) {
        std::cerr << ", approximation flagged unreliable at " << unreliable << " points";
    }
    std::cerr << '\n';
    return kOk;
}

int cmd_verify(const std::string& scenario_path)
{
    const dcmg::Scenario scenario = dcmg::load_scenario(scenario_path);
    const dcmg::UioReport report = dcmg::verify_uio(scenario, dcmg::detector_process_bound(scenario));
    dcmg::write_uio_report(std::cout, report);
    return report.ok ? kOk : kInvalid;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Islanded DC microgrid simulator with secondary FDIA detection and mitigation"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = default_out_dir();
    std::optional<std::uint64_t> seed;
    long stride = 1;
    bool no_trace = false;
    auto* run = app.add_subcommand("run", "simulate a scenario and write trace + summary");
    run->add_option("scenario", scenario_path, "scenario file")->required();
    run->add_option("-o,--out-dir", out_dir, "output directory (default $DCMG_OUTPUT_DIR or ./out)");
    run->add_option("--seed", seed, "override the noise seed");
    run->add_option("--stride", stride, "write every n-th step to the trace")->check(CLI::PositiveNumber);
    run->add_flag("--no-trace", no_trace, "write the summary only");

    std::string plan_input;
    std::string plan_out;
    auto* plan = app.add_subcommand("plan-sensors", "current sensor deployment for a scenario or graph file");
    plan->add_option("input", plan_input, "scenario or graph file")->required();
    plan->add_option("-o,--out", plan_out, "output file (default stdout)");

    std::string r_axis = "0.1:1:10";
    std::string l_axis = "1e-3:1e-2:10";
    std::string c_axis = "2.2e-3";
    std::string t_axis = "2.5e-4,5e-4,1e-3";
    std::string sweep_out;
    auto* sweep = app.add_subcommand("sweep-eta", "reconstruction eigenvalue over a parameter grid");
    sweep->add_option("--resistance", r_axis, "R_t axis, a:b:n or comma list")->capture_default_str();
    sweep->add_option("--inductance", l_axis, "L_t axis")->capture_default_str();
    sweep->add_option("--capacitance", c_axis, "C_t axis")->capture_default_str();
    sweep->add_option("--sampling-time", t_axis, "T_samp axis")->capture_default_str();
    sweep->add_option("-o,--out", sweep_out, "CSV output (default stdout)");

    std::string verify_path;
    auto* verify = app.add_subcommand("verify-uio", "synthesise and check every observer of a scenario");
    verify->add_option("scenario", verify_path, "scenario file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInvalid;
    }

    try {
        if (*run) {
            return cmd_run(scenario_path, out_dir, seed, stride, no_trace);
        }
        if (*plan) {
            return cmd_plan(plan_input, plan_out);
        }
        if (*sweep) {
            return cmd_sweep(r_axis, l_axis, c_axis, t_axis, sweep_out);
        }
        if (*verify) {
            return cmd_verify(verify_path);
        }
    } catch (const dcmg::ScenarioError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const dcmg::TopologyError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kInternal;
}
