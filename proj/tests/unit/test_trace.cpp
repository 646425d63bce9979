#include "fixtures.hpp"

#include "dcmg/trace.hpp"

#include <catch_amalgamated.hpp>
#include <yaml-cpp/yaml.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

using namespace dcmg;

namespace {

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        out.push_back(cell);
    }
    return out;
}

}  // namespace

TEST_CASE("numbers print shortest and read back exactly")
{
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(2.0) == "2");
    CHECK(format_number(-1.5e-9) == "-1.5e-09");
    CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, i % 20 - 10);
        REQUIRE(std::stod(format_number(v)) == v);
    }
}

TEST_CASE("columns follow the schema")
{
    TraceSchema schema;
    schema.nodes = {1, 2};
    schema.links = {{1, 2}, {2, 1}};
    const auto cols = trace_columns(schema);
    CHECK(cols.size() == 2 + 2 * 5 + 2 * 14);
    CHECK(cols[0] == "step");
    CHECK(cols[2] == "V_1");
    CHECK(cols[7] == "V_2");
    CHECK(cols[12] == "link_1_2_ys_V");
    CHECK(std::find(cols.begin(), cols.end(), "link_2_1_r_I") != cols.end());
    CHECK(std::find(cols.begin(), cols.end(), "link_2_1_alarm") != cols.end());
}

TEST_CASE("every trace row matches the header width and absent links read nan")
{
    Scenario s = fixture::bundled("der16_mesh.yaml");
    s.duration = 3.01;
    std::erase_if(s.events, [](const Event& e) { return e.time > 3.01; });
    const RunResult run = run_scenario(s, {5, true, std::nullopt, nullptr});
    std::ostringstream out;
    write_trace_csv(out, run.schema, run.records);

    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    const auto header = split(line);
    const std::size_t col = static_cast<std::size_t>(
        std::find(header.begin(), header.end(), "link_10_11_r_I") - header.begin());
    REQUIRE(col < header.size());
    std::size_t rows = 0;
    std::string first, last;
    while (std::getline(in, line)) {
        const auto cells = split(line);
        REQUIRE(cells.size() == header.size());
        (rows == 0 ? first : last) = cells[col];
        ++rows;
    }
    CHECK(rows == run.records.size());
    CHECK(rows == 602);
    CHECK(first == "nan");
    CHECK(last != "nan");
}

TEST_CASE("summary is a YAML document with the run results")
{
    const RunResult run = run_scenario(fixture::bundled("fig3_ring4.yaml"), {1, false, std::nullopt, nullptr});
    std::ostringstream out;
    write_summary(out, run.summary);
    const YAML::Node doc = YAML::Load(out.str());
    CHECK(doc["scenario"].as<std::string>() == "fig3_ring4");
    CHECK(doc["seed"].as<int>() == 7);
    CHECK(doc["sensors"].as<int>() == 4);
    CHECK(doc["ders"].size() == 4);
    CHECK(doc["links"].size() == 8);
    bool found = false;
    for (const auto& l : doc["links"]) {
        if (l["link"][0].as<int>() == 2 && l["link"][1].as<int>() == 1) {
            found = true;
            CHECK(l["first_alarm_time"].as<double>() >= 2.5);
            CHECK(l["alarm_steps"].as<long>() > 0);
        } else {
            CHECK(l["first_alarm_time"].IsNull());
        }
    }
    CHECK(found);
}
