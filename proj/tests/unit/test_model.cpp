#include "fixtures.hpp"
#include "oracles.hpp"

#include "dcmg/model.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

using namespace dcmg;
using Catch::Approx;

namespace {

ContinuousModel paper_model(int neighbors = 1)
{
    const std::vector<double> r(static_cast<std::size_t>(neighbors), 1.5);
    return build_continuous(fixture::paper_der(), r);
}

}  // namespace

TEST_CASE("zip load without constant power is unchanged")
{
    const LinearizedLoad l = linearize_zip({10.0, 2.0, 0.0, 40.0});
    CHECK(l.impedance() == Approx(10.0));
    CHECK(l.current == Approx(2.0));
}

TEST_CASE("constant power cancelling the impedance gives a pure current source")
{
    const LinearizedLoad l = linearize_zip({10.0, 1.0, 160.0, 40.0});
    CHECK(l.is_pure_current_source());
    CHECK(std::isinf(l.impedance()));
    CHECK(l.current == Approx(9.0));
}

TEST_CASE("constant power halves the admittance")
{
    const LinearizedLoad l = linearize_zip({10.0, 0.0, 80.0, 40.0});
    CHECK(l.impedance() == Approx(20.0));
    CHECK(l.current == Approx(4.0));
}

TEST_CASE("zip and der parameters are validated")
{
    CHECK_THROWS_AS(ZipLoad({-1.0, 0.0, 0.0, 40.0}).validate(), ModelError);
    CHECK_THROWS_AS(ZipLoad({10.0, 0.0, -5.0, 40.0}).validate(), ModelError);
    CHECK_THROWS_AS(ZipLoad({10.0, 0.0, 0.0, 0.0}).validate(), ModelError);
    DerParams p = fixture::paper_der();
    CHECK_NOTHROW(p.validate());
    p.filter_inductance = 0.0;
    CHECK_THROWS_AS(p.validate(), ModelError);
}

TEST_CASE("continuous model entries")
{
    const ContinuousModel m = paper_model();
    CHECK(m.a(1, 1) == Approx(-200.0));
    CHECK(m.a(0, 0) == Approx(-200.0 - 1333.3333333333).epsilon(1e-12));
    CHECK(m.a(0, 1) == Approx(2000.0));
    CHECK(m.a(1, 0) == Approx(-1000.0));
    CHECK(m.b(0) == 0.0);
    CHECK(m.b(1) == Approx(1000.0));
    CHECK(m.m(0) == Approx(-2000.0));
    CHECK(m.m(1) == 0.0);
}

TEST_CASE("unloaded isolated DER has no voltage self-coupling")
{
    DerParams p = fixture::paper_der();
    const ContinuousModel m = build_continuous(p, LinearizedLoad{0.0, 0.0}, std::vector<double>{});
    CHECK(m.a(0, 0) == 0.0);
}

TEST_CASE("zero generator discretizes to the identity")
{
    ContinuousModel m;
    m.b = Vec2(0.0, 1000.0);
    m.m = Vec2(-2000.0, 0.0);
    const DiscreteModel d = discretize(m, 1e-3);
    CHECK(oracle::max_abs_diff(d.a, Mat2::Identity()) == 0.0);
    CHECK(d.b(1) == Approx(1.0));
    CHECK(d.m(0) == Approx(-2.0));
}

TEST_CASE("discretization of the sixteen-DER parameters matches the series oracle")
{
    for (int neighbors = 1; neighbors <= 4; ++neighbors) {
        const ContinuousModel c = paper_model(neighbors);
        const DiscreteModel d = discretize(c, 1e-3);
        const oracle::Zoh z = oracle::series_zoh(c.a, 1e-3);
        CHECK(oracle::max_abs_diff(d.a, z.ad) < 1e-10);
        CHECK(oracle::max_abs_diff(oracle::series_expm(c.a * 1e-3), z.ad) < 1e-12);
        CHECK(oracle::max_abs_diff(d.b, z.y * c.b) < 1e-10);
        CHECK(oracle::max_abs_diff(d.m, z.y * c.m) < 1e-10);
    }
}

TEST_CASE("discretization composes over half steps")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> r(0.1, 1.0), l(1e-3, 1e-2), c(0.5e-3, 1e-2), z(5.0, 50.0);
    for (int k = 0; k < 200; ++k) {
        DerParams p = fixture::paper_der();
        p.filter_resistance = r(rng);
        p.filter_inductance = l(rng);
        p.filter_capacitance = c(rng);
        p.zip.impedance = z(rng);
        const ContinuousModel m = build_continuous(p, std::vector<double>{1.5, 2.0});
        const double t = 1e-3;
        const DiscreteModel full = discretize(m, t);
        const DiscreteModel half = discretize(m, t / 2);
        CHECK(oracle::max_abs_diff(full.a, half.a * half.a) < 1e-9);
        CHECK(oracle::max_abs_diff(full.b, half.a * half.b + half.b) < 1e-9);
        CHECK(oracle::max_abs_diff(full.m, half.a * half.m + half.m) < 1e-9);
    }
}

TEST_CASE("sign pattern and dissipativity over the sweep ranges")
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> r(0.1, 1.0), l(1e-3, 1e-2), c(1e-3, 1e-2);
    const double ts[] = {2.5e-4, 5e-4, 1e-3};
    for (int k = 0; k < 1000; ++k) {
        DerParams p = fixture::paper_der();
        p.filter_resistance = r(rng);
        p.filter_inductance = l(rng);
        p.filter_capacitance = c(rng);
        const ContinuousModel m = build_continuous(p, std::vector<double>{1.5});
        REQUIRE(m.a(1, 0) < 0.0);
        REQUIRE(m.a(1, 1) < 0.0);
        REQUIRE(m.a(0, 1) > 0.0);
        const DiscreteModel d = discretize(m, ts[k % 3]);
        REQUIRE(spectral_radius(d.a) < 1.0);
    }
}

TEST_CASE("single-node global plant equals the local model")
{
    MicrogridTopology topo;
    topo.add_node(1);
    const DerParams p = fixture::paper_der();
    const LinearizedLoad load = linearize_zip(p.zip);
    const GlobalPlant g = build_global_plant(topo, {{1, DerCircuit{p, load}}}, 1e-3);
    const DiscreteModel d = discretize(build_continuous(p, std::vector<double>{}), 1e-3);
    CHECK(oracle::max_abs_diff(g.a, d.a) < 1e-14);
    CHECK(oracle::max_abs_diff(g.b_input, d.b) < 1e-14);
    // d reduces to the load current, which enters through m.
    CHECK(oracle::max_abs_diff(g.b_load, d.m) < 1e-14);
}

TEST_CASE("global generator carries the coupling blocks")
{
    const Scenario s = fixture::ring4();
    std::map<NodeId, DerCircuit> ders;
    for (const auto& [id, p] : s.ders) {
        ders[id] = {p, linearize_zip(p.zip)};
    }
    const GlobalPlant g = build_global_plant(s.topology, ders, s.sampling_time);
    const double coupling = 1.0 / (0.5e-3 * 1.5);
    CHECK(g.a_cont(0, 2) == Approx(coupling));   // V_1 row, V_2 column
    CHECK(g.a_cont(0, 6) == Approx(coupling));   // V_1 row, V_4 column
    CHECK(g.a_cont(0, 4) == 0.0);                // 1 and 3 are not adjacent
    CHECK(g.a_cont(1, 2) == 0.0);                // current rows are local
}

TEST_CASE("symmetric pair settles with no line current")
{
    MicrogridTopology topo;
    topo.add_node(1);
    topo.add_node(2);
    topo.add_line(1, 2, {1.5, 0.0, 0.05});
    DerParams p = fixture::paper_der();
    p.zip.constant_current = 0.0;
    p.zip.impedance = std::numeric_limits<double>::infinity();
    const LinearizedLoad none{0.0, 0.0};
    const GlobalPlant g = build_global_plant(topo, {{1, {p, none}}, {2, {p, none}}}, 1e-3);
    VecX x = VecX::Zero(4);
    VecX u = VecX::Constant(2, 40.0);
    VecX load = VecX::Zero(2);
    for (int k = 0; k < 5000; ++k) {
        x = g.a * x + g.b_input * u + g.b_load * load;
    }
    CHECK(x(0) == Approx(x(2)).margin(1e-9));
    CHECK(std::abs((x(0) - x(2)) / 1.5) < 1e-9);
}

namespace {

// Worst componentwise gap between one coupled step and the per-DER steps with
// the neighbour voltages frozen, over fixed random states of the ring.
double coupling_gap(double t)
{
    const Scenario s = fixture::ring4();
    std::map<NodeId, DerCircuit> ders;
    for (const auto& [id, p] : s.ders) {
        ders[id] = {p, linearize_zip(p.zip)};
    }
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> volt(35.0, 45.0), amp(-2.0, 8.0);
    const GlobalPlant g = build_global_plant(s.topology, ders, t);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        VecX x(8), u(4), load(4);
        for (int i = 0; i < 4; ++i) {
            x(2 * i) = volt(rng);
            x(2 * i + 1) = amp(rng);
            u(i) = volt(rng);
            load(i) = ders.at(i + 1).load.current;
        }
        const VecX next = g.a * x + g.b_input * u + g.b_load * load;
        for (int i = 0; i < 4; ++i) {
            const NodeId id = i + 1;
            const DiscreteModel d = discretize(build_continuous(s.topology, id, ders.at(id)), t);
            double coupling = 0.0;
            for (NodeId j : s.topology.neighbors(id)) {
                coupling += x(2 * (j - 1)) / s.topology.line(id, j).resistance;
            }
            const Vec2 local =
                d.a * Vec2(x(2 * i), x(2 * i + 1)) + d.b * u(i) + d.m * (ders.at(id).load.current - coupling);
            worst = std::max(worst, (local - next.segment<2>(2 * i)).cwiseAbs().maxCoeff());
        }
    }
    return worst;
}

}  // namespace

TEST_CASE("coupled step and frozen-coupling local steps agree to second order")
{
    // Pinned at the bundled sampling time for 10 V voltage spreads.
    CHECK(coupling_gap(1e-3) < 6.0);
    const double coarse = coupling_gap(2e-5);
    const double fine = coupling_gap(1e-5);
    CHECK(coarse / fine > 3.6);
    CHECK(coarse / fine < 4.4);
}
