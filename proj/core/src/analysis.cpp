#include "dcmg/analysis.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <iomanip>

namespace dcmg {

std::vector<double> linspace(double first, double last, std::size_t count)
{
    std::vector<double> out;
    if (count == 0) {
        return out;
    }
    if (count == 1) {
        out.push_back(first);
        return out;
    }
    for (std::size_t k = 0; k < count; ++k) {
        out.push_back(first + (last - first) * static_cast<double>(k) / static_cast<double>(count - 1));
    }
    out.back() = last;
    return out;
}

EtaPoint evaluate_eta(double r, double l, double c, double t, const EtaContext& ctx)
{
    DerParams p;
    p.filter_resistance = r;
    p.filter_inductance = l;
    p.filter_capacitance = c;
    p.rated_current = 1.0;
    const LinearizedLoad load{ctx.load_admittance, 0.0};
    const ContinuousModel cont = build_continuous(p, load, ctx.neighbor_resistances);
    const DiscreteModel d = discretize(cont, t);

    EtaPoint pt{r, l, c, t};
    pt.eta = reconstruction_eigenvalue(d.a, d.m);
    const EtaApprox approx = eta_approx(cont.a, t);
    pt.eta_approx = approx.value;
    pt.approx_reliable = approx.reliable;
    return pt;
}

std::vector<EtaPoint> sweep_eta(const EtaGrid& g, const EtaContext& ctx)
{
    std::vector<EtaPoint> out;
    for (double t : g.sampling_time) {
        for (double r : g.filter_resistance) {
            for (double l : g.filter_inductance) {
                for (double c : g.filter_capacitance) {
                    out.push_back(evaluate_eta(r, l, c, t, ctx));
                }
            }
        }
    }
    return out;
}

void write_eta_csv(std::ostream& out, const std::vector<EtaPoint>& points)
{
    out << "R_t,L_t,C_t,T_samp,eta,eta_appr,abs_diff,stable,approx_reliable\n";
    out << std::setprecision(17);
    for (const auto& p : points) {
        out << p.filter_resistance << ',' << p.filter_inductance << ',' << p.filter_capacitance << ','
            << p.sampling_time << ',' << p.eta << ',' << p.eta_approx << ',' << p.approx_error() << ','
            << (p.stable() ? 1 : 0) << ',' << (p.approx_reliable ? 1 : 0) << '\n';
    }
}

UioReport verify_uio(const Scenario& s, const Vec2& process_bound)
{
    UioReport report;
    report.process_bound = process_bound;
    const NoiseBounds noise{process_bound, s.noise.measurement};
    for (const auto& [edge, params] : s.topology.lines()) {
        for (const DirectedEdge link : {DirectedEdge{edge.a, edge.b}, DirectedEdge{edge.b, edge.a}}) {
            UioLinkReport r;
            r.link = link;
            const NodeId sender = link.to;
            try {
                const DerCircuit der{s.ders.at(sender), linearize_zip(s.ders.at(sender).zip)};
                const DiscreteModel model =
                    discretize(build_continuous(s.topology, sender, der), s.sampling_time);
                const std::string name =
                    "(" + std::to_string(link.from) + "," + std::to_string(link.to) + ")";
                const UioGains g = synthesize_uio(model, s.control.poles, name);
                r.tm_residual = (g.t * model.m).cwiseAbs().maxCoeff();
                Eigen::EigenSolver<Mat2> es(g.f, false);
                std::vector<double> mags{std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(1))};
                std::sort(mags.begin(), mags.end());
                r.f_eig_1 = mags[0];
                r.f_eig_2 = mags[1];
                r.nu = g.nu;
                r.sigma = g.sigma;
                const ReconstructionGains rg = make_reconstruction_gains(g);
                r.eta = rg.eta;
                r.reconstruction_bound = reconstruction_error_bound(g, rg, noise);
                r.ok = true;
            } catch (const std::exception& e) {
                r.ok = false;
                r.error = e.what();
            }
            report.ok = report.ok && r.ok;
            report.links.push_back(r);
        }
    }
    return report;
}

void write_uio_report(std::ostream& out, const UioReport& report)
{
    out << std::setprecision(6);
    out << "process_bound " << report.process_bound(0) << ' ' << report.process_bound(1) << '\n';
    for (const auto& r : report.links) {
        out << "link " << r.link.from << ' ' << r.link.to;
        if (!r.ok) {
            out << " FAIL " << r.error << '\n';
            continue;
        }
        out << " ok Tm=" << r.tm_residual << " |eig(F)|=" << r.f_eig_1 << ',' << r.f_eig_2 << " nu=" << r.nu
            << " sigma=" << r.sigma << " eta=" << r.eta << " bound=" << r.reconstruction_bound << '\n';
    }
    out << (report.ok ? "all checks passed" : "verification FAILED") << '\n';
}

}  // namespace dcmg
