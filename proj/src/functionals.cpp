#include "nlds/functionals.hpp"

#include <cmath>

#include "nlds/parallel.hpp"
#include "nlds/rootfind.hpp"

namespace nlds {

double charge(const WaveProfile& p) {
    const Eigen::VectorXd w = p.grid.quad_weights();
    return (w.array() * (p.v.array().square() + p.u.array().square())).sum();
}

FunctionalReport energy_terms(const WaveProfile& p) {
    const Eigen::VectorXd w = p.grid.quad_weights();
    const MatrixXd D = differentiation_matrix(p.grid);
    const Eigen::VectorXd vp = D * p.v;
    const Eigen::VectorXd up = D * p.u;

    FunctionalReport r;
    r.omega = p.omega;
    r.Q = (w.array() * (p.v.array().square() + p.u.array().square())).sum();
    r.K = (w.array() * (p.v.array() * up.array() - p.u.array() * vp.array())).sum();
    r.M = p.model.m * (w.array() * (p.v.array().square() - p.u.array().square())).sum();
    double Vsum = 0.0;
    for (int j = 0; j < p.grid.M; ++j)
        Vsum += w[j] * scalar_density(p.model, Vector4d{p.v[j], 0.0, 0.0, p.u[j]});
    r.V = -Vsum;
    r.E = r.K + r.M + r.V;
    r.L = -r.E + p.omega * r.Q;
    r.defect_virial1 = std::abs(r.K + p.model.k * r.V);
    r.defect_virial2 = std::abs(p.omega * r.Q - r.M - r.V);
    r.defect_KL = std::abs(r.K + r.L);
    return r;
}

FunctionalReport virial_report(const WaveProfile& p) { return energy_terms(p); }

std::vector<SweepEntry> sweep_functionals(const ModelSpec& model,
                                          const std::vector<double>& omegas,
                                          const SolveOptions& opts) {
    std::vector<SweepEntry> table(omegas.size());
    parallel_for(static_cast<int>(omegas.size()), 0, [&](int i) {
        table[i].omega = omegas[i];
        try {
            const WaveProfile p = solve_profile(model, omegas[i], opts);
            table[i].report = energy_terms(p);
            table[i].ok = true;
        } catch (const std::exception& e) {
            table[i].error = e.what();
        }
    });
    fill_dq_domega(table);
    return table;
}

void fill_dq_domega(std::vector<SweepEntry>& table) {
    const int n = static_cast<int>(table.size());
    for (int i = 0; i < n; ++i) {
        if (!table[i].ok) continue;
        int lo = i - 1, hi = i + 1;
        if (lo < 0 || !table[lo].ok) lo = i;
        if (hi >= n || !table[hi].ok) hi = i;
        if (lo == hi) continue;  // isolated point, no neighbours
        const double dw = table[hi].omega - table[lo].omega;
        if (dw == 0.0) continue;
        table[i].report.dQ_domega = (table[hi].report.Q - table[lo].report.Q) / dw;
    }
}

double find_omega_E(const ModelSpec& model, double a, double b,
                    const CriticalSearchOptions& opts) {
    auto E = [&](double w) { return energy_terms(solve_profile(model, w, opts.solve)).E; };
    return brent(E, a, b, opts.xtol_E);
}

double find_omega_VK(const ModelSpec& model, double a, double b,
                     const CriticalSearchOptions& opts) {
    auto dQ = [&](double w) {
        const double dw = opts.delta_omega;
        auto q = [&](double wp) { return charge(solve_profile(model, wp, opts.solve)); };
        const double d1 = (q(w + dw) - q(w - dw)) / (2.0 * dw);
        const double d2 = (q(w + 0.5 * dw) - q(w - 0.5 * dw)) / dw;
        return (4.0 * d2 - d1) / 3.0;
    };
    return brent(dQ, a, b, opts.xtol_VK);
}

}  // namespace nlds
