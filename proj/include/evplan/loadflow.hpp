#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "evplan/network.hpp"

namespace evplan {

struct LoadFlowConfig {
    double v_slack = 1.0;      // substation voltage, p.u.
    double v_threshold = 1.0;  // deviation reference, p.u.
    double tol = 1e-6;         // max |dV| between sweeps, p.u.
    int max_iter = 100;
};

struct LoadFlowSolution {
    std::vector<std::complex<double>> v;         // per bus, input order, p.u.
    std::vector<std::complex<double>> i_branch;  // per branch, input order, p.u.
    std::vector<double> branch_loss_kw;
    double total_loss_kw = 0;
    double sq_volt_dev = 0;  // sum over non-substation buses of (v_threshold - |v|)^2
    int iterations = 0;
    bool converged = false;
    bool collapsed = false;  // any |v| < 0.5 p.u. (or numerics blew up)
};

/// (total loss kW, squared voltage deviation). Pure; the deviation sum
/// excludes the substation.
inline std::pair<double, double> objectives(const LoadFlowSolution& sol,
                                            const LoadFlowConfig& cfg) {
    double loss = 0;
    for (double l : sol.branch_loss_kw) loss += l;
    double dev = 0;
    for (size_t i = 1; i < sol.v.size(); ++i) {
        double d = cfg.v_threshold - std::abs(sol.v[i]);
        dev += d * d;
    }
    return {loss, dev};
}

/// Forward-backward sweep load flow with constant-power loads and a flat
/// start. The backward sweep accumulates branch currents from the leaves,
/// the forward sweep re-derives voltages from the slack bus; converged when
/// the largest per-bus voltage change between sweeps drops below cfg.tol.
/// Non-convergence is reported through the flags, never thrown.
inline LoadFlowSolution solve(const FeederNetwork& net, const LoadFlowConfig& cfg = {}) {
    const int n = net.n_buses();
    const auto& order = net.bfs_order();
    const auto& parent_bus = net.parent_bus();
    const auto& parent_branch = net.parent_branch();
    const double s_base_kw = net.base_mva() * 1000.0;
    const double z_base = net.z_base_ohm();

    // per-bus complex load and per-branch impedance, p.u., in index form
    std::vector<std::complex<double>> s_load(n);
    for (int i = 0; i < n; ++i)
        s_load[i] = {net.buses()[i].p_kw / s_base_kw, net.buses()[i].q_kvar / s_base_kw};
    std::vector<std::complex<double>> z(net.branches().size());
    for (size_t k = 0; k < z.size(); ++k)
        z[k] = {net.branches()[k].r_ohm / z_base, net.branches()[k].x_ohm / z_base};

    LoadFlowSolution sol;
    sol.v.assign(n, {cfg.v_slack, 0.0});
    sol.i_branch.assign(z.size(), {0.0, 0.0});
    const int root = order[0];

    for (sol.iterations = 1; sol.iterations <= cfg.max_iter; ++sol.iterations) {
        // backward: bus injection currents, then accumulate towards the root
        std::vector<std::complex<double>> i_acc(n);
        bool blown = false;
        for (int i = 0; i < n; ++i) {
            i_acc[i] = std::conj(s_load[i] / sol.v[i]);
            if (!std::isfinite(i_acc[i].real()) || !std::isfinite(i_acc[i].imag())) blown = true;
        }
        if (blown) {
            sol.collapsed = true;
            break;
        }
        for (size_t k = order.size(); k-- > 1;) {
            int b = order[k];
            sol.i_branch[parent_branch[b]] = i_acc[b];
            i_acc[parent_bus[b]] += i_acc[b];
        }

        // forward: voltage drops from the slack bus down
        double max_dv = 0;
        sol.v[root] = {cfg.v_slack, 0.0};
        for (size_t k = 1; k < order.size(); ++k) {
            int b = order[k];
            std::complex<double> vn = sol.v[parent_bus[b]] - z[parent_branch[b]] * sol.i_branch[parent_branch[b]];
            max_dv = std::max(max_dv, std::abs(vn - sol.v[b]));
            sol.v[b] = vn;
        }
        if (!std::isfinite(max_dv)) {
            sol.collapsed = true;
            break;
        }
        if (max_dv < cfg.tol) {
            sol.converged = true;
            break;
        }
    }
    if (sol.iterations > cfg.max_iter) sol.iterations = cfg.max_iter;

    for (int i = 0; i < n; ++i)
        if (!(std::abs(sol.v[i]) >= 0.5)) sol.collapsed = true;

    sol.branch_loss_kw.resize(z.size());
    for (size_t k = 0; k < z.size(); ++k) {
        double i2 = std::norm(sol.i_branch[k]);
        sol.branch_loss_kw[k] = i2 * z[k].real() * s_base_kw;
    }
    auto [loss, dev] = objectives(sol, cfg);
    sol.total_loss_kw = loss;
    sol.sq_volt_dev = dev;
    return sol;
}

/// Active power drawn at the substation, kW (loads plus losses).
inline double slack_injection_kw(const FeederNetwork& net, const LoadFlowSolution& sol) {
    std::complex<double> s{0, 0};
    const int root = net.bfs_order()[0];
    for (int b = 0; b < net.n_buses(); ++b)
        if (net.parent_bus()[b] == root)
            s += sol.v[root] * std::conj(sol.i_branch[net.parent_branch()[b]]);
    return s.real() * net.base_mva() * 1000.0 + net.buses()[root].p_kw;
}

}  // namespace evplan
