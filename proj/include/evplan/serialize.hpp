#pragma once

#include <string>

#include <json.hpp>

#include "evplan/evsim.hpp"
#include "evplan/forecast.hpp"
#include "evplan/loadflow.hpp"
#include "evplan/pareto.hpp"
#include "evplan/pricing.hpp"
#include "evplan/siting.hpp"

// JSON views of the report types. nlohmann::json keeps keys sorted, so dumps
// are deterministic for identical inputs.
namespace evplan {

using json = nlohmann::json;

inline json to_json(const ObjectivePair& o) {
    return {{"loss_kw", o.finite() ? json(o.loss_kw) : json()},
            {"sq_dev", o.finite() ? json(o.sq_dev) : json()},
            {"feasible", o.finite()}};
}

inline json to_json(const ArchiveEntry& e) {
    return {{"locations", e.placement.locations()},
            {"evci_kw", e.placement.evci_kw()},
            {"objectives", to_json(e.objectives)}};
}

inline json to_json(const LoadFlowSolution& sol, const FeederNetwork& net) {
    json buses = json::array();
    for (int i = 0; i < net.n_buses(); ++i)
        buses.push_back({{"bus_id", net.buses()[i].id}, {"v_pu", std::abs(sol.v[i])}});
    json branches = json::array();
    for (size_t k = 0; k < net.branches().size(); ++k)
        branches.push_back({{"branch_id", net.branches()[k].id},
                            {"loss_kw", sol.branch_loss_kw[k]}});
    return {{"buses", buses},
            {"branches", branches},
            {"total_loss_kw", sol.total_loss_kw},
            {"sq_volt_dev", sol.sq_volt_dev},
            {"iterations", sol.iterations},
            {"converged", sol.converged},
            {"collapsed", sol.collapsed}};
}

inline json to_json(const SitingReport& rep) {
    json runs = json::array();
    for (const auto& run : rep.runs) {
        json front = json::array();
        for (const auto& e : run.front) front.push_back(to_json(e));
        json jr = {{"iterations", run.iterations}, {"front", front}};
        if (run.best) {
            jr["best"] = to_json(*run.best);
            jr["best_mu"] = run.best_mu;
        }
        runs.push_back(jr);
    }
    json best_archive = json::array();
    for (const auto& e : rep.best_archive) best_archive.push_back(to_json(e));
    return {{"evci_kw", rep.evci_kw},
            {"n_evci", rep.n_evci},
            {"base_objectives", to_json(rep.base_objectives)},
            {"runs", runs},
            {"best_archive", best_archive},
            {"best_locations", rep.best_locations},
            {"best_objectives", to_json(rep.best_objectives)},
            {"best_mu", rep.best_mu}};
}

inline json front_to_json(const ExhaustiveReport& rep) {
    json front = json::array();
    for (size_t i : rep.front)
        front.push_back({{"locations", rep.locations_of(i)},
                         {"objectives", to_json(rep.cloud[i])}});
    return {{"evci_kw", rep.evci_kw},
            {"n_evci", rep.n_evci},
            {"n_evaluations", rep.n_evaluations},
            {"n_infeasible", rep.n_infeasible},
            {"base_objectives", to_json(rep.base_objectives)},
            {"front", front},
            {"best", {{"locations", rep.locations_of(rep.best_index)},
                      {"objectives", to_json(rep.cloud[rep.best_index])},
                      {"mu", rep.best_mu}}}};
}

inline json to_json(const DailyLedger& led) {
    return {{"evci_id", led.evci_id}, {"day", led.day},
            {"revenue", led.revenue}, {"grid_cost", led.grid_cost},
            {"profit", led.profit},   {"n_peak", led.n_peak},
            {"n_normal", led.n_normal}, {"n_offpeak", led.n_offpeak},
            {"n_total", led.n_total}};
}

inline json to_json(const ArimaModel& m) {
    return {{"p", m.p}, {"d", m.d}, {"q", m.q},
            {"phi", m.phi}, {"theta", m.theta},
            {"sigma2", m.sigma2}, {"mean", m.mean},
            {"mean_adjusted", m.mean_adjusted}};
}

inline json to_json(const ForecastScores& s) {
    return {{"rmse", s.rmse},
            {"r2", s.r2_defined ? json(s.r2) : json()},
            {"r2_defined", s.r2_defined},
            {"mae", s.mae}};
}

}  // namespace evplan
