#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "evplan/loadflow.hpp"
#include "evplan/network.hpp"
#include "evplan/parallel.hpp"
#include "evplan/pareto.hpp"

namespace evplan {

struct PsoConfig {
    int swarm_size = 50;
    int max_iter = 100;
    double c1 = 2.0;  // cognitive pull
    double c2 = 2.0;  // leader pull
    int a_max = 50;   // archive capacity
    int k_repeat = 10;  // identical best compromises that end a run
    int max_run = 10;   // independent restarts
    std::uint64_t seed = 1;

    void validate() const {
        if (swarm_size < 1 || max_iter < 1 || a_max < 1 || k_repeat < 1 || max_run < 1 ||
            c1 <= 0 || c2 <= 0)
            throw std::invalid_argument("pso config: all parameters must be positive");
    }
};

struct Particle {
    std::vector<double> position;  // continuous relaxation of bus ids
    std::vector<double> velocity;
    std::vector<double> pbest_position;
    ObjectivePair objectives;        // of the current (decoded) position
    ObjectivePair pbest_objectives;
};

/// Objectives of a placement: +inf/+inf when the load flow fails to
/// converge or the voltage profile collapses.
inline ObjectivePair evaluate_placement(const FeederNetwork& net, const Placement& pl,
                                        const LoadFlowConfig& lf) {
    auto sol = solve(apply_placement(net, pl), lf);
    if (!sol.converged || sol.collapsed) return {};
    auto [loss, dev] = objectives(sol, lf);
    return {loss, dev};
}

namespace detail {

/// In-place position repair: round to the nearest integer, clamp to
/// [2, n_bus], then move later duplicates to the nearest unused valid bus
/// (ties towards the lower id).
inline void repair_position(std::vector<double>& pos, int n_bus) {
    std::vector<bool> used(n_bus + 1, false);
    for (double& c : pos) {
        long v = std::lround(c);
        if (v < 2) v = 2;
        if (v > n_bus) v = n_bus;
        if (used[v]) {
            long best = -1;
            for (long delta = 1; delta <= n_bus - 2; ++delta) {
                if (v - delta >= 2 && !used[v - delta]) { best = v - delta; break; }
                if (v + delta <= n_bus && !used[v + delta]) { best = v + delta; break; }
            }
            v = best;  // always found: n_evci <= n_bus - 1
        }
        used[v] = true;
        c = static_cast<double>(v);
    }
}

inline std::vector<int> decode_position(const std::vector<double>& pos) {
    std::vector<int> locs;
    locs.reserve(pos.size());
    for (double c : pos) locs.push_back(static_cast<int>(std::lround(c)));
    return locs;
}

}  // namespace detail

/// One velocity/position update: v <- v + c1 r1 (pbest - x) + c2 r2 (leader - x)
/// with fresh per-dimension uniforms, velocity clamped to +-(n_bus - 2),
/// x <- x + v, then repaired to a valid decoded placement.
inline void step(Particle& p, const std::vector<double>& leader, const PsoConfig& cfg,
                 int n_bus, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double v_max = static_cast<double>(n_bus - 2);
    for (size_t d = 0; d < p.position.size(); ++d) {
        double r1 = uni(rng);
        double r2 = uni(rng);
        double v = p.velocity[d] + cfg.c1 * r1 * (p.pbest_position[d] - p.position[d]) +
                   cfg.c2 * r2 * (leader[d] - p.position[d]);
        if (v > v_max) v = v_max;
        if (v < -v_max) v = -v_max;
        p.velocity[d] = v;
        p.position[d] += v;
    }
    detail::repair_position(p.position, n_bus);
}

struct SitingRunTrace {
    int iterations = 0;
    std::vector<ArchiveEntry> front;          // final archive of the run
    std::optional<ArchiveEntry> best;         // the run's best compromise
    double best_mu = 0;
};

struct SitingReport {
    double evci_kw = 0;
    int n_evci = 0;
    ObjectivePair base_objectives;
    std::vector<SitingRunTrace> runs;
    std::vector<ArchiveEntry> best_archive;   // non-dominated set of run bests
    std::vector<int> best_locations;          // empty iff n_evci == 0
    ObjectivePair best_objectives;
    double best_mu = 1.0;
};

namespace detail {

struct MopsoRun {
    SitingRunTrace trace;
};

inline SitingRunTrace run_single_mopso(const FeederNetwork& net, double evci_kw, int n_evci,
                                       const PsoConfig& cfg, const LoadFlowConfig& lf,
                                       std::mt19937_64 rng) {
    const int n_bus = net.n_buses();
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    // objective cache per decoded placement for this run
    std::map<std::vector<int>, ObjectivePair> cache;
    auto evaluate = [&](const std::vector<int>& locs) {
        auto it = cache.find(locs);
        if (it != cache.end()) return it->second;
        ObjectivePair obj = evaluate_placement(net, Placement(locs, evci_kw), lf);
        cache.emplace(locs, obj);
        return obj;
    };

    // fresh random swarm: distinct buses per particle, zero velocity
    std::vector<int> all_buses;
    for (int b = 2; b <= n_bus; ++b) all_buses.push_back(b);
    std::vector<Particle> swarm(cfg.swarm_size);
    for (auto& p : swarm) {
        std::vector<int> pool = all_buses;
        for (int d = 0; d < n_evci; ++d) {
            std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
            size_t j = pick(rng);
            p.position.push_back(static_cast<double>(pool[j]));
            pool.erase(pool.begin() + j);
        }
        p.velocity.assign(n_evci, 0.0);
        p.pbest_position = p.position;
    }

    ParetoArchive archive(cfg.a_max);
    SitingRunTrace trace;
    std::vector<int> last_best;
    int repeat = 0;

    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        trace.iterations = iter;

        // evaluate all particles (cache makes repeats free)
        for (auto& p : swarm) p.objectives = evaluate(decode_position(p.position));

        // pbest and archive updates in particle order
        for (auto& p : swarm) {
            if (iter == 1) {
                p.pbest_objectives = p.objectives;
                p.pbest_position = p.position;
            } else if (!p.objectives.finite()) {
                // keep pbest
            } else if (!p.pbest_objectives.finite() ||
                       dominates(p.objectives, p.pbest_objectives)) {
                p.pbest_objectives = p.objectives;
                p.pbest_position = p.position;
            } else if (!dominates(p.pbest_objectives, p.objectives) && uni(rng) < 0.5) {
                // mutually non-dominated: coin flip keeps diversity
                p.pbest_objectives = p.objectives;
                p.pbest_position = p.position;
            }
            if (p.objectives.finite())
                archive.insert({Placement(decode_position(p.position), evci_kw), p.objectives});
        }
        archive.crowding_truncate();

        // stopping rule: the archive's best compromise unchanged k_repeat times
        if (!archive.empty()) {
            auto [bi, mu] = best_compromise_index(archive);
            const auto& locs = archive.members()[bi].placement.locations();
            if (locs == last_best) {
                if (++repeat >= cfg.k_repeat) break;
            } else {
                last_best = locs;
                repeat = 1;
            }
        } else {
            last_best.clear();
            repeat = 0;
        }

        // movement: sigma leaders from the current archive
        for (auto& p : swarm) {
            if (archive.empty()) {
                // nothing feasible yet: pull towards pbest only (leader = pbest)
                step(p, p.pbest_position, cfg, n_bus, rng);
                continue;
            }
            size_t li = sigma_leader_index(p.objectives, archive);
            std::vector<double> leader;
            for (int b : archive.members()[li].placement.locations())
                leader.push_back(static_cast<double>(b));
            step(p, leader, cfg, n_bus, rng);
        }
    }

    trace.front = archive.members();
    if (!archive.empty()) {
        auto [bi, mu] = best_compromise_index(archive);
        trace.best = archive.members()[bi];
        trace.best_mu = mu;
    }
    return trace;
}

}  // namespace detail

/// The multi-run MOPSO: max_run independent swarms, each stopped when its
/// best compromise stabilizes; the per-run best compromises feed a best
/// archive whose own best compromise is the answer.
inline SitingReport run_mopso(const FeederNetwork& net, double evci_kw, int n_evci,
                              const PsoConfig& cfg, const LoadFlowConfig& lf = {},
                              int workers = 1) {
    cfg.validate();
    if (n_evci < 0 || n_evci > net.n_buses() - 1)
        throw std::invalid_argument("n_evci out of range");

    SitingReport report;
    report.evci_kw = evci_kw;
    report.n_evci = n_evci;
    {
        auto sol = solve(net, lf);
        auto [loss, dev] = objectives(sol, lf);
        report.base_objectives = {loss, dev};
    }
    if (n_evci == 0) {
        report.best_objectives = report.base_objectives;
        return report;
    }

    report.runs.resize(cfg.max_run);
    parallel_for(static_cast<size_t>(cfg.max_run), workers, [&](size_t b, size_t e) {
        for (size_t r = b; r < e; ++r)
            report.runs[r] = detail::run_single_mopso(net, evci_kw, n_evci, cfg, lf,
                                                      make_rng(cfg.seed, r));
    });

    ParetoArchive best_archive(cfg.max_run);
    for (const auto& run : report.runs)
        if (run.best) best_archive.insert(*run.best);
    if (best_archive.empty()) throw std::runtime_error("no feasible placement");

    report.best_archive = best_archive.members();
    auto [bi, mu] = best_compromise_index(best_archive);
    report.best_locations = best_archive.members()[bi].placement.locations();
    report.best_objectives = best_archive.members()[bi].objectives;
    report.best_mu = mu;
    return report;
}

struct ExhaustiveReport {
    double evci_kw = 0;
    int n_evci = 0;
    ObjectivePair base_objectives;
    std::vector<std::int32_t> locations_flat;  // n_evaluations x n_evci
    std::vector<ObjectivePair> cloud;
    std::vector<std::size_t> front;            // indices into the cloud
    std::size_t best_index = 0;                // index into the cloud
    double best_mu = 1.0;
    std::size_t n_evaluations = 0;
    std::size_t n_infeasible = 0;

    std::vector<int> locations_of(std::size_t i) const {
        std::vector<int> out(n_evci);
        for (int d = 0; d < n_evci; ++d) out[d] = locations_flat[i * n_evci + d];
        return out;
    }
};

/// Number of location combinations, saturating at cap.
inline std::uint64_t combination_count(int n, int k, std::uint64_t cap) {
    if (k < 0 || k > n) return 0;
    std::uint64_t c = 1;
    for (int i = 1; i <= k; ++i) {
        c = c * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
        if (c > cap) return cap + 1;
    }
    return c;
}

/// Ground truth by full enumeration: every C(n_bus-1, n_evci) placement is
/// load-flowed, the exact Pareto front extracted, and its fuzzy best
/// compromise selected.
inline ExhaustiveReport enumerate_all(const FeederNetwork& net, double evci_kw, int n_evci,
                                      const LoadFlowConfig& lf = {}, int workers = 1,
                                      std::uint64_t budget = 2'000'000) {
    const int n_bus = net.n_buses();
    if (n_evci < 0 || n_evci > n_bus - 1) throw std::invalid_argument("n_evci out of range");

    ExhaustiveReport report;
    report.evci_kw = evci_kw;
    report.n_evci = n_evci;
    {
        auto sol = solve(net, lf);
        auto [loss, dev] = objectives(sol, lf);
        report.base_objectives = {loss, dev};
    }
    if (n_evci == 0) {
        report.cloud.push_back(report.base_objectives);
        report.front.push_back(0);
        report.n_evaluations = 1;
        return report;
    }

    std::uint64_t count = combination_count(n_bus - 1, n_evci, budget);
    if (count > budget)
        throw std::runtime_error("enumeration budget exceeded (" + std::to_string(budget) +
                                 "); use the MOPSO optimizer instead");

    // all combinations of buses [2, n_bus], lexicographic
    report.n_evaluations = count;
    report.locations_flat.resize(count * n_evci);
    std::vector<int> cur(n_evci);
    for (int d = 0; d < n_evci; ++d) cur[d] = 2 + d;
    for (std::uint64_t i = 0;; ++i) {
        for (int d = 0; d < n_evci; ++d)
            report.locations_flat[i * n_evci + d] = cur[d];
        int d = n_evci - 1;
        while (d >= 0 && cur[d] == n_bus - (n_evci - 1 - d)) --d;
        if (d < 0) break;
        ++cur[d];
        for (int j = d + 1; j < n_evci; ++j) cur[j] = cur[j - 1] + 1;
    }

    report.cloud.resize(count);
    parallel_for(count, workers, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            Placement pl(report.locations_of(i), evci_kw);
            report.cloud[i] = evaluate_placement(net, pl, lf);
        }
    });
    for (const auto& o : report.cloud)
        if (!o.finite()) ++report.n_infeasible;

    report.front = nondominated_indices(report.cloud);
    if (report.front.empty()) throw std::runtime_error("no feasible placement");
    std::vector<ObjectivePair> front_pairs;
    front_pairs.reserve(report.front.size());
    for (size_t i : report.front) front_pairs.push_back(report.cloud[i]);
    auto [bi, mu] = best_compromise_index(std::span<const ObjectivePair>(front_pairs));
    report.best_index = report.front[bi];
    report.best_mu = mu;
    return report;
}

}  // namespace evplan
