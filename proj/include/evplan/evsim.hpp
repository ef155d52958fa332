#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "evplan/loadflow.hpp"
#include "evplan/network.hpp"
#include "evplan/parallel.hpp"
#include "evplan/pareto.hpp"

namespace evplan {

struct EvModel {
    std::string name;
    double battery_kwh = 0;
};

/// The five EV models assumed to visit the chargers.
inline const std::array<EvModel, 5>& ev_models() {
    static const std::array<EvModel, 5> kModels{{
        {"Nissan Leaf", 24.0},
        {"Nissan e-NV200", 40.0},
        {"Tesla Model 3 Standard Plus", 55.0},
        {"Tesla Model 3 Long Range", 75.0},
        {"BYD e6", 82.0},
    }};
    return kModels;
}

/// One charging visit. Charging runs at the full charger rating from soc0 to
/// 80%, FIFO behind earlier arrivals on the same station.
struct EvSession {
    int evci_id = 0;
    int station = 0;
    int model = 0;          // index into ev_models()
    double arrival_h = 0;   // hours since simulation start
    double soc0 = 0;        // initial state of charge, fraction
    double start_h = 0;     // >= arrival_h after queueing
    double energy_kwh = 0;  // (0.8 - soc0) * battery
    double duration_h = 0;  // energy / charger_kw
};

struct EvciLoadProfile {
    int evci_id = 0;
    std::vector<double> hourly_kw;  // aggregate charging power per hour
    std::vector<EvSession> sessions;
};

struct SimConfig {
    int horizon_days = 1;
    double charger_kw = 50.0;
    int stations_per_evci = 20;
    int evs_per_station_day_min = 6;
    int evs_per_station_day_max = 10;
    std::uint64_t seed = 1;

    void validate() const {
        if (horizon_days < 1 || charger_kw <= 0 || stations_per_evci < 1 ||
            evs_per_station_day_min < 1 ||
            evs_per_station_day_max < evs_per_station_day_min)
            throw std::invalid_argument("sim config: invalid ranges");
    }
};

/// Simulates EV arrivals and charging sessions for n_evci sites. Arrival
/// counts, times, models and initial SoCs are drawn per station per day;
/// sessions are served FIFO per station; hourly power pro-rates each session
/// over the hour buckets it overlaps, so per-EVCI energy is conserved
/// exactly (sessions still charging at the horizon end are cut off there).
/// Each EVCI has its own seeded stream, so profiles are reproducible and
/// independent of evaluation order.
inline std::vector<EvciLoadProfile> simulate_evci(const SimConfig& cfg, int n_evci) {
    cfg.validate();
    if (n_evci < 0) throw std::invalid_argument("n_evci must be >= 0");
    const int hours = cfg.horizon_days * 24;
    const auto& models = ev_models();

    std::vector<EvciLoadProfile> profiles(n_evci);
    for (int e = 0; e < n_evci; ++e) {
        auto& prof = profiles[e];
        prof.evci_id = e + 1;
        prof.hourly_kw.assign(hours, 0.0);

        auto rng = make_rng(cfg.seed, static_cast<std::uint64_t>(e));
        std::uniform_int_distribution<int> count_dist(cfg.evs_per_station_day_min,
                                                      cfg.evs_per_station_day_max);
        std::uniform_real_distribution<double> arrival_dist(0.0, 24.0);
        std::uniform_int_distribution<int> model_dist(0, static_cast<int>(models.size()) - 1);
        std::uniform_real_distribution<double> soc_dist(0.2, 0.8);

        for (int s = 0; s < cfg.stations_per_evci; ++s) {
            std::vector<EvSession> station;
            for (int day = 0; day < cfg.horizon_days; ++day) {
                int count = count_dist(rng);
                for (int k = 0; k < count; ++k) {
                    EvSession ses;
                    ses.evci_id = prof.evci_id;
                    ses.station = s;
                    ses.arrival_h = day * 24.0 + arrival_dist(rng);
                    ses.model = model_dist(rng);
                    ses.soc0 = soc_dist(rng);
                    ses.energy_kwh = (0.8 - ses.soc0) * models[ses.model].battery_kwh;
                    ses.duration_h = ses.energy_kwh / cfg.charger_kw;
                    station.push_back(ses);
                }
            }
            std::stable_sort(station.begin(), station.end(),
                             [](const EvSession& a, const EvSession& b) {
                                 return a.arrival_h < b.arrival_h;
                             });
            double free_at = 0.0;
            for (auto& ses : station) {
                ses.start_h = std::max(ses.arrival_h, free_at);
                free_at = ses.start_h + ses.duration_h;
            }
            prof.sessions.insert(prof.sessions.end(), station.begin(), station.end());
        }

        for (const auto& ses : prof.sessions) {
            double end_h = std::min(ses.start_h + ses.duration_h, static_cast<double>(hours));
            for (int t = static_cast<int>(ses.start_h); t < hours; ++t) {
                double overlap = std::min(end_h, t + 1.0) - std::max(ses.start_h, static_cast<double>(t));
                if (overlap <= 0) break;
                prof.hourly_kw[t] += cfg.charger_kw * overlap;
            }
        }
    }
    return profiles;
}

/// Energy a session delivers inside [0, horizon_h) -- equals energy_kwh
/// unless the horizon cuts it off.
inline double delivered_kwh(const EvSession& ses, double charger_kw, double horizon_h) {
    double end_h = std::min(ses.start_h + ses.duration_h, horizon_h);
    return std::max(0.0, end_h - ses.start_h) * charger_kw;
}

enum class Period { offpeak, normal, peak };

inline const char* period_name(Period p) {
    switch (p) {
        case Period::offpeak: return "offpeak";
        case Period::normal: return "normal";
        case Period::peak: return "peak";
    }
    return "?";
}

namespace detail {

/// Linear-interpolation percentile of sorted data (the numpy default).
inline double percentile_sorted(const std::vector<double>& sorted, double p) {
    double h = p * (sorted.size() - 1);
    size_t k = static_cast<size_t>(h);
    if (k + 1 >= sorted.size()) return sorted.back();
    return sorted[k] + (h - k) * (sorted[k + 1] - sorted[k]);
}

}  // namespace detail

/// Labels each hour peak / normal / offpeak by where it sits within its own
/// day: at or above the day's 67th percentile of EVCI energy is peak, below
/// the 33rd is offpeak. A constant day is all normal.
inline std::vector<Period> classify_periods(std::span<const double> hourly_kwh) {
    if (hourly_kwh.empty() || hourly_kwh.size() % 24 != 0)
        throw std::invalid_argument("classify_periods: series must be whole days");
    std::vector<Period> labels(hourly_kwh.size(), Period::normal);
    for (size_t day = 0; day < hourly_kwh.size() / 24; ++day) {
        std::vector<double> sorted(hourly_kwh.begin() + day * 24,
                                   hourly_kwh.begin() + (day + 1) * 24);
        std::sort(sorted.begin(), sorted.end());
        if (sorted.front() == sorted.back()) continue;  // degenerate day
        double p33 = detail::percentile_sorted(sorted, 0.33);
        double p67 = detail::percentile_sorted(sorted, 0.67);
        for (size_t h = 0; h < 24; ++h) {
            double v = hourly_kwh[day * 24 + h];
            if (v >= p67)
                labels[day * 24 + h] = Period::peak;
            else if (v < p33)
                labels[day * 24 + h] = Period::offpeak;
        }
    }
    return labels;
}

struct HourRecord {
    double min_v = 0;
    int min_v_bus = 0;
    double total_loss_kw = 0;
    bool converged = false;
};

struct TimeSeriesReport {
    int hours = 0;
    std::vector<HourRecord> per_hour;
    std::vector<std::vector<double>> v_mag;  // hours x buses, |v| p.u.
    std::vector<double> base_load_kwh;       // scaled feeder load per hour
    std::vector<double> total_evci_kwh;      // summed EVCI energy per hour
    std::vector<Period> periods;             // from total EVCI energy
};

/// Hour-by-hour load flow of the feeder with scaled base loads and the EVCI
/// profiles injected at their buses. Non-convergent hours are flagged and
/// carry +inf loss; the sweep continues.
inline TimeSeriesReport run_timeseries(const FeederNetwork& net, const Placement& pl,
                                       const std::vector<EvciLoadProfile>& profiles,
                                       std::span<const double> scaling,
                                       const LoadFlowConfig& lf = {}, int workers = 1) {
    if (profiles.size() != pl.locations().size())
        throw std::invalid_argument("run_timeseries: one profile per EVCI location required");
    const int hours = profiles.empty() ? static_cast<int>(scaling.size())
                                       : static_cast<int>(profiles[0].hourly_kw.size());
    for (const auto& p : profiles)
        if (static_cast<int>(p.hourly_kw.size()) != hours)
            throw std::invalid_argument("run_timeseries: profile lengths differ");
    if (static_cast<int>(scaling.size()) != hours)
        throw std::invalid_argument("run_timeseries: scaling length must match horizon");

    TimeSeriesReport rep;
    rep.hours = hours;
    rep.per_hour.resize(hours);
    rep.v_mag.assign(hours, std::vector<double>(net.n_buses(), 0.0));
    rep.base_load_kwh.resize(hours);
    rep.total_evci_kwh.assign(hours, 0.0);

    parallel_for(static_cast<size_t>(hours), workers, [&](size_t b, size_t e) {
        for (size_t t = b; t < e; ++t) {
            std::vector<Bus> buses = net.buses();
            double base_kwh = 0;
            for (auto& bus : buses) {
                bus.p_kw *= scaling[t];
                bus.q_kvar *= scaling[t];
                base_kwh += bus.p_kw;
            }
            for (size_t i = 0; i < profiles.size(); ++i)
                buses[net.index_of(pl.locations()[i])].p_kw += profiles[i].hourly_kw[t];
            FeederNetwork hour_net(net.base_kv(), net.base_mva(), std::move(buses),
                                   net.branches());
            auto sol = solve(hour_net, lf);

            HourRecord rec;
            rec.converged = sol.converged && !sol.collapsed;
            rec.total_loss_kw = rec.converged ? sol.total_loss_kw : kInf;
            rec.min_v = kInf;
            for (int i = 0; i < net.n_buses(); ++i) {
                rep.v_mag[t][i] = std::abs(sol.v[i]);
                if (i > 0 && rep.v_mag[t][i] < rec.min_v) {
                    rec.min_v = rep.v_mag[t][i];
                    rec.min_v_bus = net.buses()[i].id;
                }
            }
            rep.per_hour[t] = rec;
            rep.base_load_kwh[t] = base_kwh;
            for (const auto& p : profiles) rep.total_evci_kwh[t] += p.hourly_kw[t];
        }
    });

    if (hours % 24 == 0)
        rep.periods = classify_periods(rep.total_evci_kwh);
    else
        rep.periods.assign(hours, Period::normal);  // partial-day horizon
    return rep;
}

}  // namespace evplan
