#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "evplan/evsim.hpp"

namespace evplan {

/// EVCI selling tariff: a fixed service fee plus one time-based price per
/// period. All in currency per kWh.
struct Tariff {
    double r_f = 0.02;   // fixed fee
    double r_p = 0.08;   // peak
    double r_n = 0.05;   // normal
    double r_op = 0.02;  // off-peak

    void validate() const {
        if (!(r_p >= r_n && r_n >= r_op && r_op >= 0 && r_f >= 0))
            throw std::invalid_argument("tariff: requires r_p >= r_n >= r_op >= 0 and r_f >= 0");
    }
};

/// Settlement price for a period: the fixed fee plus the period price.
inline double evci_price(const Tariff& tariff, Period period) {
    switch (period) {
        case Period::peak: return tariff.r_f + tariff.r_p;
        case Period::normal: return tariff.r_f + tariff.r_n;
        case Period::offpeak: return tariff.r_f + tariff.r_op;
    }
    throw std::logic_error("evci_price: bad period");
}

struct GridPriceSeries {
    std::vector<double> hourly;  // currency/kWh

    void validate() const {
        for (double v : hourly)
            if (!(v >= 0)) throw std::invalid_argument("grid price: negative or NaN entry");
    }
};

/// Synthetic hourly utility price: smooth diurnal double-peak with a slow
/// seasonal drift and small seeded noise, clamped to the 2-8 cents/kWh band.
/// Stands in for a real-time price feed when none is supplied.
inline GridPriceSeries synth_grid_price(int hours, std::uint64_t seed) {
    std::mt19937_64 rng = make_rng(seed, 77);
    std::normal_distribution<double> noise(0.0, 0.0008);
    constexpr double kPi = 3.14159265358979323846;
    GridPriceSeries g;
    g.hourly.resize(hours);
    for (int t = 0; t < hours; ++t) {
        int h = t % 24;
        int day = t / 24;
        double v = 0.05 + 0.016 * std::sin(2 * kPi * (h - 9.0) / 24.0) +
                   0.007 * std::sin(4 * kPi * (h - 2.0) / 24.0) +
                   0.003 * std::sin(2 * kPi * day / 243.0) + noise(rng);
        g.hourly[t] = std::min(0.08, std::max(0.02, v));
    }
    return g;
}

/// The posted hourly EVCI price: fixed fee plus the operator's time-based
/// price, which tracks the utility signal hour by hour. This is the series
/// customers see and the one the forecaster models; period settlement
/// (settle_day) is the per-period view of the same tariff.
inline std::vector<double> published_price(const Tariff& tariff, const GridPriceSeries& grid) {
    std::vector<double> out;
    out.reserve(grid.hourly.size());
    for (double g : grid.hourly) out.push_back(tariff.r_f + g);
    return out;
}

/// One EVCI's books for one day.
struct DailyLedger {
    int evci_id = 0;
    int day = 0;
    double revenue = 0;    // energy sold at the period tariff
    double grid_cost = 0;  // energy bought at the hourly grid price
    double profit = 0;
    int n_peak = 0;        // EVs whose session started in a peak hour
    int n_normal = 0;
    int n_offpeak = 0;
    int n_total = 0;
};

/// Settles one day of a profile: revenue at the period tariff, cost at the
/// hourly grid price, EV counts bucketed by the period of each session's
/// start hour. periods and grid must cover the profile's full horizon.
inline DailyLedger settle_day(const EvciLoadProfile& profile, std::span<const Period> periods,
                              const Tariff& tariff, const GridPriceSeries& grid, int day = 0) {
    tariff.validate();
    const size_t hours = profile.hourly_kw.size();
    if (periods.size() != hours || grid.hourly.size() != hours)
        throw std::invalid_argument("settle_day: periods/grid length mismatch");
    if (day < 0 || static_cast<size_t>((day + 1) * 24) > hours)
        throw std::invalid_argument("settle_day: day out of range");

    DailyLedger led;
    led.evci_id = profile.evci_id;
    led.day = day;
    for (int h = day * 24; h < (day + 1) * 24; ++h) {
        double kwh = profile.hourly_kw[h];  // 1-hour buckets: kW == kWh
        led.revenue += kwh * evci_price(tariff, periods[h]);
        led.grid_cost += kwh * grid.hourly[h];
    }
    for (const auto& ses : profile.sessions) {
        int h = static_cast<int>(ses.start_h);
        if (h < day * 24 || h >= (day + 1) * 24) continue;
        ++led.n_total;
        switch (periods[h]) {
            case Period::peak: ++led.n_peak; break;
            case Period::normal: ++led.n_normal; break;
            case Period::offpeak: ++led.n_offpeak; break;
        }
    }
    led.profit = led.revenue - led.grid_cost;
    return led;
}

}  // namespace evplan
