#pragma once

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "evplan/network.hpp"

namespace evplan {

/// The 33-bus radial test feeder (Baran & Wu line/load table, 12.66 kV,
/// 3715 kW / 2300 kvar). Identical to data/ieee33/*.csv; a unit test keeps
/// the two in sync.
inline FeederNetwork ieee33(double base_mva = 100.0) {
    // bus: p_kw, q_kvar (bus 1 = substation)
    static constexpr std::array<std::array<double, 2>, 33> kLoads{{
        {0, 0},     {100, 60},  {90, 40},   {120, 80},  {60, 30},   {60, 20},
        {200, 100}, {200, 100}, {60, 20},   {60, 20},   {45, 30},   {60, 35},
        {60, 35},   {120, 80},  {60, 10},   {60, 20},   {60, 20},   {90, 40},
        {90, 40},   {90, 40},   {90, 40},   {90, 40},   {90, 50},   {420, 200},
        {420, 200}, {60, 25},   {60, 25},   {60, 20},   {120, 70},  {200, 600},
        {150, 70},  {210, 100}, {60, 40},
    }};
    // branch: from, to, r_ohm, x_ohm
    static constexpr std::array<std::array<double, 4>, 32> kBranches{{
        {1, 2, 0.0922, 0.047},   {2, 3, 0.493, 0.2511},   {3, 4, 0.366, 0.1864},
        {4, 5, 0.3811, 0.1941},  {5, 6, 0.819, 0.707},    {6, 7, 0.1872, 0.6188},
        {7, 8, 0.7114, 0.2351},  {8, 9, 1.03, 0.74},      {9, 10, 1.044, 0.74},
        {10, 11, 0.1966, 0.065}, {11, 12, 0.3744, 0.1238},{12, 13, 1.468, 1.155},
        {13, 14, 0.5416, 0.7129},{14, 15, 0.591, 0.526},  {15, 16, 0.7463, 0.545},
        {16, 17, 1.289, 1.721},  {17, 18, 0.732, 0.574},  {2, 19, 0.164, 0.1565},
        {19, 20, 1.5042, 1.3554},{20, 21, 0.4095, 0.4784},{21, 22, 0.7089, 0.9373},
        {3, 23, 0.4512, 0.3083}, {23, 24, 0.898, 0.7091}, {24, 25, 0.896, 0.7011},
        {6, 26, 0.203, 0.1034},  {26, 27, 0.2842, 0.1447},{27, 28, 1.059, 0.9337},
        {28, 29, 0.8042, 0.7006},{29, 30, 0.5075, 0.2585},{30, 31, 0.9744, 0.963},
        {31, 32, 0.3105, 0.3619},{32, 33, 0.341, 0.5302},
    }};
    std::vector<Bus> buses;
    for (int i = 0; i < 33; ++i)
        buses.push_back(Bus{i + 1, kLoads[i][0], kLoads[i][1]});
    std::vector<Branch> branches;
    for (int i = 0; i < 32; ++i)
        branches.push_back(Branch{i + 1, static_cast<int>(kBranches[i][0]),
                                  static_cast<int>(kBranches[i][1]), kBranches[i][2],
                                  kBranches[i][3]});
    return FeederNetwork(12.66, base_mva, std::move(buses), std::move(branches));
}

/// Default hourly base-load multipliers: a diurnal double-peak curve
/// (morning and evening ridges) with +-10% seeded noise, normalized so the
/// multiplier stays in (0, ~1.1] with the evening peak at 1.0.
inline std::vector<double> default_load_scaling(int hours, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> noise(-0.10, 0.10);
    std::vector<double> mult(hours);
    constexpr double kPi = 3.14159265358979323846;
    for (int t = 0; t < hours; ++t) {
        int h = t % 24;
        double base = 0.70 + 0.14 * std::sin(2 * kPi * (h - 10.0) / 24.0) +
                      0.10 * std::sin(4 * kPi * (h - 7.5) / 24.0);
        double m = base * (1.0 + noise(rng));
        mult[t] = m < 0.05 ? 0.05 : m;
    }
    return mult;
}

}  // namespace evplan
