// evplan: plan fast-charging EVCI locations on a radial feeder, simulate the
// resulting EV load, settle dynamic prices, and forecast the posted price.
//
// Subcommands: enumerate, optimize, simulate, price, forecast.
// Exit codes: 0 ok, 2 usage/input error, 3 numerical failure under --strict.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "evplan/csv.hpp"
#include "evplan/dataset.hpp"
#include "evplan/evsim.hpp"
#include "evplan/forecast.hpp"
#include "evplan/loadflow.hpp"
#include "evplan/manifest.hpp"
#include "evplan/network.hpp"
#include "evplan/pricing.hpp"
#include "evplan/serialize.hpp"
#include "evplan/siting.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace evplan;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct CommonOpts {
    std::string feeder_dir = std::string(EVPLAN_DATA_DIR) + "/ieee33";
    std::string out_dir = "out";
    std::string config_file;
    std::uint64_t seed = 1;
    int workers = 2;
    bool strict = false;
    double base_kv = 12.66;
    double base_mva = 100.0;
    json config;  // parsed --config document (empty object when absent)
};

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    json j;
    in >> j;
    if (!j.is_object()) throw std::runtime_error("config file must hold a JSON object");
    return j;
}

template <typename T>
T cfg_get(const json& config, const std::string& section, const std::string& key, T fallback) {
    if (config.contains(section) && config[section].contains(key))
        return config[section][key].get<T>();
    return fallback;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--feeder", opts.feeder_dir, "Feeder directory with bus.csv and branch.csv");
    cmd->add_option("--out", opts.out_dir, "Output directory");
    cmd->add_option("--seed", opts.seed, "Random seed");
    cmd->add_option("--config", opts.config_file, "JSON config file (flags override it)");
    cmd->add_option("--workers", opts.workers, "Concurrent load-flow workers");
    cmd->add_option("--base-kv", opts.base_kv, "Feeder base voltage, kV");
    cmd->add_option("--base-mva", opts.base_mva, "Per-unit power base, MVA");
    cmd->add_flag("--strict", opts.strict, "Exit 3 on any non-convergent load flow");
}

FeederNetwork load_net(const CommonOpts& opts) {
    fs::path dir(opts.feeder_dir);
    return load_feeder(dir / "bus.csv", dir / "branch.csv", opts.base_kv, opts.base_mva);
}

LoadFlowConfig loadflow_config(const CommonOpts& opts) {
    LoadFlowConfig lf;
    lf.v_slack = cfg_get(opts.config, "loadflow", "v_slack", lf.v_slack);
    lf.v_threshold = cfg_get(opts.config, "loadflow", "v_threshold", lf.v_threshold);
    lf.tol = cfg_get(opts.config, "loadflow", "tol", lf.tol);
    lf.max_iter = cfg_get(opts.config, "loadflow", "max_iter", lf.max_iter);
    return lf;
}

json loadflow_json(const LoadFlowConfig& lf) {
    return {{"v_slack", lf.v_slack}, {"v_threshold", lf.v_threshold},
            {"tol", lf.tol}, {"max_iter", lf.max_iter}};
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

std::vector<int> parse_locations(const std::string& csv_list) {
    std::vector<int> out;
    std::stringstream ss(csv_list);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(std::stoi(tok));
    return out;
}

std::string join_ints(const std::vector<int>& v, const std::string& sep = " ") {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += sep;
        s += std::to_string(v[i]);
    }
    return s;
}

// ---------------------------------------------------------------- enumerate

struct EnumerateOpts {
    CommonOpts common;
    double evci_kw = 1000.0;
    int n_evci = 5;
    std::uint64_t budget = 2'000'000;
};

int run_enumerate(const EnumerateOpts& o) {
    auto net = load_net(o.common);
    auto lf = loadflow_config(o.common);
    auto rep = enumerate_all(net, o.evci_kw, o.n_evci, lf, o.common.workers, o.budget);

    fs::create_directories(o.common.out_dir);
    fs::path out(o.common.out_dir);

    csv::Writer cloud(out / "objective_cloud.csv");
    cloud.header({"loss_kw", "sq_dev"});
    for (const auto& p : rep.cloud) cloud.row({p.loss_kw, p.sq_dev});

    write_json(out / "pareto_front.json", front_to_json(rep));
    write_json(out / "best_compromise.json",
               {{"locations", rep.locations_of(rep.best_index)},
                {"objectives", to_json(rep.cloud[rep.best_index])},
                {"mu", rep.best_mu},
                {"n_evaluations", rep.n_evaluations}});

    json eff{{"command", "enumerate"},
             {"feeder", o.common.feeder_dir},
             {"evci_kw", o.evci_kw},
             {"n_evci", o.n_evci},
             {"budget", o.budget},
             {"loadflow", loadflow_json(lf)}};
    write_manifest(out, "enumerate", eff, o.common.seed);

    std::cout << "enumerate: " << rep.n_evaluations << " placements, "
              << rep.n_infeasible << " infeasible, front size " << rep.front.size()
              << "\nbest compromise: {" << join_ints(rep.locations_of(rep.best_index), ",")
              << "} loss " << rep.cloud[rep.best_index].loss_kw << " kW, sq dev "
              << rep.cloud[rep.best_index].sq_dev << "\n";
    return kExitOk;
}

// ----------------------------------------------------------------- optimize

struct OptimizeOpts {
    CommonOpts common;
    double evci_kw = 1000.0;
    int n_evci = 5;
    bool verify_oracle = false;
    std::uint64_t budget = 2'000'000;
    PsoConfig pso;
};

int run_optimize(const OptimizeOpts& o) {
    auto net = load_net(o.common);
    auto lf = loadflow_config(o.common);

    PsoConfig pso = o.pso;
    pso.seed = o.common.seed;
    auto rep = run_mopso(net, o.evci_kw, o.n_evci, pso, lf, o.common.workers);

    fs::create_directories(o.common.out_dir);
    fs::path out(o.common.out_dir);
    json report = to_json(rep);

    // Table-style comparison of the base case and the placed case
    auto base_sol = solve(net, lf);
    auto describe = [&](const LoadFlowSolution& sol) {
        double vmin = kInf;
        int vbus = 0;
        for (int i = 1; i < net.n_buses(); ++i)
            if (std::abs(sol.v[i]) < vmin) {
                vmin = std::abs(sol.v[i]);
                vbus = net.buses()[i].id;
            }
        double lmin = kInf;
        int lbr = 0;
        for (size_t k = 0; k < sol.branch_loss_kw.size(); ++k)
            if (sol.branch_loss_kw[k] < lmin) {
                lmin = sol.branch_loss_kw[k];
                lbr = net.branches()[k].id;
            }
        return std::tuple{vmin, vbus, lmin, lbr};
    };
    auto [bvmin, bvbus, blmin, blbr] = describe(base_sol);

    csv::Writer cmp(out / "comparison.csv");
    cmp.raw_row({"parameter", "without_evcis", "with_evcis"});
    if (!rep.best_locations.empty()) {
        auto placed_sol = solve(apply_placement(net, Placement(rep.best_locations, o.evci_kw)), lf);
        auto [pvmin, pvbus, plmin, plbr] = describe(placed_sol);
        cmp.raw_row({"locations", "-", join_ints(rep.best_locations)});
        cmp.raw_row({"power_loss_kw", csv::format_number(rep.base_objectives.loss_kw),
                     csv::format_number(rep.best_objectives.loss_kw)});
        cmp.raw_row({"sq_voltage_dev_pu2", csv::format_number(rep.base_objectives.sq_dev),
                     csv::format_number(rep.best_objectives.sq_dev)});
        cmp.raw_row({"min_voltage_pu", csv::format_number(bvmin) + " (bus " + std::to_string(bvbus) + ")",
                     csv::format_number(pvmin) + " (bus " + std::to_string(pvbus) + ")"});
        cmp.raw_row({"min_branch_loss_kw", csv::format_number(blmin) + " (line " + std::to_string(blbr) + ")",
                     csv::format_number(plmin) + " (line " + std::to_string(plbr) + ")"});
    } else {
        cmp.raw_row({"locations", "-", "-"});
        cmp.raw_row({"power_loss_kw", csv::format_number(rep.base_objectives.loss_kw), "-"});
    }

    int exit_code = kExitOk;
    if (o.verify_oracle && o.n_evci > 0) {
        auto truth = enumerate_all(net, o.evci_kw, o.n_evci, lf, o.common.workers, o.budget);
        bool nondominated = true;
        for (const auto& p : truth.cloud)
            if (dominates(p, rep.best_objectives)) nondominated = false;
        bool same_placement =
            rep.best_locations == truth.locations_of(truth.best_index);
        report["oracle_verification"] = {
            {"nondominated_in_cloud", nondominated},
            {"matches_exhaustive_best_compromise", same_placement},
            {"exhaustive_best", {{"locations", truth.locations_of(truth.best_index)},
                                 {"objectives", to_json(truth.cloud[truth.best_index])}}}};
        if (!nondominated) {
            std::cerr << "oracle verification FAILED: optimizer answer is dominated\n";
            exit_code = kExitNumerical;
        }
    }
    write_json(out / "siting_report.json", report);

    json eff{{"command", "optimize"},
             {"feeder", o.common.feeder_dir},
             {"evci_kw", o.evci_kw},
             {"n_evci", o.n_evci},
             {"pso", {{"swarm_size", pso.swarm_size}, {"max_iter", pso.max_iter},
                      {"c1", pso.c1}, {"c2", pso.c2}, {"a_max", pso.a_max},
                      {"k_repeat", pso.k_repeat}, {"max_run", pso.max_run}}},
             {"verify_oracle", o.verify_oracle},
             {"loadflow", loadflow_json(lf)}};
    write_manifest(out, "optimize", eff, o.common.seed);

    std::cout << "optimize: best {" << join_ints(rep.best_locations, ",") << "} loss "
              << rep.best_objectives.loss_kw << " kW, sq dev " << rep.best_objectives.sq_dev
              << " (base " << rep.base_objectives.loss_kw << " kW / "
              << rep.base_objectives.sq_dev << ")\n";
    return exit_code;
}

// ----------------------------------------------------------------- simulate

struct SimulateOpts {
    CommonOpts common;
    std::string locations;       // "8,15,16,17,18"
    std::string placement_file;  // siting_report.json
    std::string scaling_file;
    int days = 1;
    SimConfig sim;
};

std::vector<int> resolve_locations(const SimulateOpts& o) {
    if (!o.locations.empty()) return parse_locations(o.locations);
    if (!o.placement_file.empty()) {
        std::ifstream in(o.placement_file);
        if (!in) throw std::runtime_error("cannot open placement file " + o.placement_file);
        json j;
        in >> j;
        return j.at("best_locations").get<std::vector<int>>();
    }
    throw std::runtime_error("simulate needs --locations or --placement");
}

int run_simulate(const SimulateOpts& o) {
    auto net = load_net(o.common);
    auto lf = loadflow_config(o.common);
    auto locations = resolve_locations(o);
    Placement pl(locations, 0.0);  // injected power comes from the profiles
    for (int loc : locations) net.index_of(loc);

    SimConfig sim = o.sim;
    sim.horizon_days = o.days;
    sim.seed = o.common.seed;
    sim.validate();
    const int hours = sim.horizon_days * 24;

    auto profiles = simulate_evci(sim, static_cast<int>(locations.size()));

    std::vector<double> scaling;
    if (!o.scaling_file.empty()) {
        auto t = csv::read_table(o.scaling_file, {"hour", "multiplier"});
        for (const auto& r : t.rows) scaling.push_back(r[1]);
        if (static_cast<int>(scaling.size()) != hours)
            throw std::runtime_error("scaling file must cover exactly " + std::to_string(hours) +
                                     " hours");
    } else {
        scaling = default_load_scaling(hours, mix_seed(sim.seed, 9001));
    }

    auto rep = run_timeseries(net, pl, profiles, scaling, lf, o.common.workers);

    fs::create_directories(o.common.out_dir);
    fs::path out(o.common.out_dir);

    {
        csv::Writer w(out / "scaling.csv");
        w.header({"hour", "multiplier"});
        for (int t = 0; t < hours; ++t) w.row({static_cast<double>(t), scaling[t]});
    }
    {
        std::vector<std::string> head{"hour"};
        for (size_t i = 0; i < profiles.size(); ++i)
            head.push_back("evci_" + std::to_string(i + 1) + "_kw");
        csv::Writer w(out / "evci_energy.csv");
        w.raw_row(head);
        for (int t = 0; t < hours; ++t) {
            std::vector<double> row{static_cast<double>(t)};
            for (const auto& p : profiles) row.push_back(p.hourly_kw[t]);
            w.row(row);
        }
    }
    {
        csv::Writer w(out / "sessions.csv");
        w.raw_row({"evci", "station", "model", "arrival_h", "soc0", "start_h",
                   "energy_kwh", "duration_h"});
        for (const auto& p : profiles)
            for (const auto& s : p.sessions)
                w.row({static_cast<double>(s.evci_id), static_cast<double>(s.station),
                       static_cast<double>(s.model), s.arrival_h, s.soc0, s.start_h,
                       s.energy_kwh, s.duration_h});
    }
    {
        std::vector<std::string> head{"hour"};
        for (int i = 0; i < net.n_buses(); ++i)
            head.push_back("v_bus_" + std::to_string(net.buses()[i].id));
        csv::Writer w(out / "voltages.csv");
        w.raw_row(head);
        for (int t = 0; t < hours; ++t) {
            std::vector<double> row{static_cast<double>(t)};
            for (double v : rep.v_mag[t]) row.push_back(v);
            w.row(row);
        }
    }
    {
        csv::Writer w(out / "losses.csv");
        w.header({"hour", "total_loss_kw", "min_v_pu", "min_v_bus", "converged"});
        for (int t = 0; t < hours; ++t)
            w.row({static_cast<double>(t), rep.per_hour[t].total_loss_kw,
                   rep.per_hour[t].min_v, static_cast<double>(rep.per_hour[t].min_v_bus),
                   rep.per_hour[t].converged ? 1.0 : 0.0});
    }
    {
        csv::Writer w(out / "energy.csv");
        w.header({"hour", "system_kwh", "evci_kwh"});
        for (int t = 0; t < hours; ++t)
            w.row({static_cast<double>(t), rep.base_load_kwh[t] + rep.total_evci_kwh[t],
                   rep.total_evci_kwh[t]});
    }
    {
        csv::Writer w(out / "periods.csv");
        w.raw_row({"hour", "period"});
        for (int t = 0; t < hours; ++t)
            w.raw_row({std::to_string(t), period_name(rep.periods[t])});
    }

    json eff{{"command", "simulate"},
             {"feeder", o.common.feeder_dir},
             {"locations", locations},
             {"days", o.days},
             {"sim", {{"charger_kw", sim.charger_kw},
                      {"stations_per_evci", sim.stations_per_evci},
                      {"evs_per_station_day_min", sim.evs_per_station_day_min},
                      {"evs_per_station_day_max", sim.evs_per_station_day_max}}},
             {"scaling_file", o.scaling_file},
             {"loadflow", loadflow_json(lf)}};
    write_manifest(out, "simulate", eff, o.common.seed);

    int bad_hours = 0;
    for (const auto& rec : rep.per_hour) bad_hours += !rec.converged;
    std::cout << "simulate: " << hours << " hours at {" << join_ints(locations, ",") << "}, "
              << bad_hours << " non-convergent\n";
    if (bad_hours && o.common.strict) return kExitNumerical;
    return kExitOk;
}

// -------------------------------------------------------------------- price

struct PriceOpts {
    CommonOpts common;
    std::string profiles_file;  // evci_energy.csv from simulate
    std::string sessions_file;
    std::string grid_file;
    Tariff tariff;
};

int run_price(const PriceOpts& o) {
    fs::path profiles_path = o.profiles_file.empty()
                                 ? fs::path(o.common.out_dir) / "evci_energy.csv"
                                 : fs::path(o.profiles_file);
    auto table = csv::read_table(profiles_path, {});
    if (table.header.size() < 2 || table.header[0] != "hour")
        throw std::runtime_error(profiles_path.string() + ": expected hour,evci_*_kw columns");
    const int n_evci = static_cast<int>(table.header.size()) - 1;
    const int hours = static_cast<int>(table.rows.size());
    if (hours == 0 || hours % 24 != 0)
        throw std::runtime_error("price: profile series must cover whole days");

    std::vector<EvciLoadProfile> profiles(n_evci);
    for (int e = 0; e < n_evci; ++e) {
        profiles[e].evci_id = e + 1;
        profiles[e].hourly_kw.resize(hours);
    }
    std::vector<double> total(hours, 0.0);
    for (int t = 0; t < hours; ++t)
        for (int e = 0; e < n_evci; ++e) {
            profiles[e].hourly_kw[t] = table.rows[t][e + 1];
            total[t] += table.rows[t][e + 1];
        }

    // sessions give the per-period EV counts when available
    fs::path sessions_path = o.sessions_file.empty()
                                 ? fs::path(o.common.out_dir) / "sessions.csv"
                                 : fs::path(o.sessions_file);
    if (fs::exists(sessions_path)) {
        auto st = csv::read_table(sessions_path,
                                  {"evci", "station", "model", "arrival_h", "soc0", "start_h",
                                   "energy_kwh", "duration_h"});
        for (const auto& r : st.rows) {
            EvSession s;
            s.evci_id = static_cast<int>(r[0]);
            s.station = static_cast<int>(r[1]);
            s.model = static_cast<int>(r[2]);
            s.arrival_h = r[3];
            s.soc0 = r[4];
            s.start_h = r[5];
            s.energy_kwh = r[6];
            s.duration_h = r[7];
            if (s.evci_id >= 1 && s.evci_id <= n_evci)
                profiles[s.evci_id - 1].sessions.push_back(s);
        }
    }

    o.tariff.validate();
    auto periods = classify_periods(total);

    GridPriceSeries grid;
    if (!o.grid_file.empty()) {
        auto gt = csv::read_table(o.grid_file, {"hour", "price"});
        for (const auto& r : gt.rows) grid.hourly.push_back(r[1]);
        if (static_cast<int>(grid.hourly.size()) != hours)
            throw std::runtime_error("grid price file must cover exactly " +
                                     std::to_string(hours) + " hours");
        grid.validate();
    } else {
        grid = synth_grid_price(hours, o.common.seed);
    }

    auto posted = published_price(o.tariff, grid);

    fs::create_directories(o.common.out_dir);
    fs::path out(o.common.out_dir);
    {
        csv::Writer w(out / "prices.csv");
        w.raw_row({"hour", "grid_price", "evci_price", "period"});
        for (int t = 0; t < hours; ++t)
            w.raw_row({std::to_string(t), csv::format_number(grid.hourly[t]),
                       csv::format_number(posted[t]), period_name(periods[t])});
    }
    {
        csv::Writer w(out / "evci_price.csv");
        w.header({"hour", "price"});
        for (int t = 0; t < hours; ++t) w.row({static_cast<double>(t), posted[t]});
    }
    {
        json days = json::array();
        for (int day = 0; day < hours / 24; ++day) {
            json ledgers = json::array();
            for (const auto& p : profiles)
                ledgers.push_back(to_json(settle_day(p, periods, o.tariff, grid, day)));
            days.push_back({{"day", day}, {"ledgers", ledgers}});
        }
        write_json(out / "ledgers.json", {{"days", days}});
    }

    json eff{{"command", "price"},
             {"profiles", profiles_path.string()},
             {"grid_file", o.grid_file},
             {"tariff", {{"r_f", o.tariff.r_f}, {"r_p", o.tariff.r_p},
                         {"r_n", o.tariff.r_n}, {"r_op", o.tariff.r_op}}}};
    write_manifest(out, "price", eff, o.common.seed);

    // day-1 profit summary
    double lo = kInf, hi = -kInf;
    for (const auto& p : profiles) {
        auto led = settle_day(p, periods, o.tariff, grid, 0);
        lo = std::min(lo, led.profit);
        hi = std::max(hi, led.profit);
    }
    std::cout << "price: " << n_evci << " EVCIs, " << hours << " hours; day-1 profit range $"
              << lo << " .. $" << hi << "\n";
    return kExitOk;
}

// ----------------------------------------------------------------- forecast

struct ForecastOpts {
    CommonOpts common;
    std::string prices_file;
    int holdout = 168;
    std::string order;  // "p,d,q" override
    int max_p = 5, max_d = 2, max_q = 5;
};

int run_forecast(const ForecastOpts& o) {
    fs::path prices_path = o.prices_file.empty()
                               ? fs::path(o.common.out_dir) / "evci_price.csv"
                               : fs::path(o.prices_file);
    auto t = csv::read_table(prices_path, {"hour", "price"});
    PriceSeries series;
    for (const auto& r : t.rows) series.values.push_back(r[1]);
    series.validate();

    const int n = static_cast<int>(series.values.size());
    if (o.holdout < 1 || o.holdout >= n)
        throw std::runtime_error("forecast: holdout must be positive and shorter than the series");
    const int train_len = n - o.holdout;

    PriceSeries train{std::vector<double>(series.values.begin(),
                                          series.values.begin() + train_len),
                      series.start_hour};

    int p, d, q;
    if (!o.order.empty()) {
        auto parts = parse_locations(o.order);
        if (parts.size() != 3) throw std::runtime_error("--order expects p,d,q");
        p = parts[0];
        d = parts[1];
        q = parts[2];
    } else {
        std::tie(p, d, q) = select_order(train, o.max_p, o.max_d, o.max_q);
    }
    auto model = fit(train, p, d, q);

    // holdout predictions: rolling one-step-ahead with the model fixed
    auto preds = one_step_predictions(model, series, train_len);
    std::span<const double> actual(series.values.data() + train_len, o.holdout);
    auto scores = score(preds, actual);
    auto dynamic = forecast(model, train, o.holdout);
    auto normality = residual_normality(model, train);

    fs::create_directories(o.common.out_dir);
    fs::path out(o.common.out_dir);
    {
        csv::Writer w(out / "forecast.csv");
        w.header({"hour", "predicted", "actual"});
        for (int i = 0; i < o.holdout; ++i)
            w.row({static_cast<double>(train_len + i), preds[i], actual[i]});
    }
    write_json(out / "model.json", to_json(model));
    json jscores = to_json(scores);
    jscores["order"] = {p, d, q};
    jscores["train_points"] = train_len;
    jscores["holdout_points"] = o.holdout;
    jscores["residuals_gaussian_5pct"] = normality.valid ? json(normality.gaussian_5pct) : json();
    jscores["multi_step_r2"] = score(dynamic, actual).r2_defined
                                   ? json(score(dynamic, actual).r2)
                                   : json();
    write_json(out / "scores.json", jscores);

    json eff{{"command", "forecast"},
             {"prices", prices_path.string()},
             {"holdout", o.holdout},
             {"order", {p, d, q}}};
    write_manifest(out, "forecast", eff, o.common.seed);

    std::cout << "forecast: ARIMA(" << p << "," << d << "," << q << ") on " << train_len
              << " points; holdout RMSE " << scores.rmse << ", R2 " << scores.r2 << ", MAE "
              << scores.mae << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EVCI planning toolkit: siting, simulation, pricing, forecasting"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    // --config is honored as a defaults layer: pre-scan, then let flags win.
    json config = json::object();
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") config = load_config(argv[i + 1]);

    EnumerateOpts en;
    en.common.config = config;
    auto* c_en = app.add_subcommand("enumerate", "Evaluate every placement combination");
    add_common(c_en, en.common);
    c_en->add_option("--evci-kw", en.evci_kw, "EVCI size, kW");
    c_en->add_option("--n", en.n_evci, "Number of EVCIs");
    c_en->add_option("--budget", en.budget, "Max combinations before refusing");

    OptimizeOpts op;
    op.common.config = config;
    op.pso.swarm_size = cfg_get(config, "pso", "swarm_size", 50);
    op.pso.max_iter = cfg_get(config, "pso", "max_iter", 100);
    op.pso.c1 = cfg_get(config, "pso", "c1", 2.0);
    op.pso.c2 = cfg_get(config, "pso", "c2", 2.0);
    op.pso.a_max = cfg_get(config, "pso", "a_max", 50);
    op.pso.k_repeat = cfg_get(config, "pso", "k_repeat", 10);
    op.pso.max_run = cfg_get(config, "pso", "max_run", 10);
    auto* c_op = app.add_subcommand("optimize", "MOPSO placement search");
    add_common(c_op, op.common);
    c_op->add_option("--evci-kw", op.evci_kw, "EVCI size, kW");
    c_op->add_option("--n", op.n_evci, "Number of EVCIs");
    c_op->add_option("--swarm", op.pso.swarm_size, "Swarm size");
    c_op->add_option("--iters", op.pso.max_iter, "Max iterations per run");
    c_op->add_option("--runs", op.pso.max_run, "Independent runs");
    c_op->add_option("--k-repeat", op.pso.k_repeat, "Stable iterations that end a run");
    c_op->add_option("--budget", op.budget, "Oracle enumeration budget");
    c_op->add_flag("--verify-oracle", op.verify_oracle,
                   "Also enumerate and assert the answer is non-dominated");

    SimulateOpts si;
    si.common.config = config;
    si.sim.charger_kw = cfg_get(config, "sim", "charger_kw", 50.0);
    si.sim.stations_per_evci = cfg_get(config, "sim", "stations_per_evci", 20);
    si.sim.evs_per_station_day_min = cfg_get(config, "sim", "evs_per_station_day_min", 6);
    si.sim.evs_per_station_day_max = cfg_get(config, "sim", "evs_per_station_day_max", 10);
    auto* c_si = app.add_subcommand("simulate", "Hourly EV-load time series through the feeder");
    add_common(c_si, si.common);
    c_si->add_option("--locations", si.locations, "Comma-separated EVCI bus ids");
    c_si->add_option("--placement", si.placement_file, "siting_report.json from optimize");
    c_si->add_option("--days", si.days, "Horizon in days");
    c_si->add_option("--scaling", si.scaling_file, "hour,multiplier CSV for base loads");
    c_si->add_option("--charger-kw", si.sim.charger_kw, "Charger rating, kW");
    c_si->add_option("--stations", si.sim.stations_per_evci, "Stations per EVCI");

    PriceOpts pr;
    pr.common.config = config;
    pr.tariff.r_f = cfg_get(config, "tariff", "r_f", 0.02);
    pr.tariff.r_p = cfg_get(config, "tariff", "r_p", 0.08);
    pr.tariff.r_n = cfg_get(config, "tariff", "r_n", 0.05);
    pr.tariff.r_op = cfg_get(config, "tariff", "r_op", 0.02);
    auto* c_pr = app.add_subcommand("price", "Dynamic prices, ledgers and the posted price series");
    add_common(c_pr, pr.common);
    c_pr->add_option("--profiles", pr.profiles_file, "evci_energy.csv from simulate");
    c_pr->add_option("--sessions", pr.sessions_file, "sessions.csv from simulate");
    c_pr->add_option("--grid", pr.grid_file, "hour,price CSV of utility prices");
    c_pr->add_option("--r-f", pr.tariff.r_f, "Fixed fee, $/kWh");
    c_pr->add_option("--r-p", pr.tariff.r_p, "Peak price, $/kWh");
    c_pr->add_option("--r-n", pr.tariff.r_n, "Normal price, $/kWh");
    c_pr->add_option("--r-op", pr.tariff.r_op, "Off-peak price, $/kWh");

    ForecastOpts fo;
    fo.common.config = config;
    auto* c_fo = app.add_subcommand("forecast", "Fit and score an ARIMA price forecaster");
    add_common(c_fo, fo.common);
    c_fo->add_option("--prices", fo.prices_file, "hour,price CSV (default: out/evci_price.csv)");
    c_fo->add_option("--holdout", fo.holdout, "Holdout length in hours");
    c_fo->add_option("--order", fo.order, "Fix the order as p,d,q instead of selecting");
    c_fo->add_option("--max-p", fo.max_p, "Order search bound");
    c_fo->add_option("--max-d", fo.max_d, "Order search bound");
    c_fo->add_option("--max-q", fo.max_q, "Order search bound");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (c_en->parsed()) return run_enumerate(en);
        if (c_op->parsed()) return run_optimize(op);
        if (c_si->parsed()) return run_simulate(si);
        if (c_pr->parsed()) return run_price(pr);
        if (c_fo->parsed()) return run_forecast(fo);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitOk;
}
