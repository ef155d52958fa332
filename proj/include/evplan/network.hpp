#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "evplan/csv.hpp"

namespace evplan {

struct Bus {
    int id = 0;        // 1 = substation
    double p_kw = 0;   // active load
    double q_kvar = 0; // reactive load
};

struct Branch {
    int id = 0;
    int from_bus = 0;
    int to_bus = 0;
    double r_ohm = 0;
    double x_ohm = 0;
};

/// A radial distribution feeder: a tree of buses rooted at the substation
/// (bus 1). Immutable after construction; construction validates radiality
/// and derives the parent/child structure the sweep solver needs.
class FeederNetwork {
public:
    FeederNetwork(double base_kv, double base_mva,
                  std::vector<Bus> buses, std::vector<Branch> branches)
        : base_kv_(base_kv), base_mva_(base_mva),
          buses_(std::move(buses)), branches_(std::move(branches)) {
        validate();
        build_tree();
    }

    double base_kv() const { return base_kv_; }
    double base_mva() const { return base_mva_; }
    double z_base_ohm() const { return base_kv_ * base_kv_ / base_mva_; }

    const std::vector<Bus>& buses() const { return buses_; }
    const std::vector<Branch>& branches() const { return branches_; }
    int n_buses() const { return static_cast<int>(buses_.size()); }

    int index_of(int bus_id) const {
        auto it = id_to_index_.find(bus_id);
        if (it == id_to_index_.end())
            throw std::out_of_range("unknown bus id " + std::to_string(bus_id));
        return it->second;
    }

    /// Buses in breadth-first order from the substation (index form).
    const std::vector<int>& bfs_order() const { return bfs_order_; }
    /// Branch index feeding each bus (-1 for the root), index form.
    const std::vector<int>& parent_branch() const { return parent_branch_; }
    /// Parent bus index of each bus (-1 for the root).
    const std::vector<int>& parent_bus() const { return parent_bus_; }

    double total_p_kw() const {
        double s = 0;
        for (const auto& b : buses_) s += b.p_kw;
        return s;
    }
    double total_q_kvar() const {
        double s = 0;
        for (const auto& b : buses_) s += b.q_kvar;
        return s;
    }

private:
    void validate() const {
        if (buses_.empty()) throw std::invalid_argument("feeder: no buses");
        std::set<int> ids;
        for (const auto& b : buses_) {
            if (b.id < 1) throw std::invalid_argument("feeder: bus id must be >= 1");
            if (b.p_kw < 0 || b.q_kvar < 0)
                throw std::invalid_argument("feeder: negative load at bus " + std::to_string(b.id));
            if (!ids.insert(b.id).second)
                throw std::invalid_argument("feeder: duplicate bus id " + std::to_string(b.id));
        }
        if (!ids.count(1)) throw std::invalid_argument("feeder: substation (bus 1) missing");
        for (const auto& br : branches_) {
            if (br.from_bus == br.to_bus)
                throw std::invalid_argument("feeder: branch " + std::to_string(br.id) + " is a self-loop");
            if (br.r_ohm < 0 || br.x_ohm < 0)
                throw std::invalid_argument("feeder: negative impedance on branch " + std::to_string(br.id));
            if (!ids.count(br.from_bus) || !ids.count(br.to_bus))
                throw std::invalid_argument("feeder: branch " + std::to_string(br.id) +
                                            " references unknown bus");
        }
        if (branches_.size() != buses_.size() - 1)
            throw std::invalid_argument("feeder: not radial: " + std::to_string(buses_.size()) +
                                        " buses need " + std::to_string(buses_.size() - 1) +
                                        " branches, got " + std::to_string(branches_.size()));
    }

    // Orients every branch away from the root and fails on anything that is
    // not a tree spanning all buses.
    void build_tree() {
        const int n = n_buses();
        for (int i = 0; i < n; ++i) id_to_index_[buses_[i].id] = i;

        std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbor bus idx, branch idx)
        for (size_t k = 0; k < branches_.size(); ++k) {
            int a = id_to_index_.at(branches_[k].from_bus);
            int b = id_to_index_.at(branches_[k].to_bus);
            adj[a].push_back({b, static_cast<int>(k)});
            adj[b].push_back({a, static_cast<int>(k)});
        }

        parent_bus_.assign(n, -1);
        parent_branch_.assign(n, -1);
        std::vector<bool> seen(n, false);
        bfs_order_.clear();
        bfs_order_.push_back(id_to_index_.at(1));
        seen[bfs_order_[0]] = true;
        for (size_t head = 0; head < bfs_order_.size(); ++head) {
            int u = bfs_order_[head];
            for (auto [v, br] : adj[u]) {
                if (seen[v]) {
                    if (br != parent_branch_[u])
                        throw std::invalid_argument("feeder: not radial: cycle through branch " +
                                                    std::to_string(branches_[br].id));
                    continue;
                }
                seen[v] = true;
                parent_bus_[v] = u;
                parent_branch_[v] = br;
                bfs_order_.push_back(v);
            }
        }
        if (bfs_order_.size() != static_cast<size_t>(n)) {
            for (int i = 0; i < n; ++i)
                if (!seen[i])
                    throw std::invalid_argument("feeder: not radial: bus " +
                                                std::to_string(buses_[i].id) +
                                                " unreachable from substation");
        }
    }

    double base_kv_;
    double base_mva_;
    std::vector<Bus> buses_;
    std::vector<Branch> branches_;
    std::map<int, int> id_to_index_;
    std::vector<int> bfs_order_;
    std::vector<int> parent_branch_;
    std::vector<int> parent_bus_;
};

/// A candidate set of EVCI bus locations. Locations are distinct, never the
/// substation, and stored sorted.
class Placement {
public:
    Placement(std::vector<int> locations, double evci_kw)
        : locations_(std::move(locations)), evci_kw_(evci_kw) {
        if (locations_.empty()) throw std::invalid_argument("placement: empty location set");
        std::sort(locations_.begin(), locations_.end());
        for (size_t i = 0; i < locations_.size(); ++i) {
            if (locations_[i] == 1)
                throw std::invalid_argument("placement: substation (bus 1) is not a valid location");
            if (locations_[i] < 2)
                throw std::invalid_argument("placement: bus id out of range: " +
                                            std::to_string(locations_[i]));
            if (i && locations_[i] == locations_[i - 1])
                throw std::invalid_argument("placement: duplicate location " +
                                            std::to_string(locations_[i]));
        }
        if (evci_kw_ < 0) throw std::invalid_argument("placement: negative EVCI size");
    }

    const std::vector<int>& locations() const { return locations_; }
    double evci_kw() const { return evci_kw_; }
    size_t size() const { return locations_.size(); }

    bool operator==(const Placement& o) const {
        return locations_ == o.locations_ && evci_kw_ == o.evci_kw_;
    }

private:
    std::vector<int> locations_;
    double evci_kw_;
};

/// Returns a copy of the network with each EVCI added as extra active load.
inline FeederNetwork apply_placement(const FeederNetwork& net, const Placement& pl) {
    std::vector<Bus> buses = net.buses();
    for (int loc : pl.locations()) {
        int idx = net.index_of(loc);  // throws on out-of-range locations
        if (loc == 1) throw std::invalid_argument("placement: substation load not allowed");
        buses[idx].p_kw += pl.evci_kw();
    }
    return FeederNetwork(net.base_kv(), net.base_mva(), std::move(buses), net.branches());
}

inline FeederNetwork load_feeder(const std::filesystem::path& bus_file,
                                 const std::filesystem::path& branch_file,
                                 double base_kv, double base_mva) {
    auto bt = csv::read_table(bus_file, {"bus_id", "p_kw", "q_kvar"});
    std::vector<Bus> buses;
    buses.reserve(bt.rows.size());
    int prev_id = 0;
    for (size_t i = 0; i < bt.rows.size(); ++i) {
        Bus b{static_cast<int>(bt.rows[i][0]), bt.rows[i][1], bt.rows[i][2]};
        if (b.id <= prev_id)
            throw std::runtime_error(bus_file.string() + ":" + std::to_string(i + 2) +
                                     ": bus ids must be ascending");
        prev_id = b.id;
        buses.push_back(b);
    }
    auto rt = csv::read_table(branch_file, {"branch_id", "from_bus", "to_bus", "r_ohm", "x_ohm"});
    std::vector<Branch> branches;
    branches.reserve(rt.rows.size());
    for (const auto& r : rt.rows)
        branches.push_back(Branch{static_cast<int>(r[0]), static_cast<int>(r[1]),
                                  static_cast<int>(r[2]), r[3], r[4]});
    return FeederNetwork(base_kv, base_mva, std::move(buses), std::move(branches));
}

inline void save_feeder(const FeederNetwork& net,
                        const std::filesystem::path& bus_file,
                        const std::filesystem::path& branch_file) {
    csv::Writer bw(bus_file);
    bw.header({"bus_id", "p_kw", "q_kvar"});
    for (const auto& b : net.buses())
        bw.row({static_cast<double>(b.id), b.p_kw, b.q_kvar});
    csv::Writer rw(branch_file);
    rw.header({"branch_id", "from_bus", "to_bus", "r_ohm", "x_ohm"});
    for (const auto& br : net.branches())
        rw.row({static_cast<double>(br.id), static_cast<double>(br.from_bus),
                static_cast<double>(br.to_bus), br.r_ohm, br.x_ohm});
}

}  // namespace evplan
