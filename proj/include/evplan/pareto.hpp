#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "evplan/network.hpp"

namespace evplan {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// (power loss, squared voltage deviation); +inf/+inf marks an infeasible or
/// non-converged placement.
struct ObjectivePair {
    double loss_kw = kInf;
    double sq_dev = kInf;

    bool finite() const { return std::isfinite(loss_kw) && std::isfinite(sq_dev); }
    bool operator==(const ObjectivePair& o) const {
        return loss_kw == o.loss_kw && sq_dev == o.sq_dev;
    }
};

/// Pareto dominance: no worse in both objectives, strictly better in one.
inline bool dominates(const ObjectivePair& a, const ObjectivePair& b) {
    return a.loss_kw <= b.loss_kw && a.sq_dev <= b.sq_dev &&
           (a.loss_kw < b.loss_kw || a.sq_dev < b.sq_dev);
}

struct ArchiveEntry {
    Placement placement;
    ObjectivePair objectives;
};

/// Indices of the non-dominated points of a 2-D objective cloud (plane-sweep;
/// infinite pairs are never part of the front). Exact duplicates of a front
/// point are all kept, since equal pairs do not dominate each other.
inline std::vector<size_t> nondominated_indices(std::span<const ObjectivePair> cloud) {
    std::vector<size_t> idx;
    for (size_t i = 0; i < cloud.size(); ++i)
        if (cloud[i].finite()) idx.push_back(i);
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
        if (cloud[a].loss_kw != cloud[b].loss_kw) return cloud[a].loss_kw < cloud[b].loss_kw;
        if (cloud[a].sq_dev != cloud[b].sq_dev) return cloud[a].sq_dev < cloud[b].sq_dev;
        return a < b;
    });
    std::vector<size_t> front;
    double best_dev = kInf;
    double best_loss = -kInf;
    for (size_t i : idx) {
        const auto& p = cloud[i];
        if (p.sq_dev < best_dev || (p.sq_dev == best_dev && p.loss_kw == best_loss)) {
            front.push_back(i);
            best_dev = p.sq_dev;
            best_loss = p.loss_kw;
        }
    }
    return front;
}

/// Crowding distance of each member (NSGA-II style, 2 objectives): sort by
/// one objective, boundary members get +inf, interior ones accumulate the
/// normalized spread of their neighbors. A degenerate objective range
/// contributes zero.
inline std::vector<double> crowding_distances(std::span<const ArchiveEntry> members) {
    const size_t n = members.size();
    std::vector<double> d(n, 0.0);
    if (n <= 2) {
        std::fill(d.begin(), d.end(), kInf);
        return d;
    }
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
        if (members[a].objectives.loss_kw != members[b].objectives.loss_kw)
            return members[a].objectives.loss_kw < members[b].objectives.loss_kw;
        return members[a].objectives.sq_dev < members[b].objectives.sq_dev;
    });
    auto f = [&](size_t k, int m) {
        const auto& o = members[idx[k]].objectives;
        return m == 0 ? o.loss_kw : o.sq_dev;
    };
    d[idx[0]] = d[idx[n - 1]] = kInf;
    for (int m = 0; m < 2; ++m) {
        double lo = f(0, m), hi = f(0, m);
        for (size_t k = 1; k < n; ++k) {
            lo = std::min(lo, f(k, m));
            hi = std::max(hi, f(k, m));
        }
        if (hi == lo) continue;
        for (size_t k = 1; k + 1 < n; ++k)
            d[idx[k]] += std::abs(f(k + 1, m) - f(k - 1, m)) / (hi - lo);
    }
    return d;
}

/// Non-dominated archive of placements with a capacity bound. Insertion
/// follows the usual rules: a candidate dominated by any member is rejected,
/// members dominated by the candidate are evicted, and re-insertions of the
/// same placement collapse to one entry.
class ParetoArchive {
public:
    explicit ParetoArchive(int capacity = 50) : capacity_(capacity) {
        if (capacity < 1) throw std::invalid_argument("archive capacity must be >= 1");
    }

    const std::vector<ArchiveEntry>& members() const { return members_; }
    int capacity() const { return capacity_; }
    size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }

    bool insert(const ArchiveEntry& cand) {
        if (!cand.objectives.finite()) return false;
        for (const auto& m : members_)
            if (dominates(m.objectives, cand.objectives)) return false;
        std::erase_if(members_, [&](const ArchiveEntry& m) {
            return dominates(cand.objectives, m.objectives);
        });
        // a surviving entry with the same decoded placement collapses the pair
        for (const auto& m : members_)
            if (m.placement == cand.placement) return false;
        members_.push_back(cand);
        return true;
    }

    /// Keeps the capacity() most-spread members when over-full; identity
    /// otherwise. Boundary members always survive.
    void crowding_truncate() {
        if (members_.size() <= static_cast<size_t>(capacity_)) return;
        auto d = crowding_distances(members_);
        std::vector<size_t> idx(members_.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return d[a] > d[b]; });
        idx.resize(capacity_);
        std::sort(idx.begin(), idx.end());  // preserve archive order
        std::vector<ArchiveEntry> kept;
        kept.reserve(capacity_);
        for (size_t i : idx) kept.push_back(members_[i]);
        members_ = std::move(kept);
    }

private:
    int capacity_;
    std::vector<ArchiveEntry> members_;
};

namespace detail {

/// Sigma value of a min-max-normalized objective pair: +1 on the pure-f1
/// axis, -1 on the pure-f2 axis, 0 at the origin (by convention).
inline double sigma_value(double f1, double f2) {
    double s = f1 * f1 + f2 * f2;
    if (s == 0) return 0.0;
    return (f1 * f1 - f2 * f2) / s;
}

}  // namespace detail

/// Index of the archive member whose sigma value is closest to the
/// particle's (the "local best guide"). Objectives are min-max normalized
/// over the archive; ties break by Euclidean distance in normalized
/// objective space, then by archive order. A particle with infeasible
/// objectives is treated as sigma 0.
inline size_t sigma_leader_index(const ObjectivePair& particle, const ParetoArchive& arch) {
    if (arch.empty()) throw std::invalid_argument("sigma_leader: empty archive");
    const auto& ms = arch.members();
    double lo1 = kInf, hi1 = -kInf, lo2 = kInf, hi2 = -kInf;
    for (const auto& m : ms) {
        lo1 = std::min(lo1, m.objectives.loss_kw);
        hi1 = std::max(hi1, m.objectives.loss_kw);
        lo2 = std::min(lo2, m.objectives.sq_dev);
        hi2 = std::max(hi2, m.objectives.sq_dev);
    }
    auto norm = [](double v, double lo, double hi) { return hi == lo ? 0.0 : (v - lo) / (hi - lo); };

    double sk = 0.0;
    double pk1 = 0.0, pk2 = 0.0;
    if (particle.finite()) {
        pk1 = norm(particle.loss_kw, lo1, hi1);
        pk2 = norm(particle.sq_dev, lo2, hi2);
        sk = detail::sigma_value(pk1, pk2);
    }

    size_t best = 0;
    double best_gap = kInf, best_dist = kInf;
    for (size_t i = 0; i < ms.size(); ++i) {
        double m1 = norm(ms[i].objectives.loss_kw, lo1, hi1);
        double m2 = norm(ms[i].objectives.sq_dev, lo2, hi2);
        double gap = std::abs(sk - detail::sigma_value(m1, m2));
        double dist = std::hypot(pk1 - m1, pk2 - m2);
        if (gap < best_gap || (gap == best_gap && dist < best_dist)) {
            best = i;
            best_gap = gap;
            best_dist = dist;
        }
    }
    return best;
}

/// Fuzzy membership sums (1 below the set minimum, 0 above the maximum,
/// linear between, summed over both objectives) normalized to sum to 1.
inline std::vector<double> fuzzy_memberships(std::span<const ObjectivePair> pairs) {
    double lo1 = kInf, hi1 = -kInf, lo2 = kInf, hi2 = -kInf;
    for (const auto& o : pairs) {
        lo1 = std::min(lo1, o.loss_kw);
        hi1 = std::max(hi1, o.loss_kw);
        lo2 = std::min(lo2, o.sq_dev);
        hi2 = std::max(hi2, o.sq_dev);
    }
    auto mu = [](double f, double lo, double hi) {
        if (f <= lo) return 1.0;
        if (f >= hi) return 0.0;
        return (hi - f) / (hi - lo);
    };
    std::vector<double> sums;
    sums.reserve(pairs.size());
    double total = 0;
    for (const auto& o : pairs) {
        double s = mu(o.loss_kw, lo1, hi1) + mu(o.sq_dev, lo2, hi2);
        sums.push_back(s);
        total += s;
    }
    for (auto& s : sums) s /= total;  // total > 0: the per-objective minima score 1
    return sums;
}

/// The best-compromise point: argmax of the normalized fuzzy membership sum,
/// ties broken by lower loss. Returns (index, normalized mu).
inline std::pair<size_t, double> best_compromise_index(std::span<const ObjectivePair> pairs) {
    if (pairs.empty()) throw std::invalid_argument("best_compromise: empty set");
    if (pairs.size() == 1) return {0, 1.0};
    auto mus = fuzzy_memberships(pairs);
    size_t best = 0;
    for (size_t i = 1; i < pairs.size(); ++i) {
        if (mus[i] > mus[best] ||
            (mus[i] == mus[best] && pairs[i].loss_kw < pairs[best].loss_kw))
            best = i;
    }
    return {best, mus[best]};
}

inline std::vector<ObjectivePair> objective_pairs(std::span<const ArchiveEntry> members) {
    std::vector<ObjectivePair> out;
    out.reserve(members.size());
    for (const auto& m : members) out.push_back(m.objectives);
    return out;
}

inline std::pair<size_t, double> best_compromise_index(const ParetoArchive& arch) {
    auto pairs = objective_pairs(arch.members());
    return best_compromise_index(std::span<const ObjectivePair>(pairs));
}

}  // namespace evplan
