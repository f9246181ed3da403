#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "udgfl/fl.hpp"

// Primal-dual constant-factor baseline (Jain-Vazirani, ratio 3), run on
// scaled opening costs, plus the cluster / avgcost bookkeeping the
// reduction pipeline needs.

namespace udgfl {

struct BaselineResult {
    std::vector<VertexId> open;                       // D-tilde, sorted
    std::map<VertexId, std::vector<VertexId>> cluster;  // facility -> clients (nonempty)
    std::map<VertexId, double> avgcost;               // unscaled opening costs
    std::map<VertexId, VertexId> anchorOf;            // client -> its cluster facility
    double alpha = 3.0;                               // the implemented algorithm's ratio
    double scale = 1.0;
};

namespace detail {

// Dual-growth phase + conflict-graph pruning.  `fcost` are the (already
// scaled) opening costs; `rows` the facility->client distance rows.
inline std::vector<VertexId> jain_vazirani(
    const std::vector<VertexId>& clients,
    const std::vector<VertexId>& facIds,
    const std::map<VertexId, double>& fcost,
    const std::map<VertexId, std::vector<double>>& rows) {
    const int nc = static_cast<int>(clients.size());
    const int nf = static_cast<int>(facIds.size());
    if (nf == 0) throw std::runtime_error("baseline: no facilities");
    if (nc == 0) return {facIds.front()};  // open something; cost-minimal choice irrelevant

    auto d = [&](int fi, int cj) { return rows.at(facIds[fi])[clients[cj]]; };

    std::vector<double> alpha(nc, 0.0);
    std::vector<bool> connected(nc, false);
    std::vector<bool> opened(nf, false);
    std::vector<double> openTime(nf, kInf);
    std::vector<int> witness(nc, -1);
    constexpr double kTol = 1e-12;

    auto paid = [&](int fi, double t) {
        double s = 0.0;
        for (int j = 0; j < nc; ++j) {
            const double a = connected[j] ? alpha[j] : t;
            const double b = a - d(fi, j);
            if (b > 0) s += b;
        }
        return s;
    };

    double t = 0.0;
    int remaining = nc;
    while (remaining > 0) {
        // Next event: a facility pays off, a growing client reaches an open
        // facility, or a growing client starts contributing (slope change).
        double tNext = kInf;
        for (int fi = 0; fi < nf; ++fi) {
            if (opened[fi]) continue;
            double base = paid(fi, t);
            if (base >= fcost.at(facIds[fi]) - kTol) {
                tNext = t;
                break;
            }
            int slope = 0;
            double nextStart = kInf;
            for (int j = 0; j < nc; ++j)
                if (!connected[j]) {
                    if (t >= d(fi, j))
                        ++slope;
                    else
                        nextStart = std::min(nextStart, d(fi, j));
                }
            if (slope > 0)
                tNext = std::min(tNext, t + (fcost.at(facIds[fi]) - base) / slope);
            tNext = std::min(tNext, nextStart);
        }
        for (int fi = 0; fi < nf; ++fi)
            if (opened[fi])
                for (int j = 0; j < nc; ++j)
                    if (!connected[j] && d(fi, j) >= t) tNext = std::min(tNext, d(fi, j));
        if (tNext == kInf) throw std::runtime_error("baseline: client unreachable from facilities");
        t = tNext;

        for (int fi = 0; fi < nf; ++fi)
            if (!opened[fi] && paid(fi, t) >= fcost.at(facIds[fi]) - kTol) {
                opened[fi] = true;
                openTime[fi] = t;
            }
        for (int j = 0; j < nc; ++j) {
            if (connected[j]) continue;
            for (int fi = 0; fi < nf; ++fi)
                if (opened[fi] && t >= d(fi, j) - kTol) {
                    connected[j] = true;
                    alpha[j] = t;
                    witness[j] = fi;
                    --remaining;
                    break;
                }
        }
    }

    // Pruning: keep an independent set of temporarily open facilities in
    // order of opening time; two conflict when a client contributes to both.
    std::vector<int> order;
    for (int fi = 0; fi < nf; ++fi)
        if (opened[fi]) order.push_back(fi);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (openTime[a] != openTime[b]) return openTime[a] < openTime[b];
        return facIds[a] < facIds[b];
    });
    auto contributes = [&](int j, int fi) { return alpha[j] - d(fi, j) > kTol; };
    std::vector<int> kept;
    for (int fi : order) {
        bool conflict = false;
        for (int g : kept) {
            for (int j = 0; j < nc && !conflict; ++j)
                if (contributes(j, fi) && contributes(j, g)) conflict = true;
            if (conflict) break;
        }
        if (!conflict) kept.push_back(fi);
    }
    if (kept.empty()) kept.push_back(order.front());

    std::vector<VertexId> out;
    for (int fi : kept) out.push_back(facIds[fi]);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

// Runs the primal-dual algorithm on opening costs scaled by `scale`
// (the reduction uses scale = eps) and builds clusters by nearest-open
// assignment.  avgcost uses the unscaled opening costs, per
// avgcost(i) = (f_i + sum_j d(j,i)) / |cluster(i)|.
inline BaselineResult baseline_approx(const FLInstance& inst, double scale) {
    if (!(scale > 0.0 && scale <= 1.0)) throw std::invalid_argument("baseline: scale in (0,1]");
    inst.validate();

    std::vector<VertexId> facIds;
    std::map<VertexId, double> scaled;
    for (const auto& [f, c] : inst.facilities) {
        facIds.push_back(f);
        scaled[f] = inst.opening_cost(f) * scale;
    }
    auto rows = facility_distance_rows(inst);
    std::vector<VertexId> open = detail::jain_vazirani(inst.clients, facIds, scaled, rows);

    BaselineResult res;
    res.scale = scale;
    if (!inst.clients.empty()) {
        FLSolution sol = evaluate(inst, open);
        for (const auto& [c, a] : sol.assignment) {
            res.cluster[a.facility].push_back(c);
            res.anchorOf[c] = a.facility;
        }
        // Facilities that attracted no clients are dropped; this only
        // lowers the cost on the scaled instance.
        for (auto& [f, cl] : res.cluster) {
            std::sort(cl.begin(), cl.end());
            res.open.push_back(f);
            double s = inst.opening_cost(f);
            for (VertexId c : cl) s += rows[f][c];
            res.avgcost[f] = s / static_cast<double>(cl.size());
        }
    } else {
        res.open = open;
    }
    return res;
}

// Cost of the baseline solution measured on the scale-modified instance.
inline double baseline_cost_scaled(const FLInstance& inst, const BaselineResult& base) {
    double cost = 0.0;
    for (VertexId f : base.open) cost += inst.opening_cost(f) * base.scale;
    auto rows = facility_distance_rows(inst);
    for (const auto& [f, cl] : base.cluster)
        for (VertexId c : cl) cost += rows[f][c];
    return cost;
}

}  // namespace udgfl
