#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "udgfl/fl.hpp"
#include "udgfl/rng.hpp"

// Bounded-box PTAS: enumerate small candidate facility nets, cut the box by a
// random shifted grid of cell size 1/2, solve a prize-collecting instance per
// cell, and keep the cheapest assembled solution.

namespace udgfl {

constexpr double kNetPackingConst = 64.0 / 3.141592653589793;  // packing bound constant

struct GridPartition {
    double ox = 0.0, oy = 0.0;  // offset in [0, 1/2)^2
    std::map<std::pair<int, int>, std::vector<VertexId>> cells;
};

struct PCFLInstance {
    std::vector<VertexId> clients;           // clients in the cell
    std::map<VertexId, double> facilities;   // cell facilities; 0 if already open
    std::map<VertexId, double> penalty;      // client -> pi_j = d_G(j, F')
};

struct PCFLSolution {
    std::vector<VertexId> open;
    std::set<VertexId> penalized;            // clients paying the penalty
    double cost = 0.0;                       // opening + sum of min(conn, penalty)
};

struct BoxPtasConfig {
    double L = 0.0;                    // declared box side; 0 = measure from the points
    int gridTrials = 32;
    int exactCellCap = 20;             // facility count above which local search kicks in
    std::uint64_t netEnumCap = 200000; // max number of candidate nets
    bool sampleNets = false;           // heuristic mode: random subsets instead of all
    int sampleCount = 500;
};

struct BoxPtasResult {
    FLSolution solution;
    std::size_t netsTried = 0;
    std::size_t netSizeCap = 0;
    std::size_t bestNetSize = 0;
    bool sampled = false;
};

inline GridPartition make_grid(const UnitDiskGraph& g, double ox, double oy) {
    if (ox < 0 || ox >= 0.5 || oy < 0 || oy >= 0.5)
        throw std::invalid_argument("make_grid: offset outside [0, 1/2)^2");
    GridPartition grid;
    grid.ox = ox;
    grid.oy = oy;
    for (VertexId v = 0; v < g.n(); ++v) {
        const int ix = static_cast<int>(std::floor(2.0 * (g.points[v].x - ox)));
        const int iy = static_cast<int>(std::floor(2.0 * (g.points[v].y - oy)));
        grid.cells[{ix, iy}].push_back(v);
    }
    return grid;
}

inline GridPartition make_grid(const UnitDiskGraph& g, Rng& rng) {
    const double ox = rng_real(rng, 0.0, 0.5);
    const double oy = rng_real(rng, 0.0, 0.5);
    return make_grid(g, ox, oy);
}

// All subsets of F with size <= sizeCap, in deterministic order.  The count
// is checked against the cap before any subset is materialized.
inline std::vector<std::vector<VertexId>> enumerate_candidate_nets(
    const std::vector<VertexId>& F, std::size_t sizeCap, std::uint64_t enumCap) {
    const std::size_t n = F.size();
    const std::size_t cap = std::min(sizeCap, n);
    double count = 0.0;
    double binom = 1.0;
    for (std::size_t k = 0; k <= cap; ++k) {
        count += binom;
        binom = binom * static_cast<double>(n - k) / static_cast<double>(k + 1);
        if (count > static_cast<double>(enumCap)) {
            std::ostringstream msg;
            msg << "net enumeration infeasible: > " << enumCap << " subsets of size <= "
                << cap << " from " << n << " facilities";
            throw std::runtime_error(msg.str());
        }
    }
    std::vector<std::vector<VertexId>> nets;
    nets.push_back({});
    std::vector<std::size_t> idx;
    // Grow by subset size so the stream starts with the cheap-to-try nets.
    for (std::size_t k = 1; k <= cap; ++k) {
        idx.assign(k, 0);
        for (std::size_t i = 0; i < k; ++i) idx[i] = i;
        while (true) {
            std::vector<VertexId> net;
            for (std::size_t i : idx) net.push_back(F[i]);
            nets.push_back(std::move(net));
            std::size_t i = k;
            while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
            if (i == 0) break;
            ++idx[i - 1];
            for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    return nets;
}

inline PCFLInstance build_pcfl(const std::vector<VertexId>& cell,
                               const std::set<VertexId>& net,
                               const std::vector<double>& distToNet,
                               const FLInstance& inst) {
    PCFLInstance p;
    for (VertexId v : cell) {
        if (std::binary_search(inst.clients.begin(), inst.clients.end(), v)) {
            p.clients.push_back(v);
            p.penalty[v] = distToNet[v];
        }
        auto it = inst.facilities.find(v);
        if (it != inst.facilities.end())
            p.facilities[v] = net.count(v) ? 0.0 : inst.opening_cost(v);
    }
    return p;
}

namespace detail {

// Within a 1/2 x 1/2 cell every pair is UDG-adjacent, so connections are
// plain Euclidean legs.
inline double pcfl_cost(const PCFLInstance& p, const UnitDiskGraph& g,
                        const std::vector<VertexId>& open, std::set<VertexId>* penalized) {
    double cost = 0.0;
    for (VertexId f : open) cost += p.facilities.at(f);
    for (VertexId c : p.clients) {
        double conn = kInf;
        for (VertexId f : open) conn = std::min(conn, euclid(g.points[c], g.points[f]));
        const double pen = p.penalty.at(c);
        if (pen < conn) {
            cost += pen;
            if (penalized) penalized->insert(c);
        } else {
            if (conn == kInf) return kInf;
            cost += conn;
        }
    }
    return cost;
}

inline PCFLSolution pcfl_local_search(const PCFLInstance& p, const UnitDiskGraph& g) {
    std::vector<VertexId> fac;
    for (const auto& [f, c] : p.facilities) fac.push_back(f);
    std::set<VertexId> open;
    for (const auto& [f, c] : p.facilities)
        if (c == 0.0) open.insert(f);
    auto cost_of = [&](const std::set<VertexId>& s) {
        return pcfl_cost(p, g, {s.begin(), s.end()}, nullptr);
    };
    double cur = cost_of(open);
    bool improved = true;
    while (improved) {
        improved = false;
        for (VertexId f : fac) {  // open / close
            std::set<VertexId> cand = open;
            if (!cand.erase(f)) cand.insert(f);
            const double c = cost_of(cand);
            if (c < cur - 1e-12) {
                open = std::move(cand);
                cur = c;
                improved = true;
            }
        }
        for (VertexId a : open) {  // single swap
            bool swapped = false;
            for (VertexId b : fac) {
                if (open.count(b)) continue;
                std::set<VertexId> cand = open;
                cand.erase(a);
                cand.insert(b);
                const double c = cost_of(cand);
                if (c < cur - 1e-12) {
                    open = std::move(cand);
                    cur = c;
                    improved = swapped = true;
                    break;
                }
            }
            if (swapped) break;
        }
    }
    PCFLSolution sol;
    sol.open.assign(open.begin(), open.end());
    sol.cost = pcfl_cost(p, g, sol.open, &sol.penalized);
    return sol;
}

}  // namespace detail

inline PCFLSolution solve_pcfl(const PCFLInstance& p, const UnitDiskGraph& g,
                               int exactCellCap = 20) {
    std::vector<VertexId> fac;
    for (const auto& [f, c] : p.facilities) fac.push_back(f);
    if (static_cast<int>(fac.size()) > exactCellCap) return detail::pcfl_local_search(p, g);

    PCFLSolution best;
    best.cost = kInf;
    const std::uint64_t total = 1ULL << fac.size();
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        std::vector<VertexId> open;
        for (std::size_t i = 0; i < fac.size(); ++i)
            if (mask & (1ULL << i)) open.push_back(fac[i]);
        const double c = detail::pcfl_cost(p, g, open, nullptr);
        if (c < best.cost) {
            best.cost = c;
            best.open = std::move(open);
        }
    }
    if (best.cost == kInf) throw std::runtime_error("infeasible assignment");
    best.penalized.clear();
    best.cost = detail::pcfl_cost(p, g, best.open, &best.penalized);
    return best;
}

inline BoxPtasResult solve_bounded(const FLInstance& inst, double eps, Rng& rng,
                                   const BoxPtasConfig& cfg = {}) {
    inst.validate();
    if (eps <= 0 || eps >= 1) throw std::invalid_argument("solve_bounded: eps outside (0, 1)");
    const UnitDiskGraph& g = inst.g();

    BoxPtasResult res;
    if (inst.clients.empty()) {
        for (VertexId f : inst.freeFacilities) res.solution.open.push_back(f);
        if (!res.solution.open.empty()) res.solution = evaluate(inst, res.solution.open);
        return res;
    }
    if (inst.facilities.empty()) throw std::runtime_error("infeasible assignment");

    double xLo = kInf, xHi = -kInf, yLo = kInf, yHi = -kInf;
    for (const Point& p : g.points) {
        xLo = std::min(xLo, p.x);
        xHi = std::max(xHi, p.x);
        yLo = std::min(yLo, p.y);
        yHi = std::max(yHi, p.y);
    }
    const double L = cfg.L > 0 ? cfg.L : std::max(1.0, std::max(xHi - xLo, yHi - yLo));

    std::vector<VertexId> fac;
    for (const auto& [f, c] : inst.facilities) fac.push_back(f);
    res.netSizeCap = static_cast<std::size_t>(std::ceil(kNetPackingConst * L / (eps * eps)));

    std::vector<std::vector<VertexId>> nets;
    if (cfg.sampleNets) {
        res.sampled = true;
        nets.push_back({});
        for (int t = 0; t < cfg.sampleCount; ++t) {
            std::vector<VertexId> net;
            for (VertexId f : fac)
                if (rng_real(rng) < 0.5 && net.size() < res.netSizeCap) net.push_back(f);
            nets.push_back(std::move(net));
        }
    } else {
        nets = enumerate_candidate_nets(fac, res.netSizeCap, cfg.netEnumCap);
    }

    // One shared batch of offsets, so every net faces the same grids.
    std::vector<std::pair<double, double>> offsets;
    for (int t = 0; t < cfg.gridTrials; ++t)
        offsets.push_back({rng_real(rng, 0.0, 0.5), rng_real(rng, 0.0, 0.5)});

    double bestCost = kInf;
    std::map<std::vector<VertexId>, double> evalCache;
    for (const auto& netVec : nets) {
        ++res.netsTried;
        const std::set<VertexId> net(netVec.begin(), netVec.end());
        std::vector<double> distToNet;
        if (net.empty())
            distToNet.assign(g.n(), kInf);
        else
            distToNet = multi_source_dist(g, netVec);

        for (const auto& [ox, oy] : offsets) {
            GridPartition grid = make_grid(g, ox, oy);
            std::set<VertexId> open(net.begin(), net.end());
            open.insert(inst.freeFacilities.begin(), inst.freeFacilities.end());
            bool feasible = true;
            for (const auto& [idx, cell] : grid.cells) {
                PCFLInstance p = build_pcfl(cell, net, distToNet, inst);
                if (p.clients.empty() && p.facilities.empty()) continue;
                if (p.clients.empty()) continue;
                PCFLSolution cellSol;
                try {
                    cellSol = solve_pcfl(p, g, cfg.exactCellCap);
                } catch (const std::runtime_error&) {
                    feasible = false;  // cell client with no facility anywhere
                    break;
                }
                open.insert(cellSol.open.begin(), cellSol.open.end());
            }
            if (!feasible || open.empty()) continue;

            std::vector<VertexId> openVec(open.begin(), open.end());
            auto [it, fresh] = evalCache.try_emplace(openVec, 0.0);
            if (fresh) {
                try {
                    it->second = evaluate(inst, openVec).totalCost;
                } catch (const std::runtime_error&) {
                    it->second = kInf;
                }
            }
            if (it->second < bestCost) {
                bestCost = it->second;
                res.solution = evaluate(inst, openVec);
                res.bestNetSize = netVec.size();
            }
        }
    }
    if (bestCost == kInf) throw std::runtime_error("infeasible assignment");
    return res;
}

}  // namespace udgfl
