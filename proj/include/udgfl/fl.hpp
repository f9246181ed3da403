#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <queue>
#include <set>
#include <stdexcept>
#include <vector>

#include "udgfl/udg.hpp"

// Facility-location instances and solutions, nearest-facility evaluation,
// and the brute-force oracle used throughout the test suites.

namespace udgfl {

struct FLInstance {
    std::shared_ptr<const UnitDiskGraph> graph;
    std::vector<VertexId> clients;               // sorted, unique
    std::map<VertexId, double> facilities;       // facility id -> opening cost
    std::set<VertexId> freeFacilities;           // forced cost 0 (red-layer opens)

    const UnitDiskGraph& g() const { return *graph; }

    double opening_cost(VertexId f) const {
        if (freeFacilities.count(f)) return 0.0;
        return facilities.at(f);
    }

    void validate() const {
        if (!graph) throw std::invalid_argument("FLInstance: no graph");
        for (VertexId c : clients)
            if (c < 0 || c >= graph->n()) throw std::invalid_argument("FLInstance: bad client id");
        for (const auto& [f, cost] : facilities) {
            if (f < 0 || f >= graph->n()) throw std::invalid_argument("FLInstance: bad facility id");
            if (cost < 0) throw std::invalid_argument("FLInstance: negative opening cost");
        }
        for (VertexId f : freeFacilities)
            if (!facilities.count(f))
                throw std::invalid_argument("FLInstance: free facility not a facility");
    }
};

struct Assignment {
    VertexId facility = kNoVertex;
    double routeCost = 0.0;  // may exceed d_G (portal detours); never below it
};

struct FLSolution {
    std::vector<VertexId> open;                  // sorted
    std::map<VertexId, Assignment> assignment;   // client -> served-by
    double openCost = 0.0;
    double connCost = 0.0;
    double totalCost = 0.0;
};

// Nearest-open-facility assignment via one multi-source Dijkstra with a
// (dist, facility-id) lexicographic key, so ties break deterministically.
inline FLSolution evaluate(const FLInstance& inst, const std::vector<VertexId>& open) {
    for (VertexId f : open)
        if (!inst.facilities.count(f))
            throw std::invalid_argument("evaluate: open set contains a non-facility");
    if (open.empty() && !inst.clients.empty())
        throw std::runtime_error("infeasible assignment");

    const UnitDiskGraph& g = inst.g();
    std::vector<double> dist(g.n(), kInf);
    std::vector<VertexId> label(g.n(), kNoVertex);
    using Item = std::tuple<double, VertexId, VertexId>;  // (dist, facility, vertex)
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    std::vector<VertexId> sortedOpen(open);
    std::sort(sortedOpen.begin(), sortedOpen.end());
    for (VertexId f : sortedOpen) {
        if (dist[f] > 0.0 || label[f] == kNoVertex) {
            dist[f] = 0.0;
            label[f] = f;
            pq.push({0.0, f, f});
        }
    }
    while (!pq.empty()) {
        auto [d, lab, u] = pq.top();
        pq.pop();
        if (d > dist[u] || (d == dist[u] && lab > label[u])) continue;
        for (const Edge& e : g.adjacency[u]) {
            const double nd = d + e.w;
            if (nd < dist[e.to] || (nd == dist[e.to] && lab < label[e.to])) {
                dist[e.to] = nd;
                label[e.to] = lab;
                pq.push({nd, lab, e.to});
            }
        }
    }

    FLSolution sol;
    sol.open = sortedOpen;
    sol.open.erase(std::unique(sol.open.begin(), sol.open.end()), sol.open.end());
    for (VertexId f : sol.open) sol.openCost += inst.opening_cost(f);
    for (VertexId c : inst.clients) {
        if (label[c] == kNoVertex) throw std::runtime_error("infeasible assignment");
        sol.assignment[c] = {label[c], dist[c]};
        sol.connCost += dist[c];
    }
    sol.totalCost = sol.openCost + sol.connCost;
    return sol;
}

// Per-client distance rows to every facility; shared by the oracle and the
// primal-dual baseline.
inline std::map<VertexId, std::vector<double>> facility_distance_rows(const FLInstance& inst) {
    std::map<VertexId, std::vector<double>> rows;
    for (const auto& [f, cost] : inst.facilities)
        rows[f] = multi_source_dist(inst.g(), {f});
    return rows;
}

// Optimal solution by enumerating subsets of non-free facilities (free
// facilities are always open).  Ties break by lexicographic open set.
inline FLSolution exact_solve(const FLInstance& inst, int cap = 24) {
    inst.validate();
    std::vector<VertexId> choice;
    for (const auto& [f, cost] : inst.facilities)
        if (!inst.freeFacilities.count(f)) choice.push_back(f);
    if (static_cast<int>(choice.size()) > cap)
        throw std::runtime_error("instance too large for oracle");

    auto rows = facility_distance_rows(inst);
    std::vector<VertexId> freeList(inst.freeFacilities.begin(), inst.freeFacilities.end());

    double bestCost = kInf;
    std::vector<VertexId> bestOpen;
    const std::uint64_t total = 1ULL << choice.size();
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        std::vector<VertexId> open(freeList);
        for (std::size_t i = 0; i < choice.size(); ++i)
            if (mask & (1ULL << i)) open.push_back(choice[i]);
        if (open.empty() && !inst.clients.empty()) continue;
        double cost = 0.0;
        for (VertexId f : open) cost += inst.opening_cost(f);
        bool feasible = true;
        bool pruned = false;
        for (VertexId c : inst.clients) {
            double d = kInf;
            for (VertexId f : open) d = std::min(d, rows[f][c]);
            if (d == kInf) {
                feasible = false;
                break;
            }
            cost += d;
            if (cost > bestCost) {
                pruned = true;
                break;
            }
        }
        if (!feasible || pruned) continue;
        std::sort(open.begin(), open.end());
        if (cost < bestCost || (cost == bestCost && open < bestOpen)) {
            bestCost = cost;
            bestOpen = open;
        }
    }
    if (bestCost == kInf) {
        if (inst.clients.empty()) return FLSolution{};
        throw std::runtime_error("infeasible assignment");
    }
    return evaluate(inst, bestOpen);
}

}  // namespace udgfl
