#pragma once

// Shared test helpers: instance generators and the independent oracles
// (brute-force edge filter, Bellman-Ford, a second facility-location
// enumerator) that the implementation-path results are checked against.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <vector>

#include "udgfl/fl.hpp"
#include "udgfl/rng.hpp"
#include "udgfl/udg.hpp"

namespace testutil {

using namespace udgfl;

inline std::vector<Point> random_points(Rng& rng, int n, double boxW, double boxH) {
    std::vector<Point> pts;
    for (int i = 0; i < n; ++i)
        pts.push_back({i, rng_real(rng, 0.0, boxW), rng_real(rng, 0.0, boxH)});
    return pts;
}

// O(n^2) all-pairs edge oracle.
inline std::set<std::pair<VertexId, VertexId>> brute_force_edges(const std::vector<Point>& pts) {
    std::set<std::pair<VertexId, VertexId>> edges;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if (sq_dist(pts[i], pts[j]) <= kEdgeSqThreshold)
                edges.insert({pts[i].id, pts[j].id});
    return edges;
}

// Bellman-Ford relaxation oracle for single-source weighted distances.
inline std::vector<double> bellman_ford(const UnitDiskGraph& g, VertexId src) {
    std::vector<double> dist(g.n(), kInf);
    dist[src] = 0.0;
    for (int round = 0; round < g.n(); ++round) {
        bool changed = false;
        for (VertexId u = 0; u < g.n(); ++u) {
            if (dist[u] == kInf) continue;
            for (const Edge& e : g.adjacency[u])
                if (dist[u] + e.w < dist[e.to] - 1e-15) {
                    dist[e.to] = dist[u] + e.w;
                    changed = true;
                }
        }
        if (!changed) break;
    }
    return dist;
}

// Largest connected component of a point set, re-indexed from 0.
inline std::vector<Point> largest_component(const std::vector<Point>& pts) {
    UnitDiskGraph g = build_udg(pts);
    std::vector<int> sizes(g.numComponents, 0);
    for (VertexId v = 0; v < g.n(); ++v) ++sizes[g.componentId[v]];
    const int best = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    std::vector<Point> out;
    for (VertexId v = 0; v < g.n(); ++v)
        if (g.componentId[v] == best)
            out.push_back({static_cast<VertexId>(out.size()), g.points[v].x, g.points[v].y});
    return out;
}

// Connected random UDG: uniform points in a box, largest component kept.
inline UnitDiskGraph random_connected_udg(Rng& rng, int n, double boxW, double boxH) {
    return build_udg(largest_component(random_points(rng, n, boxW, boxH)));
}

struct RandomInstanceCfg {
    int n = 60;
    double boxW = 4.0, boxH = 4.0;
    double facilityFrac = 0.3;
    double costLo = 0.2, costHi = 3.0;
};

// Random connected facility-location instance; every point is a client,
// a deterministic-random subset also hosts a facility.
inline FLInstance random_instance(Rng& rng, const RandomInstanceCfg& cfg = {}) {
    FLInstance inst;
    auto pts = largest_component(random_points(rng, cfg.n, cfg.boxW, cfg.boxH));
    inst.graph = std::make_shared<UnitDiskGraph>(build_udg(pts));
    for (VertexId v = 0; v < inst.g().n(); ++v) {
        inst.clients.push_back(v);
        if (rng_real(rng) < cfg.facilityFrac)
            inst.facilities[v] = rng_real(rng, cfg.costLo, cfg.costHi);
    }
    if (inst.facilities.empty()) inst.facilities[0] = rng_real(rng, cfg.costLo, cfg.costHi);
    return inst;
}

// Independent branch-and-bound facility-location oracle (second
// enumerator, distinct from exact_solve's subset scan).
inline double branch_and_bound_opt(const FLInstance& inst) {
    std::vector<VertexId> fac;
    for (const auto& [f, c] : inst.facilities) fac.push_back(f);
    auto rows = facility_distance_rows(inst);
    double best = kInf;

    std::vector<VertexId> open;
    auto assignCost = [&]() {
        double s = 0.0;
        for (VertexId c : inst.clients) {
            double d = kInf;
            for (VertexId f : open) d = std::min(d, rows[f][c]);
            if (d == kInf) return kInf;
            s += d;
        }
        return s;
    };
    std::function<void(std::size_t, double)> rec = [&](std::size_t i, double openCost) {
        if (openCost >= best) return;  // opening costs alone already too big
        if (i == fac.size()) {
            if (open.empty() && !inst.clients.empty()) return;
            const double c = assignCost();
            if (c < kInf) best = std::min(best, openCost + c);
            return;
        }
        open.push_back(fac[i]);
        rec(i + 1, openCost + inst.opening_cost(fac[i]));
        open.pop_back();
        rec(i + 1, openCost);
    };
    rec(0, 0.0);
    return best;
}

}  // namespace testutil
