#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

// Unit disk graph over planar points: edge iff Euclidean distance <= 1,
// weighted by that distance.  Distances come in two flavours, weighted
// shortest-path (d_G) and hop (BFS) distance; both live in DistanceField.

namespace udgfl {

using VertexId = int;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kNoVertex = -1;

struct Point {
    VertexId id = 0;
    double x = 0.0;
    double y = 0.0;
};

inline double sq_dist(const Point& a, const Point& b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

inline double euclid(const Point& a, const Point& b) {
    return std::sqrt(sq_dist(a, b));
}

struct Edge {
    VertexId to = 0;
    double w = 0.0;
};

class UnitDiskGraph {
public:
    std::vector<Point> points;
    std::vector<std::vector<Edge>> adjacency;  // sorted by neighbor id
    std::vector<int> componentId;
    int numComponents = 0;

    int n() const { return static_cast<int>(points.size()); }

    std::size_t edge_count() const {
        std::size_t m = 0;
        for (const auto& a : adjacency) m += a.size();
        return m / 2;
    }

    bool has_edge(VertexId u, VertexId v) const {
        const auto& a = adjacency[u];
        auto it = std::lower_bound(a.begin(), a.end(), v,
                                   [](const Edge& e, VertexId t) { return e.to < t; });
        return it != a.end() && it->to == v;
    }
};

struct DistanceField {
    VertexId source = 0;
    std::vector<double> weightedDist;  // from weighted_sssp; BFS-path weight in hop_bfs
    std::vector<int> hopDist;          // hop count of the chosen path
    std::vector<VertexId> parent;
};

// Squared-distance threshold; avoids sqrt in the adjacency test.
constexpr double kEdgeSqThreshold = 1.0 + 1e-12;

// Exact UDG via spatial bucketing by unit cells (only the 9 neighboring
// cells are scanned per point).  Duplicate coordinates are rejected here;
// ingestion (io.hpp) merges them when asked to.
inline UnitDiskGraph build_udg(const std::vector<Point>& points) {
    if (points.empty()) throw std::invalid_argument("build_udg: empty point set");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].id != static_cast<VertexId>(i))
            throw std::invalid_argument("build_udg: ids must be contiguous from 0");
        if (!std::isfinite(points[i].x) || !std::isfinite(points[i].y))
            throw std::invalid_argument("build_udg: non-finite coordinate");
    }

    UnitDiskGraph g;
    g.points = points;
    g.adjacency.assign(points.size(), {});

    auto cell_key = [](double x, double y) {
        const std::int64_t cx = static_cast<std::int64_t>(std::floor(x));
        const std::int64_t cy = static_cast<std::int64_t>(std::floor(y));
        return static_cast<std::uint64_t>(cx) * 0x9e3779b97f4a7c15ULL ^
               static_cast<std::uint64_t>(cy);
    };
    std::unordered_map<std::uint64_t, std::vector<VertexId>> buckets;
    buckets.reserve(points.size() * 2);
    for (const auto& p : points) buckets[cell_key(p.x, p.y)].push_back(p.id);

    for (const auto& p : points) {
        for (int dx = -1; dx <= 1; ++dx) {
            for (int dy = -1; dy <= 1; ++dy) {
                auto it = buckets.find(cell_key(p.x + dx, p.y + dy));
                if (it == buckets.end()) continue;
                for (VertexId q : it->second) {
                    const Point& pq = points[q];
                    // Guard against hash collisions between distant cells.
                    if (std::floor(pq.x) != std::floor(p.x + dx) ||
                        std::floor(pq.y) != std::floor(p.y + dy))
                        continue;
                    if (q == p.id) continue;
                    const double d2 = sq_dist(p, pq);
                    if (d2 == 0.0 && p.x == pq.x && p.y == pq.y)
                        throw std::invalid_argument("coincident points");
                    if (d2 <= kEdgeSqThreshold)
                        g.adjacency[p.id].push_back({q, std::sqrt(d2)});
                }
            }
        }
    }
    for (auto& a : g.adjacency)
        std::sort(a.begin(), a.end(), [](const Edge& l, const Edge& r) { return l.to < r.to; });

    // Components by BFS.
    g.componentId.assign(points.size(), -1);
    for (VertexId s = 0; s < g.n(); ++s) {
        if (g.componentId[s] != -1) continue;
        const int c = g.numComponents++;
        std::queue<VertexId> q;
        q.push(s);
        g.componentId[s] = c;
        while (!q.empty()) {
            VertexId u = q.front();
            q.pop();
            for (const Edge& e : g.adjacency[u])
                if (g.componentId[e.to] == -1) {
                    g.componentId[e.to] = c;
                    q.push(e.to);
                }
        }
    }
    return g;
}

// Dijkstra with (dist, id) tie-break so parents are reproducible.
inline DistanceField weighted_sssp(const UnitDiskGraph& g, VertexId src) {
    if (src < 0 || src >= g.n()) throw std::invalid_argument("weighted_sssp: bad source");
    DistanceField f;
    f.source = src;
    f.weightedDist.assign(g.n(), kInf);
    f.hopDist.assign(g.n(), -1);
    f.parent.assign(g.n(), kNoVertex);
    using Item = std::pair<double, VertexId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    f.weightedDist[src] = 0.0;
    f.hopDist[src] = 0;
    pq.push({0.0, src});
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > f.weightedDist[u]) continue;
        for (const Edge& e : g.adjacency[u]) {
            const double nd = d + e.w;
            if (nd < f.weightedDist[e.to]) {
                f.weightedDist[e.to] = nd;
                f.hopDist[e.to] = f.hopDist[u] + 1;
                f.parent[e.to] = u;
                pq.push({nd, e.to});
            }
        }
    }
    return f;
}

// BFS; adjacency is id-sorted, so discovery order (and the parent tree)
// is deterministic with the smallest-id tie break.
inline DistanceField hop_bfs(const UnitDiskGraph& g, VertexId src) {
    if (src < 0 || src >= g.n()) throw std::invalid_argument("hop_bfs: bad source");
    DistanceField f;
    f.source = src;
    f.weightedDist.assign(g.n(), kInf);
    f.hopDist.assign(g.n(), -1);
    f.parent.assign(g.n(), kNoVertex);
    std::queue<VertexId> q;
    f.hopDist[src] = 0;
    f.weightedDist[src] = 0.0;
    q.push(src);
    while (!q.empty()) {
        VertexId u = q.front();
        q.pop();
        for (const Edge& e : g.adjacency[u])
            if (f.hopDist[e.to] == -1) {
                f.hopDist[e.to] = f.hopDist[u] + 1;
                f.weightedDist[e.to] = f.weightedDist[u] + e.w;
                f.parent[e.to] = u;
                q.push(e.to);
            }
    }
    return f;
}

// Multi-source Dijkstra helper: distance to nearest seed, cutoff optional.
inline std::vector<double> multi_source_dist(const UnitDiskGraph& g,
                                             const std::vector<VertexId>& seeds,
                                             double cutoff = kInf) {
    std::vector<double> dist(g.n(), kInf);
    using Item = std::pair<double, VertexId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (VertexId s : seeds)
        if (dist[s] > 0.0) {
            dist[s] = 0.0;
            pq.push({0.0, s});
        }
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u]) continue;
        for (const Edge& e : g.adjacency[u]) {
            const double nd = d + e.w;
            if (nd <= cutoff && nd < dist[e.to]) {
                dist[e.to] = nd;
                pq.push({nd, e.to});
            }
        }
    }
    return dist;
}

// Labeled multi-source Dijkstra: distance to and identity of the nearest
// seed (ties to the smallest seed id).
struct NearestSeedField {
    std::vector<double> dist;
    std::vector<VertexId> seed;
};

inline NearestSeedField nearest_seed(const UnitDiskGraph& g, const std::vector<VertexId>& seeds,
                                     double cutoff = kInf) {
    NearestSeedField f;
    f.dist.assign(g.n(), kInf);
    f.seed.assign(g.n(), kNoVertex);
    using Item = std::tuple<double, VertexId, VertexId>;  // (dist, seed, vertex)
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    std::vector<VertexId> ss(seeds);
    std::sort(ss.begin(), ss.end());
    for (VertexId s : ss)
        if (f.seed[s] == kNoVertex) {
            f.dist[s] = 0.0;
            f.seed[s] = s;
            pq.push({0.0, s, s});
        }
    while (!pq.empty()) {
        auto [d, lab, u] = pq.top();
        pq.pop();
        if (d > f.dist[u] || (d == f.dist[u] && lab > f.seed[u])) continue;
        for (const Edge& e : g.adjacency[u]) {
            const double nd = d + e.w;
            if (nd > cutoff) continue;
            if (nd < f.dist[e.to] || (nd == f.dist[e.to] && lab < f.seed[e.to])) {
                f.dist[e.to] = nd;
                f.seed[e.to] = lab;
                pq.push({nd, lab, e.to});
            }
        }
    }
    return f;
}

// Max host-graph distance over pairs of `subset` ("weak" = distances are
// measured in the host, not the induced subgraph).
inline double weak_diameter(const std::vector<VertexId>& subset, const UnitDiskGraph& host) {
    double best = 0.0;
    for (std::size_t i = 0; i < subset.size(); ++i) {
        DistanceField f = weighted_sssp(host, subset[i]);
        for (std::size_t j = i + 1; j < subset.size(); ++j) {
            const double d = f.weightedDist[subset[j]];
            if (d == kInf) return kInf;
            best = std::max(best, d);
        }
    }
    return best;
}

// All vertices within weighted distance <= radius of some seed.
inline std::vector<VertexId> r_neighborhood(const UnitDiskGraph& g,
                                            const std::vector<VertexId>& seeds,
                                            double radius) {
    if (radius < 0) throw std::invalid_argument("r_neighborhood: negative radius");
    auto dist = multi_source_dist(g, seeds, radius);
    std::vector<VertexId> out;
    for (VertexId v = 0; v < g.n(); ++v)
        if (dist[v] <= radius) out.push_back(v);
    return out;
}

// Induced sub-UDG on a vertex subset.  Because edges are purely
// distance-defined, the UDG of the subset's points *is* the induced
// subgraph.  Returns the graph plus the subset->host id map.
struct InducedUdg {
    UnitDiskGraph graph;
    std::vector<VertexId> toHost;               // local id -> host id
    std::unordered_map<VertexId, VertexId> toLocal;
};

inline InducedUdg induce_udg(const UnitDiskGraph& host, std::vector<VertexId> subset) {
    std::sort(subset.begin(), subset.end());
    subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
    InducedUdg out;
    out.toHost = subset;
    std::vector<Point> pts;
    pts.reserve(subset.size());
    for (std::size_t i = 0; i < subset.size(); ++i) {
        Point p = host.points[subset[i]];
        p.id = static_cast<VertexId>(i);
        pts.push_back(p);
        out.toLocal[subset[i]] = static_cast<VertexId>(i);
    }
    out.graph = build_udg(pts);
    return out;
}

}  // namespace udgfl
