#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "udgfl/udg.hpp"

// Balanced partly separator: two hop-shortest root paths whose removal
// splits the core set X 2/3-balanced.  Crossing edges between the two
// sides are permitted, but each carries a certificate placing both
// endpoints within weighted distance 4 of a path vertex.
//
// The existence theorem is non-constructive; we search (heuristic first,
// exhaustive pair search as fallback) and certify every returned
// separator with verify_separator before handing it out.

namespace udgfl {

struct CrossingCertificate {
    VertexId a, b;    // edge endpoints, a in side1, b in side2
    VertexId witness; // path vertex c
    double distA, distB;
};

struct Separator {
    VertexId source = kNoVertex;
    VertexId x = kNoVertex, y = kNoVertex;
    std::vector<VertexId> pathX, pathY;  // hop-shortest paths from source
    std::vector<VertexId> side1, side2;  // sorted
    std::vector<CrossingCertificate> crossingCertificates;
};

inline int balance_cap(std::size_t xSize) {
    return static_cast<int>((2 * xSize + 2) / 3);  // ceil(2|X|/3)
}

namespace detail {

inline std::vector<VertexId> tree_path(const DistanceField& bfs, VertexId v) {
    std::vector<VertexId> path;
    for (VertexId u = v; u != kNoVertex; u = bfs.parent[u]) path.push_back(u);
    std::reverse(path.begin(), path.end());
    return path;
}

// Try to realize a separator from the candidate pair (x, y); nullopt when
// the balance check cannot be met for this pair.
inline std::optional<Separator> try_pair(const UnitDiskGraph& g, const std::set<VertexId>& xSet,
                                         const DistanceField& bfs, VertexId s, VertexId x,
                                         VertexId y) {
    Separator sep;
    sep.source = s;
    sep.x = x;
    sep.y = y;
    sep.pathX = tree_path(bfs, x);
    sep.pathY = tree_path(bfs, y);

    std::set<VertexId> pathSet(sep.pathX.begin(), sep.pathX.end());
    pathSet.insert(sep.pathY.begin(), sep.pathY.end());

    NearestSeedField near = nearest_seed(g, {pathSet.begin(), pathSet.end()}, 3.0);

    // Components of G minus the weighted 3-neighborhood of the paths.
    std::vector<VertexId> rest;
    for (VertexId v = 0; v < g.n(); ++v)
        if (near.dist[v] > 3.0) rest.push_back(v);
    std::set<VertexId> todo(rest.begin(), rest.end());
    struct Comp {
        std::vector<VertexId> verts;
        int xWeight = 0;
    };
    std::vector<Comp> comps;
    while (!todo.empty()) {
        Comp comp;
        std::vector<VertexId> stack{*todo.begin()};
        todo.erase(todo.begin());
        while (!stack.empty()) {
            VertexId u = stack.back();
            stack.pop_back();
            comp.verts.push_back(u);
            if (xSet.count(u)) ++comp.xWeight;
            for (const Edge& e : g.adjacency[u])
                if (todo.count(e.to)) {
                    todo.erase(e.to);
                    stack.push_back(e.to);
                }
        }
        comps.push_back(std::move(comp));
    }

    const int cap = balance_cap(xSet.size());
    for (const auto& c : comps)
        if (c.xWeight > cap) return std::nullopt;

    // First-fit decreasing by X-weight into the lighter side.
    std::sort(comps.begin(), comps.end(), [](const Comp& a, const Comp& b) {
        if (a.xWeight != b.xWeight) return a.xWeight > b.xWeight;
        return a.verts.front() < b.verts.front();
    });
    std::vector<VertexId> side[2];
    int xCount[2] = {0, 0};
    for (const auto& c : comps) {
        const int tgt = xCount[1] < xCount[0] ? 1 : 0;
        side[tgt].insert(side[tgt].end(), c.verts.begin(), c.verts.end());
        xCount[tgt] += c.xWeight;
    }
    if (xCount[0] > cap || xCount[1] > cap) return std::nullopt;

    // Distribute the removed neighborhood minus the path vertices.
    std::vector<VertexId> leftoverX, leftoverOther;
    for (VertexId v = 0; v < g.n(); ++v) {
        if (near.dist[v] > 3.0 || pathSet.count(v)) continue;
        (xSet.count(v) ? leftoverX : leftoverOther).push_back(v);
    }
    for (VertexId v : leftoverX) {
        const int tgt = xCount[1] < xCount[0] ? 1 : 0;
        side[tgt].push_back(v);
        ++xCount[tgt];
    }
    for (VertexId v : leftoverOther) {
        const int tgt = side[1].size() < side[0].size() ? 1 : 0;
        side[tgt].push_back(v);
    }
    if (xCount[0] > cap || xCount[1] > cap) return std::nullopt;

    sep.side1 = side[0];
    sep.side2 = side[1];
    std::sort(sep.side1.begin(), sep.side1.end());
    std::sort(sep.side2.begin(), sep.side2.end());

    // Certificates for the crossing edges, witnessed by the nearest path
    // vertex of whichever endpoint sits inside the 3-neighborhood.
    std::set<VertexId> s1(sep.side1.begin(), sep.side1.end());
    std::set<VertexId> s2(sep.side2.begin(), sep.side2.end());
    std::map<VertexId, std::vector<double>> witnessDist;  // witness -> sssp
    auto dist_from = [&](VertexId w) -> const std::vector<double>& {
        auto it = witnessDist.find(w);
        if (it == witnessDist.end())
            it = witnessDist.emplace(w, multi_source_dist(g, {w})).first;
        return it->second;
    };
    for (VertexId a : sep.side1) {
        for (const Edge& e : g.adjacency[a]) {
            if (!s2.count(e.to)) continue;
            const VertexId b = e.to;
            VertexId w = kNoVertex;
            if (near.seed[a] != kNoVertex && near.dist[a] <= 3.0)
                w = near.seed[a];
            else if (near.seed[b] != kNoVertex && near.dist[b] <= 3.0)
                w = near.seed[b];
            if (w == kNoVertex) return std::nullopt;  // cannot happen for components
            const auto& dw = dist_from(w);
            if (dw[a] > 4.0 || dw[b] > 4.0) return std::nullopt;
            sep.crossingCertificates.push_back({a, b, w, dw[a], dw[b]});
        }
    }
    return sep;
}

}  // namespace detail

// Exhaustive re-check of every stated property.  On failure `reason`
// (when given) names the first violated one.
inline bool verify_separator(const UnitDiskGraph& g, const std::vector<VertexId>& X,
                             const Separator& sep, std::string* reason = nullptr) {
    auto fail = [&](const std::string& r) {
        if (reason) *reason = r;
        return false;
    };
    DistanceField bfs = hop_bfs(g, sep.source);

    auto check_path = [&](const std::vector<VertexId>& path, VertexId endpoint) {
        if (path.empty() || path.front() != sep.source || path.back() != endpoint) return false;
        for (std::size_t i = 0; i + 1 < path.size(); ++i)
            if (!g.has_edge(path[i], path[i + 1])) return false;
        return static_cast<int>(path.size()) - 1 == bfs.hopDist[endpoint];
    };
    if (!check_path(sep.pathX, sep.x)) return fail("pathX not hop-shortest");
    if (!check_path(sep.pathY, sep.y)) return fail("pathY not hop-shortest");

    std::set<VertexId> pathSet(sep.pathX.begin(), sep.pathX.end());
    pathSet.insert(sep.pathY.begin(), sep.pathY.end());
    std::set<VertexId> s1(sep.side1.begin(), sep.side1.end());
    std::set<VertexId> s2(sep.side2.begin(), sep.side2.end());
    if (s1.size() != sep.side1.size() || s2.size() != sep.side2.size())
        return fail("duplicate side vertices");
    for (VertexId v = 0; v < g.n(); ++v) {
        const int hits = static_cast<int>(s1.count(v)) + static_cast<int>(s2.count(v)) +
                         static_cast<int>(pathSet.count(v));
        if (hits != 1) return fail("partition");
    }

    std::set<VertexId> xSet(X.begin(), X.end());
    const int cap = balance_cap(xSet.size());
    int x1 = 0, x2 = 0;
    for (VertexId v : sep.side1) x1 += xSet.count(v);
    for (VertexId v : sep.side2) x2 += xSet.count(v);
    if (x1 > cap || x2 > cap) return fail("balance");

    // Every side1-side2 edge needs a valid distance-4 certificate.
    std::map<std::pair<VertexId, VertexId>, const CrossingCertificate*> certs;
    for (const auto& c : sep.crossingCertificates) certs[{c.a, c.b}] = &c;
    std::map<VertexId, std::vector<double>> witnessDist;
    for (VertexId a : sep.side1)
        for (const Edge& e : g.adjacency[a]) {
            if (!s2.count(e.to)) continue;
            auto it = certs.find({a, e.to});
            if (it == certs.end()) return fail("missing crossing certificate");
            const CrossingCertificate& c = *it->second;
            if (!pathSet.count(c.witness)) return fail("certificate witness off path");
            auto wd = witnessDist.find(c.witness);
            if (wd == witnessDist.end())
                wd = witnessDist.emplace(c.witness, multi_source_dist(g, {c.witness})).first;
            if (wd->second[a] > 4.0 || wd->second[e.to] > 4.0)
                return fail("certificate distance");
        }
    if (reason) reason->clear();
    return true;
}

// Heuristic-then-exhaustive search for a certified separator.
inline Separator find_partly_separator(const UnitDiskGraph& g, const std::vector<VertexId>& X,
                                       VertexId s) {
    if (g.numComponents != 1) throw std::invalid_argument("separator: graph must be connected");
    if (X.size() < 2) throw std::invalid_argument("separator: |X| >= 2 required");
    if (s < 0 || s >= g.n()) throw std::invalid_argument("separator: bad source");

    std::set<VertexId> xSet(X.begin(), X.end());
    DistanceField bfs = hop_bfs(g, s);

    // Subtree X-weights on the BFS tree drive the heavy-path heuristic.
    std::vector<int> weight(g.n(), 0);
    std::vector<VertexId> order(g.n());
    for (VertexId v = 0; v < g.n(); ++v) order[v] = v;
    std::sort(order.begin(), order.end(),
              [&](VertexId a, VertexId b) { return bfs.hopDist[a] > bfs.hopDist[b]; });
    for (VertexId v : order) {
        weight[v] += xSet.count(v);
        if (bfs.parent[v] != kNoVertex) weight[bfs.parent[v]] += weight[v];
    }
    std::vector<std::vector<VertexId>> children(g.n());
    for (VertexId v = 0; v < g.n(); ++v)
        if (bfs.parent[v] != kNoVertex) children[bfs.parent[v]].push_back(v);

    auto heavy_walk = [&](VertexId from, VertexId skipChild) {
        VertexId v = from;
        while (true) {
            VertexId best = kNoVertex;
            int bw = -1;
            for (VertexId c : children[v]) {
                if (v == from && c == skipChild) continue;
                if (weight[c] > bw) {
                    bw = weight[c];
                    best = c;
                }
            }
            if (best == kNoVertex || bw <= 0) return v;
            v = best;
        }
    };

    std::vector<std::pair<VertexId, VertexId>> candidates;
    {
        VertexId x0 = heavy_walk(s, kNoVertex);
        // y walks the second-heaviest branch off the root.
        std::vector<VertexId> px = detail::tree_path(bfs, x0);
        VertexId firstChild = px.size() > 1 ? px[1] : kNoVertex;
        VertexId y0 = heavy_walk(s, firstChild);
        candidates.push_back({x0, y0});
        candidates.push_back({x0, s});
        candidates.push_back({x0, heavy_walk(x0, kNoVertex)});
        // A handful of deep vertices paired with x0.
        std::vector<VertexId> deep(order.begin(),
                                   order.begin() + std::min<std::size_t>(order.size(), 12));
        for (VertexId v : deep) candidates.push_back({x0, v});
    }
    // Exhaustive fallback: BFS-tree leaves first, then all pairs.
    std::vector<VertexId> leaves;
    for (VertexId v = 0; v < g.n(); ++v)
        if (children[v].empty()) leaves.push_back(v);
    for (std::size_t i = 0; i < leaves.size(); ++i)
        for (std::size_t j = i; j < leaves.size(); ++j) candidates.push_back({leaves[i], leaves[j]});
    for (VertexId a = 0; a < g.n(); ++a)
        for (VertexId b = a; b < g.n(); ++b) candidates.push_back({a, b});

    std::set<std::pair<VertexId, VertexId>> tried;
    for (auto [x, y] : candidates) {
        if (x > y) std::swap(x, y);
        if (!tried.insert({x, y}).second) continue;
        auto sep = detail::try_pair(g, xSet, bfs, s, x, y);
        if (!sep) continue;
        std::string reason;
        if (verify_separator(g, X, *sep, &reason)) return *sep;
    }
    throw std::runtime_error("separator search exhausted");
}

}  // namespace udgfl
