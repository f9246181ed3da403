#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "udgfl/reduction.hpp"
#include "udgfl/rng.hpp"
#include "udgfl/udg.hpp"

// Hop-band chopping: one round partitions a connected graph into BFS
// annuli of thickness delta with a random offset; iterating it a constant
// number of rounds bounds the weak diameter.  layer_and_bundle turns a
// structured sub-instance into independent bounded-diameter instances H_l
// via red/blue layering followed by chopping and padding.

namespace udgfl {

struct ChopResult {
    std::vector<std::vector<VertexId>> annuli;  // partition of V, hop bands
    int offset = 0;                             // r_0
    int delta = 1;
    std::vector<std::pair<VertexId, VertexId>> cutEdges;
};

inline ChopResult chop_once(const UnitDiskGraph& g, int delta, VertexId root, Rng& rng) {
    if (delta < 1) throw std::invalid_argument("chop_once: delta >= 1");
    if (g.numComponents != 1) throw std::invalid_argument("chop_once: graph must be connected");
    DistanceField bfs = hop_bfs(g, root);

    ChopResult res;
    res.delta = delta;
    res.offset = static_cast<int>(rng_int(rng, 0, delta));

    int maxLevel = 0;
    for (VertexId v = 0; v < g.n(); ++v) maxLevel = std::max(maxLevel, bfs.hopDist[v]);
    auto annulus_of = [&](VertexId v) {
        const int d = bfs.hopDist[v];
        if (d < res.offset) return 0;
        return 1 + (d - res.offset) / delta;
    };
    const int numAnnuli = maxLevel < res.offset ? 1 : 2 + (maxLevel - res.offset) / delta;
    res.annuli.assign(numAnnuli, {});
    for (VertexId v = 0; v < g.n(); ++v) res.annuli[annulus_of(v)].push_back(v);

    for (VertexId u = 0; u < g.n(); ++u)
        for (const Edge& e : g.adjacency[u])
            if (u < e.to && annulus_of(u) != annulus_of(e.to)) res.cutEdges.push_back({u, e.to});
    return res;
}

namespace detail {

inline std::vector<std::vector<VertexId>> components_of_subset(const UnitDiskGraph& host,
                                                               const std::vector<VertexId>& subset) {
    std::set<VertexId> in(subset.begin(), subset.end());
    std::set<VertexId> todo = in;
    std::vector<std::vector<VertexId>> comps;
    while (!todo.empty()) {
        VertexId s = *todo.begin();
        std::vector<VertexId> comp, stack{s};
        todo.erase(s);
        while (!stack.empty()) {
            VertexId u = stack.back();
            stack.pop_back();
            comp.push_back(u);
            for (const Edge& e : host.adjacency[u])
                if (todo.count(e.to)) {
                    todo.erase(e.to);
                    stack.push_back(e.to);
                }
        }
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
    }
    std::sort(comps.begin(), comps.end());
    return comps;
}

}  // namespace detail

// Applies chop_once to every connected component of every current part,
// `rounds` times; returns the final connected parts as host-vertex sets.
// Root of each component is its smallest vertex id.
inline std::vector<std::vector<VertexId>> chop_iterated(const UnitDiskGraph& g, int delta,
                                                        int rounds, Rng& rng) {
    if (rounds < 1) throw std::invalid_argument("chop_iterated: rounds >= 1");
    std::vector<std::vector<VertexId>> parts;
    {
        std::vector<VertexId> all(g.n());
        for (VertexId v = 0; v < g.n(); ++v) all[v] = v;
        parts = detail::components_of_subset(g, all);
    }
    for (int round = 0; round < rounds; ++round) {
        std::vector<std::vector<VertexId>> next;
        for (const auto& part : parts) {
            InducedUdg sub = induce_udg(g, part);
            for (const auto& comp : detail::components_of_subset(sub.graph, [&] {
                     std::vector<VertexId> ids(sub.graph.n());
                     for (VertexId v = 0; v < sub.graph.n(); ++v) ids[v] = v;
                     return ids;
                 }())) {
                InducedUdg compSub = induce_udg(sub.graph, comp);
                ChopResult chop = chop_once(compSub.graph, delta, 0, rng);
                for (const auto& annulus : chop.annuli) {
                    if (annulus.empty()) continue;
                    std::vector<VertexId> hostIds;
                    for (VertexId v : annulus) hostIds.push_back(sub.toHost[compSub.toHost[v]]);
                    for (const auto& piece : detail::components_of_subset(g, hostIds))
                        next.push_back(piece);
                }
            }
        }
        parts = std::move(next);
    }
    return parts;
}

// One independent bounded-diameter sub-instance (local ids index
// induced.graph; induced.toHost maps back to the owning graph).
struct SubInstanceH {
    InducedUdg induced;
    FLInstance inst;                       // over induced.graph
    std::vector<VertexId> coreClients;     // local ids (== inst.clients)
    std::vector<VertexId> paddedVertices;  // local ids added to bound diameter
    double Gamma = 0.0;                    // measured diameter after padding
    double B = 0.0;                        // operative rN unit used for budgets
    int deltaChop = 1;                     // calibrated inner chop width
    int recalibrations = 0;
    int bundleIndex = 0;
};

struct LayerBundleResult {
    std::vector<SubInstanceH> instances;
    double openedRedCost = 0.0;
    std::vector<VertexId> redOpened;  // anchors opened for free (host ids)
    int layerCount = 0;
    int bundleCount = 0;
    int layerThickness = 0;
};

// Exact diameter of a connected graph (all-pairs via per-vertex Dijkstra).
inline double exact_diameter(const UnitDiskGraph& g) {
    double best = 0.0;
    for (VertexId v = 0; v < g.n(); ++v) {
        DistanceField f = weighted_sssp(g, v);
        for (VertexId u = 0; u < g.n(); ++u) {
            if (f.weightedDist[u] == kInf) return kInf;
            best = std::max(best, f.weightedDist[u]);
        }
    }
    return best;
}

// BFS layers of thickness ~14*B hop levels, bundles of ceil(1/eps^2)
// layers with a random offset; red-layer anchors open free and their
// cluster clients leave; each blue run plus the 7*B levels above and
// below becomes one band, which is chopped (4 rounds, calibrated delta)
// and padded to bound the true diameter.
inline LayerBundleResult layer_and_bundle(const StructuredSubInstance& sub, double eps, Rng& rng) {
    const UnitDiskGraph& g = sub.inst.g();
    if (sub.inst.clients.empty()) throw std::invalid_argument("layer_and_bundle: no clients");

    // Operative rN unit: the measured client-anchor radius / avgcost scale.
    const double B = std::max({sub.maxAnchorDist, sub.maxAvg, 1e-9});
    const double diamBudget = B / (eps * eps);

    const int comp = g.componentId[sub.inst.clients.front()];
    for (VertexId c : sub.inst.clients)
        if (g.componentId[c] != comp)
            throw std::runtime_error("layer_and_bundle: clients span components");

    VertexId root = kNoVertex;
    for (VertexId v = 0; v < g.n(); ++v)
        if (g.componentId[v] == comp) {
            root = v;
            break;
        }
    DistanceField bfs = hop_bfs(g, root);

    const int thickness = std::max(1, static_cast<int>(std::ceil(14.0 * B)));
    const int strip = std::max(1, static_cast<int>(std::ceil(7.0 * B)));
    int maxLevel = 0;
    for (VertexId v = 0; v < g.n(); ++v)
        if (g.componentId[v] == comp) maxLevel = std::max(maxLevel, bfs.hopDist[v]);
    const int layerCount = maxLevel / thickness + 1;
    auto layer_of = [&](VertexId v) { return bfs.hopDist[v] / thickness; };

    const int bundleSize = static_cast<int>(std::ceil(1.0 / (eps * eps)));
    const int offset = static_cast<int>(rng_int(rng, 0, bundleSize - 1));
    auto is_red = [&](int layer) {
        return layerCount > bundleSize && layer % bundleSize == offset % bundleSize;
    };

    LayerBundleResult out;
    out.layerCount = layerCount;
    out.layerThickness = thickness;

    // Open red-layer anchors for free; their clusters' clients are served.
    std::set<VertexId> removedClients;
    std::set<VertexId> redOpen;
    for (VertexId a : sub.anchors) {
        if (!is_red(layer_of(a))) continue;
        redOpen.insert(a);
        out.redOpened.push_back(a);
        out.openedRedCost += sub.inst.opening_cost(a);
        for (const auto& [c, anch] : sub.anchorOf)
            if (anch == a) {
                removedClients.insert(c);
                out.openedRedCost += sub.anchorDist.at(c);
            }
    }

    // Blue runs -> bands [runStart*thickness - strip, runEnd*thickness + strip).
    struct Band {
        int lo, hi;  // BFS level range, half open
    };
    std::vector<Band> bands;
    int l = 0;
    while (l < layerCount) {
        if (is_red(l)) {
            ++l;
            continue;
        }
        int start = l;
        while (l < layerCount && !is_red(l)) ++l;
        bands.push_back({start * thickness - strip, l * thickness + strip});
    }
    if (bands.empty()) bands.push_back({0, (layerCount + 1) * thickness});
    out.bundleCount = static_cast<int>(bands.size());

    std::set<VertexId> subClients(sub.inst.clients.begin(), sub.inst.clients.end());

    for (std::size_t bi = 0; bi < bands.size(); ++bi) {
        const auto& band = bands[bi];
        std::vector<VertexId> bandVerts;
        for (VertexId v = 0; v < g.n(); ++v)
            if (g.componentId[v] == comp && bfs.hopDist[v] >= band.lo && bfs.hopDist[v] < band.hi)
                bandVerts.push_back(v);
        if (bandVerts.empty()) continue;

        bool bandHasClient = false;
        for (VertexId v : bandVerts)
            if (subClients.count(v) && !removedClients.count(v)) bandHasClient = true;
        if (!bandHasClient) continue;

        InducedUdg bandSub = induce_udg(g, bandVerts);

        // Calibrated inner chopping: shrink delta until every part's weak
        // diameter (measured in the band graph) fits the budget.
        int delta = std::max(1, static_cast<int>(std::ceil(B / (8.0 * eps * eps))));
        int recal = 0;
        std::vector<std::vector<VertexId>> parts;  // local ids in bandSub
        Rng chopRng = rng;  // reuse the same stream per calibration attempt
        while (true) {
            Rng attempt = chopRng;
            parts = chop_iterated(bandSub.graph, delta, 4, attempt);
            double worst = 0.0;
            for (const auto& part : parts)
                worst = std::max(worst, weak_diameter(part, bandSub.graph));
            if (worst <= diamBudget || delta == 1) {
                if (worst > diamBudget) ++recal;  // accepted with a flag
                break;
            }
            delta = std::max(1, delta / 2);
            ++recal;
        }
        rng.discard(16);  // advance the outer stream past the chop draws

        for (const auto& partLocal : parts) {
            std::vector<VertexId> part;  // host ids
            for (VertexId v : partLocal) part.push_back(bandSub.toHost[v]);

            std::vector<VertexId> clients, facilities;
            for (VertexId v : part) {
                if (subClients.count(v) && !removedClients.count(v)) clients.push_back(v);
            }
            if (clients.empty()) continue;
            for (VertexId v : part)
                if (sub.inst.facilities.count(v)) facilities.push_back(v);

            // Padding: every graph vertex within diamBudget of the part.
            // Facilities landing in the padding stay usable -- in particular
            // every core client's anchor (at distance <= B <= diamBudget).
            auto reach = multi_source_dist(g, part, diamBudget);
            std::set<VertexId> hSet(part.begin(), part.end());
            std::vector<VertexId> padding;
            for (VertexId v = 0; v < g.n(); ++v)
                if (reach[v] <= diamBudget && !hSet.count(v)) {
                    padding.push_back(v);
                    hSet.insert(v);
                    if (sub.inst.facilities.count(v)) facilities.push_back(v);
                }

            SubInstanceH h;
            h.B = B;
            h.deltaChop = delta;
            h.recalibrations = recal;
            h.bundleIndex = static_cast<int>(bi);
            h.induced = induce_udg(g, {hSet.begin(), hSet.end()});
            h.inst.graph = std::make_shared<UnitDiskGraph>(h.induced.graph);
            for (VertexId c : clients) h.inst.clients.push_back(h.induced.toLocal.at(c));
            std::sort(h.inst.clients.begin(), h.inst.clients.end());
            for (VertexId f : facilities) {
                VertexId lf = h.induced.toLocal.at(f);
                h.inst.facilities[lf] = sub.inst.facilities.at(f);
                if (redOpen.count(f)) h.inst.freeFacilities.insert(lf);
            }
            h.coreClients = h.inst.clients;
            for (VertexId v : padding) h.paddedVertices.push_back(h.induced.toLocal.at(v));
            std::sort(h.paddedVertices.begin(), h.paddedVertices.end());
            h.Gamma = exact_diameter(h.induced.graph);
            out.instances.push_back(std::move(h));
        }
    }
    return out;
}

}  // namespace udgfl
