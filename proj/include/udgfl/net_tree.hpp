#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "udgfl/chopping.hpp"
#include "udgfl/rng.hpp"
#include "udgfl/separator.hpp"
#include "udgfl/udg.hpp"

// The 1/8-net over a bounded-diameter instance, ball assignment, and the
// hierarchical decomposition tree with portal placement.

namespace udgfl {

constexpr double kNetRadius = 0.125;

struct NetGraph {
    std::vector<VertexId> netVertices;                    // host ids, sorted
    std::vector<VertexId> ballOf;                         // host vertex -> net host id
    std::vector<std::pair<VertexId, VertexId>> augmentedPairs;  // host-id pairs
    std::set<VertexId> augmented;                         // net host ids added by augmentation
    InducedUdg net;                                       // UDG over netVertices
};

// Greedy net in vertex-id order, then an augmentation pass: whenever a host
// edge uv joins two balls whose centers are not themselves adjacent, both
// endpoints are promoted into the net so the edge survives.
inline NetGraph build_net(const UnitDiskGraph& host) {
    NetGraph out;
    out.ballOf.assign(host.n(), kNoVertex);
    std::vector<VertexId> net;  // in addition order
    for (VertexId v = 0; v < host.n(); ++v) {
        for (VertexId u : net)
            if (euclid(host.points[v], host.points[u]) < kNetRadius) {
                out.ballOf[v] = u;
                break;
            }
        if (out.ballOf[v] == kNoVertex) {
            net.push_back(v);
            out.ballOf[v] = v;
        }
    }

    bool changed = true;
    while (changed) {
        changed = false;
        for (VertexId u = 0; u < host.n(); ++u)
            for (const Edge& e : host.adjacency[u]) {
                if (u >= e.to) continue;
                const VertexId bu = out.ballOf[u], bv = out.ballOf[e.to];
                if (bu == bv) continue;
                if (sq_dist(host.points[bu], host.points[bv]) <= kEdgeSqThreshold) continue;
                bool promoted = false;
                if (out.ballOf[u] != u) {
                    out.ballOf[u] = u;
                    out.augmented.insert(u);
                    promoted = true;
                }
                if (out.ballOf[e.to] != e.to) {
                    out.ballOf[e.to] = e.to;
                    out.augmented.insert(e.to);
                    promoted = true;
                }
                if (promoted) {
                    out.augmentedPairs.push_back({u, e.to});
                    changed = true;
                }
            }
    }

    for (VertexId v = 0; v < host.n(); ++v)
        if (out.ballOf[v] == v) out.netVertices.push_back(v);
    out.net = induce_udg(host, out.netVertices);
    return out;
}

struct DecompNode {
    int id = 0;
    std::vector<VertexId> psi;    // region, net-local ids, sorted
    std::vector<VertexId> core;   // X(t) = psi minus boundary
    std::set<VertexId> bd;        // boundary vertices
    std::vector<std::vector<VertexId>> bdPaths;  // the paths forming bd
    std::vector<VertexId> portals;               // sorted, subset of bd
    std::vector<VertexId> own;    // vertices this subtree is responsible for
    int child1 = -1, child2 = -1;
    bool componentSplit = false;  // split along components, no separator
    bool forcedLeaf = false;      // stalled split accepted as a leaf
    Separator sep;                // valid for regular internal nodes
    VertexId source = kNoVertex;  // separator source inside this region
    int depth = 0;
};

struct DecompTree {
    std::vector<DecompNode> nodes;
    int root = 0;
    int deltaPortal = 1;  // portal spacing in hops
    double Gamma = 0.0;
    int depth = 0;

    bool is_leaf(int t) const { return nodes[t].child1 < 0; }
};

inline int portal_spacing(double Gamma, double epsPrime) {
    return std::max(1, static_cast<int>(std::ceil(epsPrime * Gamma / std::log2(Gamma + 2.0))));
}

namespace detail {

// Every deltaPortal-th path vertex plus both endpoints.
inline void place_portals(const std::vector<VertexId>& path, int delta, std::set<VertexId>& out) {
    if (path.empty()) return;
    for (std::size_t i = 0; i < path.size(); i += delta) out.insert(path[i]);
    out.insert(path.back());
}

}  // namespace detail

// Recursive 2/3-balanced decomposition of the net graph.  Regions whose
// induced graph is disconnected get a component split (no separator, no new
// portals); a split that fails to shrink the core is accepted as a leaf and
// flagged.  `s` is a net-local vertex id.
inline DecompTree build_decomp_tree(const NetGraph& net, VertexId s, double Gamma,
                                    double epsPrime) {
    const UnitDiskGraph& g = net.net.graph;
    if (s < 0 || s >= g.n()) throw std::invalid_argument("decomp tree: bad source");
    DecompTree tree;
    tree.Gamma = Gamma;
    tree.deltaPortal = portal_spacing(Gamma, epsPrime);

    DecompNode root;
    root.source = s;
    for (VertexId v = 0; v < g.n(); ++v) root.psi.push_back(v);
    root.core = root.psi;
    root.own = root.psi;
    tree.nodes.push_back(root);

    const int maxDepth =
        4 * static_cast<int>(std::ceil(std::log(std::max(2, g.n())) / std::log(1.5))) + 16;

    std::vector<int> stack{0};
    while (!stack.empty()) {
        const int t = stack.back();
        stack.pop_back();
        // Note: nodes vector may reallocate; copy what we need first.
        if (tree.nodes[t].core.size() <= 1) continue;
        if (tree.nodes[t].depth >= maxDepth)
            throw std::runtime_error("decomp tree: depth cap exceeded");

        const DecompNode cur = tree.nodes[t];
        InducedUdg region = induce_udg(g, cur.psi);

        if (region.graph.numComponents > 1) {
            // Component split: bin components into two groups, balancing
            // core counts (first-fit decreasing onto the lighter group).
            std::set<VertexId> coreSet(cur.core.begin(), cur.core.end());
            std::vector<std::vector<VertexId>> comps(region.graph.numComponents);
            for (VertexId v = 0; v < region.graph.n(); ++v)
                comps[region.graph.componentId[v]].push_back(region.toHost[v]);
            std::sort(comps.begin(), comps.end(), [&](const auto& a, const auto& b) {
                std::size_t ca = 0, cb = 0;
                for (VertexId v : a) ca += coreSet.count(v);
                for (VertexId v : b) cb += coreSet.count(v);
                if (ca != cb) return ca > cb;
                return a < b;
            });
            std::vector<VertexId> g1, g2;
            std::size_t c1 = 0, c2 = 0;
            for (const auto& comp : comps) {
                std::size_t cc = 0;
                for (VertexId v : comp) cc += coreSet.count(v);
                auto& side = (c1 <= c2) ? g1 : g2;
                (c1 <= c2 ? c1 : c2) += cc;
                side.insert(side.end(), comp.begin(), comp.end());
            }
            if (g2.empty()) throw std::runtime_error("decomp tree: component split degenerate");

            auto make_child = [&](std::vector<VertexId> psiC) {
                std::sort(psiC.begin(), psiC.end());
                std::set<VertexId> in(psiC.begin(), psiC.end());
                DecompNode ch;
                ch.depth = cur.depth + 1;
                ch.psi = psiC;
                for (VertexId v : cur.bd)
                    if (in.count(v)) ch.bd.insert(v);
                for (const auto& p : cur.bdPaths) {
                    std::vector<VertexId> kept;
                    for (VertexId v : p)
                        if (in.count(v)) kept.push_back(v);
                    if (!kept.empty()) ch.bdPaths.push_back(kept);
                }
                for (VertexId v : psiC)
                    if (!ch.bd.count(v)) ch.core.push_back(v);
                for (VertexId v : cur.portals)
                    if (in.count(v)) ch.portals.push_back(v);
                for (VertexId v : cur.own)
                    if (in.count(v)) ch.own.push_back(v);
                ch.source = in.count(cur.source) ? cur.source : psiC.front();
                ch.id = static_cast<int>(tree.nodes.size());
                tree.nodes.push_back(ch);
                return ch.id;
            };
            const int c1Id = make_child(g1);
            const int c2Id = make_child(g2);
            tree.nodes[t].componentSplit = true;
            tree.nodes[t].child1 = c1Id;
            tree.nodes[t].child2 = c2Id;
            tree.depth = std::max(tree.depth, cur.depth + 1);
            stack.push_back(c1Id);
            stack.push_back(c2Id);
            continue;
        }

        // Regular split via a certified partly separator on the region.
        std::vector<VertexId> coreLocal;
        for (VertexId v : cur.core) coreLocal.push_back(region.toLocal.at(v));
        std::sort(coreLocal.begin(), coreLocal.end());
        Separator sepLocal =
            find_partly_separator(region.graph, coreLocal, region.toLocal.at(cur.source));

        auto lift = [&](const std::vector<VertexId>& xs) {
            std::vector<VertexId> out;
            for (VertexId v : xs) out.push_back(region.toHost[v]);
            std::sort(out.begin(), out.end());
            return out;
        };
        Separator sep;
        sep.source = region.toHost[sepLocal.source];
        sep.x = region.toHost[sepLocal.x];
        sep.y = region.toHost[sepLocal.y];
        for (VertexId v : sepLocal.pathX) sep.pathX.push_back(region.toHost[v]);
        for (VertexId v : sepLocal.pathY) sep.pathY.push_back(region.toHost[v]);
        sep.side1 = lift(sepLocal.side1);
        sep.side2 = lift(sepLocal.side2);
        for (const auto& c : sepLocal.crossingCertificates)
            sep.crossingCertificates.push_back({region.toHost[c.a], region.toHost[c.b],
                                                region.toHost[c.witness], c.distA, c.distB});

        std::set<VertexId> pathSet(sep.pathX.begin(), sep.pathX.end());
        pathSet.insert(sep.pathY.begin(), sep.pathY.end());

        std::set<VertexId> newPortals;
        detail::place_portals(sep.pathX, tree.deltaPortal, newPortals);
        detail::place_portals(sep.pathY, tree.deltaPortal, newPortals);

        auto make_child = [&](const std::vector<VertexId>& side, bool ownsPaths) {
            DecompNode ch;
            ch.depth = cur.depth + 1;
            std::set<VertexId> psiSet(side.begin(), side.end());
            psiSet.insert(pathSet.begin(), pathSet.end());
            psiSet.insert(cur.bd.begin(), cur.bd.end());
            ch.psi.assign(psiSet.begin(), psiSet.end());
            ch.bd = cur.bd;
            ch.bd.insert(pathSet.begin(), pathSet.end());
            ch.bdPaths = cur.bdPaths;
            ch.bdPaths.push_back(sep.pathX);
            ch.bdPaths.push_back(sep.pathY);
            for (VertexId v : ch.psi)
                if (!ch.bd.count(v)) ch.core.push_back(v);
            std::set<VertexId> ps(cur.portals.begin(), cur.portals.end());
            ps.insert(newPortals.begin(), newPortals.end());
            ch.portals.assign(ps.begin(), ps.end());
            std::set<VertexId> sideSet(side.begin(), side.end());
            for (VertexId v : cur.own)
                if (sideSet.count(v) || (ownsPaths && pathSet.count(v))) ch.own.push_back(v);
            ch.source = cur.source;  // s lies on both paths, hence in psi
            return ch;
        };
        DecompNode c1 = make_child(sep.side1, true);
        DecompNode c2 = make_child(sep.side2, false);

        if (c1.core.size() >= cur.core.size() || c2.core.size() >= cur.core.size()) {
            // Split made no progress (possible when |X| = 2 and both core
            // vertices land on one side); accept the node as a leaf.
            tree.nodes[t].forcedLeaf = true;
            continue;
        }

        c1.id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(c1);
        c2.id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(c2);
        tree.nodes[t].sep = sep;
        tree.nodes[t].child1 = c1.id;
        tree.nodes[t].child2 = c2.id;
        tree.depth = std::max(tree.depth, cur.depth + 1);
        stack.push_back(c1.id);
        stack.push_back(c2.id);
    }
    return tree;
}

struct DetourAudit {
    int samples = 0;
    int violations = 0;        // against the tight d + delta + 4 target
    int provableViolations = 0;  // against the certified d + delta + 9 bound
    double maxSlack = -kInf;   // detour - (d + delta + 4); negative when fine
    int ballSamples = 0;
    int ballViolations = 0;
    double maxBallSlack = -kInf;
};

// Samples sibling-region pairs at internal separator nodes and checks the
// portal detour bound d(u',pi) + d(pi,v') <= d(u',v') + delta + 4 within
// the parent region, plus the ball-center extension (+5) in the host graph.
inline DetourAudit portal_detour_audit(const NetGraph& net, const DecompTree& tree,
                                       const UnitDiskGraph& host, Rng& rng, int samples) {
    DetourAudit audit;
    std::vector<int> sepNodes;
    for (const auto& node : tree.nodes)
        if (node.child1 >= 0 && !node.componentSplit) sepNodes.push_back(node.id);
    if (sepNodes.empty()) return audit;

    // Hosts grouped by ball for the extension audit.
    std::map<VertexId, std::vector<VertexId>> ballMembers;
    for (VertexId v = 0; v < host.n(); ++v) ballMembers[net.ballOf[v]].push_back(v);

    const double delta = static_cast<double>(tree.deltaPortal);
    for (int it = 0; it < samples; ++it) {
        const DecompNode& node = tree.nodes[sepNodes[rng_int(rng, 0, sepNodes.size() - 1)]];
        if (node.sep.side1.empty() || node.sep.side2.empty()) continue;
        VertexId u = node.sep.side1[rng_int(rng, 0, node.sep.side1.size() - 1)];
        VertexId v = node.sep.side2[rng_int(rng, 0, node.sep.side2.size() - 1)];

        InducedUdg region = induce_udg(net.net.graph, node.psi);
        DistanceField fu = weighted_sssp(region.graph, region.toLocal.at(u));
        DistanceField fv = weighted_sssp(region.graph, region.toLocal.at(v));
        const double duv = fu.weightedDist[region.toLocal.at(v)];
        if (duv == kInf) continue;

        std::set<VertexId> newPortals;
        detail::place_portals(node.sep.pathX, tree.deltaPortal, newPortals);
        detail::place_portals(node.sep.pathY, tree.deltaPortal, newPortals);
        double best = kInf;
        for (VertexId p : newPortals) {
            const VertexId lp = region.toLocal.at(p);
            best = std::min(best, fu.weightedDist[lp] + fv.weightedDist[lp]);
        }
        ++audit.samples;
        const double slack = best - (duv + delta + 4.0);
        audit.maxSlack = std::max(audit.maxSlack, slack);
        if (slack > 1e-9) ++audit.violations;
        // Certified bound: crossing-edge witnesses are within 4 of both
        // endpoints and a portal is within (delta+1)/2 along the path.
        if (best - (duv + delta + 9.0) > 1e-9) ++audit.provableViolations;

        // Ball extension: real host points u0 in B(u'), v0 in B(v'); the
        // detour through the same portal set, measured in the host graph,
        // is allowed one extra unit.
        const VertexId hu = net.net.toHost[u], hv = net.net.toHost[v];
        const auto& mu = ballMembers[hu];
        const auto& mv = ballMembers[hv];
        if (!mu.empty() && !mv.empty()) {
            VertexId u0 = mu[rng_int(rng, 0, mu.size() - 1)];
            VertexId v0 = mv[rng_int(rng, 0, mv.size() - 1)];
            DistanceField gu = weighted_sssp(host, u0);
            DistanceField gv = weighted_sssp(host, v0);
            if (gu.weightedDist[v0] < kInf) {
                double bestHost = kInf;
                for (VertexId p : newPortals) {
                    const VertexId hp = net.net.toHost[p];
                    bestHost = std::min(bestHost, gu.weightedDist[hp] + gv.weightedDist[hp]);
                }
                ++audit.ballSamples;
                const double bslack = bestHost - (gu.weightedDist[v0] + delta + 5.0);
                audit.maxBallSlack = std::max(audit.maxBallSlack, bslack);
                if (bslack > 1e-9) ++audit.ballViolations;
            }
        }
    }
    return audit;
}

}  // namespace udgfl
