#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "udgfl/chopping.hpp"
#include "udgfl/fl.hpp"
#include "udgfl/net_tree.hpp"

// Portal dynamic program over the decomposition tree of one bounded
// instance: valid portal vectors, exhaustive base cases, consistency
// joins, and extraction of the opened facility set.
//
// Vector semantics: in(pi) is a guarantee provided by the subtree ("this
// region opens a facility within in(pi)*g of pi"; in = K promises
// nothing), out(pi) is an allowance relied upon ("outside serves clients
// routed through pi at out(pi)*g"; out = K disallows routing out).  Every
// DP cost term includes the point-to-ball leg (1/8 per endpoint) plus the
// full ball-to-portal snap, so the true cost of the extracted open set
// never exceeds the DP estimate.

namespace udgfl {

constexpr double kSnapLeg = 0.125;      // point to its ball center

struct PortalDpConfig {
    double epsPrime = 0.03125;          // portal spacing control (eps/16 default)
    std::size_t tableCap = 1000000;     // max entries per node table
    int facilityPortalCap = 20;         // max facility-holding portals per leaf
};

struct DpKey {
    std::vector<int> in, out;
    bool operator<(const DpKey& o) const {
        if (in != o.in) return in < o.in;
        return out < o.out;
    }
};

struct DpEntry {
    double cost = kInf;
    std::vector<VertexId> open;         // host facility ids, sorted
    std::map<VertexId, int> portalLoad; // net-local portal -> out-routed clients
};

struct NodeTable {
    std::vector<VertexId> portals;      // net-local ids the vectors index
    std::map<DpKey, DpEntry> entries;
    std::size_t vectorCount = 0;        // valid single vectors enumerated
};

struct DpResult {
    std::vector<NodeTable> tables;      // indexed by tree node id
    double rootCost = kInf;
    DpEntry rootEntry;
    int K = 0;
    double unit = 1.0;                  // g, real length of one DP step
    std::size_t maxTableSize = 0;
};

// Backtracking enumeration of vectors v in {0..K}^m with
// |v[i] - v[j]| <= z[i][j] + 1 for every pair; throws past `cap`.
inline std::vector<std::vector<int>> enumerate_valid_vectors(
    const std::vector<std::vector<int>>& z, int K, std::size_t cap) {
    const std::size_t m = z.size();
    std::vector<std::vector<int>> out;
    std::vector<int> cur(m, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == m) {
            if (out.size() >= cap) throw std::runtime_error("portal table too large");
            out.push_back(cur);
            return;
        }
        for (int v = 0; v <= K; ++v) {
            bool ok = true;
            for (std::size_t j = 0; j < i && ok; ++j)
                if (std::abs(v - cur[j]) > z[i][j] + 1) ok = false;
            if (ok) {
                cur[i] = v;
                rec(i + 1);
            }
        }
    };
    rec(0);
    return out;
}

// The three verbatim join conditions between a parent vector pair and its
// two children's pairs.  `portals*` are sorted net-local id lists; vectors
// index them positionally.
inline bool check_consistency(const std::vector<VertexId>& portals, const DpKey& k,
                              const std::vector<VertexId>& portals1, const DpKey& k1,
                              const std::vector<VertexId>& portals2, const DpKey& k2) {
    auto index = [](const std::vector<VertexId>& ps) {
        std::map<VertexId, int> m;
        for (std::size_t i = 0; i < ps.size(); ++i) m[ps[i]] = static_cast<int>(i);
        return m;
    };
    const auto i0 = index(portals), i1 = index(portals1), i2 = index(portals2);

    for (const auto& [p, a] : i0) {
        const auto f1 = i1.find(p), f2 = i2.find(p);
        if (f1 == i1.end() && f2 == i2.end()) return false;  // portal lost
        // in(pi) must equal at least one child's in(pi).
        bool inOk = false;
        if (f1 != i1.end() && k1.in[f1->second] == k.in[a]) inOk = true;
        if (f2 != i2.end() && k2.in[f2->second] == k.in[a]) inOk = true;
        if (!inOk) return false;
        if (f1 != i1.end() && f2 != i2.end()) {
            // Shared boundary portal: out passes through unchanged.
            if (k1.out[f1->second] != k.out[a] || k2.out[f2->second] != k.out[a]) return false;
        } else {
            // Portal in a single child: both components pass through.
            const auto& ki = f1 != i1.end() ? k1 : k2;
            const int idx = f1 != i1.end() ? f1->second : f2->second;
            if (ki.out[idx] != k.out[a] || ki.in[idx] != k.in[a]) return false;
        }
    }
    // New separator portals (shared by the children, absent in the parent):
    // each child's outward reliance is the sibling's inward guarantee.
    for (const auto& [p, a] : i1) {
        if (i0.count(p)) continue;
        const auto f2 = i2.find(p);
        if (f2 == i2.end()) continue;
        if (k1.in[a] != k2.out[f2->second] || k2.in[f2->second] != k1.out[a]) return false;
    }
    return true;
}

namespace detail {

// Distance rows on the net graph from each needed source, cached.
struct NetDistCache {
    const UnitDiskGraph* g = nullptr;
    std::map<VertexId, std::vector<double>> rows;
    const std::vector<double>& from(VertexId v) {
        auto it = rows.find(v);
        if (it == rows.end())
            it = rows.emplace(v, weighted_sssp(*g, v).weightedDist).first;
        return it->second;
    }
};

struct LeafPoints {
    // Positions are net-local snap-target ids; extras are the real legs.
    struct Client {
        VertexId host;
        VertexId snapped;
        double snapCost;  // kSnapLeg + ball-to-portal net distance
    };
    struct Facility {
        VertexId host;
        VertexId snapped;
        double snapCost;
        double openCost;
        bool free;
    };
    std::vector<Client> clients;
    std::vector<Facility> facilities;
};

}  // namespace detail

// Full driver for one bounded instance: net and tree assumed prebuilt.
inline DpResult fill_table(const DecompTree& tree, const NetGraph& net, const SubInstanceH& H,
                           const PortalDpConfig& cfg = {}) {
    const UnitDiskGraph& gnet = net.net.graph;
    DpResult res;
    res.unit = static_cast<double>(tree.deltaPortal);
    res.K = std::max(1, static_cast<int>(std::ceil(std::max(1.0, tree.Gamma) / res.unit)));
    res.tables.resize(tree.nodes.size());

    detail::NetDistCache cache;
    cache.g = &gnet;

    // Host point -> owning leaf, via ball centers and leaf ownership.
    std::map<VertexId, int> leafOfNetVertex;
    for (const auto& node : tree.nodes)
        if (tree.is_leaf(node.id))
            for (VertexId v : node.own) leafOfNetVertex[v] = node.id;

    auto net_local_of_host = [&](VertexId hostV) {
        return net.net.toLocal.at(net.ballOf[hostV]);
    };

    std::map<int, detail::LeafPoints> leafPoints;
    auto snap_targets = [&](const DecompNode& node) {
        std::vector<VertexId> t = node.portals;
        for (VertexId v : node.core) t.push_back(v);
        std::sort(t.begin(), t.end());
        t.erase(std::unique(t.begin(), t.end()), t.end());
        return t;
    };
    auto snap = [&](VertexId ball, const std::vector<VertexId>& targets) {
        VertexId best = kNoVertex;
        double bestD = kInf;
        for (VertexId p : targets) {
            const double d = cache.from(p)[ball];
            if (d < bestD - 1e-15 || (std::abs(d - bestD) <= 1e-15 && p < best)) {
                best = p;
                bestD = d;
            }
        }
        return std::make_pair(best, bestD);
    };

    for (VertexId c : H.inst.clients) {
        const VertexId ball = net_local_of_host(c);
        const int leaf = leafOfNetVertex.at(ball);
        const auto targets = snap_targets(tree.nodes[leaf]);
        if (targets.empty()) {
            leafPoints[leaf].clients.push_back({c, kNoVertex, 0.0});
            continue;
        }
        auto [p, d] = snap(ball, targets);
        if (d == kInf) throw std::runtime_error("portal dp: client ball unreachable");
        leafPoints[leaf].clients.push_back({c, p, kSnapLeg + d});
    }
    for (const auto& [f, cost] : H.inst.facilities) {
        const VertexId ball = net_local_of_host(f);
        const int leaf = leafOfNetVertex.at(ball);
        const auto targets = snap_targets(tree.nodes[leaf]);
        const bool free = H.inst.freeFacilities.count(f) > 0;
        if (targets.empty()) {
            leafPoints[leaf].facilities.push_back({f, kNoVertex, 0.0, cost, free});
            continue;
        }
        auto [p, d] = snap(ball, targets);
        if (d == kInf) throw std::runtime_error("portal dp: facility ball unreachable");
        leafPoints[leaf].facilities.push_back({f, p, kSnapLeg + d, cost, free});
    }

    // Rounded pairwise distances for validity constraints.
    auto z_matrix = [&](const std::vector<VertexId>& portals) {
        const std::size_t m = portals.size();
        std::vector<std::vector<int>> z(m, std::vector<int>(m, 0));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < i; ++j) {
                const double d = cache.from(portals[i])[portals[j]];
                const int r = d == kInf ? res.K
                                        : static_cast<int>(std::ceil(d / res.unit));
                z[i][j] = z[j][i] = std::min(r, res.K);
            }
        return z;
    };

    // Bottom-up order: children before parents (children have larger ids,
    // but walk explicitly to be safe).
    std::vector<int> order;
    std::function<void(int)> post = [&](int t) {
        if (!tree.is_leaf(t)) {
            post(tree.nodes[t].child1);
            post(tree.nodes[t].child2);
        }
        order.push_back(t);
    };
    post(tree.root);

    for (int t : order) {
        const DecompNode& node = tree.nodes[t];
        NodeTable& table = res.tables[t];
        table.portals = node.portals;
        const std::size_t m = node.portals.size();

        if (tree.is_leaf(t)) {
            const detail::LeafPoints& pts = leafPoints[t];

            if (m == 0) {
                // Isolated region with no boundary: solve it exactly.
                DpEntry e;
                e.cost = 0.0;
                if (!pts.clients.empty() || !pts.facilities.empty()) {
                    FLInstance sub;
                    sub.graph = H.inst.graph;
                    for (const auto& c : pts.clients) sub.clients.push_back(c.host);
                    std::sort(sub.clients.begin(), sub.clients.end());
                    for (const auto& f : pts.facilities) {
                        sub.facilities[f.host] = f.openCost;
                        if (f.free) sub.freeFacilities.insert(f.host);
                    }
                    if (!sub.clients.empty() || !sub.facilities.empty()) {
                        if (sub.facilities.empty() && !sub.clients.empty())
                            throw std::runtime_error("portal dp: clients without facilities");
                        if (!sub.facilities.empty()) {
                            FLSolution s = exact_solve(sub, cfg.facilityPortalCap);
                            e.cost = s.totalCost;
                            e.open = s.open;
                        }
                    }
                }
                table.entries[DpKey{{}, {}}] = e;
                continue;
            }

            const auto z = z_matrix(node.portals);
            auto vectors = enumerate_valid_vectors(z, res.K, cfg.tableCap);
            table.vectorCount = vectors.size();
            const std::size_t workCap = 64 * cfg.tableCap;
            std::size_t work = 0;

            // Facility-holding snap targets (free ones always open).
            std::map<VertexId, std::vector<int>> facAt;  // snapped -> facility idx
            for (std::size_t i = 0; i < pts.facilities.size(); ++i)
                facAt[pts.facilities[i].snapped].push_back(static_cast<int>(i));
            std::vector<VertexId> choicePortals;
            for (const auto& [p, fs] : facAt) {
                bool allFree = true;
                for (int fi : fs)
                    if (!pts.facilities[fi].free) allFree = false;
                if (!allFree) choicePortals.push_back(p);
            }
            if (static_cast<int>(choicePortals.size()) > cfg.facilityPortalCap)
                throw std::runtime_error("portal table too large");

            // Client route legs to each boundary portal, and from them the
            // per-client best out-routing cost under each candidate
            // out-vector (independent of the opened subset).
            std::vector<std::vector<double>> routeLeg(pts.clients.size(),
                                                      std::vector<double>(m, kInf));
            for (std::size_t ci = 0; ci < pts.clients.size(); ++ci)
                for (std::size_t pi = 0; pi < m; ++pi)
                    routeLeg[ci][pi] = pts.clients[ci].snapCost +
                                       cache.from(node.portals[pi])[pts.clients[ci].snapped];
            std::vector<std::vector<double>> outCost(pts.clients.size(),
                                                     std::vector<double>(vectors.size(), kInf));
            std::vector<std::vector<int>> outPortal(pts.clients.size(),
                                                    std::vector<int>(vectors.size(), -1));
            for (std::size_t ci = 0; ci < pts.clients.size(); ++ci)
                for (std::size_t vi = 0; vi < vectors.size(); ++vi)
                    for (std::size_t pi = 0; pi < m; ++pi) {
                        if (vectors[vi][pi] == res.K) continue;  // routing barred
                        const double c = routeLeg[ci][pi] + vectors[vi][pi] * res.unit;
                        if (c < outCost[ci][vi]) {
                            outCost[ci][vi] = c;
                            outPortal[ci][vi] = static_cast<int>(pi);
                        }
                    }

            const std::size_t nSubsets = std::size_t(1) << choicePortals.size();
            for (std::size_t mask = 0; mask < nSubsets; ++mask) {
                // Open set of this subset: cheapest paid facility per chosen
                // portal plus every free facility.
                std::vector<int> openFac;
                double openCost = 0.0;
                for (std::size_t i = 0; i < pts.facilities.size(); ++i)
                    if (pts.facilities[i].free) openFac.push_back(static_cast<int>(i));
                for (std::size_t b = 0; b < choicePortals.size(); ++b) {
                    if (!(mask >> b & 1)) continue;
                    int best = -1;
                    for (int fi : facAt[choicePortals[b]]) {
                        if (pts.facilities[fi].free) continue;
                        if (best < 0 ||
                            pts.facilities[fi].openCost < pts.facilities[best].openCost ||
                            (pts.facilities[fi].openCost == pts.facilities[best].openCost &&
                             pts.facilities[fi].host < pts.facilities[best].host))
                            best = fi;
                    }
                    openFac.push_back(best);
                    openCost += pts.facilities[best].openCost;
                }

                // Per-boundary-portal best effective facility distance, and
                // per-client best in-region service cost.
                std::vector<double> minEff(m, kInf);
                for (int fi : openFac)
                    for (std::size_t pi = 0; pi < m; ++pi) {
                        const double d = cache.from(node.portals[pi])[pts.facilities[fi].snapped] +
                                         pts.facilities[fi].snapCost;
                        minEff[pi] = std::min(minEff[pi], d);
                    }
                std::vector<double> inRegion(pts.clients.size(), kInf);
                for (std::size_t ci = 0; ci < pts.clients.size(); ++ci)
                    for (int fi : openFac)
                        inRegion[ci] = std::min(
                            inRegion[ci],
                            pts.clients[ci].snapCost +
                                cache.from(pts.clients[ci].snapped)[pts.facilities[fi].snapped] +
                                pts.facilities[fi].snapCost);

                // Serving cost per out-vector (the in-vector only gates
                // feasibility, never the cost).
                std::vector<double> serveCost(vectors.size(), 0.0);
                std::vector<bool> serveOk(vectors.size(), true);
                for (std::size_t vi = 0; vi < vectors.size(); ++vi)
                    for (std::size_t ci = 0; ci < pts.clients.size(); ++ci) {
                        const double best = std::min(inRegion[ci], outCost[ci][vi]);
                        if (best == kInf) {
                            serveOk[vi] = false;
                            break;
                        }
                        serveCost[vi] += best;
                    }

                std::vector<int> inFloor(m, 0);
                for (std::size_t pi = 0; pi < m; ++pi)
                    inFloor[pi] = minEff[pi] == kInf
                                      ? res.K + 1
                                      : static_cast<int>(std::ceil(minEff[pi] / res.unit - 1e-12));

                for (const auto& inV : vectors) {
                    bool feasible = true;
                    for (std::size_t pi = 0; pi < m && feasible; ++pi)
                        if (inV[pi] != res.K && inFloor[pi] > inV[pi]) feasible = false;
                    if (!feasible) continue;
                    for (std::size_t vo = 0; vo < vectors.size(); ++vo) {
                        if (!serveOk[vo]) continue;
                        if (++work > workCap || table.entries.size() > cfg.tableCap)
                            throw std::runtime_error("portal table too large");
                        const double cost = openCost + serveCost[vo];
                        DpKey key{inV, vectors[vo]};
                        auto it = table.entries.find(key);
                        if (it == table.entries.end() || cost < it->second.cost - 1e-15) {
                            DpEntry e;
                            e.cost = cost;
                            for (int fi : openFac) e.open.push_back(pts.facilities[fi].host);
                            std::sort(e.open.begin(), e.open.end());
                            for (std::size_t ci = 0; ci < pts.clients.size(); ++ci)
                                if (outCost[ci][vo] < inRegion[ci])
                                    ++e.portalLoad[node.portals[outPortal[ci][vo]]];
                            table.entries[key] = std::move(e);
                        }
                    }
                }
            }
            res.maxTableSize = std::max(res.maxTableSize, table.entries.size());
            continue;
        }

        // Internal node: forward join over finite child entries.  The join
        // conditions pin child 2's components on every shared portal (out
        // passes through on shared parent portals; in/out swap on the new
        // separator portals), so child 2 entries are bucketed by that
        // pinned signature and only matching buckets are visited.
        const NodeTable& t1 = res.tables[node.child1];
        const NodeTable& t2 = res.tables[node.child2];
        std::map<VertexId, int> idx0, idx1, idx2;
        for (std::size_t i = 0; i < node.portals.size(); ++i) idx0[node.portals[i]] = i;
        for (std::size_t i = 0; i < t1.portals.size(); ++i) idx1[t1.portals[i]] = i;
        for (std::size_t i = 0; i < t2.portals.size(); ++i) idx2[t2.portals[i]] = i;

        // Shared portals, with their index in each child.
        std::vector<std::pair<int, int>> sharedParent, sharedNew;  // (i1, i2)
        for (const auto& [p, a] : idx1) {
            auto f2 = idx2.find(p);
            if (f2 == idx2.end()) continue;
            (idx0.count(p) ? sharedParent : sharedNew).push_back({a, f2->second});
        }

        std::map<std::vector<int>, std::vector<const std::pair<const DpKey, DpEntry>*>> buckets;
        for (const auto& kv : t2.entries) {
            std::vector<int> sig;
            for (auto [i1, i2] : sharedParent) sig.push_back(kv.first.out[i2]);
            for (auto [i1, i2] : sharedNew) {
                sig.push_back(kv.first.out[i2]);
                sig.push_back(kv.first.in[i2]);
            }
            buckets[sig].push_back(&kv);
        }

        std::size_t joinWork = 0;
        const std::size_t joinCap = 64 * cfg.tableCap;
        for (const auto& [k1, e1] : t1.entries) {
            std::vector<int> sig;
            for (auto [i1, i2] : sharedParent) sig.push_back(k1.out[i1]);
            for (auto [i1, i2] : sharedNew) {
                sig.push_back(k1.in[i1]);
                sig.push_back(k1.out[i1]);
            }
            auto bucket = buckets.find(sig);
            if (bucket == buckets.end()) continue;
            for (const auto* kv2 : bucket->second) {
                const DpKey& k2 = kv2->first;
                const DpEntry& e2 = kv2->second;
                if (++joinWork > joinCap)
                    throw std::runtime_error("portal table too large");
                bool ok = true;

                DpKey key;
                key.in.resize(node.portals.size());
                key.out.resize(node.portals.size());
                for (const auto& [p, a] : idx0) {
                    auto f1 = idx1.find(p);
                    auto f2 = idx2.find(p);
                    if (f1 != idx1.end() && f2 != idx2.end()) {
                        key.in[a] = std::min(k1.in[f1->second], k2.in[f2->second]);
                        key.out[a] = k1.out[f1->second];
                    } else if (f1 != idx1.end()) {
                        key.in[a] = k1.in[f1->second];
                        key.out[a] = k1.out[f1->second];
                    } else if (f2 != idx2.end()) {
                        key.in[a] = k2.in[f2->second];
                        key.out[a] = k2.out[f2->second];
                    } else {
                        ok = false;
                    }
                }
                if (!ok) continue;

                const double cost = e1.cost + e2.cost;
                auto it = table.entries.find(key);
                if (it == table.entries.end() || cost < it->second.cost - 1e-15) {
                    DpEntry e;
                    e.cost = cost;
                    e.open = e1.open;
                    e.open.insert(e.open.end(), e2.open.begin(), e2.open.end());
                    std::sort(e.open.begin(), e.open.end());
                    e.open.erase(std::unique(e.open.begin(), e.open.end()), e.open.end());
                    e.portalLoad = e1.portalLoad;
                    for (const auto& [p, n] : e2.portalLoad) e.portalLoad[p] += n;
                    table.entries[key] = std::move(e);
                }
                if (table.entries.size() > cfg.tableCap)
                    throw std::runtime_error("portal table too large");
            }
        }
        res.maxTableSize = std::max(res.maxTableSize, table.entries.size());
    }

    // Root has an empty boundary, so its table holds at most the one key.
    const NodeTable& rootTable = res.tables[tree.root];
    if (!tree.nodes[tree.root].portals.empty())
        throw std::logic_error("portal dp: root must have no portals");
    auto it = rootTable.entries.find(DpKey{{}, {}});
    if (it != rootTable.entries.end()) {
        res.rootCost = it->second.cost;
        res.rootEntry = it->second;
    }
    return res;
}

// Opened facilities from the root entry, re-evaluated on the true metric.
inline FLSolution extract_solution(const DpResult& dp, const SubInstanceH& H) {
    if (dp.rootCost == kInf)
        throw std::runtime_error("instance infeasible under portal discretization");
    std::set<VertexId> open(dp.rootEntry.open.begin(), dp.rootEntry.open.end());
    for (VertexId f : H.inst.freeFacilities) open.insert(f);
    if (open.empty() && !H.inst.clients.empty()) {
        // Degenerate all-out-routing root: open the overall cheapest facility.
        VertexId best = kNoVertex;
        for (const auto& [f, c] : H.inst.facilities)
            if (best == kNoVertex || c < H.inst.facilities.at(best)) best = f;
        if (best == kNoVertex) throw std::runtime_error("portal dp: no facilities");
        open.insert(best);
    }
    return evaluate(H.inst, {open.begin(), open.end()});
}

struct HSolveResult {
    FLSolution solution;
    double dpRootCost = kInf;
    int K = 0;
    int deltaPortal = 1;
    std::size_t netSize = 0;
    std::size_t treeNodes = 0;
    std::size_t maxTableSize = 0;
};

// net -> tree -> DP -> extract for one bounded instance.
inline HSolveResult solve_h(const SubInstanceH& H, const PortalDpConfig& cfg = {}) {
    const UnitDiskGraph& g = H.inst.g();
    NetGraph net = build_net(g);
    const double Gamma = H.Gamma > 0.0 ? H.Gamma : exact_diameter(g);
    DecompTree tree = build_decomp_tree(net, 0, Gamma, cfg.epsPrime);
    DpResult dp = fill_table(tree, net, H, cfg);
    HSolveResult out;
    out.solution = extract_solution(dp, H);
    out.dpRootCost = dp.rootCost;
    out.K = dp.K;
    out.deltaPortal = tree.deltaPortal;
    out.netSize = net.netVertices.size();
    out.treeNodes = tree.nodes.size();
    out.maxTableSize = dp.maxTableSize;
    return out;
}

}  // namespace udgfl
