#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "udgfl/baseline.hpp"
#include "udgfl/fl.hpp"

// Client filtering against cluster avgcost bounds, the aspect-ratio
// partition into structured sub-instances, and the merge of sub-solutions
// back into a solution for the original instance.

namespace udgfl {

struct CreditEntry {
    VertexId client;
    VertexId facility;  // pre-assigned anchor
    double routeCost;   // true d_G(client, facility)
};

struct CreditLedger {
    std::vector<CreditEntry> entries;
    std::set<VertexId> anchors;  // anchors owed an opening charge

    // Cost credited on top of a solution R for I': routed clients plus the
    // opening cost of any charged anchor R did not open itself.
    double total_for(const FLInstance& inst, const std::vector<VertexId>& open) const {
        double s = 0.0;
        for (const auto& e : entries) s += e.routeCost;
        std::set<VertexId> opened(open.begin(), open.end());
        for (VertexId a : anchors)
            if (!opened.count(a)) s += inst.opening_cost(a);
        return s;
    }
};

struct StructuredSubInstance {
    FLInstance inst;
    std::vector<VertexId> anchors;  // D-tilde members owning its clusters
    double N = 0.0;                 // min client-anchor distance
    double r = 0.0;                 // configured aspect-ratio bound
    double minAvg = 0.0, maxAvg = 0.0;
    double maxAnchorDist = 0.0;            // max d(j, anchor(j)) over clients
    std::map<VertexId, VertexId> anchorOf; // client -> owning anchor
    std::map<VertexId, double> anchorDist; // client -> d_G(client, anchor)
};

inline double aspect_ratio_bound(double eps) {
    const double k = std::ceil(1.0 / (eps * eps));
    return std::min(std::pow(eps, -k), 1e6);
}

// Drops every client violating eps^2*avg <= d(j, anchor) <= avg/eps^2 into
// the ledger, pre-assigned to its anchor at its true distance.
inline std::pair<FLInstance, CreditLedger> filter_clients(const FLInstance& inst,
                                                          const BaselineResult& base,
                                                          double eps) {
    CreditLedger ledger;
    FLInstance iprime = inst;
    iprime.clients.clear();
    const double e2 = eps * eps;
    for (const auto& [anchor, cl] : base.cluster) {
        const double avg = base.avgcost.at(anchor);
        auto dist = multi_source_dist(inst.g(), {anchor});
        for (VertexId j : cl) {
            const double d = dist[j];
            if (d < e2 * avg || d > avg / e2) {
                ledger.entries.push_back({j, anchor, d});
                ledger.anchors.insert(anchor);
            } else {
                iprime.clients.push_back(j);
            }
        }
    }
    std::sort(iprime.clients.begin(), iprime.clients.end());
    return {iprime, ledger};
}

// Sorts anchors by avgcost and cuts at multiplicative gaps above 1/eps^2.
// Every anchor group becomes one sub-instance: its surviving cluster
// clients, and every facility within eps^-2 * (group max avgcost) of some
// anchor.  Aspect bound r is asserted per group.
inline std::vector<StructuredSubInstance> partition_by_aspect(const FLInstance& iprime,
                                                              const BaselineResult& base,
                                                              double eps) {
    std::set<VertexId> alive(iprime.clients.begin(), iprime.clients.end());
    struct AnchorInfo {
        VertexId id;
        double avg;
        std::vector<VertexId> clients;
    };
    std::vector<AnchorInfo> anchors;
    for (const auto& [a, cl] : base.cluster) {
        AnchorInfo info{a, base.avgcost.at(a), {}};
        for (VertexId c : cl)
            if (alive.count(c)) info.clients.push_back(c);
        if (!info.clients.empty()) anchors.push_back(info);
    }
    std::sort(anchors.begin(), anchors.end(), [](const AnchorInfo& a, const AnchorInfo& b) {
        if (a.avg != b.avg) return a.avg < b.avg;
        return a.id < b.id;
    });

    const double gap = 1.0 / (eps * eps);
    const double rBound = aspect_ratio_bound(eps);
    std::vector<StructuredSubInstance> subs;
    std::size_t i = 0;
    while (i < anchors.size()) {
        std::size_t j = i + 1;
        while (j < anchors.size()) {
            const double lo = anchors[j - 1].avg, hi = anchors[j].avg;
            if (lo == 0.0 ? hi > 0.0 : hi / lo > gap) break;
            ++j;
        }
        StructuredSubInstance sub;
        sub.inst.graph = iprime.graph;
        sub.r = rBound;
        sub.minAvg = anchors[i].avg;
        sub.maxAvg = anchors[j - 1].avg;
        if (sub.minAvg > 0.0 && sub.maxAvg / sub.minAvg > rBound)
            throw std::runtime_error("aspect partition failed");

        std::vector<VertexId> anchorIds;
        sub.N = kInf;
        for (std::size_t k = i; k < j; ++k) {
            anchorIds.push_back(anchors[k].id);
            auto dist = multi_source_dist(iprime.g(), {anchors[k].id});
            for (VertexId c : anchors[k].clients) {
                sub.inst.clients.push_back(c);
                sub.N = std::min(sub.N, dist[c]);
                sub.maxAnchorDist = std::max(sub.maxAnchorDist, dist[c]);
                sub.anchorOf[c] = anchors[k].id;
                sub.anchorDist[c] = dist[c];
            }
        }
        std::sort(sub.inst.clients.begin(), sub.inst.clients.end());
        std::sort(anchorIds.begin(), anchorIds.end());
        sub.anchors = anchorIds;
        if (sub.N == kInf) sub.N = 0.0;

        const double radius = sub.maxAvg / (eps * eps);
        auto reach = multi_source_dist(iprime.g(), anchorIds, radius);
        for (const auto& [f, cost] : iprime.facilities)
            if (reach[f] <= radius) sub.inst.facilities[f] = cost;
        for (VertexId a : anchorIds) sub.inst.facilities[a] = iprime.facilities.at(a);
        subs.push_back(std::move(sub));
        i = j;
    }
    return subs;
}

// D = union of sub-solution open sets plus the ledgered anchors, then an
// exact nearest-facility re-evaluation on the original instance.
inline FLSolution merge_solutions(
    const std::vector<std::pair<const StructuredSubInstance*, FLSolution>>& subs,
    const CreditLedger& ledger, const FLInstance& originalInst) {
    std::set<VertexId> open;
    for (const auto& [sub, sol] : subs)
        for (VertexId f : sol.open) open.insert(f);
    for (VertexId a : ledger.anchors) open.insert(a);
    if (open.empty() && !originalInst.clients.empty())
        throw std::runtime_error("merge_solutions: nothing to open");
    return evaluate(originalInst, {open.begin(), open.end()});
}

// Extends a solution R for I' back to the original instance with the
// ledgered clients served by their pre-assigned anchors; the cost identity
//   cost(extended) = cost_{I'}(R) + ledger.total_for(R)
// holds by construction.
inline FLSolution extend_with_ledger(const FLInstance& originalInst, const FLInstance& iprime,
                                     const std::vector<VertexId>& open,
                                     const CreditLedger& ledger) {
    FLSolution base = evaluate(iprime, open);
    std::set<VertexId> allOpen(open.begin(), open.end());
    for (VertexId a : ledger.anchors) allOpen.insert(a);
    FLSolution out;
    out.open.assign(allOpen.begin(), allOpen.end());
    for (VertexId f : out.open) out.openCost += originalInst.opening_cost(f);
    out.assignment = base.assignment;
    out.connCost = base.connCost;
    for (const auto& e : ledger.entries) {
        out.assignment[e.client] = {e.facility, e.routeCost};
        out.connCost += e.routeCost;
    }
    out.totalCost = out.openCost + out.connCost;
    return out;
}

}  // namespace udgfl
