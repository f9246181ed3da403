#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"
#include "udgfl/box_ptas.hpp"

using namespace udgfl;
using namespace testutil;

namespace {

// Greedy facility net: cheapest-first, add while farther than eps from the
// net in the graph metric.
std::vector<VertexId> greedy_net(const FLInstance& inst, const std::vector<VertexId>& dstar,
                                 double eps) {
    std::vector<VertexId> order = dstar;
    std::sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
        const double ca = inst.opening_cost(a), cb = inst.opening_cost(b);
        return ca < cb || (ca == cb && a < b);
    });
    std::vector<VertexId> net;
    for (VertexId f : order) {
        const double d = net.empty() ? kInf : multi_source_dist(inst.g(), net)[f];
        if (d > eps) net.push_back(f);
    }
    return net;
}

double independent_pcfl_opt(const PCFLInstance& p, const UnitDiskGraph& g) {
    std::vector<VertexId> fac;
    for (const auto& [f, c] : p.facilities) fac.push_back(f);
    double best = kInf;
    for (std::uint64_t mask = 0; mask < (1ULL << fac.size()); ++mask) {
        double cost = 0.0;
        for (std::size_t i = 0; i < fac.size(); ++i)
            if (mask & (1ULL << i)) cost += p.facilities.at(fac[i]);
        for (VertexId c : p.clients) {
            double t = p.penalty.at(c);
            for (std::size_t i = 0; i < fac.size(); ++i)
                if (mask & (1ULL << i))
                    t = std::min(t, euclid(g.points[c], g.points[fac[i]]));
            cost += t;
        }
        best = std::min(best, cost);
    }
    return best;
}

}  // namespace

TEST_CASE("candidate net enumeration counts") {
    std::vector<VertexId> F{3, 7, 9};
    REQUIRE(enumerate_candidate_nets(F, 1, 1000).size() == 4);  // empty + singletons
    REQUIRE(enumerate_candidate_nets(F, 3, 1000).size() == 8);
    REQUIRE(enumerate_candidate_nets(F, 99, 1000).size() == 8);

    // Binomial-sum oracle for a larger case: 1 + 6 + 15 + 20.
    std::vector<VertexId> F6{0, 1, 2, 3, 4, 5};
    auto nets = enumerate_candidate_nets(F6, 3, 1000);
    REQUIRE(nets.size() == 42);
    std::set<std::vector<VertexId>> uniq;
    for (auto n : nets) {
        std::sort(n.begin(), n.end());
        REQUIRE(n.size() <= 3);
        REQUIRE(uniq.insert(n).second);
    }

    REQUIRE_THROWS_AS(enumerate_candidate_nets(F6, 3, 41), std::runtime_error);
}

TEST_CASE("shifted grid partitions points into adjacent cells") {
    UnitDiskGraph one = build_udg({{0, 1.3, 2.7}});
    Rng rng = make_rng(91);
    GridPartition g1 = make_grid(one, rng);
    REQUIRE(g1.cells.size() == 1);

    // Two points 2 apart can never share a 1/2-cell.
    UnitDiskGraph two = build_udg({{0, 0, 0}, {1, 2, 0}});
    for (int t = 0; t < 50; ++t) {
        GridPartition g2 = make_grid(two, rng);
        REQUIRE(g2.cells.size() == 2);
    }

    REQUIRE_THROWS_AS(make_grid(two, 0.5, 0.0), std::invalid_argument);

    for (int t = 0; t < 5; ++t) {
        UnitDiskGraph g = random_connected_udg(rng, 150, 4.0, 4.0);
        GridPartition grid = make_grid(g, rng);
        std::size_t covered = 0;
        for (const auto& [idx, cell] : grid.cells) {
            covered += cell.size();
            double xLo = kInf, xHi = -kInf, yLo = kInf, yHi = -kInf;
            for (VertexId v : cell) {
                xLo = std::min(xLo, g.points[v].x);
                xHi = std::max(xHi, g.points[v].x);
                yLo = std::min(yLo, g.points[v].y);
                yHi = std::max(yHi, g.points[v].y);
            }
            REQUIRE(xHi - xLo <= 0.5);
            REQUIRE(yHi - yLo <= 0.5);
            // ... so every intra-cell pair is UDG-adjacent.
            for (VertexId a : cell)
                for (VertexId b : cell)
                    if (a < b) REQUIRE(sq_dist(g.points[a], g.points[b]) <= kEdgeSqThreshold);
        }
        REQUIRE(covered == static_cast<std::size_t>(g.n()));
    }
}

TEST_CASE("grid cut probability obeys the per-axis union bound") {
    Rng rng = make_rng(92);
    const int offsets = 2000;
    for (int pair = 0; pair < 10; ++pair) {
        Point p{0, rng_real(rng, 0.0, 3.0), rng_real(rng, 0.0, 3.0)};
        Point q{1, p.x + rng_real(rng, -0.45, 0.45), p.y + rng_real(rng, -0.45, 0.45)};
        UnitDiskGraph g = build_udg({p, q});
        int cut = 0;
        for (int t = 0; t < offsets; ++t) {
            GridPartition grid = make_grid(g, rng);
            if (grid.cells.size() == 2) ++cut;
        }
        const double freq = static_cast<double>(cut) / offsets;
        const double dx = std::abs(p.x - q.x), dy = std::abs(p.y - q.y);
        // Exact cut probability: each axis is cut when a grid line of period
        // 1/2 lands in the gap, and the two axes are independent.
        const double px = std::min(1.0, 2.0 * dx), py = std::min(1.0, 2.0 * dy);
        const double exact = px + py - px * py;
        const double sigma = std::sqrt(exact * (1.0 - exact) / offsets);
        REQUIRE(freq <= exact + 3.0 * sigma + 1e-12);
        REQUIRE(freq >= exact - 3.0 * sigma - 1e-12);
        // Provable distance bound (the per-axis union).
        REQUIRE(freq <= 2.0 * (dx + dy) + 3.0 * sigma + 1e-12);
    }
}

TEST_CASE("per-cell penalties equal graph distance to the net") {
    Rng rng = make_rng(93);
    for (int trial = 0; trial < 5; ++trial) {
        RandomInstanceCfg cfg;
        cfg.n = 80;
        cfg.boxW = cfg.boxH = 4.0;
        FLInstance inst = random_instance(rng, cfg);
        std::vector<VertexId> netVec;
        for (const auto& [f, c] : inst.facilities)
            if (rng_real(rng) < 0.4) netVec.push_back(f);
        std::set<VertexId> net(netVec.begin(), netVec.end());
        std::vector<double> distToNet =
            netVec.empty() ? std::vector<double>(inst.g().n(), kInf)
                           : multi_source_dist(inst.g(), netVec);
        GridPartition grid = make_grid(inst.g(), rng);
        for (const auto& [idx, cell] : grid.cells) {
            PCFLInstance p = build_pcfl(cell, net, distToNet, inst);
            for (VertexId c : p.clients) {
                double want = kInf;  // per-client sssp oracle
                for (VertexId f : netVec)
                    want = std::min(want, weighted_sssp(inst.g(), f).weightedDist[c]);
                if (want == kInf)
                    REQUIRE(p.penalty.at(c) == kInf);
                else
                    REQUIRE(p.penalty.at(c) == Catch::Approx(want).margin(1e-9));
            }
            for (const auto& [f, cost] : p.facilities) {
                if (net.count(f))
                    REQUIRE(cost == 0.0);
                else
                    REQUIRE(cost == inst.opening_cost(f));
            }
        }
    }
}

TEST_CASE("cell prize-collecting solver") {
    UnitDiskGraph g = build_udg({{0, 0.1, 0.1}, {1, 0.2, 0.1}});

    SECTION("cheap penalty beats an expensive facility") {
        PCFLInstance p;
        p.clients = {0};
        p.facilities = {{1, 5.0}};
        p.penalty = {{0, 0.1}};
        PCFLSolution s = solve_pcfl(p, g);
        REQUIRE(s.cost == Catch::Approx(0.1));
        REQUIRE(s.open.empty());
        REQUIRE(s.penalized == std::set<VertexId>{0});
    }

    SECTION("free collocated facility serves everything") {
        PCFLInstance p;
        p.clients = {0};
        p.facilities = {{0, 0.0}};
        p.penalty = {{0, kInf}};
        PCFLSolution s = solve_pcfl(p, g);
        REQUIRE(s.cost == Catch::Approx(0.0));
        REQUIRE(s.open == std::vector<VertexId>{0});
    }

    SECTION("no facility and infinite penalty is infeasible") {
        PCFLInstance p;
        p.clients = {0};
        p.penalty = {{0, kInf}};
        REQUIRE_THROWS_AS(solve_pcfl(p, g), std::runtime_error);
    }

    SECTION("exact mode equals an independent enumerator; local search is sane") {
        Rng rng = make_rng(94);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<Point> pts;
            const int n = static_cast<int>(rng_int(rng, 2, 10));
            for (int i = 0; i < n; ++i)
                pts.push_back({i, rng_real(rng, 0.0, 0.5), rng_real(rng, 0.0, 0.5)});
            UnitDiskGraph cg = build_udg(pts);
            PCFLInstance p;
            for (VertexId v = 0; v < cg.n(); ++v) {
                if (rng_real(rng) < 0.5) {
                    p.clients.push_back(v);
                    p.penalty[v] = rng_real(rng, 0.0, 1.5);
                }
                if (rng_real(rng) < 0.5) p.facilities[v] = rng_real(rng, 0.0, 2.0);
            }
            PCFLSolution ex = solve_pcfl(p, cg);
            REQUIRE(ex.cost == Catch::Approx(independent_pcfl_opt(p, cg)).margin(1e-9));
            PCFLSolution ls = solve_pcfl(p, cg, 0);  // force local-search mode
            REQUIRE(ls.cost >= ex.cost - 1e-9);
            REQUIRE(ls.cost < kInf);
        }
    }
}

TEST_CASE("greedy facility nets are well packed and cover the optimum") {
    Rng rng = make_rng(95);
    for (int trial = 0; trial < 10; ++trial) {
        RandomInstanceCfg cfg;
        cfg.n = 60;
        cfg.boxW = cfg.boxH = 3.0;
        FLInstance inst = random_instance(rng, cfg);
        std::vector<VertexId> dstar;
        for (const auto& [f, c] : inst.facilities) dstar.push_back(f);
        const double eps = 0.5;
        std::vector<VertexId> net = greedy_net(inst, dstar, eps);

        // Pairwise spacing >= eps (graph distance dominates Euclidean).
        for (VertexId a : net)
            for (VertexId b : net)
                if (a < b) REQUIRE(euclid(inst.g().points[a], inst.g().points[b]) >= eps);
        // Coverage: nothing in D* is farther than eps from the net.
        std::vector<double> d = multi_source_dist(inst.g(), net);
        for (VertexId f : dstar) REQUIRE(d[f] <= eps + 1e-12);
        // Packing bound: interior-disjoint eps/2 balls inside an (L+eps) square.
        const double L = 3.0;
        REQUIRE(static_cast<double>(net.size()) <=
                (L + eps) * (L + eps) / (3.141592653589793 * eps * eps / 4.0));
    }
}

TEST_CASE("per-cell prize-collecting cost bound against the optimum") {
    Rng rng = make_rng(96);
    const double eps = 0.5;
    for (int trial = 0; trial < 20; ++trial) {
        RandomInstanceCfg cfg;
        cfg.n = 40;
        cfg.boxW = cfg.boxH = 3.0;
        cfg.facilityFrac = 0.35;
        FLInstance inst = random_instance(rng, cfg);
        if (inst.facilities.size() > 12) continue;
        FLSolution opt = exact_solve(inst);

        std::vector<VertexId> net = greedy_net(inst, opt.open, eps);
        std::set<VertexId> netSet(net.begin(), net.end());
        std::vector<double> distToNet = multi_source_dist(inst.g(), net);
        GridPartition grid = make_grid(inst.g(), rng);

        auto cellOf = [&](VertexId v) {
            const Point& p = inst.g().points[v];
            return std::make_pair(static_cast<int>(std::floor(2.0 * (p.x - grid.ox))),
                                  static_cast<int>(std::floor(2.0 * (p.y - grid.oy))));
        };
        for (const auto& [idx, cell] : grid.cells) {
            PCFLInstance p = build_pcfl(cell, netSet, distToNet, inst);
            if (p.clients.empty()) continue;
            const double got = solve_pcfl(p, inst.g()).cost;
            // Budget: optimum facilities of the cell outside the net, the
            // optimum connection costs, and eps per cut client.
            double budget = 0.0;
            for (VertexId f : opt.open)
                if (cellOf(f) == idx && !netSet.count(f)) budget += inst.opening_cost(f);
            for (VertexId c : p.clients) {
                const Assignment& a = opt.assignment.at(c);
                budget += a.routeCost;
                if (cellOf(a.facility) != idx) budget += eps;
            }
            REQUIRE(got <= budget + 1e-9);
        }
    }
}

TEST_CASE("bounded-box solver on oracle-solvable instances") {
    Rng rng = make_rng(97);
    BoxPtasConfig cfg;
    cfg.gridTrials = 4;
    double worst = 1.0;
    int solved = 0;
    for (int trial = 0; trial < 30 && solved < 12; ++trial) {
        RandomInstanceCfg icfg;
        icfg.n = 26;
        icfg.boxW = icfg.boxH = 3.0;
        icfg.facilityFrac = 0.3;
        FLInstance inst = random_instance(rng, icfg);
        if (inst.facilities.size() > 8) continue;
        ++solved;
        const double opt = exact_solve(inst).totalCost;
        BoxPtasResult r = solve_bounded(inst, 0.5, rng, cfg);
        REQUIRE(r.solution.totalCost >= opt - 1e-9);
        worst = std::max(worst, r.solution.totalCost / opt);
        for (VertexId c : inst.clients) REQUIRE(r.solution.assignment.count(c) == 1);
    }
    REQUIRE(solved >= 12);
    INFO("worst ratio " << worst);
    REQUIRE(worst <= 1.05);  // calibrated; theory allows 1 + O(eps)
}

TEST_CASE("bounded-box solver trivial cases and determinism") {
    // One facility: forced answer, cost equals evaluate.
    std::vector<Point> pts{{0, 0.2, 0.2}, {1, 0.7, 0.4}, {2, 1.1, 0.3}};
    FLInstance inst;
    inst.graph = std::make_shared<UnitDiskGraph>(build_udg(pts));
    inst.clients = {0, 2};
    inst.facilities = {{1, 0.8}};
    Rng rng = make_rng(98);
    BoxPtasResult r = solve_bounded(inst, 0.5, rng);
    REQUIRE(r.solution.open == std::vector<VertexId>{1});
    REQUIRE(r.solution.totalCost == Catch::Approx(evaluate(inst, {1}).totalCost));

    // No clients: nothing to do.
    FLInstance empty = inst;
    empty.clients.clear();
    Rng rng2 = make_rng(98);
    REQUIRE(solve_bounded(empty, 0.5, rng2).solution.totalCost == 0.0);

    Rng ra = make_rng(99), rb = make_rng(99);
    RandomInstanceCfg icfg;
    icfg.n = 20;
    icfg.boxW = icfg.boxH = 2.5;
    FLInstance rnd = random_instance(ra, icfg);
    FLInstance rnd2 = rnd;
    BoxPtasConfig cfg;
    cfg.gridTrials = 4;
    Rng sa = make_rng(100), sb = make_rng(100);
    BoxPtasResult a = solve_bounded(rnd, 0.5, sa, cfg);
    BoxPtasResult b = solve_bounded(rnd2, 0.5, sb, cfg);
    REQUIRE(a.solution.open == b.solution.open);
    REQUIRE(a.solution.totalCost == b.solution.totalCost);
}
