#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"
#include "udgfl/fl.hpp"

using namespace udgfl;
using namespace testutil;

namespace {

FLInstance tiny_instance() {
    // Path 0 - 1 - 2 with unit-ish spacing; facility at each end.
    FLInstance inst;
    inst.graph = std::make_shared<UnitDiskGraph>(
        build_udg({{0, 0, 0}, {1, 0.9, 0}, {2, 1.8, 0}}));
    inst.clients = {0, 1, 2};
    inst.facilities = {{0, 1.0}, {2, 5.0}};
    return inst;
}

}  // namespace

TEST_CASE("evaluate on a hand-checked assignment") {
    FLInstance inst = tiny_instance();
    FLSolution sol = evaluate(inst, {0});
    REQUIRE(sol.openCost == Catch::Approx(1.0));
    REQUIRE(sol.connCost == Catch::Approx(0.0 + 0.9 + 1.8));
    REQUIRE(sol.totalCost == Catch::Approx(1.0 + 2.7));
    for (const auto& [c, a] : sol.assignment) REQUIRE(a.facility == 0);
}

TEST_CASE("evaluate assigns each client to its nearest open facility") {
    Rng rng = make_rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        FLInstance inst = random_instance(rng);
        std::vector<VertexId> open;
        for (const auto& [f, c] : inst.facilities)
            if (rng_real(rng) < 0.5) open.push_back(f);
        if (open.empty()) open.push_back(inst.facilities.begin()->first);

        FLSolution sol = evaluate(inst, open);
        auto rows = facility_distance_rows(inst);
        double openSum = 0.0, connSum = 0.0;
        for (VertexId f : open) openSum += inst.opening_cost(f);
        for (VertexId c : inst.clients) {
            double d = kInf;
            for (VertexId f : open) d = std::min(d, rows[f][c]);
            REQUIRE(sol.assignment.at(c).routeCost == Catch::Approx(d).margin(1e-9));
            connSum += d;
        }
        REQUIRE(sol.openCost == Catch::Approx(openSum));
        REQUIRE(sol.connCost == Catch::Approx(connSum).margin(1e-7));
    }
}

TEST_CASE("evaluate throws when a client cannot reach any open facility") {
    FLInstance inst;
    inst.graph = std::make_shared<UnitDiskGraph>(build_udg({{0, 0, 0}, {1, 5, 0}}));
    inst.clients = {0, 1};
    inst.facilities = {{0, 1.0}};
    REQUIRE_THROWS(evaluate(inst, {0}));
}

TEST_CASE("exact_solve trivial cases") {
    FLInstance inst = tiny_instance();
    FLSolution sol = exact_solve(inst);
    // Opening only facility 0 costs 1 + 2.7 = 3.7; opening both costs
    // 6 + 0.9; opening only 2 costs 5 + 2.7. Optimum opens just 0.
    REQUIRE(sol.open == std::vector<VertexId>{0});
    REQUIRE(sol.totalCost == Catch::Approx(3.7));

    // Free facility is always open even when useless.
    inst.freeFacilities.insert(2);
    inst.facilities[2] = 0.0;
    FLSolution sol2 = exact_solve(inst);
    REQUIRE(std::find(sol2.open.begin(), sol2.open.end(), 2) != sol2.open.end());
}

TEST_CASE("exact_solve matches the branch-and-bound oracle") {
    Rng rng = make_rng(22);
    for (int trial = 0; trial < 30; ++trial) {
        RandomInstanceCfg cfg;
        cfg.n = 40;
        FLInstance inst = random_instance(rng, cfg);
        if (inst.facilities.size() > 18) continue;
        FLSolution sol = exact_solve(inst);
        REQUIRE(sol.totalCost == Catch::Approx(branch_and_bound_opt(inst)).margin(1e-7));
        // And it never beats any explicitly evaluated subset.
        std::vector<VertexId> fac;
        for (const auto& [f, c] : inst.facilities) fac.push_back(f);
        for (int k = 0; k < 100; ++k) {
            std::vector<VertexId> open;
            for (VertexId f : fac)
                if (rng_real(rng) < 0.5) open.push_back(f);
            if (open.empty()) continue;
            try {
                REQUIRE(sol.totalCost <= evaluate(inst, open).totalCost + 1e-9);
            } catch (const std::exception&) {
            }
        }
    }
}

TEST_CASE("connection cost is monotone under opening more facilities") {
    Rng rng = make_rng(23);
    FLInstance inst = random_instance(rng);
    std::vector<VertexId> fac;
    for (const auto& [f, c] : inst.facilities) fac.push_back(f);
    std::vector<VertexId> open{fac[0]};
    double prev = kInf;
    for (VertexId f : fac) {
        if (f != fac[0]) open.push_back(f);
        try {
            double conn = evaluate(inst, open).connCost;
            REQUIRE(conn <= prev + 1e-9);
            prev = conn;
        } catch (const std::exception&) {
        }
    }
}

TEST_CASE("exact_solve rejects oversized instances") {
    Rng rng = make_rng(24);
    RandomInstanceCfg cfg;
    cfg.n = 120;
    cfg.boxW = cfg.boxH = 3.0;
    cfg.facilityFrac = 0.9;
    FLInstance inst = random_instance(rng, cfg);
    REQUIRE(inst.facilities.size() > 24);
    REQUIRE_THROWS_WITH(exact_solve(inst), "instance too large for oracle");
}

TEST_CASE("validate flags malformed instances") {
    FLInstance inst = tiny_instance();
    REQUIRE_NOTHROW(inst.validate());
    inst.facilities[7] = 1.0;  // not a vertex
    REQUIRE_THROWS(inst.validate());
}
