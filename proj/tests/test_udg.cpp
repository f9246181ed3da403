#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"
#include "udgfl/udg.hpp"

using namespace udgfl;
using namespace testutil;

TEST_CASE("build_udg basic edge rule") {
    std::vector<Point> pts{{0, 0, 0}, {1, 0.5, 0}, {2, 2, 0}};
    UnitDiskGraph g = build_udg(pts);
    REQUIRE(g.has_edge(0, 1));
    REQUIRE(g.adjacency[0][0].w == Catch::Approx(0.5));
    REQUIRE_FALSE(g.has_edge(1, 2));  // 1.5 > 1
    REQUIRE(g.numComponents == 2);
}

TEST_CASE("build_udg singleton") {
    UnitDiskGraph g = build_udg({{0, 0, 0}});
    REQUIRE(g.n() == 1);
    REQUIRE(g.edge_count() == 0);
}

TEST_CASE("build_udg rejects coincident points") {
    REQUIRE_THROWS_WITH(build_udg({{0, 1, 1}, {1, 1, 1}}), "coincident points");
}

TEST_CASE("build_udg matches brute-force all-pairs filter") {
    Rng rng = make_rng(11);
    auto pts = random_points(rng, 200, 10.0, 10.0);
    UnitDiskGraph g = build_udg(pts);
    auto oracle = brute_force_edges(pts);
    std::set<std::pair<VertexId, VertexId>> got;
    for (VertexId u = 0; u < g.n(); ++u)
        for (const Edge& e : g.adjacency[u]) {
            REQUIRE(g.has_edge(e.to, u));  // symmetry
            REQUIRE(e.w > 0.0);
            REQUIRE(e.w <= std::sqrt(kEdgeSqThreshold));
            if (u < e.to) got.insert({u, e.to});
        }
    REQUIRE(got == oracle);
}

TEST_CASE("weighted_sssp chain and disconnection") {
    UnitDiskGraph g = build_udg({{0, 0, 0}, {1, 0.9, 0}, {2, 1.8, 0}});
    DistanceField f = weighted_sssp(g, 0);
    REQUIRE(f.weightedDist[2] == Catch::Approx(1.8));

    UnitDiskGraph g2 = build_udg({{0, 0, 0}, {1, 5, 0}});
    REQUIRE(weighted_sssp(g2, 0).weightedDist[1] == kInf);
}

TEST_CASE("weighted_sssp matches Bellman-Ford oracle") {
    Rng rng = make_rng(12);
    UnitDiskGraph g = build_udg(random_points(rng, 100, 5.0, 5.0));
    DistanceField f = weighted_sssp(g, 0);
    auto oracle = bellman_ford(g, 0);
    for (VertexId v = 0; v < g.n(); ++v) {
        if (oracle[v] == kInf)
            REQUIRE(f.weightedDist[v] == kInf);
        else
            REQUIRE(f.weightedDist[v] == Catch::Approx(oracle[v]).margin(1e-9));
    }
    // Triangle condition across every edge.
    for (VertexId u = 0; u < g.n(); ++u)
        for (const Edge& e : g.adjacency[u])
            if (f.weightedDist[u] < kInf)
                REQUIRE(f.weightedDist[e.to] <= f.weightedDist[u] + e.w + 1e-12);
}

TEST_CASE("hop_bfs basics") {
    UnitDiskGraph path = build_udg({{0, 0, 0}, {1, 0.9, 0}, {2, 1.8, 0}});
    REQUIRE(hop_bfs(path, 0).hopDist[2] == 2);

    // Star: center 0, five leaves at distance < 1.
    std::vector<Point> star{{0, 0, 0}};
    for (int i = 1; i <= 5; ++i)
        star.push_back({i, 0.8 * std::cos(i), 0.8 * std::sin(i)});
    UnitDiskGraph g = build_udg(star);
    DistanceField f = hop_bfs(g, 0);
    for (int i = 1; i <= 5; ++i) REQUIRE(f.hopDist[i] == 1);
}

TEST_CASE("hop and weighted distances sandwich each other") {
    Rng rng = make_rng(13);
    UnitDiskGraph g = random_connected_udg(rng, 150, 6.0, 6.0);
    DistanceField w = weighted_sssp(g, 0);
    DistanceField h = hop_bfs(g, 0);
    for (VertexId v = 0; v < g.n(); ++v) {
        REQUIRE(w.weightedDist[v] <= h.hopDist[v] + 1e-12);
        REQUIRE(h.hopDist[v] <= 2.0 * w.weightedDist[v] + 1.0 + 1e-12);
    }
}

TEST_CASE("BFS level gap lower-bounds weighted distance") {
    // hop(v) <= hop(u) + 2 d(u,v) + 1, so a level gap of D forces
    // d(u,v) >= (D - 1) / 2.
    Rng rng = make_rng(14);
    UnitDiskGraph g = random_connected_udg(rng, 120, 8.0, 2.0);
    DistanceField h = hop_bfs(g, 0);
    int checked = 0;
    for (VertexId u = 0; u < g.n() && u <= 40; ++u) {
        DistanceField w = weighted_sssp(g, u);
        for (VertexId v = 0; v < g.n(); ++v) {
            const double gap = std::abs(h.hopDist[v] - h.hopDist[u]);
            if (gap >= 2) {
                REQUIRE(w.weightedDist[v] >= (gap - 1.0) / 2.0 - 1e-12);
                ++checked;
            }
        }
    }
    REQUIRE(checked > 0);
}

TEST_CASE("weak_diameter trivial cases and oracle") {
    Rng rng = make_rng(15);
    UnitDiskGraph g = random_connected_udg(rng, 80, 5.0, 5.0);
    REQUIRE(weak_diameter({0}, g) == 0.0);

    UnitDiskGraph pair = build_udg({{0, 0, 0}, {1, 0.7, 0}});
    REQUIRE(weak_diameter({0, 1}, pair) == Catch::Approx(0.7));

    // Annulus-like subset: all vertices at weighted distance in [1, 2] of 0.
    DistanceField f = weighted_sssp(g, 0);
    std::vector<VertexId> subset;
    for (VertexId v = 0; v < g.n(); ++v)
        if (f.weightedDist[v] >= 1.0 && f.weightedDist[v] <= 2.0) subset.push_back(v);
    if (subset.size() >= 2) {
        double oracle = 0.0;
        for (VertexId a : subset) {
            auto d = bellman_ford(g, a);
            for (VertexId b : subset) oracle = std::max(oracle, d[b]);
        }
        REQUIRE(weak_diameter(subset, g) == Catch::Approx(oracle).margin(1e-9));
    }
}

TEST_CASE("r_neighborhood") {
    UnitDiskGraph chain = build_udg({{0, 0, 0}, {1, 1, 0}, {2, 2, 0}});
    REQUIRE(r_neighborhood(chain, {0}, 0.0) == std::vector<VertexId>{0});
    REQUIRE(r_neighborhood(chain, {0}, 1.0) == std::vector<VertexId>{0, 1});

    Rng rng = make_rng(16);
    UnitDiskGraph g = random_connected_udg(rng, 100, 6.0, 6.0);
    auto got = r_neighborhood(g, {0, 3}, 3.0);
    auto d0 = bellman_ford(g, 0);
    auto d3 = bellman_ford(g, 3);
    std::vector<VertexId> oracle;
    for (VertexId v = 0; v < g.n(); ++v)
        if (std::min(d0[v], d3[v]) <= 3.0) oracle.push_back(v);
    REQUIRE(got == oracle);
}

TEST_CASE("induced sub-UDG equals induced subgraph") {
    Rng rng = make_rng(17);
    UnitDiskGraph g = random_connected_udg(rng, 90, 5.0, 5.0);
    std::vector<VertexId> subset;
    for (VertexId v = 0; v < g.n(); v += 2) subset.push_back(v);
    InducedUdg sub = induce_udg(g, subset);
    for (VertexId a = 0; a < sub.graph.n(); ++a)
        for (VertexId b = 0; b < sub.graph.n(); ++b)
            if (a != b)
                REQUIRE(sub.graph.has_edge(a, b) == g.has_edge(sub.toHost[a], sub.toHost[b]));
}
