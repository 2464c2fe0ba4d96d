#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "entres/hypergraph.hpp"
#include "entres/util.hpp"

using namespace entres;

TEST_CASE("square lattice generators") {
    Hypergraph p22 = square_lattice(2, 2, true);
    CHECK(p22.vertex_count == 4);
    CHECK(p22.edges.size() == 8);  // wrap doubles every edge
    Hypergraph o33 = square_lattice(3, 3, false);
    CHECK(o33.vertex_count == 9);
    CHECK(o33.edges.size() == 12);
    CHECK(square_lattice(2, 2, false).edges.size() == 4);
    CHECK_THROWS(square_lattice(1, 3, false));
    // determinism: identical edge lists on repeated calls
    CHECK(square_lattice(3, 4, true).edges == square_lattice(3, 4, true).edges);
}

TEST_CASE("plaquette lattice generators") {
    Hypergraph p = plaquette_square_lattice(2, 2, true);
    CHECK(p.vertex_count == 4);
    CHECK(p.edges.size() == 4);
    for (const auto& e : p.edges) {
        CHECK(e.size() == 4);
        std::vector<uint32_t> s = e;
        std::sort(s.begin(), s.end());
        CHECK(std::adjacent_find(s.begin(), s.end()) == s.end());
    }
    CHECK(plaquette_square_lattice(3, 3, false).edges.size() == 4);
    CHECK(plaquette_square_lattice(2, 2, false).edges.size() == 1);
}

TEST_CASE("kagome lattice generators") {
    // smallest open patch: two corner-sharing triangles on five sites
    Hypergraph k11 = kagome_lattice(1, 1, false);
    CHECK(k11.vertex_count == 5);
    REQUIRE(k11.edges.size() == 2);
    size_t shared = 0;
    for (uint32_t v : k11.edges[0])
        for (uint32_t w : k11.edges[1])
            if (v == w) ++shared;
    CHECK(shared == 1);
    // two triangles per unit cell with periodic boundary
    CHECK(kagome_lattice(2, 2, true).edges.size() == 2 * 2 * 2);
    for (const auto& e : kagome_lattice(2, 3, true).edges) CHECK(e.size() == 3);
}

TEST_CASE("fan") {
    CHECK(fan(1).edges.size() == 1);
    CHECK(fan(1).edges[0].size() == 3);
    Hypergraph f4 = fan(4);
    CHECK(f4.vertex_count == 6);
    CHECK(f4.edges.size() == 4);
    Hypergraph f2 = fan(2);
    CHECK(f2.edges[0][0] == f2.edges[1][0]);
    CHECK(f2.edges[0][1] == f2.edges[1][1]);
    CHECK(f2.edges[0][2] != f2.edges[1][2]);
    CHECK_THROWS(fan(0));
}

TEST_CASE("Berge acyclicity") {
    // two 3-edges sharing one vertex: acyclic
    Hypergraph share1(5, {{0, 1, 2}, {2, 3, 4}});
    CHECK(is_acyclic(share1));
    // two 3-edges sharing two vertices: not acyclic
    Hypergraph share2(4, {{0, 1, 2}, {1, 2, 3}});
    CHECK_FALSE(is_acyclic(share2));
    CHECK_FALSE(is_acyclic(fan(2)));
    // acyclic implies every pair of edges shares <= 1 vertex
    Hypergraph tree(7, {{0, 1, 2}, {2, 3, 4}, {4, 5, 6}});
    REQUIRE(is_acyclic(tree));
    for (size_t i = 0; i < tree.edges.size(); ++i)
        for (size_t j = i + 1; j < tree.edges.size(); ++j) {
            size_t shared = 0;
            for (uint32_t v : tree.edges[i])
                for (uint32_t w : tree.edges[j])
                    if (v == w) ++shared;
            CHECK(shared <= 1);
        }
}

TEST_CASE("fold collapses repeated images and composes") {
    Hypergraph tri(3, {{0, 1, 2}});
    Folding f = make_folding(2, {0, 1, 1});
    Hypergraph h = fold(tri, f);
    CHECK(h.edges[0] == std::vector<uint32_t>{0, 1});
    CHECK_THROWS(fold(tri, make_folding(3, {0, 1, 1})));  // not surjective

    Xorshift rng(31);
    for (int rep = 0; rep < 50; ++rep) {
        // random small hypergraph
        uint32_t n = 4 + rng.next_below(3);
        std::vector<std::vector<uint32_t>> edges;
        for (int e = 0; e < 3; ++e) {
            std::vector<uint32_t> edge;
            for (uint32_t v = 0; v < n; ++v)
                if (rng.next_below(2)) edge.push_back(v);
            if (edge.size() < 2) edge = {0, 1 + static_cast<uint32_t>(rng.next_below(n - 1))};
            edges.push_back(edge);
        }
        Hypergraph g(n, edges);
        // random surjective f: V -> [t], then g2: [t] -> [s]
        uint32_t t = 2 + rng.next_below(n - 1);
        std::vector<uint32_t> m1(n);
        for (uint32_t v = 0; v < n; ++v) m1[v] = v < t ? v : rng.next_below(t);
        Folding f1 = make_folding(t, m1);
        uint32_t s = 2 + rng.next_below(t > 2 ? t - 1 : 1);
        std::vector<uint32_t> m2(t);
        for (uint32_t v = 0; v < t; ++v) m2[v] = v < s ? v : rng.next_below(s);
        Folding f2 = make_folding(s, m2);
        CHECK(fold(fold(g, f1), f2) == fold(g, compose(f1, f2)));
    }
}

TEST_CASE("bipartition foldings in binary order") {
    Hypergraph g(3, {{0, 1, 2}});
    CHECK(all_bipartition_foldings(g, 100).size() == 3);
    Hypergraph g4(4, {{0, 1, 2, 3}});
    CHECK(all_bipartition_foldings(g4, 100).size() == 7);
    Hypergraph g10(10, {{0, 1}});
    auto caps = all_bipartition_foldings(g10, 100);
    CHECK(caps.size() == 100);
    // binary counting: first folding separates vertex 1 only
    CHECK(caps[0].vertex_map == std::vector<uint32_t>{0, 1, 0, 0, 0, 0, 0, 0, 0, 0});
    CHECK(caps[2].vertex_map == std::vector<uint32_t>{0, 1, 1, 0, 0, 0, 0, 0, 0, 0});
}

TEST_CASE("kagome folds onto a fan with two plaquettes per tip") {
    for (bool periodic : {false, true}) {
        uint32_t rows = 2, cols = 2;
        Hypergraph k = kagome_lattice(rows, cols, periodic);
        Folding f = kagome_to_fan_folding(rows, cols, periodic);
        Hypergraph h = fold(k, f);
        CHECK(h.vertex_count == 2 + rows * cols);
        std::map<std::vector<uint32_t>, int> counts;
        for (auto e : h.edges) {
            std::sort(e.begin(), e.end());
            counts[e]++;
        }
        CHECK(counts.size() == rows * cols);  // one tip per cell
        for (const auto& [e, c] : counts) {
            CHECK(c == 2);  // each fan edge covers two original plaquettes
            CHECK(e.size() == 3);
            CHECK(e[0] == 0);
            CHECK(e[1] == 1);
        }
    }
}

TEST_CASE("triangular lattice folds onto a fan with six plaquettes per tip") {
    Hypergraph t = triangular_lattice(3, 3, true);
    CHECK(t.edges.size() == 18);
    Folding f = triangular_to_fan_folding(3, 3);
    Hypergraph h = fold(t, f);
    std::map<std::vector<uint32_t>, int> counts;
    for (auto e : h.edges) {
        std::sort(e.begin(), e.end());
        REQUIRE(e.size() == 3);
        CHECK(e[0] == 0);
        CHECK(e[1] == 1);
        counts[e]++;
    }
    for (const auto& [e, c] : counts) CHECK(c == 6);
    CHECK(counts.size() == 3);  // three color-2 vertices on the 3x3 torus
}

TEST_CASE("half-filled triangular lattice keeps only up triangles") {
    Hypergraph h = half_filled_triangular_lattice(3, 3, false);
    CHECK(h.edges.size() == 4);
    Hypergraph full = triangular_lattice(3, 3, false);
    CHECK(full.edges.size() == 8);
}

TEST_CASE("fold_onto_edge maps everything else to the third vertex") {
    Hypergraph k = kagome_lattice(1, 2, false);
    Folding f = fold_onto_edge(k, 0, 0, 1);
    CHECK(f.target_vertex_count == 3);
    Hypergraph h = fold(k, f);
    CHECK(h.edges[0].size() == 3);
}
