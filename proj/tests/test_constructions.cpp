#include <catch2/catch_amalgamated.hpp>

#include "entres/constructions.hpp"
#include "entres/obstructions.hpp"

using namespace entres;

TEST_CASE("shipping gate: every catalog item verifies") {
    for (const auto& c : catalog_constructions()) {
        INFO(c.id);
        auto v = c.verify();
        CHECK(v.ok);
    }
}

TEST_CASE("bini degeneration details") {
    auto c = bini_degeneration();
    auto v = c.verify();
    REQUIRE(v.ok);
    CHECK(v.d == 1);
    CHECK(v.e >= 1);
    // evaluating at eps = 1 restricts onto beta plus a nonzero tail
    LocalMapFamily at_one;
    for (const auto& m : c.poly_maps) at_one.push_back(m.eval(rat(1)));
    Tensor value = apply_local_maps(ghz_state(5, 3), at_one);
    PolyTensor full = poly_apply_local_maps(ghz_state(5, 3), c.poly_maps);
    CHECK(value == full.eval(rat(1)));
    CHECK(value != bini_state());  // the tail does not cancel at eps = 1
    // interpolation gives a verified restriction from GHZ_5 (x) GHZ_{e+1}
    auto ir = interpolate_degeneration(ghz_state(5, 3), bini_state(), c.poly_maps);
    CHECK(verify_restriction(ir.source, bini_state(), ir.maps).ok);
}

TEST_CASE("ghz5-to-epr composite") {
    auto c = ghz5_to_epr();
    auto v = c.verify();
    REQUIRE(v.ok);
    // the leading tensor is exactly the target EPR arrangement, so every
    // bipartition rank matches the target's
    Tensor lead =
        poly_apply_and_leading(materialize(c.source), c.poly_maps).lead;
    Tensor target = materialize(c.target);
    REQUIRE(lead == target);
    for (const auto& left : all_party_bipartitions(4, 16))
        CHECK(flatten_rank(lead, left) == flatten_rank(target, left));
    // edge-wise impossibility: GHZ_5 vs EPR_3 (x) EPR_2 on a 2-edge pair
    Hypergraph pair_graph(3, {{0, 1}, {1, 2}});
    EntanglementStructure pairs(pair_graph, {epr_pair(3), epr_pair(2)});
    CHECK(flattening_lower_bound(ghz_state(5, 3)).ceil_bound == 5);
    CHECK(flattening_lower_bound(pairs, {{1}}).ceil_bound == 6);
}

TEST_CASE("strassen decomposition cross-checks") {
    auto c = strassen_decomposition();
    REQUIRE(c.verify().ok);
    CHECK(epr_koszul_bound(2).value == 6);              // 6 <= 7
    CHECK(flattening_lower_bound(epr_triangle(2)).ceil_bound == 4);  // 4 <= 7
}

TEST_CASE("global ghz extraction term counts") {
    auto c = global_ghz_extraction(2, 2, 2);
    auto v = c.verify();
    REQUIRE(v.ok);
    CHECK(v.source_terms == 65536);  // 16^4
    CHECK(v.target_terms == 1024);   // 2^8 * 4
    auto c1 = global_ghz_extraction(1, 2, 2);
    CHECK(c1.verify().ok);
}

TEST_CASE("epr moves") {
    auto mv = epr_move_2x2();
    CHECK(mv.verify().ok);
    auto tp = teleport_4cycle();
    CHECK(tp.verify().ok);
    // no shared vertex: no local route
    Hypergraph g(6, {{0, 1}, {2, 3}, {4, 5}});
    EntanglementStructure s = uniform_structure(g, epr_pair(2));
    CHECK_THROWS_WITH(epr_move(s, 0, 0, 1, 1), "no local route");
}

TEST_CASE("border subrank of the EPR triangle") {
    CHECK(border_subrank_epr(1) == 1);
    CHECK(border_subrank_epr(2) == 3);
    CHECK(border_subrank_epr(3) == 7);
    for (uint64_t d = 1; d <= 10; ++d) {
        CHECK(border_subrank_epr(d) == (3 * d * d + 3) / 4);
        CHECK(border_subrank_epr(d) <= d * d);  // below the asymptotic value
    }
}

TEST_CASE("sublattice conversion bound") {
    auto s = sublattice_conversion_bound(3, 2, 7);
    CHECK(s.r == 21);
    CHECK(s.feasible);
    auto s2 = sublattice_conversion_bound(2, 2, 7);
    CHECK_FALSE(s2.feasible);
    auto s3 = sublattice_conversion_bound(7, 3, 11);
    CHECK(s3.r == 77);
    CHECK(s3.feasible);
}

TEST_CASE("tetrahedron conversion bound") {
    auto t4 = tetrahedron_conversion_bound(4);
    CHECK(t4.single_plaquette_r == 12);
    CHECK(t4.lattice_r == 13);
    auto t2 = tetrahedron_conversion_bound(2);
    CHECK(t2.single_plaquette_r == 3);
    CHECK(t2.lattice_r == 3);
    auto t1 = tetrahedron_conversion_bound(1);
    CHECK(t1.single_plaquette_r == 1);
    CHECK(t1.lattice_r == 1);
}

TEST_CASE("known rank table") {
    CHECK(known_rank_lookup("w_g4")->value == 8);
    CHECK(known_rank_lookup("w_g3")->value == 7);
    CHECK(known_rank_lookup("epr2_triangle")->value == 7);
    CHECK(known_rank_lookup("w_g5")->value == 8);
    CHECK(known_rank_lookup("w_g6")->value == 8);
    CHECK_FALSE(known_rank_lookup("nonsense").has_value());
    for (const auto& e : known_rank_table())
        CHECK(e.provenance.find("[known value]") != std::string::npos);
}

TEST_CASE("folding chain consistency for the W pair arrangements") {
    // implemented lower bounds respect the folding chain G6 -> G5 -> G4 -> G3
    std::vector<Integer> lb;
    for (uint32_t shared : {0u, 1u, 2u, 3u}) {
        EntanglementStructure s = w_pair_structure(shared);
        Tensor t = materialize(s);
        RankBounds rb = rank_bounds(t);
        lb.push_back(rb.lower);
    }
    CHECK(lb[0] >= lb[1]);
    CHECK(lb[1] >= lb[2]);
    CHECK(lb[2] >= lb[3]);
    // and all implemented bounds stay below the known values (8,8,8,7)
    CHECK(lb[0] <= 8);
    CHECK(lb[3] <= 7);
}

TEST_CASE("w pair structures have the right shapes") {
    CHECK(w_pair_structure(0).graph.vertex_count == 6);
    CHECK(w_pair_structure(1).graph.vertex_count == 5);
    CHECK(w_pair_structure(2).graph.vertex_count == 4);
    CHECK(w_pair_structure(3).graph.vertex_count == 3);
    CHECK(materialize(w_pair_structure(3)) == kron(w_state(), w_state()));
    CHECK(materialize(w_pair_structure(0)) == tensor_product(w_state(), w_state()));
}
