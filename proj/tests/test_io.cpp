#include <catch2/catch_amalgamated.hpp>

#include "entres/io.hpp"

using namespace entres;

TEST_CASE("tensor json round trip with canonical term order") {
    Tensor t = lambda_state();
    Json j = tensor_to_json(t);
    CHECK(tensor_from_json(j) == t);
    // canonical order: indices strictly increasing lexicographically
    MultiIndex prev;
    for (const auto& e : j["terms"]) {
        MultiIndex idx = e["idx"].get<MultiIndex>();
        if (!prev.empty()) CHECK(prev < idx);
        prev = idx;
    }
    // digest is stable across re-serialization
    CHECK(json_digest(j) == json_digest(tensor_to_json(tensor_from_json(j))));
    // numbers are decimal strings
    CHECK(j["terms"][0]["num"].is_string());
}

TEST_CASE("hypergraph, folding and structure round trips") {
    Hypergraph g = kagome_lattice(2, 2, true);
    CHECK(hypergraph_from_json(hypergraph_to_json(g)) == g);
    Folding f = kagome_to_fan_folding(2, 2, true);
    Folding f2 = folding_from_json(folding_to_json(f));
    CHECK(f2.vertex_map == f.vertex_map);
    CHECK(f2.target_vertex_count == f.target_vertex_count);
    EntanglementStructure s = uniform_structure(fan(2), epr_triangle(2));
    CHECK(structure_from_json(structure_to_json(s)) == s);
}

TEST_CASE("catalog refs in structure files") {
    Json j;
    j["graph"] = hypergraph_to_json(fan(1));
    Json e;
    e["catalog"] = "ghz";
    e["r"] = 2;
    e["k"] = 3;
    j["edge_states"] = Json::array({e});
    EntanglementStructure s = structure_from_json(j);
    CHECK(s.edge_states[0] == ghz_state(2, 3));
    Json e2;
    e2["catalog"] = "epr_triangle";
    e2["params"] = Json::array({2});
    j["edge_states"] = Json::array({e2});
    CHECK(structure_from_json(j).edge_states[0] == epr_triangle(2));
}

TEST_CASE("map family round trips, rational and polynomial") {
    auto strassen = strassen_decomposition();
    Json jm = map_family_to_json(strassen.maps);
    LocalMapFamily back = map_family_from_json(jm);
    REQUIRE(back.size() == strassen.maps.size());
    for (size_t i = 0; i < back.size(); ++i) CHECK(back[i] == strassen.maps[i]);

    auto bini = bini_degeneration();
    Json jp = poly_map_family_to_json(bini.poly_maps);
    PolyMapFamily pback = poly_map_family_from_json(jp);
    REQUIRE(pback.size() == 3);
    for (size_t i = 0; i < 3; ++i)
        for (size_t k = 0; k < pback[i].a.size(); ++k)
            CHECK(pback[i].a[k] == bini.poly_maps[i].a[k]);
    // rational loader rejects eps-polynomial families
    CHECK_THROWS(map_family_from_json(jp));
}

TEST_CASE("covector round trip") {
    CovectorAssignment a = {{rat(1), rat(-2, 3)}, {rat(0), rat(5)}};
    CovectorAssignment b = covectors_from_json(covectors_to_json(a));
    CHECK(a == b);
}

TEST_CASE("sha256 known vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
