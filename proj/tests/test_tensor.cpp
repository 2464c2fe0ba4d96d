#include <catch2/catch_amalgamated.hpp>

#include "entres/obstructions.hpp"
#include "entres/structure.hpp"
#include "entres/tensor.hpp"
#include "entres/util.hpp"

using namespace entres;

namespace {

Tensor random_tensor(Xorshift& rng, std::vector<uint32_t> dims, size_t terms) {
    Tensor t(dims);
    for (size_t i = 0; i < terms; ++i) {
        MultiIndex idx(dims.size());
        for (size_t p = 0; p < dims.size(); ++p)
            idx[p] = static_cast<uint32_t>(rng.next_below(dims[p]));
        t.add_term(idx, rat(rng.next_int(-5, 5)));
    }
    if (t.is_zero()) t.add_term(MultiIndex(dims.size(), 0), rat(1));
    return t;
}

}  // namespace

TEST_CASE("kron composes diagonal supports") {
    CHECK(kron(ghz_state(2, 3), ghz_state(3, 3)) == ghz_state(6, 3));
    CHECK(kron(epr_pair(2), epr_pair(2)) == epr_pair(4));
    Tensor ww = kron(w_state(), w_state());
    CHECK(ww.term_count() == 9);
    CHECK(ww.dims == std::vector<uint32_t>{4, 4, 4});
    // kron of EPR triangles is the level-4 triangle up to interleaving the
    // two-qubit pairs inside each party
    Matrix interleave = permutation_matrix({2, 2, 2, 2}, {0, 2, 1, 3});
    Tensor e22 = apply_local_maps(kron(epr_triangle(2), epr_triangle(2)),
                                  {interleave, interleave, interleave});
    CHECK(e22 == epr_triangle(4));
}

TEST_CASE("tensor_product concatenates parties") {
    Tensor ww = tensor_product(w_state(), w_state());
    CHECK(ww.party_count() == 6);
    CHECK(ww.term_count() == 9);
    Tensor scalar(std::vector<uint32_t>{});
    scalar.add_term({}, rat(1));
    CHECK(tensor_product(ghz_state(2, 3), scalar) == ghz_state(2, 3));
    Tensor e23 = tensor_product(epr_pair(2), epr_pair(3));
    CHECK(e23.party_count() == 4);
    CHECK(e23.term_count() == 6);
}

TEST_CASE("direct_sum block-shifts the second summand") {
    CHECK(direct_sum(ghz_state(2, 3), ghz_state(3, 3)) == ghz_state(5, 3));
    Tensor ee = direct_sum(epr_pair(2), epr_pair(2));
    CHECK(matrix_rank(flatten(ee, {0})) == 4);
    Tensor ww = direct_sum(w_state(), w_state());
    CHECK(ww.dims == std::vector<uint32_t>{4, 4, 4});
    CHECK(ww.term_count() == 6);
    CHECK(ww.coeff({2, 2, 3}) == 1);  // shifted |001>
}

TEST_CASE("flatten ranks of the basic states") {
    for (uint32_t r : {2u, 3u, 5u}) {
        Matrix m = flatten(ghz_state(r, 3), {0});
        CHECK(m.rows == r);
        CHECK(m.cols == static_cast<size_t>(r) * r);
        CHECK(matrix_rank(m) == r);
    }
    for (uint32_t n : {2u, 3u}) CHECK(flatten_rank(epr_triangle(n), {0}) == n * n);
    CHECK(flatten_rank(w_state(), {0}) == 2);
    CHECK_THROWS(flatten(w_state(), {}));
    CHECK_THROWS(flatten(w_state(), {0, 1, 2}));
}

TEST_CASE("flatten rank is multiplicative for disjoint products and additive for sums") {
    Xorshift rng(7);
    for (int rep = 0; rep < 40; ++rep) {
        Tensor a = random_tensor(rng, {2, 3}, 4);
        Tensor b = random_tensor(rng, {2, 2}, 3);
        size_t ra = flatten_rank(a, {0});
        size_t rb = flatten_rank(b, {0});
        CHECK(flatten_rank(tensor_product(a, b), {0, 2}) == ra * rb);
        Tensor c = random_tensor(rng, {2, 3}, 4);
        CHECK(flatten_rank(direct_sum(a, c), {0}) == ra + flatten_rank(c, {0}));
    }
}

TEST_CASE("kron and tensor_product are associative") {
    Xorshift rng(11);
    for (int rep = 0; rep < 30; ++rep) {
        Tensor a = random_tensor(rng, {2, 2}, 3);
        Tensor b = random_tensor(rng, {2, 3}, 3);
        Tensor c = random_tensor(rng, {3, 2}, 3);
        CHECK(kron(kron(a, b), c) == kron(a, kron(b, c)));
        CHECK(tensor_product(tensor_product(a, b), c) == tensor_product(a, tensor_product(b, c)));
    }
}

TEST_CASE("apply_local_maps") {
    Tensor g = ghz_state(2, 3);
    LocalMapFamily id = {Matrix::identity(2), Matrix::identity(2), Matrix::identity(2)};
    CHECK(apply_local_maps(g, id) == g);

    // (<0|+<1|) per party collapses GHZ_2(3) to the scalar 2 on dims (1,1,1)
    Matrix sum_row(1, 2);
    sum_row.at(0, 0) = 1;
    sum_row.at(0, 1) = 1;
    Tensor scalar2 = apply_local_maps(g, {sum_row, sum_row, sum_row});
    CHECK(scalar2.dims == std::vector<uint32_t>{1, 1, 1});
    CHECK(scalar2.coeff({0, 0, 0}) == 2);
    Matrix bad(2, 3);
    CHECK_THROWS(apply_local_maps(g, {bad, sum_row, sum_row}));
}

TEST_CASE("flattening rank never grows under local maps") {
    Xorshift rng(23);
    for (int rep = 0; rep < 50; ++rep) {
        Tensor t = random_tensor(rng, {3, 2, 2}, 5);
        LocalMapFamily maps;
        for (uint32_t d : t.dims) {
            Matrix m(1 + rng.next_below(3), d);
            for (auto& x : m.a) x = rat(rng.next_int(-3, 3));
            maps.push_back(m);
        }
        Tensor u = apply_local_maps(t, maps);
        for (const auto& left : all_party_bipartitions(3, 8)) {
            CHECK(flatten_rank(u, left) <= flatten_rank(t, left));
        }
    }
}

TEST_CASE("slice") {
    std::vector<Rational> e0 = {rat(1), rat(0)};
    Tensor s = slice(w_state(), 0, e0);
    Tensor want({2, 2});
    want.add_term({0, 1}, rat(1));
    want.add_term({1, 0}, rat(1));
    CHECK(s == want);
    Xorshift rng(3);
    for (int rep = 0; rep < 20; ++rep) {
        Rational x = rat(rng.next_int(-6, 6), 1 + rng.next_below(4));
        Tensor sx = slice(w_state(), 0, {rat(1), x});
        CHECK(sx.coeff({0, 0}) == x);
        CHECK(matrix_rank(flatten(sx, {0})) == 2);
    }
    CHECK_THROWS(slice(w_state(), 0, {rat(1)}));
}

TEST_CASE("hyperdeterminant classifies 2x2x2 orbits") {
    CHECK(hyperdeterminant_222(ghz_state(2, 3)) != 0);
    CHECK(hyperdeterminant_222(w_state()) == 0);
    Tensor zero({2, 2, 2});
    CHECK(hyperdeterminant_222(zero) == 0);
    CHECK_THROWS(hyperdeterminant_222(ghz_state(3, 3)));
}

TEST_CASE("is_concise") {
    CHECK(is_concise(ghz_state(3, 3)));
    CHECK(is_concise(lambda_state()));
    Tensor padded({3, 2, 2});
    padded.add_term({1, 0, 0}, rat(1));
    padded.add_term({0, 1, 0}, rat(1));
    padded.add_term({0, 0, 1}, rat(1));
    CHECK_FALSE(is_concise(padded));
}

TEST_CASE("group and permute parties round-trip") {
    Xorshift rng(5);
    Tensor t = random_tensor(rng, {2, 3, 2}, 6);
    Tensor p = permute_parties(t, {2, 0, 1});
    CHECK(permute_parties(p, {1, 2, 0}) == t);
    Tensor g = group_parties(t, {{0, 1}, {2}});
    CHECK(g.dims == std::vector<uint32_t>{6, 2});
    CHECK(g.term_count() == t.term_count());
}
