#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "matrix.hpp"
#include "rational.hpp"
#include "util.hpp"

namespace entres {

using MultiIndex = std::vector<uint32_t>;

// Sparse exact multiparty tensor: one index per party, coefficients in Q.
// Terms are kept in a std::map so iteration (and serialization) is always in
// canonical lexicographic order, and no zero coefficient is ever stored.
struct Tensor {
    std::vector<uint32_t> dims;
    std::map<MultiIndex, Rational> terms;

    Tensor() = default;
    explicit Tensor(std::vector<uint32_t> d) : dims(std::move(d)) {
        for (uint32_t x : dims)
            if (x == 0) throw std::invalid_argument("zero party dimension");
    }

    size_t party_count() const { return dims.size(); }
    size_t term_count() const { return terms.size(); }
    bool is_zero() const { return terms.empty(); }

    void check_index(const MultiIndex& idx) const {
        if (idx.size() != dims.size()) throw std::invalid_argument("index arity mismatch");
        for (size_t p = 0; p < idx.size(); ++p)
            if (idx[p] >= dims[p]) throw std::invalid_argument("index out of range");
    }

    void add_term(const MultiIndex& idx, const Rational& c) {
        if (c == 0) return;
        check_index(idx);
        auto it = terms.find(idx);
        if (it == terms.end()) {
            terms.emplace(idx, c);
        } else {
            it->second += c;
            if (it->second == 0) terms.erase(it);
        }
    }

    Rational coeff(const MultiIndex& idx) const {
        auto it = terms.find(idx);
        return it == terms.end() ? Rational(0) : it->second;
    }

    bool operator==(const Tensor& o) const { return dims == o.dims && terms == o.terms; }
    bool operator!=(const Tensor& o) const { return !(*this == o); }

    Tensor operator+(const Tensor& o) const {
        if (dims != o.dims) throw std::invalid_argument("tensor sum dims mismatch");
        Tensor r = *this;
        for (const auto& [idx, c] : o.terms) r.add_term(idx, c);
        return r;
    }

    Tensor scaled(const Rational& s) const {
        Tensor r(dims);
        if (s == 0) return r;
        for (const auto& [idx, c] : terms) r.terms.emplace(idx, c * s);
        return r;
    }
};

// ---------------------------------------------------------------------------
// Catalog-style constructors for the basic states.

inline Tensor ghz_state(uint32_t r, uint32_t k) {
    if (r == 0 || k == 0) throw std::invalid_argument("ghz needs r,k >= 1");
    Tensor t(std::vector<uint32_t>(k, r));
    for (uint32_t i = 0; i < r; ++i) t.terms.emplace(MultiIndex(k, i), Rational(1));
    return t;
}

inline Tensor epr_pair(uint32_t d) {
    if (d == 0) throw std::invalid_argument("epr needs level >= 1");
    Tensor t({d, d});
    for (uint32_t i = 0; i < d; ++i) t.terms.emplace(MultiIndex{i, i}, Rational(1));
    return t;
}

inline Tensor w_state() {
    Tensor t({2, 2, 2});
    t.terms.emplace(MultiIndex{1, 0, 0}, Rational(1));
    t.terms.emplace(MultiIndex{0, 1, 0}, Rational(1));
    t.terms.emplace(MultiIndex{0, 0, 1}, Rational(1));
    return t;
}

// Three pairwise EPR pairs of level n: sum_{i,j,k} |ik>_A |jk>_B |ij>_C.
inline Tensor epr_triangle(uint32_t n) {
    if (n == 0) throw std::invalid_argument("epr triangle needs level >= 1");
    Tensor t({n * n, n * n, n * n});
    for (uint32_t i = 0; i < n; ++i)
        for (uint32_t j = 0; j < n; ++j)
            for (uint32_t k = 0; k < n; ++k)
                t.terms.emplace(MultiIndex{i * n + k, j * n + k, i * n + j}, Rational(1));
    return t;
}

// Ring of four EPR pairs of level d on a plaquette; party p holds the halves
// of the pairs it shares with parties p-1 and p+1 (cyclic), in that order.
inline Tensor epr_square_ring(uint32_t d) {
    if (d == 0) throw std::invalid_argument("epr square needs level >= 1");
    Tensor t(std::vector<uint32_t>(4, d * d));
    for (uint32_t x0 = 0; x0 < d; ++x0)
        for (uint32_t x1 = 0; x1 < d; ++x1)
            for (uint32_t x2 = 0; x2 < d; ++x2)
                for (uint32_t x3 = 0; x3 < d; ++x3)
                    t.terms.emplace(
                        MultiIndex{x3 * d + x0, x0 * d + x1, x1 * d + x2, x2 * d + x3},
                        Rational(1));
    return t;
}

// sum_{ijk} eps_{ijk} |ijk> + |222>.
inline Tensor lambda_state() {
    Tensor t({3, 3, 3});
    auto eps = [](uint32_t i, uint32_t j, uint32_t k) -> int {
        if (i == j || j == k || i == k) return 0;
        // parity of the permutation (i j k) of (0 1 2)
        int inv = (i > j) + (i > k) + (j > k);
        return (inv % 2 == 0) ? 1 : -1;
    };
    for (uint32_t i = 0; i < 3; ++i)
        for (uint32_t j = 0; j < 3; ++j)
            for (uint32_t k = 0; k < 3; ++k)
                if (int s = eps(i, j, k); s != 0)
                    t.terms.emplace(MultiIndex{i, j, k}, Rational(s));
    t.add_term({2, 2, 2}, Rational(1));
    return t;
}

// ---------------------------------------------------------------------------
// Multilinear primitives.

// Kronecker product: same party count, per-party index pairing
// (i,j) -> i*dims_b[p] + j.
inline Tensor kron(const Tensor& a, const Tensor& b) {
    if (a.party_count() != b.party_count())
        throw std::invalid_argument("kron: party count mismatch");
    std::vector<uint32_t> dims(a.party_count());
    for (size_t p = 0; p < dims.size(); ++p) dims[p] = a.dims[p] * b.dims[p];
    Tensor r(dims);
    MultiIndex idx(dims.size());
    for (const auto& [ia, ca] : a.terms)
        for (const auto& [ib, cb] : b.terms) {
            for (size_t p = 0; p < dims.size(); ++p) idx[p] = ia[p] * b.dims[p] + ib[p];
            r.terms.emplace(idx, ca * cb);
        }
    return r;
}

// Tensor product on disjoint parties: party list of a followed by b's.
inline Tensor tensor_product(const Tensor& a, const Tensor& b) {
    std::vector<uint32_t> dims = a.dims;
    dims.insert(dims.end(), b.dims.begin(), b.dims.end());
    Tensor r(dims);
    MultiIndex idx;
    for (const auto& [ia, ca] : a.terms)
        for (const auto& [ib, cb] : b.terms) {
            idx = ia;
            idx.insert(idx.end(), ib.begin(), ib.end());
            r.terms.emplace(idx, ca * cb);
        }
    return r;
}

// Direct sum: party dims add; a keeps the low index block.
inline Tensor direct_sum(const Tensor& a, const Tensor& b) {
    if (a.party_count() != b.party_count())
        throw std::invalid_argument("direct_sum: party count mismatch");
    std::vector<uint32_t> dims(a.party_count());
    for (size_t p = 0; p < dims.size(); ++p) dims[p] = a.dims[p] + b.dims[p];
    Tensor r(dims);
    for (const auto& [ia, ca] : a.terms) r.terms.emplace(ia, ca);
    MultiIndex idx(dims.size());
    for (const auto& [ib, cb] : b.terms) {
        for (size_t p = 0; p < dims.size(); ++p) idx[p] = a.dims[p] + ib[p];
        r.terms.emplace(idx, cb);
    }
    return r;
}

inline Tensor permute_parties(const Tensor& t, const std::vector<size_t>& perm) {
    if (perm.size() != t.party_count()) throw std::invalid_argument("permute arity mismatch");
    std::vector<uint32_t> dims(perm.size());
    for (size_t p = 0; p < perm.size(); ++p) dims[p] = t.dims[perm[p]];
    Tensor r(dims);
    MultiIndex idx(perm.size());
    for (const auto& [it, c] : t.terms) {
        for (size_t p = 0; p < perm.size(); ++p) idx[p] = it[perm[p]];
        r.terms.emplace(idx, c);
    }
    return r;
}

// Merge parties into groups (each group an ordered list of original parties;
// groups must partition the party set). Group index is row-major over the
// members in listed order.
inline Tensor group_parties(const Tensor& t, const std::vector<std::vector<size_t>>& groups) {
    std::vector<uint32_t> dims(groups.size());
    size_t total = 0;
    for (size_t g = 0; g < groups.size(); ++g) {
        uint64_t d = 1;
        for (size_t p : groups[g]) {
            if (p >= t.party_count()) throw std::invalid_argument("bad group member");
            d *= t.dims[p];
            ++total;
        }
        dims[g] = static_cast<uint32_t>(d);
    }
    if (total != t.party_count()) throw std::invalid_argument("groups must partition parties");
    Tensor r(dims);
    MultiIndex idx(groups.size());
    for (const auto& [it, c] : t.terms) {
        for (size_t g = 0; g < groups.size(); ++g) {
            uint64_t v = 0;
            for (size_t p : groups[g]) v = v * t.dims[p] + it[p];
            idx[g] = static_cast<uint32_t>(v);
        }
        r.terms.emplace(idx, c);
    }
    return r;
}

// Flattening: rows indexed by the left parties (row-major in party order),
// columns by the complement.
inline Matrix flatten(const Tensor& t, const std::vector<size_t>& left_parties) {
    std::vector<bool> is_left(t.party_count(), false);
    for (size_t p : left_parties) {
        if (p >= t.party_count()) throw std::invalid_argument("flatten: bad party");
        if (is_left[p]) throw std::invalid_argument("flatten: repeated party");
        is_left[p] = true;
    }
    if (left_parties.empty()) throw std::invalid_argument("flatten: empty left set");
    std::vector<size_t> left, right;
    for (size_t p = 0; p < t.party_count(); ++p) (is_left[p] ? left : right).push_back(p);
    if (right.empty()) throw std::invalid_argument("flatten: left set must be proper");
    uint64_t nrow = 1, ncol = 1;
    for (size_t p : left) nrow *= t.dims[p];
    for (size_t p : right) ncol *= t.dims[p];
    Matrix m(nrow, ncol);
    for (const auto& [idx, c] : t.terms) {
        uint64_t r = 0, col = 0;
        for (size_t p : left) r = r * t.dims[p] + idx[p];
        for (size_t p : right) col = col * t.dims[p] + idx[p];
        m.at(r, col) = c;
    }
    return m;
}

// Rank of the flattening, computed on the occupied rows and columns only
// (zero rows and columns never change the rank), so sparse tensors with huge
// ambient dimensions stay cheap.
inline size_t flatten_rank(const Tensor& t, const std::vector<size_t>& left_parties) {
    std::vector<bool> is_left(t.party_count(), false);
    for (size_t p : left_parties) {
        if (p >= t.party_count()) throw std::invalid_argument("flatten: bad party");
        is_left[p] = true;
    }
    std::vector<size_t> left, right;
    for (size_t p = 0; p < t.party_count(); ++p) (is_left[p] ? left : right).push_back(p);
    if (left.empty() || right.empty())
        throw std::invalid_argument("flatten: left set must be nonempty and proper");
    std::map<uint64_t, size_t> row_of, col_of;
    std::vector<std::tuple<size_t, size_t, const Rational*>> entries;
    for (const auto& [idx, c] : t.terms) {
        uint64_t r = 0, col = 0;
        for (size_t p : left) r = r * t.dims[p] + idx[p];
        for (size_t p : right) col = col * t.dims[p] + idx[p];
        size_t ri = row_of.emplace(r, row_of.size()).first->second;
        size_t ci = col_of.emplace(col, col_of.size()).first->second;
        entries.emplace_back(ri, ci, &c);
    }
    Matrix m(row_of.size(), col_of.size());
    for (const auto& [ri, ci, c] : entries) m.at(ri, ci) = *c;
    return matrix_rank(m);
}

// Apply one covector to a party: <x| phi on party `party`.
inline Tensor slice(const Tensor& t, size_t party, const std::vector<Rational>& covector) {
    if (party >= t.party_count()) throw std::invalid_argument("slice: bad party");
    if (covector.size() != t.dims[party]) throw std::invalid_argument("slice: covector length");
    std::vector<uint32_t> dims;
    for (size_t p = 0; p < t.party_count(); ++p)
        if (p != party) dims.push_back(t.dims[p]);
    Tensor r(dims);
    MultiIndex idx;
    for (const auto& [it, c] : t.terms) {
        const Rational& x = covector[it[party]];
        if (x == 0) continue;
        idx.clear();
        for (size_t p = 0; p < t.party_count(); ++p)
            if (p != party) idx.push_back(it[p]);
        r.add_term(idx, c * x);
    }
    return r;
}

// One rational matrix per party.
using LocalMapFamily = std::vector<Matrix>;

// Exact contraction (tensor_i M_i) |t>.
inline Tensor apply_local_maps(const Tensor& t, const LocalMapFamily& maps) {
    if (maps.size() != t.party_count())
        throw std::invalid_argument("apply_local_maps: map count mismatch");
    std::vector<uint32_t> dims(maps.size());
    for (size_t p = 0; p < maps.size(); ++p) {
        if (maps[p].cols != t.dims[p])
            throw std::invalid_argument("apply_local_maps: dimension mismatch at party " +
                                        std::to_string(p));
        dims[p] = static_cast<uint32_t>(maps[p].rows);
    }
    // Per map, nonzero rows of each column.
    std::vector<std::vector<std::vector<std::pair<uint32_t, const Rational*>>>> colnz(maps.size());
    for (size_t p = 0; p < maps.size(); ++p) {
        colnz[p].resize(maps[p].cols);
        for (size_t j = 0; j < maps[p].cols; ++j)
            for (size_t i = 0; i < maps[p].rows; ++i)
                if (maps[p].at(i, j) != 0)
                    colnz[p][j].emplace_back(static_cast<uint32_t>(i), &maps[p].at(i, j));
    }
    Tensor out(dims);
    MultiIndex idx(maps.size());
    // Odometer over the nonzero entries of each selected column.
    std::vector<size_t> pos(maps.size());
    for (const auto& [it, c] : t.terms) {
        bool dead = false;
        for (size_t p = 0; p < maps.size(); ++p) {
            if (colnz[p][it[p]].empty()) { dead = true; break; }
            pos[p] = 0;
        }
        if (dead) continue;
        while (true) {
            Rational v = c;
            for (size_t p = 0; p < maps.size(); ++p) {
                const auto& e = colnz[p][it[p]][pos[p]];
                idx[p] = e.first;
                v *= *e.second;
            }
            out.add_term(idx, v);
            size_t p = maps.size();
            while (p-- > 0) {
                if (++pos[p] < colnz[p][it[p]].size()) break;
                pos[p] = 0;
                if (p == 0) goto next_term;
            }
        }
    next_term:;
    }
    return out;
}

// True iff every single-party flattening has full rank.
inline bool is_concise(const Tensor& t) {
    if (t.is_zero()) return false;
    for (size_t p = 0; p < t.party_count(); ++p)
        if (flatten_rank(t, {p}) != t.dims[p]) return false;
    return true;
}

// Cayley hyperdeterminant of a 2x2x2 tensor (degree 4). Vanishes exactly on
// the closure of the non-GHZ orbits, which pins the rank-3 lower bound for
// W-class tensors.
inline Rational hyperdeterminant_222(const Tensor& t) {
    if (t.dims != std::vector<uint32_t>{2, 2, 2})
        throw std::invalid_argument("hyperdeterminant_222 needs dims (2,2,2)");
    auto a = [&](uint32_t i, uint32_t j, uint32_t k) { return t.coeff({i, j, k}); };
    Rational d = a(0, 0, 0) * a(0, 0, 0) * a(1, 1, 1) * a(1, 1, 1) +
                 a(0, 0, 1) * a(0, 0, 1) * a(1, 1, 0) * a(1, 1, 0) +
                 a(0, 1, 0) * a(0, 1, 0) * a(1, 0, 1) * a(1, 0, 1) +
                 a(1, 0, 0) * a(1, 0, 0) * a(0, 1, 1) * a(0, 1, 1);
    d -= 2 * (a(0, 0, 0) * a(0, 0, 1) * a(1, 1, 0) * a(1, 1, 1) +
              a(0, 0, 0) * a(0, 1, 0) * a(1, 0, 1) * a(1, 1, 1) +
              a(0, 0, 0) * a(1, 0, 0) * a(0, 1, 1) * a(1, 1, 1) +
              a(0, 0, 1) * a(0, 1, 0) * a(1, 0, 1) * a(1, 1, 0) +
              a(0, 0, 1) * a(1, 0, 0) * a(0, 1, 1) * a(1, 1, 0) +
              a(0, 1, 0) * a(1, 0, 0) * a(0, 1, 1) * a(1, 0, 1));
    d += 4 * (a(0, 0, 0) * a(0, 1, 1) * a(1, 0, 1) * a(1, 1, 0) +
              a(0, 0, 1) * a(0, 1, 0) * a(1, 0, 0) * a(1, 1, 1));
    return d;
}

}  // namespace entres
