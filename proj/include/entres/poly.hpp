#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "rational.hpp"
#include "tensor.hpp"

namespace entres {

// Polynomial in a formal parameter eps with rational coefficients.
// No zero coefficient is ever stored.
struct EpsPoly {
    std::map<uint32_t, Rational> coeffs;

    EpsPoly() = default;
    explicit EpsPoly(const Rational& c) {
        if (c != 0) coeffs.emplace(0u, c);
    }
    static EpsPoly monomial(uint32_t degree, const Rational& c) {
        EpsPoly p;
        if (c != 0) p.coeffs.emplace(degree, c);
        return p;
    }

    bool is_zero() const { return coeffs.empty(); }
    uint32_t min_degree() const { return coeffs.begin()->first; }
    uint32_t max_degree() const { return coeffs.rbegin()->first; }

    Rational coeff(uint32_t d) const {
        auto it = coeffs.find(d);
        return it == coeffs.end() ? Rational(0) : it->second;
    }

    void add(uint32_t d, const Rational& c) {
        if (c == 0) return;
        auto it = coeffs.find(d);
        if (it == coeffs.end()) {
            coeffs.emplace(d, c);
        } else {
            it->second += c;
            if (it->second == 0) coeffs.erase(it);
        }
    }

    EpsPoly operator+(const EpsPoly& o) const {
        EpsPoly r = *this;
        for (const auto& [d, c] : o.coeffs) r.add(d, c);
        return r;
    }

    EpsPoly operator*(const EpsPoly& o) const {
        EpsPoly r;
        for (const auto& [d1, c1] : coeffs)
            for (const auto& [d2, c2] : o.coeffs) r.add(d1 + d2, c1 * c2);
        return r;
    }

    EpsPoly operator*(const Rational& s) const {
        EpsPoly r;
        if (s == 0) return r;
        for (const auto& [d, c] : coeffs) r.coeffs.emplace(d, c * s);
        return r;
    }

    bool operator==(const EpsPoly& o) const { return coeffs == o.coeffs; }

    Rational eval(const Rational& x) const {
        Rational r = 0;
        for (const auto& [d, c] : coeffs) r += c * rat_pow(x, d);
        return r;
    }
};

// Dense matrix of eps-polynomials (local maps of a degeneration).
struct PolyMatrix {
    size_t rows = 0, cols = 0;
    std::vector<EpsPoly> a;

    PolyMatrix() = default;
    PolyMatrix(size_t r, size_t c) : rows(r), cols(c), a(r * c) {}
    explicit PolyMatrix(const Matrix& m) : rows(m.rows), cols(m.cols), a(m.rows * m.cols) {
        for (size_t i = 0; i < a.size(); ++i) a[i] = EpsPoly(m.a[i]);
    }

    EpsPoly& at(size_t i, size_t j) { return a[i * cols + j]; }
    const EpsPoly& at(size_t i, size_t j) const { return a[i * cols + j]; }

    PolyMatrix operator*(const PolyMatrix& o) const {
        if (cols != o.rows) throw std::invalid_argument("poly matrix product shape mismatch");
        PolyMatrix r(rows, o.cols);
        for (size_t i = 0; i < rows; ++i)
            for (size_t k = 0; k < cols; ++k) {
                const EpsPoly& x = at(i, k);
                if (x.is_zero()) continue;
                for (size_t j = 0; j < o.cols; ++j) {
                    if (o.at(k, j).is_zero()) continue;
                    r.at(i, j) = r.at(i, j) + x * o.at(k, j);
                }
            }
        return r;
    }

    Matrix eval(const Rational& x) const {
        Matrix m(rows, cols);
        for (size_t i = 0; i < a.size(); ++i) m.a[i] = a[i].eval(x);
        return m;
    }

    uint32_t max_degree() const {
        uint32_t d = 0;
        for (const auto& p : a)
            if (!p.is_zero() && p.max_degree() > d) d = p.max_degree();
        return d;
    }
};

inline PolyMatrix kron(const PolyMatrix& x, const PolyMatrix& y) {
    PolyMatrix r(x.rows * y.rows, x.cols * y.cols);
    for (size_t i = 0; i < x.rows; ++i)
        for (size_t j = 0; j < x.cols; ++j) {
            const EpsPoly& v = x.at(i, j);
            if (v.is_zero()) continue;
            for (size_t k = 0; k < y.rows; ++k)
                for (size_t l = 0; l < y.cols; ++l) {
                    if (y.at(k, l).is_zero()) continue;
                    r.at(i * y.rows + k, j * y.cols + l) = v * y.at(k, l);
                }
        }
    return r;
}

using PolyMapFamily = std::vector<PolyMatrix>;

// Tensor with eps-polynomial coefficients.
struct PolyTensor {
    std::vector<uint32_t> dims;
    std::map<MultiIndex, EpsPoly> terms;

    PolyTensor() = default;
    explicit PolyTensor(std::vector<uint32_t> d) : dims(std::move(d)) {}

    void add_term(const MultiIndex& idx, const EpsPoly& p) {
        if (p.is_zero()) return;
        auto it = terms.find(idx);
        if (it == terms.end()) {
            terms.emplace(idx, p);
        } else {
            it->second = it->second + p;
            if (it->second.is_zero()) terms.erase(it);
        }
    }

    bool is_zero() const { return terms.empty(); }

    uint32_t min_degree() const {
        uint32_t d = UINT32_MAX;
        for (const auto& [idx, p] : terms)
            if (p.min_degree() < d) d = p.min_degree();
        return d;
    }

    uint32_t max_degree() const {
        uint32_t d = 0;
        for (const auto& [idx, p] : terms)
            if (p.max_degree() > d) d = p.max_degree();
        return d;
    }

    Tensor degree_coefficient(uint32_t d) const {
        Tensor t(dims);
        for (const auto& [idx, p] : terms) {
            Rational c = p.coeff(d);
            if (c != 0) t.terms.emplace(idx, c);
        }
        return t;
    }

    Tensor eval(const Rational& x) const {
        Tensor t(dims);
        for (const auto& [idx, p] : terms) t.add_term(idx, p.eval(x));
        return t;
    }
};

// (tensor_i T_i(eps)) |t> as a PolyTensor.
inline PolyTensor poly_apply_local_maps(const Tensor& t, const PolyMapFamily& maps) {
    if (maps.size() != t.party_count())
        throw std::invalid_argument("poly_apply: map count mismatch");
    std::vector<uint32_t> dims(maps.size());
    for (size_t p = 0; p < maps.size(); ++p) {
        if (maps[p].cols != t.dims[p])
            throw std::invalid_argument("poly_apply: dimension mismatch");
        dims[p] = static_cast<uint32_t>(maps[p].rows);
    }
    std::vector<std::vector<std::vector<std::pair<uint32_t, const EpsPoly*>>>> colnz(maps.size());
    for (size_t p = 0; p < maps.size(); ++p) {
        colnz[p].resize(maps[p].cols);
        for (size_t j = 0; j < maps[p].cols; ++j)
            for (size_t i = 0; i < maps[p].rows; ++i)
                if (!maps[p].at(i, j).is_zero())
                    colnz[p][j].emplace_back(static_cast<uint32_t>(i), &maps[p].at(i, j));
    }
    PolyTensor out(dims);
    MultiIndex idx(maps.size());
    std::vector<size_t> pos(maps.size());
    for (const auto& [it, c] : t.terms) {
        bool dead = false;
        for (size_t p = 0; p < maps.size(); ++p) {
            if (colnz[p][it[p]].empty()) { dead = true; break; }
            pos[p] = 0;
        }
        if (dead) continue;
        while (true) {
            EpsPoly v(c);
            for (size_t p = 0; p < maps.size(); ++p) {
                const auto& e = colnz[p][it[p]][pos[p]];
                idx[p] = e.first;
                v = v * *e.second;
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

struct LeadingTermResult {
    uint32_t d = 0;       // lowest eps degree
    Tensor lead;          // coefficient tensor at degree d
    PolyTensor tail;      // everything above degree d
    uint32_t max_degree = 0;

    uint32_t tail_length() const { return max_degree - d; }  // the paper-level "e"
};

// Apply eps-polynomial maps and split off the lowest-order term.
inline LeadingTermResult poly_apply_and_leading(const Tensor& t, const PolyMapFamily& maps) {
    PolyTensor full = poly_apply_local_maps(t, maps);
    if (full.is_zero()) throw std::runtime_error("null degeneration");
    LeadingTermResult r;
    r.d = full.min_degree();
    r.max_degree = full.max_degree();
    r.lead = full.degree_coefficient(r.d);
    r.tail = PolyTensor(full.dims);
    for (const auto& [idx, p] : full.terms) {
        EpsPoly q = p;
        q.coeffs.erase(r.d);
        r.tail.add_term(idx, q);
    }
    return r;
}

}  // namespace entres
