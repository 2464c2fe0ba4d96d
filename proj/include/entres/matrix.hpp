#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "rational.hpp"
#include "util.hpp"

namespace entres {

// Dense matrix over the rationals. Row-major storage.
struct Matrix {
    size_t rows = 0, cols = 0;
    std::vector<Rational> a;

    Matrix() = default;
    Matrix(size_t r, size_t c) : rows(r), cols(c), a(r * c, Rational(0)) {}

    Rational& at(size_t i, size_t j) { return a[i * cols + j]; }
    const Rational& at(size_t i, size_t j) const { return a[i * cols + j]; }

    static Matrix identity(size_t n) {
        Matrix m(n, n);
        for (size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    static Matrix zero(size_t r, size_t c) { return Matrix(r, c); }

    bool is_zero() const {
        for (const auto& x : a)
            if (x != 0) return false;
        return true;
    }

    bool operator==(const Matrix& o) const {
        return rows == o.rows && cols == o.cols && a == o.a;
    }

    Matrix transpose() const {
        Matrix t(cols, rows);
        for (size_t i = 0; i < rows; ++i)
            for (size_t j = 0; j < cols; ++j) t.at(j, i) = at(i, j);
        return t;
    }

    Matrix operator*(const Matrix& o) const {
        if (cols != o.rows) throw std::invalid_argument("matrix product shape mismatch");
        Matrix r(rows, o.cols);
        for (size_t i = 0; i < rows; ++i)
            for (size_t k = 0; k < cols; ++k) {
                const Rational& x = at(i, k);
                if (x == 0) continue;
                for (size_t j = 0; j < o.cols; ++j) {
                    if (o.at(k, j) == 0) continue;
                    r.at(i, j) += x * o.at(k, j);
                }
            }
        return r;
    }

    Matrix operator+(const Matrix& o) const {
        if (rows != o.rows || cols != o.cols) throw std::invalid_argument("matrix sum shape mismatch");
        Matrix r(rows, cols);
        for (size_t i = 0; i < a.size(); ++i) r.a[i] = a[i] + o.a[i];
        return r;
    }

    Matrix scaled(const Rational& s) const {
        Matrix r(rows, cols);
        for (size_t i = 0; i < a.size(); ++i) r.a[i] = a[i] * s;
        return r;
    }
};

inline Matrix kron(const Matrix& x, const Matrix& y) {
    Matrix r(x.rows * y.rows, x.cols * y.cols);
    for (size_t i = 0; i < x.rows; ++i)
        for (size_t j = 0; j < x.cols; ++j) {
            const Rational& v = x.at(i, j);
            if (v == 0) continue;
            for (size_t k = 0; k < y.rows; ++k)
                for (size_t l = 0; l < y.cols; ++l) {
                    if (y.at(k, l) == 0) continue;
                    r.at(i * y.rows + k, j * y.cols + l) = v * y.at(k, l);
                }
        }
    return r;
}

// Permutation matrix for regrouping a mixed-radix index space. `perm[j]` names
// the source atom that moves into target position j; the matrix maps the
// source index space onto the permuted one: P * e_src = e_dst.
inline Matrix permutation_matrix(const std::vector<uint32_t>& src_dims,
                                 const std::vector<size_t>& perm) {
    if (src_dims.size() != perm.size())
        throw std::invalid_argument("permutation arity mismatch");
    std::vector<uint32_t> dst_dims(perm.size());
    for (size_t j = 0; j < perm.size(); ++j) dst_dims[j] = src_dims[perm[j]];
    const uint64_t n = dims_product(src_dims);
    Matrix p(n, n);
    std::vector<uint32_t> dst_digits(perm.size());
    for (uint64_t s = 0; s < n; ++s) {
        auto digits = mixed_radix_decode(s, src_dims);
        for (size_t j = 0; j < perm.size(); ++j) dst_digits[j] = digits[perm[j]];
        p.at(mixed_radix_encode(dst_digits, dst_dims), s) = 1;
    }
    return p;
}

namespace detail {

// Fraction-free (Bareiss) elimination on an integer copy; exact rank over Q.
inline size_t bareiss_rank(std::vector<Integer>& m, size_t rows, size_t cols) {
    auto at = [&](size_t i, size_t j) -> Integer& { return m[i * cols + j]; };
    size_t rank = 0;
    Integer prev_pivot = 1;
    for (size_t col = 0; col < cols && rank < rows; ++col) {
        size_t pivot_row = rank;
        while (pivot_row < rows && at(pivot_row, col) == 0) ++pivot_row;
        if (pivot_row == rows) continue;
        if (pivot_row != rank)
            for (size_t j = 0; j < cols; ++j) std::swap(at(rank, j), at(pivot_row, j));
        const Integer pivot = at(rank, col);
        for (size_t i = rank + 1; i < rows; ++i) {
            for (size_t j = col + 1; j < cols; ++j) {
                Integer t = at(i, j) * pivot - at(i, col) * at(rank, j);
                mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev_pivot.get_mpz_t());
                at(i, j) = t;
            }
            at(i, col) = 0;
        }
        prev_pivot = pivot;
        ++rank;
    }
    return rank;
}

}  // namespace detail

// Exact rank over the rationals (fraction-free elimination after clearing
// denominators row by row).
inline size_t matrix_rank(const Matrix& m) {
    if (m.rows == 0 || m.cols == 0) return 0;
    std::vector<Integer> im(m.rows * m.cols);
    for (size_t i = 0; i < m.rows; ++i) {
        Integer l = 1;
        for (size_t j = 0; j < m.cols; ++j)
            l = lcm(l, m.at(i, j).get_den());
        for (size_t j = 0; j < m.cols; ++j) {
            const Rational& q = m.at(i, j);
            im[i * m.cols + j] = q.get_num() * (l / q.get_den());
        }
    }
    return detail::bareiss_rank(im, m.rows, m.cols);
}

// Rank modulo the Mersenne prime 2^61-1. Always a lower bound for the rank
// over Q; equality to min(rows, cols) certifies the exact rank.
inline size_t matrix_rank_mod_p(const Matrix& m) {
    static constexpr uint64_t P = (1ULL << 61) - 1;
    auto mulmod = [](uint64_t x, uint64_t y) -> uint64_t {
        return static_cast<uint64_t>(static_cast<unsigned __int128>(x) * y % P);
    };
    const size_t rows = m.rows, cols = m.cols;
    std::vector<uint64_t> w(rows * cols);
    for (size_t i = 0; i < rows; ++i)
        for (size_t j = 0; j < cols; ++j) {
            const Rational& q = m.at(i, j);
            uint64_t num = mpz_fdiv_ui(q.get_num().get_mpz_t(), P);
            uint64_t den = mpz_fdiv_ui(q.get_den().get_mpz_t(), P);
            if (den == 0) throw std::runtime_error("denominator divisible by modulus");
            // den^(P-2) mod P
            uint64_t inv = 1, b = den, e = P - 2;
            while (e) {
                if (e & 1) inv = mulmod(inv, b);
                b = mulmod(b, b);
                e >>= 1;
            }
            w[i * cols + j] = mulmod(num, inv);
        }
    size_t rank = 0;
    for (size_t col = 0; col < cols && rank < rows; ++col) {
        size_t pr = rank;
        while (pr < rows && w[pr * cols + col] == 0) ++pr;
        if (pr == rows) continue;
        if (pr != rank)
            for (size_t j = 0; j < cols; ++j) std::swap(w[rank * cols + j], w[pr * cols + j]);
        uint64_t pivot = w[rank * cols + col];
        uint64_t ipiv = 1, b = pivot, e = P - 2;
        while (e) {
            if (e & 1) ipiv = mulmod(ipiv, b);
            b = mulmod(b, b);
            e >>= 1;
        }
        for (size_t i = rank + 1; i < rows; ++i) {
            uint64_t f = mulmod(w[i * cols + col], ipiv);
            if (f == 0) continue;
            for (size_t j = col; j < cols; ++j) {
                uint64_t sub = mulmod(f, w[rank * cols + j]);
                w[i * cols + j] = (w[i * cols + j] + P - sub) % P;
            }
        }
        ++rank;
    }
    return rank;
}

// Gauss-Jordan inverse; throws on singular input.
inline Matrix matrix_inverse(const Matrix& m) {
    if (m.rows != m.cols) throw std::invalid_argument("inverse of non-square matrix");
    const size_t n = m.rows;
    Matrix w = m;
    Matrix inv = Matrix::identity(n);
    for (size_t col = 0; col < n; ++col) {
        size_t pr = col;
        while (pr < n && w.at(pr, col) == 0) ++pr;
        if (pr == n) throw std::runtime_error("singular matrix");
        if (pr != col)
            for (size_t j = 0; j < n; ++j) {
                std::swap(w.at(col, j), w.at(pr, j));
                std::swap(inv.at(col, j), inv.at(pr, j));
            }
        Rational piv = w.at(col, col);
        for (size_t j = 0; j < n; ++j) {
            w.at(col, j) /= piv;
            inv.at(col, j) /= piv;
        }
        for (size_t i = 0; i < n; ++i) {
            if (i == col) continue;
            Rational f = w.at(i, col);
            if (f == 0) continue;
            for (size_t j = 0; j < n; ++j) {
                w.at(i, j) -= f * w.at(col, j);
                inv.at(i, j) -= f * inv.at(col, j);
            }
        }
    }
    return inv;
}

// Solve A x = b exactly for square invertible A.
inline std::vector<Rational> matrix_solve(const Matrix& a, const std::vector<Rational>& b) {
    if (a.rows != a.cols || a.rows != b.size())
        throw std::invalid_argument("solve shape mismatch");
    Matrix inv = matrix_inverse(a);
    std::vector<Rational> x(a.rows, Rational(0));
    for (size_t i = 0; i < a.rows; ++i)
        for (size_t j = 0; j < a.cols; ++j)
            if (inv.at(i, j) != 0) x[i] += inv.at(i, j) * b[j];
    return x;
}

}  // namespace entres
