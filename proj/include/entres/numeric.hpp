#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "tensor.hpp"
#include "util.hpp"

namespace entres {

namespace detail {

// Symmetric eigenvalues: Householder tridiagonalization followed by QL with
// implicit shifts (EISPACK tred2/tql2 lineage, eigenvalues only).
inline std::vector<double> symmetric_eigenvalues(std::vector<double> a, size_t n) {
    if (n == 0) return {};
    std::vector<double> d(n, 0.0), e(n, 0.0);
    auto A = [&](size_t i, size_t j) -> double& { return a[i * n + j]; };

    for (size_t i = n - 1; i > 0; --i) {
        size_t l = i - 1;
        double h = 0.0, scale = 0.0;
        if (l > 0) {
            for (size_t k = 0; k <= l; ++k) scale += std::fabs(A(i, k));
            if (scale == 0.0) {
                e[i] = A(i, l);
            } else {
                for (size_t k = 0; k <= l; ++k) {
                    A(i, k) /= scale;
                    h += A(i, k) * A(i, k);
                }
                double f = A(i, l);
                double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                A(i, l) = f - g;
                f = 0.0;
                for (size_t j = 0; j <= l; ++j) {
                    g = 0.0;
                    for (size_t k = 0; k <= j; ++k) g += A(j, k) * A(i, k);
                    for (size_t k = j + 1; k <= l; ++k) g += A(k, j) * A(i, k);
                    e[j] = g / h;
                    f += e[j] * A(i, j);
                }
                double hh = f / (h + h);
                for (size_t j = 0; j <= l; ++j) {
                    f = A(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (size_t k = 0; k <= j; ++k) A(j, k) -= f * e[k] + g * A(i, k);
                }
            }
        } else {
            e[i] = A(i, l);
        }
        d[i] = h;
    }
    for (size_t i = 0; i < n; ++i) d[i] = A(i, i);

    // QL with implicit shifts on the tridiagonal (d, e).
    for (size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    for (size_t l = 0; l < n; ++l) {
        int iter = 0;
        size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= 1e-300 + 1e-15 * dd) break;
            }
            if (m != l) {
                if (++iter == 64) throw std::runtime_error("eigenvalue iteration did not converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::fabs(r) : -std::fabs(r)));
                double s = 1.0, c = 1.0, p = 0.0;
                for (size_t i = m; i-- > l;) {
                    double f = s * e[i];
                    double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if (r == 0.0 && m > l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
    return d;
}

}  // namespace detail

// Von Neumann entropy (in bits) of the reduced state of `t` on one party,
// for the normalized state. Gram-matrix eigenvalues below 1e-12 are clamped
// to zero before p*log2(p).
inline double reduced_entropy(const Tensor& t, size_t party) {
    if (t.is_zero()) throw std::invalid_argument("reduced_entropy of zero tensor");
    if (party >= t.party_count()) throw std::invalid_argument("reduced_entropy: bad party");
    const size_t d = t.dims[party];
    // Gram matrix of the slices t[a, rest]; equals the unnormalized reduced
    // density matrix (real coefficients, so no conjugation).
    std::vector<Rational> gram(d * d, Rational(0));
    {
        // Group terms by the rest-index via a map from rest-index to slice entries.
        std::map<MultiIndex, std::vector<std::pair<uint32_t, const Rational*>>> by_rest;
        MultiIndex rest;
        for (const auto& [idx, c] : t.terms) {
            rest.clear();
            for (size_t p = 0; p < idx.size(); ++p)
                if (p != party) rest.push_back(idx[p]);
            by_rest[rest].emplace_back(idx[party], &c);
        }
        for (const auto& [rest_idx, entries] : by_rest)
            for (const auto& [ia, ca] : entries)
                for (const auto& [ib, cb] : entries) gram[ia * d + ib] += (*ca) * (*cb);
    }
    double trace = 0.0;
    std::vector<double> g(d * d);
    for (size_t i = 0; i < d * d; ++i) g[i] = rat_double(gram[i]);
    for (size_t i = 0; i < d; ++i) trace += g[i * d + i];
    if (trace <= 0.0) throw std::invalid_argument("reduced_entropy of zero tensor");
    for (auto& x : g) x /= trace;
    auto eig = detail::symmetric_eigenvalues(std::move(g), d);
    double h = 0.0;
    for (double p : eig) {
        if (p < 1e-12) continue;
        h -= p * std::log2(p);
    }
    return h;
}

namespace detail {

// One seeded ALS run; returns the final Frobenius residual.
inline double als_single_run(const std::vector<double>& dense,
                             const std::vector<uint32_t>& dims, uint32_t r,
                             uint32_t iterations, Xorshift& rng) {
    const size_t k = dims.size();
    const uint64_t total = dims_product(dims);
    std::vector<std::vector<double>> factor(k);
    for (size_t p = 0; p < k; ++p) {
        factor[p].resize(static_cast<size_t>(dims[p]) * r);
        for (auto& x : factor[p]) x = rng.next_signed_unit();
    }

    auto reconstruct_entry = [&](const std::vector<uint32_t>& digits) {
        double s = 0.0;
        for (uint32_t c = 0; c < r; ++c) {
            double prod = 1.0;
            for (size_t p = 0; p < k; ++p) prod *= factor[p][digits[p] * r + c];
            s += prod;
        }
        return s;
    };
    auto residual = [&] {
        double res2 = 0.0;
        std::vector<uint32_t> digits(k);
        for (uint64_t flat = 0; flat < total; ++flat) {
            uint64_t rem = flat;
            for (size_t q = k; q-- > 0;) {
                digits[q] = static_cast<uint32_t>(rem % dims[q]);
                rem /= dims[q];
            }
            double diff = dense[flat] - reconstruct_entry(digits);
            res2 += diff * diff;
        }
        return std::sqrt(res2);
    };

    std::vector<double> gram(static_cast<size_t>(r) * r);
    std::vector<double> rhs;
    for (uint32_t it = 0; it < iterations; ++it) {
        if (it % 64 == 63 && residual() < 1e-12) break;
        for (size_t p = 0; p < k; ++p) {
            // gram = Hadamard product over q != p of factor[q]^T factor[q]
            for (uint32_t c1 = 0; c1 < r; ++c1)
                for (uint32_t c2 = 0; c2 < r; ++c2) gram[c1 * r + c2] = 1.0;
            for (size_t q = 0; q < k; ++q) {
                if (q == p) continue;
                for (uint32_t c1 = 0; c1 < r; ++c1)
                    for (uint32_t c2 = 0; c2 < r; ++c2) {
                        double s = 0.0;
                        for (uint32_t i = 0; i < dims[q]; ++i)
                            s += factor[q][i * r + c1] * factor[q][i * r + c2];
                        gram[c1 * r + c2] *= s;
                    }
            }
            // rhs[i][c] = sum over rest of T * prod_q factor[q]
            rhs.assign(static_cast<size_t>(dims[p]) * r, 0.0);
            std::vector<uint32_t> digits(k);
            for (uint64_t flat = 0; flat < total; ++flat) {
                double v = dense[flat];
                if (v == 0.0) continue;
                uint64_t rem = flat;
                for (size_t q = k; q-- > 0;) {
                    digits[q] = static_cast<uint32_t>(rem % dims[q]);
                    rem /= dims[q];
                }
                for (uint32_t c = 0; c < r; ++c) {
                    double prod = 1.0;
                    for (size_t q = 0; q < k; ++q)
                        if (q != p) prod *= factor[q][digits[q] * r + c];
                    rhs[digits[p] * r + c] += v * prod;
                }
            }
            // Solve factor[p] * gram = rhs via Gaussian elimination with ridge.
            std::vector<double> g = gram;
            for (uint32_t c = 0; c < r; ++c) g[c * r + c] += 1e-12;
            // LU factorize g (column-major solve for each row of factor[p])
            std::vector<int> piv(r);
            for (uint32_t c = 0; c < r; ++c) piv[c] = static_cast<int>(c);
            for (uint32_t c = 0; c < r; ++c) {
                uint32_t best = c;
                for (uint32_t i = c + 1; i < r; ++i)
                    if (std::fabs(g[i * r + c]) > std::fabs(g[best * r + c])) best = i;
                if (best != c) {
                    for (uint32_t j = 0; j < r; ++j) std::swap(g[c * r + j], g[best * r + j]);
                    std::swap(piv[c], piv[best]);
                }
                double pv = g[c * r + c];
                if (std::fabs(pv) < 1e-300) pv = (pv >= 0 ? 1e-300 : -1e-300);
                for (uint32_t i = c + 1; i < r; ++i) {
                    double f = g[i * r + c] / pv;
                    g[i * r + c] = f;
                    for (uint32_t j = c + 1; j < r; ++j) g[i * r + j] -= f * g[c * r + j];
                }
            }
            for (uint32_t row = 0; row < dims[p]; ++row) {
                std::vector<double> b(r);
                for (uint32_t c = 0; c < r; ++c) b[c] = rhs[row * r + piv[c]];
                for (uint32_t c = 0; c < r; ++c)
                    for (uint32_t j = 0; j < c; ++j) b[c] -= g[c * r + j] * b[j];
                for (uint32_t c = r; c-- > 0;) {
                    for (uint32_t j = c + 1; j < r; ++j) b[c] -= g[c * r + j] * b[j];
                    double pv = g[c * r + c];
                    if (std::fabs(pv) < 1e-300) pv = (pv >= 0 ? 1e-300 : -1e-300);
                    b[c] /= pv;
                }
                for (uint32_t c = 0; c < r; ++c) factor[p][row * r + c] = b[c];
            }
        }
    }
    return residual();
}

}  // namespace detail

// Frobenius residual of the best rank-r CP fit found by seeded alternating
// least squares. The sweep budget is split over a few deterministic restarts
// (ALS is prone to swamps); heuristic evidence only, never a certificate.
inline double als_rank_fit(const Tensor& t, uint32_t r, uint32_t iterations, uint64_t seed) {
    if (r == 0) throw std::invalid_argument("als_rank_fit: r >= 1 required");
    if (t.party_count() < 2) throw std::invalid_argument("als_rank_fit: need at least 2 parties");
    const uint64_t total = dims_product(t.dims);
    if (total > (1ULL << 22))
        throw std::invalid_argument("als_rank_fit: tensor too large for dense fit");
    std::vector<double> dense(total, 0.0);
    for (const auto& [idx, c] : t.terms) dense[mixed_radix_encode(idx, t.dims)] = rat_double(c);

    // `iterations` is the sweep cap per restart; runs that converge stop early.
    const unsigned restarts = 4;
    double best = std::numeric_limits<double>::infinity();
    for (unsigned run = 0; run < restarts; ++run) {
        Xorshift rng(seed * 0x9e3779b97f4a7c15ULL + run + 1);
        best = std::min(best, detail::als_single_run(dense, t.dims, r, iterations, rng));
        if (best < 1e-11) break;
    }
    return best;
}

}  // namespace entres
