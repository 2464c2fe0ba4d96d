#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace entres {

// Mixed-radix index arithmetic. Index 0 is the most significant digit
// (row-major), matching the Kronecker pairing (i,j) -> i*d2 + j.
inline uint64_t mixed_radix_encode(const std::vector<uint32_t>& digits,
                                   const std::vector<uint32_t>& dims) {
    uint64_t idx = 0;
    for (size_t p = 0; p < dims.size(); ++p) idx = idx * dims[p] + digits[p];
    return idx;
}

inline std::vector<uint32_t> mixed_radix_decode(uint64_t idx,
                                                const std::vector<uint32_t>& dims) {
    std::vector<uint32_t> digits(dims.size());
    for (size_t p = dims.size(); p-- > 0;) {
        digits[p] = static_cast<uint32_t>(idx % dims[p]);
        idx /= dims[p];
    }
    return digits;
}

inline uint64_t dims_product(const std::vector<uint32_t>& dims) {
    uint64_t n = 1;
    for (uint32_t d : dims) n *= d;
    return n;
}

// Deterministic xorshift64* generator for seeded sampling (ALS init,
// property-test instances). Not a crypto RNG.
struct Xorshift {
    uint64_t state;
    explicit Xorshift(uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

    uint64_t next() {
        uint64_t x = state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state = x;
        return x * 0x2545f4914f6cdd1dULL;
    }

    // Uniform in [0, n).
    uint64_t next_below(uint64_t n) { return next() % n; }

    // Uniform double in [-1, 1).
    double next_signed_unit() {
        return static_cast<double>(next() >> 11) * (2.0 / 9007199254740992.0) - 1.0;
    }

    // Small integer in [lo, hi].
    long next_int(long lo, long hi) {
        return lo + static_cast<long>(next_below(static_cast<uint64_t>(hi - lo + 1)));
    }
};

inline uint64_t binomial(uint32_t n, uint32_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    uint64_t r = 1;
    for (uint32_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return r;
}

// Combinatorial number system: rank of a strictly increasing k-subset of
// {0,...,n-1} within the lexicographic-by-membership enumeration.
inline uint64_t subset_rank(const std::vector<uint32_t>& subset) {
    uint64_t r = 0;
    for (size_t i = 0; i < subset.size(); ++i)
        r += binomial(subset[i], static_cast<uint32_t>(i + 1));
    return r;
}

inline std::vector<std::vector<uint32_t>> all_subsets(uint32_t n, uint32_t k) {
    std::vector<std::vector<uint32_t>> out;
    std::vector<uint32_t> cur(k);
    for (uint32_t i = 0; i < k; ++i) cur[i] = i;
    if (k > n) return out;
    while (true) {
        out.push_back(cur);
        // next combination
        size_t i = k;
        while (i-- > 0) {
            if (cur[i] != i + n - k) break;
            if (i == 0) return out;
        }
        if (k == 0) return out;
        if (cur[i] == i + n - k) return out;
        ++cur[i];
        for (size_t j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
    }
}

inline uint64_t isqrt_floor(uint64_t n) {
    if (n == 0) return 0;
    uint64_t r = static_cast<uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

// Smallest r >= 1 with r^k >= n (exact integer arithmetic).
inline uint64_t ceil_kth_root(uint64_t n, unsigned k) {
    if (n <= 1) return 1;
    uint64_t r = 1;
    while (true) {
        uint64_t p = 1;
        bool overflow = false;
        for (unsigned i = 0; i < k; ++i) {
            if (p > n / r + 1) { overflow = true; break; }
            p *= r;
        }
        if (!overflow && p >= n) return r;
        if (overflow) return r;
        ++r;
    }
}

}  // namespace entres
