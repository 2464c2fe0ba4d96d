#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace entres {

// Exact scalar of the whole library. mpq_class keeps values in lowest terms
// with a positive denominator, which the canonical serialization relies on.
using Rational = mpq_class;
using Integer = mpz_class;

inline Rational rat(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

// Accepts "3", "-7/2", "0". Whitespace is not tolerated.
inline Rational rat_parse(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    Rational q;
    if (q.set_str(s, 10) != 0)
        throw std::invalid_argument("bad rational literal: " + s);
    if (q.get_den() == 0)
        throw std::invalid_argument("zero denominator in literal: " + s);
    q.canonicalize();
    return q;
}

inline std::string rat_num_str(const Rational& q) { return q.get_num().get_str(); }
inline std::string rat_den_str(const Rational& q) { return q.get_den().get_str(); }

inline std::string rat_str(const Rational& q) {
    if (q.get_den() == 1) return rat_num_str(q);
    return rat_num_str(q) + "/" + rat_den_str(q);
}

inline double rat_double(const Rational& q) { return q.get_d(); }

inline Rational rat_pow(const Rational& base, unsigned long e) {
    Rational r = 1;
    Rational b = base;
    unsigned long k = e;
    while (k) {
        if (k & 1) r *= b;
        b *= b;
        k >>= 1;
    }
    return r;
}

}  // namespace entres
