#pragma once

// Residual invariants of quasi-cyclic near actions.
//
// A construction is a disjoint union of finite cyclic blocks Z/m^{q_1},
// Z/m^{q_2}, ... on which the level-n subgroup Z/m^n of the m-quasi-cyclic
// group acts by translation where the block is deep enough (q_k >= n) and
// degenerates to the identity where it is not (q_k < n). The residual at
// precision n is the count of points with nontrivial stabilizer, reduced
// mod m^n; it is computed here both by the closed formula over the shallow
// blocks and by an independent direct count on the explicit finite model.
// Digit streams give the same data as a compatible m-adic expansion: the
// n-th digit records how many blocks of depth exactly n-1 are present.

#include <nearperm/carrier.hpp>

namespace nearperm {

struct QCError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// a disjoint union of blocks Z/m^{q_k}; q is kept sorted
struct QCConstruction {
    Int m = 2;
    std::vector<Int> q;
};

// a compatible m-adic digit stream: s_0 = 0, s_n in [0, m^n),
// s_n ≡ s_{n-1} (mod m^{n-1}), nondecreasing
struct DigitStream {
    Int m = 2;
    std::vector<Int> s;
};

namespace qcdetail {

inline Int pow_int(Int m, Int e) {
    if (e < 0) throw QCError("qcyclic: negative exponent");
    Int out = 1;
    for (Int k = 0; k < e; ++k) {
        if (out > (Int(1) << 60) / m) throw QCError("qcyclic: power too large");
        out *= m;
    }
    return out;
}

inline std::vector<Int> prime_factors(Int m) {
    std::vector<Int> out;
    for (Int d = 2; d * d <= m; ++d)
        if (m % d == 0) {
            out.push_back(d);
            while (m % d == 0) m /= d;
        }
    if (m > 1) out.push_back(m);
    return out;
}

}  // namespace qcdetail

inline void validate_qc(const QCConstruction& c) {
    if (c.m < 2) throw QCError("qcyclic: modulus must be at least 2");
    for (size_t k = 0; k < c.q.size(); ++k) {
        if (c.q[k] < 0) throw QCError("qcyclic: block depth must be nonnegative");
        if (k > 0 && c.q[k] < c.q[k - 1]) throw QCError("qcyclic: depths must be nondecreasing");
    }
}

inline void validate_stream(const DigitStream& d) {
    if (d.m < 2) throw QCError("qcyclic: modulus must be at least 2");
    if (d.s.empty() || d.s[0] != 0) throw QCError("qcyclic: stream must start at zero");
    for (size_t n = 1; n < d.s.size(); ++n) {
        Int lvl = qcdetail::pow_int(d.m, (Int)n);
        if (d.s[n] < d.s[n - 1] || d.s[n] >= lvl)
            throw QCError("qcyclic: stream entry out of range");
        if ((d.s[n] - d.s[n - 1]) % (lvl / d.m) != 0)
            throw QCError("qcyclic: stream violates the compatibility congruence");
    }
}

// number of points with nontrivial stabilizer at precision n, mod m^n
inline Int residual_truncation(const QCConstruction& c, Int n) {
    validate_qc(c);
    if (n < 1) throw QCError("qcyclic: precision must be positive");
    Int mod = qcdetail::pow_int(c.m, n);
    Int sum = 0;
    for (Int qk : c.q)
        if (qk < n) sum = (sum + qcdetail::pow_int(c.m, qk)) % mod;
    return sum;
}

inline bool realizable_consistent(const QCConstruction& c, Int n) {
    return residual_truncation(c, n) == 0;
}

// independent count on the explicit finite model: build each block's
// translation, then test fixedness under one generator of every minimal
// subgroup of Z/m^n (one per prime factor of m)
inline Int direct_count_oracle(const QCConstruction& c, Int n) {
    validate_qc(c);
    if (n < 1) throw QCError("qcyclic: precision must be positive");
    Int M = qcdetail::pow_int(c.m, n);
    if (M > 2000000) throw QCError("qcyclic: oracle model too large");
    auto primes = qcdetail::prime_factors(c.m);
    Int count = 0;
    for (Int qk : c.q) {
        Int B = qcdetail::pow_int(c.m, qk);
        if (B > 2000000) throw QCError("qcyclic: oracle model too large");
        std::vector<Int> sigma(B);
        Int delta = qk >= n ? qcdetail::pow_int(c.m, qk - n) : 0;
        for (Int x = 0; x < B; ++x) sigma[x] = (x + delta) % B;
        std::vector<char> fixed(B, 0);
        for (Int ell : primes) {
            // sigma^(M/ell) by repeated squaring on the array
            Int e = M / ell;
            std::vector<Int> acc(B), base = sigma, tmp(B);
            for (Int x = 0; x < B; ++x) acc[x] = x;
            while (e > 0) {
                if (e & 1) {
                    for (Int x = 0; x < B; ++x) tmp[x] = base[acc[x]];
                    acc.swap(tmp);
                }
                for (Int x = 0; x < B; ++x) tmp[x] = base[base[x]];
                base.swap(tmp);
                e >>= 1;
            }
            for (Int x = 0; x < B; ++x)
                if (acc[x] == x) fixed[x] = 1;
        }
        for (Int x = 0; x < B; ++x)
            if (fixed[x]) ++count;
    }
    return count;
}

// digits b_1..b_N of the stream: b_n counts blocks of depth exactly n-1
inline std::vector<Int> digits_to_blocks(const DigitStream& d, Int N) {
    validate_stream(d);
    if (N < 1) throw QCError("qcyclic: precision must be positive");
    if ((size_t)N + 1 > d.s.size()) throw QCError("qcyclic: stream too short");
    std::vector<Int> b;
    for (Int n = 1; n <= N; ++n)
        b.push_back((d.s[n] - d.s[n - 1]) / qcdetail::pow_int(d.m, n - 1));
    return b;
}

inline QCConstruction blocks_to_construction(Int m, const std::vector<Int>& b) {
    QCConstruction c;
    c.m = m;
    for (size_t n = 1; n <= b.size(); ++n) {
        if (b[n - 1] < 0) throw QCError("qcyclic: negative digit");
        for (Int j = 0; j < b[n - 1]; ++j) c.q.push_back((Int)n - 1);
    }
    std::sort(c.q.begin(), c.q.end());
    validate_qc(c);
    return c;
}

// the compatible stream of a fixed integer: s_n = v mod m^n
inline DigitStream stream_from_value(Int m, Int v, Int N) {
    if (v < 0) throw QCError("qcyclic: value must be nonnegative");
    DigitStream d;
    d.m = m;
    for (Int n = 0; n <= N; ++n) d.s.push_back(v % qcdetail::pow_int(m, n));
    validate_stream(d);
    return d;
}

// disjoint union of constructions; the residual is additive
inline QCConstruction qc_concat(const QCConstruction& a, const QCConstruction& b) {
    if (a.m != b.m) throw QCError("qcyclic: union of mismatched moduli");
    QCConstruction c;
    c.m = a.m;
    c.q = a.q;
    c.q.insert(c.q.end(), b.q.begin(), b.q.end());
    std::sort(c.q.begin(), c.q.end());
    validate_qc(c);
    return c;
}

}  // namespace nearperm
