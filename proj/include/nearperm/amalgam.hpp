#pragma once

// The mod-p realizability invariant for the amalgam
//
//     G = C_{pn} *_{C_p} C_{p^2} = < t, u : t^{pn} = u^{p^2} = 1, t^n = u^p >.
//
// Window data holds two honest finite permutations t, u with the exact order
// relations; the invariant counts the p-cycles of t^n on a u-invariant set
// Y' containing every interior point where t^n and u^p disagree. The model
// builder realizes the canonical non-realizable example: G acts on itself by
// left translation, restricted to the elements whose image in C_n * C_p ends
// with no nontrivial u-syllable; elements are coded as pairs (reduced word,
// central coordinate), the window keeps words of bounded syllable length,
// and each generator is truncated to the union of its complete orbits so the
// order relations stay exact. Points whose short neighborhood reaches the
// truncation sphere are excluded from the certified interior: on the sphere
// the two sides of t^n = u^p are cut at different times, which manufactures
// spurious defects that an infinite carrier does not have.

#include <nearperm/carrier.hpp>

#include <random>

namespace nearperm {

struct AmalgamError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AmalgamData {
    Int p = 2;
    Int n = 2;  // a positive multiple of p
    std::vector<std::string> points;
    std::vector<int> t, u;       // bijection arrays over points
    std::vector<char> interior;  // margin certificate per point
    bool t_order_certified = false;
    bool u_order_certified = false;
};

struct EvidenceRow {
    Int radius = 0;
    Int t_diff = 0;  // |(t X △ X) ∩ ball|
    Int u_diff = 0;  // |(u X △ X) ∩ ball|
};

struct AmalgamModel {
    AmalgamData data;
    std::vector<int> designated;  // Y': the central fiber
    std::vector<EvidenceRow> evidence;
    Int boundary_artifacts = 0;  // defect points outside the interior
};

namespace amdetail {

inline bool is_prime(Int p) {
    if (p < 2) return false;
    for (Int d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

inline std::vector<int> perm_pow(const std::vector<int>& f, Int k) {
    std::vector<int> out(f.size()), acc(f.size());
    for (size_t i = 0; i < f.size(); ++i) out[i] = (int)i;
    for (Int j = 0; j < k; ++j) {
        for (size_t i = 0; i < f.size(); ++i) acc[i] = f[out[i]];
        out.swap(acc);
    }
    return out;
}

inline void check_bijection(const std::vector<int>& f, size_t n, const char* who) {
    if (f.size() != n) throw AmalgamError(std::string(who) + ": size mismatch");
    std::vector<char> hit(n, 0);
    for (int v : f) {
        if (v < 0 || (size_t)v >= n || hit[v])
            throw AmalgamError(std::string(who) + ": not a bijection");
        hit[v] = 1;
    }
}

// a group element as (reduced word of C_n * C_p, central coordinate):
// syllables alternate between generator 0 (order n) and 1 (order p)
struct Element {
    std::vector<std::pair<int, Int>> w;
    Int c = 0;
    auto operator<=>(const Element&) const = default;
};

inline Element left_t(Element x, Int n, Int p) {
    if (!x.w.empty() && x.w.front().first == 0) {
        if (++x.w.front().second == n) {
            x.w.erase(x.w.begin());
            x.c = (x.c + 1) % p;
        }
    } else {
        x.w.insert(x.w.begin(), {0, 1});
    }
    return x;
}

inline Element left_u(Element x, Int n, Int p) {
    (void)n;
    if (!x.w.empty() && x.w.front().first == 1) {
        if (++x.w.front().second == p) {
            x.w.erase(x.w.begin());
            x.c = (x.c + 1) % p;
        }
    } else {
        x.w.insert(x.w.begin(), {1, 1});
    }
    return x;
}

inline Element left_t_inv(Element x, Int n, Int p) {
    for (Int k = 0; k < p * n - 1; ++k) x = left_t(x, n, p);
    return x;
}

inline Element left_u_inv(Element x, Int n, Int p) {
    for (Int k = 0; k < p * p - 1; ++k) x = left_u(x, n, p);
    return x;
}

// membership in the commensurated subset: the word must not end with a
// nontrivial u-syllable
inline bool in_tail_class(const Element& x) {
    return x.w.empty() || x.w.back().first == 0;
}

inline std::string label_of(const Element& x) {
    std::string s;
    for (const auto& [g, e] : x.w)
        s += (g == 0 ? "t" : "u") + std::to_string(e) + ".";
    if (s.empty()) s = "1.";
    return s + "z" + std::to_string(x.c);
}

}  // namespace amdetail

inline void validate_amalgam(AmalgamData& d) {
    if (!amdetail::is_prime(d.p)) throw AmalgamError("amalgam: p must be prime");
    if (d.n < d.p || d.n % d.p != 0)
        throw AmalgamError("amalgam: n must be a positive multiple of p");
    size_t N = d.points.size();
    amdetail::check_bijection(d.t, N, "amalgam t");
    amdetail::check_bijection(d.u, N, "amalgam u");
    if (d.interior.size() != N) throw AmalgamError("amalgam: interior size mismatch");
    auto is_id = [](const std::vector<int>& f) {
        for (size_t i = 0; i < f.size(); ++i)
            if (f[i] != (int)i) return false;
        return true;
    };
    d.t_order_certified = is_id(amdetail::perm_pow(d.t, d.p * d.n));
    d.u_order_certified = is_id(amdetail::perm_pow(d.u, d.p * d.p));
    if (!d.t_order_certified) throw AmalgamError("amalgam: t^(pn) is not the identity");
    if (!d.u_order_certified) throw AmalgamError("amalgam: u^(p^2) is not the identity");
}

// interior points where t^n and u^p disagree
inline std::vector<int> amalgam_defects(const AmalgamData& d) {
    auto tn = amdetail::perm_pow(d.t, d.n);
    auto up = amdetail::perm_pow(d.u, d.p);
    std::vector<int> out;
    for (size_t i = 0; i < d.points.size(); ++i)
        if (d.interior[i] && tn[i] != up[i]) out.push_back((int)i);
    return out;
}

// number of p-cycles of t^n restricted to Y', mod p
inline Int amalgam_invariant(const AmalgamData& d, const std::vector<int>& Yp) {
    std::set<int> y(Yp.begin(), Yp.end());
    for (int i : y) {
        if (i < 0 || (size_t)i >= d.points.size())
            throw AmalgamError("amalgam: Y' index out of range");
        if (!d.interior[i]) throw AmalgamError("amalgam: Y' reaches the window boundary");
        if (!y.count(d.u[i])) throw AmalgamError("amalgam: Y' is not u-invariant");
    }
    for (int i : amalgam_defects(d))
        if (!y.count(i)) throw AmalgamError("amalgam: Y' misses a defect point");
    auto tn = amdetail::perm_pow(d.t, d.n);
    for (int i : y)
        if (!y.count(tn[i])) throw AmalgamError("amalgam: Y' is not t^n-invariant");
    std::set<int> seen;
    Int pcycles = 0;
    for (int s : y) {
        if (seen.count(s)) continue;
        Int len = 0;
        int x = s;
        do {
            seen.insert(x);
            ++len;
            x = tn[x];
        } while (x != s);
        if (len == d.p) ++pcycles;
    }
    return pcycles % d.p;
}

inline AmalgamModel build_amalgam_model(Int p, Int n, Int L) {
    using namespace amdetail;
    if (!is_prime(p)) throw AmalgamError("amalgam: p must be prime");
    if (n < p || n % p != 0) throw AmalgamError("amalgam: n must be a positive multiple of p");
    if (L < 3) throw AmalgamError("amalgam: L must be at least 3");

    // reduced words of C_n * C_p up to syllable length L
    std::vector<std::vector<std::pair<int, Int>>> words{{}};
    size_t lo = 0, hi = 1;
    for (Int len = 1; len <= L; ++len) {
        size_t next = words.size();
        for (size_t i = lo; i < hi; ++i)
            for (int g : {0, 1}) {
                if (!words[i].empty() && words[i].back().first == g) continue;
                Int order = (g == 0 ? n : p);
                for (Int e = 1; e < order; ++e) {
                    auto w = words[i];
                    w.push_back({g, e});
                    words.push_back(std::move(w));
                }
            }
        lo = next;
        hi = words.size();
        if (words.size() > 400000) throw AmalgamError("amalgam: window too large");
    }

    // the window: tail-class words, all central coordinates
    std::vector<Element> pts;
    for (const auto& w : words) {
        Element e{w, 0};
        if (!in_tail_class(e)) continue;
        for (Int c = 0; c < p; ++c) pts.push_back({w, c});
    }
    std::sort(pts.begin(), pts.end());
    std::map<Element, int> index;
    for (size_t i = 0; i < pts.size(); ++i) index[pts[i]] = (int)i;

    AmalgamModel m;
    m.data.p = p;
    m.data.n = n;
    for (const auto& e : pts) m.data.points.push_back(label_of(e));
    m.data.t.resize(pts.size());
    m.data.u.resize(pts.size());
    m.data.interior.resize(pts.size());

    // truncate each generator to its complete orbits so the orders are exact
    for (size_t i = 0; i < pts.size(); ++i) {
        bool whole = true;
        Element x = pts[i];
        for (Int k = 0; k < p * n && whole; ++k) {
            x = left_t(x, n, p);
            whole = index.count(x) != 0;
        }
        m.data.t[i] = whole ? index.at(left_t(pts[i], n, p)) : (int)i;
    }
    for (size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].w.empty()) {  // the patched generator fixes the central fiber
            m.data.u[i] = (int)i;
            continue;
        }
        bool whole = true;
        Element x = pts[i];
        for (Int k = 0; k < p * p && whole; ++k) {
            x = left_u(x, n, p);
            whole = index.count(x) != 0;
        }
        m.data.u[i] = whole ? index.at(left_u(pts[i], n, p)) : (int)i;
    }
    for (size_t i = 0; i < pts.size(); ++i)
        m.data.interior[i] = (Int)pts[i].w.size() <= L - 2;

    validate_amalgam(m.data);

    for (size_t i = 0; i < pts.size(); ++i)
        if (pts[i].w.empty()) m.designated.push_back((int)i);

    // the designated set must be exactly the certified defect set
    if (amalgam_defects(m.data) != m.designated)
        throw AmalgamError("amalgam: designated fiber does not match the defect set");
    auto tn = perm_pow(m.data.t, n);
    auto up = perm_pow(m.data.u, p);
    Int defects_total = 0;
    for (size_t i = 0; i < pts.size(); ++i)
        if (tn[i] != up[i]) ++defects_total;
    m.boundary_artifacts = defects_total - (Int)m.designated.size();

    // commensuration evidence: |(gX △ X) ∩ ball| for g = t, u, by honest
    // membership tests on the full group ball (y ∈ gX iff g^{-1} y ∈ X)
    for (Int r = 0; r + 1 <= L; ++r) {
        EvidenceRow row;
        row.radius = r;
        for (const auto& w : words) {
            if ((Int)w.size() > r) continue;
            for (Int c = 0; c < p; ++c) {
                Element y{w, c};
                bool a = in_tail_class(y);
                if (a != in_tail_class(left_t_inv(y, n, p))) ++row.t_diff;
                if (a != in_tail_class(left_u_inv(y, n, p))) ++row.u_diff;
            }
        }
        m.evidence.push_back(row);
    }
    return m;
}

// relabeled disjoint union; the invariant is additive across the parts
inline AmalgamData amalgam_disjoint_union(const AmalgamData& a, const AmalgamData& b) {
    if (a.p != b.p || a.n != b.n) throw AmalgamError("amalgam: union of mismatched parameters");
    AmalgamData d;
    d.p = a.p;
    d.n = a.n;
    for (const auto& s : a.points) d.points.push_back("L:" + s);
    for (const auto& s : b.points) d.points.push_back("R:" + s);
    int off = (int)a.points.size();
    d.t = a.t;
    d.u = a.u;
    for (int v : b.t) d.t.push_back(v + off);
    for (int v : b.u) d.u.push_back(v + off);
    d.interior = a.interior;
    d.interior.insert(d.interior.end(), b.interior.begin(), b.interior.end());
    validate_amalgam(d);
    return d;
}

// a fully realizable window: the regular action of the finite abelian group
// (C_{pn} x C_{p^2}) / <(n, -p)>, where t^n = u^p holds everywhere
inline AmalgamData build_realizable_window(Int p, Int n) {
    if (!amdetail::is_prime(p)) throw AmalgamError("amalgam: p must be prime");
    if (n < p || n % p != 0) throw AmalgamError("amalgam: n must be a positive multiple of p");
    Int pn = p * n, pp = p * p;
    auto canon = [&](Int i, Int j) {
        std::pair<Int, Int> best{-1, -1};
        for (Int k = 0; k < p; ++k) {
            std::pair<Int, Int> cand{floor_mod(i + k * n, pn), floor_mod(j - k * p, pp)};
            if (best.first < 0 || cand < best) best = cand;
        }
        return best;
    };
    std::vector<std::pair<Int, Int>> reps;
    for (Int i = 0; i < pn; ++i)
        for (Int j = 0; j < pp; ++j)
            if (canon(i, j) == std::make_pair(i, j)) reps.push_back({i, j});
    std::map<std::pair<Int, Int>, int> index;
    for (size_t k = 0; k < reps.size(); ++k) index[reps[k]] = (int)k;
    AmalgamData d;
    d.p = p;
    d.n = n;
    for (const auto& [i, j] : reps)
        d.points.push_back("(" + std::to_string(i) + "," + std::to_string(j) + ")");
    for (const auto& [i, j] : reps) {
        d.t.push_back(index.at(canon(i + 1, j)));
        d.u.push_back(index.at(canon(i, j + 1)));
    }
    d.interior.assign(reps.size(), 1);
    validate_amalgam(d);
    return d;
}

// grow Y' by complete u-orbits drawn from the certified interior; used to
// exercise the independence of the invariant from the choice of Y'
inline std::vector<int> amalgam_random_enlargement(const AmalgamData& d,
                                                   const std::vector<int>& base, int clusters,
                                                   std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::set<int> y(base.begin(), base.end());
    std::uniform_int_distribution<int> pick(0, (int)d.points.size() - 1);
    int added = 0, attempts = 0;
    while (added < clusters && attempts < 20000) {
        ++attempts;
        int s = pick(rng);
        if (y.count(s)) continue;
        std::vector<int> orbit;
        bool ok = true;
        int x = s;
        do {
            if (!d.interior[x]) {
                ok = false;
                break;
            }
            orbit.push_back(x);
            x = d.u[x];
        } while (x != s);
        if (!ok) continue;
        y.insert(orbit.begin(), orbit.end());
        ++added;
    }
    if (added < clusters) throw AmalgamError("amalgam: could not sample interior clusters");
    return {y.begin(), y.end()};
}

}  // namespace nearperm
