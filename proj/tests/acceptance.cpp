// Acceptance gate for the library: twelve exact criteria, one PASS/FAIL line
// each, nonzero exit when any line fails.  Every tolerance and sample count is
// pinned as a constant below; all comparisons are exact integer comparisons.
//
// The checks deliberately recompute expected values through independent means
// (brute-force membership scans, chain-constructed square roots, direct orbit
// counts) rather than through the code paths under test.

#include <nearperm/amalgam.hpp>
#include <nearperm/catalog.hpp>
#include <nearperm/qcyclic.hpp>
#include <nearperm/z2class.hpp>

#include <algorithm>
#include <array>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace nearperm;

namespace {

// ---------------------------------------------------------------- pinned constants

constexpr Int kWindowRadius = 30;       // brute-force window for the rect algebra
constexpr int kRectInstances = 500;     // random normalize/diff instances
constexpr int kAdditivityPairs = 200;   // composed index pairs
constexpr int kInvariancePairs = 100;   // near-equal index pairs
constexpr int kRigidityTrials = 100;    // random conjugators
constexpr Int kRigidityBox = 10;        // support box for the conjugators
constexpr int kEnlargements = 20;       // window enlargements per model
constexpr int kQcRandoms = 50;          // random digit constructions
constexpr Int kGrowthRadius = 30;       // largest sampled growth radius

// ---------------------------------------------------------------- harness

int failures = 0;

template <typename F>
void criterion(int num, const std::string& what, F body) {
    std::string why;
    bool ok = false;
    try {
        ok = body(why);
    } catch (const std::exception& e) {
        why = e.what();
    }
    std::cout << (ok ? "PASS" : "FAIL") << "  " << num << "  " << what;
    if (!ok && !why.empty()) std::cout << "  [" << why << "]";
    std::cout << std::endl;
    if (!ok) ++failures;
}

// require-style helper: records the first failing condition in `why`
bool expect(bool cond, const std::string& msg, std::string& why) {
    if (!cond && why.empty()) why = msg;
    return cond;
}

// finite permutation as an everywhere-defined lookup
Point fp_apply(const FinitePerm& p, const Point& x) {
    auto it = p.moved.find(x);
    return it == p.moved.end() ? x : it->second;
}

// lift a finite permutation to a near map on the carrier
NearMap perm_map(const Carrier& car, const std::map<Point, Point>& moved) {
    NearMap f = identity_map(car);
    for (const auto& [x, y] : moved) f.exceptions[x] = y;
    validate(f);
    return f;
}

} // namespace

int main() {
    // ------------------------------------------------------------ 1: index calculus
    criterion(1, "half-line shift has index 1; additivity on 200 pairs; invariance on 100 near-equal pairs",
              [](std::string& why) {
        NearAction act = build_shift_N();
        const NearMap& sh = act.lifts[0];
        if (!expect(index(sh) == ExtInt::finite(1), "shift index is not 1", why)) return false;

        std::mt19937_64 rng(101);
        auto rand_point = [&] { return Point{"n", {Int(rng() % 61)}}; };
        auto rand_map = [&] {
            NearMap f = power(sh, Int(rng() % 9) - 4);
            int patches = int(rng() % 3);
            for (int i = 0; i < patches; ++i) {
                Point a = rand_point(), b = rand_point();
                if (a == b) continue;
                NearMap s = identity_map(act.carrier);
                s.exceptions[a] = b;
                s.exceptions[b] = a;
                f = compose(s, f);
            }
            return f;
        };

        for (int i = 0; i < kAdditivityPairs; ++i) {
            NearMap f = rand_map(), g = rand_map();
            ExtInt iF = index(f), iG = index(g), iGF = index(compose(g, f));
            if (!expect(iF.is_finite() && iG.is_finite() && iGF.is_finite(),
                        "random pair produced a non-finite index", why))
                return false;
            if (!expect(iGF.v == iF.v + iG.v, "index additivity failed", why)) return false;
        }

        for (int i = 0; i < kInvariancePairs; ++i) {
            NearMap f = rand_map();
            Point a = rand_point(), b = rand_point();
            if (a == b) b.coords[0] = (b.coords[0] + 1) % 61;
            NearMap s = identity_map(act.carrier);
            s.exceptions[a] = b;
            s.exceptions[b] = a;
            NearMap f2 = compose(s, f);
            if (!expect(near_equal(f, f2), "perturbed map is not near-equal", why)) return false;
            if (!expect(index(f) == index(f2), "index not invariant under near equality", why))
                return false;
        }
        return true;
    });

    // ------------------------------------------------------------ 2: rectangle algebra oracle
    criterion(2, "rect normalize/diff agree with brute-force membership on radius-30 windows, 500 instances",
              [](std::string& why) {
        Carrier car{{Cell{"a", {{AxisKind::FullLine, 0}, {AxisKind::FullLine, 0}}},
                     Cell{"h", {{AxisKind::HalfLine, 0}}},
                     Cell{"b", {{AxisKind::Bounded, 16}}}}};
        validate(car);
        std::vector<Point> grid = enumerate_window(car, kWindowRadius);

        std::mt19937_64 rng(202);
        const Int qs[] = {1, 1, 1, 2, 3, 4, 5};
        auto rand_rect = [&]() -> std::optional<Rect> {
            const Cell& cell = car.cells[rng() % car.cells.size()];
            std::vector<AxisConstraint> axes;
            for (size_t i = 0; i < cell.axes.size(); ++i) {
                AxisConstraint ax;
                ax.q = qs[rng() % 7];
                ax.r = Int(rng() % Int(ax.q));
                if (rng() % 2) ax.lo = Int(rng() % 51) - 25;
                if (rng() % 2) ax.hi = (ax.lo ? *ax.lo : -25) + Int(rng() % 30);
                axes.push_back(ax);
            }
            return make_rect(car, cell.id, axes);
        };
        auto raw_contains = [](const Rect& r, const Point& p) {
            if (p.cell != r.cell) return false;
            for (size_t i = 0; i < r.axes.size(); ++i) {
                const AxisConstraint& ax = r.axes[i];
                Int x = p.coords[i];
                if (ax.lo && x < *ax.lo) return false;
                if (ax.hi && x > *ax.hi) return false;
                if (floor_mod(x - ax.r, ax.q) != 0) return false;
            }
            return true;
        };
        auto in_list = [&](const std::vector<Rect>& rs, const Point& p) {
            for (const auto& r : rs)
                if (raw_contains(r, p)) return true;
            return false;
        };

        for (int inst = 0; inst < kRectInstances; ++inst) {
            std::vector<Rect> la, lb;
            size_t na = 1 + rng() % 4, nb = 1 + rng() % 3;
            for (int tries = 0; la.size() < na && tries < 64; ++tries)
                if (auto r = rand_rect()) la.push_back(*r);
            for (int tries = 0; lb.size() < nb && tries < 64; ++tries)
                if (auto r = rand_rect()) lb.push_back(*r);
            if (la.empty() || lb.empty()) continue;

            RectSet A = rectset_normalize(la, car);
            RectSet B = rectset_normalize(lb, car);
            RectSet D = rectset_diff(A, B, car);

            for (const Point& p : grid) {
                bool a0 = in_list(la, p), b0 = in_list(lb, p);
                if (!expect(rectset_contains(A, p) == a0, "normalize changed membership", why))
                    return false;
                if (!expect(rectset_contains(D, p) == (a0 && !b0), "difference membership wrong", why))
                    return false;
                int hits = 0;
                for (const auto& r : A.rects) hits += raw_contains(r, p);
                if (!expect(hits <= 1, "canonical rects overlap", why)) return false;
            }
        }
        return true;
    });

    // ------------------------------------------------------------ 3: Houghton pair
    criterion(3, "Houghton family: odd 2-cycle commutator; verified, zero index character, d+1 ends (d=2,3)",
              [](std::string& why) {
        for (int d : {2, 3}) {
            NearAction a = build_houghton_near_zd(d);
            if (!expect(verify_near_action(a).ok, "relators do not verify", why)) return false;
            if (!expect(index_character(a) == std::vector<Int>(a.lifts.size(), 0),
                        "index character is not zero", why))
                return false;
            if (!expect(ends(a) == d + 1, "wrong number of ends", why)) return false;
        }
        NearAction h = build_houghton_gens();
        auto fp = to_finite_perm(word_map(h, commutator_word(0, 1)));
        if (!expect(fp.has_value(), "commutator is not finitely supported", why)) return false;
        if (!expect(cycle_type(*fp) == std::vector<Int>{2}, "commutator is not a 2-cycle", why))
            return false;
        return expect(parity(*fp) == 1, "commutator is not odd", why);
    });

    // ------------------------------------------------------------ 4: two-seam grid
    criterion(4, "two-seam family: class (1 end, winding m, holonomy s) over the 196 grid, all distinct; swap negates s",
              [](std::string& why) {
        std::set<std::array<Int, 4>> seen;
        for (int m = 1; m <= 4; ++m)
            for (Int sx = -3; sx <= 3; ++sx)
                for (Int sy = -3; sy <= 3; ++sy) {
                    NearAction a = build_X_ms(m, {sx, sy});
                    Z2Class got = classify(a);
                    Z2Class want{1, {Z2Component{m, {sx, sy}}}};
                    if (!expect(got == want, "classification mismatch", why)) return false;
                    seen.insert({got.ends, got.components[0].winding,
                                 got.components[0].holonomy[0], got.components[0].holonomy[1]});

                    NearAction b = a;
                    std::swap(b.lifts[0], b.lifts[1]);
                    Z2Class swapped = classify(b);
                    Z2Class wantSwap{1, {Z2Component{m, {-sx, -sy}}}};
                    if (!expect(swapped == wantSwap, "generator swap did not negate holonomy", why))
                        return false;
                }
        return expect(seen.size() == 196, "grid classes are not pairwise distinct", why);
    });

    // ------------------------------------------------------------ 5: spiral family
    criterion(5, "spiral family: winding 1, holonomy (l,0), index character (0,-l) for l=1,2,3",
              [](std::string& why) {
        for (Int l = 1; l <= 3; ++l) {
            NearAction a = build_K(l);
            Z2Class want{1, {Z2Component{1, {l, 0}}}};
            if (!expect(classify(a) == want, "classification mismatch", why)) return false;
            if (!expect(index_character(a) == std::vector<Int>{0, -l}, "index character mismatch", why))
                return false;
        }
        return true;
    });

    // ------------------------------------------------------------ 6: parity
    criterion(6, "parity (m-1) mod 2 on the untwisted family; two-line commutator is an odd transposition",
              [](std::string& why) {
        for (int m = 2; m <= 5; ++m)
            if (!expect(kapoudjian_parity(build_X_ms(m, {0, 0})) == (m - 1) % 2,
                        "parity mismatch on the untwisted family", why))
                return false;
        NearAction e = build_exzz2();
        auto fp = to_finite_perm(word_map(e, commutator_word(0, 1)));
        if (!expect(fp.has_value(), "commutator is not finitely supported", why)) return false;
        if (!expect(cycle_type(*fp) == std::vector<Int>{2}, "commutator is not a transposition", why))
            return false;
        Point up{"p", {0}}, down{"m", {0}};
        if (!expect(fp_apply(*fp, up) == down && fp_apply(*fp, down) == up,
                    "transposition does not swap the two seam origins", why))
            return false;
        return expect(parity(*fp) == 1, "commutator is not odd", why);
    });

    // ------------------------------------------------------------ 7: tower of square roots
    criterion(7, "tower: f_k^2 vs f_{k-1} discrepancy confined to block k (k=1..6); base map has no square root",
              [](std::string& why) {
        ScottTower t = build_scott_tower(8);
        if (!expect(t.f.size() == 9, "tower is too short", why)) return false;
        std::vector<Point> pts = enumerate_window(t.carrier, 1);

        for (int k = 1; k <= 6; ++k) {
            NearMap sq = compose(t.f[k], t.f[k]);
            const std::string blk = block_id(k);
            Int size = Int(1) << k, differ = 0;
            for (const Point& p : pts) {
                auto lhs = evaluate(sq, p);
                auto rhs = evaluate(t.f[k - 1], p);
                if (!expect(lhs && rhs, "tower map is not total", why)) return false;
                if (p.cell == blk) {
                    if (!expect(rhs->coords[0] == (lhs->coords[0] + 2) % size,
                                "on-block discrepancy is not +2", why))
                        return false;
                    differ += (*lhs != *rhs);
                } else if (!expect(*lhs == *rhs, "maps differ off the designated block", why)) {
                    return false;
                }
            }
            // +2 reduces to the identity on the 2-point block, and moves every
            // point of each larger block
            Int wantDiffer = (k == 1) ? 0 : size;
            if (!expect(differ == wantDiffer, "wrong discrepancy support size", why)) return false;
        }

        auto base_fp = to_finite_perm(t.base);
        if (!expect(base_fp.has_value(), "base map is not finitely supported", why)) return false;
        FinitePerm trunc;
        for (const auto& [x, y] : base_fp->moved)
            if (x.cell <= block_id(4)) trunc.moved[x] = y;
        if (!expect(!root_obstruction(trunc, 1), "cycle-count criterion claims a root exists", why))
            return false;
        if (!expect(!find_square_root(trunc).has_value(), "constructive search found a root", why))
            return false;

        // Independent brute force.  All cycle lengths in the truncation are
        // distinct, so any square root must preserve each block; on a single
        // B-cycle a root is determined by the image of one point, giving B
        // candidates to test per block.
        for (int n = 0; n <= 4; ++n) {
            Int B = Int(1) << n;
            std::vector<Point> cyc;
            Point p{block_id(n), {0}};
            for (Int i = 0; i < B; ++i) {
                cyc.push_back(p);
                auto q = evaluate(t.base, p);
                if (!expect(q.has_value(), "base map is not total", why)) return false;
                p = *q;
            }
            if (!expect(p == cyc[0], "block is not a single cycle", why)) return false;

            bool found = false;
            for (Int j = 0; j < B && !found; ++j) {
                std::vector<Int> sigma(size_t(B), -1);
                sigma[0] = j;
                for (Int step = 0; step < 2 * B; ++step)
                    for (Int i = 0; i < B; ++i)
                        if (sigma[size_t(i)] >= 0 && sigma[size_t(sigma[size_t(i)])] < 0)
                            sigma[size_t(sigma[size_t(i)])] = (i + 1) % B;
                bool good = true;
                std::vector<char> hit(size_t(B), 0);
                for (Int i = 0; i < B; ++i) {
                    Int s = sigma[size_t(i)];
                    good = good && s >= 0 && !hit[size_t(s)] && sigma[size_t(s)] == (i + 1) % B;
                    if (s >= 0) hit[size_t(s)] = 1;
                }
                found = good;
            }
            bool wantRoot = (n == 0);  // only the fixed point has a square root
            if (!expect(found == wantRoot, "brute-force root search disagrees", why)) return false;
        }
        return true;
    });

    // ------------------------------------------------------------ 8: window invariant
    criterion(8, "window invariant: 1 on standard windows; doubling gives 2 mod p; stable under 20 enlargements; 0 on realizable windows",
              [](std::string& why) {
        AmalgamModel m22 = build_amalgam_model(2, 2, 8);
        AmalgamModel m33 = build_amalgam_model(3, 3, 6);
        if (!expect(amalgam_invariant(m22.data, m22.designated) == 1, "standard (2,2) window is not 1", why))
            return false;
        if (!expect(amalgam_invariant(m33.data, m33.designated) == 1, "standard (3,3) window is not 1", why))
            return false;

        for (const AmalgamModel* m : {&m22, &m33}) {
            AmalgamData dd = amalgam_disjoint_union(m->data, m->data);
            std::vector<int> y = m->designated;
            for (int i : m->designated) y.push_back(i + int(m->data.points.size()));
            Int p = m->data.p;
            if (!expect(amalgam_invariant(dd, y) == 2 % p, "doubled window is not 2 mod p", why))
                return false;
        }

        for (int seed = 1; seed <= kEnlargements; ++seed) {
            const AmalgamModel& m = (seed % 2) ? m22 : m33;
            std::vector<int> y = amalgam_random_enlargement(m.data, m.designated, 1 + seed % 3, seed);
            if (!expect(amalgam_invariant(m.data, y) == 1, "enlargement changed the invariant", why))
                return false;
        }

        for (auto [p, n] : {std::pair<Int, Int>{2, 2}, std::pair<Int, Int>{3, 3}}) {
            AmalgamData r = build_realizable_window(p, n);
            if (!expect(amalgam_defects(r).empty(), "realizable window has defects", why)) return false;
            if (!expect(amalgam_invariant(r, {}) == 0, "realizable window is not 0", why)) return false;
        }
        return true;
    });

    // ------------------------------------------------------------ 9: residual digits
    criterion(9, "residual digits: closed form matches the direct count on 50 random constructions; round trip and additivity exact",
              [](std::string& why) {
        if (!expect(residual_truncation(QCConstruction{2, {2}}, 1) == 0, "depth-2 block at precision 1", why))
            return false;
        if (!expect(residual_truncation(QCConstruction{2, {1}}, 2) == 2, "depth-1 block at precision 2", why))
            return false;
        QCConstruction three{2, {1, 1, 2}};
        if (!expect(direct_count_oracle(three, 3) == 8, "direct count at precision 3", why)) return false;

        std::mt19937_64 rng(907);
        const Int ms[] = {2, 3, 5};
        auto mod_pow = [](Int m, Int n) {
            Int v = 1;
            for (Int i = 0; i < n; ++i) v *= m;
            return v;
        };
        for (int trial = 0; trial < kQcRandoms; ++trial) {
            Int m = ms[rng() % 3];
            Int maxq = (m == 5) ? 5 : 7;
            QCConstruction c{m, {}};
            size_t len = rng() % 4;
            for (size_t i = 0; i < len; ++i) c.q.push_back(Int(rng() % Int(maxq + 1)));
            std::sort(c.q.begin(), c.q.end());
            Int n = 1 + Int(rng() % 6);
            Int level = mod_pow(m, n);
            Int res = residual_truncation(c, n);
            Int cnt = direct_count_oracle(c, n);
            if (!expect((cnt - res) % level == 0, "oracle and closed form disagree", why)) return false;
        }

        // digit streams: random valid streams must reconstruct exactly
        for (int trial = 0; trial < 25; ++trial) {
            Int m = ms[rng() % 3];
            Int N = 2 + Int(rng() % 4);
            DigitStream d{m, {0}};
            Int level = 1;
            for (Int n = 1; n <= N; ++n) {
                d.s.push_back(d.s.back() + Int(rng() % Int(m)) * level);
                level *= m;
            }
            validate_stream(d);
            std::vector<Int> blocks = digits_to_blocks(d, N);
            QCConstruction c = blocks_to_construction(m, blocks);
            Int lv = 1;
            for (Int n = 1; n <= N; ++n) {
                lv *= m;
                if (!expect(floor_mod(residual_truncation(c, n), lv) == d.s[size_t(n)],
                            "round trip does not reproduce the stream", why))
                    return false;
            }
        }

        // additivity of both the closed form and the unreduced count
        for (int trial = 0; trial < 20; ++trial) {
            Int m = ms[rng() % 3];
            Int maxq = (m == 5) ? 4 : 6;
            auto rand_c = [&] {
                QCConstruction c{m, {}};
                size_t len = rng() % 3;
                for (size_t i = 0; i < len; ++i) c.q.push_back(Int(rng() % Int(maxq + 1)));
                std::sort(c.q.begin(), c.q.end());
                return c;
            };
            QCConstruction c1 = rand_c(), c2 = rand_c();
            QCConstruction cc = qc_concat(c1, c2);
            Int n = 1 + Int(rng() % 4);
            Int level = mod_pow(m, n);
            Int sum = floor_mod(residual_truncation(c1, n) + residual_truncation(c2, n), level);
            if (!expect(residual_truncation(cc, n) == sum, "closed form is not additive", why))
                return false;
            if (!expect(direct_count_oracle(cc, n) ==
                            direct_count_oracle(c1, n) + direct_count_oracle(c2, n),
                        "direct count is not additive", why))
                return false;
        }
        return true;
    });

    // ------------------------------------------------------------ 10: rigidity
    criterion(10, "rigidity: conjugator recovered exactly in 100 random trials; non-genuine perturbation rejected",
              [](std::string& why) {
        NearAction alpha = build_simply_transitive(2);
        std::mt19937_64 rng(424242);
        auto rand_coord = [&] { return Int(rng() % (2 * kRigidityBox + 1)) - kRigidityBox; };

        for (int trial = 0; trial < kRigidityTrials; ++trial) {
            std::map<Point, Point> moved;
            while (moved.empty()) {
                std::set<Point> support;
                size_t k = 2 + rng() % 6;
                while (support.size() < k) support.insert(Point{"p", {rand_coord(), rand_coord()}});
                std::vector<Point> src(support.begin(), support.end()), dst = src;
                std::shuffle(dst.begin(), dst.end(), rng);
                for (size_t i = 0; i < src.size(); ++i)
                    if (src[i] != dst[i]) moved[src[i]] = dst[i];
            }
            std::map<Point, Point> inv;
            for (const auto& [x, y] : moved) inv[y] = x;
            NearMap smap = perm_map(alpha.carrier, moved);
            NearMap sinv = perm_map(alpha.carrier, inv);

            NearAction beta = alpha;
            for (auto& f : beta.lifts) f = compose(compose(smap, f), sinv);
            FinitePerm rec = rigidity_conjugator(alpha, beta);
            if (!expect(rec.moved == moved, "recovered conjugator differs", why)) return false;
        }

        // perturbing a single lift breaks the relator, so no conjugator exists
        NearAction bad = alpha;
        NearMap s = identity_map(alpha.carrier);
        s.exceptions[Point{"p", {0, 0}}] = Point{"p", {1, 2}};
        s.exceptions[Point{"p", {1, 2}}] = Point{"p", {0, 0}};
        bad.lifts[0] = compose(s, bad.lifts[0]);
        try {
            rigidity_conjugator(alpha, bad);
            return expect(false, "perturbed action was not rejected", why);
        } catch (const RigidityError& e) {
            return expect(std::string(e.what()).size() > 0, "empty obstruction report", why);
        }
    });

    // ------------------------------------------------------------ 11: ends and commensurated sets
    criterion(11, "ends 2 and 4 on line actions; two index-0 commensurated sets meet in restricted index number 1",
              [](std::string& why) {
        if (!expect(ends(build_simply_transitive(1)) == 2, "line action does not have 2 ends", why))
            return false;
        NearAction a2 = build_free_orbits(1, 2);
        if (!expect(ends(a2) == 4, "doubled line does not have 4 ends", why)) return false;

        const Carrier& car = a2.carrier;
        RectSet y1 = rectset_of(car, {*make_rect(car, "c0", {axis_range(0, std::nullopt)}),
                                      *make_rect(car, "c1", {axis_range(std::nullopt, -1)})});
        RectSet y2 = rectset_of(car, {*make_rect(car, "c0", {axis_all()})});

        CommReport r1 = commensurated_test(a2, y1);
        CommReport r2 = commensurated_test(a2, y2);
        if (!expect(r1.commensurated && restricted_index_number(r1) == 0,
                    "first set is not commensurated of index 0", why))
            return false;
        if (!expect(r2.commensurated && restricted_index_number(r2) == 0,
                    "second set is not commensurated of index 0", why))
            return false;

        CommReport ri = commensurated_test(a2, rectset_intersect(y1, y2, car));
        if (!expect(ri.commensurated, "intersection is not commensurated", why)) return false;
        return expect(restricted_index_number(ri) == 1, "intersection index number is not 1", why);
    });

    // ------------------------------------------------------------ 12: growth
    criterion(12, "growth inequality b(3r/2) <= b(r)(1+b0(2r/3)) holds up to radius 30 on three base actions",
              [](std::string& why) {
        struct CasePair {
            NearAction a;
            Point base;
        };
        std::vector<CasePair> cases;
        cases.push_back({build_X_ms(2, {0, 0}), Point{"s0", {0, 0}}});
        cases.push_back({build_K(1), Point{"p", {0, 0}}});
        cases.push_back({build_simply_transitive(2), Point{"p", {0, 0}}});
        for (const auto& c : cases) {
            GrowthReport rep = growth_inequality_check(c.a, c.base, kGrowthRadius);
            if (!expect(rep.threshold <= kGrowthRadius, "threshold exceeds the sampled range", why))
                return false;
            if (!expect((Int)rep.samples.size() == kGrowthRadius &&
                            rep.samples.back().r == kGrowthRadius,
                        "sampling does not reach radius 30", why))
                return false;
            if (!expect(rep.ok, "growth inequality fails in the sampled range", why)) return false;
        }
        return true;
    });

    std::cout << (12 - failures) << "/12 criteria passed" << std::endl;
    return failures == 0 ? 0 : 1;
}
