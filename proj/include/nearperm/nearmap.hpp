#pragma once

// Near maps between carriers: finitely many affine pieces (signed permutation
// matrix + translation, source rect to target cell) plus a finite exception
// table which may override pieces, cross cells of different dimensions, or
// declare points undefined.  Two maps are "near" each other when their graphs
// differ at finitely many points; all comparisons and the index are exact.

#include <nearperm/carrier.hpp>

#include <array>
#include <functional>
#include <map>
#include <set>

namespace nearperm {

// ---------------------------------------------------------------- transforms

// y = P x + t with P a signed permutation matrix (rows = target axes).
struct Transform {
    std::vector<std::vector<Int>> P;
    std::vector<Int> t;

    int dim() const { return static_cast<int>(t.size()); }
    bool operator==(const Transform&) const = default;
};

inline Transform identity_transform(int d) {
    Transform tr;
    tr.P.assign(d, std::vector<Int>(d, 0));
    for (int i = 0; i < d; ++i) tr.P[i][i] = 1;
    tr.t.assign(d, 0);
    return tr;
}

inline Transform translation(std::vector<Int> t) {
    Transform tr = identity_transform((int)t.size());
    tr.t = std::move(t);
    return tr;
}

inline void validate(const Transform& tr) {
    int d = tr.dim();
    require(d >= 1 && (int)tr.P.size() == d, "transform: shape mismatch");
    std::vector<int> col_used(d, 0);
    for (int j = 0; j < d; ++j) {
        require((int)tr.P[j].size() == d, "transform: shape mismatch");
        int hits = 0;
        for (int i = 0; i < d; ++i) {
            Int v = tr.P[j][i];
            require(v == 0 || v == 1 || v == -1, "transform: entries must be 0 or +-1");
            if (v != 0) {
                ++hits;
                ++col_used[i];
            }
        }
        require(hits == 1, "transform: not a signed permutation (row)");
    }
    for (int i = 0; i < d; ++i)
        require(col_used[i] == 1, "transform: not a signed permutation (column)");
}

// Row j's single nonzero entry: (source axis, sign).
inline std::pair<int, Int> row_action(const Transform& tr, int j) {
    for (int i = 0; i < tr.dim(); ++i)
        if (tr.P[j][i] != 0) return {i, tr.P[j][i]};
    fail("transform: zero row");
}

inline std::vector<Int> apply_transform(const Transform& tr, const std::vector<Int>& x) {
    std::vector<Int> y(tr.dim());
    for (int j = 0; j < tr.dim(); ++j) {
        auto [i, e] = row_action(tr, j);
        y[j] = e * x[i] + tr.t[j];
    }
    return y;
}

// outer(inner(x))
inline Transform compose(const Transform& outer, const Transform& inner) {
    int d = outer.dim();
    Transform out;
    out.P.assign(d, std::vector<Int>(d, 0));
    out.t.assign(d, 0);
    for (int j = 0; j < d; ++j) {
        auto [k, e] = row_action(outer, j);
        auto [i, e2] = row_action(inner, k);
        out.P[j][i] = e * e2;
        out.t[j] = e * inner.t[k] + outer.t[j];
    }
    return out;
}

inline Transform invert(const Transform& tr) {
    int d = tr.dim();
    Transform out;
    out.P.assign(d, std::vector<Int>(d, 0));
    out.t.assign(d, 0);
    for (int j = 0; j < d; ++j) {
        auto [i, e] = row_action(tr, j);
        out.P[i][j] = e;
        out.t[i] = -e * tr.t[j];
    }
    return out;
}

// Image of a rect's constraints under the transform (not domain-clipped).
inline Rect transform_rect(const Transform& tr, const Rect& in, const std::string& target_cell) {
    int d = tr.dim();
    Rect out{target_cell, std::vector<AxisConstraint>(d)};
    for (int j = 0; j < d; ++j) {
        auto [i, e] = row_action(tr, j);
        const AxisConstraint& c = in.axes[i];
        AxisConstraint nc;
        if (e == 1) {
            if (c.lo) nc.lo = *c.lo + tr.t[j];
            if (c.hi) nc.hi = *c.hi + tr.t[j];
        } else {
            if (c.hi) nc.lo = tr.t[j] - *c.hi;
            if (c.lo) nc.hi = tr.t[j] - *c.lo;
        }
        nc.q = c.q;
        nc.r = floor_mod(e * c.r + tr.t[j], c.q);
        auto canon = axis_canon(nc);
        require(canon.has_value(), "transform_rect: empty image");
        out.axes[j] = *canon;
    }
    return out;
}

// ---------------------------------------------------------------- near maps

struct Piece {
    Rect source;
    std::string target_cell;
    Transform tr;

    bool operator==(const Piece&) const = default;
};

struct NearMap {
    Carrier src, dst;
    std::vector<Piece> pieces;
    std::map<Point, std::optional<Point>> exceptions;

    bool operator==(const NearMap&) const = default;
};

inline Rect image_rect(const Piece& p) { return transform_rect(p.tr, p.source, p.target_cell); }

inline void validate(const NearMap& f) {
    validate(f.src);
    validate(f.dst);
    for (const auto& p : f.pieces) {
        validate(p.tr);
        const Cell& sc = f.src.cell(p.source.cell);
        const Cell& tc = f.dst.cell(p.target_cell);
        require(sc.dim() == (int)p.source.axes.size(), "nearmap: piece source shape");
        require(sc.dim() == tc.dim() && sc.dim() == p.tr.dim(),
                "nearmap: piece dimensions disagree");
        auto canon = make_rect(f.src, p.source.cell, p.source.axes);
        require(canon.has_value() && *canon == p.source,
                "nearmap: piece source not canonical");
        // image must land inside the target cell's domain
        Rect img = image_rect(p);
        auto clipped = make_rect(f.dst, p.target_cell, img.axes);
        require(clipped.has_value() && *clipped == img,
                "nearmap: piece image leaves the target domain");
    }
    for (size_t i = 0; i < f.pieces.size(); ++i)
        for (size_t j = i + 1; j < f.pieces.size(); ++j)
            require(!rect_intersect(f.pieces[i].source, f.pieces[j].source),
                    "nearmap: piece sources overlap");
    for (const auto& [k, v] : f.exceptions) {
        require(carrier_contains(f.src, k), "nearmap: exception key outside source");
        if (v) require(carrier_contains(f.dst, *v), "nearmap: exception value outside target");
    }
    // cofinite coverage: src minus piece sources must be finitely many points,
    // each declared in the exception table
    std::vector<Rect> srcs;
    for (const auto& p : f.pieces) srcs.push_back(p.source);
    RectSet uncovered = rectset_diff(carrier_all(f.src), rectset_normalize(srcs, f.src), f.src);
    auto n = rectset_card(uncovered);
    require(n.has_value(), "nearmap: pieces miss an infinite set");
    for (const auto& p : rectset_enumerate(uncovered))
        require(f.exceptions.count(p), "nearmap: uncovered point lacks an exception entry");
}

inline const Piece* piece_at(const NearMap& f, const Point& x) {
    for (const auto& p : f.pieces)
        if (rect_contains(p.source, x)) return &p;
    return nullptr;
}

// Value at x; nullopt = undefined there.
inline std::optional<Point> evaluate(const NearMap& f, const Point& x) {
    require(carrier_contains(f.src, x), "evaluate: point outside source carrier");
    if (auto it = f.exceptions.find(x); it != f.exceptions.end()) return it->second;
    if (const Piece* p = piece_at(f, x)) return Point{p->target_cell, apply_transform(p->tr, x.coords)};
    return std::nullopt;
}

inline NearMap identity_map(const Carrier& car) {
    NearMap f{car, car, {}, {}};
    for (const auto& c : car.cells) {
        Rect all{c.id, std::vector<AxisConstraint>(c.dim(), axis_all())};
        f.pieces.push_back(Piece{*make_rect(car, c.id, all.axes), c.id,
                                 identity_transform(c.dim())});
    }
    return f;
}

// ---------------------------------------------------------------- analysis

// Finite bookkeeping that turns a near map into an injective representative:
// image collisions are resolved by evicting all but one preimage.
struct MapAnalysis {
    bool closely_injective = false;
    bool closely_surjective = false;
    std::set<Point> evicted;        // source points dropped from the representative
    std::map<Point, Point> kept;    // contested image point -> surviving preimage
    std::set<Point> unmatched;      // image-side points with no surviving preimage
    RectSet piece_image;            // union of raw piece images
    Int undefined_count = 0;        // explicit bottom exceptions
};

inline MapAnalysis analyze(const NearMap& f) {
    MapAnalysis a;
    std::vector<Rect> imgs;
    for (const auto& p : f.pieces) imgs.push_back(image_rect(p));

    a.closely_injective = true;
    std::set<Point> hot;
    for (size_t i = 0; i < imgs.size(); ++i)
        for (size_t j = i + 1; j < imgs.size(); ++j) {
            auto ov = rect_intersect(imgs[i], imgs[j]);
            if (!ov) continue;
            if (!rect_card(*ov)) {
                a.closely_injective = false;
                continue;
            }
            std::vector<Point> pts;
            rect_enumerate(*ov, pts);
            hot.insert(pts.begin(), pts.end());
        }

    a.piece_image = rectset_normalize(imgs, f.dst);
    RectSet missing = rectset_diff(carrier_all(f.dst), a.piece_image, f.dst);
    a.closely_surjective = rectset_card(missing).has_value();

    for (const auto& [k, v] : f.exceptions) {
        if (!v) ++a.undefined_count;
        if (v) hot.insert(*v);
        if (const Piece* p = piece_at(f, k))
            hot.insert(Point{p->target_cell, apply_transform(p->tr, k.coords)});
    }
    if (a.closely_surjective)
        for (const auto& p : rectset_enumerate(missing)) hot.insert(p);

    // resolve every contested image point: exceptions win, then piece order
    for (const auto& z : hot) {
        std::vector<Point> candidates;
        for (const auto& [k, v] : f.exceptions)
            if (v && *v == z) candidates.push_back(k);
        for (size_t i = 0; i < f.pieces.size(); ++i) {
            const Piece& p = f.pieces[i];
            if (p.target_cell != z.cell) continue;
            Point x{p.source.cell, apply_transform(invert(p.tr), z.coords)};
            if (rect_contains(p.source, x) && !f.exceptions.count(x))
                candidates.push_back(x);
        }
        if (candidates.empty()) {
            a.unmatched.insert(z);
        } else {
            a.kept.emplace(z, candidates.front());
            for (size_t i = 1; i < candidates.size(); ++i) a.evicted.insert(candidates[i]);
        }
    }
    return a;
}

// ---------------------------------------------------------------- index

struct ExtInt {
    enum Tag { Finite, PlusInf, MinusInf } tag = Finite;
    Int v = 0;

    static ExtInt finite(Int x) { return {Finite, x}; }
    static ExtInt plus_inf() { return {PlusInf, 0}; }
    static ExtInt minus_inf() { return {MinusInf, 0}; }
    bool is_finite() const { return tag == Finite; }
    bool operator==(const ExtInt&) const = default;
};

inline std::string to_string(const ExtInt& e) {
    if (e.tag == ExtInt::PlusInf) return "+inf";
    if (e.tag == ExtInt::MinusInf) return "-inf";
    return std::to_string(e.v);
}

inline Json to_json(const ExtInt& e) {
    if (e.tag == ExtInt::Finite) return Json(e.v);
    return Json(to_string(e));
}

inline bool closely_injective(const NearMap& f) { return analyze(f).closely_injective; }
inline bool closely_surjective(const NearMap& f) { return analyze(f).closely_surjective; }
inline bool closely_bijective(const NearMap& f) {
    auto a = analyze(f);
    return a.closely_injective && a.closely_surjective;
}

// Image-side deficit minus source-side deficit of the injective
// representative; +inf when a cofinite image is missing, -inf when
// collisions are infinite.
inline ExtInt index(const NearMap& f) {
    MapAnalysis a = analyze(f);
    if (!a.closely_injective) return ExtInt::minus_inf();
    if (!a.closely_surjective) return ExtInt::plus_inf();
    Int dom_miss = a.undefined_count + (Int)a.evicted.size();
    Int img_miss = (Int)a.unmatched.size();
    return ExtInt::finite(img_miss - dom_miss);
}

// ---------------------------------------------------------------- compose

inline NearMap compose(const NearMap& g, const NearMap& f) {
    require(f.dst == g.src, "compose: middle carriers disagree");
    NearMap h{f.src, g.dst, {}, {}};
    for (const auto& pf : f.pieces) {
        Rect fimg = image_rect(pf);
        for (const auto& pg : g.pieces) {
            if (pg.source.cell != pf.target_cell) continue;
            auto mid = rect_intersect(fimg, pg.source);
            if (!mid) continue;
            Rect pre = transform_rect(invert(pf.tr), *mid, pf.source.cell);
            auto s = rect_intersect(pre, pf.source);
            require(s.has_value(), "compose: inconsistent preimage");
            h.pieces.push_back(Piece{*s, pg.target_cell, compose(pg.tr, pf.tr)});
        }
    }
    for (const auto& [x, y] : f.exceptions)
        h.exceptions[x] = y ? evaluate(g, *y) : std::nullopt;
    for (const auto& [z, w] : g.exceptions) {
        for (const auto& pf : f.pieces) {
            if (pf.target_cell != z.cell) continue;
            Point x{pf.source.cell, apply_transform(invert(pf.tr), z.coords)};
            if (rect_contains(pf.source, x) && !f.exceptions.count(x)) h.exceptions[x] = w;
        }
    }
    return h;
}

// ---------------------------------------------------------------- invert

inline NearMap invert(const NearMap& f) {
    MapAnalysis a = analyze(f);
    require(a.closely_injective && a.closely_surjective,
            "invert: map is not closely bijective");
    NearMap inv{f.dst, f.src, {}, {}};

    std::vector<Rect> claimed;
    for (const auto& p : f.pieces) {
        Rect img = image_rect(p);
        std::vector<Rect> frags{img};
        for (const auto& prev : claimed) {
            std::vector<Rect> next;
            for (const auto& fr : frags)
                for (auto& piece : rect_diff(fr, prev)) next.push_back(piece);
            frags = std::move(next);
        }
        for (auto& fr : frags)
            inv.pieces.push_back(Piece{fr, p.source.cell, invert(p.tr)});
        claimed.push_back(img);
    }

    // skeleton answer at z: the piece owning z in the priority disjointification
    auto skeleton = [&](const Point& z) -> std::optional<Point> {
        for (const auto& p : f.pieces) {
            if (p.target_cell != z.cell) continue;
            Rect img = image_rect(p);
            if (rect_contains(img, z))
                return Point{p.source.cell, apply_transform(invert(p.tr), z.coords)};
        }
        return std::nullopt;
    };

    std::set<Point> fixups = a.unmatched;
    for (const auto& [z, x] : a.kept) fixups.insert(z);
    for (const auto& z : fixups) {
        auto it = a.kept.find(z);
        if (it == a.kept.end()) {
            inv.exceptions[z] = std::nullopt;  // z has no preimage
        } else if (a.evicted.count(it->second)) {
            fail("invert: internal eviction inconsistency");
        } else {
            auto skel = skeleton(z);
            if (!skel || *skel != it->second) inv.exceptions[z] = it->second;
        }
    }
    return inv;
}

inline NearMap power(const NearMap& f, Int n) {
    require(f.src == f.dst, "power: endomap required");
    if (n == 0) return identity_map(f.src);
    if (n < 0) return power(invert(f), -n);
    NearMap out = f;
    for (Int i = 1; i < n; ++i) out = compose(f, out);
    return out;
}

// fgf^-1g^-1
inline NearMap commutator(const NearMap& f, const NearMap& g) {
    return compose(f, compose(g, compose(invert(f), invert(g))));
}

// ---------------------------------------------------------------- nearness

struct Disagreement {
    bool infinite = false;
    std::vector<Point> points;  // finite graph differences (excluding none)
};

namespace detail {

// Agreement conditions of two transforms on a common rect.
enum class CondStatus { AllOfRect, NoneOfRect, Proper };

inline CondStatus pair_conditions(const Rect& R, const Piece& a, const Piece& b) {
    if (a.target_cell != b.target_cell) return CondStatus::NoneOfRect;
    bool proper = false;
    auto single = [&](int i) -> std::optional<Int> {
        const auto& c = R.axes[i];
        if (c.lo && c.hi && *c.lo == *c.hi) return *c.lo;
        return std::nullopt;
    };
    for (int j = 0; j < a.tr.dim(); ++j) {
        auto [i1, e1] = row_action(a.tr, j);
        auto [i2, e2] = row_action(b.tr, j);
        Int t1 = a.tr.t[j], t2 = b.tr.t[j];
        if (i1 == i2 && e1 == e2) {
            if (t1 != t2) return CondStatus::NoneOfRect;
            continue;
        }
        if (i1 == i2) {  // e1 = -e2: 2*e1*x = t2 - t1
            Int num = e1 * (t2 - t1);
            if (num % 2 != 0) return CondStatus::NoneOfRect;
            Int c = num / 2;
            if (auto v = single(i1)) {
                if (*v != c) return CondStatus::NoneOfRect;
                continue;
            }
            if (!axis_contains(R.axes[i1], c)) return CondStatus::NoneOfRect;
            proper = true;
            continue;
        }
        // e1*x_{i1} - e2*x_{i2} = t2 - t1
        auto v1 = single(i1), v2 = single(i2);
        if (v1 && v2) {
            if (e1 * *v1 - e2 * *v2 != t2 - t1) return CondStatus::NoneOfRect;
            continue;
        }
        if (v1) {  // reduces to x_{i2} = e2^-1(e1*v1 - (t2 - t1))
            Int c = e2 * (e1 * *v1 - (t2 - t1));
            if (!axis_contains(R.axes[i2], c)) return CondStatus::NoneOfRect;
            proper = true;
            continue;
        }
        if (v2) {
            Int c = e1 * (e2 * *v2 + t2 - t1);
            if (!axis_contains(R.axes[i1], c)) return CondStatus::NoneOfRect;
            proper = true;
            continue;
        }
        proper = true;  // genuine diagonal
    }
    return proper ? CondStatus::Proper : CondStatus::AllOfRect;
}

}  // namespace detail

// Where do the graphs of f and g differ?  Either a finite point list or a
// certificate that the difference is infinite.
inline Disagreement disagreement(const NearMap& f, const NearMap& g) {
    require(f.src == g.src && f.dst == g.dst, "disagreement: carriers differ");
    Disagreement d;
    std::set<Point> keys, pts;
    for (const auto& [k, v] : f.exceptions) keys.insert(k);
    for (const auto& [k, v] : g.exceptions) keys.insert(k);

    for (const auto& pf : f.pieces) {
        for (const auto& pg : g.pieces) {
            auto R = rect_intersect(pf.source, pg.source);
            if (!R) continue;
            auto status = detail::pair_conditions(*R, pf, pg);
            if (status == detail::CondStatus::AllOfRect) continue;
            if (!rect_card(*R)) {
                if (status == detail::CondStatus::NoneOfRect) {
                    d.infinite = true;
                    return d;
                }
                // proper condition inside an infinite rect cannot be cofinite
                d.infinite = true;
                return d;
            }
            std::vector<Point> cand;
            rect_enumerate(*R, cand);
            for (const auto& x : cand) {
                if (keys.count(x)) continue;
                Point ya{pf.target_cell, apply_transform(pf.tr, x.coords)};
                Point yb{pg.target_cell, apply_transform(pg.tr, x.coords)};
                if (!(ya == yb)) pts.insert(x);
            }
        }
    }
    for (const auto& x : keys) {
        auto va = evaluate(f, x);
        auto vb = evaluate(g, x);
        if (va != vb) pts.insert(x);
    }
    d.points.assign(pts.begin(), pts.end());
    return d;
}

inline bool near_equal(const NearMap& f, const NearMap& g) {
    return !disagreement(f, g).infinite;
}

inline bool graph_equal(const NearMap& f, const NearMap& g) {
    auto d = disagreement(f, g);
    return !d.infinite && d.points.empty();
}

// ---------------------------------------------------------------- fixed sets

// Fixed points as a rect set with finite corrections:
// fixed(f) = (bulk minus `minus`) union `plus`.
struct FixedSet {
    RectSet bulk;
    std::vector<Point> plus, minus;
};

inline bool fixed_contains(const FixedSet& fs, const Point& p) {
    for (const auto& m : fs.minus)
        if (m == p) return false;
    if (rectset_contains(fs.bulk, p)) return true;
    for (const auto& q : fs.plus)
        if (q == p) return true;
    return false;
}

inline FixedSet fixed_set(const NearMap& f) {
    require(f.src == f.dst, "fixed_set: endomap required");
    FixedSet out;
    std::vector<Rect> bulk;
    std::set<Point> pointwise;
    for (const auto& p : f.pieces) {
        if (p.target_cell != p.source.cell) continue;
        // agreement with the identity: for each axis j, the condition
        // e*x_i + t = x_j
        std::vector<std::pair<int, Int>> slices;  // axis -> pinned value
        bool none = false, diag = false;
        auto single = [&](int i) -> std::optional<Int> {
            const auto& c = p.source.axes[i];
            if (c.lo && c.hi && *c.lo == *c.hi) return *c.lo;
            return std::nullopt;
        };
        for (int j = 0; j < p.tr.dim() && !none; ++j) {
            auto [i, e] = row_action(p.tr, j);
            Int t = p.tr.t[j];
            if (i == j && e == 1) {
                if (t != 0) none = true;
                continue;
            }
            if (i == j) {  // e = -1: x_j = t/2
                if (t % 2 != 0) {
                    none = true;
                    continue;
                }
                Int c = t / 2;
                if (auto v = single(j)) {
                    if (*v != c) none = true;
                } else if (!axis_contains(p.source.axes[j], c)) {
                    none = true;
                } else {
                    slices.push_back({j, c});
                }
                continue;
            }
            // cross-axis condition e*x_i + t = x_j
            auto vi = single(i), vj = single(j);
            if (vi && vj) {
                if (e * *vi + t != *vj) none = true;
            } else if (vi) {
                Int c = e * *vi + t;
                if (!axis_contains(p.source.axes[j], c)) none = true;
                else slices.push_back({j, c});
            } else if (vj) {
                Int c = e * (*vj - t);
                if (!axis_contains(p.source.axes[i], c)) none = true;
                else slices.push_back({i, c});
            } else {
                diag = true;
            }
        }
        if (none) continue;
        if (diag) {
            auto n = rect_card(p.source);
            require(n.has_value(), "fixed_set: infinite diagonal fixed locus unsupported");
            std::vector<Point> cand;
            rect_enumerate(p.source, cand);
            for (const auto& x : cand)
                if (apply_transform(p.tr, x.coords) == x.coords) pointwise.insert(x);
            continue;
        }
        Rect r = p.source;
        bool empty = false;
        for (auto [axis, c] : slices) {
            auto cut = axis_intersect(r.axes[axis], axis_point(c));
            if (!cut) {
                empty = true;
                break;
            }
            r.axes[axis] = *cut;
        }
        if (!empty) bulk.push_back(r);
    }
    out.bulk = rectset_normalize(bulk, f.src);

    std::set<Point> plus, minus;
    for (const auto& x : pointwise)
        if (!f.exceptions.count(x) && !rectset_contains(out.bulk, x)) plus.insert(x);
    for (const auto& [k, v] : f.exceptions) {
        bool fixed_now = v.has_value() && *v == k;
        bool in_bulk = rectset_contains(out.bulk, k);
        if (fixed_now && !in_bulk) plus.insert(k);
        if (!fixed_now && in_bulk) minus.insert(k);
    }
    out.plus.assign(plus.begin(), plus.end());
    out.minus.assign(minus.begin(), minus.end());
    return out;
}

// ---------------------------------------------------------------- finite perms

// A finitely supported permutation presented by its support mapping.
struct FinitePerm {
    std::map<Point, Point> moved;  // x -> f(x), f(x) != x
};

inline std::optional<FinitePerm> to_finite_perm(const NearMap& f) {
    if (!(f.src == f.dst)) return std::nullopt;
    auto d = disagreement(f, identity_map(f.src));
    if (d.infinite) return std::nullopt;
    FinitePerm fp;
    std::set<Point> values;
    for (const auto& x : d.points) {
        auto v = evaluate(f, x);
        if (!v) return std::nullopt;  // not total
        fp.moved[x] = *v;
        values.insert(*v);
    }
    // must permute its own support
    if (values.size() != fp.moved.size()) return std::nullopt;
    for (const auto& v : values)
        if (!fp.moved.count(v)) return std::nullopt;
    return fp;
}

inline bool is_finitely_supported(const NearMap& f) { return to_finite_perm(f).has_value(); }

inline std::vector<std::vector<Point>> cycles(const FinitePerm& fp) {
    std::vector<std::vector<Point>> out;
    std::set<Point> seen;
    for (const auto& [x, y] : fp.moved) {
        if (seen.count(x)) continue;
        std::vector<Point> cyc;
        Point cur = x;
        while (!seen.count(cur)) {
            seen.insert(cur);
            cyc.push_back(cur);
            cur = fp.moved.at(cur);
        }
        out.push_back(std::move(cyc));
    }
    return out;
}

// Multiset of cycle lengths (all >= 2), ascending.
inline std::vector<Int> cycle_type(const FinitePerm& fp) {
    std::vector<Int> lens;
    for (const auto& c : cycles(fp)) lens.push_back((Int)c.size());
    std::sort(lens.begin(), lens.end());
    return lens;
}

// 0 = even, 1 = odd.
inline int parity(const FinitePerm& fp) {
    Int tr = 0;
    for (const auto& c : cycles(fp)) tr += (Int)c.size() - 1;
    return (int)(tr % 2);
}

// ---------------------------------------------------------------- json

inline Json to_json(const Transform& tr) {
    return Json{{"P", tr.P}, {"t", tr.t}};
}

inline Transform transform_from_json(const Json& j) {
    Transform tr;
    tr.P = j.at("P").get<std::vector<std::vector<Int>>>();
    tr.t = j.at("t").get<std::vector<Int>>();
    validate(tr);
    return tr;
}

inline Json to_json(const Piece& p) {
    Json j;
    j["source"] = to_json(p.source);
    j["target_cell"] = p.target_cell;
    j["P"] = p.tr.P;
    j["t"] = p.tr.t;
    return j;
}

inline Piece piece_from_json(const Json& j, const Carrier& src) {
    Piece p;
    Rect raw = rect_from_json(j.at("source"));
    auto canon = make_rect(src, raw.cell, raw.axes);
    require(canon.has_value(), "json: empty piece source");
    p.source = *canon;
    p.target_cell = j.at("target_cell");
    p.tr.P = j.at("P").get<std::vector<std::vector<Int>>>();
    p.tr.t = j.at("t").get<std::vector<Int>>();
    validate(p.tr);
    return p;
}

inline Json to_json(const NearMap& f) {
    Json pieces = Json::array();
    for (const auto& p : f.pieces) pieces.push_back(to_json(p));
    Json exceptions = Json::array();
    for (const auto& [k, v] : f.exceptions) {
        Json e;
        e["from"] = to_json(k);
        e["to"] = v ? to_json(*v) : Json(nullptr);
        exceptions.push_back(e);
    }
    return Json{{"src", to_json(f.src)},
                {"dst", to_json(f.dst)},
                {"pieces", pieces},
                {"exceptions", exceptions}};
}

inline NearMap nearmap_from_json(const Json& j) {
    NearMap f;
    f.src = carrier_from_json(j.at("src"));
    f.dst = carrier_from_json(j.at("dst"));
    for (const auto& p : j.at("pieces")) f.pieces.push_back(piece_from_json(p, f.src));
    for (const auto& e : j.at("exceptions")) {
        Point from = point_from_json(e.at("from"));
        std::optional<Point> to;
        if (!e.at("to").is_null()) to = point_from_json(e.at("to"));
        f.exceptions[from] = to;
    }
    validate(f);
    return f;
}

}  // namespace nearperm
