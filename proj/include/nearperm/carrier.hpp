#pragma once

// Carrier sets presented by finite data: disjoint unions of "cells", each a
// finite product of axis domains (full line Z, half line N, or a bounded
// interval [0,n)).  Subsets are handled exactly as finite unions of rects:
// per-axis interval constraints refined by an arithmetic progression
// (lo <= x <= hi, x = r mod q).  All set algebra is exact.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace nearperm {

using Int = long long;
using Json = nlohmann::ordered_json;

[[noreturn]] inline void fail(const std::string& msg) {
    throw std::runtime_error(msg);
}

inline void require(bool cond, const std::string& msg) {
    if (!cond) fail(msg);
}

// ---------------------------------------------------------------- cells

enum class AxisKind { FullLine, HalfLine, Bounded };

struct AxisDomain {
    AxisKind kind = AxisKind::FullLine;
    Int n = 0;  // extent, Bounded only: domain is [0, n)

    bool contains(Int x) const {
        switch (kind) {
            case AxisKind::FullLine: return true;
            case AxisKind::HalfLine: return x >= 0;
            case AxisKind::Bounded: return x >= 0 && x < n;
        }
        return false;
    }
    std::optional<Int> min() const {
        return kind == AxisKind::FullLine ? std::nullopt : std::optional<Int>(0);
    }
    std::optional<Int> max() const {
        return kind == AxisKind::Bounded ? std::optional<Int>(n - 1) : std::nullopt;
    }
    bool operator==(const AxisDomain&) const = default;
};

struct Cell {
    std::string id;
    std::vector<AxisDomain> axes;

    int dim() const { return static_cast<int>(axes.size()); }
    bool operator==(const Cell&) const = default;
};

struct Carrier {
    std::vector<Cell> cells;

    const Cell& cell(const std::string& id) const {
        for (const auto& c : cells)
            if (c.id == id) return c;
        fail("carrier: no cell '" + id + "'");
    }
    bool has(const std::string& id) const {
        for (const auto& c : cells)
            if (c.id == id) return true;
        return false;
    }
    bool operator==(const Carrier&) const = default;
};

inline void validate(const Carrier& car) {
    std::set<std::string> seen;
    require(!car.cells.empty(), "carrier: empty");
    for (const auto& c : car.cells) {
        require(!c.id.empty(), "carrier: empty cell id");
        require(seen.insert(c.id).second, "carrier: duplicate cell id '" + c.id + "'");
        require(c.dim() >= 1 && c.dim() <= 4, "carrier: cell dimension out of range [1,4]");
        for (const auto& a : c.axes)
            if (a.kind == AxisKind::Bounded)
                require(a.n >= 1, "carrier: bounded axis needs extent >= 1");
    }
}

struct Point {
    std::string cell;
    std::vector<Int> coords;

    auto operator<=>(const Point&) const = default;
};

inline bool carrier_contains(const Carrier& car, const Point& p) {
    if (!car.has(p.cell)) return false;
    const Cell& c = car.cell(p.cell);
    if ((int)p.coords.size() != c.dim()) return false;
    for (int i = 0; i < c.dim(); ++i)
        if (!c.axes[i].contains(p.coords[i])) return false;
    return true;
}

// ---------------------------------------------------------------- rects

// x in [lo, hi] (missing bound = unbounded) and x = r (mod q).
// Canonical form: 0 <= r < q; lo/hi aligned onto the progression; a single
// point collapses to q = 1, r = 0.
struct AxisConstraint {
    std::optional<Int> lo, hi;
    Int r = 0;
    Int q = 1;

    bool operator==(const AxisConstraint&) const = default;
};

inline AxisConstraint axis_all() { return {}; }
inline AxisConstraint axis_range(std::optional<Int> lo, std::optional<Int> hi) {
    return {lo, hi, 0, 1};
}
inline AxisConstraint axis_point(Int v) { return {v, v, 0, 1}; }

constexpr Int kStrideCap = 1 << 20;

inline Int floor_mod(Int a, Int m) {
    Int v = a % m;
    return v < 0 ? v + m : v;
}

// Largest-known canonical form; empty constraint becomes nullopt.
inline std::optional<AxisConstraint> axis_canon(AxisConstraint c) {
    require(c.q >= 1, "axis: stride must be positive");
    c.r = floor_mod(c.r, c.q);
    if (c.lo) *c.lo = *c.lo + floor_mod(c.r - *c.lo, c.q);
    if (c.hi) *c.hi = *c.hi - floor_mod(*c.hi - c.r, c.q);
    if (c.lo && c.hi) {
        if (*c.lo > *c.hi) return std::nullopt;
        if (*c.lo == *c.hi) return AxisConstraint{*c.lo, *c.hi, 0, 1};
    }
    return c;
}

// Clip to the axis domain, then canonicalize.
inline std::optional<AxisConstraint> axis_clip(AxisConstraint c, const AxisDomain& dom) {
    if (auto m = dom.min()) c.lo = c.lo ? std::max(*c.lo, *m) : *m;
    if (auto m = dom.max()) c.hi = c.hi ? std::min(*c.hi, *m) : *m;
    return axis_canon(c);
}

inline bool axis_contains(const AxisConstraint& c, Int x) {
    if (c.lo && x < *c.lo) return false;
    if (c.hi && x > *c.hi) return false;
    return floor_mod(x - c.r, c.q) == 0;
}

// Member count; nullopt = infinite.  Assumes canonical form.
inline std::optional<Int> axis_count(const AxisConstraint& c) {
    if (!c.lo || !c.hi) return std::nullopt;
    return (*c.hi - *c.lo) / c.q + 1;
}

inline Int egcd(Int a, Int b, Int& x, Int& y) {
    if (b == 0) { x = 1; y = 0; return a; }
    Int x1, y1;
    Int g = egcd(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
    return g;
}

// Intersect two canonical constraints on the same axis (domain-clipped
// already, so no domain argument).
inline std::optional<AxisConstraint> axis_intersect(const AxisConstraint& a,
                                                    const AxisConstraint& b) {
    Int g = std::gcd(a.q, b.q);
    if (floor_mod(a.r - b.r, g) != 0) return std::nullopt;
    Int lcm = a.q / g * b.q;
    require(lcm <= kStrideCap, "axis: stride overflow");
    // CRT: x = a.r (mod a.q), x = b.r (mod b.q).
    Int p, s;
    egcd(a.q / g, b.q / g, p, s);
    Int m2 = b.q / g;
    Int t = floor_mod((b.r - a.r) / g % m2 * floor_mod(p, m2), m2);
    Int r = floor_mod(a.r + a.q * t, lcm);
    std::optional<Int> lo = a.lo, hi = a.hi;
    if (b.lo) lo = lo ? std::max(*lo, *b.lo) : *b.lo;
    if (b.hi) hi = hi ? std::min(*hi, *b.hi) : *b.hi;
    return axis_canon({lo, hi, r, lcm});
}

// Members of a not in b, as disjoint canonical constraints.
inline std::vector<AxisConstraint> axis_diff(const AxisConstraint& a,
                                             const AxisConstraint& b) {
    if (!axis_intersect(a, b)) return {a};
    std::vector<AxisConstraint> out;
    auto push = [&](std::optional<AxisConstraint> c) {
        if (c) out.push_back(*c);
    };
    // Parts of a outside b's interval.
    if (b.lo) {
        std::optional<Int> hi = a.hi ? std::min(*a.hi, *b.lo - 1) : *b.lo - 1;
        push(axis_canon({a.lo, hi, a.r, a.q}));
    }
    if (b.hi) {
        std::optional<Int> lo = a.lo ? std::max(*a.lo, *b.hi + 1) : *b.hi + 1;
        push(axis_canon({lo, a.hi, a.r, a.q}));
    }
    // Inside the common interval: residue classes of a (mod lcm) that miss b.
    std::optional<Int> mlo = a.lo, mhi = a.hi;
    if (b.lo) mlo = mlo ? std::max(*mlo, *b.lo) : *b.lo;
    if (b.hi) mhi = mhi ? std::min(*mhi, *b.hi) : *b.hi;
    Int g = std::gcd(a.q, b.q);
    Int lcm = a.q / g * b.q;
    require(lcm / a.q <= 1 << 12, "axis: stride overflow in difference");
    AxisConstraint hit = *axis_intersect({std::nullopt, std::nullopt, a.r, a.q},
                                         {std::nullopt, std::nullopt, b.r, b.q});
    for (Int k = 0; k < lcm / a.q; ++k) {
        Int s = floor_mod(a.r + k * a.q, lcm);
        if (s == hit.r) continue;
        push(axis_canon({mlo, mhi, s, lcm}));
    }
    return out;
}

struct Rect {
    std::string cell;
    std::vector<AxisConstraint> axes;

    bool operator==(const Rect&) const = default;
};

// Build a domain-clipped canonical rect; nullopt if empty.
inline std::optional<Rect> make_rect(const Carrier& car, const std::string& cell,
                                     std::vector<AxisConstraint> axes) {
    const Cell& c = car.cell(cell);
    require((int)axes.size() == c.dim(), "rect: axis count mismatch for '" + cell + "'");
    Rect r{cell, {}};
    for (int i = 0; i < c.dim(); ++i) {
        auto a = axis_clip(axes[i], c.axes[i]);
        if (!a) return std::nullopt;
        r.axes.push_back(*a);
    }
    return r;
}

inline bool rect_contains(const Rect& r, const Point& p) {
    if (p.cell != r.cell || p.coords.size() != r.axes.size()) return false;
    for (size_t i = 0; i < r.axes.size(); ++i)
        if (!axis_contains(r.axes[i], p.coords[i])) return false;
    return true;
}

inline std::optional<Rect> rect_intersect(const Rect& a, const Rect& b) {
    if (a.cell != b.cell) return std::nullopt;
    Rect out{a.cell, {}};
    for (size_t i = 0; i < a.axes.size(); ++i) {
        auto c = axis_intersect(a.axes[i], b.axes[i]);
        if (!c) return std::nullopt;
        out.axes.push_back(*c);
    }
    return out;
}

// a minus b as disjoint rects: split axis by axis against the intersection.
inline std::vector<Rect> rect_diff(const Rect& a, const Rect& b) {
    auto inter = rect_intersect(a, b);
    if (!inter) return {a};
    std::vector<Rect> out;
    for (size_t i = 0; i < a.axes.size(); ++i) {
        for (const auto& piece : axis_diff(a.axes[i], b.axes[i])) {
            Rect r = a;
            for (size_t j = 0; j < i; ++j) r.axes[j] = inter->axes[j];
            r.axes[i] = piece;
            out.push_back(r);
        }
    }
    return out;
}

inline std::optional<Int> rect_card(const Rect& r) {
    Int total = 1;
    for (const auto& a : r.axes) {
        auto c = axis_count(a);
        if (!c) return std::nullopt;
        total *= *c;
    }
    return total;
}

// Fixed total order used for the canonical listing.
inline std::strong_ordering axis_order(const AxisConstraint& a, const AxisConstraint& b) {
    auto okey = [](const std::optional<Int>& v, Int inf_sign) {
        // missing bound sorts as the corresponding infinity
        return v ? std::pair<Int, Int>{0, *v} : std::pair<Int, Int>{inf_sign, 0};
    };
    if (auto c = okey(a.lo, -1) <=> okey(b.lo, -1); c != 0) return c;
    if (auto c = okey(a.hi, +1) <=> okey(b.hi, +1); c != 0) return c;
    if (auto c = a.r <=> b.r; c != 0) return c;
    return a.q <=> b.q;
}

inline bool rect_less(const Rect& a, const Rect& b) {
    if (a.cell != b.cell) return a.cell < b.cell;
    for (size_t i = 0; i < std::min(a.axes.size(), b.axes.size()); ++i)
        if (auto c = axis_order(a.axes[i], b.axes[i]); c != 0) return c < 0;
    return a.axes.size() < b.axes.size();
}

// ---------------------------------------------------------------- rect sets

// Canonical form: pairwise disjoint, domain-clipped, sorted.  Normalization
// keeps disjoint input verbatim (up to order), so it is idempotent; the
// listing itself is not claimed to be a minimal one.
struct RectSet {
    std::vector<Rect> rects;

    bool operator==(const RectSet&) const = default;
};

inline RectSet rectset_normalize(const std::vector<Rect>& in, const Carrier& car) {
    std::vector<Rect> out;
    for (const auto& raw : in) {
        auto clipped = make_rect(car, raw.cell, raw.axes);
        if (!clipped) continue;
        std::vector<Rect> frags{*clipped};
        for (const auto& prev : out) {
            std::vector<Rect> next;
            for (const auto& f : frags)
                for (auto& piece : rect_diff(f, prev)) next.push_back(piece);
            frags = std::move(next);
            if (frags.empty()) break;
        }
        for (auto& f : frags) out.push_back(std::move(f));
    }
    std::sort(out.begin(), out.end(), rect_less);
    return {out};
}

inline RectSet rectset_of(const Carrier& car, std::vector<Rect> rects) {
    return rectset_normalize(rects, car);
}

inline Rect point_rect(const Carrier& car, const Point& p) {
    std::vector<AxisConstraint> axes;
    for (Int c : p.coords) axes.push_back(axis_point(c));
    auto r = make_rect(car, p.cell, axes);
    require(r.has_value(), "point_rect: point outside carrier");
    return *r;
}

inline RectSet carrier_all(const Carrier& car) {
    std::vector<Rect> rs;
    for (const auto& c : car.cells)
        rs.push_back(Rect{c.id, std::vector<AxisConstraint>(c.dim(), axis_all())});
    return rectset_normalize(rs, car);
}

inline bool rectset_contains(const RectSet& s, const Point& p) {
    for (const auto& r : s.rects)
        if (rect_contains(r, p)) return true;
    return false;
}

inline RectSet rectset_union(const RectSet& a, const RectSet& b, const Carrier& car) {
    std::vector<Rect> all = a.rects;
    all.insert(all.end(), b.rects.begin(), b.rects.end());
    return rectset_normalize(all, car);
}

inline RectSet rectset_intersect(const RectSet& a, const RectSet& b, const Carrier& car) {
    std::vector<Rect> out;
    for (const auto& x : a.rects)
        for (const auto& y : b.rects)
            if (auto i = rect_intersect(x, y)) out.push_back(*i);
    return rectset_normalize(out, car);
}

inline RectSet rectset_diff(const RectSet& a, const RectSet& b, const Carrier& car) {
    std::vector<Rect> cur = a.rects;
    for (const auto& y : b.rects) {
        std::vector<Rect> next;
        for (const auto& x : cur)
            for (auto& piece : rect_diff(x, y)) next.push_back(piece);
        cur = std::move(next);
    }
    return rectset_normalize(cur, car);
}

inline bool rectset_empty(const RectSet& s) { return s.rects.empty(); }

inline bool rectset_equal(const RectSet& a, const RectSet& b, const Carrier& car) {
    return rectset_empty(rectset_diff(a, b, car)) && rectset_empty(rectset_diff(b, a, car));
}

inline std::optional<Int> rectset_card(const RectSet& s) {
    Int total = 0;
    for (const auto& r : s.rects) {
        auto c = rect_card(r);
        if (!c) return std::nullopt;
        total += *c;
    }
    return total;
}

// ---------------------------------------------------------------- enumeration

// All points of a finite rect, lexicographic in the coordinates.
inline void rect_enumerate(const Rect& r, std::vector<Point>& out) {
    std::vector<Int> cur(r.axes.size());
    auto rec = [&](auto&& self, size_t i) -> void {
        if (i == r.axes.size()) {
            out.push_back(Point{r.cell, cur});
            return;
        }
        const auto& a = r.axes[i];
        require(a.lo && a.hi, "enumerate: infinite rect");
        for (Int v = *a.lo; v <= *a.hi; v += a.q) {
            cur[i] = v;
            self(self, i + 1);
        }
    };
    rec(rec, 0);
}

inline std::vector<Point> rectset_enumerate(const RectSet& s) {
    auto c = rectset_card(s);
    require(c.has_value(), "enumerate: infinite rect set");
    std::vector<Point> out;
    out.reserve(*c);
    for (const auto& r : s.rects) rect_enumerate(r, out);
    std::sort(out.begin(), out.end());
    return out;
}

// Window of radius R: unbounded axes clipped to [-R,R] (half lines to
// [0,R]); bounded axes are always included whole.
inline Rect window_rect(const Cell& c, Int R) {
    Rect r{c.id, {}};
    for (const auto& a : c.axes) {
        switch (a.kind) {
            case AxisKind::FullLine: r.axes.push_back(axis_range(-R, R)); break;
            case AxisKind::HalfLine: r.axes.push_back(axis_range(0, R)); break;
            case AxisKind::Bounded: r.axes.push_back(axis_range(0, a.n - 1)); break;
        }
    }
    return r;
}

inline std::vector<Point> enumerate_window(const Carrier& car, Int R) {
    std::vector<Point> out;
    for (const auto& c : car.cells) rect_enumerate(window_rect(c, R), out);
    return out;
}

inline std::vector<Point> enumerate_window(const Carrier& car, const RectSet& s, Int R) {
    std::vector<Point> out;
    for (const auto& p : enumerate_window(car, R))
        if (rectset_contains(s, p)) out.push_back(p);
    return out;
}

// ---------------------------------------------------------------- json

inline Json to_json(const AxisDomain& a) {
    Json j;
    switch (a.kind) {
        case AxisKind::FullLine: j["kind"] = "full"; break;
        case AxisKind::HalfLine: j["kind"] = "half"; break;
        case AxisKind::Bounded: j["kind"] = "bounded"; j["n"] = a.n; break;
    }
    return j;
}

inline AxisDomain axis_domain_from_json(const Json& j) {
    std::string k = j.at("kind");
    if (k == "full") return {AxisKind::FullLine, 0};
    if (k == "half") return {AxisKind::HalfLine, 0};
    if (k == "bounded") return {AxisKind::Bounded, j.at("n").get<Int>()};
    fail("json: bad axis kind '" + k + "'");
}

inline Json to_json(const Cell& c) {
    Json axes = Json::array();
    for (const auto& a : c.axes) axes.push_back(to_json(a));
    return Json{{"id", c.id}, {"axes", axes}};
}

inline Cell cell_from_json(const Json& j) {
    Cell c;
    c.id = j.at("id");
    for (const auto& a : j.at("axes")) c.axes.push_back(axis_domain_from_json(a));
    return c;
}

inline Json to_json(const Carrier& car) {
    Json cells = Json::array();
    for (const auto& c : car.cells) cells.push_back(to_json(c));
    return Json{{"cells", cells}};
}

inline Carrier carrier_from_json(const Json& j) {
    Carrier car;
    for (const auto& c : j.at("cells")) car.cells.push_back(cell_from_json(c));
    validate(car);
    return car;
}

inline Json to_json(const AxisConstraint& a) {
    Json j;
    j["lo"] = a.lo ? Json(*a.lo) : Json(nullptr);
    j["hi"] = a.hi ? Json(*a.hi) : Json(nullptr);
    j["r"] = a.r;
    j["q"] = a.q;
    return j;
}

inline AxisConstraint axis_constraint_from_json(const Json& j) {
    AxisConstraint a;
    if (!j.at("lo").is_null()) a.lo = j.at("lo").get<Int>();
    if (!j.at("hi").is_null()) a.hi = j.at("hi").get<Int>();
    a.r = j.at("r").get<Int>();
    a.q = j.at("q").get<Int>();
    return a;
}

inline Json to_json(const Rect& r) {
    Json axes = Json::array();
    for (const auto& a : r.axes) axes.push_back(to_json(a));
    return Json{{"cell", r.cell}, {"axes", axes}};
}

inline Rect rect_from_json(const Json& j) {
    Rect r;
    r.cell = j.at("cell");
    for (const auto& a : j.at("axes")) r.axes.push_back(axis_constraint_from_json(a));
    return r;
}

inline Json to_json(const RectSet& s) {
    Json rects = Json::array();
    for (const auto& r : s.rects) rects.push_back(to_json(r));
    return Json{{"rects", rects}};
}

inline RectSet rectset_from_json(const Json& j, const Carrier& car) {
    std::vector<Rect> rs;
    for (const auto& r : j.at("rects")) rs.push_back(rect_from_json(r));
    return rectset_normalize(rs, car);
}

inline Json to_json(const Point& p) {
    return Json{{"cell", p.cell}, {"coords", p.coords}};
}

inline Point point_from_json(const Json& j) {
    Point p;
    p.cell = j.at("cell");
    for (const auto& c : j.at("coords")) p.coords.push_back(c.get<Int>());
    return p;
}

}  // namespace nearperm
