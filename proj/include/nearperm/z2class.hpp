#pragma once

// Classification of finite-type near Z^2-sets presented as graded plane
// atlases: regular points, panel (corner/strip) decomposition, the corner
// graph with strip gluing, ends, winding number and additive holonomy, and
// the parity class of the commutator. One-dimensional carriers get their
// ends counted by a stabilized rim-component scan instead.

#include <nearperm/nearaction.hpp>

#include <array>

namespace nearperm {

struct Z2Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class PanelType {
    CornerUR,
    CornerUL,
    CornerLL,
    CornerLR,
    StripUp,
    StripLeft,
    StripDown,
    StripRight,
    Bounded
};

inline bool panel_is_corner(PanelType t) {
    return t == PanelType::CornerUR || t == PanelType::CornerUL || t == PanelType::CornerLL ||
           t == PanelType::CornerLR;
}
inline bool panel_is_strip(PanelType t) { return !panel_is_corner(t) && t != PanelType::Bounded; }

inline std::string panel_type_name(PanelType t) {
    switch (t) {
        case PanelType::CornerUR: return "UR";
        case PanelType::CornerUL: return "UL";
        case PanelType::CornerLL: return "LL";
        case PanelType::CornerLR: return "LR";
        case PanelType::StripUp: return "up";
        case PanelType::StripLeft: return "left";
        case PanelType::StripDown: return "down";
        case PanelType::StripRight: return "right";
        case PanelType::Bounded: return "bounded";
    }
    return "?";
}

// an infinite panel of the decomposition; gradings are relative to the
// native cell coordinates, so the recorded offset is zero throughout
struct GradedRectangle {
    Rect rect;
    PanelType type = PanelType::Bounded;
    std::array<Int, 2> offset{0, 0};
};

struct CornerDecomposition {
    std::vector<GradedRectangle> rects;  // infinite panels, deterministic order
    std::vector<Point> leftover;         // points of the bounded panels
};

struct CornerGraph {
    std::vector<GradedRectangle> vertices;
    struct Edge {
        int from = -1;
        int to = -1;
        std::array<Int, 2> delta{0, 0};  // grading deviation across the crossing
    };
    std::vector<Edge> edges;  // one outgoing edge per vertex, indexed by from
};

struct Z2Component {
    Int winding = 0;
    std::array<Int, 2> holonomy{0, 0};
    bool operator==(const Z2Component&) const = default;
};

struct Z2Class {
    Int ends = 0;
    std::vector<Z2Component> components;
    bool operator==(const Z2Class&) const = default;
};

// ---------------------------------------------------------------------------
// atlas: cuts, panels, lookup

namespace z2detail {

struct Interval {
    std::optional<Int> lo, hi;
    bool bounded() const { return lo.has_value() && hi.has_value(); }
};

struct CellPanels {
    std::string cell;
    std::vector<Int> cx, cy;  // sorted cut coordinates
    std::vector<Interval> xs, ys;
};

struct Atlas {
    Carrier car;
    std::vector<NearMap> maps;  // u, v, u^-1, v^-1
    std::vector<CellPanels> cells;
    Int M = 0;  // far representative magnitude
};

inline std::vector<Interval> intervals_from(const std::vector<Int>& cuts) {
    std::vector<Interval> out;
    out.push_back({std::nullopt, cuts.front() - 1});
    for (size_t i = 0; i + 1 < cuts.size(); ++i) out.push_back({cuts[i], cuts[i + 1] - 1});
    out.push_back({cuts.back(), std::nullopt});
    return out;
}

inline void require_plane_carrier(const NearAction& a) {
    if (a.lifts.size() != 2) throw Z2Error("plane atlas needs exactly two generators");
    for (const auto& c : a.carrier.cells) {
        if (c.dim() != 2) throw Z2Error("carrier is not a plane atlas");
        for (const auto& d : c.axes)
            if (d.kind != AxisKind::FullLine) throw Z2Error("carrier is not a plane atlas");
    }
}

inline Atlas build_atlas(const NearAction& a) {
    require_plane_carrier(a);
    Atlas at;
    at.car = a.carrier;
    at.maps = {a.lifts[0], a.lifts[1], invert(a.lifts[0]), invert(a.lifts[1])};
    std::map<std::string, std::set<Int>> X, Y;
    for (const auto& c : a.carrier.cells) {
        X[c.id].insert(0);
        Y[c.id].insert(0);
    }
    Int maxt = 1;
    for (const auto& f : at.maps) {
        for (const auto& p : f.pieces) {
            if (p.tr.P != std::vector<std::vector<Int>>{{1, 0}, {0, 1}})
                throw Z2Error("graded atlas requires translation pieces");
            for (const auto& c : p.source.axes)
                if (c.q != 1) throw Z2Error("graded atlas requires stride-free pieces");
            auto add = [](std::set<Int>& s, const AxisConstraint& c) {
                if (c.lo) s.insert(*c.lo);
                if (c.hi) s.insert(*c.hi + 1);
            };
            add(X[p.source.cell], p.source.axes[0]);
            add(Y[p.source.cell], p.source.axes[1]);
            maxt = std::max({maxt, std::llabs(p.tr.t[0]), std::llabs(p.tr.t[1])});
        }
        for (const auto& [k, v] : f.exceptions) {
            auto add = [&X, &Y](const Point& p) {
                X[p.cell].insert(p.coords[0]);
                X[p.cell].insert(p.coords[0] + 1);
                Y[p.cell].insert(p.coords[1]);
                Y[p.cell].insert(p.coords[1] + 1);
            };
            add(k);
            if (v) add(*v);
        }
    }
    Int maxcut = 0;
    for (const auto* m : {&X, &Y})
        for (const auto& [cell, s] : *m)
            for (Int c : s) maxcut = std::max(maxcut, std::llabs(c));
    at.M = maxcut + 8 * maxt + 64;
    for (const auto& c : a.carrier.cells) {
        CellPanels cp;
        cp.cell = c.id;
        cp.cx.assign(X[c.id].begin(), X[c.id].end());
        cp.cy.assign(Y[c.id].begin(), Y[c.id].end());
        cp.xs = intervals_from(cp.cx);
        cp.ys = intervals_from(cp.cy);
        at.cells.push_back(std::move(cp));
    }
    return at;
}

inline PanelType panel_type(const Interval& ix, const Interval& iy) {
    if (!ix.hi && !iy.hi) return PanelType::CornerUR;
    if (!ix.lo && !iy.hi) return PanelType::CornerUL;
    if (!ix.lo && !iy.lo) return PanelType::CornerLL;
    if (!ix.hi && !iy.lo) return PanelType::CornerLR;
    if (ix.bounded() && !iy.hi) return PanelType::StripUp;
    if (ix.bounded() && !iy.lo) return PanelType::StripDown;
    if (iy.bounded() && !ix.lo) return PanelType::StripLeft;
    if (iy.bounded() && !ix.hi) return PanelType::StripRight;
    return PanelType::Bounded;
}

struct PanelRef {
    int cell = -1;
    int ix = -1;
    int iy = -1;
    auto operator<=>(const PanelRef&) const = default;
};

inline PanelRef locate(const Atlas& at, const Point& p) {
    for (int c = 0; c < (int)at.cells.size(); ++c) {
        if (at.cells[c].cell != p.cell) continue;
        const auto& cp = at.cells[c];
        int ix = (int)(std::upper_bound(cp.cx.begin(), cp.cx.end(), p.coords[0]) - cp.cx.begin());
        int iy = (int)(std::upper_bound(cp.cy.begin(), cp.cy.end(), p.coords[1]) - cp.cy.begin());
        return {c, ix, iy};
    }
    throw Z2Error("point outside carrier");
}

// exit data for the canonical counterclockwise traversal
struct ExitData {
    int map;                   // 0=u, 1=v, 2=u^-1, 3=v^-1
    std::array<Int, 2> delta;  // the standard unit step this crossing represents
    std::array<Int, 2> out;    // unbounded direction along the exit edge
};

inline ExitData exit_data(PanelType t) {
    switch (t) {
        case PanelType::CornerUR:
        case PanelType::StripUp: return {2, {-1, 0}, {0, 1}};
        case PanelType::CornerUL:
        case PanelType::StripLeft: return {3, {0, -1}, {-1, 0}};
        case PanelType::CornerLL:
        case PanelType::StripDown: return {0, {1, 0}, {0, -1}};
        case PanelType::CornerLR:
        case PanelType::StripRight: return {1, {0, 1}, {1, 0}};
        default: throw Z2Error("bounded panel has no exit");
    }
}

// far representative on the exit edge of an infinite panel
inline Point exit_point(const Atlas& at, const CellPanels& cp, const Interval& ix,
                        const Interval& iy, PanelType t) {
    switch (t) {
        case PanelType::CornerUR:
        case PanelType::StripUp: return Point{cp.cell, {*ix.lo, at.M}};
        case PanelType::CornerUL:
        case PanelType::StripLeft: return Point{cp.cell, {-at.M, *iy.lo}};
        case PanelType::CornerLL:
        case PanelType::StripDown: return Point{cp.cell, {*ix.hi, -at.M}};
        case PanelType::CornerLR:
        case PanelType::StripRight: return Point{cp.cell, {at.M, *iy.hi}};
        default: throw Z2Error("bounded panel has no exit");
    }
}

inline PanelType next_corner(PanelType t) {
    switch (t) {
        case PanelType::CornerUR: return PanelType::CornerUL;
        case PanelType::CornerUL: return PanelType::CornerLL;
        case PanelType::CornerLL: return PanelType::CornerLR;
        case PanelType::CornerLR: return PanelType::CornerUR;
        default: throw Z2Error("not a corner");
    }
}

}  // namespace z2detail

// ---------------------------------------------------------------------------
// regular points

// points violating the inverse or commutation equations of the four stored
// lifts, or where some composite is undefined; must come out finite
inline std::vector<Point> regular_set_complement(const NearAction& a) {
    require(a.lifts.size() == 2, "regular_set: two generators required");
    const NearMap& u = a.lifts[0];
    const NearMap& v = a.lifts[1];
    NearMap ui = invert(u), vi = invert(v);
    NearMap id = identity_map(a.carrier);
    std::set<Point> sigma;
    auto eat_pair = [&sigma](const NearMap& lhs, const NearMap& rhs) {
        Disagreement d = disagreement(lhs, rhs);
        if (d.infinite) throw Z2Error("regular set complement is infinite");
        sigma.insert(d.points.begin(), d.points.end());
    };
    auto eat_undef = [&sigma](const NearMap& f) {
        for (const auto& [k, val] : f.exceptions)
            if (!val) sigma.insert(k);
    };
    std::vector<std::pair<NearMap, NearMap>> eqs;
    eqs.emplace_back(compose(u, ui), id);
    eqs.emplace_back(compose(ui, u), id);
    eqs.emplace_back(compose(v, vi), id);
    eqs.emplace_back(compose(vi, v), id);
    eqs.emplace_back(compose(u, v), compose(v, u));
    eqs.emplace_back(compose(u, vi), compose(vi, u));
    eqs.emplace_back(compose(ui, v), compose(v, ui));
    eqs.emplace_back(compose(ui, vi), compose(vi, ui));
    for (const auto& [lhs, rhs] : eqs) {
        eat_pair(lhs, rhs);
        eat_undef(lhs);
        eat_undef(rhs);
    }
    for (const NearMap& f : {u, v, ui, vi}) eat_undef(f);
    return {sigma.begin(), sigma.end()};
}

// ---------------------------------------------------------------------------
// decomposition and corner graph

inline CornerDecomposition corner_decomposition(const NearAction& a) {
    z2detail::Atlas at = z2detail::build_atlas(a);
    CornerDecomposition out;
    Int leftover = 0;
    for (const auto& cp : at.cells) {
        for (const auto& ix : cp.xs)
            for (const auto& iy : cp.ys) {
                PanelType t = z2detail::panel_type(ix, iy);
                auto r = make_rect(at.car, cp.cell,
                                   {AxisConstraint{ix.lo, ix.hi, 0, 1},
                                    AxisConstraint{iy.lo, iy.hi, 0, 1}});
                require(r.has_value(), "corner_decomposition: empty panel");
                if (t == PanelType::Bounded) {
                    std::vector<Point> pts;
                    rect_enumerate(*r, pts);
                    leftover += (Int)pts.size();
                    require(leftover <= 200000, "corner_decomposition: leftover too large");
                    out.leftover.insert(out.leftover.end(), pts.begin(), pts.end());
                } else {
                    out.rects.push_back(GradedRectangle{*r, t, {0, 0}});
                }
            }
    }
    std::sort(out.leftover.begin(), out.leftover.end());
    return out;
}

namespace z2detail {

inline CornerGraph graph_from_atlas(const Atlas& at) {
    CornerGraph g;
    std::map<PanelRef, int> index;
    for (int c = 0; c < (int)at.cells.size(); ++c) {
        const auto& cp = at.cells[c];
        for (int ix = 0; ix < (int)cp.xs.size(); ++ix)
            for (int iy = 0; iy < (int)cp.ys.size(); ++iy) {
                PanelType t = panel_type(cp.xs[ix], cp.ys[iy]);
                if (t == PanelType::Bounded) continue;
                auto r = make_rect(at.car, cp.cell,
                                   {AxisConstraint{cp.xs[ix].lo, cp.xs[ix].hi, 0, 1},
                                    AxisConstraint{cp.ys[iy].lo, cp.ys[iy].hi, 0, 1}});
                require(r.has_value(), "corner_graph: empty panel");
                index[{c, ix, iy}] = (int)g.vertices.size();
                g.vertices.push_back(GradedRectangle{*r, t, {0, 0}});
            }
    }
    std::vector<PanelRef> refs(g.vertices.size());
    for (const auto& [ref, i] : index) refs[i] = ref;
    for (int i = 0; i < (int)g.vertices.size(); ++i) {
        const PanelRef& ref = refs[i];
        const CellPanels& cp = at.cells[ref.cell];
        PanelType t = g.vertices[i].type;
        ExitData ex = exit_data(t);
        auto probe = [&](Int shift) -> std::pair<int, std::array<Int, 2>> {
            Point z = exit_point(at, cp, cp.xs[ref.ix], cp.ys[ref.iy], t);
            z.coords[0] += ex.out[0] * shift;
            z.coords[1] += ex.out[1] * shift;
            auto w = evaluate(at.maps[ex.map], z);
            if (!w) throw Z2Error("crossing undefined far from the center");
            std::array<Int, 2> delta{ex.delta[0] - (w->coords[0] - z.coords[0]),
                                     ex.delta[1] - (w->coords[1] - z.coords[1])};
            PanelRef q = locate(at, *w);
            auto it = index.find(q);
            if (it == index.end()) throw Z2Error("crossing lands in a bounded panel");
            return {it->second, delta};
        };
        auto [to, delta] = probe(0);
        auto [to2, delta2] = probe(17);
        if (to != to2 || delta != delta2) throw Z2Error("unstable crossing");
        g.edges.push_back({i, to, delta});
    }
    return g;
}

}  // namespace z2detail

inline CornerGraph corner_graph(const NearAction& a) {
    return z2detail::graph_from_atlas(z2detail::build_atlas(a));
}

// contract every strip vertex, summing crossing deviations, until the graph
// has corner vertices only; then each vertex must have one edge in and out
inline CornerGraph glue_strips(const CornerGraph& g0) {
    int n = (int)g0.vertices.size();
    std::vector<int> out_to(n, -1);
    std::vector<std::array<Int, 2>> out_d(n);
    for (const auto& e : g0.edges) {
        out_to[e.from] = e.to;
        out_d[e.from] = e.delta;
    }
    std::vector<char> alive(n, 1);
    for (int s = 0; s < n; ++s) {
        if (!panel_is_strip(g0.vertices[s].type)) continue;
        int q = out_to[s];
        if (q == s) throw Z2Error("strip crosses into itself");
        for (int p = 0; p < n; ++p)
            if (alive[p] && p != s && out_to[p] == s) {
                out_to[p] = q;
                out_d[p] = {out_d[p][0] + out_d[s][0], out_d[p][1] + out_d[s][1]};
            }
        alive[s] = 0;
    }
    CornerGraph g;
    std::vector<int> remap(n, -1);
    for (int i = 0; i < n; ++i)
        if (alive[i]) {
            remap[i] = (int)g.vertices.size();
            g.vertices.push_back(g0.vertices[i]);
        }
    std::vector<int> indeg(g.vertices.size(), 0);
    for (int i = 0; i < n; ++i) {
        if (!alive[i]) continue;
        int t = out_to[i];
        if (t < 0 || !alive[t]) throw Z2Error("strip gluing left a dangling edge");
        if (t == i) throw Z2Error("corner graph has a self-loop");
        g.edges.push_back({remap[i], remap[t], out_d[i]});
        ++indeg[remap[t]];
    }
    for (int d : indeg)
        if (d != 1) throw Z2Error("corner graph valency violation");
    return g;
}

// ---------------------------------------------------------------------------
// classification

namespace z2detail {

// the translation applied deep inside every quadrant; must agree across all
// cells and quadrants for an atlas action
inline std::array<Int, 2> bulk_direction(const NearMap& f, const Carrier& car, Int M) {
    std::optional<std::array<Int, 2>> d;
    for (const auto& cell : car.cells)
        for (Int sx : {-1, 1})
            for (Int sy : {-1, 1}) {
                Point z{cell.id, {sx * M, sy * M}};
                auto w = evaluate(f, z);
                if (!w) throw Z2Error("lift undefined deep inside a quadrant");
                std::array<Int, 2> step{w->coords[0] - z.coords[0], w->coords[1] - z.coords[1]};
                if (d && *d != step) throw Z2Error("lift has no single bulk direction");
                d = step;
            }
    return *d;
}

}  // namespace z2detail

// reduce the generator pair to one whose bulk directions are the standard
// unit vectors; returns the standardized action and the determinant of the
// original bulk matrix (the holonomy transforms by that sign)
inline std::pair<NearAction, Int> standardize_basis(const NearAction& a) {
    require(a.lifts.size() == 2, "standardize_basis: two generators required");
    Int excr = action_exception_radius(a);
    Int step = action_step_bound(a);
    Int bound = 0;  // sampling must clear every piece boundary as well
    for (const auto& f : a.lifts)
        for (const auto& p : f.pieces)
            for (const auto& c : p.source.axes) {
                if (c.lo) bound = std::max(bound, std::llabs(*c.lo));
                if (c.hi) bound = std::max(bound, std::llabs(*c.hi));
            }
    Int M = bound + excr + 8 * step + 64;
    auto d1 = z2detail::bulk_direction(a.lifts[0], a.carrier, M);
    auto d2 = z2detail::bulk_direction(a.lifts[1], a.carrier, M);
    Int det = d1[0] * d2[1] - d1[1] * d2[0];
    if (det != 1 && det != -1) throw Z2Error("bulk direction matrix is not unimodular");
    if (d1 == std::array<Int, 2>{1, 0} && d2 == std::array<Int, 2>{0, 1}) return {a, det};
    // integer inverse of [d1 d2], scaled by det so it stays integral
    std::array<std::array<Int, 2>, 2> inv{{{det * d2[1], det * -d2[0]},
                                           {det * -d1[1], det * d1[0]}}};
    NearAction b = a;
    for (int col = 0; col < 2; ++col) {
        Word w;
        if (inv[0][col] != 0) w.push_back({0, inv[0][col]});
        if (inv[1][col] != 0) w.push_back({1, inv[1][col]});
        require(!w.empty(), "standardize_basis: degenerate column");
        b.lifts[col] = word_map(a, w);
    }
    if (z2detail::bulk_direction(b.lifts[0], b.carrier, M) != std::array<Int, 2>{1, 0} ||
        z2detail::bulk_direction(b.lifts[1], b.carrier, M) != std::array<Int, 2>{0, 1})
        throw Z2Error("basis standardization failed");
    return {b, det};
}

inline Z2Class classify(const NearAction& a, int near_free_bound = 6) {
    z2detail::require_plane_carrier(a);
    if (!verify_near_action(a).ok) throw Z2Error("action does not verify");
    // near-freeness probe; rearranged words are near the standard abelianized
    // ones, so fixed-set finiteness need only be checked on u^p v^q
    auto powers = [&a, near_free_bound](const NearMap& f) {
        std::map<Int, NearMap> m;
        m.emplace(0, identity_map(a.carrier));
        NearMap fi = invert(f);
        for (Int k = 1; k <= near_free_bound; ++k) {
            m.emplace(k, compose(f, m.at(k - 1)));
            m.emplace(-k, compose(fi, m.at(-(k - 1))));
        }
        return m;
    };
    auto pu = powers(a.lifts[0]);
    auto pv = powers(a.lifts[1]);
    for (Int p = -near_free_bound; p <= near_free_bound; ++p)
        for (Int q = -near_free_bound; q <= near_free_bound; ++q) {
            if (p == 0 && q == 0) continue;
            if (std::llabs(p) + std::llabs(q) > near_free_bound) continue;
            FixedSet fs = fixed_set(compose(pu.at(p), pv.at(q)));
            if (!rectset_card(fs.bulk).has_value())
                throw Z2Error("not near-free: a short word has infinite fixed set");
        }
    auto [std_a, det] = standardize_basis(a);
    CornerGraph g = glue_strips(corner_graph(std_a));
    Z2Class out;
    std::vector<int> out_to(g.vertices.size(), -1);
    std::vector<std::array<Int, 2>> out_d(g.vertices.size());
    for (const auto& e : g.edges) {
        out_to[e.from] = e.to;
        out_d[e.from] = e.delta;
    }
    std::vector<char> seen(g.vertices.size(), 0);
    for (int s = 0; s < (int)g.vertices.size(); ++s) {
        if (seen[s]) continue;
        Int len = 0;
        std::array<Int, 2> hol{0, 0};
        int x = s;
        do {
            seen[x] = 1;
            PanelType t = g.vertices[x].type;
            int y = out_to[x];
            if (z2detail::next_corner(t) != g.vertices[y].type)
                throw Z2Error("corner cycle breaks the quarter-turn order");
            hol[0] += out_d[x][0];
            hol[1] += out_d[x][1];
            ++len;
            x = y;
        } while (x != s);
        if (len % 4 != 0) throw Z2Error("corner cycle length not divisible by four");
        out.components.push_back(Z2Component{len / 4, {det * hol[0], det * hol[1]}});
    }
    out.ends = (Int)out.components.size();
    return out;
}

// ---------------------------------------------------------------------------
// parity of the commutator

inline int kapoudjian_parity(const NearAction& a) {
    require(a.lifts.size() == 2, "kapoudjian_parity: two generators required");
    NearMap comm = word_map(a, commutator_word(0, 1));
    auto fp = to_finite_perm(comm);
    if (!fp) throw Z2Error("commutator is not a finitely supported permutation");
    return parity(*fp);
}

// ---------------------------------------------------------------------------
// ends

namespace z2detail {

inline Int ends_dim1(const NearAction& a) {
    Int excr = action_exception_radius(a);
    Int step = action_step_bound(a);
    std::vector<NearMap> maps = a.lifts;
    for (const auto& f : a.lifts) maps.push_back(invert(f));
    Int R = excr + step + 2;
    Int prev = -1;
    for (int iter = 0; iter < 7; ++iter) {
        Int W = 4 * R + excr + 8;
        std::vector<Point> verts = enumerate_window(a.carrier, W);
        std::map<Point, int> idx;
        for (int i = 0; i < (int)verts.size(); ++i) idx[verts[i]] = i;
        std::vector<std::vector<int>> adj(verts.size());
        for (const auto& f : maps)
            for (int i = 0; i < (int)verts.size(); ++i) {
                auto y = evaluate(f, verts[i]);
                if (y && idx.count(*y)) {
                    adj[i].push_back(idx[*y]);
                    adj[idx[*y]].push_back(i);
                }
            }
        auto norm = [&](int i) { return std::llabs(verts[i].coords[0]); };
        std::vector<int> comp(verts.size(), -1);
        int nc = 0;
        for (int i = 0; i < (int)verts.size(); ++i) {
            if (comp[i] >= 0 || norm(i) <= R) continue;
            std::vector<int> stack{i};
            comp[i] = nc;
            while (!stack.empty()) {
                int x = stack.back();
                stack.pop_back();
                for (int y : adj[x])
                    if (comp[y] < 0 && norm(y) > R) {
                        comp[y] = nc;
                        stack.push_back(y);
                    }
            }
            ++nc;
        }
        std::set<int> rim;
        for (int i = 0; i < (int)verts.size(); ++i)
            if (comp[i] >= 0 && norm(i) >= W - step - 1) rim.insert(comp[i]);
        Int count = (Int)rim.size();
        if (count == prev) return count;
        prev = count;
        R *= 2;
    }
    throw Z2Error("ends did not stabilize");
}

}  // namespace z2detail

inline Int ends(const NearAction& a) {
    std::set<size_t> dims;
    for (const auto& c : a.carrier.cells) dims.insert(c.dim());
    require(dims.size() == 1, "ends: mixed-dimension carrier unsupported");
    size_t d = *dims.begin();
    if (d == 1) return z2detail::ends_dim1(a);
    if (d == 2) return classify(a).ends;
    throw Z2Error("ends: only rank one and two carriers are supported");
}

// ---------------------------------------------------------------------------
// exports

inline Json to_json(const Z2Class& c) {
    Json j;
    j["ends"] = c.ends;
    Json comps = Json::array();
    for (const auto& k : c.components) {
        Json jc;
        jc["winding"] = k.winding;
        jc["holonomy"] = Json::array({k.holonomy[0], k.holonomy[1]});
        comps.push_back(jc);
    }
    j["components"] = comps;
    return j;
}

inline std::string panel_label(const GradedRectangle& r) {
    auto side = [](const std::optional<Int>& v, const char* inf) {
        return v ? std::to_string(*v) : std::string(inf);
    };
    return r.rect.cell + ":" + panel_type_name(r.type) + " [" +
           side(r.rect.axes[0].lo, "-inf") + "," + side(r.rect.axes[0].hi, "+inf") + "]x[" +
           side(r.rect.axes[1].lo, "-inf") + "," + side(r.rect.axes[1].hi, "+inf") + "]";
}

inline std::string to_dot(const CornerGraph& g) {
    std::ostringstream os;
    os << "digraph corners {\n";
    for (int i = 0; i < (int)g.vertices.size(); ++i)
        os << "  p" << i << " [label=\"" << panel_label(g.vertices[i]) << "\"];\n";
    for (const auto& e : g.edges)
        os << "  p" << e.from << " -> p" << e.to << " [label=\"(" << e.delta[0] << ","
           << e.delta[1] << ")\"];\n";
    os << "}\n";
    return os.str();
}

}  // namespace nearperm
