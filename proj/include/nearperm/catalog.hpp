#pragma once

// Named constructors for the library's stock of near actions: shifts,
// simply transitive and multi-orbit translation actions, the two-line
// involution example, Houghton actions, the sheeted planes X_{m,s} and the
// one-plane family K_l, the Scott tower of 2-power additions, and the
// infinite dihedral action on Z by parity swaps.

#include <nearperm/nearaction.hpp>

namespace nearperm {

// ---------------------------------------------------------------------------
// small helpers

namespace detail {

inline Piece full_piece(const Carrier& c, const std::string& src_cell,
                        const std::string& dst_cell, std::vector<Int> t) {
    const Cell& cell = c.cell(src_cell);
    return Piece{*make_rect(c, src_cell, std::vector<AxisConstraint>(cell.dim(), axis_all())),
                 dst_cell, translation(std::move(t))};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// shift on the half line

inline NearAction build_shift_N() {
    Carrier c{{Cell{"n", {{AxisKind::HalfLine, 0}}}}};
    NearAction a{c, GroupSpec{{"t"}, {}, 1}, {}};
    NearMap t{c, c, {}, {}};
    t.pieces.push_back(detail::full_piece(c, "n", "n", {1}));
    a.lifts.push_back(std::move(t));
    validate(a);
    return a;
}

// ---------------------------------------------------------------------------
// free abelian translation actions

inline std::vector<std::string> abelian_generator_names(int d) {
    switch (d) {
        case 1: return {"t"};
        case 2: return {"u", "v"};
        case 3: return {"u", "v", "w"};
        default: {
            std::vector<std::string> n;
            for (int i = 1; i <= d; ++i) n.push_back("g" + std::to_string(i));
            return n;
        }
    }
}

// k disjoint copies of Z^d, translated simultaneously
inline NearAction build_free_orbits(int d, int k) {
    require(d >= 1 && d <= 4, "build_free_orbits: rank out of range");
    require(k >= 1, "build_free_orbits: need at least one copy");
    Carrier c;
    for (int i = 0; i < k; ++i)
        c.cells.push_back(Cell{k == 1 ? "p" : "c" + std::to_string(i),
                               std::vector<AxisDomain>(d, {AxisKind::FullLine, 0})});
    NearAction a{c, free_abelian_spec(abelian_generator_names(d)), {}};
    for (int g = 0; g < d; ++g) {
        NearMap f{c, c, {}, {}};
        std::vector<Int> t(d, 0);
        t[g] = 1;
        for (const auto& cell : c.cells) f.pieces.push_back(detail::full_piece(c, cell.id, cell.id, t));
        a.lifts.push_back(std::move(f));
    }
    validate(a);
    return a;
}

inline NearAction build_simply_transitive(int d) { return build_free_orbits(d, 1); }

// ---------------------------------------------------------------------------
// Z x (Z/2Z) on two lines: a shifts both, b swaps the nonnegative halves

inline NearAction build_exzz2() {
    Carrier c{{Cell{"p", {{AxisKind::FullLine, 0}}}, Cell{"m", {{AxisKind::FullLine, 0}}}}};
    NearAction a{c, GroupSpec{{"a", "b"}, {Word{{1, 1}, {1, 1}}, commutator_word(0, 1)}, 0}, {}};
    NearMap sa{c, c, {}, {}};
    sa.pieces.push_back(detail::full_piece(c, "p", "p", {1}));
    sa.pieces.push_back(detail::full_piece(c, "m", "m", {1}));
    NearMap sb{c, c, {}, {}};
    auto nn = axis_range(0, std::nullopt);
    auto ng = axis_range(std::nullopt, -1);
    sb.pieces.push_back(Piece{*make_rect(c, "p", {nn}), "m", translation({0})});
    sb.pieces.push_back(Piece{*make_rect(c, "m", {nn}), "p", translation({0})});
    sb.pieces.push_back(Piece{*make_rect(c, "p", {ng}), "p", translation({0})});
    sb.pieces.push_back(Piece{*make_rect(c, "m", {ng}), "m", translation({0})});
    a.lifts = {std::move(sa), std::move(sb)};
    validate(a);
    return a;
}

// ---------------------------------------------------------------------------
// Houghton near actions: d+1 rays, generator i feeds ray d+1 into ray i

inline NearAction build_houghton_near_zd(int d) {
    require(d >= 1 && d <= 4, "build_houghton_near_zd: rank out of range");
    Carrier c;
    for (int i = 1; i <= d + 1; ++i)
        c.cells.push_back(Cell{"r" + std::to_string(i), {{AxisKind::HalfLine, 0}}});
    std::vector<std::string> names;
    for (int i = 1; i <= d; ++i) names.push_back("f" + std::to_string(i));
    NearAction a{c, free_abelian_spec(names), {}};
    const std::string last = "r" + std::to_string(d + 1);
    for (int i = 1; i <= d; ++i) {
        const std::string mine = "r" + std::to_string(i);
        NearMap f{c, c, {}, {}};
        f.pieces.push_back(detail::full_piece(c, mine, mine, {1}));
        f.pieces.push_back(
            Piece{*make_rect(c, last, {axis_range(1, std::nullopt)}), last, translation({-1})});
        f.exceptions[Point{last, {0}}] = Point{mine, {0}};
        for (int j = 1; j <= d; ++j)
            if (j != i) {
                const std::string other = "r" + std::to_string(j);
                f.pieces.push_back(detail::full_piece(c, other, other, {0}));
            }
        a.lifts.push_back(std::move(f));
    }
    validate(a);
    return a;
}

// the rank-2 case: honest permutations of three rays
inline NearAction build_houghton_gens() { return build_houghton_near_zd(2); }

// ---------------------------------------------------------------------------
// X_{m,s}: m plane sheets; u crosses a vertical half-line seam on sheet 0
// carrying the second holonomy component, v crosses the horizontal ray seam
// from sheet j to sheet j+1, with the return edge to sheet 0 carrying the
// first component

inline std::string sheet_id(int j) { return "s" + std::to_string(j); }

inline NearAction build_X_ms(int m, std::pair<Int, Int> s) {
    require(m >= 1, "build_X_ms: need at least one sheet");
    auto [s1, s2] = s;
    Carrier c;
    for (int j = 0; j < m; ++j)
        c.cells.push_back(Cell{sheet_id(j), {{AxisKind::FullLine, 0}, {AxisKind::FullLine, 0}}});
    NearAction a{c, free_abelian_spec({"u", "v"}), {}};

    NearMap u{c, c, {}, {}};
    // sheet 0 splits along the half-column {x = 0, y >= 1}
    u.pieces.push_back(Piece{*make_rect(c, sheet_id(0),
                                        {axis_point(0), axis_range(1, std::nullopt)}),
                             sheet_id(0), translation({1, s2})});
    u.pieces.push_back(Piece{*make_rect(c, sheet_id(0),
                                        {axis_point(0), axis_range(std::nullopt, 0)}),
                             sheet_id(0), translation({1, 0})});
    u.pieces.push_back(Piece{*make_rect(c, sheet_id(0),
                                        {axis_range(std::nullopt, -1), axis_all()}),
                             sheet_id(0), translation({1, 0})});
    u.pieces.push_back(Piece{*make_rect(c, sheet_id(0),
                                        {axis_range(1, std::nullopt), axis_all()}),
                             sheet_id(0), translation({1, 0})});
    for (int j = 1; j < m; ++j) u.pieces.push_back(detail::full_piece(c, sheet_id(j), sheet_id(j), {1, 0}));

    NearMap v{c, c, {}, {}};
    for (int j = 0; j < m; ++j) {
        const std::string me = sheet_id(j);
        v.pieces.push_back(Piece{*make_rect(c, me, {axis_all(), axis_range(1, std::nullopt)}),
                                 me, translation({0, 1})});
        v.pieces.push_back(Piece{*make_rect(c, me, {axis_all(), axis_range(std::nullopt, -1)}),
                                 me, translation({0, 1})});
        v.pieces.push_back(Piece{*make_rect(c, me, {axis_range(std::nullopt, 0), axis_point(0)}),
                                 me, translation({0, 1})});
        bool ret = j == m - 1;
        v.pieces.push_back(Piece{*make_rect(c, me, {axis_range(1, std::nullopt), axis_point(0)}),
                                 sheet_id(ret ? 0 : j + 1),
                                 translation({ret ? -s1 : 0, 1})});
    }
    a.lifts = {std::move(u), std::move(v)};
    validate(a);
    return a;
}

// ---------------------------------------------------------------------------
// K_l: one plane, u the full shift, v undefined on l points of the cut row

inline NearAction build_K(Int l) {
    require(l >= 1, "build_K: need l >= 1");
    Carrier c{{Cell{"p", {{AxisKind::FullLine, 0}, {AxisKind::FullLine, 0}}}}};
    NearAction a{c, free_abelian_spec({"u", "v"}), {}};
    NearMap u{c, c, {}, {}};
    u.pieces.push_back(detail::full_piece(c, "p", "p", {1, 0}));
    NearMap v{c, c, {}, {}};
    v.pieces.push_back(Piece{*make_rect(c, "p", {axis_all(), axis_range(1, std::nullopt)}), "p",
                             translation({0, 1})});
    v.pieces.push_back(Piece{*make_rect(c, "p", {axis_all(), axis_range(std::nullopt, -1)}), "p",
                             translation({0, 1})});
    v.pieces.push_back(Piece{*make_rect(c, "p", {axis_range(1, std::nullopt), axis_point(0)}), "p",
                             translation({0, 1})});
    v.pieces.push_back(Piece{*make_rect(c, "p", {axis_range(std::nullopt, -l), axis_point(0)}),
                             "p", translation({l, 1})});
    for (Int x = -l + 1; x <= 0; ++x) v.exceptions[Point{"p", {x, 0}}] = std::nullopt;
    a.lifts = {std::move(u), std::move(v)};
    validate(a);
    return a;
}

// ---------------------------------------------------------------------------
// Scott tower: permutations of the disjoint union of Z/2^nZ, n <= n_max.
// base adds 1 on every block; f[k] adds 2^(n-k) on blocks n > k and fixes
// the blocks n <= k, so f[0] is the identity. The square chain is exact in
// the per-block sense: f[k]^2 agrees with f[k-1] off block k, and on block k
// the two differ by the addition of 2 (which on Z/2Z is no difference at
// all). base itself admits no square root even up to finite error, which is
// what root_obstruction certifies on truncations.

struct ScottTower {
    Carrier carrier;
    NearMap base;
    std::vector<NearMap> f;  // f[0..n_max]
};

inline std::string block_id(int n) { return "b" + std::to_string(n); }

inline ScottTower build_scott_tower(int n_max) {
    require(n_max >= 1 && n_max <= 20, "build_scott_tower: depth out of range");
    ScottTower t;
    for (int n = 0; n <= n_max; ++n)
        t.carrier.cells.push_back(Cell{block_id(n), {{AxisKind::Bounded, Int(1) << n}}});
    validate(t.carrier);
    auto block_add = [&](int n, Int step) {
        // exceptions-only cyclic addition on block n
        Int size = Int(1) << n;
        std::map<Point, std::optional<Point>> ex;
        for (Int x = 0; x < size; ++x)
            ex[Point{block_id(n), {x}}] = Point{block_id(n), {(x + step) % size}};
        return ex;
    };
    t.base = NearMap{t.carrier, t.carrier, {}, {}};
    for (int n = 0; n <= n_max; ++n)
        for (auto& [k, v] : block_add(n, 1)) t.base.exceptions[k] = v;
    validate(t.base);
    for (int k = 0; k <= n_max; ++k) {
        NearMap fk{t.carrier, t.carrier, {}, {}};
        for (int n = 0; n <= n_max; ++n) {
            Int step = n > k ? (Int(1) << (n - k)) : 0;
            for (auto& [key, val] : block_add(n, step)) fk.exceptions[key] = val;
        }
        validate(fk);
        t.f.push_back(std::move(fk));
    }
    return t;
}

// cycle-count criterion for 2^k-th roots: every even cycle length must
// occur a multiple of 2^k times
inline bool root_obstruction(const FinitePerm& p, int k) {
    require(k >= 1 && k < 62, "root_obstruction: bad k");
    std::map<Int, Int> count;
    for (const auto& c : cycle_type(p)) ++count[c];
    for (const auto& [len, n] : count)
        if (len % 2 == 0 && n % (Int(1) << k) != 0) return false;
    return true;
}

// constructive square root over the cycle structure: odd cycles take the
// (L+1)/2 power, equal even lengths pair up by interleaving; returns nothing
// exactly when some even length occurs an odd number of times
inline std::optional<FinitePerm> find_square_root(const FinitePerm& p) {
    auto cyc = cycles(p);
    std::map<Int, std::vector<std::vector<Point>>> by_len;
    for (auto& c : cyc) by_len[(Int)c.size()].push_back(c);
    FinitePerm h;
    auto set_cycle = [&h](const std::vector<Point>& c) {
        for (size_t i = 0; i < c.size(); ++i) h.moved[c[i]] = c[(i + 1) % c.size()];
    };
    for (auto& [len, list] : by_len) {
        if (len % 2 == 1) {
            // root of an odd cycle c is c^((len+1)/2)
            for (const auto& c : list) {
                std::vector<Point> r(c.size());
                Int step = (len + 1) / 2;
                for (Int i = 0; i < len; ++i) r[i] = c[(i * step) % len];
                set_cycle(r);
            }
        } else {
            if (list.size() % 2 != 0) return std::nullopt;
            for (size_t i = 0; i + 1 < list.size(); i += 2) {
                // interleave two even cycles of the same length
                std::vector<Point> r;
                for (Int j = 0; j < len; ++j) {
                    r.push_back(list[i][j]);
                    r.push_back(list[i + 1][j]);
                }
                set_cycle(r);
            }
        }
    }
    return h;
}

// ---------------------------------------------------------------------------
// infinite dihedral action on Z by the two parity interleavings

inline NearAction build_dinfty_on_Z(bool perturbed = false) {
    Carrier c{{Cell{"z", {{AxisKind::FullLine, 0}}}}};
    NearAction a{c, GroupSpec{{"a", "b"}, {Word{{0, 1}, {0, 1}}, Word{{1, 1}, {1, 1}}}, 0}, {}};
    NearMap eo{c, c, {}, {}};  // swaps 2k with 2k+1
    eo.pieces.push_back(
        Piece{*make_rect(c, "z", {{std::nullopt, std::nullopt, 0, 2}}), "z", translation({1})});
    eo.pieces.push_back(
        Piece{*make_rect(c, "z", {{std::nullopt, std::nullopt, 1, 2}}), "z", translation({-1})});
    NearMap oe{c, c, {}, {}};  // swaps 2k+1 with 2k+2
    oe.pieces.push_back(
        Piece{*make_rect(c, "z", {{std::nullopt, std::nullopt, 1, 2}}), "z", translation({1})});
    oe.pieces.push_back(
        Piece{*make_rect(c, "z", {{std::nullopt, std::nullopt, 0, 2}}), "z", translation({-1})});
    if (perturbed) {
        eo.exceptions[Point{"z", {0}}] = Point{"z", {0}};
        eo.exceptions[Point{"z", {1}}] = Point{"z", {1}};
    }
    a.lifts = {std::move(eo), std::move(oe)};
    validate(a);
    return a;
}

// ---------------------------------------------------------------------------
// the catalog listing

struct CatalogEntry {
    std::string name;
    std::string params;
    std::string doc;
};

inline std::vector<CatalogEntry> catalog_list() {
    return {
        {"shift_N", "", "shift near action of Z on the half line"},
        {"simply_transitive", "--d <rank>", "free Z^d translation action on Z^d"},
        {"free_orbits", "--d <rank> --k <copies>", "k disjoint copies of the Z^d action"},
        {"exzz2", "", "Z x Z/2Z on two lines, near commuting involution"},
        {"houghton", "--d <rank>", "Houghton near Z^d action on d+1 rays"},
        {"X_ms", "--m <sheets> --s <s1> <s2>", "m-sheeted plane with holonomy (s1,s2)"},
        {"K_l", "--l <gap>", "one plane with l undefined points on the cut row"},
        {"scott", "--nmax <depth>", "tower of 2-power additions on blocks Z/2^nZ"},
        {"dinfty", "[--perturbed]", "infinite dihedral action on Z by parity swaps"},
    };
}

}  // namespace nearperm
