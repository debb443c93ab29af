#pragma once

// Near actions of finitely generated groups: relator verification, index
// character, commensurated subsets with restricted index, truncated Schreier
// graphs, ball growth, Folner ratios, and the conjugator-recovery algorithm
// for the free simply transitive Z^2 action.

#include <nearperm/nearmap.hpp>

#include <cstdlib>
#include <functional>
#include <numeric>
#include <queue>
#include <sstream>

namespace nearperm {

// ---------------------------------------------------------------------------
// group presentations

// A word is a list of syllables (generator index, nonzero exponent).
using Word = std::vector<std::pair<int, Int>>;

struct GroupSpec {
    std::vector<std::string> generators;
    std::vector<Word> relators;
    int abelian_rank = 0;  // declared rank for growth comparisons; 0 = none

    bool operator==(const GroupSpec&) const = default;
};

inline Word commutator_word(int i, int j) {
    return Word{{i, 1}, {j, 1}, {i, -1}, {j, -1}};
}

// free abelian group of rank d: pairwise commutator relators
inline GroupSpec free_abelian_spec(std::vector<std::string> names) {
    GroupSpec s;
    s.generators = std::move(names);
    int d = (int)s.generators.size();
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) s.relators.push_back(commutator_word(i, j));
    s.abelian_rank = d;
    return s;
}

inline void validate(const GroupSpec& s) {
    require(!s.generators.empty(), "group: no generators");
    for (const auto& w : s.relators)
        for (const auto& [g, e] : w) {
            require(g >= 0 && g < (int)s.generators.size(), "group: bad generator in relator");
            require(e != 0, "group: zero exponent in relator");
        }
}

// ---------------------------------------------------------------------------
// near actions

struct NearAction {
    Carrier carrier;
    GroupSpec spec;
    std::vector<NearMap> lifts;  // one per generator, src = dst = carrier
};

inline void validate(const NearAction& a) {
    validate(a.spec);
    require(a.lifts.size() == a.spec.generators.size(), "action: lift count mismatch");
    for (const auto& f : a.lifts) {
        require(f.src == a.carrier && f.dst == a.carrier, "action: lift carrier mismatch");
        validate(f);
        require(closely_bijective(f), "action: lift not closely bijective");
    }
}

// evaluate a word to a near map (leftmost syllable applied last)
inline NearMap word_map(const NearAction& a, const Word& w) {
    NearMap acc = identity_map(a.carrier);
    for (const auto& [g, e] : w) acc = compose(acc, power(a.lifts.at(g), e));
    return acc;
}

struct RelatorReport {
    bool ok = false;
    std::optional<Int> support;  // disagreement-with-identity size when finite
};

struct VerifyReport {
    bool ok = false;
    std::vector<RelatorReport> relators;
};

// each relator must evaluate to a finitely supported permutation
inline VerifyReport verify_near_action(const NearAction& a) {
    validate(a);
    VerifyReport rep;
    rep.ok = true;
    for (const auto& w : a.spec.relators) {
        NearMap m = word_map(a, w);
        Disagreement d = disagreement(m, identity_map(a.carrier));
        RelatorReport r;
        r.ok = !d.infinite;
        if (r.ok) r.support = (Int)d.points.size();
        rep.ok = rep.ok && r.ok;
        rep.relators.push_back(std::move(r));
    }
    return rep;
}

// a genuine action: every lift a total bijection, every relator exactly trivial
inline bool is_genuine_action(const NearAction& a) {
    validate(a);
    for (const auto& f : a.lifts) {
        MapAnalysis an = analyze(f);
        if (an.undefined_count != 0 || !an.unmatched.empty() || !an.evicted.empty()) return false;
    }
    for (const auto& w : a.spec.relators)
        if (!graph_equal(word_map(a, w), identity_map(a.carrier))) return false;
    return true;
}

inline std::vector<Int> index_character(const NearAction& a) {
    std::vector<Int> phi;
    for (const auto& f : a.lifts) {
        ExtInt ix = index(f);
        require(ix.is_finite(), "index_character: lift index infinite");
        phi.push_back(ix.v);
    }
    return phi;
}

inline Int index_number(const NearAction& a) {
    Int g = 0;
    for (Int v : index_character(a)) g = std::gcd(g, v);
    return g;
}

// ---------------------------------------------------------------------------
// serialization (generator names label relator syllables)

inline Json to_json(const NearAction& a) {
    Json j;
    j["carrier"] = to_json(a.carrier);
    Json grp;
    grp["generators"] = a.spec.generators;
    Json rels = Json::array();
    for (const auto& w : a.spec.relators) {
        Json jw = Json::array();
        for (const auto& [g, e] : w) jw.push_back(Json::array({a.spec.generators[g], e}));
        rels.push_back(jw);
    }
    grp["relators"] = rels;
    grp["abelian_rank"] = a.spec.abelian_rank;
    j["group"] = grp;
    Json lifts = Json::array();
    for (const auto& f : a.lifts) lifts.push_back(to_json(f));
    j["lifts"] = lifts;
    return j;
}

inline NearAction action_from_json(const Json& j) {
    NearAction a;
    a.carrier = carrier_from_json(j.at("carrier"));
    const Json& grp = j.at("group");
    a.spec.generators = grp.at("generators").get<std::vector<std::string>>();
    std::map<std::string, int> gi;
    for (int i = 0; i < (int)a.spec.generators.size(); ++i) gi[a.spec.generators[i]] = i;
    for (const auto& jw : grp.at("relators")) {
        Word w;
        for (const auto& js : jw) {
            std::string name = js.at(0).get<std::string>();
            require(gi.count(name), "action: unknown generator in relator");
            w.push_back({gi[name], js.at(1).get<Int>()});
        }
        a.spec.relators.push_back(std::move(w));
    }
    a.spec.abelian_rank = grp.value("abelian_rank", 0);
    for (const auto& jf : j.at("lifts")) a.lifts.push_back(nearmap_from_json(jf));
    validate(a);
    return a;
}

// ---------------------------------------------------------------------------
// commensurated subsets

// exact image of Y under f as a rect set: piece images of Y minus the
// exception keys, plus the defined exception values
inline RectSet image_set(const NearMap& f, const RectSet& Y) {
    RectSet keys;
    for (const auto& [k, v] : f.exceptions) {
        (void)v;
        keys.rects.push_back(point_rect(f.src, k));
    }
    keys = rectset_normalize(keys.rects, f.src);
    std::vector<Rect> img;
    for (const auto& p : f.pieces) {
        RectSet s = rectset_intersect(Y, rectset_of(f.src, {p.source}), f.src);
        s = rectset_diff(s, keys, f.src);
        for (const auto& r : s.rects) img.push_back(transform_rect(p.tr, r, p.target_cell));
    }
    for (const auto& [k, v] : f.exceptions)
        if (v && rectset_contains(Y, k)) img.push_back(point_rect(f.dst, *v));
    return rectset_normalize(img, f.dst);
}

struct CommReport {
    bool commensurated = false;
    std::vector<std::optional<Int>> boundary_sizes;   // |image(Y) symdiff Y| per generator
    std::optional<std::vector<Int>> restricted_index;  // when commensurated
};

inline Json to_json(const CommReport& r) {
    Json j;
    j["commensurated"] = r.commensurated;
    Json bs = Json::array();
    for (const auto& b : r.boundary_sizes)
        bs.push_back(b ? Json(*b) : Json(nullptr));
    j["boundary_sizes"] = bs;
    if (r.restricted_index)
        j["restricted_index"] = *r.restricted_index;
    else
        j["restricted_index"] = nullptr;
    return j;
}

// restricted index of f on Y (both defect terms finite when the symmetric
// difference is): |Y minus f(Y)| - |points of Y leaving Y or undefined|
inline Int restricted_index(const NearMap& f, const RectSet& Y) {
    RectSet img = image_set(f, Y);
    auto missed = rectset_card(rectset_diff(Y, img, f.dst));
    require(missed.has_value(), "restricted_index: infinite defect");
    Int leaving = 0;
    RectSet keys;
    for (const auto& [k, v] : f.exceptions) {
        (void)v;
        keys.rects.push_back(point_rect(f.src, k));
    }
    keys = rectset_normalize(keys.rects, f.src);
    for (const auto& p : f.pieces) {
        RectSet s = rectset_intersect(Y, rectset_of(f.src, {p.source}), f.src);
        s = rectset_diff(s, keys, f.src);
        std::vector<Rect> timg;
        for (const auto& r : s.rects) timg.push_back(transform_rect(p.tr, r, p.target_cell));
        auto out = rectset_card(
            rectset_diff(rectset_normalize(timg, f.dst), Y, f.dst));
        require(out.has_value(), "restricted_index: infinite defect");
        leaving += *out;
    }
    for (const auto& [k, v] : f.exceptions)
        if (rectset_contains(Y, k) && (!v || !rectset_contains(Y, *v))) ++leaving;
    return *missed - leaving;
}

inline CommReport commensurated_test(const NearAction& a, const RectSet& Y) {
    CommReport rep;
    rep.commensurated = true;
    for (const auto& f : a.lifts) {
        RectSet img = image_set(f, Y);
        RectSet sym = rectset_union(rectset_diff(Y, img, a.carrier),
                                    rectset_diff(img, Y, a.carrier), a.carrier);
        auto c = rectset_card(sym);
        rep.boundary_sizes.push_back(c);
        rep.commensurated = rep.commensurated && c.has_value();
    }
    if (rep.commensurated) {
        std::vector<Int> phi;
        for (const auto& f : a.lifts) phi.push_back(restricted_index(f, Y));
        rep.restricted_index = phi;
    }
    return rep;
}

// gcd of the restricted index character
inline Int restricted_index_number(const CommReport& r) {
    require(r.restricted_index.has_value(), "restricted_index_number: not commensurated");
    Int g = 0;
    for (Int v : *r.restricted_index) g = std::gcd(g, v);
    return g;
}

// ---------------------------------------------------------------------------
// truncated Schreier graphs

struct SchreierTruncation {
    Int radius = 0;
    std::vector<Point> vertices;  // sorted
    struct Edge {
        int gen;
        int from;
        int to;
        auto operator<=>(const Edge&) const = default;
    };
    std::vector<Edge> edges;
    std::vector<char> boundary;  // per vertex: some neighbor missing from window
};

inline SchreierTruncation schreier_truncation(const NearAction& a, Int R) {
    SchreierTruncation t;
    t.radius = R;
    t.vertices = enumerate_window(a.carrier, R);
    std::map<Point, int> idx;
    for (int i = 0; i < (int)t.vertices.size(); ++i) idx[t.vertices[i]] = i;
    t.boundary.assign(t.vertices.size(), 0);
    std::vector<NearMap> inv;
    for (const auto& f : a.lifts) inv.push_back(invert(f));
    for (int g = 0; g < (int)a.lifts.size(); ++g) {
        for (int i = 0; i < (int)t.vertices.size(); ++i) {
            auto y = evaluate(a.lifts[g], t.vertices[i]);
            if (y && idx.count(*y))
                t.edges.push_back({g, i, idx[*y]});
            else
                t.boundary[i] = 1;
            auto z = evaluate(inv[g], t.vertices[i]);
            if (!z || !idx.count(*z)) t.boundary[i] = 1;
        }
    }
    std::sort(t.edges.begin(), t.edges.end());
    return t;
}

// connected components of the truncation (edges taken undirected),
// as sorted lists of vertex indices, ordered by smallest member
inline std::vector<std::vector<int>> components(const SchreierTruncation& t) {
    int n = (int)t.vertices.size();
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& e : t.edges) {
        int a = find(e.from), b = find(e.to);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::map<int, std::vector<int>> comp;
    for (int i = 0; i < n; ++i) comp[find(i)].push_back(i);
    std::vector<std::vector<int>> out;
    for (auto& [root, members] : comp) out.push_back(std::move(members));
    return out;
}

inline std::string point_label(const Point& p) {
    std::string s = p.cell;
    for (Int c : p.coords) s += "," + std::to_string(c);
    return s;
}

inline std::string to_dot(const SchreierTruncation& t, const GroupSpec& spec) {
    std::ostringstream os;
    os << "digraph schreier {\n";
    for (int i = 0; i < (int)t.vertices.size(); ++i) {
        os << "  v" << i << " [label=\"" << point_label(t.vertices[i]) << "\"";
        if (t.boundary[i]) os << " shape=box";
        os << "];\n";
    }
    for (const auto& e : t.edges)
        os << "  v" << e.from << " -> v" << e.to << " [label=\""
           << spec.generators[e.gen] << "\"];\n";
    os << "}\n";
    return os.str();
}

inline Json to_json(const SchreierTruncation& t, const GroupSpec& spec) {
    Json j;
    j["radius"] = t.radius;
    Json vs = Json::array();
    for (const auto& v : t.vertices) vs.push_back(to_json(v));
    j["vertices"] = vs;
    Json es = Json::array();
    for (const auto& e : t.edges) {
        Json je;
        je["gen"] = spec.generators[e.gen];
        je["from"] = e.from;
        je["to"] = e.to;
        es.push_back(je);
    }
    j["edges"] = es;
    Json bs = Json::array();
    for (int i = 0; i < (int)t.vertices.size(); ++i)
        if (t.boundary[i]) bs.push_back(i);
    j["boundary"] = bs;
    return j;
}

// ---------------------------------------------------------------------------
// ball growth

// largest coordinate magnitude appearing in the action's irregular data
// (exceptions and finite piece bounds) and its per-step displacement bound
inline Int action_step_bound(const NearAction& a) {
    Int s = 1;
    for (const auto& f : a.lifts)
        for (const auto& p : f.pieces)
            for (Int ti : p.tr.t) s = std::max(s, std::llabs(ti));
    return s;
}

inline Int action_exception_radius(const NearAction& a) {
    Int e = 0;
    auto eat = [&](const Point& p) {
        for (Int c : p.coords) e = std::max(e, std::llabs(c));
    };
    for (const auto& f : a.lifts) {
        for (const auto& [k, v] : f.exceptions) {
            eat(k);
            if (v) eat(*v);
        }
        for (const auto& p : f.pieces)
            for (const auto& ax : p.source.axes) {
                if (ax.lo) e = std::max(e, std::llabs(*ax.lo));
                if (ax.hi) e = std::max(e, std::llabs(*ax.hi));
            }
    }
    return e;
}

// b(r) for r = 0..rmax, measured from the basepoint in the key-fob completion
// of a window graph large enough to contain every radius-rmax ball exactly:
// window components not containing the basepoint are starred to it by one
// edge each (at their least vertex), making growth well defined for
// disconnected truncations; for connected graphs this changes nothing.
inline std::vector<Int> ball_growth(const NearAction& a, const Point& base, Int rmax) {
    Int baseM = 0;
    for (Int c : base.coords) baseM = std::max(baseM, std::llabs(c));
    Int W = std::max(baseM, action_exception_radius(a)) + rmax * action_step_bound(a) + 1;
    std::vector<Point> verts = enumerate_window(a.carrier, W);
    std::map<Point, int> idx;
    for (int i = 0; i < (int)verts.size(); ++i) idx[verts[i]] = i;
    require(idx.count(base), "ball_growth: basepoint outside carrier window");
    std::vector<NearMap> maps = a.lifts;
    for (const auto& f : a.lifts) maps.push_back(invert(f));
    std::vector<std::vector<int>> adj(verts.size());
    for (const auto& f : maps)
        for (int i = 0; i < (int)verts.size(); ++i) {
            auto y = evaluate(f, verts[i]);
            if (y && idx.count(*y)) {
                adj[i].push_back(idx[*y]);
                adj[idx[*y]].push_back(i);
            }
        }
    // key-fob completion: one edge from each stray component's least vertex
    {
        std::vector<int> comp(verts.size(), -1);
        int nc = 0;
        for (int s = 0; s < (int)verts.size(); ++s) {
            if (comp[s] >= 0) continue;
            std::queue<int> q;
            q.push(s);
            comp[s] = nc;
            while (!q.empty()) {
                int x = q.front();
                q.pop();
                for (int y : adj[x])
                    if (comp[y] < 0) {
                        comp[y] = nc;
                        q.push(y);
                    }
            }
            ++nc;
        }
        int bc = comp[idx[base]];
        std::vector<int> least(nc, -1);
        for (int i = 0; i < (int)verts.size(); ++i)
            if (least[comp[i]] < 0) least[comp[i]] = i;  // verts sorted
        for (int c = 0; c < nc; ++c)
            if (c != bc) {
                adj[least[c]].push_back(idx[base]);
                adj[idx[base]].push_back(least[c]);
            }
    }
    std::vector<Int> dist(verts.size(), -1);
    std::queue<int> q;
    dist[idx[base]] = 0;
    q.push(idx[base]);
    while (!q.empty()) {
        int x = q.front();
        q.pop();
        for (int y : adj[x])
            if (dist[y] < 0) {
                dist[y] = dist[x] + 1;
                q.push(y);
            }
    }
    std::vector<Int> b(rmax + 1, 0);
    for (size_t i = 0; i < verts.size(); ++i)
        if (dist[i] >= 0 && dist[i] <= rmax) ++b[dist[i]];
    for (Int r = 1; r <= rmax; ++r) b[r] += b[r - 1];
    return b;
}

// ---------------------------------------------------------------------------
// Folner ratios

// |boundary of F| / |F| as a reduced fraction; boundary = points of F whose
// image under some generator lift is undefined or outside F
inline std::pair<Int, Int> folner_ratio(const NearAction& a, const std::vector<Point>& F) {
    require(!F.empty(), "folner_ratio: empty set");
    std::set<Point> in(F.begin(), F.end());
    Int bd = 0;
    for (const auto& x : in) {
        for (const auto& f : a.lifts) {
            auto y = evaluate(f, x);
            if (!y || !in.count(*y)) {
                ++bd;
                break;
            }
        }
    }
    Int n = (Int)in.size();
    Int g = std::gcd(bd, n);
    return {bd / (g ? g : 1), n / (g ? g : 1)};
}

// ---------------------------------------------------------------------------
// growth inequality

// closed ball cardinality of Z^d with the word metric of standard generators
inline Int abelian_ball(int d, Int r) {
    require(d >= 1 && d <= 4, "abelian_ball: rank out of range");
    // dp over axes: number of integer points with |x_1|+...+|x_k| <= r
    std::vector<Int> row(r + 1, 1);  // k = 0: only the origin, for every budget
    for (int k = 1; k <= d; ++k) {
        std::vector<Int> nxt(r + 1, 0);
        for (Int budget = 0; budget <= r; ++budget) {
            Int acc = 0;
            for (Int t = -budget; t <= budget; ++t) acc += row[budget - std::llabs(t)];
            nxt[budget] = acc;
        }
        row = std::move(nxt);
    }
    return row[r];
}

struct GrowthSample {
    Int r;
    Int lhs;  // b(3r/2)
    Int rhs;  // b(r) * (1 + b0(2r/3))
    bool holds;
};

struct GrowthReport {
    Int threshold = 0;
    std::vector<Int> ball;  // b(0..)
    std::vector<GrowthSample> samples;
    bool ok = true;  // all samples at or above threshold hold
};

inline GrowthReport growth_inequality_check(const NearAction& a, const Point& base, Int rmax) {
    require(a.spec.abelian_rank >= 1, "growth: declared abelian rank required");
    GrowthReport rep;
    rep.threshold = 3 * action_exception_radius(a) + 3;
    rep.ball = ball_growth(a, base, (3 * rmax) / 2);
    for (Int r = 1; r <= rmax; ++r) {
        GrowthSample s;
        s.r = r;
        s.lhs = rep.ball[(3 * r) / 2];
        s.rhs = rep.ball[r] * (1 + abelian_ball(a.spec.abelian_rank, (2 * r) / 3));
        s.holds = s.lhs <= s.rhs;
        if (r >= rep.threshold && !s.holds) rep.ok = false;
        rep.samples.push_back(s);
    }
    return rep;
}

inline Json to_json(const GrowthReport& r) {
    Json j;
    j["threshold"] = r.threshold;
    j["ball"] = r.ball;
    Json ss = Json::array();
    for (const auto& s : r.samples) {
        Json js;
        js["r"] = s.r;
        js["lhs"] = s.lhs;
        js["rhs"] = s.rhs;
        js["holds"] = s.holds;
        ss.push_back(js);
    }
    j["samples"] = ss;
    j["ok"] = r.ok;
    return j;
}

// ---------------------------------------------------------------------------
// rigidity: conjugator recovery over the free simply transitive Z^2 action

struct RigidityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// the standard translation lifts require a single unbounded 2-d cell
inline void require_free_z2(const NearAction& a) {
    require(a.spec.generators.size() == 2, "rigidity: two generators required");
    require(a.carrier.cells.size() == 1 && a.carrier.cells[0].dim() == 2,
            "rigidity: single planar cell required");
    for (const auto& ax : a.carrier.cells[0].axes)
        require(ax.kind == AxisKind::FullLine, "rigidity: full plane required");
    for (int g = 0; g < 2; ++g) {
        NearMap tr{a.carrier, a.carrier, {}, {}};
        std::vector<Int> t{g == 0 ? 1 : 0, g == 0 ? 0 : 1};
        tr.pieces.push_back(Piece{*make_rect(a.carrier, a.carrier.cells[0].id,
                                             {axis_all(), axis_all()}),
                                  a.carrier.cells[0].id, translation(t)});
        require(graph_equal(a.lifts[g], tr), "rigidity: alpha must be the translation action");
    }
}

}  // namespace detail

// recover the unique finitely supported sigma with sigma alpha sigma^-1 = beta;
// throws RigidityError when beta is not a genuine action, when a lift is not
// near the corresponding translation, or when the search window is exhausted
inline FinitePerm rigidity_conjugator(const NearAction& alpha, const NearAction& beta,
                                      Int max_window = 256) {
    validate(alpha);
    validate(beta);
    detail::require_free_z2(alpha);
    require(beta.carrier == alpha.carrier && beta.spec == alpha.spec,
            "rigidity: actions must share carrier and presentation");
    if (!is_genuine_action(beta)) throw RigidityError("beta is not a genuine action");
    for (int g = 0; g < 2; ++g)
        if (!near_equal(beta.lifts[g], alpha.lifts[g]))
            throw RigidityError("beta lift is not near the translation lift");
    const std::string cell = alpha.carrier.cells[0].id;
    std::vector<NearMap> binv{invert(beta.lifts[0]), invert(beta.lifts[1])};

    for (Int L = 8; L <= max_window; L *= 2) {
        // fill sigma from the rim inward: identity on the three outer shells,
        // then each point copies through the outward conjugation relation
        std::map<Point, Point> sigma;
        std::vector<Point> pts;
        for (Int x = -L; x <= L; ++x)
            for (Int y = -L; y <= L; ++y) pts.push_back(Point{cell, {x, y}});
        std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
            Int sa = std::max(std::llabs(a.coords[0]), std::llabs(a.coords[1]));
            Int sb = std::max(std::llabs(b.coords[0]), std::llabs(b.coords[1]));
            if (sa != sb) return sa > sb;
            return a < b;
        });
        bool fail = false;
        for (const auto& p : pts) {
            Int sx = std::max(std::llabs(p.coords[0]), std::llabs(p.coords[1]));
            if (sx >= L - 2) {
                sigma[p] = p;
                continue;
            }
            // step outward along the dominant axis
            int axis = std::llabs(p.coords[0]) >= std::llabs(p.coords[1]) ? 0 : 1;
            bool pos = p.coords[axis] >= 0;
            Point nb = p;
            nb.coords[axis] += pos ? 1 : -1;
            auto it = sigma.find(nb);
            if (it == sigma.end()) {
                fail = true;
                break;
            }
            // sigma(p + e) = beta(sigma(p)) for outward +e; inverted otherwise
            auto v = pos ? evaluate(binv[axis], it->second)
                         : evaluate(beta.lifts[axis], it->second);
            if (!v) {
                fail = true;
                break;
            }
            sigma[p] = *v;
        }
        if (fail) continue;
        // consistency: the relation must hold in both directions everywhere
        // strictly inside the window, not just along the propagation tree
        for (const auto& [p, sp] : sigma) {
            Int sh = std::max(std::llabs(p.coords[0]), std::llabs(p.coords[1]));
            if (sh >= L - 1) continue;
            for (int axis = 0; axis < 2 && !fail; ++axis) {
                Point nb = p;
                nb.coords[axis] += 1;
                auto want = evaluate(beta.lifts[axis], sp);
                auto it = sigma.find(nb);
                if (!want || it == sigma.end() || it->second != *want) fail = true;
            }
            if (fail) break;
        }
        if (fail) continue;
        FinitePerm out;
        for (const auto& [p, sp] : sigma)
            if (sp != p) out.moved[p] = sp;
        // the support must close up into a permutation
        std::set<Point> keys, vals;
        for (const auto& [k, v] : out.moved) {
            keys.insert(k);
            vals.insert(v);
        }
        if (keys != vals) continue;
        // final certificate: conjugation as near maps, both generators
        NearMap sm = identity_map(alpha.carrier);
        for (const auto& [k, v] : out.moved) sm.exceptions[k] = v;
        validate(sm);
        bool good = true;
        for (int g = 0; g < 2; ++g)
            if (!graph_equal(compose(sm, alpha.lifts[g]), compose(beta.lifts[g], sm)))
                good = false;
        if (good) return out;
    }
    throw RigidityError("no conjugator within the search window");
}

// ---------------------------------------------------------------------------
// bounded near-freeness check (incomplete by nature: only words up to length
// L are examined, and slanted agreement loci are reported as inconclusive)

struct NearFreeReport {
    bool ok = true;           // no examined word had an infinite fixed set
    bool conclusive = true;   // no word was skipped
    std::vector<Word> infinite_fixed;
};

inline NearFreeReport near_free_check(const NearAction& a, int L) {
    NearFreeReport rep;
    int n = (int)a.lifts.size();
    std::vector<Word> frontier{{}};
    for (int len = 1; len <= L; ++len) {
        std::vector<Word> next;
        for (const auto& w : frontier)
            for (int g = 0; g < n; ++g)
                for (Int e : {Int(1), Int(-1)}) {
                    if (!w.empty() && w.back().first == g && w.back().second == -e) continue;
                    Word w2 = w;
                    w2.push_back({g, e});
                    next.push_back(w2);
                }
        for (const auto& w : next) {
            try {
                FixedSet fs = fixed_set(word_map(a, w));
                auto c = rectset_card(fs.bulk);
                bool fin = c.has_value();
                if (!fin) {
                    rep.ok = false;
                    rep.infinite_fixed.push_back(w);
                }
            } catch (const std::exception&) {
                rep.conclusive = false;
            }
        }
        frontier = std::move(next);
    }
    return rep;
}

}  // namespace nearperm
