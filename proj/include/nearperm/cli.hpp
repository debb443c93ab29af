#pragma once

// Command line driver. Every verb speaks "nearperm/1" JSON on stdin/stdout
// (or --in/--out files), so verbs compose as shell pipelines:
//
//     nearperm catalog build X_ms --m 2 --s 0 0 | nearperm classify-z2
//
// Exit codes: 0 success, 1 invalid input (malformed JSON, bad flags, failed
// verification), 2 computational obstruction on structurally valid input
// (rigidity window exhausted, carrier outside a method's scope). Errors are
// reported as machine-readable JSON on the output stream. All verbs are
// deterministic: a fixed input and seed produce byte-identical output.

#include <nearperm/amalgam.hpp>
#include <nearperm/catalog.hpp>
#include <nearperm/qcyclic.hpp>
#include <nearperm/z2class.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace nearperm {

namespace clidetail {

constexpr const char* kSchema = "nearperm/1";

// invalid input or usage: exit code 1
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Json tagged(const Json& body) {
    Json j;
    j["schema"] = kSchema;
    for (const auto& [k, v] : body.items()) j[k] = v;
    return j;
}

inline Json read_input(const std::string& in_file, std::istream& in) {
    try {
        if (!in_file.empty()) {
            std::ifstream f(in_file);
            if (!f) throw UsageError("cannot open input file: " + in_file);
            return Json::parse(f);
        }
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw UsageError(std::string("malformed JSON input: ") + e.what());
    }
}

inline NearAction read_action(const std::string& in_file, std::istream& in) {
    Json j = read_input(in_file, in);
    if (j.contains("schema") && j.at("schema") != kSchema)
        throw UsageError("unsupported schema tag");
    try {
        return action_from_json(j);
    } catch (const std::exception& e) {
        throw UsageError(std::string("invalid action document: ") + e.what());
    }
}

inline void write_text(const std::string& out_file, std::ostream& out, const std::string& text) {
    if (out_file.empty()) {
        out << text;
        return;
    }
    std::ofstream f(out_file);
    if (!f) throw UsageError("cannot open output file: " + out_file);
    f << text;
}

inline void write_doc(const std::string& out_file, std::ostream& out, const Json& j) {
    write_text(out_file, out, j.dump() + "\n");
}

}  // namespace clidetail

inline int run_cli(const std::vector<std::string>& argv, std::istream& in, std::ostream& out) {
    using namespace clidetail;

    // honored as a cap on worker parallelism; the current pipeline is
    // sequential, so the value only needs to parse
    if (const char* env = std::getenv("NEARPERM_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (env == end || *end != '\0' || v < 1) {
            write_doc("", out, tagged({{"error", "NEARPERM_THREADS must be a positive integer"}}));
            return 1;
        }
    }

    CLI::App app{"exact invariants of near permutations and near actions"};
    app.require_subcommand(1);
    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "seed for randomized workflows (outputs stay deterministic)");

    std::string in_file, out_file;

    auto* catalog = app.add_subcommand("catalog", "stock constructions");
    catalog->require_subcommand(1);
    auto* cat_list = catalog->add_subcommand("list", "list the available entries");
    auto* cat_build = catalog->add_subcommand("build", "emit one entry as an action document");
    std::string name;
    int opt_d = 2, opt_k = 2, opt_m = 2;
    Int opt_l = 1;
    std::vector<Int> opt_s{0, 0};
    bool opt_perturbed = false;
    cat_build->add_option("name", name, "catalog entry name")->required();
    cat_build->add_option("--d", opt_d, "rank");
    cat_build->add_option("--k", opt_k, "number of copies");
    cat_build->add_option("--m", opt_m, "number of sheets");
    cat_build->add_option("--s", opt_s, "holonomy pair")->expected(2);
    cat_build->add_option("--l", opt_l, "cut gap");
    cat_build->add_flag("--perturbed", opt_perturbed, "apply the parity perturbation");
    cat_build->add_option("--out", out_file, "write to a file instead of stdout");

    auto* invariants = app.add_subcommand("invariants", "index character and basic invariants");
    invariants->add_option("--in", in_file, "read from a file instead of stdin");
    invariants->add_option("--out", out_file);

    auto* verify = app.add_subcommand("verify", "check the relators of an action document");
    verify->add_option("--in", in_file);
    verify->add_option("--out", out_file);

    auto* schreier = app.add_subcommand("schreier", "truncated orbit graph");
    Int opt_radius = 8;
    std::string opt_format = "json";
    schreier->add_option("--radius", opt_radius, "window radius");
    schreier->add_option("--format", opt_format, "json or dot")
        ->check(CLI::IsMember({"json", "dot"}));
    schreier->add_option("--in", in_file);
    schreier->add_option("--out", out_file);

    auto* classify_cmd = app.add_subcommand("classify-z2", "ends, winding, and holonomy of a plane action");
    int opt_bound = 6;
    classify_cmd->add_option("--near-free-bound", opt_bound, "word length for the near-freeness probe");
    classify_cmd->add_option("--format", opt_format, "json, or dot for the glued corner graph")
        ->check(CLI::IsMember({"json", "dot"}));
    classify_cmd->add_option("--in", in_file);
    classify_cmd->add_option("--out", out_file);

    auto* amalgam = app.add_subcommand("amalgam", "window invariant of the standard amalgam");
    Int opt_p = 2, opt_n = 2, opt_L = 8;
    amalgam->add_option("--p", opt_p, "amalgamated prime");
    amalgam->add_option("--n", opt_n, "multiple of p");
    amalgam->add_option("--L", opt_L, "window depth");
    amalgam->add_option("--out", out_file);

    auto* qcyclic = app.add_subcommand("qcyclic", "residuals of quasi-cyclic constructions");
    Int opt_qm = 2, opt_qn = 0;
    std::vector<Int> opt_q, opt_digits;
    qcyclic->add_option("--m", opt_qm, "modulus");
    qcyclic->add_option("--q", opt_q, "block depths");
    qcyclic->add_option("--digits", opt_digits, "compatible digit stream, starting at 0");
    qcyclic->add_option("--n", opt_qn, "precision (defaults to the data's depth)");
    qcyclic->add_option("--out", out_file);

    auto* rigidity = app.add_subcommand("rigidity", "recover the conjugator between two actions");
    Int opt_window = 256;
    rigidity->add_option("--max-window", opt_window, "search radius bound");
    rigidity->add_option("--in", in_file);
    rigidity->add_option("--out", out_file);

    auto* growth = app.add_subcommand("growth", "ball growth and the submultiplicative bound");
    Int opt_rmax = 24;
    std::string opt_cell;
    std::vector<Int> opt_coords;
    growth->add_option("--rmax", opt_rmax, "largest radius");
    growth->add_option("--cell", opt_cell, "base point cell (defaults to the first cell)");
    growth->add_option("--coords", opt_coords, "base point coordinates (defaults to the origin)");
    growth->add_option("--in", in_file);
    growth->add_option("--out", out_file);

    try {
        std::vector<std::string> rev(argv.rbegin(), argv.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        write_doc("", out, tagged({{"error", std::string("usage: ") + e.what()}}));
        return 1;
    }

    try {
        if (cat_list->parsed()) {
            Json entries = Json::array();
            for (const auto& e : catalog_list())
                entries.push_back({{"name", e.name}, {"params", e.params}, {"doc", e.doc}});
            write_doc(out_file, out, tagged({{"entries", entries}}));
            return 0;
        }
        if (cat_build->parsed()) {
            NearAction a;
            if (name == "shift_N") a = build_shift_N();
            else if (name == "simply_transitive") a = build_simply_transitive(opt_d);
            else if (name == "free_orbits") a = build_free_orbits(opt_d, opt_k);
            else if (name == "exzz2") a = build_exzz2();
            else if (name == "houghton") a = build_houghton_near_zd(opt_d);
            else if (name == "X_ms") a = build_X_ms(opt_m, {opt_s[0], opt_s[1]});
            else if (name == "K_l") a = build_K(opt_l);
            else if (name == "dinfty") a = build_dinfty_on_Z(opt_perturbed);
            else if (name == "scott")
                throw UsageError("scott is a tower of maps, not a single action");
            else
                throw UsageError("unknown catalog entry: " + name);
            write_doc(out_file, out, tagged(to_json(a)));
            return 0;
        }
        if (invariants->parsed()) {
            NearAction a = read_action(in_file, in);
            VerifyReport rep = verify_near_action(a);
            Json j;
            j["generators"] = a.spec.generators;
            j["index_character"] = index_character(a);
            j["index_number"] = index_number(a);
            j["verified"] = rep.ok;
            j["genuine"] = is_genuine_action(a);
            j["step_bound"] = action_step_bound(a);
            j["exception_radius"] = action_exception_radius(a);
            write_doc(out_file, out, tagged(j));
            return 0;
        }
        if (verify->parsed()) {
            NearAction a = read_action(in_file, in);
            VerifyReport rep = verify_near_action(a);
            Json rels = Json::array();
            for (const auto& r : rep.relators) {
                Json jr;
                jr["ok"] = r.ok;
                jr["support"] = r.support ? Json(*r.support) : Json(nullptr);
                rels.push_back(jr);
            }
            write_doc(out_file, out, tagged({{"ok", rep.ok}, {"relators", rels}}));
            return rep.ok ? 0 : 1;
        }
        if (schreier->parsed()) {
            NearAction a = read_action(in_file, in);
            SchreierTruncation t = schreier_truncation(a, opt_radius);
            if (opt_format == "dot") write_text(out_file, out, to_dot(t, a.spec));
            else write_doc(out_file, out, tagged(to_json(t, a.spec)));
            return 0;
        }
        if (classify_cmd->parsed()) {
            NearAction a = read_action(in_file, in);
            if (opt_format == "dot") {
                auto [std_a, det] = standardize_basis(a);
                (void)det;
                write_text(out_file, out, to_dot(glue_strips(corner_graph(std_a))));
                return 0;
            }
            write_doc(out_file, out, tagged(to_json(classify(a, opt_bound))));
            return 0;
        }
        if (amalgam->parsed()) {
            AmalgamModel m = build_amalgam_model(opt_p, opt_n, opt_L);
            Json ev = Json::array();
            for (const auto& row : m.evidence)
                ev.push_back({{"radius", row.radius}, {"t_diff", row.t_diff}, {"u_diff", row.u_diff}});
            Json j;
            j["p"] = opt_p;
            j["n"] = opt_n;
            j["L"] = opt_L;
            j["points"] = m.data.points.size();
            j["invariant"] = amalgam_invariant(m.data, m.designated);
            j["designated"] = m.designated.size();
            j["boundary_artifacts"] = m.boundary_artifacts;
            j["evidence"] = ev;
            write_doc(out_file, out, tagged(j));
            return 0;
        }
        if (qcyclic->parsed()) {
            Json j;
            QCConstruction c;
            Int N = opt_qn;
            if (!opt_digits.empty()) {
                DigitStream d;
                d.m = opt_qm;
                d.s = opt_digits;
                validate_stream(d);
                if (N <= 0) N = (Int)d.s.size() - 1;
                std::vector<Int> blocks = digits_to_blocks(d, N);
                c = blocks_to_construction(opt_qm, blocks);
                j["m"] = opt_qm;
                j["digits"] = d.s;
                j["blocks"] = blocks;
            } else {
                c.m = opt_qm;
                c.q = opt_q;
                std::sort(c.q.begin(), c.q.end());
                validate_qc(c);
                if (N <= 0) N = c.q.empty() ? 1 : c.q.back() + 1;
                j["m"] = opt_qm;
            }
            j["q"] = c.q;
            j["n"] = N;
            Json table = Json::array(), consistent = Json::array();
            for (Int lvl = 1; lvl <= N; ++lvl) {
                table.push_back(residual_truncation(c, lvl));
                consistent.push_back(realizable_consistent(c, lvl));
            }
            j["residual_table"] = table;
            j["consistent"] = consistent;
            try {
                j["oracle"] = direct_count_oracle(c, N);
            } catch (const QCError&) {
                j["oracle"] = nullptr;  // model too large for the direct count
            }
            write_doc(out_file, out, tagged(j));
            return 0;
        }
        if (rigidity->parsed()) {
            Json doc = read_input(in_file, in);
            if (doc.contains("schema") && doc.at("schema") != kSchema)
                throw UsageError("unsupported schema tag");
            if (!doc.contains("alpha") || !doc.contains("beta"))
                throw UsageError("rigidity input must carry alpha and beta actions");
            NearAction alpha, beta;
            try {
                alpha = action_from_json(doc.at("alpha"));
                beta = action_from_json(doc.at("beta"));
            } catch (const std::exception& e) {
                throw UsageError(std::string("invalid action document: ") + e.what());
            }
            FinitePerm sigma = rigidity_conjugator(alpha, beta, opt_window);
            Json moved = Json::array();
            for (const auto& [x, y] : sigma.moved)
                moved.push_back(Json::array({to_json(x), to_json(y)}));
            write_doc(out_file, out, tagged({{"support", sigma.moved.size()}, {"moved", moved}}));
            return 0;
        }
        if (growth->parsed()) {
            NearAction a = read_action(in_file, in);
            Point base;
            base.cell = opt_cell.empty() ? a.carrier.cells.front().id : opt_cell;
            const Cell* cl = nullptr;
            for (const auto& c : a.carrier.cells)
                if (c.id == base.cell) cl = &c;
            if (!cl) throw UsageError("unknown base cell: " + base.cell);
            base.coords = opt_coords.empty() ? std::vector<Int>(cl->axes.size(), 0) : opt_coords;
            if (base.coords.size() != cl->axes.size())
                throw UsageError("base point has the wrong number of coordinates");
            GrowthReport r = growth_inequality_check(a, base, opt_rmax);
            write_doc(out_file, out, tagged(to_json(r)));
            return 0;
        }
        write_doc("", out, tagged({{"error", "no verb selected"}}));
        return 1;
    } catch (const UsageError& e) {
        write_doc("", out, tagged({{"error", e.what()}}));
        return 1;
    } catch (const Z2Error& e) {
        write_doc("", out, tagged({{"error", e.what()}, {"obstruction", true}}));
        return 2;
    } catch (const RigidityError& e) {
        write_doc("", out, tagged({{"error", e.what()}, {"obstruction", true}}));
        return 2;
    } catch (const std::exception& e) {
        write_doc("", out, tagged({{"error", e.what()}}));
        return 1;
    }
}

}  // namespace nearperm
