// entres: exact entanglement-structure toolkit.
//
// Every subcommand prints one JSON report on stdout (human tables behind
// --pretty). Exit codes: 0 = success / verified; 2 = verification failed or
// an --expect mismatch; 1 = usage or I/O error.

#include <chrono>
#include <cstdlib>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "entres/entres.hpp"

namespace {

using namespace entres;
using Clock = std::chrono::steady_clock;

struct Report {
    std::string subcommand;
    Json inputs = Json::array();
    Json verdicts = Json::object();
    Json provenance = Json::array();
    Clock::time_point start = Clock::now();
    bool pretty = false;

    void add_input_digest(const Json& canonical) { inputs.push_back(json_digest(canonical)); }

    int emit(int exit_code) {
        Json j;
        j["subcommand"] = subcommand;
        j["inputs_digest"] = inputs;
        j["verdicts"] = verdicts;
        j["timings_ms"]["total"] =
            std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
        j["provenance"] = provenance;
        if (pretty) {
            std::cout << "== " << subcommand << " ==\n";
            for (auto it = verdicts.begin(); it != verdicts.end(); ++it)
                std::cout << "  " << it.key() << ": " << it.value().dump() << "\n";
            for (const auto& p : provenance) std::cout << "  - " << p.get<std::string>() << "\n";
        } else {
            std::cout << j.dump(2) << "\n";
        }
        return exit_code;
    }
};

unsigned worker_count() {
    if (const char* env = std::getenv("ENTRES_THREADS")) {
        long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Order-preserving parallel map; results are merged in input order so reports
// are identical for any worker count.
template <class T, class F>
auto parallel_map(const std::vector<T>& items, F&& f) {
    using R = decltype(f(items[0]));
    std::vector<R> results(items.size());
    unsigned workers = std::min<unsigned>(worker_count(), items.size() ? items.size() : 1);
    if (workers <= 1) {
        for (size_t i = 0; i < items.size(); ++i) results[i] = f(items[i]);
        return results;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            while (true) {
                size_t i = next.fetch_add(1);
                if (i >= items.size()) return;
                results[i] = f(items[i]);
            }
        });
    for (auto& t : pool) t.join();
    return results;
}

Tensor load_tensor_or_catalog(const std::string& file, const std::string& catalog_spec) {
    if (!file.empty()) return tensor_from_json(load_json(file));
    // catalog spec "name:p1:p2"
    std::vector<uint32_t> params;
    std::string name = catalog_spec;
    if (auto pos = catalog_spec.find(':'); pos != std::string::npos) {
        name = catalog_spec.substr(0, pos);
        std::stringstream ss(catalog_spec.substr(pos + 1));
        std::string tok;
        while (std::getline(ss, tok, ':')) params.push_back(std::stoul(tok));
    }
    return catalog_state(name, params);
}

Hypergraph make_lattice(const std::string& kind, uint32_t rows, uint32_t cols, bool periodic) {
    if (kind == "square") return square_lattice(rows, cols, periodic);
    if (kind == "plaquette") return plaquette_square_lattice(rows, cols, periodic);
    if (kind == "kagome") return kagome_lattice(rows, cols, periodic);
    if (kind == "triangular") return triangular_lattice(rows, cols, periodic);
    if (kind == "half-triangular") return half_filled_triangular_lattice(rows, cols, periodic);
    if (kind == "fan") return fan(rows);
    throw std::invalid_argument("unknown lattice: " + kind);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"entres: exact resource calculus for entanglement structures"};
    app.require_subcommand(1);
    bool pretty = false;
    app.add_flag("--pretty", pretty, "human-readable output instead of JSON");

    // ---- build ----
    auto* cmd_build = app.add_subcommand("build", "compose a structure file from a lattice and a catalog state");
    std::string b_lattice = "square", b_state = "epr:2", b_out;
    uint32_t b_rows = 2, b_cols = 2;
    bool b_periodic = false;
    cmd_build->add_option("--lattice", b_lattice, "square|plaquette|kagome|triangular|half-triangular|fan");
    cmd_build->add_option("--rows", b_rows);
    cmd_build->add_option("--cols", b_cols);
    cmd_build->add_flag("--periodic", b_periodic);
    cmd_build->add_option("--state", b_state, "catalog spec, e.g. ghz:2:3 or epr_triangle:2");
    cmd_build->add_option("--out", b_out, "output structure file")->required();

    // ---- materialize ----
    auto* cmd_mat = app.add_subcommand("materialize", "materialize a structure to its global tensor");
    std::string m_structure, m_out;
    uint64_t m_cap = kDefaultMaterializeCap;
    cmd_mat->add_option("--structure", m_structure)->required();
    cmd_mat->add_option("--out", m_out, "output tensor file");
    cmd_mat->add_option("--cap", m_cap, "term cap");

    // ---- verify-restriction ----
    auto* cmd_vr = app.add_subcommand("verify-restriction", "exact check of (x)_v M_v src == dst");
    std::string vr_src, vr_dst, vr_maps;
    cmd_vr->add_option("--src", vr_src)->required();
    cmd_vr->add_option("--dst", vr_dst)->required();
    cmd_vr->add_option("--maps", vr_maps)->required();

    // ---- verify-degeneration ----
    auto* cmd_vd = app.add_subcommand("verify-degeneration", "exact leading-order check of eps-polynomial maps");
    std::string vd_src, vd_dst, vd_maps;
    cmd_vd->add_option("--src", vd_src)->required();
    cmd_vd->add_option("--dst", vd_dst)->required();
    cmd_vd->add_option("--maps", vd_maps)->required();

    // ---- interpolate ----
    auto* cmd_ip = app.add_subcommand("interpolate", "turn a degeneration into a restriction from src (x) GHZ_{e+1}");
    std::string ip_src, ip_dst, ip_maps, ip_out;
    cmd_ip->add_option("--src", ip_src)->required();
    cmd_ip->add_option("--dst", ip_dst)->required();
    cmd_ip->add_option("--maps", ip_maps)->required();
    cmd_ip->add_option("--out", ip_out, "output restriction map-family file");

    // ---- fold ----
    auto* cmd_fold = app.add_subcommand("fold", "fold a structure along a vertex map");
    std::string f_structure, f_map, f_out;
    bool f_drop_internal = false;
    cmd_fold->add_option("--structure", f_structure)->required();
    cmd_fold->add_option("--map", f_map)->required();
    cmd_fold->add_flag("--drop-internal", f_drop_internal, "drop edges internal to one folded vertex");
    cmd_fold->add_option("--out", f_out);

    // ---- obstruct ----
    auto* cmd_ob = app.add_subcommand("obstruct", "run an obstruction battery against a transformation");
    std::string ob_src_file, ob_dst_file, ob_battery = "flatten", ob_lattice, ob_src_spec, ob_dst_spec, ob_expect;
    uint64_t ob_cap = kDefaultBipartitionCap;
    uint32_t ob_r = 0, ob_d = 0;
    cmd_ob->add_option("--battery", ob_battery, "flatten|koszul|functional");
    cmd_ob->add_option("--src-file", ob_src_file, "source structure file");
    cmd_ob->add_option("--dst-file", ob_dst_file, "target structure file");
    cmd_ob->add_option("--lattice", ob_lattice, "kagome|triangular (koszul battery shorthand)");
    cmd_ob->add_option("--src", ob_src_spec, "shorthand source: ghz:<r>");
    cmd_ob->add_option("--dst", ob_dst_spec, "shorthand target: epr:<D>");
    cmd_ob->add_option("--max-bipartitions", ob_cap);
    cmd_ob->add_option("--expect", ob_expect, "obstructed|inconclusive (exit 2 on mismatch)");
    (void)ob_r;
    (void)ob_d;

    // ---- catalog ----
    auto* cmd_cat = app.add_subcommand("catalog", "list / show / verify / export shipped constructions");
    bool cat_list = false, cat_verify_all = false;
    std::string cat_show, cat_verify, cat_export, cat_outdir = ".";
    cmd_cat->add_flag("--list", cat_list);
    cmd_cat->add_flag("--verify-all", cat_verify_all);
    cmd_cat->add_option("--show", cat_show);
    cmd_cat->add_option("--verify", cat_verify);
    cmd_cat->add_option("--export", cat_export);
    cmd_cat->add_option("--out-dir", cat_outdir);

    // ---- contract ----
    auto* cmd_con = app.add_subcommand("contract", "exact tensor network coefficient");
    std::string con_structure, con_covectors, con_plan = "greedy";
    cmd_con->add_option("--structure", con_structure)->required();
    cmd_con->add_option("--covectors", con_covectors)->required();
    cmd_con->add_option("--plan", con_plan, "greedy|naive");

    // ---- matchings ----
    auto* cmd_match = app.add_subcommand("matchings", "matchings partition function vs its network encoding");
    uint32_t mt_rows = 2, mt_cols = 2;
    std::string mt_xfile;
    uint64_t mt_seed = 0;
    bool mt_have_seed = false;
    cmd_match->add_option("--rows", mt_rows)->required();
    cmd_match->add_option("--cols", mt_cols)->required();
    cmd_match->add_option("--x", mt_xfile, "edge weight file {\"x\":[\"1\",...]}");
    cmd_match->add_option("--seed", mt_seed)->each([&](const std::string&) { mt_have_seed = true; });

    // ---- rank-bounds ----
    auto* cmd_rb = app.add_subcommand("rank-bounds", "aggregated certified rank bounds");
    std::string rb_tensor, rb_catalog = "";
    std::string rb_effort = "quick";
    cmd_rb->add_option("--tensor", rb_tensor, "tensor file");
    cmd_rb->add_option("--catalog", rb_catalog, "catalog spec, e.g. epr_triangle:2");
    cmd_rb->add_option("--effort", rb_effort, "quick|full");

    // ---- stabilizer ----
    auto* cmd_st = app.add_subcommand("stabilizer", "check (g_v)_v stabilizes a structure");
    std::string st_structure, st_maps;
    cmd_st->add_option("--structure", st_structure)->required();
    cmd_st->add_option("--maps", st_maps)->required();

    CLI11_PARSE(app, argc, argv);

    Report rep;
    rep.pretty = pretty;

    try {
        if (*cmd_build) {
            rep.subcommand = "build";
            Hypergraph g = make_lattice(b_lattice, b_rows, b_cols, b_periodic);
            Tensor state = load_tensor_or_catalog("", b_state);
            EntanglementStructure s = uniform_structure(g, state);
            Json js = structure_to_json(s);
            save_json(b_out, js);
            rep.add_input_digest(js);
            rep.verdicts["vertices"] = g.vertex_count;
            rep.verdicts["edges"] = g.edges.size();
            rep.verdicts["written"] = b_out;
            return rep.emit(0);
        }
        if (*cmd_mat) {
            rep.subcommand = "materialize";
            Json js = load_json(m_structure);
            rep.add_input_digest(js);
            EntanglementStructure s = structure_from_json(js);
            Tensor t = materialize(s, m_cap);
            rep.verdicts["terms"] = t.term_count();
            rep.verdicts["parties"] = t.party_count();
            if (!m_out.empty()) {
                save_json(m_out, tensor_to_json(t));
                rep.verdicts["written"] = m_out;
            }
            return rep.emit(0);
        }
        if (*cmd_vr || *cmd_vd) {
            const bool restriction = static_cast<bool>(*cmd_vr);
            rep.subcommand = restriction ? "verify-restriction" : "verify-degeneration";
            Json jsrc = load_json(restriction ? vr_src : vd_src);
            Json jdst = load_json(restriction ? vr_dst : vd_dst);
            Json jmaps = load_json(restriction ? vr_maps : vd_maps);
            rep.add_input_digest(jsrc);
            rep.add_input_digest(jdst);
            rep.add_input_digest(jmaps);
            EntanglementStructure src = structure_from_json(jsrc);
            EntanglementStructure dst = structure_from_json(jdst);
            bool ok;
            if (restriction) {
                VerifyResult r = verify_restriction(src, dst, map_family_from_json(jmaps));
                if (!r.ok && r.message == "dimension mismatch")
                    throw std::invalid_argument("map family does not match the target dimensions");
                ok = r.ok;
                rep.verdicts["verified"] = r.ok;
                if (!r.ok) {
                    Json diffs = Json::array();
                    for (const auto& d : r.diffs) {
                        Json e;
                        e["idx"] = d.index;
                        e["got"] = rat_str(d.lhs);
                        e["want"] = rat_str(d.rhs);
                        diffs.push_back(std::move(e));
                    }
                    rep.verdicts["diffs"] = diffs;
                }
            } else {
                DegenerationResult r =
                    verify_degeneration(src, dst, poly_map_family_from_json(jmaps));
                if (!r.ok && r.lead_check.message == "dimension mismatch")
                    throw std::invalid_argument("map family does not match the target dimensions");
                ok = r.ok;
                rep.verdicts["verified"] = r.ok;
                rep.verdicts["d"] = r.d;
                rep.verdicts["e"] = r.e;
            }
            return rep.emit(ok ? 0 : 2);
        }
        if (*cmd_ip) {
            rep.subcommand = "interpolate";
            Json jsrc = load_json(ip_src), jdst = load_json(ip_dst), jmaps = load_json(ip_maps);
            rep.add_input_digest(jsrc);
            rep.add_input_digest(jdst);
            rep.add_input_digest(jmaps);
            EntanglementStructure src = structure_from_json(jsrc);
            EntanglementStructure dst = structure_from_json(jdst);
            InterpolatedRestriction ir =
                interpolate_degeneration(src, dst, poly_map_family_from_json(jmaps));
            rep.verdicts["verified"] = true;
            rep.verdicts["d"] = ir.d;
            rep.verdicts["e"] = ir.e;
            rep.provenance.push_back("interpolation nodes 1.." + std::to_string(ir.e + 1) +
                                     "; weights folded into vertex 0");
            if (!ip_out.empty()) {
                save_json(ip_out, map_family_to_json(ir.maps));
                rep.verdicts["written"] = ip_out;
            }
            return rep.emit(0);
        }
        if (*cmd_fold) {
            rep.subcommand = "fold";
            Json js = load_json(f_structure), jm = load_json(f_map);
            rep.add_input_digest(js);
            rep.add_input_digest(jm);
            EntanglementStructure s = structure_from_json(js);
            Folding f = folding_from_json(jm);
            EntanglementStructure out = fold_structure(s, f, f_drop_internal);
            rep.verdicts["vertices"] = out.graph.vertex_count;
            rep.verdicts["edges"] = out.graph.edges.size();
            if (!f_out.empty()) {
                save_json(f_out, structure_to_json(out));
                rep.verdicts["written"] = f_out;
            }
            return rep.emit(0);
        }
        if (*cmd_ob) {
            rep.subcommand = "obstruct";
            std::string verdict = "inconclusive";
            if (ob_battery == "koszul" && !ob_lattice.empty()) {
                // shorthand: GHZ_r structure vs EPR_D structure on a foldable lattice
                auto parse_tail = [](const std::string& spec) {
                    auto pos = spec.find(':');
                    if (pos == std::string::npos)
                        throw std::invalid_argument("expected name:value, got " + spec);
                    return static_cast<uint32_t>(std::stoul(spec.substr(pos + 1)));
                };
                uint32_t r = parse_tail(ob_src_spec);
                uint32_t d = parse_tail(ob_dst_spec);
                FanBatteryReport fb = ob_lattice == "kagome" ? kagome_fan_epr_bound(d)
                                                             : triangular_fan_epr_bound(d);
                rep.verdicts["per_edge_bound"] = fb.per_edge_bound;
                rep.verdicts["copies_per_fan_edge"] = fb.copies;
                rep.verdicts["r_min"] = fb.r_min;
                rep.verdicts["r"] = r;
                rep.provenance.push_back(fb.method);
                verdict = (r < fb.r_min) ? "obstructed" : "inconclusive";
            } else if (ob_battery == "functional") {
                Json jsrc = load_json(ob_src_file), jdst = load_json(ob_dst_file);
                rep.add_input_digest(jsrc);
                rep.add_input_digest(jdst);
                EntanglementStructure src = structure_from_json(jsrc);
                EntanglementStructure dst = structure_from_json(jdst);
                ObstructionReport r =
                    asymptotic_obstruction_check(src, dst, uniform_theta(src.graph.vertex_count));
                rep.verdicts["src_log2_functional"] = r.src_value;
                rep.verdicts["dst_log2_functional"] = r.dst_value;
                rep.provenance.push_back(r.detail);
                verdict = r.verdict == ObstructionVerdict::Obstructed ? "obstructed"
                                                                      : "inconclusive";
            } else if (ob_battery == "flatten") {
                Json jsrc = load_json(ob_src_file), jdst = load_json(ob_dst_file);
                rep.add_input_digest(jsrc);
                rep.add_input_digest(jdst);
                EntanglementStructure src = structure_from_json(jsrc);
                EntanglementStructure dst = structure_from_json(jdst);
                if (src.graph.vertex_count != dst.graph.vertex_count)
                    throw std::invalid_argument("flatten battery needs equal vertex sets");
                auto foldings = all_bipartition_foldings(src.graph, ob_cap);
                std::vector<std::vector<uint32_t>> bips;
                for (const auto& f : foldings) {
                    std::vector<uint32_t> left;
                    for (uint32_t v = 0; v < src.graph.vertex_count; ++v)
                        if (f.vertex_map[v] == 1) left.push_back(v);
                    bips.push_back(std::move(left));
                }
                for (const auto& bip : bips) {
                    BoundReport a = flattening_lower_bound(src, {bip}, false);
                    BoundReport b = flattening_lower_bound(dst, {bip}, false);
                    if (a.bound < b.bound) {
                        verdict = "obstructed";
                        std::ostringstream w;
                        w << "rank gap at " << b.witness << ": source " << rat_str(a.bound)
                          << " < target " << rat_str(b.bound);
                        rep.provenance.push_back(w.str());
                        break;
                    }
                }
                if (verdict != "obstructed")
                    rep.provenance.push_back("no bipartition rank gap found");
            } else {
                throw std::invalid_argument("unknown battery: " + ob_battery);
            }
            rep.verdicts["verdict"] = verdict;
            int code = 0;
            if (!ob_expect.empty() && ob_expect != verdict) code = 2;
            return rep.emit(code);
        }
        if (*cmd_cat) {
            rep.subcommand = "catalog";
            auto items = catalog_constructions();
            if (cat_list) {
                Json l = Json::array();
                for (const auto& c : items) {
                    Json e;
                    e["id"] = c.id;
                    e["kind"] = c.kind == CatalogConstruction::Kind::Restriction
                                    ? "restriction"
                                    : "degeneration";
                    e["description"] = c.description;
                    l.push_back(std::move(e));
                }
                rep.verdicts["items"] = l;
                return rep.emit(0);
            }
            if (!cat_show.empty()) {
                auto c = catalog_construction(cat_show);
                rep.verdicts["id"] = c.id;
                rep.verdicts["description"] = c.description;
                rep.verdicts["kind"] = c.kind == CatalogConstruction::Kind::Restriction
                                           ? "restriction"
                                           : "degeneration";
                rep.verdicts["source_edges"] = c.source.graph.edges.size();
                rep.verdicts["target_edges"] = c.target.graph.edges.size();
                rep.provenance.push_back(c.provenance);
                return rep.emit(0);
            }
            if (!cat_export.empty()) {
                auto c = catalog_construction(cat_export);
                save_json(cat_outdir + "/" + c.id + ".source.json", structure_to_json(c.source));
                save_json(cat_outdir + "/" + c.id + ".target.json", structure_to_json(c.target));
                if (c.kind == CatalogConstruction::Kind::Restriction)
                    save_json(cat_outdir + "/" + c.id + ".maps.json", map_family_to_json(c.maps));
                else
                    save_json(cat_outdir + "/" + c.id + ".maps.json",
                              poly_map_family_to_json(c.poly_maps));
                rep.verdicts["exported"] = c.id;
                return rep.emit(0);
            }
            // verify one or all
            std::vector<CatalogConstruction> to_verify;
            if (!cat_verify.empty()) to_verify.push_back(catalog_construction(cat_verify));
            else if (cat_verify_all) to_verify = items;
            else throw CLI::ValidationError("catalog", "one of --list/--show/--verify/--verify-all/--export required");
            auto results = parallel_map(to_verify, [](const CatalogConstruction& c) {
                return c.verify();
            });
            bool all_ok = true;
            Json l = Json::array();
            for (size_t i = 0; i < to_verify.size(); ++i) {
                Json e;
                e["id"] = to_verify[i].id;
                e["verified"] = results[i].ok;
                if (to_verify[i].kind == CatalogConstruction::Kind::Degeneration) {
                    e["d"] = results[i].d;
                    e["e"] = results[i].e;
                }
                e["source_terms"] = results[i].source_terms;
                e["target_terms"] = results[i].target_terms;
                all_ok = all_ok && results[i].ok;
                l.push_back(std::move(e));
            }
            rep.verdicts["items"] = l;
            rep.verdicts["all_verified"] = all_ok;
            return rep.emit(all_ok ? 0 : 2);
        }
        if (*cmd_con) {
            rep.subcommand = "contract";
            Json js = load_json(con_structure), jc = load_json(con_covectors);
            rep.add_input_digest(js);
            rep.add_input_digest(jc);
            EntanglementStructure s = structure_from_json(js);
            CovectorAssignment a = covectors_from_json(jc);
            ContractionPlan plan = con_plan == "naive" ? naive_order(s) : greedy_order(s, &a);
            Rational value = contract(s, a, &plan);
            rep.verdicts["value"] = rat_str(value);
            rep.verdicts["plan"] = con_plan;
            rep.verdicts["estimated_peak_terms"] = plan.estimated_peak_terms;
            return rep.emit(0);
        }
        if (*cmd_match) {
            rep.subcommand = "matchings";
            Hypergraph g = square_lattice(mt_rows, mt_cols, false);
            std::vector<Rational> x;
            if (!mt_xfile.empty()) {
                Json jx = load_json(mt_xfile);
                rep.add_input_digest(jx);
                for (const auto& v : jx.at("x")) x.push_back(rat_parse(v.get<std::string>()));
            } else if (mt_have_seed) {
                Xorshift rng(mt_seed);
                for (size_t i = 0; i < g.edges.size(); ++i)
                    x.push_back(Rational(rng.next_int(-9, 9), rng.next_int(1, 9)));
            } else {
                x.assign(g.edges.size(), Rational(1));
            }
            Rational brute = matchings_partition_brute(g, x);
            MatchingsNetwork net = matchings_vertex_tensors(mt_rows, mt_cols, x);
            Rational via_network = contract(net.structure, net.covectors);
            rep.verdicts["brute"] = rat_str(brute);
            rep.verdicts["contracted"] = rat_str(via_network);
            rep.verdicts["equal"] = (brute == via_network);
            return rep.emit(brute == via_network ? 0 : 2);
        }
        if (*cmd_rb) {
            rep.subcommand = "rank-bounds";
            Tensor t = load_tensor_or_catalog(rb_tensor, rb_catalog);
            if (!rb_tensor.empty()) rep.add_input_digest(load_json(rb_tensor));
            RankBounds rb = rank_bounds(t, rb_effort == "full" ? Effort::Full : Effort::Quick);
            rep.verdicts["lower"] = rb.lower.get_str();
            rep.verdicts["upper"] = rb.upper.get_str();
            rep.verdicts["upper_certified"] = rb.upper_certified;
            for (const auto& p : rb.provenance) rep.provenance.push_back(p);
            return rep.emit(0);
        }
        if (*cmd_st) {
            rep.subcommand = "stabilizer";
            Json js = load_json(st_structure), jm = load_json(st_maps);
            rep.add_input_digest(js);
            rep.add_input_digest(jm);
            EntanglementStructure s = structure_from_json(js);
            VerifyResult r = check_stabilizer(s, map_family_from_json(jm));
            rep.verdicts["stabilizes"] = r.ok;
            return rep.emit(r.ok ? 0 : 2);
        }
    } catch (const std::exception& ex) {
        Json j;
        j["subcommand"] = rep.subcommand.empty() ? "error" : rep.subcommand;
        j["error"] = ex.what();
        std::cout << j.dump(2) << "\n";
        return 1;
    }
    return 1;
}
