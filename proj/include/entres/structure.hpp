#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypergraph.hpp"
#include "matrix.hpp"
#include "poly.hpp"
#include "tensor.hpp"

namespace entres {

// Hypergraph with one tensor per edge (party count = edge arity). The global
// state is the tensor product over the edges, regrouped by vertices.
struct EntanglementStructure {
    Hypergraph graph;
    std::vector<Tensor> edge_states;

    EntanglementStructure() = default;
    EntanglementStructure(Hypergraph g, std::vector<Tensor> states)
        : graph(std::move(g)), edge_states(std::move(states)) {
        validate();
    }

    void validate() const {
        graph.validate();
        if (edge_states.size() != graph.edges.size())
            throw std::invalid_argument("one edge state per edge required");
        for (size_t ei = 0; ei < edge_states.size(); ++ei) {
            if (edge_states[ei].party_count() != graph.edges[ei].size())
                throw std::invalid_argument("edge state arity mismatch at edge " +
                                            std::to_string(ei));
            if (edge_states[ei].is_zero())
                throw std::invalid_argument("edge state must be nonzero");
        }
    }

    bool operator==(const EntanglementStructure& o) const {
        return graph == o.graph && edge_states == o.edge_states;
    }
};

// A vertex Hilbert-space slot: one party of one edge state. Slot order at a
// vertex is edge-list order (and within one edge, position order); this is
// the serialization contract for all vertex indices.
struct Slot {
    size_t edge;
    size_t pos;
    uint32_t dim;
};

struct SlotTable {
    std::vector<std::vector<Slot>> slots;     // per vertex
    std::vector<uint32_t> vertex_dims;

    explicit SlotTable(const EntanglementStructure& s) {
        slots.resize(s.graph.vertex_count);
        for (size_t ei = 0; ei < s.graph.edges.size(); ++ei)
            for (size_t p = 0; p < s.graph.edges[ei].size(); ++p)
                slots[s.graph.edges[ei][p]].push_back({ei, p, s.edge_states[ei].dims[p]});
        vertex_dims.resize(s.graph.vertex_count);
        for (uint32_t v = 0; v < s.graph.vertex_count; ++v) {
            uint64_t d = 1;
            for (const Slot& sl : slots[v]) d *= sl.dim;
            if (d > UINT32_MAX) throw std::runtime_error("vertex dimension overflow");
            vertex_dims[v] = static_cast<uint32_t>(d);
        }
    }
};

inline std::vector<uint32_t> vertex_dims(const EntanglementStructure& s) {
    return SlotTable(s).vertex_dims;
}

inline constexpr uint64_t kDefaultMaterializeCap = 10'000'000;

// Global |V|-party tensor of the structure, slot order per SlotTable.
inline Tensor materialize(const EntanglementStructure& s,
                          uint64_t term_cap = kDefaultMaterializeCap) {
    s.validate();
    SlotTable table(s);
    uint64_t estimate = 1;
    for (const Tensor& t : s.edge_states) {
        estimate *= t.term_count();
        if (estimate > term_cap) throw std::runtime_error("too large to materialize");
    }

    // Per vertex, the stride of each slot in the mixed-radix vertex index.
    std::vector<std::vector<uint64_t>> stride(s.graph.vertex_count);
    for (uint32_t v = 0; v < s.graph.vertex_count; ++v) {
        const auto& sl = table.slots[v];
        stride[v].resize(sl.size());
        uint64_t acc = 1;
        for (size_t i = sl.size(); i-- > 0;) {
            stride[v][i] = acc;
            acc *= sl[i].dim;
        }
    }
    // Slot position lookup: (edge, pos) -> index within the vertex slot list.
    std::vector<std::vector<size_t>> slot_of(s.graph.edges.size());
    for (uint32_t v = 0; v < s.graph.vertex_count; ++v)
        for (size_t i = 0; i < table.slots[v].size(); ++i) {
            const Slot& sl = table.slots[v][i];
            if (slot_of[sl.edge].size() < s.graph.edges[sl.edge].size())
                slot_of[sl.edge].resize(s.graph.edges[sl.edge].size());
            slot_of[sl.edge][sl.pos] = i;
        }

    Tensor out(table.vertex_dims);
    std::vector<std::map<MultiIndex, Rational>::const_iterator> it(s.edge_states.size());
    for (size_t ei = 0; ei < s.edge_states.size(); ++ei) it[ei] = s.edge_states[ei].terms.begin();

    MultiIndex idx(s.graph.vertex_count);
    while (true) {
        std::vector<uint64_t> vertex_index(s.graph.vertex_count, 0);
        Rational coeff = 1;
        for (size_t ei = 0; ei < s.edge_states.size(); ++ei) {
            coeff *= it[ei]->second;
            const MultiIndex& eidx = it[ei]->first;
            for (size_t p = 0; p < eidx.size(); ++p) {
                uint32_t v = s.graph.edges[ei][p];
                vertex_index[v] += eidx[p] * stride[v][slot_of[ei][p]];
            }
        }
        for (uint32_t v = 0; v < s.graph.vertex_count; ++v)
            idx[v] = static_cast<uint32_t>(vertex_index[v]);
        out.add_term(idx, coeff);

        size_t ei = s.edge_states.size();
        while (ei-- > 0) {
            if (++it[ei] != s.edge_states[ei].terms.end()) break;
            it[ei] = s.edge_states[ei].terms.begin();
            if (ei == 0) return out;
        }
        if (s.edge_states.empty()) return out;
    }
}

// ---------------------------------------------------------------------------
// Catalog states.

// The Bini tensor: three level-2 EPR pairs shared pairwise (cyclic pairing)
// with |11> projected out on the third party. Six terms, dims (4,4,4).
inline Tensor bini_state() {
    Tensor t({4, 4, 4});
    auto q = [](uint32_t a, uint32_t b) { return a * 2 + b; };
    t.terms.emplace(MultiIndex{q(0, 0), q(0, 0), q(0, 0)}, Rational(1));
    t.terms.emplace(MultiIndex{q(0, 0), q(0, 1), q(1, 0)}, Rational(1));
    t.terms.emplace(MultiIndex{q(0, 1), q(1, 0), q(0, 0)}, Rational(1));
    t.terms.emplace(MultiIndex{q(1, 0), q(0, 0), q(0, 1)}, Rational(1));
    t.terms.emplace(MultiIndex{q(0, 1), q(1, 1), q(1, 0)}, Rational(1));
    t.terms.emplace(MultiIndex{q(1, 1), q(1, 0), q(0, 1)}, Rational(1));
    return t;
}

// Four-party plaquette state from which a global GHZ can be extracted on the
// lattice. Corners A,B,C,D are cyclic (A bottom-left, B top-left, C top-right,
// D bottom-right); each corner holds a pair of (n+1)-level slots facing its
// two neighbors, ordered (previous side, next side). The state is the sum of
// the four "hinge" patterns: hinge X carries level-n EPR pairs on the two
// sides adjacent to corner X, all other slots in |0>.
inline Tensor global_ghz_plaquette_state(uint32_t n) {
    if (n == 0) throw std::invalid_argument("global_ghz_plaquette needs n >= 1");
    const uint32_t m = n + 1;
    Tensor t(std::vector<uint32_t>(4, m * m));
    // corner slots: X holds (side_{X-1}, side_X); side_X joins corners X, X+1
    for (uint32_t hinge = 0; hinge < 4; ++hinge) {
        for (uint32_t i = 1; i <= n; ++i)
            for (uint32_t j = 1; j <= n; ++j) {
                // side_{hinge-1} = i, side_hinge = j, all other sides 0
                std::array<uint32_t, 4> side{0, 0, 0, 0};
                side[(hinge + 3) % 4] = i;
                side[hinge] = j;
                MultiIndex idx(4);
                for (uint32_t x = 0; x < 4; ++x)
                    idx[x] = side[(x + 3) % 4] * m + side[x];
                t.add_term(idx, Rational(1));
            }
    }
    return t;
}

// Named catalog dispatcher used by the file formats and the CLI.
inline Tensor catalog_state(const std::string& name, const std::vector<uint32_t>& params) {
    auto want = [&](size_t n) {
        if (params.size() != n)
            throw std::invalid_argument("catalog state '" + name + "' expects " +
                                        std::to_string(n) + " parameter(s)");
    };
    if (name == "ghz") { want(2); return ghz_state(params[0], params[1]); }
    if (name == "epr") { want(1); return epr_pair(params[0]); }
    if (name == "epr_triangle") { want(1); return epr_triangle(params[0]); }
    if (name == "epr_square") { want(1); return epr_square_ring(params[0]); }
    if (name == "w") { want(0); return w_state(); }
    if (name == "lambda") { want(0); return lambda_state(); }
    if (name == "bini") { want(0); return bini_state(); }
    if (name == "global_ghz_plaquette") { want(1); return global_ghz_plaquette_state(params[0]); }
    throw std::invalid_argument("unknown catalog state: " + name);
}

// Structure with the same state on every edge (arity must match everywhere).
inline EntanglementStructure uniform_structure(const Hypergraph& g, const Tensor& state) {
    return EntanglementStructure(g, std::vector<Tensor>(g.edges.size(), state));
}

// Single-edge structure helper.
inline EntanglementStructure single_edge_structure(const Tensor& t) {
    Hypergraph g;
    g.vertex_count = static_cast<uint32_t>(t.party_count());
    std::vector<uint32_t> e(t.party_count());
    for (uint32_t i = 0; i < e.size(); ++i) e[i] = i;
    g.edges.push_back(e);
    return EntanglementStructure(std::move(g), {t});
}

// ---------------------------------------------------------------------------
// Exact verification.

struct DiffEntry {
    MultiIndex index;
    Rational lhs, rhs;
};

struct VerifyResult {
    bool ok = false;
    std::vector<DiffEntry> diffs;  // up to 10 differing coefficients
    std::string message;
};

inline VerifyResult compare_tensors(const Tensor& got, const Tensor& want) {
    VerifyResult r;
    if (got.dims != want.dims) {
        r.message = "dimension mismatch";
        return r;
    }
    auto ig = got.terms.begin();
    auto iw = want.terms.begin();
    while ((ig != got.terms.end() || iw != want.terms.end()) && r.diffs.size() < 10) {
        if (iw == want.terms.end() || (ig != got.terms.end() && ig->first < iw->first)) {
            r.diffs.push_back({ig->first, ig->second, Rational(0)});
            ++ig;
        } else if (ig == got.terms.end() || iw->first < ig->first) {
            r.diffs.push_back({iw->first, Rational(0), iw->second});
            ++iw;
        } else {
            if (ig->second != iw->second)
                r.diffs.push_back({ig->first, ig->second, iw->second});
            ++ig;
            ++iw;
        }
    }
    r.ok = r.diffs.empty() && got.terms.size() == want.terms.size();
    if (!r.ok && r.message.empty()) r.message = "coefficient mismatch";
    return r;
}

inline Tensor as_global_tensor(const EntanglementStructure& s,
                               uint64_t cap = kDefaultMaterializeCap) {
    return materialize(s, cap);
}
inline const Tensor& as_global_tensor(const Tensor& t, uint64_t = kDefaultMaterializeCap) {
    return t;
}

// Exact check that (tensor_v M_v) src == dst.
template <class Src, class Dst>
VerifyResult verify_restriction(const Src& src, const Dst& dst, const LocalMapFamily& maps,
                                uint64_t cap = kDefaultMaterializeCap) {
    const Tensor s = as_global_tensor(src, cap);
    const Tensor d = as_global_tensor(dst, cap);
    Tensor got = apply_local_maps(s, maps);
    return compare_tensors(got, d);
}

struct DegenerationResult {
    bool ok = false;
    uint32_t d = 0;  // leading eps degree
    uint32_t e = 0;  // tail length (max degree - d)
    Tensor lead;
    VerifyResult lead_check;
};

// Exact check that the lowest-order term of (tensor_v T_v(eps)) src equals
// dst; returns the degree d and tail length e.
template <class Src, class Dst>
DegenerationResult verify_degeneration(const Src& src, const Dst& dst, const PolyMapFamily& maps,
                                       uint64_t cap = kDefaultMaterializeCap) {
    const Tensor s = as_global_tensor(src, cap);
    const Tensor d = as_global_tensor(dst, cap);
    DegenerationResult r;
    LeadingTermResult lt = poly_apply_and_leading(s, maps);
    r.d = lt.d;
    r.e = lt.tail_length();
    r.lead = lt.lead;
    r.lead_check = compare_tensors(lt.lead, d);
    r.ok = r.lead_check.ok;
    return r;
}

// ---------------------------------------------------------------------------
// Folding of structures and pushforward of local maps.

// The folded structure: same edge tensors with parties grouped by image
// vertex (groups ordered by first occurrence inside the edge). Edges that
// land entirely inside one folded vertex are dropped when drop_internal is
// set (useful for obstruction arguments; it changes the state by a local
// factor, so keep it off when verifying exact equalities).
inline EntanglementStructure fold_structure(const EntanglementStructure& s, const Folding& f,
                                            bool drop_internal = false) {
    f.validate(s.graph.vertex_count);
    Hypergraph folded = fold(s.graph, f);
    EntanglementStructure out;
    out.graph.vertex_count = folded.vertex_count;
    for (size_t ei = 0; ei < folded.edges.size(); ++ei) {
        if (drop_internal && folded.edges[ei].size() == 1) continue;
        const auto& orig = s.graph.edges[ei];
        const auto& img = folded.edges[ei];
        std::vector<std::vector<size_t>> groups(img.size());
        for (size_t p = 0; p < orig.size(); ++p) {
            uint32_t target = f.vertex_map[orig[p]];
            size_t g = std::find(img.begin(), img.end(), target) - img.begin();
            groups[g].push_back(p);
        }
        out.graph.edges.push_back(img);
        out.edge_states.push_back(group_parties(s.edge_states[ei], groups));
    }
    out.validate();
    return out;
}

namespace detail {

// Atom = one (edge, pos) party of an edge state. The permutation between the
// folded slot order (edge-major over the folded structure) and the
// vertex-major order (original vertices ascending, each with its own edge-
// major slots) realizes the regrouping of Hilbert spaces.
struct AtomList {
    std::vector<std::pair<size_t, size_t>> atoms;  // (edge, pos)
    std::vector<uint32_t> dims;
};

inline AtomList folded_vertex_atoms(const EntanglementStructure& s, const Folding& f,
                                    uint32_t target_vertex) {
    AtomList out;
    for (size_t ei = 0; ei < s.graph.edges.size(); ++ei)
        for (size_t p = 0; p < s.graph.edges[ei].size(); ++p)
            if (f.vertex_map[s.graph.edges[ei][p]] == target_vertex) {
                out.atoms.emplace_back(ei, p);
                out.dims.push_back(s.edge_states[ei].dims[p]);
            }
    return out;
}

inline AtomList vertex_major_atoms(const EntanglementStructure& s, const Folding& f,
                                   uint32_t target_vertex) {
    AtomList out;
    SlotTable table(s);
    for (uint32_t v = 0; v < s.graph.vertex_count; ++v) {
        if (f.vertex_map[v] != target_vertex) continue;
        for (const Slot& sl : table.slots[v]) {
            out.atoms.emplace_back(sl.edge, sl.pos);
            out.dims.push_back(sl.dim);
        }
    }
    return out;
}

// Permutation matrix sending the vertex-major index space onto the folded
// (edge-major) slot order.
inline Matrix fold_regroup_permutation(const EntanglementStructure& s, const Folding& f,
                                       uint32_t target_vertex) {
    AtomList folded = folded_vertex_atoms(s, f, target_vertex);
    AtomList vmajor = vertex_major_atoms(s, f, target_vertex);
    std::vector<size_t> perm(folded.atoms.size());
    for (size_t j = 0; j < folded.atoms.size(); ++j) {
        auto it = std::find(vmajor.atoms.begin(), vmajor.atoms.end(), folded.atoms[j]);
        perm[j] = static_cast<size_t>(it - vmajor.atoms.begin());
    }
    return permutation_matrix(vmajor.dims, perm);
}

}  // namespace detail

// Pushforward of a verified restriction through a folding: the folded map at
// v' is the tensor product of the original maps over {v : f(v) = v'},
// conjugated by the slot-regrouping permutations of the source and target
// structures.
inline LocalMapFamily push_maps_through_folding(const EntanglementStructure& src,
                                                const EntanglementStructure& dst,
                                                const LocalMapFamily& maps, const Folding& f) {
    if (maps.size() != src.graph.vertex_count)
        throw std::invalid_argument("push_maps_through_folding: map count mismatch");
    LocalMapFamily out;
    out.reserve(f.target_vertex_count);
    for (uint32_t w = 0; w < f.target_vertex_count; ++w) {
        Matrix prod = Matrix::identity(1);
        for (uint32_t v = 0; v < src.graph.vertex_count; ++v)
            if (f.vertex_map[v] == w) prod = kron(prod, maps[v]);
        Matrix p_src = detail::fold_regroup_permutation(src, f, w);
        Matrix p_dst = detail::fold_regroup_permutation(dst, f, w);
        out.push_back(p_dst * prod * p_src.transpose());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Degeneration -> restriction interpolation.

struct InterpolatedRestriction {
    Tensor source;          // src (x) GHZ_{e+1}(k), Kronecker per party
    LocalMapFamily maps;    // verified restriction onto dst
    uint32_t d = 0, e = 0;
};

// Turn a verified degeneration of degree (d, e) into an exact restriction
// from src (x) GHZ_{e+1}(k). Evaluation nodes are 1..e+1; the Vandermonde
// weights are folded into vertex 0's map.
template <class Src, class Dst>
InterpolatedRestriction interpolate_degeneration(const Src& src, const Dst& dst,
                                                 const PolyMapFamily& maps,
                                                 uint64_t cap = kDefaultMaterializeCap) {
    const Tensor s = as_global_tensor(src, cap);
    const Tensor d = as_global_tensor(dst, cap);
    DegenerationResult deg = verify_degeneration(s, d, maps, cap);
    if (!deg.ok) throw std::runtime_error("interpolate_degeneration: degeneration invalid");
    const uint32_t e = deg.e;
    const uint32_t npts = e + 1;

    // Solve sum_j w_j node_j^(d+l) = [l == 0] for l = 0..e.
    std::vector<Rational> nodes(npts);
    for (uint32_t j = 0; j < npts; ++j) nodes[j] = Rational(j + 1);
    Matrix vand(npts, npts);
    for (uint32_t l = 0; l < npts; ++l)
        for (uint32_t j = 0; j < npts; ++j) vand.at(l, j) = rat_pow(nodes[j], deg.d + l);
    std::vector<Rational> rhs(npts, Rational(0));
    rhs[0] = 1;
    std::vector<Rational> weights = matrix_solve(vand, rhs);

    InterpolatedRestriction out;
    out.d = deg.d;
    out.e = e;
    out.source = kron(s, ghz_state(npts, static_cast<uint32_t>(s.party_count())));
    out.maps.reserve(s.party_count());
    for (size_t p = 0; p < s.party_count(); ++p) {
        const PolyMatrix& tp = maps[p];
        Matrix m(tp.rows, tp.cols * npts);
        for (uint32_t j = 0; j < npts; ++j) {
            Matrix ev = tp.eval(nodes[j]);
            Rational scale = (p == 0) ? weights[j] : Rational(1);
            for (size_t i = 0; i < ev.rows; ++i)
                for (size_t c = 0; c < ev.cols; ++c)
                    if (ev.at(i, c) != 0) m.at(i, c * npts + j) = ev.at(i, c) * scale;
        }
        out.maps.push_back(std::move(m));
    }
    VerifyResult check = verify_restriction(out.source, d, out.maps, cap);
    if (!check.ok)
        throw std::runtime_error("interpolate_degeneration: interpolated maps failed to verify");
    return out;
}

// ---------------------------------------------------------------------------
// Conciseness and stabilizers.

inline bool is_concise_structure(const EntanglementStructure& s,
                                 uint64_t cap = kDefaultMaterializeCap) {
    return is_concise(materialize(s, cap));
}

// (g_v)_v stabilizes the structure: square maps with identity action.
inline VerifyResult check_stabilizer(const EntanglementStructure& s, const LocalMapFamily& maps,
                                     uint64_t cap = kDefaultMaterializeCap) {
    SlotTable table(s);
    for (uint32_t v = 0; v < s.graph.vertex_count; ++v) {
        if (maps[v].rows != maps[v].cols || maps[v].cols != table.vertex_dims[v])
            throw std::invalid_argument("check_stabilizer: non-square maps");
    }
    return verify_restriction(s, s, maps, cap);
}

// ---------------------------------------------------------------------------
// Splitting a shared-vertex map into edge-local factors.

struct SplitResult {
    bool ok = false;
    Matrix m1, m2;        // M = kron(m1, m2); m2's first nonzero entry is 1
    std::string witness;  // set when the image is not a product
};

// Given concise phi1, phi2 whose LAST party sits at the shared vertex, and a
// map M acting on that joint party (cols = d1*d2) with a product image of
// target split rows = r1*r2, recover M = M1 (x) M2. Fails with a witness if
// the image does not factor across the two edges.
inline SplitResult split_shared_vertex_map(const Matrix& m, size_t r1, size_t r2,
                                           const Tensor& phi1, const Tensor& phi2) {
    SplitResult out;
    const size_t d1 = phi1.dims.back();
    const size_t d2 = phi2.dims.back();
    if (m.cols != d1 * d2 || m.rows != r1 * r2)
        throw std::invalid_argument("split_shared_vertex_map: shape mismatch");
    if (!is_concise(phi1) || !is_concise(phi2))
        throw std::invalid_argument("split_shared_vertex_map: inputs must be concise");

    // Image Psi = (M (x) 1_rest)(phi1 (x) phi2), arranged with parties
    // (rest1, rest2, out1, out2).
    const size_t k1 = phi1.party_count(), k2 = phi2.party_count();
    Tensor prod = tensor_product(phi1, phi2);  // parties: rest1, v1, rest2, v2
    // group (v1, v2) into the final party, keep rest in order
    std::vector<std::vector<size_t>> groups;
    for (size_t p = 0; p + 1 < k1; ++p) groups.push_back({p});
    for (size_t p = 0; p + 1 < k2; ++p) groups.push_back({k1 + p});
    groups.push_back({k1 - 1, k1 + k2 - 1});
    Tensor grouped = group_parties(prod, groups);
    LocalMapFamily fam;
    for (size_t p = 0; p + 1 < grouped.party_count(); ++p)
        fam.push_back(Matrix::identity(grouped.dims[p]));
    fam.push_back(m);
    Tensor psi = apply_local_maps(grouped, fam);
    // split the target party back into (out1, out2)
    Tensor psi_split(std::vector<uint32_t>{});
    {
        std::vector<uint32_t> dims;
        for (size_t p = 0; p + 1 < psi.party_count(); ++p) dims.push_back(psi.dims[p]);
        dims.push_back(static_cast<uint32_t>(r1));
        dims.push_back(static_cast<uint32_t>(r2));
        psi_split = Tensor(dims);
        for (const auto& [idx, c] : psi.terms) {
            MultiIndex ni(idx.begin(), idx.end() - 1);
            ni.push_back(static_cast<uint32_t>(idx.back() / r2));
            ni.push_back(static_cast<uint32_t>(idx.back() % r2));
            psi_split.terms.emplace(ni, c);
        }
    }
    if (psi_split.is_zero()) {
        out.witness = "image is zero";
        return out;
    }
    // Product across (rest1, out1) | (rest2, out2)?
    std::vector<size_t> left;
    for (size_t p = 0; p + 1 < k1; ++p) left.push_back(p);
    left.push_back(psi_split.party_count() - 2);
    Matrix flat = flatten(psi_split, left);
    if (matrix_rank(flat) != 1) {
        out.witness = "image does not factor across the two edges";
        return out;
    }
    // Extract the two factors from the rank-1 flattening.
    size_t pr = 0, pc = 0;
    bool found = false;
    for (size_t i = 0; i < flat.rows && !found; ++i)
        for (size_t j = 0; j < flat.cols && !found; ++j)
            if (flat.at(i, j) != 0) {
                pr = i;
                pc = j;
                found = true;
            }
    // psi1 over (rest1, out1): column pc; psi2 over (rest2, out2): row pr / pivot.
    const Rational pivot = flat.at(pr, pc);
    // rest1 dims product
    uint64_t rest1_dim = 1;
    for (size_t p = 0; p + 1 < k1; ++p) rest1_dim *= phi1.dims[p];
    uint64_t rest2_dim = 1;
    for (size_t p = 0; p + 1 < k2; ++p) rest2_dim *= phi2.dims[p];

    // Dual functionals: phi as matrix (rest x d); H = (A^T A)^-1 A^T gives
    // <eta_i | slice_j> = delta_ij.
    auto dual_rows = [](const Tensor& phi) {
        const size_t d = phi.dims.back();
        std::vector<size_t> left_parties(phi.party_count() - 1);
        for (size_t p = 0; p + 1 < phi.party_count(); ++p) left_parties[p] = p;
        Matrix a = flatten(phi, left_parties);  // rest x d
        Matrix ata = a.transpose() * a;
        return matrix_inverse(ata) * a.transpose();  // d x rest
    };
    Matrix h1 = dual_rows(phi1);
    Matrix h2 = dual_rows(phi2);

    // m1[rho, i] = sum_rest h1[i, rest] * psi1[rest, rho]
    Matrix m1(r1, d1), m2(r2, d2);
    for (size_t i = 0; i < d1; ++i)
        for (size_t rho = 0; rho < r1; ++rho) {
            Rational acc = 0;
            for (uint64_t rest = 0; rest < rest1_dim; ++rest) {
                const Rational& psi1_entry = flat.at(rest * r1 + rho, pc);
                if (psi1_entry == 0) continue;
                acc += h1.at(i, rest) * psi1_entry;
            }
            m1.at(rho, i) = acc;
        }
    for (size_t j = 0; j < d2; ++j)
        for (size_t rho = 0; rho < r2; ++rho) {
            Rational acc = 0;
            for (uint64_t rest = 0; rest < rest2_dim; ++rest) {
                const Rational& psi2_entry = flat.at(pr, rest * r2 + rho);
                if (psi2_entry == 0) continue;
                acc += h2.at(j, rest) * psi2_entry;
            }
            m2.at(rho, j) = acc / pivot;
        }
    // Normalize: push the global scalar into m1.
    Rational lead = 0;
    for (const auto& x : m2.a)
        if (x != 0) { lead = x; break; }
    if (lead == 0) {
        out.witness = "second factor vanished";
        return out;
    }
    m2 = m2.scaled(1 / lead);
    m1 = m1.scaled(lead);
    if (kron(m1, m2) == m) {
        out.ok = true;
        out.m1 = std::move(m1);
        out.m2 = std::move(m2);
    } else {
        out.witness = "reconstructed factors do not reproduce the map";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Acyclic edge-wise extraction (the restriction-tree direction).

// Given a verified restriction on a folded structure in which every edge but
// `edge_idx` is internal to a single folded vertex, contract the internal
// factors away and return per-party maps realizing the restriction on the
// chosen edge alone.
inline LocalMapFamily extract_edge_restriction(const EntanglementStructure& folded_src,
                                               const EntanglementStructure& folded_dst,
                                               const LocalMapFamily& folded_maps,
                                               size_t edge_idx) {
    const auto& edge = folded_src.graph.edges[edge_idx];
    SlotTable src_table(folded_src);
    SlotTable dst_table(folded_dst);
    LocalMapFamily out;
    for (size_t p = 0; p < edge.size(); ++p) {
        uint32_t v = edge[p];
        // Source side: embed |x> on the edge slot tensored with the internal
        // edge states on v's other slots.
        const auto& sslots = src_table.slots[v];
        std::vector<uint32_t> sdims;
        size_t s_edge_slot = SIZE_MAX;
        for (size_t i = 0; i < sslots.size(); ++i) {
            sdims.push_back(sslots[i].dim);
            if (sslots[i].edge == edge_idx) s_edge_slot = i;
        }
        std::vector<std::vector<Rational>> slot_vec(sslots.size());
        for (size_t i = 0; i < sslots.size(); ++i) {
            if (i == s_edge_slot) continue;
            const Tensor& st = folded_src.edge_states[sslots[i].edge];
            if (st.party_count() != 1)
                throw std::invalid_argument("extract_edge_restriction: non-internal extra edge");
            slot_vec[i].assign(sslots[i].dim, Rational(0));
            for (const auto& [idx, c] : st.terms) slot_vec[i][idx[0]] = c;
        }
        Matrix embed(src_table.vertex_dims[v], folded_src.edge_states[edge_idx].dims[p]);
        for (uint64_t row = 0; row < src_table.vertex_dims[v]; ++row) {
            auto digits = mixed_radix_decode(row, sdims);
            Rational coeff = 1;
            bool nz = true;
            for (size_t i = 0; i < sslots.size(); ++i) {
                if (i == s_edge_slot) continue;
                const Rational& c = slot_vec[i][digits[i]];
                if (c == 0) { nz = false; break; }
                coeff *= c;
            }
            if (nz) embed.at(row, digits[s_edge_slot]) = coeff;
        }
        // Target side: contract v's other slots with dual covectors of the
        // internal target states.
        const auto& dslots = dst_table.slots[v];
        std::vector<uint32_t> ddims;
        size_t d_edge_slot = SIZE_MAX;
        for (size_t i = 0; i < dslots.size(); ++i) {
            ddims.push_back(dslots[i].dim);
            if (dslots[i].edge == edge_idx) d_edge_slot = i;
        }
        std::vector<std::vector<Rational>> covec(dslots.size());
        for (size_t i = 0; i < dslots.size(); ++i) {
            if (i == d_edge_slot) continue;
            const Tensor& st = folded_dst.edge_states[dslots[i].edge];
            if (st.party_count() != 1)
                throw std::invalid_argument("extract_edge_restriction: non-internal extra edge");
            covec[i].assign(dslots[i].dim, Rational(0));
            const auto& [idx, c] = *st.terms.begin();
            covec[i][idx[0]] = 1 / c;
        }
        Matrix project(folded_dst.edge_states[edge_idx].dims[p], dst_table.vertex_dims[v]);
        for (uint64_t col = 0; col < dst_table.vertex_dims[v]; ++col) {
            auto digits = mixed_radix_decode(col, ddims);
            Rational coeff = 1;
            bool nz = true;
            for (size_t i = 0; i < dslots.size(); ++i) {
                if (i == d_edge_slot) continue;
                const Rational& c = covec[i][digits[i]];
                if (c == 0) { nz = false; break; }
                coeff *= c;
            }
            if (nz) project.at(digits[d_edge_slot], col) = coeff;
        }
        out.push_back(project * folded_maps[v] * embed);
    }
    return out;
}

}  // namespace entres
