#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypergraph.hpp"
#include "matrix.hpp"
#include "obstructions.hpp"
#include "poly.hpp"
#include "structure.hpp"
#include "tensor.hpp"

namespace entres {

// A shipped, self-verifying transformation between entanglement structures.
struct CatalogConstruction {
    enum class Kind { Restriction, Degeneration };

    std::string id;
    std::string description;
    Kind kind = Kind::Restriction;
    EntanglementStructure source, target;
    LocalMapFamily maps;      // Kind::Restriction
    PolyMapFamily poly_maps;  // Kind::Degeneration
    std::string provenance;

    struct Verification {
        bool ok = false;
        uint32_t d = 0, e = 0;  // degeneration degrees (0 for restrictions)
        std::string message;
        uint64_t source_terms = 0, target_terms = 0;
    };

    Verification verify(uint64_t cap = kDefaultMaterializeCap) const {
        Verification v;
        Tensor src = materialize(source, cap);
        Tensor dst = materialize(target, cap);
        v.source_terms = src.term_count();
        v.target_terms = dst.term_count();
        if (kind == Kind::Restriction) {
            VerifyResult r = verify_restriction(src, dst, maps, cap);
            v.ok = r.ok;
            v.message = r.ok ? "verified" : r.message;
        } else {
            DegenerationResult r = verify_degeneration(src, dst, poly_maps, cap);
            v.ok = r.ok;
            v.d = r.d;
            v.e = r.e;
            v.message = r.ok ? "verified" : r.lead_check.message;
        }
        return v;
    }
};

// ---------------------------------------------------------------------------
// Bini degeneration: GHZ_5(3) degenerates onto the Bini tensor.

namespace detail {

// The three 4x5 eps-polynomial map columns of the classical approximate
// decomposition (one sign folded into the first party).
inline PolyMatrix bini_map_a() {
    PolyMatrix m(4, 5);
    auto set = [&](size_t row, size_t col, long c0, long c1) {
        if (c0) m.at(row, col) = m.at(row, col) + EpsPoly(Rational(c0));
        if (c1) m.at(row, col) = m.at(row, col) + EpsPoly::monomial(1, Rational(c1));
    };
    // columns: |01>+e|11>, |00>, -|01>, -(|00>+|01>+e|10>), |01>+e|10>
    set(1, 0, 1, 0); set(3, 0, 0, 1);
    set(0, 1, 1, 0);
    set(1, 2, -1, 0);
    set(0, 3, -1, 0); set(1, 3, -1, 0); set(2, 3, 0, -1);
    set(1, 4, 1, 0); set(2, 4, 0, 1);
    return m;
}

inline PolyMatrix bini_map_b() {
    PolyMatrix m(4, 5);
    auto set = [&](size_t row, size_t col, long c0, long c1) {
        if (c0) m.at(row, col) = m.at(row, col) + EpsPoly(Rational(c0));
        if (c1) m.at(row, col) = m.at(row, col) + EpsPoly::monomial(1, Rational(c1));
    };
    // columns: |10>, |00>+e|01>, |00>+|10>+e|11>, |00>, |00>+e|11>
    set(2, 0, 1, 0);
    set(0, 1, 1, 0); set(1, 1, 0, 1);
    set(0, 2, 1, 0); set(2, 2, 1, 0); set(3, 2, 0, 1);
    set(0, 3, 1, 0);
    set(0, 4, 1, 0); set(3, 4, 0, 1);
    return m;
}

inline PolyMatrix bini_map_c() {
    PolyMatrix m(4, 5);
    auto set = [&](size_t row, size_t col, long c0, long c1) {
        if (c0) m.at(row, col) = m.at(row, col) + EpsPoly(Rational(c0));
        if (c1) m.at(row, col) = m.at(row, col) + EpsPoly::monomial(1, Rational(c1));
    };
    // columns: |01>+e|00>, |10>+e|00>, |01>, |10>, |01>+|10>
    set(1, 0, 1, 0); set(0, 0, 0, 1);
    set(2, 1, 1, 0); set(0, 1, 0, 1);
    set(1, 2, 1, 0);
    set(2, 3, 1, 0);
    set(1, 4, 1, 0); set(2, 4, 1, 0);
    return m;
}

inline Matrix pair_to_level3() {
    // |0><00| + |1><01| + |2><10|
    Matrix t(3, 4);
    t.at(0, 0) = 1;
    t.at(1, 1) = 1;
    t.at(2, 2) = 1;
    return t;
}

inline Matrix pair_to_level2() {
    // |0><00| + |1>(<01| + <10|)
    Matrix t(2, 4);
    t.at(0, 0) = 1;
    t.at(1, 1) = 1;
    t.at(1, 2) = 1;
    return t;
}

inline Matrix qubit_permutation(size_t n_qubits, const std::vector<size_t>& perm) {
    return permutation_matrix(std::vector<uint32_t>(n_qubits, 2), perm);
}

}  // namespace detail

inline CatalogConstruction bini_degeneration() {
    CatalogConstruction c;
    c.id = "bini-degeneration";
    c.description = "GHZ_5(3) degenerates onto the Bini tensor (leading order eps^1)";
    c.kind = CatalogConstruction::Kind::Degeneration;
    c.provenance = "approximate 2x2 / 2x3 matrix multiplication kernel (Bini-Capovani-"
                   "Romani-Lotti 1979), transcribed as eps-polynomial local maps";
    c.source = single_edge_structure(ghz_state(5, 3));
    c.target = single_edge_structure(bini_state());
    c.poly_maps = {detail::bini_map_a(), detail::bini_map_b(), detail::bini_map_c()};
    return c;
}

// ---------------------------------------------------------------------------
// W degeneration: GHZ_2(3) degenerates onto W(3).

inline CatalogConstruction w_degeneration() {
    CatalogConstruction c;
    c.id = "w-degeneration";
    c.description = "(|0>+eps|1>)^3 - |0>^3 = eps W + O(eps^2) as maps from GHZ_2(3)";
    c.kind = CatalogConstruction::Kind::Degeneration;
    c.provenance = "standard border-rank-2 approximation of W";
    c.source = single_edge_structure(ghz_state(2, 3));
    c.target = single_edge_structure(w_state());
    PolyMatrix a(2, 2), b(2, 2);
    a.at(0, 0) = EpsPoly(Rational(1));
    a.at(1, 0) = EpsPoly::monomial(1, Rational(1));
    a.at(0, 1) = EpsPoly(Rational(-1));  // sign of the -|000> branch lives here
    b.at(0, 0) = EpsPoly(Rational(1));
    b.at(1, 0) = EpsPoly::monomial(1, Rational(1));
    b.at(0, 1) = EpsPoly(Rational(1));
    c.poly_maps = {a, b, b};
    return c;
}

// ---------------------------------------------------------------------------
// Strassen: GHZ_7(3) restricts onto the EPR_2 triangle.

inline CatalogConstruction strassen_decomposition() {
    CatalogConstruction c;
    c.id = "strassen";
    c.description = "7-product decomposition of 2x2 matrix multiplication as a restriction "
                    "GHZ_7(3) >= EPR_2 triangle";
    c.kind = CatalogConstruction::Kind::Restriction;
    c.provenance = "Strassen 1969";
    c.source = single_edge_structure(ghz_state(7, 3));
    c.target = single_edge_structure(epr_triangle(2));
    // u over (i,k): first-factor coefficients; vmat over (k,j): second-factor
    // coefficients (stored transposed so v indexes (j,k)); w over (i,j).
    const long u[7][2][2] = {{{1, 0}, {0, 1}}, {{0, 0}, {1, 1}}, {{1, 0}, {0, 0}},
                             {{0, 0}, {0, 1}}, {{1, 1}, {0, 0}}, {{-1, 0}, {1, 0}},
                             {{0, 1}, {0, -1}}};
    const long vmat[7][2][2] = {{{1, 0}, {0, 1}}, {{1, 0}, {0, 0}}, {{0, 1}, {0, -1}},
                                {{-1, 0}, {1, 0}}, {{0, 0}, {0, 1}}, {{1, 1}, {0, 0}},
                                {{0, 0}, {1, 1}}};
    const long w[7][2][2] = {{{1, 0}, {0, 1}}, {{0, 0}, {1, -1}}, {{0, 1}, {0, 1}},
                             {{1, 0}, {1, 0}}, {{-1, 1}, {0, 0}}, {{0, 0}, {0, 1}},
                             {{1, 0}, {0, 0}}};
    Matrix ma(4, 7), mb(4, 7), mc(4, 7);
    for (size_t t = 0; t < 7; ++t)
        for (uint32_t x = 0; x < 2; ++x)
            for (uint32_t y = 0; y < 2; ++y) {
                ma.at(x * 2 + y, t) = u[t][x][y];            // (i,k)
                mb.at(x * 2 + y, t) = vmat[t][y][x];         // (j,k) = vmat[k][j]
                mc.at(x * 2 + y, t) = w[t][x][y];            // (i,j)
            }
    c.maps = {ma, mb, mc};
    return c;
}

// ---------------------------------------------------------------------------
// GHZ_5 triple-plaquette to EPR arrangement.

// Source: three 3-edges {A,B,D}, {B,C,D}, {C,A,D} each carrying GHZ_5(3).
// Target: EPR_2 pairs A-B, B-C, C-A, B-D, C-D and one EPR_3 pair A-D.
inline CatalogConstruction ghz5_to_epr() {
    using detail::pair_to_level2;
    using detail::pair_to_level3;
    using detail::qubit_permutation;

    CatalogConstruction c;
    c.id = "ghz5-to-epr";
    c.description = "three GHZ_5(3) plaquettes around an interior vertex degenerate onto an "
                    "all-EPR arrangement (five level-2 pairs and one level-3 pair)";
    c.kind = CatalogConstruction::Kind::Degeneration;
    c.provenance = "composition of three Bini degenerations with an interior projector";

    Hypergraph src_g(4, {{0, 1, 3}, {1, 2, 3}, {2, 0, 3}});
    c.source = EntanglementStructure(src_g, std::vector<Tensor>(3, ghz_state(5, 3)));

    Hypergraph dst_g(4, {{0, 1}, {1, 2}, {2, 0}, {0, 3}, {1, 3}, {2, 3}});
    std::vector<Tensor> dst_states = {epr_pair(2), epr_pair(2), epr_pair(2),
                                      epr_pair(3), epr_pair(2), epr_pair(2)};
    c.target = EntanglementStructure(dst_g, std::move(dst_states));

    const PolyMatrix ba = detail::bini_map_a();
    const PolyMatrix bb = detail::bini_map_b();
    const PolyMatrix bc = detail::bini_map_c();

    // Outer vertices: first-stage Bini maps per incident edge, then reroute
    // the two interior-facing qubits (ordered k-then-i to mirror the interior
    // grouping) into the pair-merging map.
    auto outer_map = [&](const PolyMatrix& first, const PolyMatrix& second,
                         const std::vector<size_t>& qubit_perm, const Matrix& pair_map) {
        Matrix stage2 = kron(kron(Matrix::identity(2), Matrix::identity(2)), pair_map) *
                        detail::qubit_permutation(4, qubit_perm);
        return PolyMatrix(stage2) * kron(first, second);
    };
    // A: stage-1 qubits (i0, j0, j2, k2) -> (j0, j2, k2, i0), pair (k2,i0) -> level 3
    PolyMatrix map_a = outer_map(ba, bb, {1, 2, 3, 0}, pair_to_level3());
    // B: (j0, k0, i1, j1) -> (j0, j1, k0, i1), pair -> level 2
    PolyMatrix map_b = outer_map(bb, ba, {0, 3, 1, 2}, pair_to_level2());
    // C: (j1, k1, i2, j2) -> (j1, j2, k1, i2), pair -> level 2
    PolyMatrix map_c = outer_map(bb, ba, {0, 3, 1, 2}, pair_to_level2());

    // Interior vertex D: three Bini third-party maps, regroup qubits
    // (k0,i0,k1,i1,k2,i2) -> (k2,i0, k0,i1, k1,i2), project onto the
    // 12-dimensional allowed support, then merge each pair.
    Matrix proj(64, 64);
    {
        auto idx6 = [](std::array<uint32_t, 6> q) {
            uint32_t v = 0;
            for (uint32_t b : q) v = v * 2 + b;
            return v;
        };
        for (uint32_t a2 = 0; a2 < 2; ++a2)
            for (uint32_t b2 = 0; b2 < 2; ++b2)
                for (uint32_t c2 = 0; c2 < 2; ++c2) {
                    uint32_t s = idx6({0, a2, 0, b2, 0, c2});
                    proj.at(s, s) = 1;
                }
        for (uint32_t b1 = 0; b1 < 2; ++b1)
            for (uint32_t c1 = 0; c1 < 2; ++c1) {
                uint32_t s = idx6({1, 0, b1, 0, c1, 0});
                proj.at(s, s) = 1;
            }
    }
    Matrix stage2_d = kron(kron(pair_to_level3(), pair_to_level2()), pair_to_level2()) * proj *
                      detail::qubit_permutation(6, {4, 1, 0, 3, 2, 5});
    PolyMatrix map_d = PolyMatrix(stage2_d) * kron(kron(bc, bc), bc);

    c.poly_maps = {map_a, map_b, map_c, map_d};
    return c;
}

// ---------------------------------------------------------------------------
// Global GHZ extraction on the periodic plaquette lattice.

// Sides of the plaquette at cell (r,c): side 0 = left (between corners A,B),
// 1 = top (B,C), 2 = right (C,D), 3 = bottom (D,A); corner A is bottom-left
// and corners run counterclockwise A,B,C,D matching global_ghz_plaquette_state.
inline CatalogConstruction global_ghz_extraction(uint32_t n_level, uint32_t rows, uint32_t cols) {
    if (rows < 2 || cols < 2)
        throw std::invalid_argument("global_ghz_extraction: periodic lattice needs rows, cols >= 2");
    CatalogConstruction c;
    c.id = "global-ghz-" + std::to_string(n_level) + "-" + std::to_string(rows) + "x" +
           std::to_string(cols);
    c.description = "hinge-pattern plaquette states on the periodic square lattice restrict "
                    "onto level-" + std::to_string(n_level) +
                    " EPR pairs plus a global GHZ_4 state";
    c.kind = CatalogConstruction::Kind::Restriction;
    c.provenance = "orthogonal hinge-pattern projection; each pattern reproduces the EPR lattice";

    const uint32_t m = n_level + 1;

    // Source: plaquette lattice, edge order [TL, TR, BR, BL] per generator;
    // the catalog state lists corners (A=BL, B=TL, C=TR, D=BR).
    Hypergraph plaq = plaquette_square_lattice(rows, cols, true);
    Tensor plaq_state = permute_parties(global_ghz_plaquette_state(n_level), {1, 2, 3, 0});
    c.source = uniform_structure(plaq, plaq_state);

    // Target: EPR_n on the square lattice sides plus one global GHZ_4 edge.
    Hypergraph side_g = square_lattice(rows, cols, true);
    Hypergraph dst_g = side_g;
    {
        std::vector<uint32_t> all(rows * cols);
        for (uint32_t v = 0; v < rows * cols; ++v) all[v] = v;
        dst_g.edges.push_back(all);
    }
    std::vector<Tensor> dst_states(side_g.edges.size(), epr_pair(n_level));
    dst_states.push_back(ghz_state(4, rows * cols));
    c.target = EntanglementStructure(dst_g, std::move(dst_states));

    // Side identities. Horizontal side H(r,c) joins v(r,c)-v(r,c+1) and is
    // generator edge r*cols+c; vertical side V(r,c) joins v(r,c)-v(r+1,c) and
    // is generator edge rows*cols + r*cols + c.
    auto h_side = [&](uint32_t r, uint32_t cc) { return (r % rows) * cols + (cc % cols); };
    auto v_side = [&](uint32_t r, uint32_t cc) {
        return rows * cols + (r % rows) * cols + (cc % cols);
    };
    // For cell (r,c): side 0 (left) = V(r,c), 1 (top) = H(r,c),
    // 2 (right) = V(r,c+1), 3 (bottom) = H(r+1,c).
    auto cell_side = [&](uint32_t r, uint32_t cc, uint32_t s) -> uint32_t {
        switch (s) {
            case 0: return v_side(r, cc);
            case 1: return h_side(r, cc);
            case 2: return v_side(r, cc + 1);
            default: return h_side(r + 1, cc);
        }
    };
    // Hinge h activates sides h-1 and h (corner-adjacent sides); corner X of
    // the plaquette holds subslots (side_{X-1}, side_X). With corner order
    // A,B,C,D counterclockwise from bottom-left, side_0 = A-B = left,
    // side_1 = B-C = top, side_2 = C-D = right, side_3 = D-A = bottom.
    // Under hinge h, side s is owned by exactly one adjacent cell:
    //   left side of cell (r,c) is V(r,c), also the right side of (r,c-1).
    auto owner_cell = [&](uint32_t side_id, uint32_t hinge, uint32_t& role_out) -> uint32_t {
        // Returns cell index r*cols+c owning this side under the hinge, and
        // the side role (0..3) it plays in that cell.
        const bool vertical = side_id < rows * cols ? false : true;
        const uint32_t base = vertical ? side_id - rows * cols : side_id;
        const uint32_t r = base / cols, cc = base % cols;
        const uint32_t active0 = (hinge + 3) % 4, active1 = hinge;
        auto try_role = [&](uint32_t role, uint32_t cell_r, uint32_t cell_c) -> bool {
            if (role != active0 && role != active1) return false;
            role_out = role;
            return true;
        };
        if (vertical) {
            // V(r,cc): left (0) of cell (r,cc), right (2) of cell (r,cc-1)
            if (try_role(0, r, cc)) return r * cols + cc;
            if (try_role(2, r, (cc + cols - 1) % cols))
                return r * cols + (cc + cols - 1) % cols;
        } else {
            // H(r,cc): top (1) of cell (r,cc), bottom (3) of cell (r-1,cc)
            if (try_role(1, r, cc)) return r * cols + cc;
            if (try_role(3, (r + rows - 1) % rows, cc))
                return ((r + rows - 1) % rows) * cols + cc;
        }
        throw std::logic_error("side has no owner under hinge");
    };

    // Vertex maps. Source slots: plaquettes in edge order, each a pair of
    // (n+1)-level subslots (side_{X-1}, side_X) for the corner role X the
    // vertex plays there. Target slots: incident lattice sides in edge order,
    // then the GHZ slot.
    SlotTable src_table(c.source);
    SlotTable dst_table(c.target);
    LocalMapFamily maps;
    auto corner_role = [](size_t pos) -> uint32_t {
        // generator corner order [TL, TR, BR, BL] = roles [B, C, D, A]
        static constexpr uint32_t role[4] = {1, 2, 3, 0};
        return role[pos];
    };
    for (uint32_t v = 0; v < plaq.vertex_count; ++v) {
        const auto& sslots = src_table.slots[v];
        const auto& dslots = dst_table.slots[v];
        // subslot side ids per source slot: (side_{X-1}, side_X) of the cell
        std::vector<std::array<uint32_t, 2>> subslot_sides(sslots.size());
        for (size_t i = 0; i < sslots.size(); ++i) {
            uint32_t cell = static_cast<uint32_t>(sslots[i].edge);
            uint32_t r = cell / cols, cc = cell % cols;
            uint32_t role = corner_role(sslots[i].pos);
            subslot_sides[i] = {cell_side(r, cc, (role + 3) % 4), cell_side(r, cc, role)};
        }
        // target side slot lookup
        std::vector<uint32_t> tgt_side_of_slot(dslots.size(), UINT32_MAX);
        size_t ghz_slot = SIZE_MAX;
        for (size_t i = 0; i < dslots.size(); ++i) {
            if (dslots[i].edge + 1 == dst_g.edges.size()) ghz_slot = i;
            else tgt_side_of_slot[i] = static_cast<uint32_t>(dslots[i].edge);
        }
        Matrix mv(dst_table.vertex_dims[v], src_table.vertex_dims[v]);
        // For each hinge and each assignment of side values, one source
        // pattern maps to one target index.
        std::vector<uint32_t> sdims(sslots.size(), m * m);
        std::vector<uint32_t> ddims(dslots.size());
        for (size_t i = 0; i < dslots.size(); ++i) ddims[i] = dslots[i].dim;
        const size_t n_sides = dslots.size() - 1;
        std::vector<uint32_t> side_vals(n_sides, 0);
        for (uint32_t hinge = 0; hinge < 4; ++hinge) {
            // which (slot, subslot) is active for each incident side
            std::vector<std::pair<size_t, size_t>> active_sub(n_sides, {SIZE_MAX, SIZE_MAX});
            for (size_t i = 0; i < sslots.size(); ++i) {
                uint32_t cell = static_cast<uint32_t>(sslots[i].edge);
                for (size_t sub = 0; sub < 2; ++sub) {
                    uint32_t side = subslot_sides[i][sub];
                    uint32_t role = 0;
                    if (owner_cell(side, hinge, role) != cell) continue;
                    // this subslot carries the side under this hinge
                    for (size_t ds = 0; ds < dslots.size(); ++ds)
                        if (ds != ghz_slot && tgt_side_of_slot[ds] == side) {
                            // role check: subslot 0 is side_{X-1}, 1 is side_X;
                            // owner role must match the subslot's own side role
                            active_sub[ds > ghz_slot ? ds - 1 : ds] = {i, sub};
                        }
                }
            }
            // Enumerate side values; build source and target indices.
            std::fill(side_vals.begin(), side_vals.end(), 0);
            while (true) {
                std::vector<uint32_t> sdig(sslots.size(), 0);
                bool valid = true;
                for (size_t ds = 0; ds < n_sides; ++ds) {
                    auto [slot, sub] = active_sub[ds];
                    if (slot == SIZE_MAX) { valid = false; break; }
                    uint32_t val = side_vals[ds] + 1;
                    uint32_t cur = sdig[slot];
                    uint32_t hi = cur / m, lo = cur % m;
                    if (sub == 0) hi = val; else lo = val;
                    sdig[slot] = hi * m + lo;
                }
                if (!valid) break;
                uint64_t src_idx = mixed_radix_encode(sdig, sdims);
                std::vector<uint32_t> ddig(dslots.size(), 0);
                for (size_t ds = 0, k = 0; ds < dslots.size(); ++ds) {
                    if (ds == ghz_slot) ddig[ds] = hinge;
                    else ddig[ds] = side_vals[k++];
                }
                mv.at(mixed_radix_encode(ddig, ddims), src_idx) = 1;
                size_t k = n_sides;
                bool done = n_sides == 0;
                while (k-- > 0) {
                    if (++side_vals[k] < n_level) break;
                    side_vals[k] = 0;
                    if (k == 0) done = true;
                }
                if (done) break;
            }
        }
        maps.push_back(std::move(mv));
    }
    c.maps = std::move(maps);
    return c;
}

// ---------------------------------------------------------------------------
// EPR moves between plaquettes.

struct EprMoveResult {
    EntanglementStructure source, target;
    LocalMapFamily maps;
    bool invertible = false;
    LocalMapFamily inverse_maps;  // only when invertible
    std::string description;
};

namespace detail {

struct PairFactor {
    uint32_t level = 0;
    Tensor rest;  // remaining parties of the edge state, in original order
};

// Requires the edge state to factor exactly as EPR_L on parties (pos_u,
// pos_w) times a state on the remaining parties.
inline PairFactor extract_epr_factor(const Tensor& state, size_t pos_u, size_t pos_w) {
    if (pos_u == pos_w || pos_u >= state.party_count() || pos_w >= state.party_count())
        throw std::invalid_argument("extract_epr_factor: bad positions");
    if (state.dims[pos_u] != state.dims[pos_w])
        throw std::invalid_argument("extract_epr_factor: pair dims differ");
    const uint32_t L = state.dims[pos_u];
    if (state.party_count() == 2) {
        // the edge is exactly the pair; rest is the scalar factor
        Rational anchor = state.coeff({0, 0});
        if (anchor == 0) throw std::invalid_argument("pair factor is not a diagonal EPR");
        if (state != epr_pair(L).scaled(anchor))
            throw std::invalid_argument("pair factor is not a diagonal EPR");
        PairFactor out;
        out.level = L;
        out.rest = Tensor(std::vector<uint32_t>{});
        out.rest.terms.emplace(MultiIndex{}, anchor);
        return out;
    }
    Matrix fl = flatten(state, {std::min(pos_u, pos_w), std::max(pos_u, pos_w)});
    if (matrix_rank(fl) != 1)
        throw std::invalid_argument("edge state does not factor on the chosen pair");
    // pair part: extract from a pivot column; must equal sum_i |ii>
    size_t pivot_col = 0;
    bool found = false;
    for (size_t j = 0; j < fl.cols && !found; ++j)
        for (size_t i = 0; i < fl.rows && !found; ++i)
            if (fl.at(i, j) != 0) { pivot_col = j; found = true; }
    if (!found) throw std::invalid_argument("zero edge state");
    // normalize the pair so that (0,0) has coefficient 1
    std::vector<Rational> pair(fl.rows);
    for (size_t i = 0; i < fl.rows; ++i) pair[i] = fl.at(i, pivot_col);
    Rational anchor = pair[0];
    if (anchor == 0) throw std::invalid_argument("pair factor is not a diagonal EPR");
    for (size_t i = 0; i < fl.rows; ++i) {
        uint32_t a = static_cast<uint32_t>(i / L), b = static_cast<uint32_t>(i % L);
        Rational want = (a == b) ? anchor : Rational(0);
        if (pair[i] != want)
            throw std::invalid_argument("pair factor is not a diagonal EPR");
    }
    // rest = (<0|_u (x) <0|_w) state
    PairFactor out;
    out.level = L;
    std::vector<Rational> e0u(state.dims[pos_u], Rational(0));
    e0u[0] = 1;
    Tensor s1 = slice(state, std::max(pos_u, pos_w), e0u);
    Tensor s2 = slice(s1, std::min(pos_u, pos_w), e0u);
    out.rest = s2;
    return out;
}

// Insert trivial (dim 1) parties at the given sorted positions.
inline Tensor pad_trivial(const Tensor& t, std::vector<size_t> positions) {
    std::sort(positions.begin(), positions.end());
    std::vector<uint32_t> dims;
    size_t src = 0, pi = 0;
    const size_t total = t.party_count() + positions.size();
    for (size_t p = 0; p < total; ++p) {
        if (pi < positions.size() && positions[pi] == p) {
            dims.push_back(1);
            ++pi;
        } else {
            dims.push_back(t.dims[src++]);
        }
    }
    Tensor r(dims);
    for (const auto& [idx, c] : t.terms) {
        MultiIndex ni;
        size_t s = 0, q = 0;
        for (size_t p = 0; p < total; ++p) {
            if (q < positions.size() && positions[q] == p) {
                ni.push_back(0);
                ++q;
            } else {
                ni.push_back(idx[s++]);
            }
        }
        r.terms.emplace(ni, c);
    }
    return r;
}

}  // namespace detail

// Move an exact EPR factor sitting on (pos_u, pos_w) of `from_edge`. When
// both endpoints also belong to `to_edge` the move is an invertible
// re-grouping; when exactly one endpoint is shared the pair is teleported
// through it, consuming an EPR factor of `to_edge` (auto-detected) and
// leaving the moved pair on a fresh 2-edge. Anything else has no local route.
inline EprMoveResult epr_move(const EntanglementStructure& s, size_t from_edge, size_t pos_u,
                              size_t pos_w, size_t to_edge) {
    if (from_edge >= s.graph.edges.size() || to_edge >= s.graph.edges.size() ||
        from_edge == to_edge)
        throw std::invalid_argument("epr_move: bad edge indices");
    const auto& fe = s.graph.edges[from_edge];
    const auto& te = s.graph.edges[to_edge];
    const uint32_t u = fe.at(pos_u), w = fe.at(pos_w);
    auto pos_in = [](const std::vector<uint32_t>& e, uint32_t v) -> std::optional<size_t> {
        auto it = std::find(e.begin(), e.end(), v);
        if (it == e.end()) return std::nullopt;
        return static_cast<size_t>(it - e.begin());
    };
    detail::PairFactor pf = detail::extract_epr_factor(s.edge_states[from_edge], pos_u, pos_w);
    const uint32_t L = pf.level;

    EprMoveResult out;
    out.source = s;

    auto qu = pos_in(te, u);
    auto qw = pos_in(te, w);
    SlotTable src_table(s);

    if (qu && qw) {
        // Invertible re-grouping: attach the pair to to_edge at (qu, qw).
        EntanglementStructure dst = s;
        dst.edge_states[from_edge] =
            detail::pad_trivial(pf.rest, {std::min(pos_u, pos_w),
                                          std::max(pos_u, pos_w)});
        {
            Tensor with_pair = tensor_product(s.edge_states[to_edge], epr_pair(L));
            std::vector<std::vector<size_t>> groups;
            const size_t arity = te.size();
            for (size_t q = 0; q < arity; ++q) {
                if (q == *qu) groups.push_back({q, arity});
                else if (q == *qw) groups.push_back({q, arity + 1});
                else groups.push_back({q});
            }
            dst.edge_states[to_edge] = group_parties(with_pair, groups);
        }
        dst.validate();
        SlotTable dst_table(dst);
        LocalMapFamily maps, inv;
        for (uint32_t v = 0; v < s.graph.vertex_count; ++v) {
            if (v != u && v != w) {
                maps.push_back(Matrix::identity(src_table.vertex_dims[v]));
                inv.push_back(Matrix::identity(src_table.vertex_dims[v]));
                continue;
            }
            // dst index; decode against dst slots, route the to-slot's
            // attached sub-value back into the from-slot.
            const auto& ss = src_table.slots[v];
            const auto& ds = dst_table.slots[v];
            std::vector<uint32_t> sdims, ddims;
            for (const auto& sl : ss) sdims.push_back(sl.dim);
            for (const auto& sl : ds) ddims.push_back(sl.dim);
            size_t from_slot = SIZE_MAX, to_slot = SIZE_MAX;
            size_t fpos = (v == u) ? pos_u : pos_w;
            for (size_t i = 0; i < ss.size(); ++i) {
                if (ss[i].edge == from_edge && ss[i].pos == fpos) from_slot = i;
                if (ss[i].edge == to_edge && ss[i].pos == (v == u ? *qu : *qw)) to_slot = i;
            }
            Matrix mv(dst_table.vertex_dims[v], src_table.vertex_dims[v]);
            for (uint64_t sidx = 0; sidx < src_table.vertex_dims[v]; ++sidx) {
                auto dig = mixed_radix_decode(sidx, sdims);
                std::vector<uint32_t> ddig = dig;
                uint32_t pair_val = dig[from_slot];
                ddig[from_slot] = 0;
                ddig[to_slot] = dig[to_slot] * L + pair_val;
                mv.at(mixed_radix_encode(ddig, ddims), sidx) = 1;
            }
            maps.push_back(mv);
            inv.push_back(mv.transpose());
        }
        out.target = dst;
        out.maps = maps;
        out.inverse_maps = inv;
        out.invertible = true;
        out.description = "re-grouping move (invertible)";
        return out;
    }

    if (static_cast<bool>(qu) == static_cast<bool>(qw))
        throw std::invalid_argument("no local route");
    const uint32_t shared = qu ? u : w;
    const uint32_t far = qu ? w : u;
    const size_t shared_pos_from = qu ? pos_u : pos_w;
    const size_t q_shared = qu ? *qu : *qw;

    // Find an EPR factor of the to-edge from the shared vertex.
    std::optional<size_t> q_far;
    detail::PairFactor tf;
    for (size_t q = 0; q < te.size(); ++q) {
        if (q == q_shared) continue;
        try {
            tf = detail::extract_epr_factor(s.edge_states[to_edge], q_shared, q);
            if (tf.level == L) { q_far = q; break; }
        } catch (const std::invalid_argument&) {
        }
    }
    if (!q_far) throw std::invalid_argument("no local route");
    const uint32_t z = te[*q_far];

    EntanglementStructure dst;
    dst.graph = s.graph;
    dst.edge_states = s.edge_states;
    dst.edge_states[from_edge] = detail::pad_trivial(
        pf.rest, {std::min(pos_u, pos_w), std::max(pos_u, pos_w)});
    dst.edge_states[to_edge] = detail::pad_trivial(
        tf.rest, {std::min(q_shared, *q_far), std::max(q_shared, *q_far)});
    dst.graph.edges.push_back({far, z});
    dst.edge_states.push_back(epr_pair(L));
    dst.validate();
    SlotTable dst_table(dst);

    LocalMapFamily maps;
    for (uint32_t v = 0; v < s.graph.vertex_count; ++v) {
        const auto& ss = src_table.slots[v];
        const auto& ds = dst_table.slots[v];
        std::vector<uint32_t> sdims, ddims;
        for (const auto& sl : ss) sdims.push_back(sl.dim);
        for (const auto& sl : ds) ddims.push_back(sl.dim);
        if (v == shared) {
            // contract the two pair legs with <Phi+|
            size_t from_slot = SIZE_MAX, to_slot = SIZE_MAX;
            for (size_t i = 0; i < ss.size(); ++i) {
                if (ss[i].edge == from_edge && ss[i].pos == shared_pos_from) from_slot = i;
                if (ss[i].edge == to_edge && ss[i].pos == q_shared) to_slot = i;
            }
            Matrix mv(dst_table.vertex_dims[v], src_table.vertex_dims[v]);
            for (uint64_t sidx = 0; sidx < src_table.vertex_dims[v]; ++sidx) {
                auto dig = mixed_radix_decode(sidx, sdims);
                if (dig[from_slot] != dig[to_slot]) continue;
                std::vector<uint32_t> ddig = dig;
                ddig[from_slot] = 0;
                ddig[to_slot] = 0;
                mv.at(mixed_radix_encode(ddig, ddims), sidx) = 1;
            }
            maps.push_back(mv);
        } else if (v == far || v == z) {
            // reroute the surviving leg onto the new edge's slot (last slot)
            size_t leg_slot = SIZE_MAX;
            if (v == far) {
                size_t fpos = (far == u) ? pos_u : pos_w;
                for (size_t i = 0; i < ss.size(); ++i)
                    if (ss[i].edge == from_edge && ss[i].pos == fpos) leg_slot = i;
            } else {
                for (size_t i = 0; i < ss.size(); ++i)
                    if (ss[i].edge == to_edge && ss[i].pos == *q_far) leg_slot = i;
            }
            Matrix mv(dst_table.vertex_dims[v], src_table.vertex_dims[v]);
            for (uint64_t sidx = 0; sidx < src_table.vertex_dims[v]; ++sidx) {
                auto dig = mixed_radix_decode(sidx, sdims);
                std::vector<uint32_t> ddig = dig;
                ddig[leg_slot] = 0;
                ddig.push_back(dig[leg_slot]);  // new edge slot appended last
                mv.at(mixed_radix_encode(ddig, ddims), sidx) = 1;
            }
            maps.push_back(mv);
        } else {
            maps.push_back(Matrix::identity(src_table.vertex_dims[v]));
        }
    }
    out.target = dst;
    out.maps = maps;
    out.invertible = false;
    out.description = "teleportation move through vertex " + std::to_string(shared) +
                      " (consumes one EPR pair)";
    return out;
}

// The 4-cycle teleportation example as a shipped catalog item.
inline CatalogConstruction teleport_4cycle() {
    Hypergraph g(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
    EntanglementStructure s = uniform_structure(g, epr_pair(2));
    EprMoveResult mv = epr_move(s, 0, 0, 1, 3);  // pair (0,1) through vertex 0 via edge (3,0)
    CatalogConstruction c;
    c.id = "teleport-4cycle";
    c.description = "moving an EPR pair through a shared vertex of the 4-cycle, consuming a "
                    "neighboring pair";
    c.kind = CatalogConstruction::Kind::Restriction;
    c.provenance = "entanglement swapping written as one covector per vertex";
    c.source = mv.source;
    c.target = mv.target;
    c.maps = mv.maps;
    return c;
}

// The two-EPR plaquette re-grouping on the 2x2 periodic plaquette lattice.
inline CatalogConstruction epr_move_2x2() {
    Hypergraph g = plaquette_square_lattice(2, 2, true);
    // left-side pair: corners TL (pos 0) and BL (pos 3)
    Tensor left_pair(std::vector<uint32_t>{2, 1, 1, 2});
    for (uint32_t i = 0; i < 2; ++i) left_pair.add_term({i, 0, 0, i}, Rational(1));
    EntanglementStructure s = uniform_structure(g, left_pair);
    EprMoveResult mv = epr_move(s, 0, 0, 3, 1);
    CatalogConstruction c;
    c.id = "epr-move-2x2";
    c.description = "moving one EPR pair to the neighboring plaquette of the periodic 2x2 "
                    "lattice (invertible re-grouping)";
    c.kind = CatalogConstruction::Kind::Restriction;
    c.provenance = "slot re-grouping; both plaquettes contain the pair's endpoints";
    c.source = mv.source;
    c.target = mv.target;
    c.maps = mv.maps;
    return c;
}

// ---------------------------------------------------------------------------
// Conversion-bound calculators and known values.

// Border subrank of the EPR_D triangle: ceil(3 D^2 / 4).
inline uint64_t border_subrank_epr(uint64_t d) {
    if (d == 0) throw std::invalid_argument("border_subrank_epr: D >= 1");
    return (3 * d * d + 3) / 4;
}

struct SublatticeConversion {
    uint64_t r = 0;
    bool feasible = false;
    uint64_t threshold = 0;  // ceil(3 D^2 / 4)
};

// r = n * borderR(EPR_D triangle), feasible iff n >= ceil(3D^2/4). The border
// rank value is a caller-supplied parameter.
inline SublatticeConversion sublattice_conversion_bound(uint64_t n, uint64_t d,
                                                        uint64_t border_rank_of_epr_d) {
    SublatticeConversion s;
    s.threshold = border_subrank_epr(d);
    s.r = n * border_rank_of_epr_d;
    s.feasible = n >= s.threshold;
    return s;
}

struct TetrahedronConversion {
    uint64_t single_plaquette_r = 0;  // ceil(3 D^2 / 4)
    uint64_t lattice_r = 0;           // floor(sqrt(ceil(3 D^4 / 4)))
};

inline TetrahedronConversion tetrahedron_conversion_bound(uint64_t d) {
    TetrahedronConversion t;
    t.single_plaquette_r = border_subrank_epr(d);
    uint64_t inner = (3 * d * d * d * d + 3) / 4;
    t.lattice_r = isqrt_floor(inner);
    return t;
}

// ---------------------------------------------------------------------------
// Two W states on the four possible hypergraphs.

// shared = number of common vertices of the two 3-edges (0..3); the standard
// names are G6, G5, G4, G3.
inline EntanglementStructure w_pair_structure(uint32_t shared) {
    if (shared > 3) throw std::invalid_argument("w_pair_structure: shared in 0..3");
    uint32_t n = 6 - shared;
    // edge 1 = {0,1,2}; edge 2 reuses the last `shared` vertices of edge 1
    // (in order) and fresh ones after
    std::vector<uint32_t> second;
    for (uint32_t i = 0; i < shared; ++i) second.push_back(3 - shared + i);
    for (uint32_t i = 0; i < 3 - shared; ++i) second.push_back(3 + i);
    Hypergraph g(n, {{0, 1, 2}, second});
    return uniform_structure(g, w_state());
}

struct KnownRankEntry {
    std::string key;
    uint64_t value;
    std::string provenance;  // always labeled [known value]
};

// Literature values, never re-derived here.
inline std::vector<KnownRankEntry> known_rank_table() {
    return {
        {"w", 3, "[known value] rank of W(3); reproducible via the substitution method"},
        {"w_border", 2, "[known value] border rank of W(3); see the shipped degeneration"},
        {"epr2_triangle", 7,
         "[known value] rank of the 2x2 matrix multiplication tensor (Strassen 1969, "
         "Winograd 1971 lower bound)"},
        {"w_g3", 7, "[known value] rank of the Kronecker square of W (Yu et al. 2010)"},
        {"w_g4", 8, "[known value] rank of two W plaquettes sharing two vertices"},
        {"w_g5", 8, "[known value] rank of two W plaquettes sharing one vertex"},
        {"w_g6", 8, "[known value] rank of the tensor product of two W states"},
    };
}

inline std::optional<KnownRankEntry> known_rank_lookup(const std::string& key) {
    for (const auto& e : known_rank_table())
        if (e.key == key) return e;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Catalog registry.

inline std::vector<CatalogConstruction> catalog_constructions() {
    std::vector<CatalogConstruction> all;
    all.push_back(bini_degeneration());
    all.push_back(w_degeneration());
    all.push_back(strassen_decomposition());
    all.push_back(ghz5_to_epr());
    all.push_back(teleport_4cycle());
    all.push_back(epr_move_2x2());
    all.push_back(global_ghz_extraction(2, 2, 2));
    return all;
}

inline CatalogConstruction catalog_construction(const std::string& id) {
    for (auto& c : catalog_constructions())
        if (c.id == id) return c;
    throw std::invalid_argument("unknown catalog construction: " + id);
}

}  // namespace entres
