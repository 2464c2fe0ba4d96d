#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace entres {

// Vertices are 0..vertex_count-1. Edges are ordered vertex lists; the order is
// meaningful (it fixes which tensor party sits where). Duplicate edges are
// allowed, duplicate vertices inside one edge are not.
struct Hypergraph {
    uint32_t vertex_count = 0;
    std::vector<std::vector<uint32_t>> edges;

    Hypergraph() = default;
    Hypergraph(uint32_t n, std::vector<std::vector<uint32_t>> e)
        : vertex_count(n), edges(std::move(e)) {
        validate();
    }

    void validate() const {
        for (const auto& e : edges) {
            if (e.empty()) throw std::invalid_argument("empty edge");
            std::vector<uint32_t> s = e;
            std::sort(s.begin(), s.end());
            if (std::adjacent_find(s.begin(), s.end()) != s.end())
                throw std::invalid_argument("repeated vertex inside an edge");
            if (s.back() >= vertex_count) throw std::invalid_argument("vertex id out of range");
        }
    }

    bool operator==(const Hypergraph& o) const {
        return vertex_count == o.vertex_count && edges == o.edges;
    }

    std::vector<std::vector<size_t>> incident_edges() const {
        std::vector<std::vector<size_t>> inc(vertex_count);
        for (size_t ei = 0; ei < edges.size(); ++ei)
            for (uint32_t v : edges[ei]) inc[v].push_back(ei);
        return inc;
    }
};

// Surjective grouping of vertices; target vertex v' collects {v : map[v]=v'}.
struct Folding {
    uint32_t target_vertex_count = 0;
    std::vector<uint32_t> vertex_map;  // indexed by source vertex

    void validate(uint32_t source_vertices) const {
        if (vertex_map.size() != source_vertices)
            throw std::invalid_argument("folding map must be total");
        std::vector<bool> hit(target_vertex_count, false);
        for (uint32_t t : vertex_map) {
            if (t >= target_vertex_count) throw std::invalid_argument("folding target out of range");
            hit[t] = true;
        }
        for (bool b : hit)
            if (!b) throw std::invalid_argument("folding map must be surjective");
    }
};

// Folded hypergraph: each edge becomes its image with duplicates inside the
// edge collapsed (first-occurrence order kept).
inline Hypergraph fold(const Hypergraph& g, const Folding& f) {
    f.validate(g.vertex_count);
    Hypergraph h;
    h.vertex_count = f.target_vertex_count;
    for (const auto& e : g.edges) {
        std::vector<uint32_t> img;
        for (uint32_t v : e) {
            uint32_t w = f.vertex_map[v];
            if (std::find(img.begin(), img.end(), w) == img.end()) img.push_back(w);
        }
        h.edges.push_back(std::move(img));
    }
    return h;
}

inline Folding make_folding(uint32_t targets, std::vector<uint32_t> map) {
    Folding f{targets, std::move(map)};
    return f;
}

inline Folding compose(const Folding& first, const Folding& second) {
    Folding f;
    f.target_vertex_count = second.target_vertex_count;
    f.vertex_map.resize(first.vertex_map.size());
    for (size_t v = 0; v < first.vertex_map.size(); ++v)
        f.vertex_map[v] = second.vertex_map[first.vertex_map[v]];
    return f;
}

// Berge-acyclicity via the incidence bipartite graph: the hypergraph is
// acyclic iff that graph is a forest (union-find cycle check). A forest
// incidence graph also rules out two edges sharing >= 2 vertices.
inline bool is_acyclic(const Hypergraph& g) {
    std::vector<uint32_t> parent(g.vertex_count + g.edges.size());
    std::iota(parent.begin(), parent.end(), 0u);
    std::function<uint32_t(uint32_t)> find = [&](uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (size_t ei = 0; ei < g.edges.size(); ++ei) {
        uint32_t enode = g.vertex_count + static_cast<uint32_t>(ei);
        for (uint32_t v : g.edges[ei]) {
            uint32_t a = find(v), b = find(enode);
            if (a == b) return false;
            parent[a] = b;
        }
    }
    return true;
}

// All bipartitions of the vertex set as foldings onto 2 vertices, in binary
// counting order on vertex ids (vertex 0 always lands in class 0). At most
// max_count entries.
inline std::vector<Folding> all_bipartition_foldings(const Hypergraph& g, uint64_t max_count) {
    std::vector<Folding> out;
    if (g.vertex_count < 2) return out;
    const uint32_t n = g.vertex_count;
    uint64_t total = (n - 1 >= 63) ? UINT64_MAX : ((1ULL << (n - 1)) - 1);
    for (uint64_t mask = 1; mask <= total && out.size() < max_count; ++mask) {
        Folding f;
        f.target_vertex_count = 2;
        f.vertex_map.resize(n, 0);
        for (uint32_t v = 1; v < n; ++v)
            if (mask & (1ULL << (v - 1))) f.vertex_map[v] = 1;
        out.push_back(std::move(f));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Lattice generators. All are deterministic: the same parameters always
// produce the same edge list.

// Square lattice graph on a rows x cols vertex grid; vertex id = r*cols + c.
// Edge list: all horizontal edges row-major, then all vertical edges
// row-major. Horizontal edge = [v(r,c), v(r,c+1)], vertical = [v(r,c),
// v(r+1,c)]; with periodic boundary the second endpoint wraps. Wrap edges that
// would be self-loops (a periodic direction of extent 1) are omitted.
inline Hypergraph square_lattice(uint32_t rows, uint32_t cols, bool periodic) {
    if (rows < 1 || cols < 1 || rows * cols < 2)
        throw std::invalid_argument("square_lattice: size too small");
    if (!periodic && (rows < 2 || cols < 2))
        throw std::invalid_argument("square_lattice: open boundary needs rows, cols >= 2");
    Hypergraph g;
    g.vertex_count = rows * cols;
    auto id = [&](uint32_t r, uint32_t c) { return (r % rows) * cols + (c % cols); };
    for (uint32_t r = 0; r < rows; ++r)
        for (uint32_t c = 0; c + (periodic ? 0 : 1) < cols; ++c)
            if (!(periodic && cols == 1)) g.edges.push_back({id(r, c), id(r, c + 1)});
    for (uint32_t r = 0; r + (periodic ? 0 : 1) < rows; ++r)
        for (uint32_t c = 0; c < cols; ++c)
            if (!(periodic && rows == 1)) g.edges.push_back({id(r, c), id(r + 1, c)});
    g.validate();
    return g;
}

// Plaquette lattice: 4-edges, one per unit cell of the rows x cols vertex
// grid. Plaquette (r,c) is listed clockwise from its top-left corner:
// [v(r,c), v(r,c+1), v(r+1,c+1), v(r+1,c)]. Cells row-major.
inline Hypergraph plaquette_square_lattice(uint32_t rows, uint32_t cols, bool periodic) {
    if (rows < 2 || cols < 2)
        throw std::invalid_argument("plaquette_square_lattice: size too small");
    Hypergraph g;
    g.vertex_count = rows * cols;
    auto id = [&](uint32_t r, uint32_t c) { return (r % rows) * cols + (c % cols); };
    const uint32_t cr = periodic ? rows : rows - 1;
    const uint32_t cc = periodic ? cols : cols - 1;
    for (uint32_t r = 0; r < cr; ++r)
        for (uint32_t c = 0; c < cc; ++c)
            g.edges.push_back({id(r, c), id(r, c + 1), id(r + 1, c + 1), id(r + 1, c)});
    g.validate();
    return g;
}

// Kagome lattice built as the medial lattice of a triangular grid: kagome
// sites are the edges of the triangular lattice, kagome triangles are its
// up- and down-triangles. Cell count rows x cols; open boundary uses a
// (rows+1) x (cols+1) triangular vertex grid so every cell has both
// triangles. Site ids: all horizontal mid-edges H(r,c) first, then vertical
// V(r,c), then diagonal D(r,c), each row-major. Triangle list: all
// up-triangles [H(r,c), V(r,c), D(r,c)] row-major, then all down-triangles
// [D(r,c), H(r+1,c), V(r,c+1)] row-major.
struct KagomeLayout {
    uint32_t rows, cols;
    bool periodic;
    uint32_t h_rows, h_cols, v_rows, v_cols;

    KagomeLayout(uint32_t r, uint32_t c, bool per) : rows(r), cols(c), periodic(per) {
        h_rows = periodic ? rows : rows + 1;
        h_cols = cols;
        v_rows = rows;
        v_cols = periodic ? cols : cols + 1;
    }
    uint32_t h_site(uint32_t r, uint32_t c) const { return (r % h_rows) * h_cols + (c % h_cols); }
    uint32_t v_site(uint32_t r, uint32_t c) const {
        return h_rows * h_cols + (r % v_rows) * v_cols + (c % v_cols);
    }
    uint32_t d_site(uint32_t r, uint32_t c) const {
        return h_rows * h_cols + v_rows * v_cols + (r % rows) * cols + (c % cols);
    }
    uint32_t site_count() const { return h_rows * h_cols + v_rows * v_cols + rows * cols; }
};

inline Hypergraph kagome_lattice(uint32_t rows, uint32_t cols, bool periodic) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("kagome_lattice: size too small");
    if (periodic && (rows < 2 || cols < 2))
        throw std::invalid_argument("kagome_lattice: periodic boundary needs rows, cols >= 2");
    KagomeLayout L(rows, cols, periodic);
    Hypergraph g;
    g.vertex_count = L.site_count();
    for (uint32_t r = 0; r < rows; ++r)
        for (uint32_t c = 0; c < cols; ++c)
            g.edges.push_back({L.h_site(r, c), L.v_site(r, c), L.d_site(r, c)});
    for (uint32_t r = 0; r < rows; ++r)
        for (uint32_t c = 0; c < cols; ++c)
            g.edges.push_back({L.d_site(r, c), L.h_site(r + 1, c), L.v_site(r, c + 1)});
    g.validate();
    return g;
}

// Folding of the kagome lattice onto fan(rows*cols): all horizontal sites to
// hub A, all vertical sites to hub B, the diagonal site of cell (r,c) to
// C_{r*cols+c}. Each fan edge then covers the cell's up- and down-triangle.
inline Folding kagome_to_fan_folding(uint32_t rows, uint32_t cols, bool periodic) {
    KagomeLayout L(rows, cols, periodic);
    Folding f;
    f.target_vertex_count = 2 + rows * cols;
    f.vertex_map.resize(L.site_count());
    for (uint32_t r = 0; r < L.h_rows; ++r)
        for (uint32_t c = 0; c < L.h_cols; ++c) f.vertex_map[L.h_site(r, c)] = 0;
    for (uint32_t r = 0; r < L.v_rows; ++r)
        for (uint32_t c = 0; c < L.v_cols; ++c) f.vertex_map[L.v_site(r, c)] = 1;
    for (uint32_t r = 0; r < rows; ++r)
        for (uint32_t c = 0; c < cols; ++c) f.vertex_map[L.d_site(r, c)] = 2 + r * cols + c;
    return f;
}

// Triangular lattice: 3-edges on a rows x cols vertex grid (periodic). Up
// triangles [v(r,c), v(r,c+1), v(r+1,c)] row-major, then down triangles
// [v(r,c+1), v(r+1,c), v(r+1,c+1)] row-major.
inline Hypergraph triangular_lattice(uint32_t rows, uint32_t cols, bool periodic) {
    if (rows < 2 || cols < 2) throw std::invalid_argument("triangular_lattice: size too small");
    Hypergraph g;
    g.vertex_count = rows * cols;
    auto id = [&](uint32_t r, uint32_t c) { return (r % rows) * cols + (c % cols); };
    const uint32_t cr = periodic ? rows : rows - 1;
    const uint32_t cc = periodic ? cols : cols - 1;
    for (uint32_t r = 0; r < cr; ++r)
        for (uint32_t c = 0; c < cc; ++c) g.edges.push_back({id(r, c), id(r, c + 1), id(r + 1, c)});
    for (uint32_t r = 0; r < cr; ++r)
        for (uint32_t c = 0; c < cc; ++c)
            g.edges.push_back({id(r, c + 1), id(r + 1, c), id(r + 1, c + 1)});
    g.validate();
    return g;
}

// Triangular lattice restricted to upward triangles (half filling).
inline Hypergraph half_filled_triangular_lattice(uint32_t rows, uint32_t cols, bool periodic) {
    if (rows < 2 || cols < 2)
        throw std::invalid_argument("half_filled_triangular_lattice: size too small");
    Hypergraph g;
    g.vertex_count = rows * cols;
    auto id = [&](uint32_t r, uint32_t c) { return (r % rows) * cols + (c % cols); };
    const uint32_t cr = periodic ? rows : rows - 1;
    const uint32_t cc = periodic ? cols : cols - 1;
    for (uint32_t r = 0; r < cr; ++r)
        for (uint32_t c = 0; c < cc; ++c) g.edges.push_back({id(r, c), id(r, c + 1), id(r + 1, c)});
    g.validate();
    return g;
}

// Folding of the periodic triangular lattice (rows, cols both multiples of 3)
// onto a fan: color(v(r,c)) = (c - r) mod 3; color 0 -> hub A, color 1 ->
// hub B, every color-2 vertex becomes its own fan tip. Each tip collects the
// six triangles around that vertex.
inline Folding triangular_to_fan_folding(uint32_t rows, uint32_t cols) {
    if (rows % 3 != 0 || cols % 3 != 0)
        throw std::invalid_argument("triangular_to_fan_folding: need rows, cols multiples of 3");
    Folding f;
    f.vertex_map.resize(rows * cols);
    uint32_t next_tip = 2;
    for (uint32_t r = 0; r < rows; ++r)
        for (uint32_t c = 0; c < cols; ++c) {
            uint32_t color = ((c + 3 * rows) - r) % 3;
            uint32_t v = r * cols + c;
            if (color == 0) f.vertex_map[v] = 0;
            else if (color == 1) f.vertex_map[v] = 1;
            else f.vertex_map[v] = next_tip++;
        }
    f.target_vertex_count = next_tip;
    return f;
}

// fan(m): hub vertices A=0, B=1 and tips C_i = 2..m+1; edges {A, B, C_i}.
inline Hypergraph fan(uint32_t m) {
    if (m == 0) throw std::invalid_argument("fan: m >= 1 required");
    Hypergraph g;
    g.vertex_count = m + 2;
    for (uint32_t i = 0; i < m; ++i) g.edges.push_back({0, 1, 2 + i});
    return g;
}

// Fold everything onto one chosen plaquette: two designated vertices of the
// edge stay separate (targets 0 and 1), every other vertex goes to target 2.
// This is the single-plaquette folding used with the substitution method.
inline Folding fold_onto_edge(const Hypergraph& g, size_t edge_idx, size_t keep_a_pos,
                              size_t keep_b_pos) {
    if (edge_idx >= g.edges.size()) throw std::invalid_argument("fold_onto_edge: bad edge");
    const auto& e = g.edges[edge_idx];
    if (keep_a_pos >= e.size() || keep_b_pos >= e.size() || keep_a_pos == keep_b_pos)
        throw std::invalid_argument("fold_onto_edge: bad positions");
    Folding f;
    f.target_vertex_count = 3;
    f.vertex_map.assign(g.vertex_count, 2);
    f.vertex_map[e[keep_a_pos]] = 0;
    f.vertex_map[e[keep_b_pos]] = 1;
    return f;
}

}  // namespace entres
