#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "constructions.hpp"
#include "contraction.hpp"
#include "hypergraph.hpp"
#include "poly.hpp"
#include "structure.hpp"
#include "tensor.hpp"

namespace entres {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Tensor text format:
// {"dims":[d1,...,dk],"terms":[{"idx":[i1,...,ik],"num":"...","den":"..."}]}
// Numbers are decimal strings; terms are written in canonical lexicographic
// index order (the term map already iterates that way).

inline Json tensor_to_json(const Tensor& t) {
    Json j;
    j["dims"] = t.dims;
    Json terms = Json::array();
    for (const auto& [idx, c] : t.terms) {
        Json e;
        e["idx"] = idx;
        e["num"] = rat_num_str(c);
        e["den"] = rat_den_str(c);
        terms.push_back(std::move(e));
    }
    j["terms"] = std::move(terms);
    return j;
}

inline Tensor tensor_from_json(const Json& j) {
    Tensor t(j.at("dims").get<std::vector<uint32_t>>());
    for (const auto& e : j.at("terms")) {
        MultiIndex idx = e.at("idx").get<MultiIndex>();
        Rational c = rat_parse(e.at("num").get<std::string>() + "/" +
                               e.at("den").get<std::string>());
        t.add_term(idx, c);
    }
    return t;
}

// ---------------------------------------------------------------------------
// Hypergraph: {"vertices":n,"edges":[[v,...],...]}; folding: {"map":[...]}.

inline Json hypergraph_to_json(const Hypergraph& g) {
    Json j;
    j["vertices"] = g.vertex_count;
    j["edges"] = g.edges;
    return j;
}

inline Hypergraph hypergraph_from_json(const Json& j) {
    return Hypergraph(j.at("vertices").get<uint32_t>(),
                      j.at("edges").get<std::vector<std::vector<uint32_t>>>());
}

inline Json folding_to_json(const Folding& f) {
    Json j;
    j["map"] = f.vertex_map;
    return j;
}

inline Folding folding_from_json(const Json& j) {
    Folding f;
    f.vertex_map = j.at("map").get<std::vector<uint32_t>>();
    uint32_t mx = 0;
    for (uint32_t t : f.vertex_map) mx = std::max(mx, t + 1);
    f.target_vertex_count = mx;
    return f;
}

// ---------------------------------------------------------------------------
// Structure file: {"graph":{...},"edge_states":[tensor or catalog ref]}.
// A catalog ref looks like {"catalog":"ghz","params":[2,3]} (the short forms
// {"catalog":"ghz","r":2,"k":3} and {"catalog":"epr","d":4} are accepted).

inline Json structure_to_json(const EntanglementStructure& s) {
    Json j;
    j["graph"] = hypergraph_to_json(s.graph);
    Json states = Json::array();
    for (const auto& t : s.edge_states) states.push_back(tensor_to_json(t));
    j["edge_states"] = std::move(states);
    return j;
}

inline Tensor edge_state_from_json(const Json& e) {
    if (e.contains("catalog")) {
        std::string name = e.at("catalog").get<std::string>();
        std::vector<uint32_t> params;
        if (e.contains("params")) params = e.at("params").get<std::vector<uint32_t>>();
        else {
            for (const char* key : {"r", "k", "d", "n"})
                if (e.contains(key)) params.push_back(e.at(key).get<uint32_t>());
        }
        return catalog_state(name, params);
    }
    return tensor_from_json(e);
}

inline EntanglementStructure structure_from_json(const Json& j) {
    Hypergraph g = hypergraph_from_json(j.at("graph"));
    std::vector<Tensor> states;
    for (const auto& e : j.at("edge_states")) states.push_back(edge_state_from_json(e));
    return EntanglementStructure(std::move(g), std::move(states));
}

// ---------------------------------------------------------------------------
// Map-family file: {"maps":[{"rows":r,"cols":c,"entries":[[entry,...],...]},...]}
// with entry = {"<eps degree>": "<rational>", ...}. Degree-0-only entries are
// a plain rational family.

inline Json poly_to_json(const EpsPoly& p) {
    Json e = Json::object();
    for (const auto& [d, c] : p.coeffs) e[std::to_string(d)] = rat_str(c);
    return e;
}

inline EpsPoly poly_from_json(const Json& j) {
    EpsPoly p;
    for (auto it = j.begin(); it != j.end(); ++it)
        p.add(static_cast<uint32_t>(std::stoul(it.key())), rat_parse(it.value().get<std::string>()));
    return p;
}

inline Json poly_map_family_to_json(const PolyMapFamily& fam) {
    Json maps = Json::array();
    for (const auto& m : fam) {
        Json jm;
        jm["rows"] = m.rows;
        jm["cols"] = m.cols;
        Json rows = Json::array();
        for (size_t i = 0; i < m.rows; ++i) {
            Json row = Json::array();
            for (size_t j = 0; j < m.cols; ++j) row.push_back(poly_to_json(m.at(i, j)));
            rows.push_back(std::move(row));
        }
        jm["entries"] = std::move(rows);
        maps.push_back(std::move(jm));
    }
    Json out;
    out["maps"] = std::move(maps);
    return out;
}

inline Json map_family_to_json(const LocalMapFamily& fam) {
    PolyMapFamily pf;
    for (const auto& m : fam) pf.emplace_back(m);
    return poly_map_family_to_json(pf);
}

inline PolyMapFamily poly_map_family_from_json(const Json& j) {
    PolyMapFamily fam;
    for (const auto& jm : j.at("maps")) {
        const auto& entries = jm.at("entries");
        size_t rows = jm.contains("rows") ? jm.at("rows").get<size_t>() : entries.size();
        size_t cols = jm.contains("cols") ? jm.at("cols").get<size_t>()
                                          : (entries.empty() ? 0 : entries[0].size());
        PolyMatrix m(rows, cols);
        for (size_t i = 0; i < rows; ++i)
            for (size_t c = 0; c < cols; ++c) m.at(i, c) = poly_from_json(entries[i][c]);
        fam.push_back(std::move(m));
    }
    return fam;
}

// Degree-0 projection; throws if any entry has a positive-degree coefficient.
inline LocalMapFamily map_family_from_json(const Json& j) {
    PolyMapFamily pf = poly_map_family_from_json(j);
    LocalMapFamily fam;
    for (const auto& pm : pf) {
        Matrix m(pm.rows, pm.cols);
        for (size_t i = 0; i < pm.a.size(); ++i) {
            const EpsPoly& p = pm.a[i];
            if (!p.is_zero() && p.max_degree() > 0)
                throw std::invalid_argument("map family has eps-polynomial entries");
            m.a[i] = p.coeff(0);
        }
        fam.push_back(std::move(m));
    }
    return fam;
}

// Covector file: {"covectors":[["1","0",...],...]} (rational strings).
inline Json covectors_to_json(const CovectorAssignment& a) {
    Json rows = Json::array();
    for (const auto& v : a) {
        Json row = Json::array();
        for (const auto& c : v) row.push_back(rat_str(c));
        rows.push_back(std::move(row));
    }
    Json j;
    j["covectors"] = std::move(rows);
    return j;
}

inline CovectorAssignment covectors_from_json(const Json& j) {
    CovectorAssignment a;
    for (const auto& row : j.at("covectors")) {
        std::vector<Rational> v;
        for (const auto& c : row) v.push_back(rat_parse(c.get<std::string>()));
        a.push_back(std::move(v));
    }
    return a;
}

// ---------------------------------------------------------------------------
// File helpers.

inline Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& ex) {
        throw std::runtime_error("malformed JSON in " + path + ": " + ex.what());
    }
    return j;
}

inline void save_json(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// SHA-256 (for content digests in run reports).

namespace detail {

struct Sha256 {
    uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                     0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    uint64_t length = 0;
    unsigned char buf[64];
    size_t buf_len = 0;

    static uint32_t rotr(uint32_t x, uint32_t n) { return (x >> n) | (x << (32 - n)); }

    void process(const unsigned char* p) {
        static const uint32_t k[64] = {
            0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
            0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
            0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
            0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
            0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
            0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
            0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
            0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
            0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
            0xc67178f2};
        uint32_t w[64];
        for (int i = 0; i < 16; ++i)
            w[i] = (uint32_t(p[i * 4]) << 24) | (uint32_t(p[i * 4 + 1]) << 16) |
                   (uint32_t(p[i * 4 + 2]) << 8) | uint32_t(p[i * 4 + 3]);
        for (int i = 16; i < 64; ++i) {
            uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4], f = h[5], g = h[6],
                 hh = h[7];
        for (int i = 0; i < 64; ++i) {
            uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            uint32_t ch = (e & f) ^ (~e & g);
            uint32_t t1 = hh + s1 + ch + k[i] + w[i];
            uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            uint32_t t2 = s0 + maj;
            hh = g; g = f; f = e; e = d + t1;
            d = c; c = b; b = a; a = t1 + t2;
        }
        h[0] += a; h[1] += b; h[2] += c; h[3] += d;
        h[4] += e; h[5] += f; h[6] += g; h[7] += hh;
    }

    void update(const void* data, size_t len) {
        const unsigned char* p = static_cast<const unsigned char*>(data);
        length += len;
        while (len > 0) {
            size_t take = std::min<size_t>(64 - buf_len, len);
            std::copy(p, p + take, buf + buf_len);
            buf_len += take;
            p += take;
            len -= take;
            if (buf_len == 64) {
                process(buf);
                buf_len = 0;
            }
        }
    }

    std::string hex_digest() {
        uint64_t bits = length * 8;
        unsigned char pad = 0x80;
        update(&pad, 1);
        unsigned char zero = 0;
        while (buf_len != 56) update(&zero, 1);
        unsigned char lenb[8];
        for (int i = 0; i < 8; ++i) lenb[i] = static_cast<unsigned char>(bits >> (56 - 8 * i));
        update(lenb, 8);
        static const char* hexd = "0123456789abcdef";
        std::string out;
        for (uint32_t x : h) {
            for (int i = 28; i >= 0; i -= 4) out.push_back(hexd[(x >> i) & 0xf]);
        }
        return out;
    }
};

}  // namespace detail

inline std::string sha256_hex(const std::string& data) {
    detail::Sha256 s;
    s.update(data.data(), data.size());
    return s.hex_digest();
}

// Content digest of a canonical JSON serialization.
inline std::string json_digest(const Json& j) { return sha256_hex(j.dump()); }

}  // namespace entres
