#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "hypergraph.hpp"
#include "structure.hpp"
#include "tensor.hpp"

namespace entres {

// One rational row vector per vertex, of length dim(H_v).
using CovectorAssignment = std::vector<std::vector<Rational>>;

// Ordered pairwise merges over a working set seeded with one node per edge
// tensor and one per covector. Step (i, j) with i < j merges node j into node
// i (indices into the current working set; j is removed).
struct ContractionPlan {
    std::vector<std::pair<size_t, size_t>> steps;
    uint64_t estimated_peak_terms = 0;
};

namespace detail {

// Sparse tensor with labeled axes used during network contraction. Every
// label (edge slot id) occurs in exactly two nodes of the initial network.
struct LabeledTensor {
    std::vector<uint64_t> labels;
    std::vector<uint32_t> dims;
    std::map<MultiIndex, Rational> terms;
};

inline LabeledTensor contract_pair(const LabeledTensor& a, const LabeledTensor& b) {
    // shared labels
    std::vector<size_t> a_shared, b_shared, a_keep, b_keep;
    for (size_t i = 0; i < a.labels.size(); ++i) {
        auto it = std::find(b.labels.begin(), b.labels.end(), a.labels[i]);
        if (it != b.labels.end()) {
            a_shared.push_back(i);
            b_shared.push_back(static_cast<size_t>(it - b.labels.begin()));
        } else {
            a_keep.push_back(i);
        }
    }
    for (size_t i = 0; i < b.labels.size(); ++i)
        if (std::find(a.labels.begin(), a.labels.end(), b.labels[i]) == a.labels.end())
            b_keep.push_back(i);

    LabeledTensor out;
    for (size_t i : a_keep) {
        out.labels.push_back(a.labels[i]);
        out.dims.push_back(a.dims[i]);
    }
    for (size_t i : b_keep) {
        out.labels.push_back(b.labels[i]);
        out.dims.push_back(b.dims[i]);
    }
    // bucket b's terms by shared-index key
    std::map<MultiIndex, std::vector<std::pair<MultiIndex, const Rational*>>> buckets;
    MultiIndex key(b_shared.size()), kept(b_keep.size());
    for (const auto& [idx, c] : b.terms) {
        for (size_t i = 0; i < b_shared.size(); ++i) key[i] = idx[b_shared[i]];
        for (size_t i = 0; i < b_keep.size(); ++i) kept[i] = idx[b_keep[i]];
        buckets[key].emplace_back(kept, &c);
    }
    MultiIndex akey(a_shared.size()), out_idx(out.labels.size());
    for (const auto& [idx, c] : a.terms) {
        for (size_t i = 0; i < a_shared.size(); ++i) akey[i] = idx[a_shared[i]];
        auto it = buckets.find(akey);
        if (it == buckets.end()) continue;
        for (size_t i = 0; i < a_keep.size(); ++i) out_idx[i] = idx[a_keep[i]];
        for (const auto& [bk, bc] : it->second) {
            for (size_t i = 0; i < b_keep.size(); ++i) out_idx[a_keep.size() + i] = bk[i];
            auto [pos, inserted] = out.terms.emplace(out_idx, c * (*bc));
            if (!inserted) {
                pos->second += c * (*bc);
                if (pos->second == 0) out.terms.erase(pos);
            }
        }
    }
    return out;
}

// Initial network: one node per edge tensor and one per covector. Slot label
// = edge_index * max_arity + position; covector nodes carry the slots of
// their vertex in slot-table order.
inline std::vector<LabeledTensor> build_network(const EntanglementStructure& s,
                                                const CovectorAssignment& a) {
    SlotTable table(s);
    if (a.size() != s.graph.vertex_count)
        throw std::invalid_argument("contract: one covector per vertex required");
    for (uint32_t v = 0; v < s.graph.vertex_count; ++v)
        if (a[v].size() != table.vertex_dims[v])
            throw std::invalid_argument("contract: covector length mismatch at vertex " +
                                        std::to_string(v));
    size_t max_arity = 1;
    for (const auto& e : s.graph.edges) max_arity = std::max(max_arity, e.size());
    auto slot_label = [&](size_t edge, size_t pos) -> uint64_t {
        return edge * max_arity + pos;
    };
    std::vector<LabeledTensor> nodes;
    for (size_t ei = 0; ei < s.edge_states.size(); ++ei) {
        LabeledTensor n;
        for (size_t p = 0; p < s.edge_states[ei].party_count(); ++p) {
            n.labels.push_back(slot_label(ei, p));
            n.dims.push_back(s.edge_states[ei].dims[p]);
        }
        n.terms = s.edge_states[ei].terms;
        nodes.push_back(std::move(n));
    }
    for (uint32_t v = 0; v < s.graph.vertex_count; ++v) {
        LabeledTensor n;
        std::vector<uint32_t> dims;
        for (const Slot& sl : table.slots[v]) {
            n.labels.push_back(slot_label(sl.edge, sl.pos));
            n.dims.push_back(sl.dim);
            dims.push_back(sl.dim);
        }
        for (uint64_t flat = 0; flat < table.vertex_dims[v]; ++flat) {
            if (a[v][flat] == 0) continue;
            n.terms.emplace(dims.empty() ? MultiIndex{} : mixed_radix_decode(flat, dims),
                            a[v][flat]);
        }
        nodes.push_back(std::move(n));
    }
    return nodes;
}

}  // namespace detail

// Left-fold plan: merge node 1 into node 0, then node 2, ...
inline ContractionPlan naive_order(const EntanglementStructure& s) {
    ContractionPlan plan;
    size_t n = s.edge_states.size() + s.graph.vertex_count;
    for (size_t i = 1; i < n; ++i) plan.steps.emplace_back(0, 1);
    return plan;
}

// Greedy plan: repeatedly merge the pair with the smallest term-count product
// (preferring pairs that share an index), ties broken by lowest indices.
// Sparse term count, not dimension, is the cost model here.
inline ContractionPlan greedy_order(const EntanglementStructure& s,
                                    const CovectorAssignment* covectors = nullptr) {
    CovectorAssignment ones;
    if (!covectors) {
        SlotTable table(s);
        ones.resize(s.graph.vertex_count);
        for (uint32_t v = 0; v < s.graph.vertex_count; ++v)
            ones[v].assign(table.vertex_dims[v], Rational(1));
        covectors = &ones;
    }
    auto nodes = detail::build_network(s, *covectors);
    ContractionPlan plan;
    uint64_t peak = 0;
    for (const auto& n : nodes) peak = std::max<uint64_t>(peak, n.terms.size());
    std::vector<size_t> live(nodes.size());
    for (size_t i = 0; i < live.size(); ++i) live[i] = i;
    while (live.size() > 1) {
        size_t best_i = 0, best_j = 1;
        uint64_t best_cost = UINT64_MAX;
        bool best_shares = false;
        for (size_t i = 0; i < live.size(); ++i)
            for (size_t j = i + 1; j < live.size(); ++j) {
                const auto& a = nodes[live[i]];
                const auto& b = nodes[live[j]];
                bool shares = false;
                for (uint64_t l : a.labels)
                    if (std::find(b.labels.begin(), b.labels.end(), l) != b.labels.end()) {
                        shares = true;
                        break;
                    }
                uint64_t cost = static_cast<uint64_t>(a.terms.size()) * b.terms.size();
                if (std::make_tuple(!shares, cost) <
                    std::make_tuple(!best_shares, best_cost)) {
                    best_shares = shares;
                    best_cost = cost;
                    best_i = i;
                    best_j = j;
                }
            }
        plan.steps.emplace_back(best_i, best_j);
        nodes[live[best_i]] = detail::contract_pair(nodes[live[best_i]], nodes[live[best_j]]);
        peak = std::max<uint64_t>(peak, nodes[live[best_i]].terms.size());
        live.erase(live.begin() + best_j);
    }
    plan.estimated_peak_terms = peak;
    return plan;
}

// Exact tensor network coefficient <(x)_v T_v | phi_G>. Plan-independent; the
// default plan is the greedy one.
inline Rational contract(const EntanglementStructure& s, const CovectorAssignment& a,
                         const ContractionPlan* plan_in = nullptr) {
    auto nodes = detail::build_network(s, a);
    ContractionPlan plan = plan_in ? *plan_in : greedy_order(s, &a);
    std::vector<size_t> live(nodes.size());
    for (size_t i = 0; i < live.size(); ++i) live[i] = i;
    for (const auto& [i, j] : plan.steps) {
        if (i >= live.size() || j >= live.size() || i == j)
            throw std::invalid_argument("contract: invalid plan step");
        nodes[live[i]] = detail::contract_pair(nodes[live[i]], nodes[live[j]]);
        live.erase(live.begin() + j);
    }
    if (live.size() != 1) throw std::invalid_argument("contract: plan does not consume all nodes");
    const auto& final_node = nodes[live[0]];
    if (!final_node.labels.empty()) throw std::logic_error("contract: dangling indices");
    if (final_node.terms.empty()) return Rational(0);
    return final_node.terms.begin()->second;
}

// ---------------------------------------------------------------------------
// Matchings partition function on square lattice graphs.

// Sum over all matchings M (including the empty one) of prod_{e in M} x(e).
inline Rational matchings_partition_brute(const Hypergraph& g, const std::vector<Rational>& x) {
    for (const auto& e : g.edges)
        if (e.size() != 2)
            throw std::invalid_argument("matchings_partition_brute: 2-uniform graphs only");
    if (x.size() != g.edges.size())
        throw std::invalid_argument("matchings_partition_brute: one weight per edge");
    if (g.edges.size() > 24) throw std::invalid_argument("matchings_partition_brute: > 24 edges");
    std::vector<bool> used(g.vertex_count, false);
    Rational total = 0;
    // DFS over edges: each edge is skipped or, if both endpoints are free,
    // taken with weight x(e).
    std::function<void(size_t, Rational)> rec = [&](size_t ei, Rational acc) {
        if (ei == g.edges.size()) {
            total += acc;
            return;
        }
        rec(ei + 1, acc);
        uint32_t a = g.edges[ei][0], b = g.edges[ei][1];
        if (!used[a] && !used[b] && x[ei] != 0) {
            used[a] = used[b] = true;
            rec(ei + 1, acc * x[ei]);
            used[a] = used[b] = false;
        }
    };
    rec(0, Rational(1));
    return total;
}

struct MatchingsNetwork {
    EntanglementStructure structure;  // EPR_2 on every lattice edge
    CovectorAssignment covectors;
};

// Encode Z(x) on an open rows x cols square lattice as a bond-dimension-2
// network: level-2 EPR pairs on the edges and one covector per vertex whose
// terms allow at most one selected incident edge. Each edge variable is
// carried by its right/below endpoint (the generator lists that endpoint
// second); the other endpoint contributes weight 1. Boundary vertices simply
// have fewer slots.
inline MatchingsNetwork matchings_vertex_tensors(uint32_t rows, uint32_t cols,
                                                 const std::vector<Rational>& x) {
    Hypergraph g = square_lattice(rows, cols, false);
    if (x.size() != g.edges.size())
        throw std::invalid_argument("matchings_vertex_tensors: one weight per edge");
    MatchingsNetwork net;
    net.structure = uniform_structure(g, epr_pair(2));
    SlotTable table(net.structure);
    net.covectors.resize(g.vertex_count);
    for (uint32_t v = 0; v < g.vertex_count; ++v) {
        const auto& slots = table.slots[v];
        std::vector<Rational>& cov = net.covectors[v];
        cov.assign(table.vertex_dims[v], Rational(0));
        std::vector<uint32_t> dims(slots.size(), 2);
        // all-zero pattern: weight 1
        cov[0] = 1;
        for (size_t i = 0; i < slots.size(); ++i) {
            std::vector<uint32_t> digits(slots.size(), 0);
            digits[i] = 1;
            size_t ei = slots[i].edge;
            bool owner = g.edges[ei][1] == v;  // right/below endpoint owns x(e)
            cov[mixed_radix_encode(digits, dims)] = owner ? x[ei] : Rational(1);
        }
    }
    return net;
}

}  // namespace entres
