#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "vipd/matching.hpp"
#include "vipd/model.hpp"

namespace vipd {

using ColorMask = std::uint32_t;

// The unique edge set lost when taxon x goes extinct, certified by anchors:
// per anchor-requiring tail one surviving sibling edge colored inside the
// forbidden set C.
struct RespectingSet {
    int taxon_vertex = -1;
    ColorMask forbidden = 0;    // C
    std::vector<int> edges;     // F, ascending edge ids
    std::vector<int> anchors;   // F', one edge per requiring tail
    std::int64_t weight = 0;
    ColorMask colors = 0;       // c(F)
};

// Closure + anchor matching per the uniqueness structure: starting from x's
// incoming edge, a tail with no outgoing edge colored in C pulls in all of
// its incoming edges; tails that do have such an edge need an anchor, found
// by a left-saturating bipartite matching of tails against the colors of C.
// Absence is a value (weight infinity upstream), not an error.
inline std::optional<RespectingSet> compute_respecting(const PhyloNetwork& net,
                                                       const std::vector<int>& edge_color,
                                                       int taxon_vertex, ColorMask c_set) {
    RespectingSet rs;
    rs.taxon_vertex = taxon_vertex;
    rs.forbidden = c_set;

    std::vector<char> in_f(net.edge_count(), 0);
    std::vector<char> pulled(net.vertex_count(), 0);
    std::vector<int> work;
    auto add_edge = [&](int e) {
        if (!in_f[e]) {
            in_f[e] = 1;
            work.push_back(e);
        }
    };
    add_edge(net.in_edge_of_leaf(taxon_vertex));

    auto tail_has_c_colored_out = [&](int u) {
        for (int e : net.out_edges[u])
            if (c_set >> edge_color[e] & 1) return true;
        return false;
    };

    while (!work.empty()) {
        int e = work.back();
        work.pop_back();
        int u = net.edges[e].tail;
        if (pulled[u]) continue;
        if (!tail_has_c_colored_out(u)) {
            pulled[u] = 1;
            for (int f : net.in_edges[u]) add_edge(f);
        }
    }

    ColorMask used = 0;
    for (int e = 0; e < net.edge_count(); ++e) {
        if (!in_f[e]) continue;
        ColorMask bit = (ColorMask)1 << edge_color[e];
        if (c_set & bit) return std::nullopt;  // F may not carry forbidden colors
        if (used & bit) return std::nullopt;   // colors inside F must be distinct
        used |= bit;
        rs.edges.push_back(e);
        rs.weight += net.edges[e].weight;
    }
    rs.colors = used;

    // anchor-requiring tails: tails of F edges with some C-colored out-edge
    std::vector<int> tails;
    for (int e : rs.edges) {
        int u = net.edges[e].tail;
        if (!pulled[u] && std::find(tails.begin(), tails.end(), u) == tails.end())
            tails.push_back(u);
    }
    if (tails.empty()) return rs;

    std::vector<int> c_colors;
    for (int c = 0; c < 32; ++c)
        if (c_set >> c & 1) c_colors.push_back(c);
    BipartiteGraph g((int)tails.size(), (int)c_colors.size());
    for (int li = 0; li < (int)tails.size(); ++li) {
        for (int ci = 0; ci < (int)c_colors.size(); ++ci) {
            bool has = false;
            for (int e : net.out_edges[tails[li]])
                if (edge_color[e] == c_colors[ci]) { has = true; break; }
            if (has) g.add_edge(li, ci);
        }
    }
    auto ml = max_matching(g);
    if (!saturates_left(g, ml)) return std::nullopt;
    for (int li = 0; li < (int)tails.size(); ++li) {
        int want = c_colors[ml[li]];
        for (int e : net.out_edges[tails[li]]) {
            if (edge_color[e] == want) {
                rs.anchors.push_back(e);
                break;
            }
        }
    }
    return rs;
}

// The three perfect-triple conditions for taxa listed in extension DFS order:
// chi1 sets pairwise disjoint, chi2 sets pairwise disjoint, chi1(x_i)
// disjoint from chi2(x_j) for i <= j, and each respecting set exists with
// exactly the claimed colors.
inline bool perfect_triple_check(const PhyloNetwork& net, const std::vector<int>& edge_color,
                                 const std::vector<int>& taxa_in_order,
                                 const std::vector<ColorMask>& chi1,
                                 const std::vector<ColorMask>& chi2) {
    std::size_t m = taxa_in_order.size();
    if (chi1.size() != m || chi2.size() != m) return false;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            if ((chi1[i] & chi1[j]) || (chi2[i] & chi2[j])) return false;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j)
            if (chi1[i] & chi2[j]) return false;
    for (std::size_t i = 0; i < m; ++i) {
        auto rs = compute_respecting(net, edge_color, taxa_in_order[i], chi2[i]);
        if (!rs || rs->colors != chi1[i]) return false;
    }
    return true;
}

} // namespace vipd
