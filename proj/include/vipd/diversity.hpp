#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "vipd/bitset.hpp"
#include "vipd/model.hpp"

namespace vipd {

// Per-vertex offspring sets over taxon indices, by reverse topological sweep.
inline std::vector<TaxonSet> offspring_sets(const PhyloNetwork& net) {
    int nv = net.vertex_count();
    int n = net.taxon_count();
    std::vector<TaxonSet> off(nv, TaxonSet(n));
    // topological order via out-degree peeling
    std::vector<int> outdeg(nv), order;
    order.reserve(nv);
    for (int v = 0; v < nv; ++v) {
        outdeg[v] = (int)net.out_edges[v].size();
        if (outdeg[v] == 0) order.push_back(v);
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
        int v = order[i];
        if (net.taxon_index[v] >= 0) off[v].set(net.taxon_index[v]);
        for (int e : net.in_edges[v]) {
            int u = net.edges[e].tail;
            off[u] |= off[v];
            if (--outdeg[u] == 0) order.push_back(u);
        }
    }
    return off;
}

inline std::vector<int> offspring(const PhyloNetwork& net, int v) {
    if (v < 0 || v >= net.vertex_count()) throw InputError("unknown vertex");
    auto off = offspring_sets(net);
    std::vector<int> out;
    for (int t : off[v].members()) out.push_back(net.taxa[t]);
    return out;
}

inline std::vector<int> edge_support_mask(const PhyloNetwork& net,
                                          const std::vector<TaxonSet>& off,
                                          const TaxonSet& a) {
    std::vector<int> edges;
    for (int e = 0; e < net.edge_count(); ++e)
        if (off[net.edges[e].head].intersects(a)) edges.push_back(e);
    return edges;
}

// E(A): edges on some directed path ending in a member of a (taxon indices).
inline std::vector<int> edge_support(const PhyloNetwork& net, const std::vector<int>& a) {
    auto off = offspring_sets(net);
    return edge_support_mask(net, off, TaxonSet::of(net.taxon_count(), a));
}

inline std::int64_t pd_mask(const PhyloNetwork& net, const std::vector<TaxonSet>& off,
                            const TaxonSet& a) {
    std::int64_t w = 0;
    for (int e = 0; e < net.edge_count(); ++e)
        if (off[net.edges[e].head].intersects(a)) w += net.edges[e].weight;
    return w;
}

// All-paths phylogenetic diversity of a set of taxon indices.
inline std::int64_t pd(const PhyloNetwork& net, const std::vector<int>& a) {
    auto off = offspring_sets(net);
    return pd_mask(net, off, TaxonSet::of(net.taxon_count(), a));
}

// Complement route: pd(X \ A) = total - sum of weights of edges whose whole
// offspring lies inside A.
inline std::int64_t pd_complement(const PhyloNetwork& net, const std::vector<TaxonSet>& off,
                                  const TaxonSet& a) {
    std::int64_t lost = 0;
    for (int e = 0; e < net.edge_count(); ++e)
        if (off[net.edges[e].head].is_subset_of(a)) lost += net.edges[e].weight;
    return net.total_weight - lost;
}

struct StructuralParams {
    int h_r = 0;   // max reticulations on a root-leaf path
    int h_t = 0;   // max internal tree vertices on a root-leaf path
    int h = 0;     // h_r + h_t
    int delta = 0; // max reticulation in-degree, 0 when there are none
    int big_h = 0; // max |E_x| where E_x = internal tree edges on paths to x
};

inline StructuralParams structural_params(const PhyloNetwork& net) {
    StructuralParams p;
    int nv = net.vertex_count();
    std::vector<int> indeg(nv), order;
    order.reserve(nv);
    std::vector<int> cr(nv, 0), ct(nv, 0);
    for (int v = 0; v < nv; ++v) {
        indeg[v] = (int)net.in_edges[v].size();
        if (indeg[v] == 0) order.push_back(v);
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
        int v = order[i];
        cr[v] += net.kind[v] == VertexKind::Reticulation ? 1 : 0;
        ct[v] += net.kind[v] == VertexKind::TreeVertex ? 1 : 0;
        p.h_r = std::max(p.h_r, cr[v]);
        p.h_t = std::max(p.h_t, ct[v]);
        for (int e : net.out_edges[v]) {
            int w = net.edges[e].head;
            cr[w] = std::max(cr[w], cr[v]);
            ct[w] = std::max(ct[w], ct[v]);
            if (--indeg[w] == 0) order.push_back(w);
        }
    }
    p.h = p.h_r + p.h_t;
    for (int v = 0; v < nv; ++v)
        if (net.kind[v] == VertexKind::Reticulation)
            p.delta = std::max(p.delta, (int)net.in_edges[v].size());

    auto off = offspring_sets(net);
    for (int t = 0; t < net.taxon_count(); ++t) {
        int ex = 0;
        for (int e = 0; e < net.edge_count(); ++e)
            if (net.is_internal_tree_edge(e) && off[net.edges[e].head].test(t)) ++ex;
        p.big_h = std::max(p.big_h, ex);
    }
    return p;
}

// E_x per taxon: internal tree edges that lie on some root-to-x path.
inline std::vector<std::vector<int>> tree_edges_above(const PhyloNetwork& net,
                                                      const std::vector<TaxonSet>& off) {
    std::vector<std::vector<int>> ex(net.taxon_count());
    for (int e = 0; e < net.edge_count(); ++e) {
        if (!net.is_internal_tree_edge(e)) continue;
        for (int t = 0; t < net.taxon_count(); ++t)
            if (off[net.edges[e].head].test(t)) ex[t].push_back(e);
    }
    return ex;
}

} // namespace vipd
