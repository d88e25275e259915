#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "vipd/diversity.hpp"
#include "vipd/model.hpp"
#include "vipd/respecting.hpp"
#include "vipd/solver_common.hpp"

namespace vipd {

struct SuitableSet {
    int taxon_vertex = -1;
    ColorMask chi = 0;
    std::vector<int> edges;
    std::int64_t weight = 0;
};

// Colored-edge numbering for the kH machinery: internal tree edges get
// colors; reticulation and leaf-incoming edges carry -1.
inline std::vector<int> internal_tree_edge_ids(const PhyloNetwork& net) {
    std::vector<int> ids;
    for (int e = 0; e < net.edge_count(); ++e)
        if (net.is_internal_tree_edge(e)) ids.push_back(e);
    return ids;
}

// Maximum-weight suitable set for taxon x under tree-edge color budget chi:
// enumerate subsets of the admissible E_x edges, force x's incoming edge,
// close reticulation tails upward (free weight, uncolored), then keep
// candidates whose every edge reaches x inside the chosen set.
inline std::optional<SuitableSet> max_suitable(const PhyloNetwork& net,
                                               const std::vector<TaxonSet>& off,
                                               const std::vector<int>& edge_color,
                                               const std::vector<int>& ex_edges, int taxon_vertex,
                                               ColorMask chi) {
    std::vector<int> admissible;
    for (int e : ex_edges)
        if (edge_color[e] >= 0 && (chi >> edge_color[e] & 1)) admissible.push_back(e);
    if (admissible.size() > 24) throw InfeasibleError("suitable-set enumeration too large");

    std::optional<SuitableSet> best;
    std::vector<char> in_f(net.edge_count(), 0);
    std::vector<char> reach(net.vertex_count(), 0);

    for (std::uint32_t sub = 0; sub < (1u << admissible.size()); ++sub) {
        // distinct colors within the chosen tree edges
        ColorMask used = 0;
        bool ok = true;
        std::vector<int> fset;
        for (std::size_t j = 0; j < admissible.size() && ok; ++j) {
            if (!(sub >> j & 1)) continue;
            ColorMask bit = (ColorMask)1 << edge_color[admissible[j]];
            if (used & bit) ok = false;
            used |= bit;
            fset.push_back(admissible[j]);
        }
        if (!ok) continue;
        fset.push_back(net.in_edge_of_leaf(taxon_vertex));

        std::fill(in_f.begin(), in_f.end(), 0);
        for (int e : fset) in_f[e] = 1;
        // reticulation pull-in, transitively
        for (std::size_t wi = 0; wi < fset.size(); ++wi) {
            int u = net.edges[fset[wi]].tail;
            if (net.kind[u] != VertexKind::Reticulation) continue;
            for (int f : net.in_edges[u]) {
                if (!in_f[f]) {
                    in_f[f] = 1;
                    fset.push_back(f);
                }
            }
        }
        // every edge must have a path to x within the set
        std::fill(reach.begin(), reach.end(), 0);
        reach[taxon_vertex] = 1;
        for (bool changed = true; changed;) {
            changed = false;
            for (int e : fset) {
                if (reach[net.edges[e].head] && !reach[net.edges[e].tail]) {
                    reach[net.edges[e].tail] = 1;
                    changed = true;
                }
            }
        }
        for (int e : fset)
            if (!reach[net.edges[e].head]) { ok = false; break; }
        if (!ok) continue;

        std::int64_t w = 0;
        for (int e : fset) w += net.edges[e].weight;
        if (!best || w > best->weight) {
            best = SuitableSet{taxon_vertex, chi, fset, w};
            std::sort(best->edges.begin(), best->edges.end());
        }
    }
    (void)off;
    return best;
}

// Memoized weights per (taxon, chi) inside one colored solve.
struct SuitableMemo {
    const PhyloNetwork* net;
    const std::vector<TaxonSet>* off;
    const std::vector<int>* edge_color;
    const std::vector<std::vector<int>>* ex;
    const std::vector<int>* taxon_vertex;
    struct Entry {
        std::int8_t state = 0; // 0 unknown, 1 absent, 2 present
        std::int64_t weight = 0;
    };
    std::vector<std::vector<Entry>> slot;

    SuitableMemo(const PhyloNetwork& n, const std::vector<TaxonSet>& o,
                 const std::vector<int>& c, const std::vector<std::vector<int>>& e,
                 const std::vector<int>& tv, int ntaxa, int ncol)
        : net(&n), off(&o), edge_color(&c), ex(&e), taxon_vertex(&tv), slot(ntaxa) {
        for (auto& s : slot) s.resize((std::size_t)1 << ncol);
    }
    std::int64_t weight(int taxon_idx, ColorMask chi) {
        Entry& e = slot[taxon_idx][chi];
        if (e.state == 0) {
            auto s = max_suitable(*net, *off, *edge_color, (*ex)[taxon_idx],
                                  (*taxon_vertex)[taxon_idx], chi);
            if (!s) {
                e.state = 1;
            } else {
                e.state = 2;
                e.weight = s->weight;
            }
        }
        return e.state == 2 ? e.weight : kNegInf;
    }
};

} // namespace vipd
