#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "vipd/diversity.hpp"
#include "vipd/model.hpp"
#include "vipd/tree_extension.hpp"
#include "vipd/viability.hpp"

namespace vipd {

// Shared per-(instance, extension) precomputation for the two tree-extension
// dynamic programs: viability gates per granted-edge mask and the translation
// from a parent's GW mask (plus the psi grant) into each child's GW mask.
struct ExtContext {
    const Instance* inst = nullptr;
    const TreeExtension* ext = nullptr;
    int n = 0;
    std::vector<TaxonSet> off;
    std::vector<int> taxon_vertex;
    std::vector<std::vector<char>> gate; // [v][phiMask]: source or granted prey >= 1
    std::vector<std::vector<std::array<std::vector<int>, 2>>> trans;

    int phi_count(int v) const { return 1 << ext->gw[v].size(); }
};

inline ExtContext build_ext_context(const Instance& inst, const TreeExtension& ext) {
    ExtContext cx;
    cx.inst = &inst;
    cx.ext = &ext;
    cx.n = inst.web.n;
    cx.off = offspring_sets(inst.network);
    cx.taxon_vertex.assign(cx.n, -1);
    for (int v = 0; v < inst.network.vertex_count(); ++v)
        if (inst.network.taxon_index[v] >= 0) cx.taxon_vertex[inst.network.taxon_index[v]] = v;

    const FoodWeb& web = inst.web;
    cx.gate.resize(cx.n);
    cx.trans.resize(cx.n);
    for (int v = 0; v < cx.n; ++v) {
        const auto& gw = ext.gw[v];
        int bits = (int)gw.size();
        if (bits > 25) throw InfeasibleError("scanwidth too large for the mask tables");
        cx.gate[v].assign((std::size_t)1 << bits, 0);
        std::vector<Rational> sum((std::size_t)1 << bits, Rational(0));
        for (int mask = 0; mask < (1 << bits); ++mask) {
            if (mask) {
                int low = __builtin_ctz((unsigned)mask);
                sum[mask] = sum[mask & (mask - 1)];
                if (web.edges[gw[low]].predator == v) sum[mask] += web.edges[gw[low]].gamma;
            }
            cx.gate[v][mask] = web.is_source(v) || sum[mask] >= Rational(1);
        }
        cx.trans[v].resize(ext.children[v].size());
        for (std::size_t ci = 0; ci < ext.children[v].size(); ++ci) {
            int w = ext.children[v][ci];
            const auto& gww = ext.gw[w];
            // per child-gw edge: its position in gw(v), or -1 when it is one
            // of v's predator edges (granted only under psi)
            std::vector<int> src(gww.size(), -2);
            for (std::size_t j = 0; j < gww.size(); ++j) {
                int e = gww[j];
                for (std::size_t p = 0; p < gw.size(); ++p)
                    if (gw[p] == e) src[j] = (int)p;
                if (src[j] == -2 && web.edges[e].prey == v) src[j] = -1;
                if (src[j] == -2)
                    throw ValidationError("tree extension locality violated: GW(child) must sit "
                                          "inside GW(parent) plus the parent's predator edges");
            }
            for (int psi = 0; psi < 2; ++psi) {
                auto& t = cx.trans[v][ci][psi];
                t.assign((std::size_t)1 << bits, 0);
                for (int mask = 0; mask < (1 << bits); ++mask) {
                    int out = 0;
                    for (std::size_t j = 0; j < gww.size(); ++j) {
                        bool on = src[j] == -1 ? psi != 0 : ((mask >> src[j]) & 1) != 0;
                        if (on) out |= 1 << j;
                    }
                    t[mask] = out;
                }
            }
        }
    }
    return cx;
}

} // namespace vipd
