#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "vipd/errors.hpp"
#include "vipd/model.hpp"

namespace vipd {

// Rooted tree on the food web's taxa in which every web edge runs from an
// ancestor to a descendant. GW(v) is the set of web edges whose tree path
// uses the edge parent(v) -> v; the width is max |GW(v)|.
struct TreeExtension {
    int root = -1;
    std::vector<int> parent;            // -1 at root
    std::vector<std::vector<int>> children; // ascending taxon index
    std::vector<std::vector<int>> gw;   // web edge ids per taxon
    int width = 0;
    std::vector<int> dfs_order;         // preorder, children in index order
};

inline TreeExtension validate_extension(const FoodWeb& web, const std::vector<int>& parent) {
    int n = web.n;
    if ((int)parent.size() != n) throw ValidationError("extension parent map size mismatch");
    TreeExtension ext;
    ext.parent = parent;
    ext.children.assign(n, {});
    ext.root = -1;
    for (int v = 0; v < n; ++v) {
        if (parent[v] == -1) {
            if (ext.root != -1)
                throw ValidationError("extension is not a tree: two roots '" +
                                      web.names[ext.root] + "' and '" + web.names[v] + "'");
            ext.root = v;
        } else {
            if (parent[v] < 0 || parent[v] >= n)
                throw ValidationError("extension parent out of range for '" + web.names[v] + "'");
            ext.children[parent[v]].push_back(v);
        }
    }
    if (ext.root == -1) throw ValidationError("extension is not a tree: no root");

    std::vector<int> depth(n, -1);
    depth[ext.root] = 0;
    ext.dfs_order.reserve(n);
    std::vector<int> stack{ext.root};
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        ext.dfs_order.push_back(v);
        for (auto it = ext.children[v].rbegin(); it != ext.children[v].rend(); ++it) {
            if (depth[*it] != -1) throw ValidationError("extension is not a tree");
            depth[*it] = depth[v] + 1;
            stack.push_back(*it);
        }
    }
    if ((int)ext.dfs_order.size() != n)
        throw ValidationError("extension is not a tree: disconnected or cyclic parent map");

    ext.gw.assign(n, {});
    for (int e = 0; e < (int)web.edges.size(); ++e) {
        int a = web.edges[e].prey, b = web.edges[e].predator;
        // walk b upward; a must appear strictly above b
        int v = b;
        while (v != -1 && v != a) {
            ext.gw[v].push_back(e);
            v = ext.parent[v];
        }
        if (v != a)
            throw ValidationError("extension violates the ancestor condition for web edge '" +
                                  web.names[a] + "' -> '" + web.names[b] + "'");
    }
    ext.width = 0;
    for (int v = 0; v < n; ++v)
        if (v != ext.root) ext.width = std::max(ext.width, (int)ext.gw[v].size());
    return ext;
}

inline std::vector<int> dfs_taxon_order(const TreeExtension& ext) { return ext.dfs_order; }

// ---------------------------------------------------------------------------
// TREEEXT format

inline TreeExtension parse_tree_extension(const std::string& text,
                                          const std::vector<std::string>& taxa,
                                          const FoodWeb& web) {
    std::unordered_map<std::string, int> index;
    for (int i = 0; i < (int)taxa.size(); ++i) index.emplace(taxa[i], i);
    std::vector<int> parent(taxa.size(), -2);
    int root = -1;
    for (const auto& rec : detail::tokenize(text)) {
        const auto& t = rec.tokens;
        if (t[0].text == "ROOT") {
            if (t.size() != 2) throw ParseError("ROOT needs <taxon>", rec.line, t[0].col);
            auto it = index.find(t[1].text);
            if (it == index.end())
                throw ParseError("unknown taxon '" + t[1].text + "'", rec.line, t[1].col);
            if (root != -1) throw ParseError("duplicate ROOT record", rec.line, t[0].col);
            root = it->second;
            parent[root] = -1;
        } else if (t[0].text == "EDGE") {
            if (t.size() != 3) throw ParseError("EDGE needs <parent> <child>", rec.line, t[0].col);
            auto pit = index.find(t[1].text);
            if (pit == index.end())
                throw ParseError("unknown taxon '" + t[1].text + "'", rec.line, t[1].col);
            auto cit = index.find(t[2].text);
            if (cit == index.end())
                throw ParseError("unknown taxon '" + t[2].text + "'", rec.line, t[2].col);
            if (parent[cit->second] != -2)
                throw ParseError("taxon '" + t[2].text + "' already has a parent", rec.line,
                                 t[2].col);
            parent[cit->second] = pit->second;
        } else {
            throw ParseError("expected ROOT or EDGE record, got '" + t[0].text + "'", rec.line,
                             t[0].col);
        }
    }
    if (root == -1) throw ParseError("missing ROOT record");
    for (int i = 0; i < (int)taxa.size(); ++i)
        if (parent[i] == -2)
            throw ValidationError("taxon '" + taxa[i] + "' missing from the extension");
    return validate_extension(web, parent);
}

inline std::string serialize_tree_extension(const TreeExtension& ext,
                                            const std::vector<std::string>& taxa) {
    std::ostringstream os;
    os << "ROOT " << taxa[ext.root] << "\n";
    for (int v : ext.dfs_order)
        if (v != ext.root) os << "EDGE " << taxa[ext.parent[v]] << " " << taxa[v] << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Construction

namespace detail {

// Weakly connected components of web restricted to `mask` (bit i = taxon i).
inline std::vector<std::uint32_t> weak_components(const FoodWeb& web, std::uint32_t mask) {
    std::vector<std::uint32_t> comps;
    std::uint32_t left = mask;
    while (left) {
        int s = __builtin_ctz(left);
        std::uint32_t comp = 0;
        std::vector<int> stack{s};
        comp |= 1u << s;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            auto visit = [&](int u) {
                if ((mask >> u & 1) && !(comp >> u & 1)) {
                    comp |= 1u << u;
                    stack.push_back(u);
                }
            };
            for (int e : web.prey_edges[v]) visit(web.edges[e].prey);
            for (int e : web.pred_edges[v]) visit(web.edges[e].predator);
        }
        comps.push_back(comp);
        left &= ~comp;
    }
    return comps;
}

inline int boundary_size(const FoodWeb& web, std::uint32_t mask) {
    int c = 0;
    for (const auto& e : web.edges)
        if ((mask >> e.predator & 1) && !(mask >> e.prey & 1)) ++c;
    return c;
}

struct ExactScanState {
    const FoodWeb& web;
    std::unordered_map<std::uint32_t, int> best;   // internal arrangement cost
    std::unordered_map<std::uint32_t, int> choice; // chosen top vertex

    // Minimal over top-vertex choices of the max subtree cost; the boundary
    // of `mask` itself is charged by the caller.
    int solve(std::uint32_t mask) {
        auto it = best.find(mask);
        if (it != best.end()) return it->second;
        int best_cost = INT32_MAX;
        int best_top = -1;
        for (std::uint32_t m = mask; m; m &= m - 1) {
            int u = __builtin_ctz(m);
            bool source_here = true;
            for (int e : web.prey_edges[u])
                if (mask >> web.edges[e].prey & 1) { source_here = false; break; }
            if (!source_here) continue;
            int cost = 0;
            for (std::uint32_t comp : weak_components(web, mask & ~(1u << u))) {
                cost = std::max(cost, boundary_size(web, comp));
                cost = std::max(cost, solve(comp));
                if (cost >= best_cost) break;
            }
            if (cost < best_cost) {
                best_cost = cost;
                best_top = u;
            }
        }
        best.emplace(mask, best_cost);
        choice.emplace(mask, best_top);
        return best_cost;
    }

    void build(std::uint32_t mask, int parent_of_top, std::vector<int>& parent) {
        solve(mask);
        int u = choice[mask];
        parent[u] = parent_of_top;
        for (std::uint32_t comp : weak_components(web, mask & ~(1u << u)))
            build(comp, u, parent);
    }
};

} // namespace detail

// Minimum-width tree extension by memoized search: the subtree top must be a
// source of the induced sub-web, and each weak component of the remainder
// becomes its own child subtree (merging components only enlarges GW sets).
inline TreeExtension exact_extension(const FoodWeb& web, int cap = 14) {
    if (web.n > cap)
        throw InfeasibleError("exact tree extension supports at most " + std::to_string(cap) +
                              " taxa (got " + std::to_string(web.n) +
                              "); supply a TREEEXT file or use the heuristic");
    if (web.n > 31) throw InfeasibleError("exact tree extension limited to 31 taxa");
    detail::ExactScanState st{web, {}, {}};
    std::uint32_t full = web.n == 31 ? 0x7fffffffu : ((1u << web.n) - 1);
    std::vector<int> parent(web.n, -1);
    // top-level: the best root over the whole set; components under it
    st.build(full, -1, parent);
    return validate_extension(web, parent);
}

// Greedy: at each subtree, pick the source whose removal minimizes the worst
// child boundary; no optimality claim.
inline TreeExtension heuristic_extension(const FoodWeb& web) {
    int n = web.n;
    std::vector<int> parent(n, -1);
    std::vector<char> in(n, 1);

    // recursive lambda over vertex lists
    std::vector<std::vector<int>> stack_sets;
    std::vector<int> stack_parent;
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    stack_sets.push_back(all);
    stack_parent.push_back(-1);

    auto components_of = [&](const std::vector<int>& set) {
        std::vector<char> mem(n, 0), seen(n, 0);
        for (int v : set) mem[v] = 1;
        std::vector<std::vector<int>> comps;
        for (int s : set) {
            if (seen[s]) continue;
            std::vector<int> comp, st{s};
            seen[s] = 1;
            while (!st.empty()) {
                int v = st.back();
                st.pop_back();
                comp.push_back(v);
                auto visit = [&](int u) {
                    if (mem[u] && !seen[u]) { seen[u] = 1; st.push_back(u); }
                };
                for (int e : web.prey_edges[v]) visit(web.edges[e].prey);
                for (int e : web.pred_edges[v]) visit(web.edges[e].predator);
            }
            std::sort(comp.begin(), comp.end());
            comps.push_back(std::move(comp));
        }
        return comps;
    };
    auto boundary = [&](const std::vector<int>& set) {
        std::vector<char> mem(n, 0);
        for (int v : set) mem[v] = 1;
        int c = 0;
        for (const auto& e : web.edges)
            if (mem[e.predator] && !mem[e.prey]) ++c;
        return c;
    };

    while (!stack_sets.empty()) {
        std::vector<int> set = std::move(stack_sets.back());
        stack_sets.pop_back();
        int par = stack_parent.back();
        stack_parent.pop_back();

        std::vector<char> mem(n, 0);
        for (int v : set) mem[v] = 1;
        int best_u = -1, best_score = INT32_MAX;
        for (int u : set) {
            bool src = true;
            for (int e : web.prey_edges[u])
                if (mem[web.edges[e].prey]) { src = false; break; }
            if (!src) continue;
            std::vector<int> rest;
            for (int v : set)
                if (v != u) rest.push_back(v);
            int score = 0;
            for (const auto& comp : components_of(rest)) score = std::max(score, boundary(comp));
            if (score < best_score) { best_score = score; best_u = u; }
        }
        parent[best_u] = par;
        std::vector<int> rest;
        for (int v : set)
            if (v != best_u) rest.push_back(v);
        for (auto& comp : components_of(rest)) {
            stack_sets.push_back(std::move(comp));
            stack_parent.push_back(best_u);
        }
    }
    return validate_extension(web, parent);
}

inline TreeExtension best_extension(const FoodWeb& web, int exact_cap = 14) {
    if (web.n <= exact_cap) return exact_extension(web, exact_cap);
    return heuristic_extension(web);
}

// Reroots an extension for a transformed instance: the super source becomes
// the root with the old root as its only child.
inline TreeExtension lift_extension(const TreeExtension& ext, const FoodWeb& transformed_web,
                                    int super_source) {
    std::vector<int> parent(transformed_web.n, -1);
    for (int v = 0; v < (int)ext.parent.size(); ++v) parent[v] = ext.parent[v];
    parent[ext.root] = super_source;
    parent[super_source] = -1;
    return validate_extension(transformed_web, parent);
}

} // namespace vipd
