#pragma once

#include <queue>
#include <vector>

namespace vipd {

struct BipartiteGraph {
    int n_left = 0;
    int n_right = 0;
    std::vector<std::vector<int>> adj; // per left vertex: right neighbours

    BipartiteGraph() = default;
    BipartiteGraph(int nl, int nr) : n_left(nl), n_right(nr), adj(nl) {}
    void add_edge(int l, int r) { adj[l].push_back(r); }
};

inline const char* matching_algorithm() { return "hopcroft-karp"; }

// Maximum bipartite matching, Hopcroft-Karp (layered BFS + DFS augmentation).
// Returns match_left: left vertex -> right vertex or -1. Deterministic given
// adjacency order.
inline std::vector<int> max_matching(const BipartiteGraph& g) {
    const int kInfDist = INT32_MAX;
    std::vector<int> ml(g.n_left, -1), mr(g.n_right, -1), dist(g.n_left);

    auto bfs = [&]() {
        std::queue<int> q;
        bool reachable_free = false;
        for (int l = 0; l < g.n_left; ++l) {
            if (ml[l] == -1) {
                dist[l] = 0;
                q.push(l);
            } else {
                dist[l] = kInfDist;
            }
        }
        while (!q.empty()) {
            int l = q.front();
            q.pop();
            for (int r : g.adj[l]) {
                int l2 = mr[r];
                if (l2 == -1) {
                    reachable_free = true;
                } else if (dist[l2] == kInfDist) {
                    dist[l2] = dist[l] + 1;
                    q.push(l2);
                }
            }
        }
        return reachable_free;
    };
    std::function<bool(int)> dfs = [&](int l) {
        for (int r : g.adj[l]) {
            int l2 = mr[r];
            if (l2 == -1 || (dist[l2] == dist[l] + 1 && dfs(l2))) {
                ml[l] = r;
                mr[r] = l;
                return true;
            }
        }
        dist[l] = kInfDist;
        return false;
    };

    while (bfs()) {
        for (int l = 0; l < g.n_left; ++l)
            if (ml[l] == -1) dfs(l);
    }
    return ml;
}

inline int matching_size(const std::vector<int>& ml) {
    int c = 0;
    for (int r : ml) c += r != -1;
    return c;
}

inline bool saturates_left(const BipartiteGraph& g, const std::vector<int>& ml) {
    for (int l = 0; l < g.n_left; ++l)
        if (ml[l] == -1) return false;
    return true;
}

} // namespace vipd
