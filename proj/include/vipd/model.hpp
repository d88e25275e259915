#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "vipd/errors.hpp"
#include "vipd/rational.hpp"

namespace vipd {

constexpr std::int64_t kMaxTotalWeight = (std::int64_t)1 << 62;

enum class VertexKind { Root, TreeVertex, Reticulation, Leaf };

struct NetworkEdge {
    int tail = -1;
    int head = -1;
    std::int64_t weight = 0;
};

// Rooted weighted DAG; leaves are the taxa. Vertex ids are dense ints in
// first-seen input order, names are the opaque input tokens.
struct PhyloNetwork {
    std::vector<std::string> names;
    std::vector<NetworkEdge> edges;
    std::vector<VertexKind> kind;
    std::vector<std::vector<int>> out_edges; // edge ids, input order
    std::vector<std::vector<int>> in_edges;
    int root = -1;
    std::vector<int> taxa;        // leaf vertex ids, input order
    std::vector<int> taxon_index; // vertex -> index into taxa, or -1
    std::int64_t total_weight = 0;

    int vertex_count() const { return (int)names.size(); }
    int edge_count() const { return (int)edges.size(); }
    int taxon_count() const { return (int)taxa.size(); }

    bool is_tree() const {
        for (auto k : kind)
            if (k == VertexKind::Reticulation) return false;
        return true;
    }
    // Edge classes follow the head vertex. Reticulation edges enter
    // reticulations; everything else counts as a tree edge here. Internal
    // tree edges (head is a non-leaf tree vertex) are the colored class the
    // kH machinery works with; leaf-incoming edges carry no color.
    bool is_reticulation_edge(int e) const {
        return kind[edges[e].head] == VertexKind::Reticulation;
    }
    bool is_tree_edge(int e) const { return !is_reticulation_edge(e); }
    bool is_internal_tree_edge(int e) const {
        return kind[edges[e].head] == VertexKind::TreeVertex;
    }
    int tree_edge_count() const {
        int c = 0;
        for (int e = 0; e < edge_count(); ++e) c += is_tree_edge(e);
        return c;
    }
    int reticulation_edge_count() const { return edge_count() - tree_edge_count(); }
    int internal_tree_edge_count() const {
        int c = 0;
        for (int e = 0; e < edge_count(); ++e) c += is_internal_tree_edge(e);
        return c;
    }
    int in_edge_of_leaf(int v) const { return in_edges[v][0]; }

    std::vector<std::string> taxa_names() const {
        std::vector<std::string> out;
        out.reserve(taxa.size());
        for (int v : taxa) out.push_back(names[v]);
        return out;
    }
};

struct WebEdge {
    int prey = -1;
    int predator = -1;
    Rational gamma;
};

// DAG on the taxa, edges prey -> predator with exact gamma in [0,1].
struct FoodWeb {
    int n = 0;
    std::vector<std::string> names; // taxon index -> name (network taxa order)
    std::vector<WebEdge> edges;
    std::vector<std::vector<int>> prey_edges; // incoming edge ids per taxon
    std::vector<std::vector<int>> pred_edges; // outgoing edge ids per taxon
    std::vector<int> sources;                 // ascending taxon indices

    bool is_source(int t) const { return prey_edges[t].empty(); }
    int taxon_by_name(const std::string& s) const {
        for (int i = 0; i < n; ++i)
            if (names[i] == s) return i;
        return -1;
    }
    void rebuild_adjacency() {
        prey_edges.assign(n, {});
        pred_edges.assign(n, {});
        sources.clear();
        for (int e = 0; e < (int)edges.size(); ++e) {
            prey_edges[edges[e].predator].push_back(e);
            pred_edges[edges[e].prey].push_back(e);
        }
        for (int t = 0; t < n; ++t)
            if (prey_edges[t].empty()) sources.push_back(t);
    }
};

enum class ViabilityMode { Gamma, Epsilon, One };

inline const char* viability_mode_name(ViabilityMode m) {
    switch (m) {
        case ViabilityMode::Gamma: return "gamma";
        case ViabilityMode::Epsilon: return "epsilon";
        case ViabilityMode::One: return "one";
    }
    return "?";
}

struct Instance {
    PhyloNetwork network;
    FoodWeb web;
    long long k = 0;
    std::int64_t d = 0;
    ViabilityMode mode = ViabilityMode::Gamma;

    bool super_source_added = false;
    int super_source_taxon = -1; // taxon index in the transformed web

    long long kbar() const { return (long long)web.n - k; }
    std::int64_t dbar() const { return network.total_weight - d; }
};

// ---------------------------------------------------------------------------
// Line-oriented tokenizer shared by the three file formats.

namespace detail {

struct Token {
    std::string text;
    int col = 0;
};

struct Record {
    int line = 0;
    std::vector<Token> tokens;
};

inline std::vector<Record> tokenize(const std::string& text) {
    std::vector<Record> records;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
        pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        Record rec;
        rec.line = line_no;
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
            std::size_t start = i;
            while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
            if (i > start) rec.tokens.push_back({line.substr(start, i - start), (int)start + 1});
        }
        if (!rec.tokens.empty()) records.push_back(std::move(rec));
    }
    return records;
}

inline std::int64_t parse_weight(const Token& t, int line) {
    for (char c : t.text)
        if (c < '0' || c > '9')
            throw ParseError("weight must be a positive integer, got '" + t.text + "'", line, t.col);
    if (t.text.size() > 18) throw ParseError("weight too large '" + t.text + "'", line, t.col);
    std::int64_t v = 0;
    for (char c : t.text) v = v * 10 + (c - '0');
    if (v < 1) throw ParseError("weight must be >= 1, got '" + t.text + "'", line, t.col);
    return v;
}

} // namespace detail

// ---------------------------------------------------------------------------
// NETWORK format

inline void validate_network(PhyloNetwork& net) {
    int nv = net.vertex_count();
    if (net.edges.empty()) throw ValidationError("network has no edges");

    for (int e = 0; e < net.edge_count(); ++e) {
        const auto& ed = net.edges[e];
        if (ed.tail == ed.head)
            throw ValidationError("self-loop at vertex '" + net.names[ed.tail] + "'");
        for (int f = e + 1; f < net.edge_count(); ++f)
            if (net.edges[f].tail == ed.tail && net.edges[f].head == ed.head)
                throw ValidationError("duplicate edge '" + net.names[ed.tail] + "' -> '" +
                                      net.names[ed.head] + "'");
    }

    net.out_edges.assign(nv, {});
    net.in_edges.assign(nv, {});
    for (int e = 0; e < net.edge_count(); ++e) {
        net.out_edges[net.edges[e].tail].push_back(e);
        net.in_edges[net.edges[e].head].push_back(e);
    }

    net.root = -1;
    for (int v = 0; v < nv; ++v) {
        if (net.in_edges[v].empty()) {
            if (net.root != -1)
                throw ValidationError("two roots: '" + net.names[net.root] + "' and '" +
                                      net.names[v] + "'");
            net.root = v;
        }
    }
    if (net.root == -1) throw ValidationError("no root: every vertex has an incoming edge (cycle)");

    // Kahn topological check; names a vertex on a cycle if one exists.
    {
        std::vector<int> indeg(nv);
        for (int v = 0; v < nv; ++v) indeg[v] = (int)net.in_edges[v].size();
        std::vector<int> stack{net.root};
        int seen = 0;
        std::vector<char> done(nv, 0);
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            done[v] = 1;
            ++seen;
            for (int e : net.out_edges[v])
                if (--indeg[net.edges[e].head] == 0) stack.push_back(net.edges[e].head);
        }
        if (seen != nv) {
            for (int v = 0; v < nv; ++v)
                if (!done[v])
                    throw ValidationError("cycle through vertex '" + net.names[v] + "'");
        }
    }

    net.kind.assign(nv, VertexKind::TreeVertex);
    net.taxa.clear();
    net.taxon_index.assign(nv, -1);
    for (int v = 0; v < nv; ++v) {
        int in = (int)net.in_edges[v].size();
        int out = (int)net.out_edges[v].size();
        if (v == net.root) {
            net.kind[v] = VertexKind::Root;
            if (out == 0) throw ValidationError("root '" + net.names[v] + "' has no outgoing edges");
        } else if (out == 0) {
            if (in != 1)
                throw ValidationError("leaf '" + net.names[v] + "' must have in-degree 1, has " +
                                      std::to_string(in));
            net.kind[v] = VertexKind::Leaf;
        } else if (in == 1 && out >= 2) {
            net.kind[v] = VertexKind::TreeVertex;
        } else if (in >= 2 && out == 1) {
            net.kind[v] = VertexKind::Reticulation;
        } else {
            throw ValidationError("vertex '" + net.names[v] + "' has in-degree " +
                                  std::to_string(in) + " and out-degree " + std::to_string(out) +
                                  "; must be a tree vertex (1, >=2) or reticulation (>=2, 1)");
        }
    }
    for (int v = 0; v < nv; ++v) {
        if (net.kind[v] == VertexKind::Leaf) {
            net.taxon_index[v] = (int)net.taxa.size();
            net.taxa.push_back(v);
        }
    }
    if (net.taxa.empty()) throw ValidationError("network has no taxa");

    net.total_weight = 0;
    for (const auto& e : net.edges) {
        net.total_weight += e.weight;
        if (net.total_weight > kMaxTotalWeight)
            throw ValidationError("total edge weight exceeds 2^62");
    }
}

inline PhyloNetwork parse_network(const std::string& text) {
    PhyloNetwork net;
    std::unordered_map<std::string, int> index;
    auto vertex = [&](const std::string& name) {
        auto it = index.find(name);
        if (it != index.end()) return it->second;
        int id = (int)net.names.size();
        index.emplace(name, id);
        net.names.push_back(name);
        return id;
    };
    for (const auto& rec : detail::tokenize(text)) {
        const auto& t = rec.tokens;
        if (t[0].text != "EDGE")
            throw ParseError("expected EDGE record, got '" + t[0].text + "'", rec.line, t[0].col);
        if (t.size() != 4)
            throw ParseError("EDGE needs <tail> <head> <weight>", rec.line, t[0].col);
        NetworkEdge e;
        e.tail = vertex(t[1].text);
        e.head = vertex(t[2].text);
        e.weight = detail::parse_weight(t[3], rec.line);
        net.edges.push_back(e);
    }
    validate_network(net);
    return net;
}

inline std::string serialize_network(const PhyloNetwork& net) {
    std::ostringstream os;
    os << "# network: " << net.taxon_count() << " taxa, " << net.edge_count() << " edges\n";
    for (const auto& e : net.edges)
        os << "EDGE " << net.names[e.tail] << " " << net.names[e.head] << " " << e.weight << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// FOODWEB format

inline void validate_foodweb(FoodWeb& web) {
    for (int e = 0; e < (int)web.edges.size(); ++e) {
        const auto& ed = web.edges[e];
        if (ed.prey == ed.predator)
            throw ValidationError("food web self-loop at '" + web.names[ed.prey] + "'");
        if (ed.gamma < Rational(0) || ed.gamma > Rational(1))
            throw ValidationError("gamma out of [0,1] on edge '" + web.names[ed.prey] + "' -> '" +
                                  web.names[ed.predator] + "'");
        for (int f = e + 1; f < (int)web.edges.size(); ++f)
            if (web.edges[f].prey == ed.prey && web.edges[f].predator == ed.predator)
                throw ValidationError("duplicate food web edge '" + web.names[ed.prey] + "' -> '" +
                                      web.names[ed.predator] + "'");
    }
    web.rebuild_adjacency();
    // cycle check
    std::vector<int> indeg(web.n);
    for (int t = 0; t < web.n; ++t) indeg[t] = (int)web.prey_edges[t].size();
    std::vector<int> stack;
    for (int t = 0; t < web.n; ++t)
        if (indeg[t] == 0) stack.push_back(t);
    int seen = 0;
    std::vector<char> done(web.n, 0);
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        done[v] = 1;
        ++seen;
        for (int e : web.pred_edges[v])
            if (--indeg[web.edges[e].predator] == 0) stack.push_back(web.edges[e].predator);
    }
    if (seen != web.n)
        for (int t = 0; t < web.n; ++t)
            if (!done[t]) throw ValidationError("food web cycle through '" + web.names[t] + "'");
}

inline FoodWeb parse_foodweb(const std::string& text, const std::vector<std::string>& taxa) {
    FoodWeb web;
    web.n = (int)taxa.size();
    web.names = taxa;
    std::unordered_map<std::string, int> index;
    for (int i = 0; i < web.n; ++i) index.emplace(taxa[i], i);
    for (const auto& rec : detail::tokenize(text)) {
        const auto& t = rec.tokens;
        if (t[0].text != "EDGE")
            throw ParseError("expected EDGE record, got '" + t[0].text + "'", rec.line, t[0].col);
        if (t.size() != 4)
            throw ParseError("EDGE needs <prey> <predator> <gamma>", rec.line, t[0].col);
        WebEdge e;
        auto it = index.find(t[1].text);
        if (it == index.end()) throw ParseError("unknown taxon '" + t[1].text + "'", rec.line, t[1].col);
        e.prey = it->second;
        it = index.find(t[2].text);
        if (it == index.end()) throw ParseError("unknown taxon '" + t[2].text + "'", rec.line, t[2].col);
        e.predator = it->second;
        try {
            e.gamma = Rational::parse(t[3].text);
        } catch (const ParseError& pe) {
            throw ParseError(pe.what(), rec.line, t[3].col);
        }
        web.edges.push_back(e);
    }
    validate_foodweb(web);
    return web;
}

inline std::string serialize_foodweb(const FoodWeb& web) {
    std::ostringstream os;
    os << "# food web: " << web.n << " taxa, " << web.edges.size() << " edges\n";
    for (const auto& e : web.edges)
        os << "EDGE " << web.names[e.prey] << " " << web.names[e.predator] << " "
           << e.gamma.str() << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------

inline FoodWeb derive_gamma(const FoodWeb& in, ViabilityMode mode) {
    if (mode == ViabilityMode::Gamma) return in;
    FoodWeb web = in;
    if (mode == ViabilityMode::Epsilon) {
        for (auto& e : web.edges) e.gamma = Rational(1);
    } else {
        for (auto& e : web.edges)
            e.gamma = Rational(1, (std::int64_t)in.prey_edges[e.predator].size());
    }
    web.rebuild_adjacency();
    return web;
}

inline Instance make_instance(PhyloNetwork net, FoodWeb web, long long k, std::int64_t d,
                              ViabilityMode mode) {
    if ((int)web.n != net.taxon_count())
        throw InputError("food web taxa do not match network taxa");
    if (k < 0) throw InputError("k must be >= 0");
    if (k > net.taxon_count())
        throw InputError("k = " + std::to_string(k) + " exceeds the number of taxa " +
                         std::to_string(net.taxon_count()));
    if (d < 0) throw InputError("D must be >= 0");
    Instance inst;
    inst.network = std::move(net);
    inst.web = derive_gamma(web, mode);
    inst.k = k;
    inst.d = d;
    inst.mode = mode;
    return inst;
}

// Collapses a multi-source food web to a single source: a fresh taxon is hung
// under the network root with weight 1 and feeds every former source with a
// gamma=1 edge; k and D both grow by 1, which leaves kbar and dbar unchanged.
inline Instance ensure_single_source(const Instance& inst) {
    if (inst.web.sources.size() <= 1) return inst;
    Instance out = inst;

    std::string base = "s*";
    std::string name = base;
    auto taken = [&](const std::string& s) {
        for (const auto& n : out.network.names)
            if (n == s) return true;
        return false;
    };
    for (int suffix = 2; taken(name); ++suffix) name = base + std::to_string(suffix);

    PhyloNetwork& net = out.network;
    int v = (int)net.names.size();
    net.names.push_back(name);
    net.edges.push_back({net.root, v, 1});
    validate_network(net);

    FoodWeb& web = out.web;
    std::vector<int> old_sources = web.sources;
    int s = web.n;
    web.n += 1;
    web.names.push_back(name);
    for (int t : old_sources) web.edges.push_back({s, t, Rational(1)});
    validate_foodweb(web);

    out.k = inst.k + 1;
    out.d = inst.d + 1;
    out.super_source_added = true;
    out.super_source_taxon = s;
    return out;
}

// Maps a witness from a transformed instance back to the original taxa.
inline std::vector<int> strip_super_source(const Instance& transformed,
                                           const std::vector<int>& witness) {
    if (!transformed.super_source_added) return witness;
    std::vector<int> out;
    for (int t : witness)
        if (t != transformed.super_source_taxon) out.push_back(t);
    return out;
}

} // namespace vipd
