#pragma once

#include <optional>
#include <vector>

#include "vipd/bitset.hpp"
#include "vipd/model.hpp"

namespace vipd {

struct ViabilityVerdict {
    bool viable = true;
    std::optional<int> first_violator;  // smallest taxon index that fails
    std::optional<Rational> deficit;    // 1 - achieved incoming weight
};

// gamma-viability: every non-source member receives incoming weight >= 1 from
// members. Sources are exempt. Exact rational comparison throughout.
inline ViabilityVerdict is_gamma_viable(const FoodWeb& web, const TaxonSet& a) {
    for (int x = 0; x < web.n; ++x) {
        if (!a.test(x) || web.is_source(x)) continue;
        Rational got(0);
        for (int e : web.prey_edges[x])
            if (a.test(web.edges[e].prey)) got += web.edges[e].gamma;
        if (got < Rational(1)) return {false, x, Rational(1) - got};
    }
    return {};
}

inline ViabilityVerdict is_gamma_viable(const FoodWeb& web, const std::vector<int>& a) {
    return is_gamma_viable(web, TaxonSet::of(web.n, a));
}

// Part-viability: edges in phi count as granted prey regardless of
// membership; an edge qualifying both ways is counted once.
inline ViabilityVerdict is_part_gamma_viable(const FoodWeb& web, const TaxonSet& a,
                                             const std::vector<char>& phi) {
    for (int x = 0; x < web.n; ++x) {
        if (!a.test(x) || web.is_source(x)) continue;
        Rational got(0);
        for (int e : web.prey_edges[x])
            if (a.test(web.edges[e].prey) || phi[e]) got += web.edges[e].gamma;
        if (got < Rational(1)) return {false, x, Rational(1) - got};
    }
    return {};
}

inline ViabilityVerdict is_part_gamma_viable(const FoodWeb& web, const std::vector<int>& a,
                                             const std::vector<int>& phi_edges) {
    std::vector<char> phi(web.edges.size(), 0);
    for (int e : phi_edges) phi[e] = 1;
    return is_part_gamma_viable(web, TaxonSet::of(web.n, a), phi);
}

// Iteratively deletes violators until the set is viable; the fixpoint is the
// unique maximal viable subset (support only shrinks as members leave).
inline TaxonSet viability_closure_hint(const FoodWeb& web, TaxonSet a) {
    for (;;) {
        auto v = is_gamma_viable(web, a);
        if (v.viable) return a;
        a.reset(*v.first_violator);
    }
}

} // namespace vipd
