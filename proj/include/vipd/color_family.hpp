#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "vipd/errors.hpp"

namespace vipd {

enum class FamilyMode { Deterministic, MonteCarlo };

inline const char* family_mode_name(FamilyMode m) {
    return m == FamilyMode::Deterministic ? "det" : "mc";
}

// A set of colorings of [q] into [n_colors]. deterministic-verified families
// are exhaustively certified perfect hash families: every subset of size
// <= n_colors is injectively colored by some member. deterministic-product is
// reserved for a composed construction and is never produced here.
struct ColoringFamily {
    enum class Kind { DeterministicVerified, DeterministicProduct, MonteCarlo };

    int q = 0;
    int n_colors = 0;
    Kind kind = Kind::DeterministicVerified;
    double fail_prob = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::vector<std::uint16_t>> members;

    const char* kind_name() const {
        switch (kind) {
            case Kind::DeterministicVerified: return "det-verified";
            case Kind::DeterministicProduct: return "det-product";
            case Kind::MonteCarlo: return "monte-carlo";
        }
        return "?";
    }
};

inline unsigned long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    unsigned long long r = 1;
    for (int i = 1; i <= k; ++i) {
        unsigned long long num = (unsigned long long)(n - k + i);
        // r * num never overflows for the sizes the deterministic cap admits
        if (r > ~0ull / num) throw InfeasibleError("binomial overflow");
        r = r * num / i;
    }
    return r;
}

// Member count for the Monte-Carlo mode: smallest t with
// C(q,N) * (1 - N!/N^N)^t <= fail_prob.
inline long long mc_member_count(int q, int n_colors, double fail_prob) {
    if (fail_prob <= 0 || fail_prob >= 1) throw InputError("fail_prob must be in (0,1)");
    if (n_colors <= 1) return 1;
    long double ln_c;
    if (q <= 60) {
        ln_c = std::log((long double)binomial(q, n_colors));
    } else {
        ln_c = std::lgamma((long double)q + 1) - std::lgamma((long double)n_colors + 1) -
               std::lgamma((long double)(q - n_colors) + 1);
    }
    long double p = 1.0L;
    for (int i = 1; i <= n_colors; ++i) p *= (long double)i / n_colors; // N!/N^N
    long double t = (ln_c - std::log((long double)fail_prob)) / -std::log1p(-p);
    long long out = (long long)std::ceil(t);
    return out < 1 ? 1 : out;
}

namespace detail {

// True iff f is injective on the positions listed in subset.
inline bool injective_on(const std::vector<std::uint16_t>& f, const std::vector<int>& subset) {
    std::uint32_t seen = 0;
    for (int i : subset) {
        std::uint32_t bit = (std::uint32_t)1 << f[i];
        if (seen & bit) return false;
        seen |= bit;
    }
    return true;
}

template <typename Fn>
inline void for_each_subset(int q, int k, Fn&& fn) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    for (;;) {
        fn(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == q - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

} // namespace detail

// Exhaustive certification over all n_colors-subsets of [q].
inline bool family_is_perfect(const ColoringFamily& fam) {
    if (fam.q <= fam.n_colors) {
        // a single injective member suffices; check it
        for (const auto& m : fam.members) {
            std::vector<int> all(fam.q);
            for (int i = 0; i < fam.q; ++i) all[i] = i;
            if (detail::injective_on(m, all)) return true;
        }
        return false;
    }
    bool ok = true;
    detail::for_each_subset(fam.q, fam.n_colors, [&](const std::vector<int>& subset) {
        if (!ok) return;
        for (const auto& m : fam.members)
            if (detail::injective_on(m, subset)) return;
        ok = false;
    });
    return ok;
}

inline ColoringFamily build_family(int q, int n_colors, FamilyMode mode, double fail_prob,
                                   std::uint64_t seed,
                                   unsigned long long det_cap = 1ull << 21) {
    if (q < 1) throw InputError("family needs q >= 1");
    if (n_colors < 0) throw InputError("family needs n_colors >= 0");
    ColoringFamily fam;
    fam.q = q;
    fam.n_colors = n_colors;
    fam.seed = seed;
    fam.fail_prob = fail_prob;

    if (q <= n_colors) {
        // identity coloring is injective everywhere
        std::vector<std::uint16_t> ident(q);
        for (int i = 0; i < q; ++i) ident[i] = (std::uint16_t)i;
        fam.members.push_back(std::move(ident));
        fam.kind = ColoringFamily::Kind::DeterministicVerified;
        return fam;
    }
    if (n_colors == 0) throw InfeasibleError("0 colors with q >= 1 cannot be perfect");

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> color(0, n_colors - 1);
    auto random_member = [&]() {
        std::vector<std::uint16_t> m(q);
        for (int i = 0; i < q; ++i) m[i] = (std::uint16_t)color(rng);
        return m;
    };

    if (mode == FamilyMode::MonteCarlo) {
        long long t = mc_member_count(q, n_colors, fail_prob);
        fam.members.reserve((std::size_t)t);
        for (long long i = 0; i < t; ++i) fam.members.push_back(random_member());
        fam.kind = ColoringFamily::Kind::MonteCarlo;
        return fam;
    }

    unsigned long long subsets = binomial(q, n_colors);
    if (subsets > det_cap)
        throw InfeasibleError("deterministic family infeasible at q=" + std::to_string(q) +
                              ", N=" + std::to_string(n_colors) + " (" + std::to_string(subsets) +
                              " subsets); use monte-carlo");

    // Draw a random member, then extend: for each uncovered subset add a
    // member injective on it by construction. Coverage is tracked per subset
    // rank so each member is tested against each subset once.
    std::vector<char> covered(subsets, 0);
    std::vector<int> palette(n_colors);
    for (int i = 0; i < n_colors; ++i) palette[i] = i;
    auto absorb = [&](const std::vector<std::uint16_t>& m) {
        std::size_t rank = 0, first_uncovered = subsets;
        detail::for_each_subset(q, n_colors, [&](const std::vector<int>& subset) {
            if (!covered[rank] && detail::injective_on(m, subset)) covered[rank] = 1;
            if (!covered[rank] && first_uncovered == subsets) {
                first_uncovered = rank;
            }
            ++rank;
        });
        return first_uncovered;
    };
    std::size_t pending = absorb(fam.members.emplace_back(random_member()));
    while (pending != subsets) {
        // materialize the pending subset by rank
        std::vector<int> target;
        std::size_t rank = 0;
        detail::for_each_subset(q, n_colors, [&](const std::vector<int>& subset) {
            if (rank == pending) target = subset;
            ++rank;
        });
        auto m = random_member();
        std::shuffle(palette.begin(), palette.end(), rng);
        for (int i = 0; i < n_colors; ++i) m[target[i]] = (std::uint16_t)palette[i];
        pending = absorb(fam.members.emplace_back(std::move(m)));
    }
    fam.kind = ColoringFamily::Kind::DeterministicVerified;
    return fam;
}

// Applies a member to an ordered edge list: edge j gets color f(j).
inline std::vector<int> color_edges(const std::vector<std::uint16_t>& member, int edge_count) {
    if ((int)member.size() != edge_count)
        throw InputError("coloring member size does not match the edge count");
    std::vector<int> colors(edge_count);
    for (int i = 0; i < edge_count; ++i) colors[i] = member[i];
    return colors;
}

} // namespace vipd
