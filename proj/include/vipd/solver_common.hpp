#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vipd/color_family.hpp"

namespace vipd {

constexpr std::int64_t kInf = (std::int64_t)1 << 62;
constexpr std::int64_t kNegInf = -((std::int64_t)1 << 62);

inline std::int64_t sat_add(std::int64_t a, std::int64_t b) {
    if (a >= kInf || b >= kInf) return kInf;
    if (a <= kNegInf || b <= kNegInf) return kNegInf;
    return a + b;
}

struct SolveOutcome {
    bool yes = false;
    std::optional<std::vector<int>> witness; // taxon indices, kept set S
    std::int64_t achieved_pd = -1;
    std::string algorithm;
    int colors = 0;
    std::size_t family_size = 0;
    std::string family_kind = "none";
    std::size_t members_tried = 0;
    int width = -1;
    std::uint64_t seed = 0;
    std::int64_t elapsed_ms = 0;
};

} // namespace vipd
