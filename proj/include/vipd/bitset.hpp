#pragma once

#include <cstdint>
#include <vector>

namespace vipd {

// Fixed-size dynamic bitset over taxon indices. Keeps the solvers free of a
// 64-taxon ceiling without dragging in boost.
class TaxonSet {
public:
    TaxonSet() = default;
    explicit TaxonSet(int n) : n_(n), w_((n + 63) / 64, 0) {}

    int size() const { return n_; }
    void set(int i) { w_[i >> 6] |= (std::uint64_t)1 << (i & 63); }
    void reset(int i) { w_[i >> 6] &= ~((std::uint64_t)1 << (i & 63)); }
    bool test(int i) const { return (w_[i >> 6] >> (i & 63)) & 1; }

    int count() const {
        int c = 0;
        for (auto x : w_) c += __builtin_popcountll(x);
        return c;
    }
    bool any() const {
        for (auto x : w_) if (x) return true;
        return false;
    }
    bool intersects(const TaxonSet& o) const {
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & o.w_[i]) return true;
        return false;
    }
    bool is_subset_of(const TaxonSet& o) const {
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & ~o.w_[i]) return false;
        return true;
    }
    TaxonSet& operator|=(const TaxonSet& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
        return *this;
    }
    TaxonSet& operator&=(const TaxonSet& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
        return *this;
    }
    bool operator==(const TaxonSet& o) const { return n_ == o.n_ && w_ == o.w_; }

    std::vector<int> members() const {
        std::vector<int> out;
        for (int i = 0; i < n_; ++i)
            if (test(i)) out.push_back(i);
        return out;
    }
    static TaxonSet of(int n, const std::vector<int>& idx) {
        TaxonSet s(n);
        for (int i : idx) s.set(i);
        return s;
    }

private:
    int n_ = 0;
    std::vector<std::uint64_t> w_;
};

} // namespace vipd
