#pragma once

#include <bit>
#include <cstdint>
#include <cstddef>
#include <vector>

namespace bpop {

// Fixed-capacity bitset sized at runtime. Rows of the relation matrix use
// this; m is small (tens) so everything stays word-local.
class Bits {
public:
    Bits() = default;
    explicit Bits(int n) : n_(n), w_((n + 63) / 64, 0) {}

    int size() const { return n_; }

    bool test(int i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
    void set(int i) { w_[i >> 6] |= uint64_t(1) << (i & 63); }
    void reset(int i) { w_[i >> 6] &= ~(uint64_t(1) << (i & 63)); }

    void clear() { for (auto& w : w_) w = 0; }

    int count() const {
        int c = 0;
        for (auto w : w_) c += std::popcount(w);
        return c;
    }

    bool any() const {
        for (auto w : w_) if (w) return true;
        return false;
    }

    bool intersects(const Bits& o) const {
        for (size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & o.w_[i]) return true;
        return false;
    }

    int count_and(const Bits& o) const {
        int c = 0;
        for (size_t i = 0; i < w_.size(); ++i) c += std::popcount(w_[i] & o.w_[i]);
        return c;
    }

    Bits& operator|=(const Bits& o) {
        for (size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
        return *this;
    }

    Bits& operator&=(const Bits& o) {
        for (size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
        return *this;
    }

    bool operator==(const Bits& o) const { return n_ == o.n_ && w_ == o.w_; }

    // Visits set bit positions in ascending order.
    template <typename F>
    void for_each(F&& f) const {
        for (size_t wi = 0; wi < w_.size(); ++wi) {
            uint64_t w = w_[wi];
            while (w) {
                int b = std::countr_zero(w);
                f(int(wi * 64 + b));
                w &= w - 1;
            }
        }
    }

private:
    int n_ = 0;
    std::vector<uint64_t> w_;
};

} // namespace bpop
