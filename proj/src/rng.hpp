#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace bpop {

// mt19937_64 with hand-rolled variate transforms. std::*_distribution output
// is implementation-defined, which would break byte-identical rerun
// guarantees across toolchains; these transforms pin the stream.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t raw() { return gen_(); }

    // uniform on [0,1)
    double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }

    // uniform on [lo,hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // unbiased integer in [0,n)
    uint64_t below(uint64_t n) {
        uint64_t mask = ~uint64_t(0);
        if (n == 0) return 0;
        uint64_t lim = mask - mask % n;
        uint64_t x;
        do { x = gen_(); } while (x >= lim);
        return x % n;
    }

    // standard normal, Marsaglia polar with one cached value
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double r = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * r;
        has_spare_ = true;
        return u * r;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace bpop
