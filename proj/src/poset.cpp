#include "poset.hpp"

#include <cassert>
#include <unordered_set>

namespace bpop {

ActionCatalog::ActionCatalog(std::vector<std::string> names) : names_(std::move(names)) {
    std::unordered_set<std::string> seen;
    for (const auto& n : names_) {
        if (n.empty()) fail(Errc::schema, "catalog: empty action name");
        if (!seen.insert(n).second) fail(Errc::schema, "catalog: duplicate action name '" + n + "'");
    }
}

int ActionCatalog::find(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
        if (names_[i] == name) return i;
    return -1;
}

int ActionCatalog::index(const std::string& name) const {
    int i = find(name);
    if (i < 0) fail(Errc::unknown_action, "unknown action '" + name + "'");
    return i;
}

Poset::Poset(int m) : m_(m), succ_(m, Bits(m)) { finish(); }

void Poset::finish() {
    pred_.assign(m_, Bits(m_));
    succ_list_.assign(m_, {});
    pred_list_.assign(m_, {});
    for (int i = 0; i < m_; ++i) {
        assert(!succ_[i].test(i));
        succ_[i].for_each([&](int j) {
            pred_[j].set(i);
            succ_list_[i].push_back(j);
            pred_list_[j].push_back(i);
        });
    }
#ifndef NDEBUG
    for (int i = 0; i < m_; ++i)
        succ_[i].for_each([&](int j) {
            succ_[j].for_each([&](int k) { assert(succ_[i].test(k)); });
        });
#endif
}

int Poset::relation_size() const {
    int n = 0;
    for (int i = 0; i < m_; ++i) n += succ_[i].count();
    return n;
}

Bits Poset::frontier(const Bits& remaining) const {
    Bits f(m_);
    remaining.for_each([&](int a) {
        if (!pred_[a].intersects(remaining)) f.set(a);
    });
    return f;
}

std::vector<int> Poset::frontier_list(const Bits& remaining) const {
    std::vector<int> f;
    remaining.for_each([&](int a) {
        if (!pred_[a].intersects(remaining)) f.push_back(a);
    });
    return f;
}

int Poset::descendant_count(int a, const Bits& remaining) const {
    return succ_[a].count_and(remaining); // a itself never in succ_[a]
}

bool Poset::is_linear_extension(const std::vector<int>& seq) const {
    Bits remaining(m_);
    for (int a : seq) {
        if (a < 0 || a >= m_) fail(Errc::invalid_argument, "element id out of range");
        if (remaining.test(a)) fail(Errc::invalid_argument, "duplicate element in sequence");
        remaining.set(a);
    }
    for (int a : seq) {
        if (pred_[a].intersects(remaining)) return false;
        remaining.reset(a);
    }
    return true;
}

CoverGraph Poset::reduction() const {
    CoverGraph g;
    g.m = m_;
    for (int i = 0; i < m_; ++i)
        succ_[i].for_each([&](int j) {
            // (i,j) is a cover edge iff no k with i ≻ k ≻ j
            if (!succ_[i].intersects(pred_[j])) g.edges.emplace_back(i, j);
        });
    return g;
}

std::vector<std::pair<int, int>> Poset::closure_edges() const {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < m_; ++i)
        succ_[i].for_each([&](int j) { e.emplace_back(i, j); });
    return e;
}

std::vector<std::pair<int, int>> Poset::incomparable_pairs() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < m_; ++i)
        for (int j = i + 1; j < m_; ++j)
            if (!succ_[i].test(j) && !succ_[j].test(i)) out.emplace_back(i, j);
    return out;
}

bool Poset::operator==(const Poset& o) const {
    return m_ == o.m_ && succ_ == o.succ_;
}

Poset Poset::transitive_closure(int m, const std::vector<std::pair<int, int>>& rel) {
    Poset p;
    p.m_ = m;
    p.succ_.assign(m, Bits(m));
    for (auto [i, j] : rel) {
        if (i < 0 || i >= m || j < 0 || j >= m) fail(Errc::invalid_argument, "relation index out of range");
        if (i == j) fail(Errc::cycle, "relation is reflexive at element " + std::to_string(i));
        p.succ_[i].set(j);
    }
    // Warshall over bitset rows
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i)
            if (p.succ_[i].test(k)) p.succ_[i] |= p.succ_[k];
    for (int i = 0; i < m; ++i)
        if (p.succ_[i].test(i))
            for (int j = 0; j < m; ++j)
                if (i != j && p.succ_[i].test(j) && p.succ_[j].test(i))
                    fail(Errc::cycle, "cycle through elements " + std::to_string(i) + " and " + std::to_string(j));
    for (int i = 0; i < m; ++i)
        if (p.succ_[i].test(i)) fail(Errc::cycle, "cycle at element " + std::to_string(i));
    p.finish();
    return p;
}

Poset Poset::from_cover(const CoverGraph& g) { return transitive_closure(g.m, g.edges); }

Poset Poset::dominance_order(const std::vector<std::vector<double>>& U) {
    int m = int(U.size());
    size_t K = m ? U[0].size() : 0;
    Poset p;
    p.m_ = m;
    p.succ_.assign(m, Bits(m));
    for (int i = 0; i < m; ++i) {
        if (U[i].size() != K) fail(Errc::invalid_argument, "embedding rows differ in width");
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            bool dom = K > 0;
            for (size_t k = 0; k < K; ++k)
                if (!(U[i][k] > U[j][k])) { dom = false; break; }
            if (dom) p.succ_[i].set(j);
        }
    }
    p.finish(); // strict dominance is transitive and irreflexive by construction
    return p;
}

LeCounter::LeCounter(const Poset& p, std::vector<int> elems, int cap) : elems_(std::move(elems)) {
    int n = int(elems_.size());
    if (cap > 64) cap = 64;
    if (n > cap)
        fail(Errc::too_large, "linear extension count over " + std::to_string(n) +
                                  " elements exceeds cap " + std::to_string(cap));
    pred_mask_.assign(n, 0);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (a != b && p.precedes(elems_[b], elems_[a])) pred_mask_[a] |= uint64_t(1) << b;
    use_dense_ = n <= 20;
    if (use_dense_) dense_.assign(size_t(1) << n, 0);
}

uint64_t LeCounter::count(uint64_t mask) {
    if (mask == 0) return 1;
    if (use_dense_) {
        if (uint64_t v = dense_[mask]) return v;
    } else if (auto it = sparse_.find(mask); it != sparse_.end()) {
        return it->second;
    }
    uint64_t total = 0;
    uint64_t rest = mask;
    while (rest) {
        int x = std::countr_zero(rest);
        rest &= rest - 1;
        if (pred_mask_[x] & mask) continue; // not minimal
        uint64_t sub = count(mask & ~(uint64_t(1) << x));
        if (__builtin_add_overflow(total, sub, &total))
            fail(Errc::too_large, "linear extension count overflows 64 bits");
    }
    if (use_dense_) dense_[mask] = total;
    else sparse_[mask] = total;
    return total;
}

uint64_t LeCounter::count_starting_with(uint64_t mask, int x) {
    uint64_t bit = uint64_t(1) << x;
    if (!(mask & bit)) fail(Errc::invalid_argument, "element not in remaining set");
    if (pred_mask_[x] & mask) return 0; // not minimal, no extension starts here
    return count(mask & ~bit);
}

uint64_t count_linear_extensions(const Poset& p, int cap) {
    std::vector<int> all(p.m());
    for (int i = 0; i < p.m(); ++i) all[i] = i;
    return count_linear_extensions(p, all, cap);
}

uint64_t count_linear_extensions(const Poset& p, const std::vector<int>& elems, int cap) {
    LeCounter c(p, elems, cap);
    return c.count(c.full_mask());
}

} // namespace bpop
