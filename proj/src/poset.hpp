#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bitset.hpp"
#include "error.hpp"

namespace bpop {

// Fixed universe of action names; index order is the canonical element order.
class ActionCatalog {
public:
    ActionCatalog() = default;
    explicit ActionCatalog(std::vector<std::string> names);

    int size() const { return int(names_.size()); }
    const std::string& name(int i) const { return names_[i]; }
    const std::vector<std::string>& names() const { return names_; }

    // Errc::unknown_action if absent.
    int index(const std::string& name) const;
    int find(const std::string& name) const; // -1 if absent

    bool operator==(const ActionCatalog& o) const { return names_ == o.names_; }

private:
    std::vector<std::string> names_;
};

struct CoverGraph {
    int m = 0;
    std::vector<std::pair<int, int>> edges; // sorted (i,j), i precedes j
};

// Strict partial order on {0..m-1}, stored as its transitive closure.
// Instances are immutable and always satisfy irreflexivity + transitivity;
// construct via transitive_closure / dominance_order / from_cover.
class Poset {
public:
    Poset() = default;
    explicit Poset(int m); // empty order

    int m() const { return m_; }
    bool precedes(int i, int j) const { return succ_[i].test(j); } // i > j in the order sense "i before j"
    const Bits& successors(int i) const { return succ_[i]; }
    const Bits& predecessors(int i) const { return pred_[i]; }
    const std::vector<int>& successor_list(int i) const { return succ_list_[i]; }
    const std::vector<int>& predecessor_list(int i) const { return pred_list_[i]; }

    int relation_size() const; // |{(i,j): i ≻ j}|

    Bits frontier(const Bits& remaining) const;
    std::vector<int> frontier_list(const Bits& remaining) const;

    // S(a) = number of b in remaining, b != a, with a ≻ b.
    int descendant_count(int a, const Bits& remaining) const;

    // Does seq (distinct element ids) order its own induced subposet consistently?
    bool is_linear_extension(const std::vector<int>& seq) const;

    CoverGraph reduction() const;
    std::vector<std::pair<int, int>> closure_edges() const; // sorted
    std::vector<std::pair<int, int>> incomparable_pairs() const; // i<j, sorted

    bool operator==(const Poset& o) const;

    // Closure of an arbitrary irreflexive relation; Errc::cycle when the
    // closure would force i ≻ i.
    static Poset transitive_closure(int m, const std::vector<std::pair<int, int>>& rel);
    static Poset from_cover(const CoverGraph& g);
    // h[i][j] = 1 iff U[i][k] > U[j][k] for every column k (ties break the pair).
    static Poset dominance_order(const std::vector<std::vector<double>>& U);

private:
    void finish(); // builds pred_, adjacency lists; asserts invariants
    int m_ = 0;
    std::vector<Bits> succ_;
    std::vector<Bits> pred_;
    std::vector<std::vector<int>> succ_list_;
    std::vector<std::vector<int>> pred_list_;
};

// Exact linear-extension count of the subposet induced by elems, by
// recursion over minimal elements with a bitmask memo. elems.size() > cap is
// Errc::too_large (default cap 20; memo keys require <= 64, counts can
// overflow uint64 past 20 on sparse orders, which is also reported as
// too_large).
inline constexpr int kDefaultLeCap = 20;

class LeCounter {
public:
    LeCounter(const Poset& p, std::vector<int> elems, int cap = kDefaultLeCap);

    int n() const { return int(elems_.size()); }
    uint64_t full_mask() const { return n() == 64 ? ~uint64_t(0) : ((uint64_t(1) << n()) - 1); }
    // Count extensions of the sub-subposet given by mask (bits index elems_).
    uint64_t count(uint64_t mask);
    // Extensions of mask that start with local element x (bit position in mask).
    uint64_t count_starting_with(uint64_t mask, int x);

private:
    std::vector<int> elems_;
    std::vector<uint64_t> pred_mask_; // predecessors within elems_, local bits
    std::vector<uint64_t> dense_;     // memo indexed by mask when n fits
    std::unordered_map<uint64_t, uint64_t> sparse_;
    bool use_dense_ = false;
};

uint64_t count_linear_extensions(const Poset& p, int cap = kDefaultLeCap);
uint64_t count_linear_extensions(const Poset& p, const std::vector<int>& elems, int cap = kDefaultLeCap);

} // namespace bpop
