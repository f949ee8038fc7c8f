#pragma once

#include "poset.hpp"
#include "trace.hpp"

namespace bpop {

struct WeightedEdge {
    int from = 0;
    int to = 0;
    double weight = 0.0;
};

// While the digraph has a cycle (DFS from the lowest-indexed node, neighbors
// in ascending order), drop the lightest edge on the found cycle; then close
// transitively and reduce.
CoverGraph cycle_break_and_cover(int m, std::vector<WeightedEdge> edges);

// Pairwise precedence vote: edge i->j when C_ij/T_ij > tau and beats the
// reverse direction; weight |p - 0.5|; repaired and closed.
Poset majority_baseline(const TraceSet& ts, double tau = 0.5);

// Immediate-succession dependency measure D(a,b) =
// (c(a,b) - c(b,a)) / (c(a,b) + c(b,a) + 1); edge when D >= delta.
Poset heuristics_baseline(const TraceSet& ts, double delta = 0.5);

} // namespace bpop
