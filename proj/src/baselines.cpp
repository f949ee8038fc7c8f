#include "baselines.hpp"

#include <algorithm>

namespace bpop {

namespace {

// Returns indices (into edges) of one cycle, or empty if acyclic.
// Deterministic: DFS roots in ascending node order, neighbors ascending.
std::vector<int> find_cycle(int m, const std::vector<WeightedEdge>& edges,
                            const std::vector<char>& alive) {
    std::vector<std::vector<std::pair<int, int>>> adj(m); // (to, edge idx)
    for (int e = 0; e < int(edges.size()); ++e)
        if (alive[e]) adj[edges[e].from].emplace_back(edges[e].to, e);
    for (auto& a : adj) std::sort(a.begin(), a.end());

    std::vector<int> color(m, 0); // 0 white, 1 gray, 2 black
    std::vector<int> path_edge;   // edge stack along the gray path
    std::vector<int> path_node;
    std::vector<int> cycle;

    auto dfs = [&](auto&& self, int v) -> bool {
        color[v] = 1;
        path_node.push_back(v);
        for (auto [w, e] : adj[v]) {
            if (color[w] == 1) {
                // back edge: the cycle is the path suffix from w, plus e
                auto it = std::find(path_node.begin(), path_node.end(), w);
                size_t k = size_t(it - path_node.begin());
                for (size_t i = k; i + 1 < path_node.size(); ++i) cycle.push_back(path_edge[i]);
                cycle.push_back(e);
                return true;
            }
            if (color[w] == 0) {
                path_edge.push_back(e);
                if (self(self, w)) return true;
                path_edge.pop_back();
            }
        }
        path_node.pop_back();
        color[v] = 2;
        return false;
    };

    for (int v = 0; v < m; ++v) {
        if (color[v] != 0) continue;
        path_edge.clear();
        path_node.clear();
        if (dfs(dfs, v)) return cycle;
    }
    return {};
}

} // namespace

CoverGraph cycle_break_and_cover(int m, std::vector<WeightedEdge> edges) {
    std::vector<char> alive(edges.size(), 1);
    for (;;) {
        auto cycle = find_cycle(m, edges, alive);
        if (cycle.empty()) break;
        int victim = cycle[0];
        for (int e : cycle)
            if (edges[e].weight < edges[victim].weight) victim = e; // first minimum wins ties
        alive[victim] = 0;
    }
    std::vector<std::pair<int, int>> rel;
    for (int e = 0; e < int(edges.size()); ++e)
        if (alive[e]) rel.emplace_back(edges[e].from, edges[e].to);
    return Poset::transitive_closure(m, rel).reduction();
}

Poset majority_baseline(const TraceSet& ts, double tau) {
    if (!(tau >= 0.0 && tau < 1.0)) fail(Errc::invalid_argument, "tau must lie in [0,1)");
    int m = ts.catalog.size();
    std::vector<std::vector<int>> before(m, std::vector<int>(m, 0)); // C_ij: i observed before j
    std::vector<int> pos(m);
    for (const auto& t : ts.traces) {
        std::fill(pos.begin(), pos.end(), -1);
        for (size_t p = 0; p < t.actions.size(); ++p) pos[t.actions[p]] = int(p);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                if (i != j && pos[i] >= 0 && pos[j] >= 0 && pos[i] < pos[j]) ++before[i][j];
    }
    std::vector<WeightedEdge> edges;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            int t = before[i][j] + before[j][i]; // co-occurrence count
            if (t == 0) continue;
            double pij = double(before[i][j]) / double(t);
            double pji = double(before[j][i]) / double(t);
            if (pij > tau && pij > pji)
                edges.push_back({i, j, std::abs(pij - 0.5)});
        }
    return Poset::from_cover(cycle_break_and_cover(m, std::move(edges)));
}

Poset heuristics_baseline(const TraceSet& ts, double delta) {
    if (!(delta > 0.0 && delta <= 1.0)) fail(Errc::invalid_argument, "delta must lie in (0,1]");
    int m = ts.catalog.size();
    std::vector<std::vector<int>> succ(m, std::vector<int>(m, 0)); // c(a,b): b directly follows a
    for (const auto& t : ts.traces)
        for (size_t p = 0; p + 1 < t.actions.size(); ++p)
            ++succ[t.actions[p]][t.actions[p + 1]];
    std::vector<WeightedEdge> edges;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            if (a == b) continue;
            double d = double(succ[a][b] - succ[b][a]) / double(succ[a][b] + succ[b][a] + 1);
            if (d >= delta) edges.push_back({a, b, d});
        }
    return Poset::from_cover(cycle_break_and_cover(m, std::move(edges)));
}

} // namespace bpop
