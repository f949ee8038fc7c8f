#include "estimation.hpp"

#include <algorithm>
#include <json.hpp>

#include "baselines.hpp"
#include "error.hpp"

namespace bpop {

using nlohmann::json;

EdgeMarginals edge_marginals(const Chain& chain) {
    if (chain.samples.empty()) fail(Errc::empty, "chain has no samples");
    EdgeMarginals em;
    em.m = chain.catalog.size();
    em.p.assign(size_t(em.m) * em.m, 0.0);
    for (const auto& s : chain.samples)
        for (auto [i, j] : s.edges) em.p[size_t(i) * em.m + j] += 1.0;
    const double n = double(chain.samples.size());
    for (double& v : em.p) v /= n;
    return em;
}

std::string marginals_to_csv(const EdgeMarginals& em, const ActionCatalog& catalog) {
    if (catalog.size() != em.m) fail(Errc::catalog_mismatch, "catalog size does not match marginals");
    std::string out;
    for (int j = 0; j < em.m; ++j) {
        if (j) out += ',';
        out += catalog.name(j);
    }
    out += '\n';
    for (int i = 0; i < em.m; ++i) {
        for (int j = 0; j < em.m; ++j) {
            if (j) out += ',';
            out += json(em.at(i, j)).dump(); // shortest round-trip decimal
        }
        out += '\n';
    }
    return out;
}

namespace {

Poset repair(int m, const std::vector<WeightedEdge>& seeds) {
    CoverGraph cover = cycle_break_and_cover(m, seeds);
    return Poset::from_cover(cover);
}

} // namespace

Poset threshold_estimate(const EdgeMarginals& em, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) fail(Errc::invalid_argument, "alpha must be in (0, 1]");
    std::vector<WeightedEdge> seeds;
    for (int i = 0; i < em.m; ++i)
        for (int j = 0; j < em.m; ++j)
            if (i != j && em.at(i, j) >= alpha) seeds.push_back({i, j, em.at(i, j)});
    return repair(em.m, seeds);
}

Poset mode_estimate(const EdgeMarginals& em) {
    std::vector<WeightedEdge> seeds;
    for (int i = 0; i < em.m; ++i)
        for (int j = i + 1; j < em.m; ++j) {
            const double pij = em.at(i, j);
            const double pji = em.at(j, i);
            const double pinc = std::max(0.0, 1.0 - pij - pji);
            // A strict winner becomes an edge; any tie for the max stays
            // incomparable so the estimate adds no disputed constraint.
            if (pij > pji && pij > pinc)
                seeds.push_back({i, j, pij});
            else if (pji > pij && pji > pinc)
                seeds.push_back({j, i, pji});
        }
    return repair(em.m, seeds);
}

namespace {

std::vector<std::pair<int, int>> sorted_cover(const Poset& p) {
    auto e = p.reduction().edges;
    std::sort(e.begin(), e.end());
    return e;
}

Prf set_prf(const std::vector<std::pair<int, int>>& est, const std::vector<std::pair<int, int>>& truth) {
    Prf r;
    size_t a = 0, b = 0;
    while (a < est.size() && b < truth.size()) {
        if (est[a] == truth[b]) {
            ++r.tp, ++a, ++b;
        } else if (est[a] < truth[b]) {
            ++r.fp, ++a;
        } else {
            ++r.fn, ++b;
        }
    }
    r.fp += int(est.size() - a);
    r.fn += int(truth.size() - b);
    if (r.tp + r.fp + r.fn == 0) {
        r.precision = r.recall = r.f1 = 1.0; // both sides empty: nothing missed
        return r;
    }
    r.precision = r.tp + r.fp > 0 ? double(r.tp) / (r.tp + r.fp) : 0.0;
    r.recall = r.tp + r.fn > 0 ? double(r.tp) / (r.tp + r.fn) : 0.0;
    r.f1 = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
    return r;
}

} // namespace

Prf edge_prf(const Poset& estimate, const Poset& truth) {
    if (estimate.m() != truth.m()) fail(Errc::catalog_mismatch, "posets differ in size");
    return set_prf(sorted_cover(estimate), sorted_cover(truth));
}

int shd(const Poset& estimate, const Poset& truth) {
    Prf r = edge_prf(estimate, truth);
    return r.fp + r.fn;
}

double feasibility(const TraceSet& ts, const Poset& estimate) {
    if (ts.catalog.size() != estimate.m()) fail(Errc::catalog_mismatch, "traces and estimate differ in catalog");
    if (ts.traces.empty()) fail(Errc::empty, "no traces");
    int ok = 0;
    for (const auto& t : ts.traces)
        if (estimate.is_linear_extension(t.actions)) ++ok;
    return double(ok) / double(ts.traces.size());
}

Prf incomparability_prf(const Poset& estimate, const Poset& truth) {
    if (estimate.m() != truth.m()) fail(Errc::catalog_mismatch, "posets differ in size");
    auto est = estimate.incomparable_pairs();
    auto tru = truth.incomparable_pairs();
    std::sort(est.begin(), est.end());
    std::sort(tru.begin(), tru.end());
    return set_prf(est, tru);
}

RecoveryReport recovery_report(const Poset& estimate, const Poset& truth, const TraceSet& ts) {
    RecoveryReport r;
    r.edges = edge_prf(estimate, truth);
    r.shd = r.edges.fp + r.edges.fn;
    r.feasibility = feasibility(ts, estimate);
    r.ip_cov = ip_coverage(ts, truth);
    r.ip_f1 = incomparability_prf(estimate, truth).f1;
    return r;
}

std::string report_to_json(const RecoveryReport& r) {
    json j;
    j["precision"] = r.edges.precision;
    j["recall"] = r.edges.recall;
    j["f1"] = r.edges.f1;
    j["tp"] = r.edges.tp;
    j["fp"] = r.edges.fp;
    j["fn"] = r.edges.fn;
    j["shd"] = r.shd;
    j["feasibility"] = r.feasibility;
    j["ip_cov"] = r.ip_cov;
    j["ip_f1"] = r.ip_f1;
    return j.dump(2) + "\n";
}

} // namespace bpop
