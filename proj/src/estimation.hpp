#pragma once

#include <string>
#include <vector>

#include "chain.hpp"
#include "trace.hpp"

namespace bpop {

struct EdgeMarginals {
    int m = 0;
    std::vector<double> p; // row-major m*m, p[i*m+j] = posterior P(i ≻ j)
    double at(int i, int j) const { return p[size_t(i) * m + j]; }
};

// Mean closure-edge indicators over retained samples. Errc::empty on an
// empty chain.
EdgeMarginals edge_marginals(const Chain& chain);

std::string marginals_to_csv(const EdgeMarginals& em, const ActionCatalog& catalog);

// Seed edges at marginal >= alpha, repair cycles by marginal weight, close.
Poset threshold_estimate(const EdgeMarginals& em, double alpha);

// Per unordered pair argmax over {P(i≻j), P(j≻i), P(incomparable)}; any tie
// for the maximum resolves to incomparable. Same repair as the threshold
// estimator.
Poset mode_estimate(const EdgeMarginals& em);

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    int tp = 0, fp = 0, fn = 0;
};

// Cover-edge precision/recall/F1 between the transitive reductions.
Prf edge_prf(const Poset& estimate, const Poset& truth);

// Cover-edge symmetric difference (a reversed edge costs 2).
int shd(const Poset& estimate, const Poset& truth);

// Fraction of traces that linearize the estimate (induced subposet).
double feasibility(const TraceSet& ts, const Poset& estimate);

// F1 of incomparable-pair classification (positive = incomparable).
Prf incomparability_prf(const Poset& estimate, const Poset& truth);

struct RecoveryReport {
    Prf edges;
    int shd = 0;
    double feasibility = 0.0;
    double ip_cov = 0.0;
    double ip_f1 = 0.0;
};

RecoveryReport recovery_report(const Poset& estimate, const Poset& truth, const TraceSet& ts);
std::string report_to_json(const RecoveryReport& r);

} // namespace bpop
