#pragma once

#include "poset.hpp"
#include "trace.hpp"

namespace bpop {

struct LikelihoodParams {
    double beta = 1.0;     // softmax inverse temperature, > 0
    double epsilon = 0.01; // error mixture weight, in [0,1]
};

void validate(const LikelihoodParams& lp);

// Q_t(a) = log(1 + S_t(a)) for frontier members, -inf otherwise.
double successor_utility(int a, const Poset& p, const Bits& remaining);

// p(y) = (1-eps) * softmax_beta(Q)|_y + eps/|remaining|; the softmax term is
// zero off the frontier. remaining must contain y.
double step_probability(int y, const Bits& remaining, const Poset& p, const LikelihoodParams& lp);

// Sum of log step probabilities along the trace, frontier and S computed on
// the subposet induced by the trace's own items. -inf only when epsilon == 0
// and a step leaves the frontier. Runs in O(T + induced closure edges).
double trace_loglik(const std::vector<int>& trace, const Poset& p, const LikelihoodParams& lp);

double dataset_loglik(const TraceSet& ts, const Poset& p, const LikelihoodParams& lp);

// Queue-jump observation model: p(y) = (1-jump_p) * N_start(y)/N_total +
// jump_p/|remaining| with exact extension counts on the induced subposet.
// Errc::too_large when the trace exceeds the counting cap.
double qj_step_probability(int y, const std::vector<int>& remaining, const Poset& p,
                           double jump_p, int cap = kDefaultLeCap);
double qj_trace_loglik(const std::vector<int>& trace, const Poset& p, double jump_p,
                       int cap = kDefaultLeCap);
double qj_dataset_loglik(const TraceSet& ts, const Poset& p, double jump_p,
                         int cap = kDefaultLeCap);

} // namespace bpop
