#include "likelihood.hpp"

#include <cmath>
#include <limits>

namespace bpop {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void validate(const LikelihoodParams& lp) {
    if (!(lp.beta > 0.0)) fail(Errc::invalid_argument, "beta must be positive");
    if (!(lp.epsilon >= 0.0 && lp.epsilon <= 1.0))
        fail(Errc::invalid_argument, "epsilon must lie in [0,1]");
}

double successor_utility(int a, const Poset& p, const Bits& remaining) {
    if (!remaining.test(a)) fail(Errc::invalid_argument, "action not in remaining set");
    if (p.predecessors(a).intersects(remaining)) return kNegInf;
    return std::log1p(p.descendant_count(a, remaining));
}

double step_probability(int y, const Bits& remaining, const Poset& p, const LikelihoodParams& lp) {
    validate(lp);
    if (!remaining.test(y)) fail(Errc::invalid_argument, "action not in remaining set");
    int r = remaining.count();
    double mix = lp.epsilon / double(r);
    if (p.predecessors(y).intersects(remaining)) return mix;
    // log-space softmax over the frontier with max subtraction
    auto f = p.frontier_list(remaining);
    double qy = 0.0, qmax = kNegInf;
    std::vector<double> q(f.size());
    for (size_t i = 0; i < f.size(); ++i) {
        q[i] = lp.beta * std::log1p(p.descendant_count(f[i], remaining));
        if (f[i] == y) qy = q[i];
        qmax = std::max(qmax, q[i]);
    }
    double z = 0.0;
    for (double v : q) z += std::exp(v - qmax);
    return (1.0 - lp.epsilon) * std::exp(qy - qmax) / z + mix;
}

double trace_loglik(const std::vector<int>& trace, const Poset& p, const LikelihoodParams& lp) {
    validate(lp);
    int T = int(trace.size());
    if (T == 0) return 0.0;
    int m = p.m();
    // membership + per-item state, indexed by catalog id
    std::vector<char> in_r(m, 0), in_f(m, 0);
    std::vector<int> s(m, 0), unmet(m, 0);
    for (int a : trace) {
        if (a < 0 || a >= m) fail(Errc::invalid_argument, "trace element out of range");
        if (in_r[a]) fail(Errc::invalid_argument, "duplicate element in trace");
        in_r[a] = 1;
    }
    // Scaling the softmax terms by the per-trace maximum utility keeps
    // exp() in range at large beta without breaking incremental updates.
    double qcap = lp.beta * std::log1p(double(T - 1));
    auto term = [&](int count) { return std::exp(lp.beta * std::log1p(double(count)) - qcap); };

    double z = 0.0;
    for (int a : trace) {
        for (int q : p.predecessor_list(a))
            if (in_r[q]) ++unmet[a];
        for (int q : p.successor_list(a))
            if (in_r[q]) ++s[a];
    }
    for (int a : trace)
        if (unmet[a] == 0) {
            in_f[a] = 1;
            z += term(s[a]);
        }

    double total = 0.0;
    for (int t = 0; t < T; ++t) {
        int y = trace[t];
        int rsize = T - t;
        double mix = lp.epsilon / double(rsize);
        double prob = in_f[y] ? (1.0 - lp.epsilon) * term(s[y]) / z + mix : mix;
        if (prob <= 0.0) return kNegInf; // epsilon == 0 and y off the frontier
        total += std::log(prob);

        in_r[y] = 0;
        if (in_f[y]) {
            in_f[y] = 0;
            z -= term(s[y]);
        }
        for (int q : p.predecessor_list(y))
            if (in_r[q]) {
                if (in_f[q]) z -= term(s[q]);
                --s[q];
                if (in_f[q]) z += term(s[q]);
            }
        for (int q : p.successor_list(y))
            if (in_r[q] && --unmet[q] == 0) {
                in_f[q] = 1;
                z += term(s[q]);
            }
    }
    return total;
}

double dataset_loglik(const TraceSet& ts, const Poset& p, const LikelihoodParams& lp) {
    double total = 0.0;
    for (const auto& t : ts.traces) total += trace_loglik(t.actions, p, lp);
    return total;
}

double qj_step_probability(int y, const std::vector<int>& remaining, const Poset& p,
                           double jump_p, int cap) {
    if (!(jump_p >= 0.0 && jump_p <= 1.0)) fail(Errc::invalid_argument, "jump probability must lie in [0,1]");
    LeCounter c(p, remaining, cap);
    int ly = -1;
    for (size_t i = 0; i < remaining.size(); ++i)
        if (remaining[i] == y) ly = int(i);
    if (ly < 0) fail(Errc::invalid_argument, "action not in remaining set");
    uint64_t mask = c.full_mask();
    double frac = double(c.count_starting_with(mask, ly)) / double(c.count(mask));
    return (1.0 - jump_p) * frac + jump_p / double(remaining.size());
}

double qj_trace_loglik(const std::vector<int>& trace, const Poset& p, double jump_p, int cap) {
    if (!(jump_p >= 0.0 && jump_p <= 1.0)) fail(Errc::invalid_argument, "jump probability must lie in [0,1]");
    int T = int(trace.size());
    if (T == 0) return 0.0;
    LeCounter c(p, trace, cap); // memo shared across all steps
    uint64_t mask = c.full_mask();
    double total = 0.0;
    for (int t = 0; t < T; ++t) {
        double frac = double(c.count_starting_with(mask, t)) / double(c.count(mask));
        double prob = (1.0 - jump_p) * frac + jump_p / double(T - t);
        if (prob <= 0.0) return kNegInf;
        total += std::log(prob);
        mask &= ~(uint64_t(1) << t);
    }
    return total;
}

double qj_dataset_loglik(const TraceSet& ts, const Poset& p, double jump_p, int cap) {
    double total = 0.0;
    for (const auto& t : ts.traces) total += qj_trace_loglik(t.actions, p, jump_p, cap);
    return total;
}

} // namespace bpop
