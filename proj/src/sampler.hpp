#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chain.hpp"
#include "likelihood.hpp"
#include "priors.hpp"
#include "trace.hpp"

namespace bpop {

enum class LikelihoodKind { frontier_softmax, queue_jump, none };

struct SamplerConfig {
    int64_t iterations = 200000;
    double burn_in = 0.5; // fraction of iterations discarded
    int64_t thin = 100;
    int64_t cycle_length = 500;
    double epsilon = 0.01;
    LikelihoodKind likelihood = LikelihoodKind::frontier_softmax;
    std::optional<double> jump_p; // queue-jump noise, defaults to epsilon
    int nle_cap = kDefaultLeCap;
    double proposal_scale = 1.0; // scales the U row walk
    bool check_cache = false;    // recompute cached poset/loglik after every accept
    int init_K = 3;
    double init_rho = 0.1;
    double init_beta = 1.0;
    Hyperparams hyper;
};

void validate(const SamplerConfig& c);
SamplerConfig sampler_config_from_json(const std::string& text);
std::string sampler_config_to_json(const SamplerConfig& c); // canonical form
std::string sampler_config_digest(const SamplerConfig& c);  // fnv1a-64 of canonical form

struct ChainState {
    std::vector<std::vector<double>> U; // m rows, K columns
    double rho = 0.1;
    double beta = 1.0;
    Poset poset;         // dominance order of U
    double loglik = 0.0; // dataset log-likelihood under the configured kind
    double log_prior_u = 0.0;
    int K() const { return U.empty() ? 0 : int(U[0].size()); }
};

struct KernelCounts {
    int64_t attempts = 0;
    int64_t accepts = 0;
    double rate() const { return attempts ? double(accepts) / double(attempts) : 0.0; }
};

struct RunStats {
    KernelCounts u, rho, beta, k_up, k_down;
    int64_t recorded = 0;
};

// One MCMC chain over (U, rho, beta, K) with weighted randomized kernel
// cycling. Kernels are public so tests can drive them directly.
class Sampler {
public:
    Sampler(SamplerConfig cfg, TraceSet traces, uint64_t seed);

    const ChainState& state() const { return st_; }
    ChainState& state() { return st_; }
    RunStats& stats() { return stats_; }
    const SamplerConfig& config() const { return cfg_; }
    Rng& rng() { return rng_; }

    void update_u_row(int i);
    void update_rho();
    void update_beta();
    void update_k();

    struct Kernel {
        enum class Type { u_row, rho, beta, k } type;
        int row = -1;
    };
    std::vector<Kernel> build_cycle(); // weighted multiset, freshly shuffled

    void step(const Kernel& k);

    // Full run; writes the JSON-Lines chain file (header + thinned samples)
    // and returns kernel statistics. Streams samples as they are recorded.
    RunStats run(const std::string& out_path);

    double eval_loglik(const Poset& p, double beta) const;
    ChainSample snapshot(int64_t iter) const;

private:
    void init_state();
    void refresh_cache(); // poset + loglik + prior from U
    void check_coherence() const;

    SamplerConfig cfg_;
    TraceSet traces_;
    int m_;
    Rng rng_;
    ChainState st_;
    RunStats stats_;
};

RunStats run_chain(const SamplerConfig& cfg, const TraceSet& traces, uint64_t seed,
                   const std::string& out_path);

} // namespace bpop
