#include "sampler.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace bpop {

using nlohmann::json;

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

const char* kind_name(LikelihoodKind k) {
    switch (k) {
        case LikelihoodKind::frontier_softmax: return "frontier-softmax";
        case LikelihoodKind::queue_jump: return "queue-jump";
        case LikelihoodKind::none: return "none";
    }
    return "?";
}

LikelihoodKind kind_from_name(const std::string& s) {
    if (s == "frontier-softmax") return LikelihoodKind::frontier_softmax;
    if (s == "queue-jump") return LikelihoodKind::queue_jump;
    if (s == "none") return LikelihoodKind::none;
    fail(Errc::schema, "unknown likelihood kind '" + s + "'");
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

void validate(const SamplerConfig& c) {
    if (c.iterations < 1) fail(Errc::invalid_argument, "iterations must be positive");
    if (!(c.burn_in >= 0.0 && c.burn_in < 1.0))
        fail(Errc::invalid_argument, "burn_in fraction must lie in [0,1)");
    if (c.thin < 1) fail(Errc::invalid_argument, "thin must be positive");
    if (c.cycle_length < 1) fail(Errc::invalid_argument, "cycle_length must be positive");
    if (!(c.epsilon >= 0.0 && c.epsilon < 1.0))
        fail(Errc::invalid_argument, "epsilon must lie in [0,1) for inference");
    if (c.jump_p && !(*c.jump_p >= 0.0 && *c.jump_p <= 1.0))
        fail(Errc::invalid_argument, "jump_p must lie in [0,1]");
    if (c.nle_cap < 1 || c.nle_cap > 64) fail(Errc::invalid_argument, "nle_cap must lie in [1,64]");
    if (!(c.proposal_scale > 0.0)) fail(Errc::invalid_argument, "proposal_scale must be positive");
    if (c.init_K < 1) fail(Errc::invalid_argument, "init K must be at least 1");
    if (!(c.init_rho >= 0.0 && c.init_rho < 1.0))
        fail(Errc::invalid_argument, "init rho must lie in [0,1)");
    if (!(c.init_beta > 0.0)) fail(Errc::invalid_argument, "init beta must be positive");
    validate(c.hyper);
}

SamplerConfig sampler_config_from_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) fail(Errc::schema, "sampler config: not valid JSON");
    if (!j.is_object()) fail(Errc::schema, "sampler config: must be an object");
    SamplerConfig c;
    try {
        for (auto& [key, val] : j.items()) {
            if (key == "iterations") c.iterations = val.get<int64_t>();
            else if (key == "burn_in") c.burn_in = val.get<double>();
            else if (key == "thin") c.thin = val.get<int64_t>();
            else if (key == "cycle_length") c.cycle_length = val.get<int64_t>();
            else if (key == "epsilon") c.epsilon = val.get<double>();
            else if (key == "likelihood") c.likelihood = kind_from_name(val.get<std::string>());
            else if (key == "jump_p") { if (!val.is_null()) c.jump_p = val.get<double>(); }
            else if (key == "nle_cap") c.nle_cap = val.get<int>();
            else if (key == "proposal_scale") c.proposal_scale = val.get<double>();
            else if (key == "check_cache") c.check_cache = val.get<bool>();
            else if (key == "seeds") { /* orchestration key, handled by the caller */ }
            else if (key == "init") {
                for (auto& [ik, iv] : val.items()) {
                    if (ik == "K") c.init_K = iv.get<int>();
                    else if (ik == "rho") c.init_rho = iv.get<double>();
                    else if (ik == "beta") c.init_beta = iv.get<double>();
                    else fail(Errc::schema, "sampler config: unknown init key '" + ik + "'");
                }
            } else if (key == "hyper") {
                for (auto& [hk, hv] : val.items()) {
                    if (hk == "alpha_rho") c.hyper.alpha_rho = hv.get<double>();
                    else if (hk == "gamma_a") c.hyper.gamma_a = hv.get<double>();
                    else if (hk == "gamma_b") c.hyper.gamma_b = hv.get<double>();
                    else if (hk == "lambda") c.hyper.lambda = hv.get<double>();
                    else if (hk == "rho_step") c.hyper.rho_step = hv.get<double>();
                    else if (hk == "beta_step") c.hyper.beta_step = hv.get<double>();
                    else fail(Errc::schema, "sampler config: unknown hyper key '" + hk + "'");
                }
            } else {
                fail(Errc::schema, "sampler config: unknown key '" + key + "'");
            }
        }
    } catch (const json::exception& e) {
        fail(Errc::schema, std::string("sampler config: ") + e.what());
    }
    validate(c);
    return c;
}

std::string sampler_config_to_json(const SamplerConfig& c) {
    json j;
    j["iterations"] = c.iterations;
    j["burn_in"] = c.burn_in;
    j["thin"] = c.thin;
    j["cycle_length"] = c.cycle_length;
    j["epsilon"] = c.epsilon;
    j["likelihood"] = kind_name(c.likelihood);
    if (c.jump_p) j["jump_p"] = *c.jump_p;
    j["nle_cap"] = c.nle_cap;
    j["proposal_scale"] = c.proposal_scale;
    j["init"] = {{"K", c.init_K}, {"rho", c.init_rho}, {"beta", c.init_beta}};
    j["hyper"] = {{"alpha_rho", c.hyper.alpha_rho}, {"gamma_a", c.hyper.gamma_a},
                  {"gamma_b", c.hyper.gamma_b},     {"lambda", c.hyper.lambda},
                  {"rho_step", c.hyper.rho_step},   {"beta_step", c.hyper.beta_step}};
    return j.dump();
}

std::string sampler_config_digest(const SamplerConfig& c) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  (unsigned long long)fnv1a(sampler_config_to_json(c)));
    return buf;
}

Sampler::Sampler(SamplerConfig cfg, TraceSet traces, uint64_t seed)
    : cfg_(std::move(cfg)), traces_(std::move(traces)), m_(traces_.catalog.size()), rng_(seed) {
    validate(cfg_);
    if (m_ < 1) fail(Errc::empty, "sampler needs a non-empty catalog");
    if (cfg_.likelihood == LikelihoodKind::queue_jump) {
        for (const auto& t : traces_.traces)
            if (int(t.actions.size()) > cfg_.nle_cap)
                fail(Errc::too_large, "queue-jump likelihood: trace '" + t.id + "' has " +
                                          std::to_string(t.actions.size()) +
                                          " actions, cap is " + std::to_string(cfg_.nle_cap));
    }
    init_state();
}

void Sampler::init_state() {
    st_.rho = cfg_.init_rho;
    st_.beta = cfg_.init_beta;
    st_.U.assign(m_, {});
    for (int i = 0; i < m_; ++i) st_.U[i] = sample_prior_row(cfg_.init_K, st_.rho, rng_);
    refresh_cache();
}

void Sampler::refresh_cache() {
    st_.poset = Poset::dominance_order(st_.U);
    st_.loglik = eval_loglik(st_.poset, st_.beta);
    st_.log_prior_u = log_prior_U(st_.U, st_.rho);
}

double Sampler::eval_loglik(const Poset& p, double beta) const {
    switch (cfg_.likelihood) {
        case LikelihoodKind::frontier_softmax:
            return dataset_loglik(traces_, p, LikelihoodParams{beta, cfg_.epsilon});
        case LikelihoodKind::queue_jump:
            return qj_dataset_loglik(traces_, p, cfg_.jump_p.value_or(cfg_.epsilon), cfg_.nle_cap);
        case LikelihoodKind::none:
            return 0.0;
    }
    return 0.0;
}

void Sampler::check_coherence() const {
    Poset p = Poset::dominance_order(st_.U);
    if (!(p == st_.poset)) fail(Errc::internal, "cached poset out of sync with U");
    double ll = eval_loglik(p, st_.beta);
    bool ll_ok = (ll == st_.loglik) || (std::isinf(ll) && std::isinf(st_.loglik));
    if (!ll_ok) fail(Errc::internal, "cached log-likelihood out of sync");
    double lp = log_prior_U(st_.U, st_.rho);
    if (std::abs(lp - st_.log_prior_u) > 1e-9 * (1.0 + std::abs(lp)))
        fail(Errc::internal, "cached U prior out of sync");
}

void Sampler::update_u_row(int i) {
    ++stats_.u.attempts;
    std::vector<double> prop = st_.U[i];
    {
        auto stepv = sample_prior_row(st_.K(), st_.rho, rng_);
        for (int k = 0; k < st_.K(); ++k) prop[k] += cfg_.proposal_scale * stepv[k];
    }
    double lp_old = row_log_prior(st_.U[i], st_.rho);
    double lp_new = row_log_prior(prop, st_.rho);
    std::vector<double> saved = st_.U[i];
    st_.U[i] = prop;
    Poset p = Poset::dominance_order(st_.U);
    double ll = eval_loglik(p, st_.beta);
    double loga = (lp_new - lp_old) + (ll - st_.loglik);
    if (std::log(rng_.uniform()) < loga) {
        ++stats_.u.accepts;
        st_.poset = std::move(p);
        st_.loglik = ll;
        st_.log_prior_u += lp_new - lp_old;
        if (cfg_.check_cache) check_coherence();
    } else {
        st_.U[i] = std::move(saved);
    }
}

void Sampler::update_rho() {
    ++stats_.rho.attempts;
    double delta = rng_.uniform(cfg_.hyper.rho_step, 1.0 / cfg_.hyper.rho_step);
    double prop = 1.0 - (1.0 - st_.rho) * delta;
    if (prop < 0.0 || prop > 1.0 - 1e-9) return; // outside the support, reject outright
    double lp_new = log_prior_U(st_.U, prop);
    double loga = (log_prior_rho(prop, cfg_.hyper) - log_prior_rho(st_.rho, cfg_.hyper)) +
                  (lp_new - st_.log_prior_u) - std::log(delta);
    if (std::log(rng_.uniform()) < loga) {
        ++stats_.rho.accepts;
        st_.rho = prop;
        st_.log_prior_u = lp_new;
        if (cfg_.check_cache) check_coherence();
    }
}

void Sampler::update_beta() {
    ++stats_.beta.attempts;
    double eta = std::log(st_.beta) + cfg_.hyper.beta_step * rng_.normal();
    double prop = std::exp(eta);
    double ll = (cfg_.likelihood == LikelihoodKind::frontier_softmax)
                    ? eval_loglik(st_.poset, prop)
                    : st_.loglik; // other kinds do not involve beta
    double loga = (log_prior_beta(prop, cfg_.hyper) - log_prior_beta(st_.beta, cfg_.hyper)) +
                  (ll - st_.loglik) + (eta - std::log(st_.beta)); // log-normal walk Jacobian
    if (std::log(rng_.uniform()) < loga) {
        ++stats_.beta.accepts;
        st_.beta = prop;
        st_.loglik = ll;
        if (cfg_.check_cache) check_coherence();
    }
}

void Sampler::update_k() {
    int K = st_.K();
    // move probabilities: up is forced at K=1, otherwise a fair coin
    double r = rng_.uniform();
    bool up = K == 1 || r < 0.5;
    auto up_prob = [](int k) { return k == 1 ? 1.0 : 0.5; };
    constexpr double down_prob = 0.5; // from any K >= 2
    if (up) {
        ++stats_.k_up.attempts;
        int c = int(rng_.below(uint64_t(K) + 1));
        std::vector<std::vector<double>> prop(m_);
        for (int j = 0; j < m_; ++j) {
            CondColumn cc = conditional_column_params(st_.U[j], st_.rho);
            double v = cc.mu + std::sqrt(cc.var) * rng_.normal();
            prop[j] = st_.U[j];
            prop[j].insert(prop[j].begin() + c, v);
        }
        Poset p = Poset::dominance_order(prop);
        double ll = eval_loglik(p, st_.beta);
        // Gaussian prior and proposal terms cancel; Jacobian is 1.
        double loga = (log_prior_K(K + 1, cfg_.hyper) - log_prior_K(K, cfg_.hyper)) +
                      (ll - st_.loglik) + std::log(down_prob / up_prob(K));
        if (std::log(rng_.uniform()) < loga) {
            ++stats_.k_up.accepts;
            st_.U = std::move(prop);
            st_.poset = std::move(p);
            st_.loglik = ll;
            st_.log_prior_u = log_prior_U(st_.U, st_.rho);
            if (cfg_.check_cache) check_coherence();
        }
    } else {
        ++stats_.k_down.attempts;
        int c = int(rng_.below(uint64_t(K)));
        std::vector<std::vector<double>> prop(m_);
        for (int j = 0; j < m_; ++j) {
            prop[j] = st_.U[j];
            prop[j].erase(prop[j].begin() + c);
        }
        Poset p = Poset::dominance_order(prop);
        double ll = eval_loglik(p, st_.beta);
        double loga = (log_prior_K(K - 1, cfg_.hyper) - log_prior_K(K, cfg_.hyper)) +
                      (ll - st_.loglik) + std::log(up_prob(K - 1) / down_prob);
        if (std::log(rng_.uniform()) < loga) {
            ++stats_.k_down.accepts;
            st_.U = std::move(prop);
            st_.poset = std::move(p);
            st_.loglik = ll;
            st_.log_prior_u = log_prior_U(st_.U, st_.rho);
            if (cfg_.check_cache) check_coherence();
        }
    }
}

std::vector<Sampler::Kernel> Sampler::build_cycle() {
    std::vector<Kernel> base;
    for (int i = 0; i < m_; ++i) base.push_back({Kernel::Type::u_row, i});
    for (int r = 0; r < 2; ++r) base.push_back({Kernel::Type::rho, -1});
    for (int r = 0; r < 2; ++r) base.push_back({Kernel::Type::beta, -1});
    int kw = std::max(3, m_);
    for (int r = 0; r < kw; ++r) base.push_back({Kernel::Type::k, -1});
    int64_t reps = std::max<int64_t>(
        1, (cfg_.cycle_length + int64_t(base.size()) / 2) / int64_t(base.size()));
    std::vector<Kernel> cycle;
    cycle.reserve(size_t(reps) * base.size());
    for (int64_t r = 0; r < reps; ++r) cycle.insert(cycle.end(), base.begin(), base.end());
    rng_.shuffle(cycle);
    return cycle;
}

void Sampler::step(const Kernel& k) {
    switch (k.type) {
        case Kernel::Type::u_row: update_u_row(k.row); break;
        case Kernel::Type::rho: update_rho(); break;
        case Kernel::Type::beta: update_beta(); break;
        case Kernel::Type::k: update_k(); break;
    }
}

ChainSample Sampler::snapshot(int64_t iter) const {
    ChainSample s;
    s.iter = iter;
    s.K = st_.K();
    s.rho = st_.rho;
    s.beta = st_.beta;
    s.loglik = st_.loglik;
    s.edges = st_.poset.closure_edges();
    return s;
}

RunStats Sampler::run(const std::string& out_path) {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::io, "cannot open '" + out_path + "' for writing");
    out << chain_header_line(traces_.catalog, sampler_config_digest(cfg_)) << "\n";
    out.flush();

    int64_t burn = int64_t(std::floor(double(cfg_.iterations) * cfg_.burn_in));
    std::vector<Kernel> cycle;
    size_t ci = 0;
    for (int64_t iter = 1; iter <= cfg_.iterations; ++iter) {
        if (ci == cycle.size()) {
            cycle = build_cycle();
            ci = 0;
        }
        step(cycle[ci++]);
        if (iter > burn && (iter - burn) % cfg_.thin == 0) {
            out << chain_sample_line(snapshot(iter)) << "\n";
            out.flush(); // a crash loses at most one thinning window
            ++stats_.recorded;
        }
    }
    if (!out) fail(Errc::io, "write failure on '" + out_path + "'");
    double ur = stats_.u.rate();
    if (stats_.u.attempts > 0 && (ur < 0.05 || ur > 0.8))
        std::fprintf(stderr,
                     "warning: U row acceptance rate %.3f outside (0.05, 0.8); "
                     "consider adjusting proposal_scale\n",
                     ur);
    return stats_;
}

RunStats run_chain(const SamplerConfig& cfg, const TraceSet& traces, uint64_t seed,
                   const std::string& out_path) {
    Sampler s(cfg, traces, seed);
    return s.run(out_path);
}

} // namespace bpop
