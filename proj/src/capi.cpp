#include "bpop/bpop.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "baselines.hpp"
#include "error.hpp"
#include "estimation.hpp"
#include "executor.hpp"
#include "graph_json.hpp"
#include "sampler.hpp"
#include "trace.hpp"

using namespace bpop;

struct bpop_graph {
    LabeledPoset g;
};
struct bpop_traces {
    TraceSet ts;
};
struct bpop_chain {
    Chain c;
};
struct bpop_scenario {
    Scenario s;
};

namespace {

thread_local std::string t_last_error;

bpop_status map_errc(Errc c) {
    switch (c) {
        case Errc::invalid_argument: return BPOP_EINVAL;
        case Errc::io: return BPOP_EIO;
        case Errc::schema: return BPOP_ESCHEMA;
        case Errc::cycle: return BPOP_ECYCLE;
        case Errc::unknown_action: return BPOP_EUNKNOWN_ACTION;
        case Errc::too_large: return BPOP_ETOO_LARGE;
        case Errc::target_unreachable: return BPOP_EUNREACHABLE;
        case Errc::empty: return BPOP_EEMPTY;
        case Errc::catalog_mismatch: return BPOP_ECATALOG;
        case Errc::registry_gap: return BPOP_EREGISTRY;
        case Errc::internal: return BPOP_EINTERNAL;
    }
    return BPOP_EINTERNAL;
}

template <class F>
bpop_status guarded(F&& body) noexcept {
    try {
        body();
        return BPOP_OK;
    } catch (const Error& e) {
        t_last_error = e.what();
        return map_errc(e.code);
    } catch (const std::bad_alloc&) {
        t_last_error = "out of memory";
        return BPOP_EINTERNAL;
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return BPOP_EINTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void require(bool ok, const char* what) {
    if (!ok) fail(Errc::invalid_argument, what);
}

// Re-index a poset onto another catalog carrying the same action names.
Poset align_poset(const ActionCatalog& from, const Poset& p, const ActionCatalog& to) {
    if (from.names() == to.names()) return p;
    if (from.size() != to.size()) fail(Errc::catalog_mismatch, "catalogs differ in size");
    std::vector<std::pair<int, int>> edges;
    for (auto [i, j] : p.closure_edges())
        edges.emplace_back(to.index(from.name(i)), to.index(from.name(j)));
    return Poset::transitive_closure(to.size(), edges);
}

} // namespace

extern "C" {

const char* bpop_version(void) { return "1.0.0"; }

const char* bpop_last_error(void) { return t_last_error.c_str(); }

void bpop_string_free(char* s) { std::free(s); }

bpop_status bpop_graph_load(const char* path, bpop_graph** out) {
    return guarded([&] {
        require(path && out, "null argument");
        auto* h = new bpop_graph{graph_load(path)};
        *out = h;
    });
}

bpop_status bpop_graph_from_json(const char* text, bpop_graph** out) {
    return guarded([&] {
        require(text && out, "null argument");
        auto* h = new bpop_graph{graph_from_json(text)};
        *out = h;
    });
}

bpop_status bpop_graph_to_json(const bpop_graph* g, char** out) {
    return guarded([&] {
        require(g && out, "null argument");
        *out = dup_string(graph_to_json(g->g));
    });
}

bpop_status bpop_graph_to_dot(const bpop_graph* g, char** out) {
    return guarded([&] {
        require(g && out, "null argument");
        *out = dup_string(graph_to_dot(g->g));
    });
}

int bpop_graph_size(const bpop_graph* g) { return g ? g->g.catalog.size() : 0; }

bpop_status bpop_graph_count_extensions(const bpop_graph* g, int cap, unsigned long long* out) {
    return guarded([&] {
        require(g && out, "null argument");
        *out = count_linear_extensions(g->g.poset, cap > 0 ? cap : kDefaultLeCap);
    });
}

void bpop_graph_free(bpop_graph* g) { delete g; }

bpop_status bpop_traces_load(const char* path, bpop_traces** out) {
    return guarded([&] {
        require(path && out, "null argument");
        *out = new bpop_traces{traces_load(path)};
    });
}

bpop_status bpop_traces_from_json(const char* text, bpop_traces** out) {
    return guarded([&] {
        require(text && out, "null argument");
        *out = new bpop_traces{parse_trace_file(text)};
    });
}

bpop_status bpop_traces_to_json(const bpop_traces* t, char** out) {
    return guarded([&] {
        require(t && out, "null argument");
        *out = dup_string(traces_to_json(t->ts));
    });
}

bpop_status bpop_traces_remap(const bpop_traces* t, const bpop_graph* g, bpop_traces** out) {
    return guarded([&] {
        require(t && g && out, "null argument");
        *out = new bpop_traces{remap_traces(t->ts, g->g.catalog)};
    });
}

int bpop_traces_count(const bpop_traces* t) { return t ? int(t->ts.traces.size()) : 0; }

void bpop_traces_free(bpop_traces* t) { delete t; }

bpop_status bpop_ip_coverage(const bpop_traces* t, const bpop_graph* truth, double* out) {
    return guarded([&] {
        require(t && truth && out, "null argument");
        TraceSet aligned = remap_traces(t->ts, truth->g.catalog);
        *out = ip_coverage(aligned, truth->g.poset);
    });
}

bpop_status bpop_simulate(const bpop_graph* truth, double target_ip_cov, unsigned long long seed,
                          int max_attempts, int min_traces, bpop_traces** out) {
    return guarded([&] {
        require(truth && out, "null argument");
        *out = new bpop_traces{curate_to_coverage(truth->g.catalog, truth->g.poset, target_ip_cov,
                                                  seed, max_attempts, min_traces)};
    });
}

bpop_status bpop_dataset_loglik(const bpop_graph* g, const bpop_traces* t, double beta,
                                double epsilon, double* out) {
    return guarded([&] {
        require(g && t && out, "null argument");
        TraceSet aligned = remap_traces(t->ts, g->g.catalog);
        LikelihoodParams lp{beta, epsilon};
        validate(lp);
        *out = dataset_loglik(aligned, g->g.poset, lp);
    });
}

bpop_status bpop_run_chain(const char* config_json, const bpop_traces* t,
                           unsigned long long seed, const char* out_path) {
    return guarded([&] {
        require(config_json && t && out_path, "null argument");
        SamplerConfig cfg = sampler_config_from_json(config_json);
        run_chain(cfg, t->ts, seed, out_path);
    });
}

bpop_status bpop_chain_load(const char* const* paths, int n, bpop_chain** out) {
    return guarded([&] {
        require(paths && out && n >= 1, "need at least one chain file");
        Chain c = chain_load(paths[0]);
        for (int i = 1; i < n; ++i) chain_append(c, paths[i]);
        *out = new bpop_chain{std::move(c)};
    });
}

int bpop_chain_sample_count(const bpop_chain* c) { return c ? int(c->c.samples.size()) : 0; }

bpop_status bpop_chain_marginals_csv(const bpop_chain* c, char** out) {
    return guarded([&] {
        require(c && out, "null argument");
        *out = dup_string(marginals_to_csv(edge_marginals(c->c), c->c.catalog));
    });
}

bpop_status bpop_estimate_threshold(const bpop_chain* c, double alpha, bpop_graph** out) {
    return guarded([&] {
        require(c && out, "null argument");
        LabeledPoset g{c->c.catalog, threshold_estimate(edge_marginals(c->c), alpha)};
        *out = new bpop_graph{std::move(g)};
    });
}

bpop_status bpop_estimate_mode(const bpop_chain* c, bpop_graph** out) {
    return guarded([&] {
        require(c && out, "null argument");
        LabeledPoset g{c->c.catalog, mode_estimate(edge_marginals(c->c))};
        *out = new bpop_graph{std::move(g)};
    });
}

void bpop_chain_free(bpop_chain* c) { delete c; }

bpop_status bpop_evaluate(const bpop_graph* estimate, const bpop_graph* truth,
                          const bpop_traces* t, char** report_json) {
    return guarded([&] {
        require(estimate && truth && t && report_json, "null argument");
        Poset est = align_poset(estimate->g.catalog, estimate->g.poset, truth->g.catalog);
        TraceSet aligned = remap_traces(t->ts, truth->g.catalog);
        RecoveryReport r = recovery_report(est, truth->g.poset, aligned);
        *report_json = dup_string(report_to_json(r));
    });
}

bpop_status bpop_baseline_majority(const bpop_traces* t, double tau, bpop_graph** out) {
    return guarded([&] {
        require(t && out, "null argument");
        LabeledPoset g{t->ts.catalog, majority_baseline(t->ts, tau)};
        *out = new bpop_graph{std::move(g)};
    });
}

bpop_status bpop_baseline_heuristics(const bpop_traces* t, double delta, bpop_graph** out) {
    return guarded([&] {
        require(t && out, "null argument");
        LabeledPoset g{t->ts.catalog, heuristics_baseline(t->ts, delta)};
        *out = new bpop_graph{std::move(g)};
    });
}

bpop_status bpop_scenario_load(const char* path, bpop_scenario** out) {
    return guarded([&] {
        require(path && out, "null argument");
        *out = new bpop_scenario{scenario_load(path)};
    });
}

bpop_status bpop_scenario_from_json(const char* text, bpop_scenario** out) {
    return guarded([&] {
        require(text && out, "null argument");
        *out = new bpop_scenario{scenario_from_json(text)};
    });
}

bpop_status bpop_scenario_truth(const bpop_scenario* s, bpop_graph** out) {
    return guarded([&] {
        require(s && out, "null argument");
        LabeledPoset g{s->s.catalog, s->s.truth};
        *out = new bpop_graph{std::move(g)};
    });
}

void bpop_scenario_free(bpop_scenario* s) { delete s; }

bpop_status bpop_execute(const bpop_graph* sop, const bpop_scenario* s, const char* mode,
                         unsigned long long seed, char** report_json) {
    return guarded([&] {
        require(sop && s && mode && report_json, "null argument");
        CompiledSOP compiled = compile_sop(sop->g.catalog, sop->g.poset, s->s.registry);
        auto initial = s->s.starting_blackboard();
        ExecutionReport rep;
        if (std::strcmp(mode, "expert") == 0)
            rep = run_expert(compiled, s->s, initial, seed);
        else if (std::strcmp(mode, "hybrid") == 0)
            rep = run_hybrid(compiled, s->s, initial, seed);
        else
            fail(Errc::invalid_argument, "mode must be 'expert' or 'hybrid'");
        *report_json = dup_string(execution_report_to_json(rep));
    });
}

} // extern "C"
