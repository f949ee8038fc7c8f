#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "sampler.hpp"

using namespace bpop;

namespace {

template <class F>
std::optional<Errc> thrown_code(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code;
    }
    return std::nullopt;
}

const ActionCatalog kFour({"a1", "a2", "a3", "a4"});

Poset diamond() {
    return Poset::transitive_closure(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
}

TraceSet diamond_traces() {
    return curate_to_coverage(kFour, diamond(), 1.0, 7, 10000, 20);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string tmp_path(const char* stem) {
    return std::string("/tmp/bpop-sampler-test-") + stem + ".jsonl";
}

SamplerConfig quick_config(int64_t iters) {
    SamplerConfig c;
    c.iterations = iters;
    c.burn_in = 0.5;
    c.thin = 20;
    c.cycle_length = 100;
    return c;
}

} // namespace

TEST_CASE("config serialization is canonical and digest-stable") {
    SamplerConfig c;
    c.iterations = 1234;
    c.epsilon = 0.05;
    c.likelihood = LikelihoodKind::queue_jump;
    c.jump_p = 0.07;
    c.hyper.lambda = 2.5;

    std::string text = sampler_config_to_json(c);
    SamplerConfig back = sampler_config_from_json(text);
    CHECK_EQ(sampler_config_to_json(back), text);
    CHECK_EQ(sampler_config_digest(back), sampler_config_digest(c));

    SamplerConfig other = c;
    other.thin = c.thin + 1;
    CHECK_NE(sampler_config_digest(other), sampler_config_digest(c));

    SUBCASE("defaults parse from an empty object") {
        SamplerConfig d = sampler_config_from_json("{}");
        CHECK_EQ(d.iterations, 200000);
        CHECK_EQ(d.burn_in, 0.5);
        CHECK_EQ(d.thin, 100);
        CHECK_EQ(d.likelihood, LikelihoodKind::frontier_softmax);
        CHECK_FALSE(d.jump_p.has_value());
    }
    SUBCASE("orchestration seeds key is tolerated, unknown keys are not") {
        CHECK_EQ(thrown_code([] { sampler_config_from_json(R"({"seeds":[1,2,3]})"); }),
                 std::nullopt);
        CHECK_EQ(thrown_code([] { sampler_config_from_json(R"({"iterations":"many"})"); }),
                 Errc::schema);
        CHECK_EQ(thrown_code([] { sampler_config_from_json(R"({"cadence":3})"); }), Errc::schema);
        CHECK_EQ(thrown_code([] { sampler_config_from_json(R"({"likelihood":"mallows"})"); }),
                 Errc::schema);
        CHECK_EQ(thrown_code([] { sampler_config_from_json("[1,2]"); }), Errc::schema);
    }
    SUBCASE("validation bounds") {
        SamplerConfig bad;
        bad.iterations = 0;
        CHECK_EQ(thrown_code([&] { validate(bad); }), Errc::invalid_argument);
        bad = {};
        bad.burn_in = 1.0;
        CHECK_EQ(thrown_code([&] { validate(bad); }), Errc::invalid_argument);
        bad = {};
        bad.thin = 0;
        CHECK_EQ(thrown_code([&] { validate(bad); }), Errc::invalid_argument);
        bad = {};
        bad.epsilon = 1.0; // reserved for the pure-noise limit, not inference
        CHECK_EQ(thrown_code([&] { validate(bad); }), Errc::invalid_argument);
        bad = {};
        bad.nle_cap = 65;
        CHECK_EQ(thrown_code([&] { validate(bad); }), Errc::invalid_argument);
    }
}

TEST_CASE("kernel cycles carry dimension-proportional weights") {
    TraceSet ts = diamond_traces();
    SamplerConfig cfg = quick_config(1000);
    cfg.cycle_length = 500;
    Sampler s(cfg, ts, 1);

    auto cycle = s.build_cycle();
    // base multiset: 4 row kernels + 2 rho + 2 beta + max(3,4) K = 12 kernels
    CHECK_EQ(cycle.size() % 12, 0);
    std::map<std::pair<int, int>, int> counts; // (type, row) -> count
    for (const auto& k : cycle) counts[{int(k.type), k.row}]++;
    int reps = int(cycle.size()) / 12;
    for (int i = 0; i < 4; ++i)
        CHECK_EQ(counts[{int(Sampler::Kernel::Type::u_row), i}], reps);
    CHECK_EQ(counts[{int(Sampler::Kernel::Type::rho), -1}], 2 * reps);
    CHECK_EQ(counts[{int(Sampler::Kernel::Type::beta), -1}], 2 * reps);
    CHECK_EQ(counts[{int(Sampler::Kernel::Type::k), -1}], std::max(3, 4) * reps);

    SUBCASE("fresh cycles reshuffle the same multiset") {
        auto again = s.build_cycle();
        REQUIRE_EQ(again.size(), cycle.size());
        auto key = [](const Sampler::Kernel& k) { return std::make_pair(int(k.type), k.row); };
        bool same_order = true;
        for (size_t i = 0; i < cycle.size(); ++i)
            if (key(cycle[i]) != key(again[i])) same_order = false;
        CHECK_FALSE(same_order);
    }
    SUBCASE("small catalogs keep the K weight floor of three") {
        TraceSet two;
        two.catalog = ActionCatalog({"x", "y"});
        two.traces.push_back({"t0", {0, 1}, {}});
        SamplerConfig c2 = quick_config(100);
        c2.cycle_length = 9; // one base multiset: 2 + 2 + 2 + 3
        Sampler s2(c2, two, 1);
        auto cy = s2.build_cycle();
        CHECK_EQ(cy.size(), 9);
        int kk = 0;
        for (const auto& k : cy)
            if (k.type == Sampler::Kernel::Type::k) ++kk;
        CHECK_EQ(kk, 3);
    }
}

TEST_CASE("chains are deterministic in the seed") {
    TraceSet ts = diamond_traces();
    SamplerConfig cfg = quick_config(2000);
    std::string p1 = tmp_path("det1"), p2 = tmp_path("det2"), p3 = tmp_path("det3");
    run_chain(cfg, ts, 42, p1);
    run_chain(cfg, ts, 42, p2);
    run_chain(cfg, ts, 43, p3);
    CHECK_EQ(slurp(p1), slurp(p2));
    CHECK_NE(slurp(p1), slurp(p3));
    std::remove(p1.c_str());
    std::remove(p2.c_str());
    std::remove(p3.c_str());
}

TEST_CASE("chain files carry a header and well-formed samples") {
    TraceSet ts = diamond_traces();
    SamplerConfig cfg = quick_config(4000);
    std::string path = tmp_path("load");
    RunStats stats = run_chain(cfg, ts, 5, path);

    Chain chain = chain_load(path);
    CHECK(chain.catalog == ts.catalog);
    CHECK_EQ(chain.config_digest, sampler_config_digest(cfg));
    CHECK_EQ(int64_t(chain.samples.size()), stats.recorded);
    REQUIRE(!chain.samples.empty());
    int64_t prev = 0;
    for (const auto& s : chain.samples) {
        CHECK(s.iter > prev);
        prev = s.iter;
        CHECK(s.K >= 1);
        CHECK(s.rho >= 0.0);
        CHECK(s.rho < 1.0);
        CHECK(s.beta > 0.0);
        // the recorded edge list is a transitively closed dag
        Poset p = Poset::transitive_closure(4, s.edges);
        CHECK_EQ(p.closure_edges(), s.edges);
    }

    SUBCASE("appending another seed merges samples over one catalog") {
        std::string path2 = tmp_path("load2");
        RunStats st2 = run_chain(cfg, ts, 6, path2);
        chain_append(chain, path2);
        CHECK_EQ(int64_t(chain.samples.size()), stats.recorded + st2.recorded);
        std::remove(path2.c_str());
    }
    SUBCASE("catalog disagreements are refused") {
        std::string path3 = tmp_path("load3");
        TraceSet other;
        other.catalog = ActionCatalog({"p", "q"});
        other.traces.push_back({"t0", {0, 1}, {}});
        run_chain(quick_config(200), other, 1, path3);
        CHECK_EQ(thrown_code([&] { chain_append(chain, path3); }), Errc::catalog_mismatch);
        std::remove(path3.c_str());
    }
    std::remove(path.c_str());
}

TEST_CASE("burn-in can swallow an entire short run") {
    TraceSet ts = diamond_traces();
    SamplerConfig cfg = quick_config(10);
    cfg.thin = 100;
    std::string path = tmp_path("empty");
    RunStats stats = run_chain(cfg, ts, 1, path);
    CHECK_EQ(stats.recorded, 0);
    Chain chain = chain_load(path);
    CHECK(chain.samples.empty());
    CHECK(chain.catalog == ts.catalog);
    std::remove(path.c_str());
}

TEST_CASE("cached state stays coherent under every kernel") {
    TraceSet ts = diamond_traces();
    SamplerConfig cfg = quick_config(3000);
    cfg.check_cache = true; // recompute poset, likelihood, prior after each accept
    std::string path = tmp_path("coherent");
    RunStats stats = run_chain(cfg, ts, 11, path);
    CHECK(stats.recorded > 0);
    CHECK(stats.u.attempts > 0);
    CHECK(stats.rho.attempts > 0);
    CHECK(stats.beta.attempts > 0);
    CHECK(stats.k_up.attempts + stats.k_down.attempts > 0);
    CHECK(stats.u.accepts > 0);
    std::remove(path.c_str());
}

TEST_CASE("queue-jump inference refuses traces beyond the counting cap") {
    std::vector<std::string> names;
    for (int i = 0; i < 22; ++i) names.push_back("n" + std::to_string(i));
    TraceSet ts;
    ts.catalog = ActionCatalog(names);
    Trace t;
    t.id = "t0";
    for (int i = 0; i < 22; ++i) t.actions.push_back(i);
    ts.traces.push_back(t);

    SamplerConfig cfg = quick_config(100);
    cfg.likelihood = LikelihoodKind::queue_jump;
    CHECK_EQ(thrown_code([&] { Sampler s(cfg, ts, 1); }), Errc::too_large);

    SUBCASE("frontier-softmax has no such cap") {
        SamplerConfig fs = quick_config(100);
        CHECK_EQ(thrown_code([&] { Sampler s(fs, ts, 1); }), std::nullopt);
    }
}

TEST_CASE("prior-only runs recover the hyperpriors") {
    TraceSet ts;
    ts.catalog = ActionCatalog({"x", "y", "z"});
    SamplerConfig cfg;
    cfg.iterations = 60000;
    cfg.burn_in = 0.25;
    cfg.thin = 15;
    cfg.cycle_length = 100;
    cfg.likelihood = LikelihoodKind::none;
    std::string path = tmp_path("prior");
    run_chain(cfg, ts, 19, path);
    Chain chain = chain_load(path);
    REQUIRE(chain.samples.size() == 3000);

    double rho_mean = 0.0, beta_mean = 0.0, k_mean = 0.0;
    for (const auto& s : chain.samples) {
        rho_mean += s.rho;
        beta_mean += s.beta;
        k_mean += s.K;
    }
    int n = int(chain.samples.size());
    rho_mean /= n;
    beta_mean /= n;
    k_mean /= n;
    CHECK_EQ(rho_mean, doctest::Approx(0.5).epsilon(0.08));   // Beta(1,1)
    CHECK_EQ(beta_mean, doctest::Approx(2.0).epsilon(0.12));  // Gamma(2,1)
    CHECK_EQ(k_mean, doctest::Approx(3.0 / (1.0 - std::exp(-3.0))).epsilon(0.12));
    std::remove(path.c_str());
}

TEST_CASE("the sampled mode matches exhaustive likelihood scoring") {
    TraceSet ts = diamond_traces();
    LikelihoodParams lp{1.0, 0.01};

    // enumerate every strict partial order on four labeled elements
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (i != j) pairs.emplace_back(i, j);
    REQUIRE_EQ(pairs.size(), 12);

    int n_posets = 0;
    double best = -std::numeric_limits<double>::infinity();
    std::vector<std::pair<int, int>> best_edges;
    for (int mask = 0; mask < (1 << 12); ++mask) {
        auto rel = [&](int i, int j) {
            for (size_t k = 0; k < pairs.size(); ++k)
                if (pairs[k] == std::make_pair(i, j)) return (mask >> k) & 1;
            return 0;
        };
        bool ok = true;
        for (int i = 0; i < 4 && ok; ++i)
            for (int j = 0; j < 4 && ok; ++j) {
                if (i == j) continue;
                if (rel(i, j) && rel(j, i)) ok = false; // antisymmetry
                for (int k = 0; k < 4 && ok; ++k) {
                    if (k == i || k == j) continue;
                    if (rel(i, j) && rel(j, k) && !rel(i, k)) ok = false; // transitivity
                }
            }
        if (!ok) continue;
        ++n_posets;
        std::vector<std::pair<int, int>> edges;
        for (size_t k = 0; k < pairs.size(); ++k)
            if ((mask >> k) & 1) edges.push_back(pairs[k]);
        double score = dataset_loglik(ts, Poset::transitive_closure(4, edges), lp);
        if (score > best) {
            best = score;
            best_edges = edges;
        }
    }
    CHECK_EQ(n_posets, 219);
    std::sort(best_edges.begin(), best_edges.end());
    CHECK_EQ(best_edges, diamond().closure_edges());

    // a short chain concentrates on the same structure
    SamplerConfig cfg = quick_config(30000);
    cfg.thin = 10;
    std::string path = tmp_path("mode");
    run_chain(cfg, ts, 3, path);
    Chain chain = chain_load(path);
    std::map<std::vector<std::pair<int, int>>, int> freq;
    for (const auto& s : chain.samples) freq[s.edges]++;
    auto top = std::max_element(freq.begin(), freq.end(),
                                [](const auto& a, const auto& b) { return a.second < b.second; });
    CHECK_EQ(top->first, diamond().closure_edges());
    std::remove(path.c_str());
}
