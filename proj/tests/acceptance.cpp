// Acceptance gate: ten end-to-end checks with pinned tolerances. Each prints
// exactly one [PASS]/[FAIL] line; the exit code is the number of failures,
// so ctest reports any regression. Scratch artifacts go under a per-process
// directory in $TMPDIR and are removed on exit.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "baselines.hpp"
#include "chain.hpp"
#include "estimation.hpp"
#include "executor.hpp"
#include "likelihood.hpp"
#include "poset.hpp"
#include "priors.hpp"
#include "rng.hpp"
#include "sampler.hpp"
#include "trace.hpp"

namespace fs = std::filesystem;
using namespace bpop;
using nlohmann::json;

namespace {

fs::path g_scratch;

Bits make_set(int m, std::initializer_list<int> members) {
    Bits b(m);
    for (int i : members) b.set(i);
    return b;
}

Poset diamond() {
    return Poset::transitive_closure(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
}

Poset gate5() {
    return Poset::transitive_closure(5, {{0, 2}, {1, 2}, {1, 3}, {2, 4}});
}

ActionCatalog letters(int m, char prefix) {
    std::vector<std::string> names;
    for (int i = 0; i < m; ++i) names.push_back(std::string(1, prefix) + std::to_string(i + 1));
    return ActionCatalog(names);
}

std::string fmt(double x, int prec = 4) {
    std::ostringstream os;
    os.precision(prec);
    os << x;
    return os.str();
}

uint64_t brute_force_extensions(const Poset& p) {
    std::vector<int> perm(size_t(p.m()), 0);
    std::iota(perm.begin(), perm.end(), 0);
    uint64_t n = 0;
    do {
        if (p.is_linear_extension(perm)) ++n;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return n;
}

template <class Cdf>
double ks_statistic(std::vector<double> v, Cdf cdf) {
    std::sort(v.begin(), v.end());
    const double n = double(v.size());
    double d = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
        double c = cdf(v[i]);
        d = std::max(d, std::max(std::abs(c - double(i) / n), std::abs(double(i + 1) / n - c)));
    }
    return d;
}

double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Results criterion 5 hands to criterion 6 and 7.
struct RecoveryRun {
    std::string name;
    EdgeMarginals em;
    Poset truth;
};
std::vector<RecoveryRun> g_runs;
TraceSet g_diamond_traces;

// ---------------------------------------------------------------------------

// 1. Step probabilities on the diamond reproduce their closed forms.
bool c1(std::string& detail) {
    const Poset d = diamond();
    struct Row {
        Bits remaining;
        int y;
        double coef_inlier, noise_div; // p = coef*(1-eps) + eps/noise_div
    };
    const std::vector<Row> rows = {
        {make_set(4, {0, 1, 2, 3}), 0, 1.0, 4.0},
        {make_set(4, {1, 2, 3}), 2, 0.5, 3.0},
        {make_set(4, {1, 3}), 3, 0.0, 2.0},
        {make_set(4, {1}), 1, 1.0, 1.0},
    };
    double worst = 0.0;
    for (double eps : {0.0, 0.01, 0.5})
        for (double beta : {1.0, 2.5})
            for (const Row& r : rows) {
                double got = step_probability(r.y, r.remaining, d, {beta, eps});
                double want = r.coef_inlier * (1.0 - eps) + eps / r.noise_div;
                worst = std::max(worst, std::abs(got - want));
            }
    detail = "max |p - closed form| = " + fmt(worst, 3) + " over eps in {0, 0.01, 0.5}";
    return worst <= 1e-12;
}

// 2. Closure <-> reduction round-trips: the worked 5-node example, then 1000
//    random dominance orders up to m = 12.
bool c2(std::string& detail) {
    const std::vector<std::pair<int, int>> closed = {{0, 2}, {0, 4}, {1, 2},
                                                     {1, 3}, {1, 4}, {2, 4}};
    Poset p = Poset::transitive_closure(5, closed);
    if (p.closure_edges() != closed) {
        detail = "5-node example closure disagrees";
        return false;
    }
    CoverGraph cov = p.reduction();
    const std::vector<std::pair<int, int>> want_cover = {{0, 2}, {1, 2}, {1, 3}, {2, 4}};
    if (cov.edges != want_cover) {
        detail = "5-node example cover disagrees";
        return false;
    }
    if (!(Poset::from_cover(cov) == p)) {
        detail = "5-node example does not round-trip";
        return false;
    }

    Rng rng(2024);
    for (int t = 0; t < 1000; ++t) {
        int m = 2 + int(rng.below(11));
        int K = 1 + int(rng.below(3));
        std::vector<std::vector<double>> U(size_t(m), std::vector<double>(size_t(K), 0.0));
        for (auto& row : U)
            for (double& x : row) x = rng.normal();
        Poset d = Poset::dominance_order(U);
        if (!(Poset::from_cover(d.reduction()) == d)) {
            detail = "round-trip identity failed at instance " + std::to_string(t);
            return false;
        }
    }
    detail = "worked example cover + 1000 random dominance orders (m <= 12)";
    return true;
}

// 3. Exact extension counts match brute-force permutation filtering.
bool c3(std::string& detail) {
    if (count_linear_extensions(diamond()) != 2 || brute_force_extensions(diamond()) != 2) {
        detail = "diamond count is not 2";
        return false;
    }
    if (count_linear_extensions(gate5()) != 7 || brute_force_extensions(gate5()) != 7) {
        detail = "5-node example count is not 7";
        return false;
    }
    Rng rng(71);
    for (int t = 0; t < 500; ++t) {
        int m = 2 + int(rng.below(7));
        Poset p;
        if (t % 2 == 0) {
            int K = 1 + int(rng.below(3));
            std::vector<std::vector<double>> U(size_t(m), std::vector<double>(size_t(K), 0.0));
            for (auto& row : U)
                for (double& x : row) x = rng.normal();
            p = Poset::dominance_order(U);
        } else {
            std::vector<int> order(size_t(m), 0);
            std::iota(order.begin(), order.end(), 0);
            rng.shuffle(order);
            double q = 0.1 + 0.5 * rng.uniform();
            std::vector<std::pair<int, int>> rel;
            for (int i = 0; i < m; ++i)
                for (int j = i + 1; j < m; ++j)
                    if (rng.uniform() < q) rel.push_back({order[size_t(i)], order[size_t(j)]});
            p = Poset::transitive_closure(m, rel);
        }
        uint64_t fast = count_linear_extensions(p);
        uint64_t slow = brute_force_extensions(p);
        if (fast != slow) {
            detail = "mismatch at instance " + std::to_string(t) + ": " +
                     std::to_string(fast) + " vs " + std::to_string(slow);
            return false;
        }
    }
    detail = "500 random posets (m <= 8) + both worked examples";
    return true;
}

// 4. With the likelihood disabled the chain reproduces its own priors:
//    K within TV 0.05 of the truncated Poisson, rho/beta/U passing
//    one-sample KS at level 0.01 against Beta(1,1), Gamma(2,1) and N(0,1).
bool c4(std::string& detail) {
    const int64_t kDraws = 100000;
    const int64_t kThin = 1000;
    const int64_t kBurn = 1000000;

    TraceSet ts;
    ts.catalog = ActionCatalog({"x", "y", "z"});
    SamplerConfig cfg;
    cfg.likelihood = LikelihoodKind::none;
    cfg.iterations = kBurn + kDraws * kThin; // documents the manual drive below
    cfg.burn_in = 0.0;
    cfg.thin = kThin;
    // The default rho walk diffuses slowly through the uniform tails; a wider
    // factor range decorrelates the thinned draws without moving the target.
    cfg.hyper.rho_step = 0.5;
    Sampler s(cfg, ts, 2061);

    std::vector<Sampler::Kernel> cycle;
    size_t ci = 0;
    auto advance = [&] {
        if (ci == cycle.size()) {
            cycle = s.build_cycle();
            ci = 0;
        }
        s.step(cycle[ci++]);
    };

    for (int64_t i = 0; i < kBurn; ++i) advance();
    std::map<int, int64_t> k_hist;
    std::vector<double> rho_v, beta_v, u_v;
    rho_v.reserve(size_t(kDraws));
    beta_v.reserve(size_t(kDraws));
    u_v.reserve(size_t(kDraws));
    for (int64_t d = 0; d < kDraws; ++d) {
        for (int64_t i = 0; i < kThin; ++i) advance();
        const ChainState& st = s.state();
        ++k_hist[st.K()];
        rho_v.push_back(st.rho);
        beta_v.push_back(st.beta);
        u_v.push_back(st.U[0][0]); // marginally standard normal for every K
    }

    const double lambda = 3.0;
    double tv = 0.0;
    const double norm = 1.0 - std::exp(-lambda);
    double logpk = -lambda + std::log(lambda); // log pmf at k = 1, untruncated
    for (int k = 1; k <= 80; ++k) {
        double pk = std::exp(logpk) / norm;
        auto it = k_hist.find(k);
        double hat = it == k_hist.end() ? 0.0 : double(it->second) / double(kDraws);
        tv += std::abs(hat - pk);
        logpk += std::log(lambda / double(k + 1));
    }
    tv *= 0.5;

    const double crit = 1.62762 / std::sqrt(double(kDraws)); // two-sided, level 0.01
    double d_rho = ks_statistic(rho_v, [](double x) { return x; });
    double d_beta = ks_statistic(beta_v, [](double x) { return 1.0 - std::exp(-x) * (1.0 + x); });
    double d_u = ks_statistic(u_v, phi);

    detail = "TV(K) = " + fmt(tv, 3) + " (<= 0.05); KS rho = " + fmt(d_rho, 3) +
             ", beta = " + fmt(d_beta, 3) + ", U = " + fmt(d_u, 3) + " (crit " + fmt(crit, 3) + ")";
    return tv <= 0.05 && d_rho <= crit && d_beta <= crit && d_u <= crit;
}

// 5. Structure recovery on curated traces: full pair coverage gives a perfect
//    threshold estimate; a single trace over-constrains.
bool c5(std::string& detail) {
    struct Case {
        std::string name;
        ActionCatalog catalog;
        Poset truth;
    };
    const std::vector<Case> cases = {
        {"diamond", letters(4, 'a'), diamond()},
        {"gate", letters(5, 'b'), gate5()},
    };

    SamplerConfig cfg;
    cfg.iterations = 200000;
    cfg.burn_in = 0.5;
    cfg.thin = 100;
    cfg.epsilon = 0.01;

    std::string note;
    for (const Case& c : cases) {
        TraceSet ts = curate_to_coverage(c.catalog, c.truth, 1.0, 7, 10000, 20);
        if (ip_coverage(ts, c.truth) != 1.0) {
            detail = c.name + ": curation missed full pair coverage";
            return false;
        }
        fs::path path = g_scratch / ("chain-" + c.name + ".jsonl");
        run_chain(cfg, ts, 1, path.string());
        Chain chain = chain_load(path.string());
        EdgeMarginals em = edge_marginals(chain);
        Poset est = threshold_estimate(em, 1.0 / 3.0);
        RecoveryReport rep = recovery_report(est, c.truth, ts);
        if (rep.edges.f1 != 1.0 || rep.feasibility != 1.0) {
            detail = c.name + ": F1 = " + fmt(rep.edges.f1) + ", feasibility = " + fmt(rep.feasibility);
            return false;
        }
        g_runs.push_back({c.name, em, c.truth});
        if (c.name == "diamond") g_diamond_traces = ts;
        note += c.name + " F1 = 1, feas = 1; ";
    }

    // One trace leaves the incomparable pair unwitnessed in one direction and
    // the posterior orders it, so precision must drop.
    TraceSet one;
    one.catalog = letters(4, 'a');
    one.traces.push_back({"t0", {0, 1, 2, 3}, {}});
    fs::path path = g_scratch / "chain-diamond-single.jsonl";
    run_chain(cfg, one, 1, path.string());
    Chain chain = chain_load(path.string());
    EdgeMarginals em = edge_marginals(chain);
    Poset est = threshold_estimate(em, 1.0 / 3.0);
    RecoveryReport rep = recovery_report(est, diamond(), one);
    g_runs.push_back({"diamond-single", em, diamond()});
    if (rep.edges.f1 >= 1.0) {
        detail = "single-trace estimate did not over-constrain (F1 = " + fmt(rep.edges.f1) + ")";
        return false;
    }
    detail = note + "single trace F1 = " + fmt(rep.edges.f1) + " < 1";
    return true;
}

// 6. Threshold(1/3) and mode estimates agree on every chain from criterion 5
//    whenever no pair splits its relation mass two ways at 1/3.
bool c6(std::string& detail) {
    if (g_runs.empty()) {
        detail = "no chains to check (criterion 5 did not run)";
        return false;
    }
    std::string note;
    for (const RecoveryRun& r : g_runs) {
        bool split = false;
        for (int i = 0; i < r.em.m && !split; ++i)
            for (int j = i + 1; j < r.em.m && !split; ++j) {
                double pij = r.em.at(i, j), pji = r.em.at(j, i);
                int heavy = (pij >= 1.0 / 3.0) + (pji >= 1.0 / 3.0) +
                            (1.0 - pij - pji >= 1.0 / 3.0);
                split = heavy >= 2;
            }
        if (split) {
            note += r.name + " split (vacuous); ";
            continue;
        }
        if (!(threshold_estimate(r.em, 1.0 / 3.0) == mode_estimate(r.em))) {
            detail = r.name + ": threshold(1/3) != mode without a mass split";
            return false;
        }
        note += r.name + " agrees; ";
    }
    detail = note;
    return true;
}

// 7. Baselines: majority vote recovers the diamond from its two extensions;
//    the queue-jump chain's mode matches the frontier-softmax mode; a
//    22-action trace trips the extension-counting cap.
bool c7(std::string& detail) {
    TraceSet two;
    two.catalog = letters(4, 'a');
    two.traces.push_back({"t0", {0, 1, 2, 3}, {}});
    two.traces.push_back({"t1", {0, 2, 1, 3}, {}});
    if (!(majority_baseline(two, 0.5) == diamond())) {
        detail = "majority vote missed the diamond cover";
        return false;
    }

    const RecoveryRun* fs_run = nullptr;
    for (const RecoveryRun& r : g_runs)
        if (r.name == "diamond") fs_run = &r;
    if (!fs_run || g_diamond_traces.traces.empty()) {
        detail = "no frontier-softmax diamond chain to compare against";
        return false;
    }
    SamplerConfig cfg;
    cfg.iterations = 100000;
    cfg.burn_in = 0.5;
    cfg.thin = 100;
    cfg.epsilon = 0.01;
    cfg.likelihood = LikelihoodKind::queue_jump;
    fs::path path = g_scratch / "chain-diamond-qj.jsonl";
    run_chain(cfg, g_diamond_traces, 3, path.string());
    Chain chain = chain_load(path.string());
    Poset qj_mode = mode_estimate(edge_marginals(chain));
    Poset fs_mode = mode_estimate(fs_run->em);
    if (!(qj_mode == fs_mode)) {
        detail = "queue-jump mode differs from frontier-softmax mode";
        return false;
    }

    std::vector<std::string> names;
    std::vector<int> all;
    for (int i = 0; i < 22; ++i) {
        names.push_back("c" + std::to_string(i + 1));
        all.push_back(i);
    }
    TraceSet wide;
    wide.catalog = ActionCatalog(names);
    wide.traces.push_back({"t0", all, {}});
    bool tripped = false;
    try {
        Sampler reject(cfg, wide, 1);
    } catch (const Error& e) {
        tripped = e.code == Errc::too_large;
    }
    if (!tripped) {
        detail = "22-action queue-jump setup was not rejected";
        return false;
    }
    detail = "majority exact; queue-jump mode == frontier-softmax mode == truth: " +
             std::string(qj_mode == diamond() ? "yes" : "no") + "; 22-action cap trips";
    return qj_mode == diamond();
}

// 8. trace_loglik cost grows at most 2.5x per doubling of trace length on the
//    empty order (medians over repeated batches).
bool c8(std::string& detail) {
    const std::vector<int> sizes = {50, 100, 200, 400};
    const int kCalls = 2000, kBatches = 9;
    const LikelihoodParams lp{1.0, 0.01};
    volatile double sink = 0.0;

    std::vector<double> med;
    for (int T : sizes) {
        Poset p(T);
        std::vector<int> trace(size_t(T), 0);
        std::iota(trace.begin(), trace.end(), 0);
        for (int w = 0; w < kCalls / 4; ++w) sink = sink + trace_loglik(trace, p, lp);
        std::vector<double> batch;
        for (int b = 0; b < kBatches; ++b) {
            auto t0 = std::chrono::steady_clock::now();
            for (int c = 0; c < kCalls; ++c) sink = sink + trace_loglik(trace, p, lp);
            auto t1 = std::chrono::steady_clock::now();
            batch.push_back(std::chrono::duration<double>(t1 - t0).count());
        }
        std::sort(batch.begin(), batch.end());
        med.push_back(batch[size_t(kBatches / 2)]);
    }
    (void)sink;

    std::string note = "doubling ratios";
    bool ok = true;
    for (size_t i = 1; i < med.size(); ++i) {
        double ratio = med[i] / med[i - 1];
        note += " " + fmt(ratio, 3);
        ok = ok && ratio <= 2.5;
    }
    detail = note + " (bound 2.5; T = 50..400)";
    return ok;
}

// 9. Executor: the true plan runs 4 actions in 3 waves with no fallback;
//    unpinning the final action halts expert mode on its missing inputs and
//    hybrid mode repairs it with exactly one fallback; dropping just the
//    security-group edge is flagged at compile time.
bool c9(std::string& detail) {
    Scenario sc = scenario_load(std::string(BPOP_DATA_DIR) + "/scenarios/simple_ecs.json");
    const int vpc = sc.catalog.index("CreateVpc");
    const int vsw = sc.catalog.index("CreateVSwitch");
    const int sg = sc.catalog.index("CreateSecurityGroup");
    const int ri = sc.catalog.index("RunInstances");

    CompiledSOP truth_sop = compile_sop(sc.catalog, sc.truth, sc.registry);
    ExecutionReport expert = run_expert(truth_sop, sc, sc.starting_blackboard(), 1);
    std::set<int> waves;
    for (const StepRecord& r : expert.log) waves.insert(r.t);
    if (!expert.success || expert.log.size() != 4 || waves.size() != 3 || !expert.fallbacks.empty()) {
        detail = "true plan did not run 4 actions in 3 waves without fallback";
        return false;
    }

    Poset unpinned = Poset::transitive_closure(4, {{vpc, vsw}, {vpc, sg}});
    CompiledSOP flawed = compile_sop(sc.catalog, unpinned, sc.registry);
    ExecutionReport halt = run_expert(flawed, sc, sc.starting_blackboard(), 1);
    bool saw_missing = false;
    for (const StepRecord& r : halt.log)
        if (r.action == "RunInstances" && !r.done)
            for (const std::string& slot : r.missing) saw_missing |= slot == "SecurityGroupId";
    if (halt.success || !saw_missing) {
        detail = "expert mode did not halt on the missing SecurityGroupId input";
        return false;
    }

    ExecutionReport hybrid = run_hybrid(flawed, sc, sc.starting_blackboard(), 1);
    if (!hybrid.success || hybrid.fallbacks.size() != 1) {
        detail = "hybrid mode did not recover with exactly one fallback event";
        return false;
    }

    // A single dropped edge cannot fault at run time (the producer still lands
    // in an earlier wave), but compilation must still name the risk.
    Poset one_gone = Poset::transitive_closure(4, {{vpc, vsw}, {vpc, sg}, {vsw, ri}});
    CompiledSOP warned = compile_sop(sc.catalog, one_gone, sc.registry);
    bool named = false;
    for (const CompileWarning& w : warned.warnings)
        named |= w.action == "RunInstances" && w.slot == "SecurityGroupId";
    if (!named) {
        detail = "dropping the security-group edge produced no compile warning";
        return false;
    }
    detail = "expert 4 actions / 3 waves; halt names SecurityGroupId; hybrid repairs with 1 fallback";
    return true;
}

// 10. Rerunning every pipeline stage with the same config and seeds produces
//     byte-identical artifacts.
bool c10(std::string& detail) {
    const fs::path cfg_path = g_scratch / "determinism.json";
    json cfg = {
        {"name", "determinism"},
        {"graph", std::string(BPOP_DATA_DIR) + "/graphs/simple_ecs.json"},
        {"scenario", std::string(BPOP_DATA_DIR) + "/scenarios/simple_ecs.json"},
        {"synthesize", {{"target_ip_cov", 1.0}, {"seed", 7}, {"min_traces", 20}}},
        {"sampler",
         {{"iterations", 20000},
          {"burn_in", 0.5},
          {"thin", 20},
          {"epsilon", 0.01},
          {"likelihood", "frontier-softmax"},
          {"seeds", {1, 2}}}},
        {"estimator", {{"alphas", {1.0 / 3.0}}, {"mode", true}}},
        {"baselines", {{"tau", 0.5}, {"delta", 0.5}}},
    };
    std::ofstream(cfg_path) << cfg.dump(2) << "\n";

    const std::vector<std::string> stages = {
        "simulate",
        "infer",
        "estimate",
        "baseline --method majority",
        "baseline --method qj",
        "evaluate",
        "execute --mode expert",
        "execute --mode hybrid",
    };
    for (int run = 1; run <= 2; ++run) {
        fs::path dir = g_scratch / ("run" + std::to_string(run));
        for (const std::string& stage : stages) {
            std::string cmd = std::string(BPOP_CLI_PATH) + " " + stage + " --config \"" +
                              cfg_path.string() + "\" --out \"" + dir.string() + "\" > /dev/null";
            if (std::system(cmd.c_str()) != 0) {
                detail = "stage '" + stage + "' failed on run " + std::to_string(run);
                return false;
            }
        }
    }

    auto listing = [](const fs::path& dir) {
        std::vector<std::string> names;
        for (const auto& entry : fs::directory_iterator(dir))
            names.push_back(entry.path().filename().string());
        std::sort(names.begin(), names.end());
        return names;
    };
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    };
    const fs::path d1 = g_scratch / "run1", d2 = g_scratch / "run2";
    std::vector<std::string> names = listing(d1);
    if (names != listing(d2)) {
        detail = "the two runs produced different artifact sets";
        return false;
    }
    for (const std::string& name : names)
        if (slurp(d1 / name) != slurp(d2 / name)) {
            detail = name + " differs between reruns";
            return false;
        }
    detail = std::to_string(names.size()) + " artifacts byte-identical across reruns";
    return true;
}

} // namespace

int main() {
    g_scratch = fs::temp_directory_path() / ("bpop-acceptance-" + std::to_string(::getpid()));
    fs::create_directories(g_scratch);

    struct Criterion {
        const char* name;
        bool (*run)(std::string&);
        double budget_s; // pinned per-criterion runtime cap
    };
    const std::vector<Criterion> criteria = {
        {"step probabilities match their closed forms to 1e-12", c1, 1.0},
        {"closure/reduction round-trip on the worked example and 1000 random orders", c2, 10.0},
        {"extension counts match brute-force enumeration on 500 posets", c3, 60.0},
        {"prior-only chain recovers its hyperpriors (TV and KS bounds)", c4, 300.0},
        {"curated traces at full coverage recover the truth exactly", c5, 1800.0},
        {"threshold(1/3) and mode estimates agree off mass splits", c6, 60.0},
        {"baseline fidelity: majority, queue-jump mode, counting cap", c7, 300.0},
        {"trace scoring scales linearly in trace length", c8, 60.0},
        {"executor waves, fault halt, and single-fallback repair", c9, 1.0},
        {"pipeline reruns are byte-identical", c10, 600.0},
    };

    int failed = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        std::string detail;
        bool ok = false;
        auto t0 = std::chrono::steady_clock::now();
        try {
            ok = criteria[i].run(detail);
        } catch (const Error& e) {
            detail = std::string("error: ") + e.what();
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (elapsed > criteria[i].budget_s) {
            ok = false;
            detail += " [over budget " + fmt(criteria[i].budget_s, 3) + "s]";
        }
        if (!ok) ++failed;
        std::printf("[%s] %2zu. %s: %s [%.1fs]\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].name,
                    detail.c_str(), elapsed);
        std::fflush(stdout);
    }

    std::error_code ec;
    fs::remove_all(g_scratch, ec);
    if (failed) std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed;
}
