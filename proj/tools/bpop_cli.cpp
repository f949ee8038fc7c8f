// Command-line front end. Everything domain-level goes through the C API in
// bpop/bpop.h; this file only handles experiment configs, file layout, and
// seed orchestration.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bpop/bpop.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliError {
    int exit_code;
    std::string message;
};

[[noreturn]] void die(int code, const std::string& msg) { throw CliError{code, msg}; }

int exit_code_for(bpop_status s) {
    if (s == BPOP_ETOO_LARGE || s == BPOP_EUNREACHABLE) return 3;
    if (s == BPOP_EINTERNAL) return 1;
    return 2;
}

void check(bpop_status s, const std::string& context) {
    if (s == BPOP_OK) return;
    die(exit_code_for(s), context + ": " + bpop_last_error());
}

std::string take_string(char* s) {
    std::string out(s);
    bpop_string_free(s);
    return out;
}

// RAII wrappers over the opaque handles.
using GraphPtr = std::unique_ptr<bpop_graph, decltype(&bpop_graph_free)>;
using TracesPtr = std::unique_ptr<bpop_traces, decltype(&bpop_traces_free)>;
using ChainPtr = std::unique_ptr<bpop_chain, decltype(&bpop_chain_free)>;
using ScenarioPtr = std::unique_ptr<bpop_scenario, decltype(&bpop_scenario_free)>;

GraphPtr load_graph(const std::string& path) {
    bpop_graph* g = nullptr;
    check(bpop_graph_load(path.c_str(), &g), path);
    return GraphPtr(g, &bpop_graph_free);
}

TracesPtr load_traces(const std::string& path) {
    bpop_traces* t = nullptr;
    check(bpop_traces_load(path.c_str(), &t), path);
    return TracesPtr(t, &bpop_traces_free);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f || !(f << text) || !f.flush()) die(2, "cannot write " + path.string());
}

std::string read_text(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) die(2, "cannot read " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string format_alpha(double a) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", a);
    return buf;
}

struct Experiment {
    json cfg;
    fs::path dir; // output directory

    static Experiment load(const std::string& config_path, const std::string& out_override) {
        json cfg = json::parse(read_text(config_path), nullptr, false);
        if (cfg.is_discarded() || !cfg.is_object()) die(2, config_path + ": not a JSON object");
        if (!cfg.contains("name") || !cfg["name"].is_string()) die(2, config_path + ": missing 'name'");
        Experiment e;
        e.cfg = std::move(cfg);
        if (!out_override.empty())
            e.dir = out_override;
        else if (e.cfg.contains("out"))
            e.dir = e.cfg["out"].get<std::string>();
        else
            e.dir = fs::path("runs") / e.cfg["name"].get<std::string>();
        // Paths inside the config resolve relative to the config file.
        fs::path base = fs::path(config_path).parent_path();
        for (const char* key : {"graph", "traces", "scenario"})
            if (e.cfg.contains(key)) {
                fs::path p = e.cfg[key].get<std::string>();
                if (p.is_relative()) e.cfg[key] = (base / p).string();
            }
        return e;
    }

    std::string need_path(const char* key) const {
        if (!cfg.contains(key) || !cfg[key].is_string()) die(2, std::string("config needs '") + key + "'");
        return cfg[key].get<std::string>();
    }

    json sampler_block() const {
        return cfg.contains("sampler") ? cfg["sampler"] : json::object();
    }

    std::vector<unsigned long long> seeds(long long override_seed) const {
        if (override_seed >= 0) return {(unsigned long long)override_seed};
        json s = sampler_block();
        std::vector<unsigned long long> out;
        if (s.contains("seeds")) {
            for (const auto& v : s["seeds"]) out.push_back(v.get<unsigned long long>());
            if (out.empty()) die(2, "config 'sampler.seeds' must not be empty");
        } else {
            out.push_back(1);
        }
        return out;
    }

    std::vector<double> alphas() const {
        std::vector<double> out;
        if (cfg.contains("estimator") && cfg["estimator"].contains("alphas"))
            for (const auto& v : cfg["estimator"]["alphas"]) out.push_back(v.get<double>());
        if (out.empty()) out.push_back(1.0 / 3.0);
        return out;
    }

    bool mode_estimator() const {
        if (cfg.contains("estimator") && cfg["estimator"].contains("mode"))
            return cfg["estimator"]["mode"].get<bool>();
        return true;
    }
};

// Traces named by the config: an explicit file, a previously synthesized
// traces.json in the run directory, or in-memory synthesis (deterministic in
// the config seed, so commands agree without an intermediate file).
TracesPtr experiment_traces(const Experiment& e) {
    if (e.cfg.contains("traces")) return load_traces(e.cfg["traces"].get<std::string>());
    fs::path cached = e.dir / "traces.json";
    if (fs::exists(cached)) return load_traces(cached.string());
    if (!e.cfg.contains("synthesize")) die(2, "config needs 'traces' or 'synthesize'");
    const json& syn = e.cfg["synthesize"];
    GraphPtr truth = load_graph(e.need_path("graph"));
    bpop_traces* t = nullptr;
    check(bpop_simulate(truth.get(), syn.value("target_ip_cov", 1.0),
                        syn.value("seed", 1ull), syn.value("max_attempts", 10000),
                        syn.value("min_traces", 0), &t),
          "synthesize");
    return TracesPtr(t, &bpop_traces_free);
}

std::vector<fs::path> chain_files(const Experiment& e, const std::vector<unsigned long long>& seeds) {
    std::vector<fs::path> out;
    for (auto s : seeds) out.push_back(e.dir / ("chain-" + std::to_string(s) + ".jsonl"));
    return out;
}

ChainPtr load_chains(const std::vector<fs::path>& files) {
    std::vector<std::string> owned;
    std::vector<const char*> ptrs;
    for (const auto& f : files) {
        if (!fs::exists(f)) die(2, "missing chain file " + f.string() + " (run 'infer' first)");
        owned.push_back(f.string());
    }
    for (const auto& s : owned) ptrs.push_back(s.c_str());
    bpop_chain* c = nullptr;
    check(bpop_chain_load(ptrs.data(), int(ptrs.size()), &c), "chain load");
    return ChainPtr(c, &bpop_chain_free);
}

void write_graph_outputs(bpop_graph* g, const fs::path& stem) {
    char* s = nullptr;
    check(bpop_graph_to_json(g, &s), "serialize " + stem.string());
    write_text(fs::path(stem).concat(".json"), take_string(s));
    check(bpop_graph_to_dot(g, &s), "serialize " + stem.string());
    write_text(fs::path(stem).concat(".dot"), take_string(s));
}

// ---- subcommands ----

int cmd_simulate(const Experiment& e) {
    if (!e.cfg.contains("synthesize")) die(2, "config needs a 'synthesize' block");
    fs::create_directories(e.dir);
    TracesPtr traces = experiment_traces(e);
    char* s = nullptr;
    check(bpop_traces_to_json(traces.get(), &s), "serialize traces");
    write_text(e.dir / "traces.json", take_string(s));
    GraphPtr truth = load_graph(e.need_path("graph"));
    double cov = 0.0;
    check(bpop_ip_coverage(traces.get(), truth.get(), &cov), "coverage");
    std::cout << "traces: " << bpop_traces_count(traces.get()) << "\n"
              << "realized_ip_cov: " << cov << "\n"
              << "wrote " << (e.dir / "traces.json").string() << "\n";
    return 0;
}

int cmd_infer(const Experiment& e, long long seed_override) {
    fs::create_directories(e.dir);
    TracesPtr traces = experiment_traces(e);
    json sampler = e.sampler_block();
    auto seeds = e.seeds(seed_override);
    auto files = chain_files(e, seeds);
    const std::string cfg_text = sampler.dump();

    std::vector<std::thread> workers;
    std::vector<bpop_status> results(seeds.size(), BPOP_OK);
    std::vector<std::string> errors(seeds.size());
    for (size_t i = 0; i < seeds.size(); ++i)
        workers.emplace_back([&, i] {
            results[i] = bpop_run_chain(cfg_text.c_str(), traces.get(), seeds[i],
                                        files[i].string().c_str());
            if (results[i] != BPOP_OK) errors[i] = bpop_last_error();
        });
    for (auto& w : workers) w.join();
    for (size_t i = 0; i < seeds.size(); ++i)
        if (results[i] != BPOP_OK)
            die(exit_code_for(results[i]),
                "chain seed " + std::to_string(seeds[i]) + ": " + errors[i]);
    for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
    return 0;
}

int cmd_estimate(const Experiment& e, long long seed_override, std::vector<double> alphas_override) {
    fs::create_directories(e.dir);
    ChainPtr chain = load_chains(chain_files(e, e.seeds(seed_override)));

    char* s = nullptr;
    check(bpop_chain_marginals_csv(chain.get(), &s), "marginals");
    write_text(e.dir / "marginals.csv", take_string(s));

    std::vector<double> alphas = alphas_override.empty() ? e.alphas() : alphas_override;
    std::string third_json; // threshold output at alpha = 1/3, for the agreement flag
    for (double a : alphas) {
        bpop_graph* g = nullptr;
        check(bpop_estimate_threshold(chain.get(), a, &g), "threshold estimate");
        GraphPtr guard(g, &bpop_graph_free);
        write_graph_outputs(g, e.dir / ("estimate-" + format_alpha(a)));
        if (std::abs(a - 1.0 / 3.0) < 1e-12) {
            char* t = nullptr;
            check(bpop_graph_to_json(g, &t), "serialize");
            third_json = take_string(t);
        }
        std::cout << "wrote " << (e.dir / ("estimate-" + format_alpha(a) + ".json")).string() << "\n";
    }
    if (e.mode_estimator()) {
        bpop_graph* g = nullptr;
        check(bpop_estimate_mode(chain.get(), &g), "mode estimate");
        GraphPtr guard(g, &bpop_graph_free);
        write_graph_outputs(g, e.dir / "estimate-mode");
        std::cout << "wrote " << (e.dir / "estimate-mode.json").string() << "\n";
        if (!third_json.empty()) {
            char* t = nullptr;
            check(bpop_graph_to_json(g, &t), "serialize");
            std::cout << "mode_agrees_with_third: "
                      << (take_string(t) == third_json ? "true" : "false") << "\n";
        }
    }
    std::cout << "samples: " << bpop_chain_sample_count(chain.get()) << "\n";
    return 0;
}

std::string evaluate_one(bpop_graph* estimate, bpop_graph* truth, bpop_traces* traces) {
    char* s = nullptr;
    check(bpop_evaluate(estimate, truth, traces, &s), "evaluate");
    return take_string(s);
}

int cmd_evaluate(const Experiment& e, const std::string& estimate_path) {
    GraphPtr truth = load_graph(e.need_path("graph"));
    TracesPtr traces = experiment_traces(e);
    if (!estimate_path.empty()) {
        GraphPtr est = load_graph(estimate_path);
        std::cout << evaluate_one(est.get(), truth.get(), traces.get());
        return 0;
    }
    // Score every estimator and baseline artifact present in the run directory.
    json report = json::object();
    std::vector<fs::path> targets;
    if (fs::exists(e.dir))
        for (const auto& entry : fs::directory_iterator(e.dir)) {
            const std::string name = entry.path().filename().string();
            if (entry.path().extension() == ".json" &&
                (name.rfind("estimate-", 0) == 0 || name.rfind("baseline-", 0) == 0))
                targets.push_back(entry.path());
        }
    if (targets.empty()) die(2, "no estimate-*.json or baseline-*.json in " + e.dir.string());
    std::sort(targets.begin(), targets.end());
    for (const auto& path : targets) {
        GraphPtr est = load_graph(path.string());
        report[path.stem().string()] = json::parse(evaluate_one(est.get(), truth.get(), traces.get()));
    }
    write_text(e.dir / "report.json", report.dump(2) + "\n");
    std::cout << report.dump(2) << "\n";
    return 0;
}

int cmd_baseline(const Experiment& e, const std::string& method, long long seed_override) {
    fs::create_directories(e.dir);
    TracesPtr traces = experiment_traces(e);
    json params = e.cfg.contains("baselines") ? e.cfg["baselines"] : json::object();
    bpop_graph* g = nullptr;
    if (method == "majority") {
        check(bpop_baseline_majority(traces.get(), params.value("tau", 0.5), &g), "majority");
    } else if (method == "heuristics") {
        check(bpop_baseline_heuristics(traces.get(), params.value("delta", 0.5), &g), "heuristics");
    } else if (method == "qj") {
        json sampler = e.sampler_block();
        sampler["likelihood"] = "queue-jump";
        auto seed = e.seeds(seed_override)[0];
        fs::path chain_path = e.dir / ("chain-qj-" + std::to_string(seed) + ".jsonl");
        check(bpop_run_chain(sampler.dump().c_str(), traces.get(), seed, chain_path.string().c_str()),
              "queue-jump chain");
        ChainPtr chain = load_chains({chain_path});
        check(bpop_estimate_threshold(chain.get(), e.alphas()[0], &g), "queue-jump estimate");
    } else {
        die(2, "unknown method '" + method + "' (majority|heuristics|qj)");
    }
    GraphPtr guard(g, &bpop_graph_free);
    write_graph_outputs(g, e.dir / ("baseline-" + method));
    std::cout << "wrote " << (e.dir / ("baseline-" + method + ".json")).string() << "\n";
    return 0;
}

int cmd_execute(const Experiment& e, const std::string& mode, const std::string& estimate_path,
                long long seed_override) {
    fs::create_directories(e.dir);
    ScenarioPtr scenario(nullptr, &bpop_scenario_free);
    {
        bpop_scenario* s = nullptr;
        check(bpop_scenario_load(e.need_path("scenario").c_str(), &s), "scenario");
        scenario.reset(s);
    }
    std::string sop_path = estimate_path;
    if (sop_path.empty()) {
        sop_path = (e.dir / ("estimate-" + format_alpha(e.alphas()[0]) + ".json")).string();
        if (!fs::exists(sop_path)) die(2, "no estimate to execute; pass --estimate or run 'estimate'");
    }
    GraphPtr sop = load_graph(sop_path);
    auto seed = e.seeds(seed_override)[0];
    char* s = nullptr;
    check(bpop_execute(sop.get(), scenario.get(), mode.c_str(), seed, &s), "execute");
    const std::string report = take_string(s);
    write_text(e.dir / ("execution-" + mode + ".json"), report);
    std::cout << report;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Partial-order SOP inference and execution"};
    app.require_subcommand(1);

    std::string config_path, out_dir, method = "majority", mode = "expert", estimate_path;
    long long seed = -1;
    std::vector<double> alphas;

    auto add_common = [&](CLI::App* cmd, bool need_config = true) {
        auto* opt = cmd->add_option("--config", config_path, "experiment config JSON");
        if (need_config) opt->required();
        cmd->add_option("--out", out_dir, "output directory override");
        cmd->add_option("--seed", seed, "seed override");
    };

    auto* sim = app.add_subcommand("simulate", "synthesize traces to a coverage target");
    add_common(sim);
    auto* inf = app.add_subcommand("infer", "run MCMC chains over the traces");
    add_common(inf);
    auto* est = app.add_subcommand("estimate", "summarize chains into point estimates");
    add_common(est);
    est->add_option("--alpha", alphas, "threshold(s), repeatable");
    auto* eva = app.add_subcommand("evaluate", "score estimates against the truth graph");
    add_common(eva);
    eva->add_option("--estimate", estimate_path, "score a single graph JSON file");
    auto* bas = app.add_subcommand("baseline", "run a comparison method");
    add_common(bas);
    bas->add_option("--method", method, "majority|heuristics|qj");
    auto* exe = app.add_subcommand("execute", "run a compiled SOP against a scenario");
    add_common(exe);
    exe->add_option("--mode", mode, "expert|hybrid");
    exe->add_option("--estimate", estimate_path, "graph JSON to execute");

    CLI11_PARSE(app, argc, argv);

    try {
        Experiment e = Experiment::load(config_path, out_dir);
        if (sim->parsed()) return cmd_simulate(e);
        if (inf->parsed()) return cmd_infer(e, seed);
        if (est->parsed()) return cmd_estimate(e, seed, alphas);
        if (eva->parsed()) return cmd_evaluate(e, estimate_path);
        if (bas->parsed()) return cmd_baseline(e, method, seed);
        if (exe->parsed()) return cmd_execute(e, mode, estimate_path, seed);
    } catch (const CliError& err) {
        std::cerr << "error: " << err.message << "\n";
        return err.exit_code;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 1;
}
