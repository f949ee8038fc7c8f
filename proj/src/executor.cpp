#include "executor.hpp"

#include <algorithm>
#include <cstdio>
#include <json.hpp>

#include "error.hpp"
#include "io_util.hpp"

namespace bpop {

using nlohmann::json;

namespace {

json parse_json(const std::string& text, const std::string& what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) fail(Errc::schema, what + ": not valid JSON");
    return j;
}

std::vector<std::string> string_list(const json& j, const std::string& what) {
    if (!j.is_array()) fail(Errc::schema, what + " must be an array");
    std::vector<std::string> out;
    for (const auto& v : j) {
        if (!v.is_string() || v.get<std::string>().empty())
            fail(Errc::schema, what + " entries must be nonempty strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

} // namespace

std::map<std::string, std::string> Scenario::starting_blackboard() const {
    if (!initial.empty()) return initial;
    std::map<std::string, std::string> bb;
    for (int i = 0; i < catalog.size(); ++i) {
        const IOEntry& e = registry.at(catalog.name(i));
        for (const std::string& slot : e.inputs) {
            bool produced = false;
            for (const auto& [name, other] : registry)
                if (std::find(other.outputs.begin(), other.outputs.end(), slot) != other.outputs.end()) {
                    produced = true;
                    break;
                }
            if (!produced) bb[slot] = slot + "-given";
        }
    }
    return bb;
}

Scenario scenario_from_json(const std::string& text) {
    json j = parse_json(text, "scenario");
    if (!j.is_object()) fail(Errc::schema, "scenario: top level must be an object");
    for (const auto& [key, _] : j.items())
        if (key != "registry" && key != "truth_edges" && key != "failures" && key != "initial")
            fail(Errc::schema, "scenario: unknown key '" + key + "'");
    if (!j.contains("registry") || !j["registry"].is_object() || j["registry"].empty())
        fail(Errc::schema, "scenario: missing 'registry' object");

    Scenario s;
    std::vector<std::string> names;
    for (const auto& [action, entry] : j["registry"].items()) {
        if (action.empty()) fail(Errc::schema, "scenario: empty action name");
        if (!entry.is_object() || !entry.contains("inputs") || !entry.contains("outputs"))
            fail(Errc::schema, "scenario: registry entry for '" + action + "' needs 'inputs' and 'outputs'");
        IOEntry e;
        e.inputs = string_list(entry["inputs"], "scenario: inputs of '" + action + "'");
        e.outputs = string_list(entry["outputs"], "scenario: outputs of '" + action + "'");
        s.registry[action] = std::move(e);
        names.push_back(action);
    }
    s.catalog = ActionCatalog(std::move(names)); // object keys arrive sorted

    std::vector<std::pair<int, int>> edges;
    if (j.contains("truth_edges")) {
        if (!j["truth_edges"].is_array()) fail(Errc::schema, "scenario: 'truth_edges' must be an array");
        for (const auto& e : j["truth_edges"]) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
                fail(Errc::schema, "scenario: each truth edge must be a [from, to] string pair");
            edges.emplace_back(s.catalog.index(e[0].get<std::string>()),
                               s.catalog.index(e[1].get<std::string>()));
        }
    }
    s.truth = Poset::transitive_closure(s.catalog.size(), edges);

    if (j.contains("failures")) {
        if (!j["failures"].is_object()) fail(Errc::schema, "scenario: 'failures' must be an object");
        for (const auto& [action, mode] : j["failures"].items()) {
            s.catalog.index(action); // must name a registry action
            if (!mode.is_string())
                fail(Errc::schema, "scenario: failure mode for '" + action + "' must be a string");
            const std::string m = mode.get<std::string>();
            if (m == "always")
                s.failures[action] = FailurePolicy::always;
            else if (m == "once")
                s.failures[action] = FailurePolicy::once;
            else
                fail(Errc::schema, "scenario: failure mode must be 'always' or 'once'");
        }
    }

    if (j.contains("initial")) {
        if (!j["initial"].is_object()) fail(Errc::schema, "scenario: 'initial' must be an object");
        for (const auto& [field, value] : j["initial"].items()) {
            if (field.empty() || !value.is_string())
                fail(Errc::schema, "scenario: initial blackboard entries must map fields to strings");
            s.initial[field] = value.get<std::string>();
        }
    }
    return s;
}

Scenario scenario_load(const std::string& path) {
    try {
        return scenario_from_json(read_file(path));
    } catch (const Error& e) {
        if (e.code == Errc::io) throw;
        throw Error(e.code, path + ": " + e.what());
    }
}

CompiledSOP compile_sop(const ActionCatalog& catalog, const Poset& poset, const IORegistry& registry) {
    if (poset.m() != catalog.size()) fail(Errc::invalid_argument, "plan and catalog sizes differ");
    CompiledSOP sop;
    sop.catalog = catalog;
    sop.poset = poset;
    sop.io.resize(catalog.size());
    for (int i = 0; i < catalog.size(); ++i) {
        auto it = registry.find(catalog.name(i));
        if (it == registry.end())
            fail(Errc::registry_gap, "no IO registry entry for action '" + catalog.name(i) + "'");
        sop.io[i] = it->second;
    }
    // A producible input with no producer among the action's predecessors
    // will be absent from the blackboard at dispatch time. Slots nothing
    // produces are expected to arrive in the initial blackboard.
    for (int i = 0; i < catalog.size(); ++i)
        for (const std::string& slot : sop.io[i].inputs) {
            bool producible = false, fed = false;
            for (int b = 0; b < catalog.size(); ++b) {
                const auto& outs = sop.io[b].outputs;
                if (std::find(outs.begin(), outs.end(), slot) == outs.end()) continue;
                producible = true;
                if (poset.precedes(b, i)) fed = true;
            }
            if (producible && !fed)
                sop.warnings.push_back({catalog.name(i), slot,
                                        "input '" + slot + "' of '" + catalog.name(i) +
                                            "' has no producer preceding it in the plan"});
        }
    return sop;
}

std::string mock_token(uint64_t seed, const std::string& action, const std::string& field) {
    uint64_t h = 1469598103934665603ull; // FNV-1a over seed bytes and names
    auto mix = [&](unsigned char c) { h = (h ^ c) * 1099511628211ull; };
    for (int i = 0; i < 8; ++i) mix((unsigned char)(seed >> (8 * i)));
    mix(0x1f);
    for (unsigned char c : action) mix(c);
    mix(0x1f);
    for (unsigned char c : field) mix(c);
    char hex[9];
    std::snprintf(hex, sizeof hex, "%08llx", (unsigned long long)(h & 0xffffffffull));
    return field + "-" + hex;
}

FallbackHook oracle_fallback(const Scenario& scenario) {
    return [&scenario](const Fault& fault, const CompiledSOP& sop, const Bits& done,
                       const std::map<std::string, std::string>&) -> std::vector<int> {
        const std::string name = sop.catalog.name(fault.action);
        const int st = scenario.catalog.find(name);
        std::vector<int> unmet; // scenario ids of pending true prerequisites
        if (st >= 0)
            for (int sp : scenario.truth.predecessor_list(st)) {
                const int local = sop.catalog.find(scenario.catalog.name(sp));
                if (local >= 0 && !done.test(local)) unmet.push_back(sp);
            }
        std::vector<int> plan;
        std::vector<char> taken(unmet.size(), 0);
        for (size_t round = 0; round < unmet.size(); ++round) {
            int pick = -1; // minimal pending prerequisite, lowest name first
            for (size_t k = 0; k < unmet.size(); ++k) {
                if (taken[k]) continue;
                bool blocked = false;
                for (size_t q = 0; q < unmet.size(); ++q)
                    if (!taken[q] && q != k && scenario.truth.precedes(unmet[q], unmet[k])) {
                        blocked = true;
                        break;
                    }
                if (!blocked && (pick < 0 || scenario.catalog.name(unmet[k]) < scenario.catalog.name(unmet[pick])))
                    pick = int(k);
            }
            taken[pick] = 1;
            plan.push_back(sop.catalog.index(scenario.catalog.name(unmet[pick])));
        }
        if (!done.test(fault.action)) plan.push_back(fault.action);
        return plan;
    };
}

namespace {

struct Runner {
    const CompiledSOP& sop;
    const Scenario& scenario;
    uint64_t seed;
    ExecOptions opts;
    FallbackHook hook; // null in expert mode

    std::map<std::string, std::string> bb;
    std::map<std::string, int> invocations; // for fail-once bookkeeping
    Bits done;
    int clock = 0;
    bool fatal = false; // unrecoverable stop (conflict, failed fallback, budget)
    ExecutionReport rep;

    Runner(const CompiledSOP& s, const Scenario& sc, const std::map<std::string, std::string>& initial,
           uint64_t sd, const ExecOptions& o, FallbackHook h)
        : sop(s), scenario(sc), seed(sd), opts(o), hook(std::move(h)), bb(initial), done(s.catalog.size()) {
        rep.mode = hook ? "hybrid" : "expert";
        rep.warnings = sop.warnings;
        if (opts.fallback_budget <= 0) opts.fallback_budget = 4 * sop.catalog.size() + 8;
    }

    std::vector<std::string> missing_inputs(int a, const std::map<std::string, std::string>& view) const {
        std::vector<std::string> miss;
        for (const std::string& slot : sop.io[a].inputs)
            if (!view.count(slot)) miss.push_back(slot);
        return miss;
    }

    bool mock_fails(int a) {
        const std::string& name = sop.catalog.name(a);
        const int nth = invocations[name]++;
        auto it = scenario.failures.find(name);
        if (it == scenario.failures.end()) return false;
        return it->second == FailurePolicy::always || nth == 0;
    }

    // Dispatch one action; appends a log record and on success commits its
    // outputs. Returns the fault if it did not complete.
    std::optional<Fault> dispatch(int a, int t, const std::map<std::string, std::string>& view,
                                  const std::vector<std::string>& frontier, bool via_fallback) {
        StepRecord step;
        step.t = t;
        step.action = sop.catalog.name(a);
        step.frontier = frontier;
        step.via_fallback = via_fallback;
        auto miss = missing_inputs(a, view);
        if (!miss.empty()) {
            step.missing = miss;
            rep.log.push_back(std::move(step));
            return Fault{a, miss, true};
        }
        if (mock_fails(a)) {
            step.note = "api error";
            rep.log.push_back(std::move(step));
            return Fault{a, {}, true};
        }
        for (const std::string& field : sop.io[a].outputs) {
            if (bb.count(field)) {
                step.note = "write conflict: " + field;
                rep.log.push_back(std::move(step));
                return Fault{a, {}, false};
            }
            bb[field] = mock_token(seed, sop.catalog.name(a), field);
        }
        step.done = true;
        rep.log.push_back(std::move(step));
        done.set(a);
        return std::nullopt;
    }

    void run_fallback(const Fault& fault) {
        if (int(rep.fallbacks.size()) >= opts.fallback_budget) {
            fatal = true;
            return;
        }
        std::vector<int> plan = hook(fault, sop, done, bb);
        FallbackEvent ev;
        ev.action = sop.catalog.name(fault.action);
        ev.missing = fault.missing;
        for (int b : plan) ev.plan.push_back(sop.catalog.name(b));
        rep.fallbacks.push_back(std::move(ev));
        if (plan.empty()) {
            fatal = true;
            return;
        }
        for (int b : plan) {
            auto f = dispatch(b, clock++, bb, {}, true);
            if (f) { // no nested recovery: a failing remedy ends the run
                fatal = true;
                return;
            }
        }
    }

    ExecutionReport run() {
        const int m = sop.catalog.size();
        while (!fatal && done.count() < m) {
            Bits remaining(m);
            for (int i = 0; i < m; ++i)
                if (!done.test(i)) remaining.set(i);
            std::vector<int> wave = sop.poset.frontier_list(remaining);
            std::sort(wave.begin(), wave.end(), [&](int x, int y) {
                return sop.catalog.name(x) < sop.catalog.name(y);
            });
            std::vector<std::string> snapshot;
            for (int a : wave) snapshot.push_back(sop.catalog.name(a));

            const auto wave_start = bb;
            std::vector<Fault> faults;
            for (int a : wave) {
                auto f = dispatch(a, clock, opts.sequential_visibility ? bb : wave_start, snapshot, false);
                if (f) {
                    faults.push_back(*f);
                    if (opts.abort_wave_on_fault) break;
                }
            }
            ++clock;
            if (faults.empty()) continue;
            if (!hook) break; // expert halts on the first faulted wave
            for (const Fault& f : faults) {
                if (fatal) break;
                if (!f.recoverable) {
                    fatal = true;
                    break;
                }
                if (done.test(f.action)) continue; // an earlier remedy covered it
                run_fallback(f);
            }
        }
        rep.success = done.count() == m;
        rep.completeness = m == 0 ? 1.0 : double(done.count()) / m;
        int via_fb = 0;
        for (const auto& s : rep.log)
            if (s.done && s.via_fallback) ++via_fb;
        rep.action_fallback = m == 0 ? 0.0 : double(via_fb) / m;
        rep.llm_calls = 1 + int(rep.fallbacks.size());
        rep.blackboard = bb;
        return std::move(rep);
    }
};

} // namespace

ExecutionReport run_expert(const CompiledSOP& sop, const Scenario& scenario,
                           const std::map<std::string, std::string>& initial,
                           uint64_t seed, const ExecOptions& opts) {
    return Runner(sop, scenario, initial, seed, opts, nullptr).run();
}

ExecutionReport run_hybrid(const CompiledSOP& sop, const Scenario& scenario,
                           const std::map<std::string, std::string>& initial,
                           uint64_t seed, FallbackHook hook, const ExecOptions& opts) {
    if (!hook) hook = oracle_fallback(scenario);
    return Runner(sop, scenario, initial, seed, opts, std::move(hook)).run();
}

std::string execution_report_to_json(const ExecutionReport& r) {
    json j;
    j["mode"] = r.mode;
    j["success"] = r.success;
    j["completeness"] = r.completeness;
    j["task_fallback"] = r.fallbacks.empty() ? 0 : 1;
    j["action_fallback"] = r.action_fallback;
    j["llm_calls"] = r.llm_calls;
    j["log"] = json::array();
    for (const auto& s : r.log) {
        json e;
        e["t"] = s.t;
        e["action"] = s.action;
        e["status"] = s.done ? "done" : "failed";
        e["via_fallback"] = s.via_fallback;
        e["frontier"] = s.frontier;
        if (!s.missing.empty()) e["missing"] = s.missing;
        if (!s.note.empty()) e["note"] = s.note;
        j["log"].push_back(std::move(e));
    }
    j["fallback_events"] = json::array();
    for (const auto& f : r.fallbacks) {
        json e;
        e["action"] = f.action;
        e["missing"] = f.missing;
        e["plan"] = f.plan;
        j["fallback_events"].push_back(std::move(e));
    }
    j["blackboard"] = r.blackboard;
    j["compile_warnings"] = json::array();
    for (const auto& w : r.warnings) j["compile_warnings"].push_back(w.message);
    return j.dump(2) + "\n";
}

} // namespace bpop
