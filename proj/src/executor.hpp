#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "poset.hpp"

namespace bpop {

struct IOEntry {
    std::vector<std::string> inputs;  // required blackboard slots
    std::vector<std::string> outputs; // fields produced on success
};

// Keyed by action name; may cover more actions than any one plan uses.
using IORegistry = std::map<std::string, IOEntry>;

enum class FailurePolicy { always, once };

struct Scenario {
    ActionCatalog catalog; // registry keys, sorted
    IORegistry registry;
    Poset truth;                                  // closure of the true dependency edges
    std::map<std::string, FailurePolicy> failures;
    std::map<std::string, std::string> initial;   // explicit starting blackboard, may be empty
    // Explicit initial fields if given, otherwise every slot no action
    // produces, with a deterministic placeholder value.
    std::map<std::string, std::string> starting_blackboard() const;
};

Scenario scenario_from_json(const std::string& text);
Scenario scenario_load(const std::string& path);

struct CompileWarning {
    std::string action;
    std::string slot; // producible input with no producer preceding the action
    std::string message;
};

struct CompiledSOP {
    ActionCatalog catalog;
    Poset poset;
    std::vector<IOEntry> io; // indexed by catalog position
    std::vector<CompileWarning> warnings;
};

// Validates registry coverage and reports, per action, any input slot that
// some action produces but no predecessor in the plan provides. Such slots
// predict runtime faults.
CompiledSOP compile_sop(const ActionCatalog& catalog, const Poset& poset, const IORegistry& registry);

struct StepRecord {
    int t = 0; // logical timestamp; frontier waves share one, fallback steps get their own
    std::string action;
    bool done = false;
    bool via_fallback = false;
    std::vector<std::string> frontier; // wave snapshot at dispatch (empty for fallback steps)
    std::vector<std::string> missing;  // unfilled input slots when faulted
    std::string note;                  // "api error", "write conflict: <field>", ...
};

struct FallbackEvent {
    std::string action; // the faulted action the planner was asked about
    std::vector<std::string> missing;
    std::vector<std::string> plan; // remedial sequence, executed verbatim
};

struct ExecutionReport {
    std::string mode;
    bool success = false;
    double completeness = 0.0;   // completed actions / catalog size
    double action_fallback = 0.0; // fallback-completed actions / catalog size
    int llm_calls = 1;            // intent parse plus one per fallback event
    std::vector<StepRecord> log;
    std::vector<FallbackEvent> fallbacks;
    std::map<std::string, std::string> blackboard; // final field values
    std::vector<CompileWarning> warnings;          // echoed from the compiled plan
};

std::string execution_report_to_json(const ExecutionReport& r);

struct Fault {
    int action = -1;
    std::vector<std::string> missing; // empty for api errors and write conflicts
    bool recoverable = true;          // write conflicts are not
};

// Planner hook: remedial action ids (in sop catalog) given the fault, what is
// already done, and the current blackboard. Empty plan means give up.
using FallbackHook = std::function<std::vector<int>(
    const Fault&, const CompiledSOP&, const Bits& done,
    const std::map<std::string, std::string>& blackboard)>;

// Completes the faulted action's unmet true prerequisites in dependency
// order (name order within a rank), then the action itself.
FallbackHook oracle_fallback(const Scenario& scenario);

struct ExecOptions {
    // Within a wave, later siblings see earlier siblings' outputs. Off gives
    // every sibling the wave-start snapshot.
    bool sequential_visibility = true;
    // Stop dispatching the current wave at the first fault instead of
    // letting already-scheduled siblings finish.
    bool abort_wave_on_fault = false;
    // Hybrid safety valve against non-progressing custom hooks; 0 means
    // 4*m+8.
    int fallback_budget = 0;
};

ExecutionReport run_expert(const CompiledSOP& sop, const Scenario& scenario,
                           const std::map<std::string, std::string>& initial,
                           uint64_t seed, const ExecOptions& opts = {});

ExecutionReport run_hybrid(const CompiledSOP& sop, const Scenario& scenario,
                           const std::map<std::string, std::string>& initial,
                           uint64_t seed, FallbackHook hook = nullptr,
                           const ExecOptions& opts = {});

// Deterministic synthetic output token for one produced field.
std::string mock_token(uint64_t seed, const std::string& action, const std::string& field);

} // namespace bpop
