#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "poset.hpp"
#include "rng.hpp"

namespace bpop {

// One observed linearization. Actions are catalog ids, all distinct; a trace
// may cover only a subset of the catalog.
struct Trace {
    std::string id;
    std::vector<int> actions;
    std::map<std::string, std::string> meta; // intent, preserved io payloads, ...
};

struct CurationInfo {
    double target = 0.0;
    double realized = 0.0;
    uint64_t seed = 0;
};

struct TraceSet {
    ActionCatalog catalog;
    std::vector<Trace> traces;
    std::optional<CurationInfo> curation;
};

// Raw agent session before projection: interleaved tool calls and
// free-text reasoning.
struct RawToken {
    enum class Kind { action, cognitive } kind = Kind::action;
    std::string text; // action name, or the cognitive snippet
};

struct RawSession {
    std::string id;
    std::vector<RawToken> tokens;
};

// Keeps catalog actions in order of first occurrence, drops everything else.
// Duplicate catalog actions keep the first occurrence and add a warning.
// Errc::empty when nothing survives.
Trace project_trace(const RawSession& session, const ActionCatalog& catalog,
                    std::vector<std::string>* warnings = nullptr);

// Accepts the flat format {"actions": [...], "traces": [[...], ...]} or the
// rich record format (single object or array of objects with trace_id /
// intent / action_sequence), auto-detected.
TraceSet parse_trace_file(const std::string& text);
TraceSet traces_load(const std::string& path);
std::string traces_to_json(const TraceSet& ts); // flat format (+ curation echo)

// Re-index a trace set onto a target catalog (matching by name).
TraceSet remap_traces(const TraceSet& ts, const ActionCatalog& target);

// Fraction of truth-incomparable pairs observed in both relative orders
// across the set; 1.0 when the truth has no incomparable pairs.
double ip_coverage(const TraceSet& ts, const Poset& truth);

// Pairs (i<j) whose both relative orders appear somewhere in the set
// (truth-free diagnostic).
std::vector<std::pair<int, int>> pair_saturation(const TraceSet& ts);

// Randomized Kahn walk: uniform frontier choice at each step.
std::vector<int> sample_linear_extension(const Poset& p, Rng& rng);

// Generates candidates and retains the ones that witness a new direction on
// a truth-incomparable pair (the first candidate is always kept) until
// realized coverage reaches target; then tops up to min_traces retaining
// everything. Errc::target_unreachable when max_attempts runs out first.
TraceSet curate_to_coverage(const ActionCatalog& catalog, const Poset& truth, double target,
                            uint64_t seed, int max_attempts = 10000, int min_traces = 0);

} // namespace bpop
