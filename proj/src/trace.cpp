#include "trace.hpp"

#include <algorithm>
#include <unordered_set>

#include <json.hpp>

#include "io_util.hpp"

namespace bpop {

using nlohmann::json;

Trace project_trace(const RawSession& session, const ActionCatalog& catalog,
                    std::vector<std::string>* warnings) {
    Trace t;
    t.id = session.id;
    std::unordered_set<int> seen;
    for (const auto& tok : session.tokens) {
        if (tok.kind != RawToken::Kind::action) continue;
        int idx = catalog.find(tok.text);
        if (idx < 0) {
            if (warnings)
                warnings->push_back(session.id + ": dropping non-catalog action '" + tok.text + "'");
            continue;
        }
        if (!seen.insert(idx).second) {
            if (warnings)
                warnings->push_back(session.id + ": duplicate action '" + tok.text + "', keeping first");
            continue;
        }
        t.actions.push_back(idx);
    }
    if (t.actions.empty()) fail(Errc::empty, "session '" + session.id + "' projects to an empty trace");
    return t;
}

namespace {

json parse_json(const std::string& text, const std::string& what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) fail(Errc::schema, what + ": not valid JSON");
    return j;
}

TraceSet parse_flat(const json& j) {
    if (!j.contains("actions") || !j["actions"].is_array())
        fail(Errc::schema, "trace file: missing 'actions' array");
    std::vector<std::string> names;
    for (const auto& a : j["actions"]) {
        if (!a.is_string()) fail(Errc::schema, "trace file: 'actions' entries must be strings");
        names.push_back(a.get<std::string>());
    }
    TraceSet ts;
    ts.catalog = ActionCatalog(std::move(names));
    if (!j.contains("traces") || !j["traces"].is_array())
        fail(Errc::schema, "trace file: missing 'traces' array");
    int ti = 0;
    for (const auto& arr : j["traces"]) {
        if (!arr.is_array()) fail(Errc::schema, "trace file: traces[" + std::to_string(ti) + "] must be an array");
        Trace t;
        t.id = "t" + std::to_string(ti);
        std::unordered_set<int> seen;
        for (const auto& a : arr) {
            if (!a.is_string())
                fail(Errc::schema, "trace file: traces[" + std::to_string(ti) + "] entries must be strings");
            int idx = ts.catalog.index(a.get<std::string>());
            if (!seen.insert(idx).second)
                fail(Errc::schema, "trace '" + t.id + "': duplicate action '" + a.get<std::string>() + "'");
            t.actions.push_back(idx);
        }
        ts.traces.push_back(std::move(t));
        ++ti;
    }
    if (j.contains("target") && j.contains("realized")) {
        CurationInfo ci;
        ci.target = j["target"].get<double>();
        ci.realized = j["realized"].get<double>();
        ci.seed = j.value("seed", uint64_t(0));
        ts.curation = ci;
    }
    return ts;
}

struct RichStep {
    int64_t step;
    std::string action;
    std::string io; // serialized params/output payload
};

TraceSet parse_rich(const std::vector<json>& records) {
    // catalog in first-appearance order, after per-record step sort
    std::vector<std::pair<std::string, std::vector<RichStep>>> sessions; // (trace_id+intent key handled below)
    std::vector<std::string> intents;
    for (size_t r = 0; r < records.size(); ++r) {
        const json& rec = records[r];
        std::string where = "record " + std::to_string(r);
        if (!rec.is_object()) fail(Errc::schema, "trace file: " + where + " must be an object");
        if (!rec.contains("action_sequence") || !rec["action_sequence"].is_array())
            fail(Errc::schema, "trace file: " + where + " missing 'action_sequence' array");
        std::string id = rec.value("trace_id", "t" + std::to_string(r));
        std::vector<RichStep> steps;
        for (const auto& s : rec["action_sequence"]) {
            if (!s.is_object() || !s.contains("action") || !s["action"].is_string())
                fail(Errc::schema, "trace file: " + where + " step missing 'action'");
            RichStep rs;
            rs.step = s.value("step", int64_t(steps.size() + 1));
            rs.action = s["action"].get<std::string>();
            json io;
            if (s.contains("params")) io["params"] = s["params"];
            if (s.contains("output")) io["output"] = s["output"];
            rs.io = io.is_null() ? "" : io.dump();
            steps.push_back(std::move(rs));
        }
        std::stable_sort(steps.begin(), steps.end(),
                         [](const RichStep& a, const RichStep& b) { return a.step < b.step; });
        sessions.emplace_back(id, std::move(steps));
        intents.push_back(rec.value("intent", ""));
    }
    std::vector<std::string> names;
    std::unordered_set<std::string> known;
    for (const auto& [id, steps] : sessions)
        for (const auto& s : steps)
            if (known.insert(s.action).second) names.push_back(s.action);
    TraceSet ts;
    ts.catalog = ActionCatalog(std::move(names));
    for (size_t r = 0; r < sessions.size(); ++r) {
        Trace t;
        t.id = sessions[r].first;
        if (!intents[r].empty()) t.meta["intent"] = intents[r];
        std::unordered_set<int> seen;
        for (const auto& s : sessions[r].second) {
            int idx = ts.catalog.index(s.action);
            if (!seen.insert(idx).second)
                fail(Errc::schema, "trace '" + t.id + "': duplicate action '" + s.action + "'");
            t.actions.push_back(idx);
            if (!s.io.empty()) t.meta["io:" + s.action] = s.io;
        }
        ts.traces.push_back(std::move(t));
    }
    return ts;
}

} // namespace

TraceSet parse_trace_file(const std::string& text) {
    json j = parse_json(text, "trace file");
    if (j.is_object() && j.contains("actions")) return parse_flat(j);
    if (j.is_object() && j.contains("action_sequence")) return parse_rich({j});
    if (j.is_array()) {
        std::vector<json> recs(j.begin(), j.end());
        if (recs.empty()) fail(Errc::schema, "trace file: empty record array");
        return parse_rich(recs);
    }
    fail(Errc::schema, "trace file: expected flat {actions, traces} or rich action_sequence records");
}

TraceSet traces_load(const std::string& path) {
    try {
        return parse_trace_file(read_file(path));
    } catch (const Error& e) {
        if (e.code == Errc::io) throw;
        throw Error(e.code, path + ": " + e.what());
    }
}

std::string traces_to_json(const TraceSet& ts) {
    json j;
    j["actions"] = json::array();
    for (const auto& n : ts.catalog.names()) j["actions"].push_back(n);
    j["traces"] = json::array();
    for (const auto& t : ts.traces) {
        json arr = json::array();
        for (int a : t.actions) arr.push_back(ts.catalog.name(a));
        j["traces"].push_back(std::move(arr));
    }
    if (ts.curation) {
        j["target"] = ts.curation->target;
        j["realized"] = ts.curation->realized;
        j["seed"] = ts.curation->seed;
    }
    return j.dump(2) + "\n";
}

TraceSet remap_traces(const TraceSet& ts, const ActionCatalog& target) {
    TraceSet out;
    out.catalog = target;
    out.curation = ts.curation;
    for (const auto& t : ts.traces) {
        Trace nt;
        nt.id = t.id;
        nt.meta = t.meta;
        for (int a : t.actions) nt.actions.push_back(target.index(ts.catalog.name(a)));
        out.traces.push_back(std::move(nt));
    }
    return out;
}

double ip_coverage(const TraceSet& ts, const Poset& truth) {
    auto pairs = truth.incomparable_pairs();
    if (pairs.empty()) return 1.0;
    int m = truth.m();
    std::vector<int> pos(m);
    // seen[k] bit0: pairs[k].first observed before .second; bit1: reverse
    std::vector<unsigned> seen(pairs.size(), 0);
    for (const auto& t : ts.traces) {
        std::fill(pos.begin(), pos.end(), -1);
        for (size_t p = 0; p < t.actions.size(); ++p) pos[t.actions[p]] = int(p);
        for (size_t k = 0; k < pairs.size(); ++k) {
            auto [i, j] = pairs[k];
            if (pos[i] < 0 || pos[j] < 0) continue;
            seen[k] |= pos[i] < pos[j] ? 1u : 2u;
        }
    }
    int covered = int(std::count(seen.begin(), seen.end(), 3u));
    return double(covered) / double(pairs.size());
}

std::vector<std::pair<int, int>> pair_saturation(const TraceSet& ts) {
    int m = ts.catalog.size();
    std::vector<int> pos(m);
    std::vector<std::vector<unsigned>> seen(m, std::vector<unsigned>(m, 0));
    for (const auto& t : ts.traces) {
        std::fill(pos.begin(), pos.end(), -1);
        for (size_t p = 0; p < t.actions.size(); ++p) pos[t.actions[p]] = int(p);
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                if (pos[i] < 0 || pos[j] < 0) continue;
                seen[i][j] |= pos[i] < pos[j] ? 1u : 2u;
            }
    }
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (seen[i][j] == 3u) out.emplace_back(i, j);
    return out;
}

std::vector<int> sample_linear_extension(const Poset& p, Rng& rng) {
    int m = p.m();
    Bits remaining(m);
    for (int i = 0; i < m; ++i) remaining.set(i);
    std::vector<int> seq;
    seq.reserve(m);
    for (int step = 0; step < m; ++step) {
        auto f = p.frontier_list(remaining);
        int pick = f[size_t(rng.below(f.size()))];
        seq.push_back(pick);
        remaining.reset(pick);
    }
    return seq;
}

TraceSet curate_to_coverage(const ActionCatalog& catalog, const Poset& truth, double target,
                            uint64_t seed, int max_attempts, int min_traces) {
    if (target < 0.0 || target > 1.0) fail(Errc::invalid_argument, "coverage target must lie in [0,1]");
    if (max_attempts < 1) fail(Errc::invalid_argument, "max_attempts must be positive");
    if (catalog.size() != truth.m()) fail(Errc::catalog_mismatch, "catalog size differs from poset size");

    Rng rng(seed);
    auto pairs = truth.incomparable_pairs();
    std::vector<unsigned> seen(pairs.size(), 0);
    int covered = 0;
    auto realized = [&] { return pairs.empty() ? 1.0 : double(covered) / double(pairs.size()); };

    TraceSet ts;
    ts.catalog = catalog;
    int attempts = 0;
    std::vector<int> pos(truth.m());
    while (ts.traces.empty() || realized() < target) {
        if (attempts >= max_attempts)
            fail(Errc::target_unreachable,
                 "coverage " + std::to_string(realized()) + " after " + std::to_string(attempts) +
                     " attempts, target " + std::to_string(target));
        ++attempts;
        auto cand = sample_linear_extension(truth, rng);
        std::fill(pos.begin(), pos.end(), -1);
        for (size_t p = 0; p < cand.size(); ++p) pos[cand[p]] = int(p);
        bool reveals = false;
        for (size_t k = 0; k < pairs.size(); ++k) {
            auto [i, j] = pairs[k];
            unsigned dir = pos[i] < pos[j] ? 1u : 2u;
            if (!(seen[k] & dir)) { reveals = true; break; }
        }
        if (!ts.traces.empty() && !reveals) continue;
        for (size_t k = 0; k < pairs.size(); ++k) {
            auto [i, j] = pairs[k];
            unsigned dir = pos[i] < pos[j] ? 1u : 2u;
            unsigned before = seen[k];
            seen[k] |= dir;
            if (before != 3u && seen[k] == 3u) ++covered;
        }
        Trace t;
        t.id = "t" + std::to_string(ts.traces.size());
        t.actions = std::move(cand);
        ts.traces.push_back(std::move(t));
    }
    while (int(ts.traces.size()) < min_traces) {
        Trace t;
        t.id = "t" + std::to_string(ts.traces.size());
        t.actions = sample_linear_extension(truth, rng);
        ts.traces.push_back(std::move(t));
    }
    ts.curation = CurationInfo{target, realized(), seed};
    return ts;
}

} // namespace bpop
