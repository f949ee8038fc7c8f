#include "graph_json.hpp"

#include <json.hpp>

#include "io_util.hpp"

namespace bpop {

using nlohmann::json;

namespace {

json parse_json(const std::string& text, const std::string& what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) fail(Errc::schema, what + ": not valid JSON");
    return j;
}

} // namespace

LabeledPoset graph_from_json(const std::string& text) {
    json j = parse_json(text, "graph");
    if (!j.is_object()) fail(Errc::schema, "graph: top level must be an object");
    if (!j.contains("nodes") || !j["nodes"].is_array())
        fail(Errc::schema, "graph: missing 'nodes' array");
    std::vector<std::string> names;
    for (const auto& n : j["nodes"]) {
        if (!n.is_string()) fail(Errc::schema, "graph: 'nodes' entries must be strings");
        names.push_back(n.get<std::string>());
    }
    ActionCatalog catalog(std::move(names));
    std::vector<std::pair<int, int>> edges;
    if (j.contains("edges")) {
        if (!j["edges"].is_array()) fail(Errc::schema, "graph: 'edges' must be an array");
        for (const auto& e : j["edges"]) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
                fail(Errc::schema, "graph: each edge must be a [from, to] string pair");
            edges.emplace_back(catalog.index(e[0].get<std::string>()),
                               catalog.index(e[1].get<std::string>()));
        }
    }
    LabeledPoset g;
    g.poset = Poset::transitive_closure(catalog.size(), edges);
    g.catalog = std::move(catalog);
    return g;
}

LabeledPoset graph_load(const std::string& path) {
    try {
        return graph_from_json(read_file(path));
    } catch (const Error& e) {
        if (e.code == Errc::io) throw;
        throw Error(e.code, path + ": " + e.what());
    }
}

std::string graph_to_json(const LabeledPoset& g) {
    json j;
    j["nodes"] = json::array();
    for (const auto& n : g.catalog.names()) j["nodes"].push_back(n);
    j["edges"] = json::array();
    for (auto [i, k] : g.poset.reduction().edges)
        j["edges"].push_back(json::array({g.catalog.name(i), g.catalog.name(k)}));
    return j.dump(2) + "\n";
}

std::string graph_to_dot(const LabeledPoset& g) {
    std::string out = "digraph sop {\n";
    for (const auto& n : g.catalog.names()) out += "  \"" + n + "\";\n";
    for (auto [i, k] : g.poset.reduction().edges)
        out += "  \"" + g.catalog.name(i) + "\" -> \"" + g.catalog.name(k) + "\";\n";
    out += "}\n";
    return out;
}

} // namespace bpop
