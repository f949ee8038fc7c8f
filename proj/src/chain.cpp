#include "chain.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "error.hpp"

namespace bpop {

using nlohmann::json;

std::string chain_header_line(const ActionCatalog& catalog, const std::string& config_digest) {
    json j;
    j["schema"] = kChainSchema;
    j["config_digest"] = config_digest;
    j["catalog"] = catalog.names();
    return j.dump();
}

std::string chain_sample_line(const ChainSample& s) {
    json j;
    j["iter"] = s.iter;
    j["K"] = s.K;
    j["rho"] = s.rho;
    j["beta"] = s.beta;
    if (std::isfinite(s.loglik))
        j["loglik"] = s.loglik;
    else
        j["loglik"] = nullptr; // -inf (epsilon == 0 runs)
    json edges = json::array();
    for (auto [a, b] : s.edges) edges.push_back(json::array({a, b}));
    j["edges"] = std::move(edges);
    return j.dump();
}

namespace {

ChainSample parse_sample(const json& j, const std::string& where, int m) {
    if (!j.is_object()) fail(Errc::schema, where + ": sample line must be an object");
    ChainSample s;
    try {
        s.iter = j.at("iter").get<int64_t>();
        s.K = j.at("K").get<int>();
        s.rho = j.at("rho").get<double>();
        s.beta = j.at("beta").get<double>();
        if (j.at("loglik").is_null())
            s.loglik = -std::numeric_limits<double>::infinity();
        else
            s.loglik = j.at("loglik").get<double>();
        for (const auto& e : j.at("edges")) {
            int a = e.at(0).get<int>(), b = e.at(1).get<int>();
            if (a < 0 || a >= m || b < 0 || b >= m)
                fail(Errc::schema, where + ": edge index out of range");
            s.edges.emplace_back(a, b);
        }
    } catch (const json::exception& e) {
        fail(Errc::schema, where + ": " + e.what());
    }
    return s;
}

void load_into(Chain& chain, const std::string& path, bool fresh) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io, "cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(in, line)) fail(Errc::schema, path + ": missing chain header");
    json h = json::parse(line, nullptr, false);
    if (h.is_discarded() || !h.is_object() || h.value("schema", "") != kChainSchema)
        fail(Errc::schema, path + ": not a " + std::string(kChainSchema) + " file");
    std::vector<std::string> names;
    for (const auto& n : h.at("catalog")) names.push_back(n.get<std::string>());
    ActionCatalog catalog(std::move(names));
    std::string digest = h.value("config_digest", "");
    if (fresh) {
        chain.catalog = std::move(catalog);
        chain.config_digest = digest;
    } else if (!(chain.catalog == catalog)) {
        fail(Errc::catalog_mismatch, path + ": catalog differs from previously loaded chain");
    }
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            fail(Errc::schema, path + ":" + std::to_string(lineno) + ": not valid JSON");
        chain.samples.push_back(
            parse_sample(j, path + ":" + std::to_string(lineno), chain.catalog.size()));
    }
}

} // namespace

Chain chain_load(const std::string& path) {
    Chain c;
    load_into(c, path, true);
    return c;
}

void chain_append(Chain& chain, const std::string& path) {
    load_into(chain, path, chain.catalog.size() == 0 && chain.samples.empty());
}

} // namespace bpop
