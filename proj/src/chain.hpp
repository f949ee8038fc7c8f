#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "poset.hpp"

namespace bpop {

struct ChainSample {
    int64_t iter = 0;
    int K = 0;
    double rho = 0.0;
    double beta = 0.0;
    double loglik = 0.0;
    std::vector<std::pair<int, int>> edges; // transitive closure, sorted
};

struct Chain {
    ActionCatalog catalog;
    std::string config_digest;
    std::vector<ChainSample> samples;
};

inline constexpr const char* kChainSchema = "bpop-chain/1";

// JSON-Lines: header object, then one object per retained sample.
std::string chain_header_line(const ActionCatalog& catalog, const std::string& config_digest);
std::string chain_sample_line(const ChainSample& s);

Chain chain_load(const std::string& path);
// Merge further files into an existing chain; catalogs must agree.
void chain_append(Chain& chain, const std::string& path);

} // namespace bpop
