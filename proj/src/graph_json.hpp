#pragma once

#include <string>

#include "poset.hpp"

namespace bpop {

// A poset together with the catalog naming its elements. This is the unit
// the file formats and the C API move around.
struct LabeledPoset {
    ActionCatalog catalog;
    Poset poset;
};

// Wire format: {"nodes": ["a", ...], "edges": [["a","b"], ...]} where edges
// are cover edges; loading closes transitively and rejects cycles.
LabeledPoset graph_from_json(const std::string& text);
LabeledPoset graph_load(const std::string& path);
std::string graph_to_json(const LabeledPoset& g);
std::string graph_to_dot(const LabeledPoset& g);

} // namespace bpop
