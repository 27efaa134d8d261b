#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "fixlab/graph.hpp"

namespace fixlab {

/// {"n": N, "edges": [[i, j, w], ...]}; 0-based ids.
EdgeList parse_graph_json(std::string_view text);

/// One edge per line: "i j w". Blank lines and '#' comments are skipped.
/// N is one more than the largest id unless a line "n N" sets it. When every
/// line omits w, weights become 1 / k_out(i).
EdgeList parse_edge_list_text(std::string_view text);

/// Dispatches on content: a leading '{' selects JSON.
EdgeList parse_graph(std::string_view text);

EdgeList read_graph(const std::filesystem::path& path);

std::string to_json(const EdgeList& list);

/// JSON array of ids ("[0, 3]") or a comma-separated list ("0,3"); the empty
/// string and "[]" give the empty configuration.
Configuration parse_configuration(std::string_view text);

}  // namespace fixlab
