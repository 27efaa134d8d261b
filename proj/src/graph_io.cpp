#include "fixlab/graph_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "fixlab/error.hpp"

namespace fixlab {

using json = nlohmann::json;

EdgeList parse_graph_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error("invalid_graph", std::string("graph JSON: ") + e.what());
  }
  try {
    EdgeList list;
    list.n = doc.at("n").get<Index>();
    for (const auto& e : doc.at("edges")) {
      if (!e.is_array() || e.size() != 3) {
        throw Error("invalid_graph", "graph JSON: each edge must be [i, j, w]");
      }
      list.edges.push_back({e[0].get<Index>(), e[1].get<Index>(), e[2].get<double>()});
    }
    return list;
  } catch (const json::exception& e) {
    throw Error("invalid_graph", std::string("graph JSON: ") + e.what());
  }
}

EdgeList parse_edge_list_text(std::string_view text) {
  EdgeList list;
  Index declared_n = -1;
  Index max_id = -1;
  std::size_t weighted = 0;
  std::size_t unweighted = 0;

  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;
    auto bad = [&]() {
      return Error("invalid_graph", "edge list line " + std::to_string(line_no) + ": '" + line +
                                        "' is not 'i j w'");
    };
    if (first == "n") {
      if (!(fields >> declared_n)) throw bad();
      continue;
    }
    Edge e;
    try {
      e.source = std::stoll(first);
    } catch (const std::logic_error&) {
      throw bad();
    }
    if (!(fields >> e.target)) throw bad();
    if (fields >> e.weight) {
      ++weighted;
    } else {
      e.weight = 0.0;
      ++unweighted;
    }
    std::string extra;
    if (fields.clear(), fields >> extra) throw bad();
    max_id = std::max({max_id, e.source, e.target});
    list.edges.push_back(e);
  }
  if (weighted && unweighted) {
    throw Error("invalid_graph", "edge list mixes weighted and unweighted lines");
  }
  list.n = declared_n >= 0 ? declared_n : max_id + 1;
  if (unweighted) {
    std::vector<Index> k(static_cast<std::size_t>(std::max<Index>(list.n, max_id + 1)), 0);
    for (const auto& e : list.edges) {
      if (e.source >= 0) ++k[static_cast<std::size_t>(e.source)];
    }
    for (auto& e : list.edges) {
      if (e.source >= 0) e.weight = 1.0 / static_cast<double>(k[static_cast<std::size_t>(e.source)]);
    }
  }
  return list;
}

EdgeList parse_graph(std::string_view text) {
  const auto start = text.find_first_not_of(" \t\r\n");
  if (start != std::string_view::npos && text[start] == '{') return parse_graph_json(text);
  return parse_edge_list_text(text);
}

EdgeList read_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io_error", "cannot open graph file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_graph(buffer.str());
}

std::string to_json(const EdgeList& list) {
  json doc;
  doc["n"] = list.n;
  doc["edges"] = json::array();
  for (const auto& e : list.edges) doc["edges"].push_back({e.source, e.target, e.weight});
  return doc.dump();
}

Configuration parse_configuration(std::string_view text) {
  const auto start = text.find_first_not_of(" \t\r\n");
  if (start == std::string_view::npos) return {};
  try {
    if (text[start] == '[') {
      return Configuration(json::parse(text).get<std::vector<Index>>());
    }
    std::vector<Index> ids;
    std::string item;
    std::istringstream in{std::string(text)};
    while (std::getline(in, item, ',')) {
      std::size_t used = 0;
      ids.push_back(std::stoll(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) {
        throw std::invalid_argument(item);
      }
    }
    return Configuration(std::move(ids));
  } catch (const std::exception&) {
    throw Error("invalid_configuration", "cannot parse configuration '" + std::string(text) + "'");
  }
}

}  // namespace fixlab
