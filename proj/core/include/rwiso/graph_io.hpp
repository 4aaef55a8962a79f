#pragma once

#include <stdexcept>
#include <string>

#include "rwiso/f2linalg.hpp"

namespace rwiso {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class GraphFormat { Graph6, EdgeList };

Graph parse_graph6(const std::string& text);
std::string to_graph6(const Graph& g);

// "n m" header followed by m lines "u v", 0-indexed.
Graph parse_edgelist(const std::string& text);
std::string to_edgelist(const Graph& g);

Graph parse_graph(const std::string& text, GraphFormat fmt);
Graph read_graph_file(const std::string& path, GraphFormat fmt);
// .g6 / .graph6 select graph6, anything else edge list.
GraphFormat format_from_path(const std::string& path);

}  // namespace rwiso
