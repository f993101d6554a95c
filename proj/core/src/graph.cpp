#include "edas/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include "edas/errors.hpp"

namespace edas {

Graph::Graph(int num_nodes, std::vector<std::pair<int, int>> edges)
    : num_nodes_(num_nodes) {
  if (num_nodes < 1) {
    throw TopologyError("graph must have at least one node, got " +
                        std::to_string(num_nodes));
  }
  std::set<std::pair<int, int>> seen;
  edges_.reserve(edges.size());
  for (auto [a, b] : edges) {
    if (a < 0 || a >= num_nodes || b < 0 || b >= num_nodes) {
      throw TopologyError("edge (" + std::to_string(a) + ", " +
                          std::to_string(b) + ") out of range for n = " +
                          std::to_string(num_nodes));
    }
    if (a == b) {
      throw TopologyError("self loop at node " + std::to_string(a));
    }
    auto e = std::minmax(a, b);
    if (!seen.insert(e).second) {
      throw TopologyError("duplicate edge (" + std::to_string(e.first) + ", " +
                          std::to_string(e.second) + ")");
    }
    edges_.emplace_back(e.first, e.second);
  }
  std::sort(edges_.begin(), edges_.end());
  adjacency_.resize(num_nodes);
  for (auto [a, b] : edges_) {
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

int Graph::degree(int node) const {
  return static_cast<int>(neighbors(node).size());
}

const std::vector<int>& Graph::neighbors(int node) const {
  if (node < 0 || node >= num_nodes_) {
    throw TopologyError("node " + std::to_string(node) + " out of range");
  }
  return adjacency_[node];
}

bool Graph::has_edge(int a, int b) const {
  if (a == b) return false;
  const auto& nbrs = neighbors(a);
  return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

Graph ring(int n) {
  if (n < 3) {
    throw TopologyError("ring requires n >= 3, got " + std::to_string(n));
  }
  std::vector<std::pair<int, int>> edges;
  edges.reserve(n);
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return Graph(n, std::move(edges));
}

Graph grid(int side) {
  if (side < 2) {
    throw TopologyError("grid requires side >= 2, got " + std::to_string(side));
  }
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(2 * side * (side - 1)));
  auto id = [side](int r, int c) { return r * side + c; };
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      if (c + 1 < side) edges.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < side) edges.emplace_back(id(r, c), id(r + 1, c));
    }
  }
  return Graph(side * side, std::move(edges));
}

ValidationReport validate(const Graph& graph) {
  const int n = graph.num_nodes();
  std::vector<char> seen(n, 0);
  std::deque<int> frontier{0};
  seen[0] = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop_front();
    for (int v : graph.neighbors(u)) {
      if (!seen[v]) {
        seen[v] = 1;
        frontier.push_back(v);
      }
    }
  }
  ValidationReport report;
  for (int v = 0; v < n; ++v) {
    if (!seen[v]) report.unreachable.push_back(v);
  }
  report.connected = report.unreachable.empty();
  return report;
}

Graph parse_edge_list(std::istream& in) {
  std::vector<std::pair<int, int>> edges;
  int max_node = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    int a = 0, b = 0;
    std::string rest;
    if (!(fields >> a >> b) || (fields >> rest)) {
      throw FormatError("edge list line " + std::to_string(line_no) +
                        ": expected two node ids, got \"" + line + "\"");
    }
    if (a < 0 || b < 0) {
      throw FormatError("edge list line " + std::to_string(line_no) +
                        ": negative node id");
    }
    max_node = std::max({max_node, a, b});
    edges.emplace_back(a, b);
  }
  if (edges.empty()) {
    throw FormatError("edge list contains no edges");
  }
  return Graph(max_node + 1, std::move(edges));
}

Graph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open edge list file: " + path);
  }
  try {
    return parse_edge_list(in);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

std::string serialize_edge_list(const Graph& graph) {
  std::ostringstream out;
  for (auto [a, b] : graph.edges()) out << a << ' ' << b << '\n';
  return out.str();
}

}  // namespace edas
