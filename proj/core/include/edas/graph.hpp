#ifndef EDAS_GRAPH_HPP
#define EDAS_GRAPH_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace edas {

// Undirected simple graph over nodes 0..n-1.  Self loops and duplicate edges
// are rejected at construction.
class Graph {
 public:
  Graph(int num_nodes, std::vector<std::pair<int, int>> edges);

  int num_nodes() const { return num_nodes_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int degree(int node) const;
  const std::vector<int>& neighbors(int node) const;
  // Edges normalized to (min, max) and sorted lexicographically.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  bool has_edge(int a, int b) const;

 private:
  int num_nodes_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adjacency_;
};

// Cycle over n >= 3 nodes.
Graph ring(int n);

// side x side 4-neighbor lattice, side >= 2 (no wraparound).
Graph grid(int side);

struct ValidationReport {
  bool connected = false;
  // Nodes not reachable from node 0 (empty when connected).
  std::vector<int> unreachable;
};

ValidationReport validate(const Graph& graph);

// Text edge-list format: one "i j" pair per line, 0-indexed node ids,
// blank lines and lines starting with '#' ignored.  The node count is
// max id + 1.  Parse errors carry the offending line number.
Graph parse_edge_list(std::istream& in);
Graph load_edge_list(const std::string& path);
std::string serialize_edge_list(const Graph& graph);

}  // namespace edas

#endif  // EDAS_GRAPH_HPP
