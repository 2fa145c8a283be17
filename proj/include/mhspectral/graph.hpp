#pragma once

// Directed graph on the coordinate index set I built from one-coordinate probes of F
// (divergence for the graph, vanishing for the dual graph) and the existence condition.

#include <map>
#include <string>
#include <vector>

#include "mhspectral/maps.hpp"

namespace mhs {

enum class EdgeSource { oracle, probed };
enum class GraphMode { automatic, oracle, probe };

class IndexGraph {
 public:
  IndexGraph() = default;
  explicit IndexGraph(Shape shape) : shape_(std::move(shape)) {}

  const Shape& shape() const { return shape_; }
  std::size_t node_count() const { return shape_.total(); }

  void add_edge(Node from, Node to, EdgeSource source);
  bool has_edge(Node from, Node to) const { return edges_.count({from, to}) > 0; }
  const std::map<std::pair<Node, Node>, EdgeSource>& edges() const { return edges_; }
  EdgeSet edge_set() const;
  std::size_t edge_count() const { return edges_.size(); }

  /// Flat index of a node in block-major order.
  std::size_t flat(Node n) const { return shape_.offset(n.block) + n.index; }
  Node node(std::size_t flat) const;

  /// reach[a][b]: a path (possibly empty) from flat node a to flat node b.
  std::vector<std::vector<bool>> reachability() const;

  /// One "k,l -> i,j" line per edge, 1-based, lexicographic.
  std::string edge_list() const;

 private:
  Shape shape_;
  std::map<std::pair<Node, Node>, EdgeSource> edges_;
};

struct ProbeSettings {
  std::vector<double> grow_grid{1e2, 1e4, 1e6};
  std::vector<double> shrink_grid{1e-2, 1e-4, 1e-6};
  double slope_threshold = 0.01;
};

/// u^{(i,j)}(t): all ones except t at `node`.
ProductVector probe_vector(const Shape& shape, Node node, double t);

/// Edges (k,l) -> (i,j) with F_{k,l}(u^{(i,j)}(t)) -> inf as t -> inf.
IndexGraph build_graph(const MapInstance& F, GraphMode mode = GraphMode::automatic,
                       const ProbeSettings& settings = {});

/// Edges (k,l) -> (i,j) with F_{k,l}(u^{(i,j)}(t)) -> 0 as t -> 0.
IndexGraph build_dual_graph(const MapInstance& F, GraphMode mode = GraphMode::automatic,
                            const ProbeSettings& settings = {});

/// For every node t some block has all of its nodes reaching t.
bool check_existence_condition(const IndexGraph& g, const Shape& shape);

bool is_strongly_connected(const IndexGraph& g);

}  // namespace mhs
