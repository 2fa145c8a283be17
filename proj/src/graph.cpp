#include "mhspectral/graph.hpp"

#include <cmath>
#include <deque>
#include <sstream>

namespace mhs {

void IndexGraph::add_edge(Node from, Node to, EdgeSource source) {
  for (const Node& n : {from, to})
    if (n.block >= shape_.blocks() || n.index >= shape_.size(n.block))
      throw DomainError("IndexGraph: edge endpoint outside the index set");
  edges_.emplace(std::pair{from, to}, source);
}

EdgeSet IndexGraph::edge_set() const {
  EdgeSet out;
  for (const auto& [e, src] : edges_) out.insert(e);
  return out;
}

Node IndexGraph::node(std::size_t flat) const {
  const std::size_t b = shape_.block_of(flat);
  return {b, flat - shape_.offset(b)};
}

std::vector<std::vector<bool>> IndexGraph::reachability() const {
  const std::size_t n = node_count();
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& [e, src] : edges_) adj[flat(e.first)].push_back(flat(e.second));
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t s = 0; s < n; ++s) {
    std::deque<std::size_t> queue{s};
    reach[s][s] = true;
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t v : adj[u])
        if (!reach[s][v]) {
          reach[s][v] = true;
          queue.push_back(v);
        }
    }
  }
  return reach;
}

std::string IndexGraph::edge_list() const {
  std::ostringstream out;
  for (const auto& [e, src] : edges_)
    out << e.first.block + 1 << ',' << e.first.index + 1 << " -> " << e.second.block + 1 << ','
        << e.second.index + 1 << '\n';
  return out.str();
}

ProductVector probe_vector(const Shape& shape, Node node, double t) {
  if (node.block >= shape.blocks() || node.index >= shape.size(node.block))
    throw DomainError("probe_vector: invalid node");
  if (!(t > 0.0)) throw DomainError("probe_vector: t must be positive");
  ProductVector u = ProductVector::ones(shape);
  u(node.block, node.index) = t;
  return u;
}

namespace {

// Log-log slope of every F_{k,l} over the last two grid points, where transient terms that
// decay along the probe have died out.
std::vector<double> log_slopes(const MapInstance& F, Node node, const std::vector<double>& grid) {
  const std::size_t N = F.shape().total();
  std::vector<std::vector<double>> logs;
  for (std::size_t g = grid.size() - 2; g < grid.size(); ++g) {
    const ProductVector y = evaluate(F, probe_vector(F.shape(), node, grid[g]));
    std::vector<double> row(N);
    for (std::size_t r = 0; r < N; ++r) {
      const double v = y.flat()[r];
      if (!std::isfinite(v) || v < 0.0)
        throw NumericalError("graph probe: non-finite evaluation of " + F.label());
      row[r] = v > 0.0 ? std::log(v) : -745.0;
    }
    logs.push_back(std::move(row));
  }
  const double dt = std::log(grid.back()) - std::log(grid[grid.size() - 2]);
  std::vector<double> slopes(N);
  for (std::size_t r = 0; r < N; ++r) slopes[r] = (logs[1][r] - logs[0][r]) / dt;
  return slopes;
}

IndexGraph probe_graph(const MapInstance& F, const ProbeSettings& s, bool vanish) {
  const Shape& shape = F.shape();
  IndexGraph g(shape);
  const auto& grid = vanish ? s.shrink_grid : s.grow_grid;
  if (grid.size() < 2) throw DomainError("graph probe: grid needs at least two points");
  for (std::size_t i = 0; i < shape.blocks(); ++i)
    for (std::size_t j = 0; j < shape.size(i); ++j) {
      const std::vector<double> slopes = log_slopes(F, {i, j}, grid);
      for (std::size_t r = 0; r < slopes.size(); ++r) {
        // On the shrink grid a positive slope means F_{k,l} vanishes as t -> 0.
        if (slopes[r] > s.slope_threshold) {
          const Node from = g.node(r);
          g.add_edge(from, {i, j}, EdgeSource::probed);
        }
      }
    }
  return g;
}

IndexGraph from_oracle(const Shape& shape, const EdgeSet& edges) {
  IndexGraph g(shape);
  for (const auto& [a, b] : edges) g.add_edge(a, b, EdgeSource::oracle);
  return g;
}

}  // namespace

IndexGraph build_graph(const MapInstance& F, GraphMode mode, const ProbeSettings& settings) {
  if (mode == GraphMode::oracle || (mode == GraphMode::automatic && F.has_edge_oracle()))
    return from_oracle(F.shape(), F.oracle_edges());
  return probe_graph(F, settings, false);
}

IndexGraph build_dual_graph(const MapInstance& F, GraphMode mode, const ProbeSettings& settings) {
  if (mode == GraphMode::oracle || (mode == GraphMode::automatic && F.has_dual_edge_oracle()))
    return from_oracle(F.shape(), F.oracle_dual_edges());
  return probe_graph(F, settings, true);
}

bool check_existence_condition(const IndexGraph& g, const Shape& shape) {
  require_same_shape(g.shape(), shape, "check_existence_condition");
  const auto reach = g.reachability();
  for (std::size_t t = 0; t < g.node_count(); ++t) {
    bool covered = false;
    for (std::size_t i = 0; i < shape.blocks() && !covered; ++i) {
      bool all = true;
      for (std::size_t j = 0; j < shape.size(i) && all; ++j) all = reach[shape.offset(i) + j][t];
      covered = all;
    }
    if (!covered) return false;
  }
  return true;
}

bool is_strongly_connected(const IndexGraph& g) {
  for (const auto& row : g.reachability())
    for (bool b : row)
      if (!b) return false;
  return true;
}

}  // namespace mhs
