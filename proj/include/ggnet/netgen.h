#ifndef GGNET_NETGEN_H
#define GGNET_NETGEN_H

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ggnet {

// Directed graph on nodes 0..N-1. Edge (i, j) means node j directly
// influences node i, i.e. it is the support of entry a_ij.
class DirectedGraph {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;  // (target i, source j)

  explicit DirectedGraph(std::size_t n_nodes, bool includes_self_loops = false);

  std::size_t n_nodes() const { return n_; }
  bool includes_self_loops() const { return self_loops_; }

  bool has_edge(std::size_t i, std::size_t j) const { return adj_[i * n_ + j] != 0; }
  // Adding an existing edge is a no-op. Self loops are rejected unless
  // the graph was created with includes_self_loops.
  void add_edge(std::size_t i, std::size_t j);
  void remove_edge(std::size_t i, std::size_t j);

  // Number of edges (i, j) with j != i, i.e. |N_i|.
  std::size_t in_degree(std::size_t i) const;
  std::size_t n_edges() const;
  // Row-major ordered edge list.
  std::vector<Edge> edges() const;

  bool operator==(const DirectedGraph& other) const = default;

 private:
  std::size_t n_;
  bool self_loops_;
  std::vector<unsigned char> adj_;
};

// Interaction matrix A together with the scaling parameter used to build it.
struct CombinationMatrix {
  Eigen::MatrixXd entries;
  double rho = 0.0;

  std::size_t n_nodes() const { return static_cast<std::size_t>(entries.rows()); }
};

// Binomial (Erdos-Renyi) directed graph: every ordered pair (i, j), i != j,
// is an edge independently with probability p. Slots are visited row-major
// and consume one Bernoulli draw each from a SplitMix64 stream on `seed`.
DirectedGraph generate_binomial_graph(std::size_t n_nodes, double p, std::uint64_t seed);

// Uniform averaging rule: a_ij = rho / d_i on edges, where d_i counts node i
// itself plus its in-neighbours, and a_ii = rho - sum_{k != i} a_ik.
CombinationMatrix build_combination_matrix(const DirectedGraph& graph, double rho);

// Off-diagonal support {(i, j) : i != j, |a_ij| > tol}.
DirectedGraph support_offdiagonal(const Eigen::MatrixXd& a, double tol = 0.0);

}  // namespace ggnet

#endif  // GGNET_NETGEN_H
