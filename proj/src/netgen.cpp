#include "ggnet/netgen.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/random/bernoulli_distribution.hpp>

#include "ggnet/rng.h"

namespace ggnet {

DirectedGraph::DirectedGraph(std::size_t n_nodes, bool includes_self_loops)
    : n_(n_nodes), self_loops_(includes_self_loops), adj_(n_nodes * n_nodes, 0) {
  if (n_nodes == 0) throw std::invalid_argument("DirectedGraph: n_nodes must be >= 1");
}

void DirectedGraph::add_edge(std::size_t i, std::size_t j) {
  if (i >= n_ || j >= n_)
    throw std::invalid_argument("DirectedGraph: edge (" + std::to_string(i) + ", " +
                                std::to_string(j) + ") out of range for N=" + std::to_string(n_));
  if (i == j && !self_loops_)
    throw std::invalid_argument("DirectedGraph: self loop on node " + std::to_string(i));
  adj_[i * n_ + j] = 1;
}

void DirectedGraph::remove_edge(std::size_t i, std::size_t j) {
  if (i >= n_ || j >= n_) throw std::invalid_argument("DirectedGraph: edge out of range");
  adj_[i * n_ + j] = 0;
}

std::size_t DirectedGraph::in_degree(std::size_t i) const {
  std::size_t d = 0;
  for (std::size_t j = 0; j < n_; ++j)
    if (j != i && adj_[i * n_ + j]) ++d;
  return d;
}

std::size_t DirectedGraph::n_edges() const {
  std::size_t count = 0;
  for (auto v : adj_) count += v;
  return count;
}

std::vector<DirectedGraph::Edge> DirectedGraph::edges() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (adj_[i * n_ + j]) out.emplace_back(i, j);
  return out;
}

DirectedGraph generate_binomial_graph(std::size_t n_nodes, double p, std::uint64_t seed) {
  if (n_nodes < 1) throw std::invalid_argument("generate_binomial_graph: n_nodes must be >= 1");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("generate_binomial_graph: p must lie in [0, 1]");

  DirectedGraph graph(n_nodes);
  SplitMix64 gen(seed);
  boost::random::bernoulli_distribution<double> coin(p);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    for (std::size_t j = 0; j < n_nodes; ++j) {
      if (i == j) continue;
      if (coin(gen)) graph.add_edge(i, j);
    }
  }
  return graph;
}

CombinationMatrix build_combination_matrix(const DirectedGraph& graph, double rho) {
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("build_combination_matrix: rho must lie in (0, 1)");

  const std::size_t n = graph.n_nodes();
  CombinationMatrix out;
  out.rho = rho;
  out.entries = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(graph.in_degree(i) + 1);
    double off = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || !graph.has_edge(i, j)) continue;
      const double w = rho / d;
      out.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w;
      off += w;
    }
    out.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = rho - off;
  }
  return out;
}

DirectedGraph support_offdiagonal(const Eigen::MatrixXd& a, double tol) {
  if (!(tol >= 0.0)) throw std::invalid_argument("support_offdiagonal: tol must be >= 0");
  if (a.rows() != a.cols() || a.rows() == 0)
    throw std::invalid_argument("support_offdiagonal: matrix must be square and nonempty");
  const auto n = static_cast<std::size_t>(a.rows());
  DirectedGraph graph(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && std::abs(a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) > tol)
        graph.add_edge(i, j);
  return graph;
}

}  // namespace ggnet
