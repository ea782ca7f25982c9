#ifndef NETGIANT_GRAPH_HPP
#define NETGIANT_GRAPH_HPP

#include <cstdint>
#include <filesystem>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace netgiant {

/// Undirected simple graph on `n_nodes` vertices. Edges are stored as
/// ordered pairs (i, j) with i < j, so the set has no duplicates or loops.
class Adjacency {
 public:
  explicit Adjacency(int n_nodes);

  int n_nodes() const { return n_nodes_; }
  const std::set<std::pair<int, int>>& edges() const { return edges_; }
  std::size_t n_edges() const { return edges_.size(); }

  /// Inserts {i, j}. Throws on self-loops or out-of-range endpoints;
  /// returns false if the edge was already present.
  bool add_edge(int i, int j);
  bool has_edge(int i, int j) const;

  std::vector<int> degrees() const;
  std::vector<std::vector<int>> neighbours() const;

 private:
  int n_nodes_;
  std::set<std::pair<int, int>> edges_;
};

/// Symmetric doubly stochastic mixing weights together with
/// sigma = ||W - (1/N) 11^T||_2.
struct ConsensusMatrix {
  Eigen::MatrixXd w;
  double sigma = 0.0;

  int n_nodes() const { return static_cast<int>(w.rows()); }
};

/// Raised when a random generator exhausts its retry budget.
class GraphGenerationError : public std::runtime_error {
 public:
  GraphGenerationError(const std::string& what, int retries)
      : std::runtime_error(what), retries_(retries) {}
  int retries() const { return retries_; }

 private:
  int retries_;
};

inline constexpr int kMaxGraphRetries = 1000;

bool is_connected(const Adjacency& adj);

/// Random simple connected d-regular graph. Deterministic for a fixed seed.
Adjacency gen_regular_graph(int n_nodes, int degree, std::uint64_t seed);

/// G(N, p) conditioned on connectivity by redrawing (bounded retries).
Adjacency gen_erdos_renyi(int n_nodes, double edge_prob, std::uint64_t seed);

Adjacency complete_graph(int n_nodes);
Adjacency path_graph(int n_nodes);

/// w_ij = 1 / (1 + max(deg_i, deg_j)) on edges, w_ii = 1 - sum_j w_ij.
ConsensusMatrix metropolis_weights(const Adjacency& adj);

/// Largest |eigenvalue| of W on the complement of the consensus direction.
/// Dense symmetric eigensolve up to kDenseSigmaLimit nodes, power iteration
/// beyond.
double spectral_gap_sigma(const Eigen::MatrixXd& w);

inline constexpr int kDenseSigmaLimit = 512;

/// Power iteration on (W - J/N)^2. Exposed so the dense path can be checked
/// against it.
double spectral_gap_sigma_power(const Eigen::MatrixXd& w, double tol = 1e-13,
                                int max_iters = 200000);

// Edge-list text: first line "N", then one "i j" pair per line, 0-indexed.
void write_edge_list(const Adjacency& adj, const std::filesystem::path& path);
Adjacency read_edge_list(const std::filesystem::path& path);
std::string format_edge_list(const Adjacency& adj);
Adjacency parse_edge_list(const std::string& text);

}  // namespace netgiant

#endif  // NETGIANT_GRAPH_HPP
