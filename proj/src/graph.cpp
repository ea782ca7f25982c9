#include "netgiant/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <sstream>

namespace netgiant {

Adjacency::Adjacency(int n_nodes) : n_nodes_(n_nodes) {
  if (n_nodes <= 0) throw std::invalid_argument("graph needs at least one node");
}

bool Adjacency::add_edge(int i, int j) {
  if (i == j) throw std::invalid_argument("self-loop rejected at node " + std::to_string(i));
  if (i < 0 || j < 0 || i >= n_nodes_ || j >= n_nodes_) {
    throw std::out_of_range("edge endpoint out of range: " + std::to_string(i) + " " +
                            std::to_string(j));
  }
  return edges_.emplace(std::min(i, j), std::max(i, j)).second;
}

bool Adjacency::has_edge(int i, int j) const {
  return edges_.contains({std::min(i, j), std::max(i, j)});
}

std::vector<int> Adjacency::degrees() const {
  std::vector<int> deg(n_nodes_, 0);
  for (const auto& [i, j] : edges_) {
    ++deg[i];
    ++deg[j];
  }
  return deg;
}

std::vector<std::vector<int>> Adjacency::neighbours() const {
  std::vector<std::vector<int>> nb(n_nodes_);
  for (const auto& [i, j] : edges_) {
    nb[i].push_back(j);
    nb[j].push_back(i);
  }
  return nb;
}

bool is_connected(const Adjacency& adj) {
  const int n = adj.n_nodes();
  const auto nb = adj.neighbours();
  std::vector<char> seen(n, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v : nb[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == n;
}

namespace {

// One attempt of the pairing model: stubs are paired at random, pairs that
// would form a loop or a repeated edge are returned to the pool and re-paired.
// Gives up when no admissible pair remains among the leftover stubs.
std::optional<Adjacency> try_pairing(int n, int d, std::mt19937_64& rng) {
  Adjacency g(n);
  std::vector<int> stubs;
  stubs.reserve(static_cast<std::size_t>(n) * d);
  for (int v = 0; v < n; ++v) stubs.insert(stubs.end(), d, v);

  while (!stubs.empty()) {
    std::shuffle(stubs.begin(), stubs.end(), rng);
    std::map<int, int> leftover;
    for (std::size_t k = 0; k + 1 < stubs.size(); k += 2) {
      const int u = stubs[k];
      const int v = stubs[k + 1];
      if (u != v && !g.has_edge(u, v)) {
        g.add_edge(u, v);
      } else {
        ++leftover[u];
        ++leftover[v];
      }
    }
    if (leftover.empty()) break;

    bool admissible = false;
    for (auto a = leftover.begin(); a != leftover.end() && !admissible; ++a) {
      for (auto b = std::next(a); b != leftover.end(); ++b) {
        if (!g.has_edge(a->first, b->first)) {
          admissible = true;
          break;
        }
      }
    }
    if (!admissible) return std::nullopt;

    stubs.clear();
    for (const auto& [v, count] : leftover) stubs.insert(stubs.end(), count, v);
  }
  return g;
}

Adjacency complement(const Adjacency& g) {
  Adjacency c(g.n_nodes());
  for (int i = 0; i < g.n_nodes(); ++i) {
    for (int j = i + 1; j < g.n_nodes(); ++j) {
      if (!g.has_edge(i, j)) c.add_edge(i, j);
    }
  }
  return c;
}

}  // namespace

Adjacency gen_regular_graph(int n_nodes, int degree, std::uint64_t seed) {
  if (n_nodes <= 0) throw std::invalid_argument("n_nodes must be positive");
  if (degree < 0 || degree >= n_nodes) {
    throw std::invalid_argument("regular graph needs 0 <= degree < n_nodes");
  }
  if ((static_cast<long long>(n_nodes) * degree) % 2 != 0) {
    throw std::invalid_argument("n_nodes * degree must be even");
  }

  // Dense graphs are drawn through their sparse complement.
  const bool via_complement = 2 * degree > n_nodes - 1;
  const int d = via_complement ? n_nodes - 1 - degree : degree;

  std::mt19937_64 rng(seed);
  for (int attempt = 1; attempt <= kMaxGraphRetries; ++attempt) {
    auto g = try_pairing(n_nodes, d, rng);
    if (!g) continue;
    Adjacency out = via_complement ? complement(*g) : std::move(*g);
    if (is_connected(out)) return out;
  }
  throw GraphGenerationError("no connected " + std::to_string(degree) +
                                 "-regular graph on " + std::to_string(n_nodes) +
                                 " nodes after " + std::to_string(kMaxGraphRetries) +
                                 " retries",
                             kMaxGraphRetries);
}

Adjacency gen_erdos_renyi(int n_nodes, double edge_prob, std::uint64_t seed) {
  if (n_nodes <= 0) throw std::invalid_argument("n_nodes must be positive");
  if (!(edge_prob > 0.0 && edge_prob <= 1.0)) {
    throw std::invalid_argument("edge_prob must lie in (0, 1]");
  }
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(edge_prob);
  for (int attempt = 1; attempt <= kMaxGraphRetries; ++attempt) {
    Adjacency g(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
      for (int j = i + 1; j < n_nodes; ++j) {
        if (coin(rng)) g.add_edge(i, j);
      }
    }
    if (is_connected(g)) return g;
  }
  throw GraphGenerationError("no connected G(" + std::to_string(n_nodes) + ", " +
                                 std::to_string(edge_prob) + ") instance after " +
                                 std::to_string(kMaxGraphRetries) + " retries",
                             kMaxGraphRetries);
}

Adjacency complete_graph(int n_nodes) {
  Adjacency g(n_nodes);
  for (int i = 0; i < n_nodes; ++i)
    for (int j = i + 1; j < n_nodes; ++j) g.add_edge(i, j);
  return g;
}

Adjacency path_graph(int n_nodes) {
  Adjacency g(n_nodes);
  for (int i = 0; i + 1 < n_nodes; ++i) g.add_edge(i, i + 1);
  return g;
}

ConsensusMatrix metropolis_weights(const Adjacency& adj) {
  if (!is_connected(adj)) {
    throw std::invalid_argument("Metropolis weights require a connected graph");
  }
  const int n = adj.n_nodes();
  const auto deg = adj.degrees();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [i, j] : adj.edges()) {
    const double wij = 1.0 / (1.0 + std::max(deg[i], deg[j]));
    w(i, j) = wij;
    w(j, i) = wij;
  }
  for (int i = 0; i < n; ++i) {
    // Sum off-diagonals in index order so w stays exactly symmetric.
    double off = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) off += w(i, j);
    w(i, i) = 1.0 - off;
  }
  ConsensusMatrix cm{std::move(w), 0.0};
  cm.sigma = spectral_gap_sigma(cm.w);
  return cm;
}

double spectral_gap_sigma(const Eigen::MatrixXd& w) {
  const auto n = w.rows();
  if (n != w.cols()) throw std::invalid_argument("consensus matrix must be square");
  if (n > kDenseSigmaLimit) return spectral_gap_sigma_power(w);
  const Eigen::MatrixXd b =
      w - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolve failed");
  const double s = es.eigenvalues().cwiseAbs().maxCoeff();
  // Rounding leaves O(eps) residue for the complete graph.
  return s < 1e-14 ? 0.0 : s;
}

double spectral_gap_sigma_power(const Eigen::MatrixXd& w, double tol, int max_iters) {
  const auto n = w.rows();
  const Eigen::MatrixXd b =
      w - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  const Eigen::MatrixXd b2 = b * b;
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(n, 1.0, 2.0);
  v.array() -= v.mean();
  if (v.norm() == 0.0) return 0.0;
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Eigen::VectorXd next = b2 * v;
    const double nn = next.norm();
    if (nn == 0.0) return 0.0;
    const double rq = v.dot(next);
    next /= nn;
    if (std::abs(rq - lambda) <= tol * std::max(1.0, std::abs(rq)) && it > 10) {
      lambda = rq;
      break;
    }
    lambda = rq;
    v = std::move(next);
  }
  return std::sqrt(std::max(lambda, 0.0));
}

std::string format_edge_list(const Adjacency& adj) {
  std::ostringstream os;
  os << adj.n_nodes() << '\n';
  for (const auto& [i, j] : adj.edges()) os << i << ' ' << j << '\n';
  return os.str();
}

Adjacency parse_edge_list(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int n = -1;
  int line_no = 0;
  std::optional<Adjacency> g;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    if (!g) {
      if (!(ls >> n) || n <= 0) {
        throw std::runtime_error("edge list line " + std::to_string(line_no) +
                                 ": expected positive node count");
      }
      g.emplace(n);
      continue;
    }
    int i = 0;
    int j = 0;
    std::string rest;
    if (!(ls >> i >> j) || (ls >> rest)) {
      throw std::runtime_error("edge list line " + std::to_string(line_no) +
                               ": expected \"i j\"");
    }
    try {
      g->add_edge(i, j);
    } catch (const std::exception& e) {
      throw std::runtime_error("edge list line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!g) throw std::runtime_error("edge list is empty");
  return *std::move(g);
}

void write_edge_list(const Adjacency& adj, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << format_edge_list(adj);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Adjacency read_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_edge_list(ss.str());
}

}  // namespace netgiant
