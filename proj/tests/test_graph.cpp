#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "netgiant/graph.hpp"

using namespace netgiant;

namespace {

void check_consensus_invariants(const Adjacency& adj, const ConsensusMatrix& cm) {
  const int n = adj.n_nodes();
  const Eigen::MatrixXd& w = cm.w;
  CHECK((w - w.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((w.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
  CHECK((w.colwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
  CHECK(w.minCoeff() >= 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && !adj.has_edge(i, j)) CHECK(w(i, j) == 0.0);
  CHECK(cm.sigma >= 0.0);
  CHECK(cm.sigma < 1.0);
}

}  // namespace

TEST_CASE("adjacency rejects loops and bad endpoints") {
  Adjacency g(3);
  CHECK(g.add_edge(0, 1));
  CHECK_FALSE(g.add_edge(1, 0));
  CHECK(g.has_edge(1, 0));
  CHECK_THROWS_AS(g.add_edge(2, 2), std::invalid_argument);
  CHECK_THROWS_AS(g.add_edge(0, 3), std::out_of_range);
  CHECK(g.n_edges() == 1);
}

TEST_CASE("connectivity") {
  Adjacency one_edge(2);
  one_edge.add_edge(0, 1);
  CHECK(is_connected(one_edge));
  CHECK_FALSE(is_connected(Adjacency(2)));
  CHECK(is_connected(path_graph(3)));
}

TEST_CASE("regular graphs") {
  SUBCASE("n=20, d=14 lands in the expected sigma band") {
    for (std::uint64_t seed : {1u, 2u, 3u, 7u}) {
      const Adjacency g = gen_regular_graph(20, 14, seed);
      for (int d : g.degrees()) CHECK(d == 14);
      CHECK(is_connected(g));
      const auto cm = metropolis_weights(g);
      check_consensus_invariants(g, cm);
      CHECK(cm.sigma >= 0.2);
      CHECK(cm.sigma <= 0.45);
    }
  }
  SUBCASE("3-regular on 4 nodes is K4") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) CHECK(gen_regular_graph(4, 3, seed).n_edges() == 6);
  }
  SUBCASE("cubic graphs on 6 nodes") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Adjacency g = gen_regular_graph(6, 3, seed);
      CHECK(g.n_edges() == 9);
      for (int d : g.degrees()) CHECK(d == 3);
      CHECK(is_connected(g));
    }
  }
  SUBCASE("d=4 is sparse and slow mixing") {
    const auto cm = metropolis_weights(gen_regular_graph(20, 4, 5));
    CHECK(cm.sigma > 0.5);
  }
  SUBCASE("deterministic per seed") {
    CHECK(gen_regular_graph(20, 4, 9).edges() == gen_regular_graph(20, 4, 9).edges());
  }
  CHECK_THROWS_AS(gen_regular_graph(5, 3, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_regular_graph(5, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_regular_graph(20, 1, 1), GraphGenerationError);
}

TEST_CASE("Erdos-Renyi graphs") {
  SUBCASE("p = 1 on two nodes is a single edge") {
    const Adjacency g = gen_erdos_renyi(2, 1.0, 4);
    CHECK(g.n_edges() == 1);
    CHECK(g.has_edge(0, 1));
  }
  SUBCASE("p = 0.75") {
    const auto cm = metropolis_weights(gen_erdos_renyi(20, 0.75, 11));
    CHECK(cm.sigma >= 0.3);
    CHECK(cm.sigma <= 0.6);
  }
  SUBCASE("p = 0.2 edge count") {
    const double mean = 0.2 * 190;
    const double sd = std::sqrt(190 * 0.2 * 0.8);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const Adjacency g = gen_erdos_renyi(20, 0.2, seed);
      CHECK(is_connected(g));
      CHECK(std::abs(static_cast<double>(g.n_edges()) - mean) <= 3 * sd);
    }
  }
  CHECK_THROWS_AS(gen_erdos_renyi(20, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_erdos_renyi(200, 0.001, 1), GraphGenerationError);
}

TEST_CASE("Metropolis weights") {
  SUBCASE("path of three") {
    const auto cm = metropolis_weights(path_graph(3));
    Eigen::Matrix3d expected;
    expected << 2.0 / 3, 1.0 / 3, 0, 1.0 / 3, 1.0 / 3, 1.0 / 3, 0, 1.0 / 3, 2.0 / 3;
    CHECK((cm.w - expected).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(cm.sigma == doctest::Approx(2.0 / 3).epsilon(1e-13));
  }
  SUBCASE("complete graph averages") {
    const auto cm = metropolis_weights(complete_graph(7));
    CHECK((cm.w.array() - 1.0 / 7).abs().maxCoeff() <= 1e-15);
    CHECK(cm.sigma <= 1e-14);
  }
  SUBCASE("single edge") {
    Adjacency g(2);
    g.add_edge(0, 1);
    const auto cm = metropolis_weights(g);
    CHECK((cm.w.array() - 0.5).abs().maxCoeff() == 0.0);
    CHECK(cm.sigma == 0.0);
  }
  CHECK_THROWS_AS(metropolis_weights(Adjacency(3)), std::invalid_argument);
}

TEST_CASE("dense sigma agrees with power iteration") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto w = metropolis_weights(gen_erdos_renyi(30, 0.2, seed)).w;
    CHECK(spectral_gap_sigma(w) == doctest::Approx(spectral_gap_sigma_power(w)).epsilon(1e-9));
  }
}

TEST_CASE("edge list round trip") {
  const Adjacency g = gen_regular_graph(10, 4, 3);
  const Adjacency back = parse_edge_list(format_edge_list(g));
  CHECK(back.n_nodes() == 10);
  CHECK(back.edges() == g.edges());

  const auto path = std::filesystem::temp_directory_path() / "netgiant_edges_test.txt";
  write_edge_list(g, path);
  CHECK(read_edge_list(path).edges() == g.edges());
  std::filesystem::remove(path);

  CHECK_THROWS(parse_edge_list(""));
  CHECK_THROWS(parse_edge_list("3\n0 x\n"));
  CHECK_THROWS(parse_edge_list("3\n0 0\n"));
}
