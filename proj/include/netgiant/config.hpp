#ifndef NETGIANT_CONFIG_HPP
#define NETGIANT_CONFIG_HPP

// JSON experiment descriptions and the pipeline that turns one into a
// concrete problem instance (graph, weights, objectives, x*, X0).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netgiant/experiment.hpp"
#include "netgiant/graph.hpp"
#include "netgiant/objectives.hpp"
#include "netgiant/run.hpp"

namespace netgiant {

/// Invalid or malformed configuration. The message names the offending key
/// (or the line and column for syntax errors).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GraphSpec {
  std::string type = "regular";  // regular | erdos_renyi | complete | path | edgelist
  int n = 20;
  int degree = 14;
  double prob = 0.5;
  std::filesystem::path path;  // edgelist only
  std::optional<std::uint64_t> seed;
};

struct DataSpec {
  std::string source = "synth";  // synth | file | quadratic
  std::string model = "binary";  // binary | multinomial
  int samples = 2000;
  int dim = 10;
  int classes = 3;
  double reg = 0.01;
  double separation = 1.0;
  bool normalize = true;
  std::filesystem::path path;      // file only
  std::string labels = "1/2";      // file only: 1/2 | pm1 | multiclass
  double eig_low = 1.0;            // quadratic only
  double eig_high = 3.0;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> partition_seed;
};

struct InitSpec {
  std::string type = "consensual";  // consensual | random | zero
  double low = 0.0;
  double high = 1.0;
  std::optional<std::uint64_t> seed;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  GraphSpec graph;
  DataSpec data;
  InitSpec init;
  /// One entry for `run`; two or more for `compare`.
  std::vector<RunConfig> algos;
  std::filesystem::path out_dir = "out";
  SvgField plot_field = SvgField::opt_gap;
  bool plot_log = true;

  std::uint64_t graph_seed() const { return graph.seed.value_or(seed); }
  std::uint64_t data_seed() const { return data.seed.value_or(seed + 1); }
  std::uint64_t partition_seed() const { return data.partition_seed.value_or(seed + 2); }
  std::uint64_t init_seed() const { return init.seed.value_or(seed + 3); }

  /// Replaces the top-level seed and drops every explicit sub-seed.
  void override_seed(std::uint64_t s);
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct Problem {
  Adjacency adj{1};
  ConsensusMatrix w;
  ObjectiveSet objs;
  Eigen::VectorXd x_star;
  Eigen::MatrixXd x0;
};

Adjacency build_graph(const GraphSpec& spec, std::uint64_t seed);

/// graph -> Metropolis weights -> data (normalised) -> partitions ->
/// objectives -> x* (closed form or Newton) -> X0.
Problem build_problem(const ExperimentConfig& cfg);

}  // namespace netgiant

#endif  // NETGIANT_CONFIG_HPP
