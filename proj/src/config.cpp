#include "netgiant/config.hpp"

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "netgiant/algorithms.hpp"

namespace netgiant {

using nlohmann::json;

void ExperimentConfig::override_seed(std::uint64_t s) {
  seed = s;
  graph.seed.reset();
  data.seed.reset();
  data.partition_seed.reset();
  init.seed.reset();
}

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw ConfigError("config key '" + key + "': " + why);
}

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : obj.items()) {
    if (!ok.contains(k)) bad(where.empty() ? k : where + "." + k, "unknown key");
  }
}

const json& section(const json& root, const char* name) {
  const auto& s = root.at(name);
  if (!s.is_object()) bad(name, "expected an object");
  return s;
}

template <typename T>
void read(const json& obj, const std::string& where, const char* key, T& out) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  const std::string full = where + "." + key;
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) bad(full, "expected true or false");
    out = v.get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) bad(full, "expected a string");
    out = v.get<std::string>();
  } else if constexpr (std::is_same_v<T, std::filesystem::path>) {
    if (!v.is_string()) bad(full, "expected a path string");
    out = v.get<std::string>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) bad(full, "expected an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (v.is_number_unsigned() || v.get<long long>() >= 0) {
        out = v.get<T>();
      } else {
        bad(full, "expected a non-negative integer");
      }
    } else {
      out = v.get<T>();
    }
  } else {
    if (!v.is_number()) bad(full, "expected a number");
    out = v.get<T>();
  }
}

void read_seed(const json& obj, const std::string& where, const char* key,
               std::optional<std::uint64_t>& out) {
  if (!obj.contains(key)) return;
  std::uint64_t s = 0;
  read(obj, where, key, s);
  out = s;
}

RunConfig parse_algo(const json& a, const std::string& where) {
  if (!a.is_object()) bad(where, "expected an object");
  reject_unknown(a, where, {"name", "eta", "alpha", "max_iters", "tol", "label", "track_gamma"});
  RunConfig rc;
  if (!a.contains("name")) bad(where + ".name", "missing");
  std::string name;
  read(a, where, "name", name);
  try {
    rc.algorithm = parse_algorithm(name);
  } catch (const std::invalid_argument& e) {
    bad(where + ".name", e.what());
  }
  read(a, where, "eta", rc.eta);
  if (a.contains("alpha")) {
    double alpha = 0.0;
    read(a, where, "alpha", alpha);
    rc.alpha = alpha;
  }
  read(a, where, "max_iters", rc.max_iters);
  read(a, where, "tol", rc.tol);
  read(a, where, "label", rc.label);
  read(a, where, "track_gamma", rc.track_gamma);
  try {
    rc.validate();
  } catch (const std::invalid_argument& e) {
    bad(where, e.what());
  }
  if (!(rc.tol >= 0.0)) bad(where + ".tol", "must be non-negative");
  return rc;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(root, "", {"seed", "graph", "data", "init", "algo", "algos", "output"});

  ExperimentConfig cfg;
  read(root, "", "seed", cfg.seed);

  if (root.contains("graph")) {
    const auto& g = section(root, "graph");
    reject_unknown(g, "graph", {"type", "n", "d", "p", "seed", "path"});
    read(g, "graph", "type", cfg.graph.type);
    read(g, "graph", "n", cfg.graph.n);
    read(g, "graph", "d", cfg.graph.degree);
    read(g, "graph", "p", cfg.graph.prob);
    read(g, "graph", "path", cfg.graph.path);
    read_seed(g, "graph", "seed", cfg.graph.seed);
    static const std::set<std::string> kinds = {"regular", "erdos_renyi", "complete", "path",
                                                "edgelist"};
    if (!kinds.contains(cfg.graph.type)) bad("graph.type", "unknown graph type '" + cfg.graph.type + "'");
    if (cfg.graph.type == "edgelist" && cfg.graph.path.empty()) bad("graph.path", "required for edgelist");
    if (cfg.graph.type != "edgelist" && cfg.graph.n < 1) bad("graph.n", "must be positive");
  }

  if (root.contains("data")) {
    const auto& d = section(root, "data");
    reject_unknown(d, "data",
                   {"source", "model", "samples", "dim", "classes", "reg", "separation",
                    "normalize", "path", "labels", "eig_low", "eig_high", "seed",
                    "partition_seed"});
    auto& ds = cfg.data;
    read(d, "data", "source", ds.source);
    read(d, "data", "model", ds.model);
    read(d, "data", "samples", ds.samples);
    read(d, "data", "dim", ds.dim);
    read(d, "data", "classes", ds.classes);
    read(d, "data", "reg", ds.reg);
    read(d, "data", "separation", ds.separation);
    read(d, "data", "normalize", ds.normalize);
    read(d, "data", "path", ds.path);
    read(d, "data", "labels", ds.labels);
    read(d, "data", "eig_low", ds.eig_low);
    read(d, "data", "eig_high", ds.eig_high);
    read_seed(d, "data", "seed", ds.seed);
    read_seed(d, "data", "partition_seed", ds.partition_seed);
    if (ds.source != "synth" && ds.source != "file" && ds.source != "quadratic") {
      bad("data.source", "unknown source '" + ds.source + "'");
    }
    if (ds.model != "binary" && ds.model != "multinomial") bad("data.model", "unknown model '" + ds.model + "'");
    if (ds.source == "file" && ds.path.empty()) bad("data.path", "required for file source");
    if (ds.labels != "1/2" && ds.labels != "pm1" && ds.labels != "multiclass") {
      bad("data.labels", "expected 1/2, pm1 or multiclass");
    }
    if (ds.dim < 1) bad("data.dim", "must be positive");
    if (ds.samples < 2) bad("data.samples", "need at least two samples");
    if (ds.classes < 2) bad("data.classes", "need at least two classes");
    if (!(ds.reg > 0.0)) bad("data.reg", "must be positive");
    if (!(ds.eig_low > 0.0 && ds.eig_high >= ds.eig_low)) {
      bad("data.eig_low", "need 0 < eig_low <= eig_high");
    }
  }

  if (root.contains("init")) {
    const auto& in = section(root, "init");
    reject_unknown(in, "init", {"type", "low", "high", "seed"});
    read(in, "init", "type", cfg.init.type);
    read(in, "init", "low", cfg.init.low);
    read(in, "init", "high", cfg.init.high);
    read_seed(in, "init", "seed", cfg.init.seed);
    if (cfg.init.type != "consensual" && cfg.init.type != "random" && cfg.init.type != "zero") {
      bad("init.type", "expected consensual, random or zero");
    }
    if (!(cfg.init.low <= cfg.init.high)) bad("init.low", "must not exceed init.high");
  }

  if (root.contains("algo") && root.contains("algos")) bad("algos", "give either algo or algos, not both");
  if (root.contains("algo")) {
    cfg.algos.push_back(parse_algo(root.at("algo"), "algo"));
  } else if (root.contains("algos")) {
    const auto& list = root.at("algos");
    if (!list.is_array()) bad("algos", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      cfg.algos.push_back(parse_algo(list[i], "algos[" + std::to_string(i) + "]"));
    }
  } else {
    bad("algo", "missing");
  }
  if (cfg.algos.empty()) bad("algos", "empty list");

  if (root.contains("output")) {
    const auto& o = section(root, "output");
    reject_unknown(o, "output", {"dir", "plot_field", "log_scale"});
    read(o, "output", "dir", cfg.out_dir);
    read(o, "output", "log_scale", cfg.plot_log);
    if (o.contains("plot_field")) {
      std::string f;
      read(o, "output", "plot_field", f);
      try {
        cfg.plot_field = parse_svg_field(f);
      } catch (const std::invalid_argument& e) {
        bad("output.plot_field", e.what());
      }
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

Adjacency build_graph(const GraphSpec& spec, std::uint64_t seed) {
  if (spec.type == "regular") return gen_regular_graph(spec.n, spec.degree, seed);
  if (spec.type == "erdos_renyi") return gen_erdos_renyi(spec.n, spec.prob, seed);
  if (spec.type == "complete") return complete_graph(spec.n);
  if (spec.type == "path") return path_graph(spec.n);
  if (spec.type == "edgelist") return read_edge_list(spec.path);
  throw ConfigError("config key 'graph.type': unknown graph type '" + spec.type + "'");
}

namespace {

ObjectiveSet build_quadratic(const DataSpec& spec, int n_nodes, std::uint64_t seed,
                             Eigen::VectorXd& x_star) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> eig(spec.eig_low, spec.eig_high);
  const int n = spec.dim;
  std::vector<Eigen::MatrixXd> a_list;
  std::vector<Eigen::VectorXd> b_list;
  for (int i = 0; i < n_nodes; ++i) {
    Eigen::MatrixXd g(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) g(r, c) = gauss(rng);
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    Eigen::VectorXd lam(n);
    for (int k = 0; k < n; ++k) lam(k) = eig(rng);
    Eigen::MatrixXd a = q * lam.asDiagonal() * q.transpose();
    a = 0.5 * (a + a.transpose()).eval();
    Eigen::VectorXd b(n);
    for (int k = 0; k < n; ++k) b(k) = gauss(rng);
    a_list.push_back(std::move(a));
    b_list.push_back(std::move(b));
  }
  x_star = quad_minimizer(a_list, b_list);
  return quad_objective(a_list, b_list);
}

}  // namespace

Problem build_problem(const ExperimentConfig& cfg) {
  Problem p;
  p.adj = build_graph(cfg.graph, cfg.graph_seed());
  p.w = metropolis_weights(p.adj);
  const int n_nodes = p.adj.n_nodes();
  const auto& ds = cfg.data;

  if (ds.source == "quadratic") {
    p.objs = build_quadratic(ds, n_nodes, cfg.data_seed(), p.x_star);
  } else {
    Dataset data;
    const bool multi = ds.model == "multinomial";
    if (ds.source == "file") {
      LibsvmOptions opts;
      opts.labels = ds.labels == "pm1"          ? LabelMode::binary_pm1
                    : ds.labels == "multiclass" ? LabelMode::multiclass
                                                : LabelMode::binary_12;
      if (multi && opts.labels != LabelMode::multiclass) {
        throw ConfigError("config key 'data.labels': multinomial model needs multiclass labels");
      }
      data = load_libsvm(ds.path, opts);
    } else if (multi) {
      data = synth_multiclass(ds.samples, ds.dim, ds.classes, cfg.data_seed(), ds.separation);
    } else {
      data = synth_logistic(ds.samples, ds.dim, cfg.data_seed(), ds.separation);
    }
    if (ds.normalize) normalize_min_max(data);
    const auto parts = partition_uniform(data, n_nodes, cfg.partition_seed());
    if (multi) {
      int classes = ds.classes;
      if (ds.source == "file") classes = data.labels.maxCoeff();
      p.objs = multinomial_objective(parts, classes, ds.reg);
    } else {
      p.objs = logistic_binary_objective(parts, ds.reg);
    }
    p.x_star = newton_backtracking_solve(p.objs, Eigen::VectorXd::Zero(p.objs.dim));
  }

  const int n = p.objs.dim;
  p.x0 = Eigen::MatrixXd::Zero(n_nodes, n);
  if (cfg.init.type != "zero") {
    std::mt19937_64 rng(cfg.init_seed());
    std::uniform_real_distribution<double> unif(cfg.init.low, cfg.init.high);
    if (cfg.init.type == "consensual") {
      Eigen::RowVectorXd row(n);
      for (int k = 0; k < n; ++k) row(k) = unif(rng);
      p.x0.rowwise() = row;
    } else {
      for (int i = 0; i < n_nodes; ++i)
        for (int k = 0; k < n; ++k) p.x0(i, k) = unif(rng);
    }
  }
  return p;
}

}  // namespace netgiant
