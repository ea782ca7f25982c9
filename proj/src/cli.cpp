#include "netgiant/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "netgiant/config.hpp"
#include "netgiant/experiment.hpp"
#include "netgiant/graph.hpp"
#include "netgiant/run.hpp"
#include "netgiant/theory.hpp"
#include "netgiant/verify.hpp"

namespace netgiant::cli {

namespace {

/// Raised for failures that map to the numeric exit code.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string sci(double v, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*e", digits, v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

struct RunOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string plot = "on";
};

ExperimentConfig prepare(const RunOptions& o) {
  ExperimentConfig cfg = load_config(o.config);
  if (o.seed) cfg.override_seed(*o.seed);
  if (!o.out.empty()) cfg.out_dir = o.out;
  std::filesystem::create_directories(cfg.out_dir);
  return cfg;
}

Problem prepare_problem(const ExperimentConfig& cfg) {
  try {
    return build_problem(cfg);
  } catch (const GraphGenerationError& e) {
    throw NumericFailure(e.what());
  }
}

int first_hit(const Trajectory& t, double level) {
  for (const auto& r : t.records) {
    if (r.opt_gap <= level) return r.iter;
  }
  return -1;
}

void summarise(const Trajectory& t, std::ostream& out) {
  const auto& last = t.records.back();
  out << t.config.display_name() << ": status=" << to_string(t.status)
      << " iterations=" << last.iter << " opt_gap=" << sci(last.opt_gap)
      << " f_gap=" << sci(last.f_gap);
  const int hit = first_hit(t, 1e-6);
  out << " iters_to_1e-6=" << (hit < 0 ? std::string("none") : std::to_string(hit)) << '\n';
  if (!t.diagnostic.empty()) out << "  diagnostic: " << t.diagnostic << '\n';
}

// Bound audits for one run; writes report files and returns a one-line note each.
void audit(const Trajectory& t, const Problem& p, const std::filesystem::path& dir,
           std::ostream& out) {
  const auto& objs = p.objs;
  const double eta = t.config.eta;
  const bool newton = t.config.algorithm == Algorithm::netgiant;

  std::string note1;
  if (!newton) {
    note1 = "not applicable: bound is stated for netgiant";
  } else if (eta > objs.mu / objs.lip_L) {
    note1 = "not applicable: eta=" + sci(eta) + " exceeds mu/L=" + sci(objs.mu / objs.lip_L);
  } else {
    const auto g = theory::rate_matrix_G(eta, p.w.sigma, objs.lip_L, objs.mu);
    const auto rep = check_theorem1(t, g);
    write_text(dir / "theorem1.txt", format_report(rep));
    note1 = std::to_string(rep.n_steps) + " steps, " + std::to_string(rep.n_violations) +
            " violations";
  }
  out << "theorem1: " << note1 << '\n';

  std::string note3;
  if (!newton) {
    note3 = "not applicable: bound is stated for netgiant";
  } else if (!t.config.track_gamma) {
    note3 = "not applicable: gamma tracking disabled";
  } else {
    const GapBoundParams gp{objs.mu, objs.lip_L, objs.hess_lip, eta};
    const auto rep = check_theorem3(t, gp);
    write_text(dir / "theorem3.txt", format_report(rep));
    note3 = std::to_string(rep.n_steps) + " steps, " + std::to_string(rep.n_violations) +
            " violations, " + std::to_string(rep.n_skipped) + " skipped (gamma >= mu)";
  }
  out << "theorem3: " << note3 << '\n';
}

int cmd_run(const RunOptions& o, std::ostream& out) {
  const ExperimentConfig cfg = prepare(o);
  if (cfg.algos.size() != 1) {
    throw ConfigError("run expects exactly one algorithm; use compare for several");
  }
  const Problem p = prepare_problem(cfg);
  RunConfig rc = cfg.algos.front();
  rc.seed = cfg.seed;
  const Trajectory t = run(rc, p.w, p.objs, p.x0, p.x_star);

  out << "nodes=" << p.adj.n_nodes() << " edges=" << p.adj.n_edges()
      << " sigma=" << sci(p.w.sigma) << " dim=" << p.objs.dim << " mu=" << sci(p.objs.mu)
      << " L=" << sci(p.objs.lip_L) << " Lbar=" << sci(p.objs.hess_lip) << '\n';
  summarise(t, out);
  const auto csv = cfg.out_dir / (std::string(to_string(rc.algorithm)) + ".csv");
  write_csv(t, csv);
  out << "wrote " << csv.string() << '\n';
  if (o.plot == "on") {
    const auto svg = cfg.out_dir / (std::string(to_string(rc.algorithm)) + ".svg");
    write_svg(std::span<const Trajectory>(&t, 1), svg, cfg.plot_field, cfg.plot_log,
              t.config.display_name());
    out << "wrote " << svg.string() << '\n';
  }
  if (t.status == RunStatus::aborted) throw NumericFailure(t.diagnostic);
  audit(t, p, cfg.out_dir, out);
  return kExitOk;
}

int cmd_compare(const RunOptions& o, std::ostream& out) {
  const ExperimentConfig cfg = prepare(o);
  if (cfg.algos.size() < 2) throw ConfigError("config key 'algos': compare needs at least two algorithms");
  const Problem p = prepare_problem(cfg);

  std::vector<Trajectory> trajs;
  std::map<std::string, int> used;
  bool aborted = false;
  for (const auto& a : cfg.algos) {
    RunConfig rc = a;
    rc.seed = cfg.seed;
    trajs.push_back(run(rc, p.w, p.objs, p.x0, p.x_star));
    const auto& t = trajs.back();
    summarise(t, out);
    std::string stem(to_string(rc.algorithm));
    if (const int k = used[stem]++; k > 0) stem += "_" + std::to_string(k + 1);
    const auto csv = cfg.out_dir / (stem + ".csv");
    write_csv(t, csv);
    out << "wrote " << csv.string() << '\n';
    aborted = aborted || t.status == RunStatus::aborted;
  }
  if (o.plot == "on") {
    const auto svg = cfg.out_dir / "compare.svg";
    write_svg(trajs, svg, cfg.plot_field, cfg.plot_log, "comparison");
    out << "wrote " << svg.string() << '\n';
  }
  if (aborted) throw NumericFailure("at least one run aborted");
  return kExitOk;
}

struct TheoryOptions {
  double sigma = 0.0;
  double lip_L = 0.0;
  double mu = 0.0;
  int grid = 200;
};

int cmd_theory(const TheoryOptions& o, std::ostream& out) {
  using namespace theory;
  if (!(o.sigma >= 0.0 && o.sigma < 1.0)) throw std::invalid_argument("--sigma must lie in [0, 1)");
  if (!(o.mu > 0.0 && o.lip_L >= o.mu)) throw std::invalid_argument("need --L >= --mu > 0");
  if (o.grid < 100) throw std::invalid_argument("--grid must be at least 100");

  const double kappa = o.lip_L / o.mu;
  const double eb = eta_bar(o.sigma, kappa);
  const double et = eta_tilde(o.sigma, kappa, o.lip_L);
  out << "sigma=" << sci(o.sigma) << " L=" << sci(o.lip_L) << " mu=" << sci(o.mu)
      << " kappa=" << sci(kappa) << '\n';
  out << "eta_bar=" << sci(eb, 9) << '\n';
  out << "eta_tilde=" << sci(et, 9) << '\n';

  auto table = [&](const char* name, const MatrixBuilder<double>& build, double eta_max) {
    out << "\n# " << name << " over eta in (0, " << sci(eta_max) << "]\n";
    out << "eta,rho\n";
    for (int j = 1; j <= o.grid; ++j) {
      const double eta = eta_max * j / o.grid;
      out << sci(eta, 9) << ',' << sci(spectral_radius3(build(eta, o.sigma, o.lip_L, o.mu).m), 9)
          << '\n';
    }
    const auto best = min_rho_over_eta(build, o.sigma, o.lip_L, o.mu, eta_max, o.grid);
    out << "min_rho_" << name << "=" << sci(best.rho_min, 9) << " at eta=" << sci(best.eta_opt, 9)
        << '\n';
  };
  table("G", rate_matrix_G<double>, eb);
  table("Gbar", rate_matrix_Gbar<double>, et);
  return kExitOk;
}

struct GraphOptions {
  std::string type = "regular";
  int n = 20;
  int d = 14;
  double p = 0.5;
  std::uint64_t seed = 1;
  std::string import_path;
  std::string edges_out;
};

int cmd_graph(const GraphOptions& o, std::ostream& out) {
  Adjacency adj(1);
  try {
    if (!o.import_path.empty()) {
      adj = read_edge_list(o.import_path);
    } else {
      GraphSpec spec;
      spec.type = o.type;
      spec.n = o.n;
      spec.degree = o.d;
      spec.prob = o.p;
      adj = build_graph(spec, o.seed);
    }
  } catch (const GraphGenerationError& e) {
    throw NumericFailure(e.what());
  } catch (const ConfigError& e) {
    throw std::invalid_argument(e.what());
  }
  if (!is_connected(adj)) throw NumericFailure("graph is not connected");
  const ConsensusMatrix w = metropolis_weights(adj);
  const auto deg = adj.degrees();
  out << "nodes=" << adj.n_nodes() << '\n';
  out << "edges=" << adj.n_edges() << '\n';
  out << "degrees=";
  for (std::size_t i = 0; i < deg.size(); ++i) out << (i ? "," : "") << deg[i];
  out << '\n';
  out << "degree_min=" << *std::min_element(deg.begin(), deg.end())
      << " degree_max=" << *std::max_element(deg.begin(), deg.end()) << '\n';
  out << "sigma=" << sci(w.sigma, 12) << '\n';
  if (!o.edges_out.empty()) {
    write_edge_list(adj, o.edges_out);
    out << "wrote " << o.edges_out << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Network-GIANT simulator and convergence-bound toolkit", "netgiant"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("--config", run_opts.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", run_opts.out, "output directory (overrides output.dir)");
    sub->add_option("--seed", run_opts.seed, "override every seed in the config");
    sub->add_option("--plot", run_opts.plot, "write SVG charts")->check(CLI::IsMember({"on", "off"}));
  };
  auto* run_cmd = app.add_subcommand("run", "run one algorithm and audit the bounds");
  add_run_flags(run_cmd);
  auto* compare_cmd = app.add_subcommand("compare", "run several algorithms on a shared instance");
  add_run_flags(compare_cmd);

  TheoryOptions th;
  auto* theory_cmd = app.add_subcommand("theory", "step-size thresholds and rate-matrix spectra");
  theory_cmd->add_option("--sigma", th.sigma, "mixing spectral norm")->required();
  theory_cmd->add_option("--L", th.lip_L, "smoothness constant")->required();
  theory_cmd->add_option("--mu", th.mu, "strong-convexity constant")->required();
  theory_cmd->add_option("--grid", th.grid, "points in each eta sweep")->capture_default_str();

  GraphOptions go;
  auto* graph_cmd = app.add_subcommand("graph", "generate or import a graph and report sigma");
  graph_cmd->add_option("--type", go.type, "regular | erdos_renyi | complete | path")
      ->check(CLI::IsMember({"regular", "erdos_renyi", "complete", "path"}))
      ->capture_default_str();
  graph_cmd->add_option("--n", go.n, "number of nodes")->capture_default_str();
  graph_cmd->add_option("--d", go.d, "degree (regular)")->capture_default_str();
  graph_cmd->add_option("--p", go.p, "edge probability (erdos_renyi)")->capture_default_str();
  graph_cmd->add_option("--seed", go.seed, "generator seed")->capture_default_str();
  graph_cmd->add_option("--import", go.import_path, "read an edge list instead of generating")
      ->check(CLI::ExistingFile);
  graph_cmd->add_option("--edges-out", go.edges_out, "write the edge list here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run_opts, out);
    if (compare_cmd->parsed()) return cmd_compare(run_opts, out);
    if (theory_cmd->parsed()) return cmd_theory(th, out);
    if (graph_cmd->parsed()) return cmd_graph(go, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}

}  // namespace netgiant::cli
