#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "netgiant/cli.hpp"
#include "netgiant/config.hpp"

namespace fs = std::filesystem;
using netgiant::cli::main;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = main(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("netgiant_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

const char* kQuadratic = R"({
  "seed": 3,
  "graph": {"type": "regular", "n": 6, "d": 2},
  "data": {"source": "quadratic", "dim": 3},
  "init": {"type": "random"},
  "algo": {"name": "netgiant", "eta": 0.002, "max_iters": 50}
})";

const char* kLogisticCompare = R"({
  "seed": 5,
  "graph": {"type": "regular", "n": 6, "d": 3},
  "data": {"source": "synth", "samples": 300, "dim": 3, "reg": 0.05},
  "algos": [
    {"name": "netgiant", "eta": 0.1, "max_iters": 40},
    {"name": "gradtrack", "eta": 0.1, "max_iters": 40},
    {"name": "accngd", "eta": 0.1, "max_iters": 40}
  ]
})";

}  // namespace

TEST_CASE("run") {
  const fs::path dir = scratch("run");
  write(dir / "quad.json", kQuadratic);

  SUBCASE("minimal quadratic config") {
    const auto r = invoke({"run", "--config", (dir / "quad.json").string(), "--out", (dir / "a").string()});
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "a" / "netgiant.csv"));
    CHECK(fs::exists(dir / "a" / "netgiant.svg"));
    CHECK(fs::exists(dir / "a" / "theorem1.txt"));
    CHECK(fs::exists(dir / "a" / "theorem3.txt"));
    CHECK(r.out.find("theorem1: 50 steps, 0 violations") != std::string::npos);
  }
  SUBCASE("repeat runs are byte identical; seed override changes data") {
    const std::string cfg = (dir / "quad.json").string();
    REQUIRE(invoke({"run", "--config", cfg, "--out", (dir / "b1").string(), "--plot", "off"}).code == 0);
    REQUIRE(invoke({"run", "--config", cfg, "--out", (dir / "b2").string(), "--plot", "off"}).code == 0);
    REQUIRE(invoke({"run", "--config", cfg, "--out", (dir / "b3").string(), "--seed", "99"}).code == 0);
    CHECK(slurp(dir / "b1" / "netgiant.csv") == slurp(dir / "b2" / "netgiant.csv"));
    CHECK(slurp(dir / "b1" / "netgiant.csv") != slurp(dir / "b3" / "netgiant.csv"));
    CHECK_FALSE(fs::exists(dir / "b1" / "netgiant.svg"));
  }
  SUBCASE("corrupt config reports where") {
    write(dir / "bad.json", "{\n  \"seed\": 1,\n  \"graph\": {\"type\": \"regular\",,}\n}\n");
    const auto r = invoke({"run", "--config", (dir / "bad.json").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("line 3") != std::string::npos);
  }
  SUBCASE("bad key reports the key") {
    write(dir / "key.json", R"({"algo": {"name": "netgiant", "eta": "fast"}})");
    const auto r = invoke({"run", "--config", (dir / "key.json").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("algo.eta") != std::string::npos);
    write(dir / "unknown.json", R"({"algo": {"name": "netgiant"}, "grpah": {}})");
    CHECK(invoke({"run", "--config", (dir / "unknown.json").string()}).code == 2);
  }
  SUBCASE("graph generation failure") {
    write(dir / "nograph.json",
          R"({"graph": {"type": "regular", "n": 20, "d": 1}, "data": {"source": "quadratic", "dim": 2},
              "algo": {"name": "netgiant", "eta": 0.01}, "output": {"dir": ")" +
              (dir / "ng").string() + R"("}})");
    CHECK(invoke({"run", "--config", (dir / "nograph.json").string()}).code == 3);
  }
  SUBCASE("missing config file") {
    CHECK(invoke({"run", "--config", (dir / "absent.json").string()}).code == 2);
  }
}

TEST_CASE("compare") {
  const fs::path dir = scratch("compare");
  write(dir / "cmp.json", kLogisticCompare);
  const auto r = invoke({"compare", "--config", (dir / "cmp.json").string(), "--out", (dir / "o").string()});
  CHECK(r.code == 0);
  for (const char* f : {"netgiant.csv", "gradtrack.csv", "accngd.csv", "compare.svg"}) {
    CHECK(fs::exists(dir / "o" / f));
  }
  CHECK(std::distance(fs::directory_iterator(dir / "o"), fs::directory_iterator()) == 4);

  write(dir / "one.json", kQuadratic);
  CHECK(invoke({"compare", "--config", (dir / "one.json").string(), "--out", (dir / "p").string()}).code == 2);
}

TEST_CASE("theory") {
  SUBCASE("gradient-tracking minimum") {
    const auto r = invoke({"theory", "--sigma", "0.7", "--L", "5", "--mu", "1", "--grid", "1000"});
    REQUIRE(r.code == 0);
    const auto pos = r.out.find("min_rho_Gbar=");
    REQUIRE(pos != std::string::npos);
    const double rho = std::stod(r.out.substr(pos + 13));
    CHECK(std::abs(rho - 0.9954) <= 1e-3);
  }
  SUBCASE("closed forms") {
    auto r = invoke({"theory", "--sigma", "0.5", "--L", "2", "--mu", "1"});
    REQUIRE(r.code == 0);
    auto pos = r.out.find("eta_bar=");
    CHECK(std::abs(std::stod(r.out.substr(pos + 8)) - 8.333e-3) <= 1e-6);
    r = invoke({"theory", "--sigma", "0", "--L", "3", "--mu", "1"});
    pos = r.out.find("eta_bar=");
    CHECK(std::stod(r.out.substr(pos + 8)) == doctest::Approx(1.0 / (4 * (3 + 27))).epsilon(1e-9));
  }
  SUBCASE("domain errors") {
    CHECK(invoke({"theory", "--sigma", "1.0", "--L", "5", "--mu", "1"}).code == 2);
    CHECK(invoke({"theory", "--sigma", "0.5", "--L", "0.5", "--mu", "1"}).code == 2);
    CHECK(invoke({"theory", "--sigma", "0.5", "--L", "2", "--mu", "1", "--grid", "5"}).code == 2);
  }
}

TEST_CASE("graph") {
  const fs::path dir = scratch("graph");
  SUBCASE("expander") {
    const auto r = invoke({"graph", "--type", "regular", "--n", "20", "--d", "14", "--seed", "3",
                           "--edges-out", (dir / "e.txt").string()});
    REQUIRE(r.code == 0);
    const double sigma = std::stod(r.out.substr(r.out.find("sigma=") + 6));
    CHECK(sigma >= 0.2);
    CHECK(sigma <= 0.45);
    CHECK(r.out.find("edges=140") != std::string::npos);
    CHECK(fs::exists(dir / "e.txt"));
  }
  SUBCASE("complete via d = N - 1") {
    const auto r = invoke({"graph", "--type", "regular", "--n", "8", "--d", "7"});
    REQUIRE(r.code == 0);
    CHECK(std::stod(r.out.substr(r.out.find("sigma=") + 6)) <= 1e-14);
  }
  SUBCASE("imported path of three") {
    write(dir / "p3.txt", "3\n0 1\n1 2\n");
    const auto r = invoke({"graph", "--import", (dir / "p3.txt").string()});
    REQUIRE(r.code == 0);
    CHECK(std::stod(r.out.substr(r.out.find("sigma=") + 6)) == doctest::Approx(2.0 / 3).epsilon(1e-12));
  }
  SUBCASE("generation failure and bad parameters") {
    CHECK(invoke({"graph", "--type", "regular", "--n", "20", "--d", "1"}).code == 3);
    CHECK(invoke({"graph", "--type", "regular", "--n", "5", "--d", "3"}).code == 2);
    CHECK(invoke({"graph", "--type", "hypercube"}).code == 2);
  }
}

TEST_CASE("flags") {
  CHECK(invoke({"graph", "--bogus"}).code == 2);
  CHECK(invoke({}).code == 2);
  const auto help = invoke({"--help"});
  CHECK(help.code == 0);
  for (const char* sub : {"run", "theory", "graph", "compare"}) {
    CHECK(help.out.find(sub) != std::string::npos);
  }
  const auto run_help = invoke({"run", "--help"});
  CHECK(run_help.code == 0);
  for (const char* flag : {"--config", "--out", "--seed", "--plot"}) {
    CHECK(run_help.out.find(flag) != std::string::npos);
  }
  CHECK(invoke({"theory", "--help"}).out.find("--grid") != std::string::npos);
}

TEST_CASE("shipped configs parse") {
  for (const auto& entry : fs::directory_iterator(fs::path(NETGIANT_SOURCE_DIR) / "configs")) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(netgiant::load_config(entry.path()));
  }
}
