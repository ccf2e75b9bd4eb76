#include "liouville/cli.hpp"
#include "liouville/graph_io.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using liouville::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result lab(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("liouville_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(path));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream l(line);
    while (std::getline(l, cell, ','))
      cells.push_back(cell);
    if (!line.empty() && line.back() == ',')
      cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::string header(const fs::path& path) {
  std::istringstream in(slurp(path));
  std::string line;
  std::getline(in, line);
  return line;
}

// depth-8 graph shared by the read-only commands
const fs::path& shared_graph() {
  static const fs::path dir = [] {
    const fs::path d = scratch("shared");
    REQUIRE(lab({"build", "--depth", "8", "--seed", "3", "--out", d.string()}).code == 0);
    return d;
  }();
  static const fs::path file = dir / "graph.txt";
  return file;
}

} // namespace

TEST_CASE("build writes graph, gaps and manifest deterministically") {
  const auto a = scratch("build_a");
  const auto b = scratch("build_b");
  for (const auto& d : {a, b}) {
    const auto r = lab({"build", "--depth", "6", "--seed", "9", "--out", d.string()});
    CHECK(r.code == 0);
    CHECK(r.err.empty());
  }
  CHECK(header(a / "gaps.csv") == "level,m,model,seed,lambda,mu_star,method,residual");
  for (const char* f : {"graph.txt", "gaps.csv"})
    CHECK(slurp(a / f) == slurp(b / f));
  const auto rows = read_csv(a / "gaps.csv");
  REQUIRE(rows.size() == 7);
  CHECK(rows[1][0] == "1");
  CHECK(rows[1][2] == "forced");
  CHECK(std::stod(rows[2][4]) == doctest::Approx(2.0 / 3.0));
  for (std::size_t k = 3; k < rows.size(); ++k) {
    CHECK(rows[k][2] == "pairing");
    CHECK(std::stod(rows[k][4]) >= 0.02);
  }
  const auto manifest = slurp(a / "build.manifest.json");
  CHECK(manifest.find("\"sha256\": \"" + liouville::sha256_hex(slurp(a / "graph.txt")) + "\"") !=
        std::string::npos);
  CHECK(manifest.find("\"depth\": \"6\"") != std::string::npos);
  CHECK(manifest.find("help") == std::string::npos);
}

TEST_CASE("build edge cases and failures") {
  const auto d = scratch("build_edge");
  CHECK(lab({"build", "--depth", "0", "--out", d.string()}).code == 0);
  CHECK(read_csv(d / "gaps.csv").size() == 1);

  const auto impossible =
      lab({"build", "--depth", "5", "--min-gap", "0.9", "--max-retries", "3", "--out", d.string()});
  CHECK(impossible.code == 3);
  CHECK_FALSE(impossible.err.empty());

  CHECK(lab({"build", "--out", d.string()}).code == 2);
  CHECK(lab({"build", "--depth", "-1", "--out", d.string()}).code == 2);
  CHECK(lab({"build", "--depth", "4", "--model", "lattice", "--out", d.string()}).code == 2);
  CHECK(lab({"frobnicate"}).code == 2);
  CHECK(lab({}).code == 2);
  CHECK(lab({"--help"}).code == 0);
}

TEST_CASE("missing or corrupt graph files are argument errors") {
  const auto d = scratch("badgraph");
  CHECK(lab({"verify", "--graph", (d / "nope.txt").string(), "--out", d.string()}).code == 2);
  {
    std::ofstream f(d / "bad.txt");
    f << "version 1\nvariant standard\ndepth x\n";
  }
  const auto r = lab({"verify", "--graph", (d / "bad.txt").string(), "--out", d.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 3") != std::string::npos);
}

TEST_CASE("verify") {
  const auto d = scratch("verify");
  const auto r = lab({"verify", "--graph", shared_graph().string(), "--out", d.string()});
  CHECK(r.code == 0);
  CHECK(header(d / "transfer_checks.csv") ==
        "n,row_sum_max_err,col_sum_max_err,norm_1to1,norm_inf,decomposition_residual");
  const auto rows = read_csv(d / "transfer_checks.csv");
  REQUIRE(rows.size() == 9);
  CHECK(rows[1][5].empty());
  CHECK(rows[2][5].empty());
  for (std::size_t k = 1; k < rows.size(); ++k) {
    CHECK(std::stod(rows[k][1]) <= 1e-10);
    CHECK(std::stod(rows[k][3]) == doctest::Approx(1.0).epsilon(1e-9));
    if (k >= 3)
      CHECK(std::stod(rows[k][5]) <= 1e-8);
  }
  CHECK(lab({"verify", "--graph", shared_graph().string(), "--n-max", "8", "--out", d.string()}).code == 2);
}

TEST_CASE("decay") {
  const auto d = scratch("decay");
  REQUIRE(lab({"build", "--depth", "10", "--seed", "1", "--out", d.string()}).code == 0);
  REQUIRE(lab({"decay", "--graph", (d / "graph.txt").string(), "--u", "2:0", "--v", "2:3", "--n-max",
               "10", "--out", d.string()})
              .code == 0);
  CHECK(header(d / "decay.csv") ==
        "n,l1,l2,linf,sum_abs_diff,tv,lambda_n,bound_1_minus_half_lambda,ratio_l2");
  const auto rows = read_csv(d / "decay.csv");
  REQUIRE(rows.size() == 10);
  for (std::size_t k = 2; k < rows.size(); ++k)
    CHECK(std::stod(rows[k][4]) <= std::stod(rows[k - 1][4]) + 1e-12);
  CHECK(rows.back()[8].empty());
  CHECK(lab({"decay", "--graph", (d / "graph.txt").string(), "--u", "2:9", "--v", "2:3", "--out",
             d.string()})
            .code == 2);
}

TEST_CASE("visits and harmonic are reproducible across worker counts") {
  const auto a = scratch("visits_a");
  const auto b = scratch("visits_b");
  const std::vector<std::string> common{"--graph", shared_graph().string(), "--level", "4",
                                        "--walks", "20000", "--seed", "5"};
  auto args = [&](const fs::path& d, const std::string& workers) {
    std::vector<std::string> v{"visits"};
    v.insert(v.end(), common.begin(), common.end());
    v.insert(v.end(), {"--workers", workers, "--out", d.string()});
    return v;
  };
  CHECK(lab(args(a, "1")).code == 0);
  CHECK(lab(args(b, "7")).code == 0);
  CHECK(slurp(a / "visits.csv") == slurp(b / "visits.csv"));
  CHECK(slurp(a / "visits_summary.json") == slurp(b / "visits_summary.json"));
  CHECK(header(a / "visits.csv") == "v,count");
  CHECK(fs::exists(a / "visits.manifest.json"));

  CHECK(lab({"harmonic", "--graph", shared_graph().string(), "--u", "0:0", "--n", "4", "--method", "mc",
             "--walks", "5000", "--workers", "3", "--out", a.string()})
            .code == 0);
  CHECK(header(a / "mc_harmonic.csv") == "vertex_index,frequency,std_err");
  CHECK(lab({"harmonic", "--graph", shared_graph().string(), "--u", "0:0", "--n", "4", "--out",
             a.string()})
            .code == 0);
  const auto exact = read_csv(a / "harmonic_exact.csv");
  REQUIRE(exact.size() == 17);
  double total = 0.0;
  for (std::size_t k = 1; k < exact.size(); ++k)
    total += std::stod(exact[k][1]);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lab({"harmonic", "--graph", shared_graph().string(), "--u", "0:0", "--n", "4", "--method",
             "guess", "--out", a.string()})
            .code == 2);
}

TEST_CASE("cheeger") {
  const auto d = scratch("cheeger");
  const auto r = lab({"cheeger", "--graph", shared_graph().string(), "--universe", "ball:2", "--universe",
                      "search:greedy:16:ball:3", "--universe", "induced-ball:0:0:2", "--out", d.string()});
  CHECK(r.code == 0);
  CHECK(header(d / "cheeger.csv") == "universe_desc,ratio,set_size,exhaustive");
  const auto rows = read_csv(d / "cheeger.csv");
  REQUIRE(rows.size() == 4);
  CHECK(rows[1][3] == "true");
  CHECK(std::stod(rows[1][1]) >= 1.0 / 3.0);
  CHECK(rows[2][3] == "false");
  CHECK(lab({"cheeger", "--graph", shared_graph().string(), "--universe", "ball:5", "--out", d.string()})
            .code == 2);
  CHECK(lab({"cheeger", "--graph", shared_graph().string(), "--universe", "sphere:2", "--out", d.string()})
            .code == 2);
}

TEST_CASE("unbalanced") {
  const auto d = scratch("unbalanced");
  CHECK(lab({"unbalanced", "--depth", "8", "--out", d.string()}).code == 0);
  CHECK(header(d / "unbalanced.csv") == "n,max_density,min_density,ratio");
  const auto rows = read_csv(d / "unbalanced.csv");
  REQUIRE(rows.size() == 9);
  CHECK(rows[1][0] == "1");
  CHECK(std::stod(rows[1][3]) == doctest::Approx(2.0));
  for (std::size_t k = 2; k < rows.size(); ++k)
    CHECK(std::stod(rows[k][3]) > std::stod(rows[k - 1][3]));
}

TEST_CASE("return") {
  const auto d = scratch("return");
  CHECK(lab({"return", "--graph", shared_graph().string(), "--t-max", "8", "--out", d.string()}).code == 0);
  const auto rows = read_csv(d / "return.csv");
  CHECK(rows[0] == std::vector<std::string>{"t", "p_t", "p_t_pow"});
  REQUIRE(rows.size() == 5);
  CHECK(std::stod(rows[1][1]) == doctest::Approx(0.5));
}

TEST_CASE("config file supplies defaults and flags override") {
  const auto d = scratch("config");
  {
    std::ofstream f(d / "lab.toml");
    f << "[build]\ndepth = 4\nseed = 11\n";
  }
  CHECK(lab({"build", "--config", (d / "lab.toml").string(), "--out", (d / "a").string()}).code == 0);
  CHECK(lab({"build", "--depth", "4", "--seed", "11", "--out", (d / "b").string()}).code == 0);
  CHECK(slurp(d / "a" / "graph.txt") == slurp(d / "b" / "graph.txt"));
  CHECK(lab({"build", "--config", (d / "lab.toml").string(), "--seed", "12", "--out", (d / "c").string()})
            .code == 0);
  CHECK(slurp(d / "a" / "graph.txt") != slurp(d / "c" / "graph.txt"));
}
