// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "liouville/cheeger.hpp"
#include "liouville/cli.hpp"
#include "liouville/graph.hpp"
#include "liouville/graph_io.hpp"
#include "liouville/spectral.hpp"
#include "liouville/transfer.hpp"
#include "liouville/walk.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace liouville;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Detail {
 public:
  template <typename T>
  Detail& operator<<(const T& value) {
    s_ << value;
    return *this;
  }
  std::string str() const { return s_.str(); }

 private:
  std::ostringstream s_;
};

int failures = 0;

void criterion(int id, const std::string& name, double budgetSeconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budgetSeconds > 0 && seconds > budgetSeconds) {
    o.pass = false;
    o.detail += "; over runtime budget " + std::to_string(budgetSeconds) + " s";
  }
  if (!o.pass)
    ++failures;
  char time[32];
  std::snprintf(time, sizeof time, "%.2f s", seconds);
  std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << name << " (" << time << "): " << o.detail
            << std::endl;
}

const LeveledGraph& depth10() {
  static const LeveledGraph g = build_graph(10, {}, 1);
  return g;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

} // namespace

int main() {
  std::cout.precision(6);

  criterion(1, "transfer identities, depth 10, n = 1..8", 120, [] {
    double row = 0.0;
    double col = 0.0;
    for (int n = 1; n <= 8; ++n) {
      const auto norms = operator_norms(transfer_matrix(depth10(), n));
      row = std::max(row, norms.rowSumMaxError);
      col = std::max(col, norms.colSumMaxError);
    }
    return Outcome{row <= 1e-10 && col <= 1e-9,
                   (Detail() << "max row-sum error " << row << ", max column-sum error " << col).str()};
  });

  criterion(2, "norm bounds ||T||_1->1 = ||T||_inf->inf = 1, n = 1..8", 0, [] {
    double worst = 0.0;
    for (int n = 1; n <= 8; ++n) {
      const auto norms = operator_norms(transfer_matrix(depth10(), n));
      worst = std::max({worst, std::abs(norms.norm1to1 - 1.0), std::abs(norms.normInfToInf - 1.0)});
    }
    return Outcome{worst <= 1e-9, (Detail() << "max deviation from 1: " << worst).str()};
  });

  criterion(3, "mean-zero norm sigma <= 1 and <= 1 - lambda_n/2", 0, [] {
    bool ok = true;
    Detail d;
    for (int n = 1; n <= 8; ++n) {
      const double lambda = level_gap(depth10(), n);
      const auto m = mean_zero_norm(transfer_matrix(depth10(), n), lambda);
      ok = ok && m.sigma <= 1.0 + 1e-9;
      if (n >= 2)
        ok = ok && m.sigma <= m.bound + 1e-6;
      d << "n=" << n << " sigma=" << m.sigma << " bound=" << m.bound << (n < 8 ? "; " : "");
    }
    return Outcome{ok, d.str()};
  });

  criterion(4, "first-step decomposition, n = 2..6", 0, [] {
    double worst = 0.0;
    for (int n = 2; n <= 6; ++n)
      worst = std::max(worst, decomposition_residual(depth10(), n));
    return Outcome{worst <= 1e-8, (Detail() << "max residual " << worst).str()};
  });

  criterion(5, "visit-count law at n = 5, 1e6 walks, 4 workers", 60, [] {
    WalkConfig cfg;
    cfg.masterSeed = 1;
    cfg.walks = 1000000;
    cfg.workers = 4;
    const auto s = mc_expected_visits(depth10(), {6, 0}, cfg);
    const auto fit = geometric_fit(s);
    const double censoredFraction = static_cast<double>(s.censored) / static_cast<double>(cfg.walks);
    const bool ok = std::abs(s.mean - 0.5) <= 4 * s.mean_standard_error() &&
                    std::abs(s.zero_fraction() - 5.0 / 6.0) <= 4 * s.zero_standard_error() &&
                    fit.pValue > 0.001 && censoredFraction < 1e-6;
    return Outcome{ok, (Detail() << "mean " << s.mean << " (se " << s.mean_standard_error() << "), P(V=0) "
                                 << s.zero_fraction() << " (se " << s.zero_standard_error() << "), chi2 "
                                 << fit.chiSquare << " on " << fit.degreesOfFreedom << " dof, p "
                                 << fit.pValue << ", censored " << s.censored)
                           .str()};
  });

  criterion(6, "Monte Carlo vs exact harmonic measure, root -> L_6", 0, [] {
    WalkConfig cfg;
    cfg.masterSeed = 1;
    cfg.walks = 1000000;
    cfg.workers = 4;
    const auto mc = mc_harmonic_measure(depth10(), {0, 0}, 6, cfg);
    const auto exact = harmonic_measure_exact(depth10(), {0, 0}, 6);
    const auto direct = harmonic_measure_direct(depth10(), {0, 0}, 6);
    const double l1 = (mc.weights - exact.weights).cwiseAbs().sum();
    const double solveGap = (exact.weights - direct.weights).cwiseAbs().maxCoeff();
    return Outcome{l1 <= 0.02 && solveGap <= 1e-9 && mc.censored == 0,
                   (Detail() << "sum |MC - exact| " << l1 << ", propagation vs direct " << solveGap).str()};
  });

  criterion(7, "Liouville decay, depth 12, u = 2:0, v = 2:3", 0, [] {
    const auto g = build_graph(12, {}, 1);
    const auto rows = liouville_report(g, {2, 0}, {2, 3}, 12);
    bool ok = true;
    int firstBelow = -1;
    Detail d;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& r = rows[k];
      if (k > 0)
        ok = ok && r.sumAbsDiff <= rows[k - 1].sumAbsDiff;
      if (r.n >= 3 && r.n <= 11)
        ok = ok && r.ratioL2 && *r.ratioL2 <= *r.bound + 1e-6;
      if (firstBelow < 0 && r.sumAbsDiff < 0.05)
        firstBelow = r.n;
    }
    d << "sum |mu_u - mu_v| from " << rows.front().sumAbsDiff << " (n=" << rows.front().n << ") to "
      << rows.back().sumAbsDiff << " (n=" << rows.back().n << "); first n below 0.05: "
      << (firstBelow < 0 ? std::string("none") : std::to_string(firstBelow)) << "; worst ratio/bound ";
    double worst = 0.0;
    for (const auto& r : rows)
      if (r.n >= 3 && r.n <= 11 && r.ratioL2)
        worst = std::max(worst, *r.ratioL2 / *r.bound);
    d << worst;
    return Outcome{ok, d.str()};
  });

  criterion(8, "expander certification, pairing m = 1024, 5 seeds", 60, [] {
    bool ok = true;
    Detail d;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto layer = build_expander_layer(1024, ExpanderModel::pairing, seed);
      const double gap = expander_gap(layer).gap;
      ok = ok && gap >= 0.02;
      d << "seed " << seed << ": " << gap << "; ";
    }
    d << "anchor 1 - 2*sqrt(2)/3 = " << 1.0 - 2.0 * std::sqrt(2.0) / 3.0;
    return Outcome{ok, d.str()};
  });

  criterion(9, "exhaustive Cheeger minimum over B_3 in depth 6 >= 1/3", 0, [] {
    const auto g = build_graph(6, {}, 1);
    const auto r = cheeger_brute(g, ball_vertices(3));
    return Outcome{r.exhaustive && r.ratio >= 1.0 / 3.0,
                   (Detail() << "min |dS|/|S| = " << r.boundarySize << "/" << r.witnessSet.size() << " = "
                             << r.ratio)
                       .str()};
  });

  criterion(10, "unbalanced tree density ratio strictly increasing, n = 2..8", 0, [] {
    const auto levels = propagate_harmonic(build_unbalanced_tree(8), {VertexId{0, 0}}, 8);
    std::vector<double> ratio(9, 0.0);
    for (std::size_t k = 0; k < levels.measures.size(); ++k) {
      const int n = levels.firstLevel + static_cast<int>(k);
      const Eigen::VectorXd mu = levels.measures[k].col(0);
      ratio[static_cast<std::size_t>(n)] = mu.maxCoeff() / mu.minCoeff();
    }
    bool ok = true;
    Detail d;
    for (int n = 2; n <= 8; ++n) {
      ok = ok && ratio[static_cast<std::size_t>(n)] > ratio[static_cast<std::size_t>(n - 1)];
      d << "n=" << n << ": " << ratio[static_cast<std::size_t>(n)] << (n < 8 ? ", " : "");
    }
    return Outcome{ok, d.str()};
  });

  criterion(11, "Monte Carlo outputs byte-identical for workers 1, 4, 16", 0, [] {
    const fs::path root = fs::temp_directory_path() / "liouville_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);
    const std::string graph = (root / "graph.txt").string();
    write_graph_file(depth10(), graph);

    std::ostringstream sink;
    bool ok = true;
    std::vector<std::string> reference;
    for (const char* workers : {"1", "4", "16"}) {
      const fs::path dir = root / workers;
      const std::vector<std::vector<std::string>> runs{
          {"visits", "--graph", graph, "--level", "5", "--walks", "1000000", "--seed", "1", "--workers", workers,
           "--out", dir.string()},
          {"harmonic", "--graph", graph, "--u", "0:0", "--n", "6", "--method", "mc", "--walks", "1000000",
           "--seed", "1", "--workers", workers, "--out", dir.string()}};
      for (const auto& args : runs)
        ok = ok && cli::run(args, sink, sink) == 0;
      std::vector<std::string> bytes;
      for (const char* f : {"visits.csv", "visits_summary.json", "mc_harmonic.csv", "harmonic_summary.json"})
        bytes.push_back(slurp(dir / f));
      if (reference.empty())
        reference = bytes;
      else
        ok = ok && bytes == reference;
    }
    fs::remove_all(root);
    return Outcome{ok, ok ? "visits and harmonic artifacts identical" : "outputs differ or a run failed"};
  });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
