#include "liouville/cli.hpp"

#include "liouville/cheeger.hpp"
#include "liouville/errors.hpp"
#include "liouville/graph.hpp"
#include "liouville/graph_io.hpp"
#include "liouville/spectral.hpp"
#include "liouville/transfer.hpp"
#include "liouville/walk.hpp"
#include "output.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>

namespace liouville::cli {

namespace {

using Json = nlohmann::ordered_json;

// Identity tolerances checked by `verify`.
constexpr double kRowSumTolerance = 1e-10;
constexpr double kColSumTolerance = 1e-9;
constexpr double kDecompositionTolerance = 1e-8;

struct Common {
  std::string graph;
  std::string out = ".";
  std::uint64_t seed = 1;
  int workers = 1;
  std::uint64_t walks = 100000;
};

struct Options {
  Common common;
  int depth = 0;
  std::string model = "pairing";
  double minGap = 0.02;
  int maxRetries = 100;
  int nMax = -1;
  std::string u;
  std::string v;
  int level = 0;
  std::int64_t index = 0;
  std::uint64_t maxSteps = 10000000;
  int n = 0;
  std::string method = "exact";
  std::vector<std::string> universes;
  int maxExhaustive = 20;
  std::string vertex = "0:0";
  int tMax = 20;
};

Json resolved_config(const CLI::App& sub) {
  Json config = Json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_name(false, true);
    std::string key = opt->get_lnames().empty() ? name : opt->get_lnames().front();
    if (key.empty() || key == "help" || key == "help-all")
      continue;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      if (results.size() == 1)
        config[key] = results.front();
      else
        config[key] = results;
    } else {
      config[key] = opt->get_default_str();
    }
  }
  return config;
}

LeveledGraph load_graph(const Options& o) {
  if (o.common.graph.empty())
    throw ArgumentError("--graph is required");
  return read_graph_file(o.common.graph);
}

WalkConfig walk_config(const Options& o) {
  WalkConfig cfg;
  cfg.masterSeed = o.common.seed;
  cfg.walks = o.common.walks;
  cfg.maxSteps = o.maxSteps;
  cfg.workers = o.common.workers;
  return cfg;
}

std::string str(std::int64_t value) { return std::to_string(value); }

void cmd_build(const Options& o, RunOutput& run, std::ostream& out) {
  ExpanderConfig config;
  config.model = parse_expander_model(o.model);
  config.minGap = o.minGap;
  config.maxRetries = o.maxRetries;
  const LeveledGraph g = build_graph(o.depth, config, o.common.seed);

  CsvTable gaps({"level", "m", "model", "seed", "lambda", "mu_star", "method", "residual"});
  for (int n = 1; n <= g.depth(); ++n) {
    const ExpanderLayer& layer = g.layer(n);
    const SpectralReport report = expander_gap(layer);
    gaps.row({str(n), str(layer.num_vertices()),
              layer.model ? to_string(*layer.model) : std::string("unknown"),
              std::to_string(layer.generatorSeed), format_real(report.gap),
              format_real(report.secondEigenvalueModulus), to_string(report.method),
              format_real(report.residual)});
  }
  run.add("graph.txt", serialize_graph(g));
  run.add("gaps.csv", gaps.str());
  // Level 1 is the bipartite triple edge, so the infimum is taken from level 2 on.
  if (g.depth() >= 2) {
    double lowest = 1.0;
    for (int n = 2; n <= g.depth(); ++n)
      lowest = std::min(lowest, level_gap(g, n));
    out << "min gap over levels 2.." << g.depth() << ": " << format_real(lowest) << "\n";
  }
}

int cmd_verify(const Options& o, RunOutput& run, std::ostream& err) {
  const LeveledGraph g = load_graph(o);
  const int nMax = o.nMax < 0 ? std::min(g.depth() - 1, kMaterializationCap) : o.nMax;
  if (nMax < 0 || nMax + 1 > g.depth() || nMax > kMaterializationCap)
    throw ArgumentError("--n-max must satisfy n + 1 <= depth and n <= " +
                        std::to_string(kMaterializationCap));
  CsvTable table({"n", "row_sum_max_err", "col_sum_max_err", "norm_1to1", "norm_inf",
                  "decomposition_residual"});
  bool ok = true;
  for (int n = 0; n <= nMax; ++n) {
    const TransferOperator t = transfer_matrix(g, n);
    const OperatorNorms norms = operator_norms(t);
    std::optional<double> residual;
    if (n >= 2 && g.variant() == GraphVariant::standard)
      residual = decomposition_residual(g, n);
    ok = ok && norms.rowSumMaxError <= kRowSumTolerance &&
         norms.colSumMaxError <= kColSumTolerance &&
         (!residual || *residual <= kDecompositionTolerance);
    table.row({str(n), format_real(norms.rowSumMaxError), format_real(norms.colSumMaxError),
               format_real(norms.norm1to1), format_real(norms.normInfToInf),
               format_real(residual)});
  }
  run.add("transfer_checks.csv", table.str());
  if (!ok) {
    err << "verify: identity check above tolerance (rows 1e-10, columns 1e-9, "
           "decomposition 1e-8); see transfer_checks.csv\n";
    return kNumeric;
  }
  return kOk;
}

void cmd_decay(const Options& o, RunOutput& run) {
  const LeveledGraph g = load_graph(o);
  const VertexId u = parse_vertex(o.u);
  const VertexId v = parse_vertex(o.v);
  const int nMax = o.nMax < 0 ? g.depth() : o.nMax;
  CsvTable table({"n", "l1", "l2", "linf", "sum_abs_diff", "tv", "lambda_n",
                  "bound_1_minus_half_lambda", "ratio_l2"});
  for (const DecayRow& r : liouville_report(g, u, v, nMax))
    table.row({str(r.n), format_real(r.l1), format_real(r.l2), format_real(r.linf),
               format_real(r.sumAbsDiff), format_real(r.tv), format_real(r.lambda),
               format_real(r.bound), format_real(r.ratioL2)});
  run.add("decay.csv", table.str());
}

void cmd_visits(const Options& o, RunOutput& run) {
  const LeveledGraph g = load_graph(o);
  const VertexId y{o.level + 1, o.index};
  if (o.level < 1 || !g.contains(y))
    throw ArgumentError("--level n needs 1 <= n and n + 1 <= depth, --index within L_(n+1)");
  const WalkConfig cfg = walk_config(o);
  const VisitStats stats = mc_expected_visits(g, y, cfg);
  const GoodnessOfFit fit = geometric_fit(stats);

  CsvTable table({"v", "count"});
  for (std::size_t k = 0; k < stats.histogram.size(); ++k)
    table.row({std::to_string(k), std::to_string(stats.histogram[k])});
  run.add("visits.csv", table.str());

  Json summary;
  summary["level"] = o.level;
  summary["start"] = to_string(y);
  summary["mean"] = stats.mean;
  summary["se"] = stats.mean_standard_error();
  summary["variance"] = stats.varianceEstimate;
  summary["p_zero"] = stats.zero_fraction();
  summary["p_zero_se"] = stats.zero_standard_error();
  summary["chi_square"] = fit.chiSquare;
  summary["chi_square_dof"] = fit.degreesOfFreedom;
  summary["chi_square_p_value"] = fit.pValue;
  summary["censored"] = stats.censored;
  summary["seed"] = cfg.masterSeed;
  summary["walks"] = cfg.walks;
  run.add_json("visits_summary.json", summary);
}

void cmd_harmonic(const Options& o, RunOutput& run) {
  const LeveledGraph g = load_graph(o);
  const VertexId u = parse_vertex(o.u);
  if (o.method == "exact") {
    const HarmonicMeasure mu = harmonic_measure_exact(g, u, o.n);
    CsvTable table({"vertex_index", "weight"});
    for (Eigen::Index i = 0; i < mu.weights.size(); ++i)
      table.row({str(i), format_real(mu.weights(i))});
    run.add("harmonic_exact.csv", table.str());
    return;
  }
  if (o.method != "mc")
    throw ArgumentError("--method must be exact or mc");
  const WalkConfig cfg = walk_config(o);
  const HarmonicMeasure mu = mc_harmonic_measure(g, u, o.n, cfg);
  CsvTable table({"vertex_index", "frequency", "std_err"});
  for (Eigen::Index i = 0; i < mu.weights.size(); ++i)
    table.row({str(i), format_real(mu.weights(i)), format_real(mu.standardErrors(i))});
  run.add("mc_harmonic.csv", table.str());

  Json summary;
  summary["start"] = to_string(u);
  summary["level"] = o.n;
  summary["accepted"] = mu.walks;
  summary["censored"] = mu.censored;
  summary["seed"] = cfg.masterSeed;
  summary["walks"] = cfg.walks;
  run.add_json("harmonic_summary.json", summary);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream stream(text);
  std::string part;
  while (std::getline(stream, part, sep))
    out.push_back(part);
  return out;
}

int parse_int(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const int value = std::stoi(text, &used);
    if (used == text.size())
      return value;
  } catch (const std::exception&) {
  }
  throw ArgumentError("expected an integer for " + what + ", got '" + text + "'");
}

// Universe specs:
//   ball:M                      exhaustive over B_M
//   vertices:L:I,L:I,...        exhaustive over the listed vertices
//   search:greedy|anneal:BUDGET[:ball:M]   heuristic, optionally started at B_M
//   induced-ball:L:I:R          induced expansion of the radius-R ball at L:I
CheegerResult run_universe(const LeveledGraph& g, const std::string& spec, const Options& o) {
  const auto parts = split(spec, ':');
  if (parts.size() == 2 && parts[0] == "ball") {
    const auto universe = ball_vertices(parse_int(parts[1], "ball radius"));
    return cheeger_brute(g, universe, o.maxExhaustive);
  }
  if (parts.size() >= 2 && parts[0] == "vertices") {
    std::vector<VertexId> universe;
    for (const auto& item : split(spec.substr(spec.find(':') + 1), ','))
      universe.push_back(parse_vertex(item));
    return cheeger_brute(g, universe, o.maxExhaustive);
  }
  if ((parts.size() == 3 || parts.size() == 5) && parts[0] == "search") {
    SearchOptions search;
    search.heuristic = parse_search_heuristic(parts[1]);
    search.sizeBudget = parse_int(parts[2], "search budget");
    search.seed = o.common.seed;
    if (parts.size() == 5) {
      if (parts[3] != "ball")
        throw ArgumentError("search start must be ball:M");
      search.initial = ball_vertices(parse_int(parts[4], "ball radius"));
    }
    return cheeger_search(g, search);
  }
  if (parts.size() == 4 && parts[0] == "induced-ball") {
    const VertexId center{parse_int(parts[1], "level"), parse_int(parts[2], "index")};
    const BallExpansion ball = ball_cheeger(g, center, parse_int(parts[3], "radius"), o.common.seed);
    if (!ball.profile)
      throw ArgumentError("ball " + spec + " has no admissible subset (single vertex)");
    return *ball.profile;
  }
  throw ArgumentError("unrecognised universe '" + spec +
                      "' (ball:M, vertices:L:I,..., search:greedy|anneal:BUDGET[:ball:M], "
                      "induced-ball:L:I:R)");
}

void cmd_cheeger(const Options& o, RunOutput& run) {
  const LeveledGraph g = load_graph(o);
  CsvTable table({"universe_desc", "ratio", "set_size", "exhaustive"});
  for (const auto& spec : o.universes) {
    const CheegerResult r = run_universe(g, spec, o);
    table.row({spec, format_real(r.ratio), str(static_cast<std::int64_t>(r.witnessSet.size())),
               r.exhaustive ? "true" : "false"});
  }
  run.add("cheeger.csv", table.str());
}

void cmd_unbalanced(const Options& o, RunOutput& run) {
  const LeveledGraph g = build_unbalanced_tree(o.depth);
  const int nMax = o.nMax < 0 ? g.depth() : o.nMax;
  const LevelMeasures levels = propagate_harmonic(g, {VertexId{0, 0}}, nMax);
  CsvTable table({"n", "max_density", "min_density", "ratio"});
  for (std::size_t k = 1; k < levels.measures.size(); ++k) {
    const int n = levels.firstLevel + static_cast<int>(k);
    const Eigen::VectorXd density = std::ldexp(1.0, n) * levels.measures[k].col(0);
    const double hi = density.maxCoeff();
    const double lo = density.minCoeff();
    table.row({str(n), format_real(hi), format_real(lo), format_real(hi / lo)});
  }
  run.add("unbalanced.csv", table.str());
}

void cmd_return(const Options& o, RunOutput& run) {
  const LeveledGraph g = load_graph(o);
  CsvTable table({"t", "p_t", "p_t_pow"});
  for (const auto& r : return_exponent(g, parse_vertex(o.vertex), o.tMax))
    table.row({str(r.t), format_real(r.probability), format_real(r.root)});
  run.add("return.csv", table.str());
}

void add_graph_flag(CLI::App* sub, Options& o) {
  sub->add_option("--graph", o.common.graph, "Graph file written by `build`")->required();
}

void add_out_flag(CLI::App* sub, Options& o) {
  sub->add_option("--out", o.common.out, "Output directory")->capture_default_str();
}

void add_seed_flag(CLI::App* sub, Options& o) {
  sub->add_option("--seed", o.common.seed, "Master seed")->capture_default_str();
}

void add_walk_flags(CLI::App* sub, Options& o) {
  sub->add_option("--walks", o.common.walks, "Number of Monte Carlo walks")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--workers", o.common.workers, "Worker threads (speed only)")
      ->envname("LIOUVILLE_LAB_WORKERS")
      ->capture_default_str()
      ->check(CLI::Range(1, 1024));
  sub->add_option("--max-steps", o.maxSteps, "Censoring cap per walk")->capture_default_str();
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  o.common.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  CLI::App app{"Liouville lab: leveled expander graphs, transfer operators and harmonic measures",
               "liouville_lab"};
  app.set_config("--config", "", "TOML/INI file with option defaults; flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  auto* build = app.add_subcommand("build", "Build and certify a leveled expander graph");
  build->add_option("--depth", o.depth, "Tree depth N")->required()->check(CLI::Range(0, kMaxDepth));
  build->add_option("--model", o.model, "Expander model: pairing or cycle")->capture_default_str();
  build->add_option("--min-gap", o.minGap, "Minimum certified two-sided gap")->capture_default_str();
  build->add_option("--max-retries", o.maxRetries, "Certification attempts per level")
      ->capture_default_str();
  add_seed_flag(build, o);
  add_out_flag(build, o);

  auto* verify = app.add_subcommand("verify", "Row/column sums, norms and first-step identity");
  add_graph_flag(verify, o);
  verify->add_option("--n-max", o.nMax, "Largest level n (default min(depth-1, 10))");
  add_out_flag(verify, o);

  auto* decay = app.add_subcommand("decay", "Harmonic-measure decay table from two starts");
  add_graph_flag(decay, o);
  decay->add_option("--u", o.u, "Start vertex LEVEL:INDEX")->required();
  decay->add_option("--v", o.v, "Second start vertex LEVEL:INDEX")->required();
  decay->add_option("--n-max", o.nMax, "Last level (default depth)");
  add_out_flag(decay, o);

  auto* visits = app.add_subcommand("visits", "Monte Carlo law of visits to L_n before leaving B_n");
  add_graph_flag(visits, o);
  visits->add_option("--level", o.level, "Ball level n (walks start on L_(n+1))")->required();
  visits->add_option("--index", o.index, "Start index within L_(n+1)")->capture_default_str();
  add_seed_flag(visits, o);
  add_walk_flags(visits, o);
  add_out_flag(visits, o);

  auto* harmonic = app.add_subcommand("harmonic", "Harmonic measure on L_n from a vertex");
  add_graph_flag(harmonic, o);
  harmonic->add_option("--u", o.u, "Start vertex LEVEL:INDEX")->required();
  harmonic->add_option("--n", o.n, "Target level")->required();
  harmonic->add_option("--method", o.method, "exact or mc")->capture_default_str();
  add_seed_flag(harmonic, o);
  add_walk_flags(harmonic, o);
  add_out_flag(harmonic, o);

  auto* cheeger = app.add_subcommand("cheeger", "Vertex-isoperimetric ratios");
  add_graph_flag(cheeger, o);
  cheeger->add_option("--universe", o.universes,
                      "ball:M | vertices:L:I,... | search:greedy|anneal:BUDGET[:ball:M] | "
                      "induced-ball:L:I:R (repeatable)")
      ->required();
  cheeger->add_option("--max-exhaustive", o.maxExhaustive, "Largest exhaustive universe")
      ->capture_default_str();
  add_seed_flag(cheeger, o);
  add_out_flag(cheeger, o);

  auto* unbalanced = app.add_subcommand("unbalanced", "Harmonic-density spread on the unbalanced tree");
  unbalanced->add_option("--depth", o.depth, "Tree depth")->required()->check(CLI::Range(1, kMaxDepth));
  unbalanced->add_option("--n-max", o.nMax, "Last level (default depth)");
  add_out_flag(unbalanced, o);

  auto* ret = app.add_subcommand("return", "Return probabilities p_2t(v, v) and their 2t-th roots");
  add_graph_flag(ret, o);
  ret->add_option("--vertex", o.vertex, "Vertex LEVEL:INDEX")->capture_default_str();
  ret->add_option("--t-max", o.tMax, "Largest time")->capture_default_str();
  add_out_flag(ret, o);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kArgument;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    RunOutput run(o.common.out, sub->get_name());
    run.set_config(resolved_config(*sub));
    int code = kOk;
    if (sub == build)
      cmd_build(o, run, out);
    else if (sub == verify)
      code = cmd_verify(o, run, err);
    else if (sub == decay)
      cmd_decay(o, run);
    else if (sub == visits)
      cmd_visits(o, run);
    else if (sub == harmonic)
      cmd_harmonic(o, run);
    else if (sub == cheeger)
      cmd_cheeger(o, run);
    else if (sub == unbalanced)
      cmd_unbalanced(o, run);
    else if (sub == ret)
      cmd_return(o, run);
    run.write();
    return code;
  } catch (const GenerationError& e) {
    err << "generation failure: " << e.what() << "\n";
    return kGeneration;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return kArgument;
  } catch (const ParseError& e) {
    err << "invalid graph file: " << e.what() << "\n";
    return kArgument;
  } catch (const ValidationError& e) {
    err << "invalid graph file: " << e.what() << "\n";
    return kArgument;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}

} // namespace liouville::cli
