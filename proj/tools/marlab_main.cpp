// marlab: desk-scale multi-agent RL laboratory for intention-weighted
// inequity-aversion reward shaping.
//
// Exit codes: 0 success, 1 config error, 2 runtime failure,
//             3 comparison-input mismatch.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "marlab/eicm.hpp"
#include "marlab/gridworlds/matrix_game.hpp"
#include "marlab/harness/compare.hpp"
#include "marlab/harness/config.hpp"
#include "marlab/harness/plots.hpp"
#include "marlab/harness/runner.hpp"

namespace {

using namespace marlab;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitMismatch = 3;

int cmd_validate(const std::string& config_path) {
  const auto config = harness::load_config(config_path);
  for (const auto& w : config.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  std::cout << "OK: " << config_path << " (" << config.env_name << ", "
            << harness::method_name(config.shaping.method) << ", "
            << config.seeds.size() << " seed(s))\n";
  return kExitOk;
}

int cmd_run(const std::string& config_path, long seed_offset, int jobs) {
  auto config = harness::load_config(config_path);
  for (const auto& w : config.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  if (seed_offset != 0) {
    for (auto& s : config.seeds) {
      s += static_cast<std::uint64_t>(seed_offset);
    }
  }
  if (jobs > 0) config.workers = jobs;

  const auto result = harness::run_experiment(config);
  for (const auto& s : result.seeds) {
    if (s.failed) {
      std::cout << "seed " << s.seed << ": FAILED (" << s.error << ")\n";
    } else {
      std::cout << "seed " << s.seed << ": tail mean collective reward "
                << s.tail_mean_collective << "\n";
    }
  }
  std::cout << "summary: mean " << result.aggregate_mean << " +- "
            << result.aggregate_std << " over " << result.completed
            << " seed(s), written to "
            << (result.output_dir / "summary.json").string() << "\n";
  return result.any_failed() ? kExitRuntime : kExitOk;
}

int cmd_plot(const std::vector<std::string>& dirs, std::string out) {
  std::vector<std::filesystem::path> run_dirs(dirs.begin(), dirs.end());
  if (out.empty()) {
    out = (run_dirs.front().parent_path() / "comparison.svg").string();
    if (run_dirs.front().parent_path().empty()) out = "comparison.svg";
  }
  const auto written = harness::emit_plots(run_dirs, out);
  for (const auto& p : written) std::cout << "wrote " << p.string() << "\n";
  return kExitOk;
}

int cmd_compare(const std::vector<std::string>& files,
                const std::string& csv_out) {
  std::vector<harness::MethodSummary> summaries;
  for (const auto& f : files) {
    summaries.push_back(harness::read_summary(f));
  }
  const auto comparison = harness::compare_methods(summaries);
  std::cout << harness::render_table(comparison);
  if (!csv_out.empty()) {
    std::ofstream out(csv_out);
    if (!out) throw std::runtime_error("cannot write " + csv_out);
    out << harness::render_csv(comparison);
    std::cout << "wrote " << csv_out << "\n";
  }
  return kExitOk;
}

// Cross-checks the learned-pipeline intention computation (with exact
// table-backed models plugged in) against brute-force enumeration on
// random matrix games, for both denominator conventions.
int cmd_oracle(int tables, int max_actions, int feature_dim,
               std::uint64_t seed, double tolerance) {
  RngStream rng(seed);
  double worst = 0.0;
  for (int i = 0; i < tables; ++i) {
    const int m = 2 + rng.uniform_int(max_actions - 1);
    const MatrixGameSpec spec = MatrixGameSpec::random(m, feature_dim, rng);
    MatrixGameEnv env(spec);
    env.reset(0);
    JointAction joint = {rng.uniform_int(m), rng.uniform_int(m)};
    const Transition t = env.step(joint);

    EncodeFn encode = [](const Observation& o) { return o.dense; };
    ForwardFn forward = [&spec](const VectorXd&, const VectorXd&,
                                const JointAction& a) {
      return spec.successor[a[0]][a[1]];
    };
    const VectorXd context = VectorXd::Zero(1);

    for (const bool literal : {false, true}) {
      IntentionRule rule;
      rule.inclusive_denominator = !literal;
      const MatrixXd expected = matrix_game_oracle_intentions(spec, joint, rule);
      for (AgentId k = 0; k < 2; ++k) {
        const VectorXd row =
            intentions_row(encode, forward, context, t, k, m,
                           ImpactReference::previous, literal);
        worst = std::max(worst, std::abs(row[1 - k] - expected(k, 1 - k)));
      }
    }
  }
  std::printf("oracle check: %d tables, max |pipeline - bruteforce| = %.3g\n",
              tables, worst);
  if (worst < tolerance) {
    std::printf("PASS (tolerance %.1g)\n", tolerance);
    return kExitOk;
  }
  std::printf("FAIL (tolerance %.1g)\n", tolerance);
  return kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"marlab: sequential-social-dilemma laboratory for "
               "intention-weighted inequity-aversion shaping"};
  app.require_subcommand(1);

  std::string config_path;
  long seed_offset = 0;
  int jobs = 0;
  auto* run = app.add_subcommand("run", "train every seed of a config");
  run->add_option("config", config_path, "experiment config (JSON)")
      ->required();
  run->add_option("--seed-offset", seed_offset,
                  "added to every seed in the config");
  run->add_option("--jobs", jobs, "parallel seed workers (overrides config)");

  std::string validate_path;
  auto* validate =
      app.add_subcommand("validate", "parse and validate a config");
  validate->add_option("config", validate_path, "experiment config (JSON)")
      ->required();

  std::vector<std::string> plot_dirs;
  std::string plot_out;
  auto* plot = app.add_subcommand("plot", "reward curves from run metrics");
  plot->add_option("dirs", plot_dirs, "run output directories")->required();
  plot->add_option("--out", plot_out, "comparison SVG path");

  std::vector<std::string> compare_files;
  std::string compare_csv;
  auto* compare =
      app.add_subcommand("compare", "tail-mean table across summaries");
  compare->add_option("summaries", compare_files, "summary.json files")
      ->required()
      ->expected(-2);
  compare->add_option("--csv", compare_csv, "also write the table as CSV");

  int oracle_tables = 100, oracle_max_actions = 6, oracle_features = 4;
  std::uint64_t oracle_seed = 1;
  double oracle_tolerance = 1e-9;
  auto* oracle = app.add_subcommand(
      "oracle", "matrix-game intention oracle cross-check");
  oracle->add_option("--tables", oracle_tables, "number of random games");
  oracle->add_option("--max-actions", oracle_max_actions, "max action count");
  oracle->add_option("--feature-dim", oracle_features, "feature width");
  oracle->add_option("--seed", oracle_seed, "generator seed");
  oracle->add_option("--tolerance", oracle_tolerance, "pass threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(config_path, seed_offset, jobs);
    if (validate->parsed()) return cmd_validate(validate_path);
    if (plot->parsed()) return cmd_plot(plot_dirs, plot_out);
    if (compare->parsed()) return cmd_compare(compare_files, compare_csv);
    if (oracle->parsed()) {
      return cmd_oracle(oracle_tables, oracle_max_actions, oracle_features,
                        oracle_seed, oracle_tolerance);
    }
  } catch (const harness::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const harness::ComparisonError& e) {
    std::cerr << "comparison error: " << e.what() << "\n";
    return kExitMismatch;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
