#include "marlab/harness/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "marlab/harness/metrics.hpp"

namespace marlab::harness {

namespace fs = std::filesystem;
using nlohmann::json;

std::filesystem::path resolve_output_dir(const ExperimentConfig& config) {
  fs::path out = config.output_dir;
  if (const char* root = std::getenv("MARLAB_OUTPUT_ROOT")) {
    if (out.is_relative() && *root) out = fs::path(root) / out;
  }
  return out;
}

std::unique_ptr<Env> make_env(const ExperimentConfig& config) {
  if (config.env_name == "cleanup") {
    return std::make_unique<CleanupEnv>(config.cleanup);
  }
  if (config.env_name == "harvest") {
    return std::make_unique<HarvestEnv>(config.harvest);
  }
  throw ConfigError("environment.name: unknown environment " +
                    config.env_name);
}

double tail_mean(const std::vector<double>& values, double tail_fraction) {
  if (values.empty()) return 0.0;
  const std::size_t n = values.size();
  const std::size_t take = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(tail_fraction * n)));
  const std::size_t from = n - take;
  double sum = 0.0;
  for (std::size_t i = from; i < n; ++i) sum += values[i];
  return sum / static_cast<double>(take);
}

int convergence_episode(const std::vector<double>& values,
                        double tail_fraction, double factor) {
  if (values.empty()) return -1;
  const double threshold = tail_mean(values, tail_fraction);
  const double band = (factor - 1.0) * std::max(1.0, std::abs(threshold));
  double suffix_dev = 0.0;
  int settled = -1;
  for (int i = static_cast<int>(values.size()) - 1; i >= 0; --i) {
    suffix_dev = std::max(suffix_dev, std::abs(values[i] - threshold));
    if (suffix_dev <= band) settled = i;
  }
  return settled;
}

namespace {

// RNG stream ids under one run seed
constexpr std::uint64_t kEnvStream = 1;
constexpr std::uint64_t kEicmInitStream = 1000;
constexpr std::uint64_t kDqnInitStream = 2000;
constexpr std::uint64_t kDqnActionStream = 3000;

std::vector<std::string> agent_block(const VectorXd& e, const VectorXd& i,
                                     const VectorXd& r, const MatrixXd& d,
                                     double fwd, double inv, double moa,
                                     double epsilon) {
  std::vector<std::string> cells;
  const int n = static_cast<int>(e.size());
  for (int k = 0; k < n; ++k) cells.push_back(format_csv_double(e[k]));
  for (int k = 0; k < n; ++k) cells.push_back(format_csv_double(i[k]));
  for (int k = 0; k < n; ++k) cells.push_back(format_csv_double(r[k]));
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      if (j == k) continue;
      cells.push_back(format_csv_double(d(k, j)));
    }
  }
  cells.push_back(format_csv_double(fwd));
  cells.push_back(format_csv_double(inv));
  cells.push_back(format_csv_double(moa));
  cells.push_back(format_csv_double(epsilon));
  return cells;
}

}  // namespace

SeedResult run_seed(const ExperimentConfig& config, std::uint64_t seed,
                    const fs::path& outdir) {
  SeedResult result;
  result.seed = seed;

  const fs::path seed_dir = outdir / ("seed_" + std::to_string(seed));
  fs::create_directories(seed_dir);

  const int n = config.n_agents;
  const int m = config.env_n_actions();

  auto env = make_env(config);
  const std::uint64_t env_seed = RngStream::derive(seed, kEnvStream);

  // probe one observation to size the encoder input
  std::vector<Observation> obs = env->reset(RngStream::derive(env_seed, 0));
  EicmConfig eicm_config = config.eicm;
  eicm_config.obs_dim = obs[0].feature_dim(m);
  eicm_config.n_agents = n;
  eicm_config.n_actions = m;
  DqnConfig dqn_config = config.agent;
  dqn_config.input_dim = eicm_config.q;
  dqn_config.n_actions = m;

  std::vector<EicmState> eicms;
  std::vector<DqnAgent> dqns;
  eicms.reserve(n);
  dqns.reserve(n);
  for (AgentId k = 0; k < n; ++k) {
    RngStream init(RngStream::derive(seed, kEicmInitStream + k));
    eicms.emplace_back(eicm_config, init);
    dqns.emplace_back(dqn_config, RngStream::derive(seed, kDqnInitStream + k),
                      RngStream::derive(seed, kDqnActionStream + k));
  }

  CsvFile episodes_csv(seed_dir / "episodes.csv");
  episodes_csv.row(episode_header(n));
  std::unique_ptr<CsvFile> steps_csv;
  if (config.log_per_step) {
    steps_csv = std::make_unique<CsvFile>(seed_dir / "steps.csv");
    steps_csv->row(step_header(n));
  }

  RewardTrace trace(n);
  long global_step = 0;
  std::vector<const EicmState*> eicm_ptrs;
  for (const auto& e : eicms) eicm_ptrs.push_back(&e);

  for (int episode = 0; episode < config.episodes; ++episode) {
    obs = env->reset(RngStream::derive(env_seed, episode));
    trace.reset();
    for (auto& e : eicms) e.reset_context();

    VectorXd ep_extrinsic = VectorXd::Zero(n);
    VectorXd ep_intrinsic = VectorXd::Zero(n);
    VectorXd ep_mixed = VectorXd::Zero(n);
    MatrixXd ep_intentions = MatrixXd::Zero(n, n);
    double ep_fwd = 0, ep_inv = 0, ep_moa = 0;
    double epsilon_used = dqns[0].epsilon();
    int steps = 0;

    for (int step = 0; step < config.horizon; ++step) {
      epsilon_used = dqns[0].epsilon();
      JointAction joint(n);
      for (AgentId k = 0; k < n; ++k) {
        joint[k] = dqns[k].act(eicms[k].encode(obs[k]), dqns[k].epsilon());
      }
      Transition t = env->step(joint);

      const ShapeDiagnostics diag =
          shape_step(t, trace, eicm_ptrs, config.shaping, global_step,
                     config.eicm.warmup_steps);

      for (AgentId k = 0; k < n; ++k) {
        dqns[k].remember(
            ReplayEntry{t.obs[k], joint[k], diag.mixed[k], t.next_obs[k],
                        t.done});
      }

      double fwd = 0, inv = 0, moa = 0;
      const std::vector<Transition> batch = {t};
      for (AgentId k = 0; k < n; ++k) {
        const EicmTrainReport rep = eicms[k].train(batch, k);
        fwd += rep.forward_loss;
        inv += rep.inverse_loss;
        moa += rep.moa_loss;
      }
      fwd /= n;
      inv /= n;
      moa /= n;

      ++global_step;
      if (global_step % config.agent.learn_every == 0) {
        for (AgentId k = 0; k < n; ++k) {
          const EicmState& enc = eicms[k];
          dqns[k].learn_from_replay(
              [&enc](const Observation& o) { return enc.encode(o); });
        }
      }

      ep_extrinsic += diag.extrinsic;
      ep_intrinsic += diag.intrinsic;
      ep_mixed += diag.mixed;
      ep_intentions += diag.intentions;
      ep_fwd += fwd;
      ep_inv += inv;
      ep_moa += moa;
      ++steps;

      if (steps_csv) {
        std::vector<std::string> cells = {
            std::to_string(seed), std::to_string(episode),
            std::to_string(step),
            format_csv_double(diag.extrinsic.sum())};
        const auto block =
            agent_block(diag.extrinsic, diag.intrinsic, diag.mixed,
                        diag.intentions, fwd, inv, moa, epsilon_used);
        cells.insert(cells.end(), block.begin(), block.end());
        steps_csv->row(cells);
      }

      obs = t.next_obs;
      if (t.done) break;
    }

    result.episode_collective.push_back(ep_extrinsic.sum());
    std::vector<std::string> cells = {
        std::to_string(seed), std::to_string(episode), std::to_string(steps),
        format_csv_double(ep_extrinsic.sum())};
    const MatrixXd mean_intentions = ep_intentions / std::max(1, steps);
    const auto block = agent_block(
        ep_extrinsic, ep_intrinsic, ep_mixed, mean_intentions,
        ep_fwd / std::max(1, steps), ep_inv / std::max(1, steps),
        ep_moa / std::max(1, steps), epsilon_used);
    cells.insert(cells.end(), block.begin(), block.end());
    episodes_csv.row(cells);
  }

  // final checkpoint: all networks, optimizer moments and counters
  std::vector<approx::NamedTensor> tensors;
  for (AgentId k = 0; k < n; ++k) {
    const std::string prefix = "agent" + std::to_string(k);
    auto eicm_tensors = eicms[k].to_tensors(prefix + "/eicm");
    tensors.insert(tensors.end(), eicm_tensors.begin(), eicm_tensors.end());
    auto dqn_tensors = dqns[k].to_tensors(prefix + "/dqn");
    tensors.insert(tensors.end(), dqn_tensors.begin(), dqn_tensors.end());
  }
  approx::save_checkpoint(seed_dir / "checkpoint.bin", tensors);

  result.tail_mean_collective =
      tail_mean(result.episode_collective, kTailFraction);
  result.convergence_110 =
      convergence_episode(result.episode_collective, kTailFraction, 1.1);
  result.convergence_120 =
      convergence_episode(result.episode_collective, kTailFraction, 1.2);
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  ExperimentResult result;
  result.output_dir = resolve_output_dir(config);
  fs::create_directories(result.output_dir);

  // provenance: the config text goes into the output directory verbatim
  {
    std::ofstream echo(result.output_dir / "config.json", std::ios::binary);
    echo << config.source_text;
  }

  const int n_seeds = static_cast<int>(config.seeds.size());
  result.seeds.resize(n_seeds);

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n_seeds) return;
      const std::uint64_t seed = config.seeds[i];
      try {
        result.seeds[i] = run_seed(config, seed, result.output_dir);
      } catch (const std::exception& e) {
        result.seeds[i].seed = seed;
        result.seeds[i].failed = true;
        result.seeds[i].error = e.what();
      }
    }
  };

  const int jobs = std::max(1, std::min(config.workers, n_seeds));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<double> tails;
  for (const auto& s : result.seeds) {
    if (!s.failed) tails.push_back(s.tail_mean_collective);
  }
  result.completed = static_cast<int>(tails.size());
  if (!tails.empty()) {
    result.aggregate_mean =
        std::accumulate(tails.begin(), tails.end(), 0.0) / tails.size();
    double ss = 0.0;
    for (double v : tails) {
      ss += (v - result.aggregate_mean) * (v - result.aggregate_mean);
    }
    result.aggregate_std =
        tails.size() > 1 ? std::sqrt(ss / (tails.size() - 1)) : 0.0;
  }

  json summary;
  summary["version"] = 1;
  summary["csv_schema"] = kCsvSchemaVersion;
  summary["environment"] = config.env_name;
  summary["method"] = method_name(config.shaping.method);
  summary["episodes"] = config.episodes;
  summary["horizon"] = config.horizon;
  summary["n_agents"] = config.n_agents;
  summary["tail_fraction"] = kTailFraction;
  summary["seeds"] = json::array();
  for (const auto& s : result.seeds) {
    json row;
    row["seed"] = s.seed;
    row["failed"] = s.failed;
    if (s.failed) {
      row["error"] = s.error;
    } else {
      row["tail_mean_collective_reward"] = s.tail_mean_collective;
      row["convergence_episodes"] = {s.convergence_110, s.convergence_120};
    }
    summary["seeds"].push_back(row);
  }
  summary["aggregate"] = {{"mean", result.aggregate_mean},
                          {"std", result.aggregate_std},
                          {"count", result.completed}};
  std::ofstream out(result.output_dir / "summary.json");
  out << summary.dump(2) << "\n";
  return result;
}

}  // namespace marlab::harness
