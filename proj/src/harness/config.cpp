#include "marlab/harness/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace marlab::harness {

namespace {

using nlohmann::json;

std::string dotted(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

// Typed, path-aware view over one JSON object.
class ObjView {
 public:
  ObjView(const json& j, std::string path) : j_(&j), path_(std::move(path)) {
    if (!j.is_object()) {
      throw ConfigError(path_ + ": expected an object");
    }
  }

  bool has(const std::string& key) const { return j_->contains(key); }

  const json& raw(const std::string& key) const { return (*j_)[key]; }

  ObjView child(const std::string& key) const {
    return ObjView((*j_)[key], dotted(path_, key));
  }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = (*j_)[key];
    if (!v.is_number()) {
      throw ConfigError(dotted(path_, key) + ": expected a number, got " +
                        v.dump());
    }
    return v.get<double>();
  }

  double number_in(const std::string& key, double fallback, double lo,
                   double hi, bool lo_open = false, bool hi_open = false) const {
    const double v = number(key, fallback);
    const bool below = lo_open ? v <= lo : v < lo;
    const bool above = hi_open ? v >= hi : v > hi;
    if (below || above) {
      std::ostringstream msg;
      msg << dotted(path_, key) << ": expected a number in "
          << (lo_open ? "(" : "[") << lo << ", " << hi
          << (hi_open ? ")" : "]") << ", got " << v;
      throw ConfigError(msg.str());
    }
    return v;
  }

  int integer(const std::string& key, int fallback, int min_value) const {
    if (!has(key)) return fallback;
    const json& v = (*j_)[key];
    if (!v.is_number_integer()) {
      throw ConfigError(dotted(path_, key) + ": expected an integer, got " +
                        v.dump());
    }
    const int value = v.get<int>();
    if (value < min_value) {
      throw ConfigError(dotted(path_, key) + ": expected >= " +
                        std::to_string(min_value) + ", got " +
                        std::to_string(value));
    }
    return value;
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = (*j_)[key];
    if (!v.is_boolean()) {
      throw ConfigError(dotted(path_, key) + ": expected a boolean, got " +
                        v.dump());
    }
    return v.get<bool>();
  }

  std::string str(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = (*j_)[key];
    if (!v.is_string()) {
      throw ConfigError(dotted(path_, key) + ": expected a string, got " +
                        v.dump());
    }
    return v.get<std::string>();
  }

  // Scalar-or-array per-agent vector.
  VectorXd per_agent(const std::string& key, double fallback,
                     int n_agents) const {
    if (!has(key)) return VectorXd::Constant(n_agents, fallback);
    const json& v = (*j_)[key];
    if (v.is_number()) return VectorXd::Constant(n_agents, v.get<double>());
    if (v.is_array()) {
      if (static_cast<int>(v.size()) != n_agents) {
        throw ConfigError(dotted(path_, key) + ": expected " +
                          std::to_string(n_agents) + " entries, got " +
                          std::to_string(v.size()));
      }
      VectorXd out(n_agents);
      for (int i = 0; i < n_agents; ++i) {
        if (!v[i].is_number()) {
          throw ConfigError(dotted(path_, key) + "[" + std::to_string(i) +
                            "]: expected a number");
        }
        out[i] = v[i].get<double>();
      }
      return out;
    }
    throw ConfigError(dotted(path_, key) +
                      ": expected a number or per-agent array");
  }

  std::vector<int> int_list(const std::string& key,
                            std::vector<int> fallback) const {
    if (!has(key)) return fallback;
    const json& v = (*j_)[key];
    if (!v.is_array() || v.empty()) {
      throw ConfigError(dotted(path_, key) + ": expected a non-empty array");
    }
    std::vector<int> out;
    for (const auto& e : v) {
      if (!e.is_number_integer() || e.get<int>() <= 0) {
        throw ConfigError(dotted(path_, key) +
                          ": expected positive integers");
      }
      out.push_back(e.get<int>());
    }
    return out;
  }

  // Rejects keys outside the allowed set.
  void finish(const std::set<std::string>& allowed) const {
    for (auto it = j_->begin(); it != j_->end(); ++it) {
      if (!allowed.count(it.key())) {
        throw ConfigError("unknown key: " + dotted(path_, it.key()));
      }
    }
  }

  const std::string& path() const { return path_; }

 private:
  const json* j_;
  std::string path_;
};

}  // namespace

int ExperimentConfig::env_n_actions() const {
  return env_name == "cleanup" ? CleanupEnv::kActions : HarvestEnv::kActions;
}

int ExperimentConfig::env_window() const {
  return env_name == "cleanup" ? cleanup.window : harvest.window;
}

std::string method_name(Method method) {
  switch (method) {
    case Method::baseline: return "baseline";
    case Method::ia: return "ia";
    case Method::kindmarl: return "kindmarl";
  }
  return "?";
}

Method method_from_name(const std::string& name,
                        const std::string& key_path) {
  if (name == "baseline") return Method::baseline;
  if (name == "ia") return Method::ia;
  if (name == "kindmarl") return Method::kindmarl;
  throw ConfigError(key_path +
                    ": expected one of baseline|ia|kindmarl, got " + name);
}

void apply_shaping_preset(ShapingParams& params, const std::string& name,
                          int n_agents) {
  double envy = 0.0, guilt = 0.0;
  if (name == "advantageous_guilt") {
    guilt = 0.05;
  } else if (name == "advantageous_envy") {
    envy = 0.05;
  } else if (name == "searched_ia") {
    envy = 0.6;
    guilt = -0.2;
  } else if (name == "searched_kindmarl") {
    guilt = -1.0;
  } else {
    throw ConfigError(
        "shaping.preset: expected one of advantageous_guilt|advantageous_envy|"
        "searched_ia|searched_kindmarl, got " +
        name);
  }
  params.envy_coeff = VectorXd::Constant(n_agents, envy);
  params.guilt_coeff = VectorXd::Constant(n_agents, guilt);
}

ExperimentConfig parse_config(const std::string& text,
                              const std::string& source_name) {
  json root_json;
  try {
    root_json = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source_name + ": " + e.what());
  }
  ObjView root(root_json, "");

  ExperimentConfig cfg;
  cfg.source_text = text;
  cfg.version = root.integer("version", 1, 1);
  if (cfg.version != 1) {
    throw ConfigError("version: only config version 1 is supported");
  }

  // environment: either a name or an object with a name and overrides
  if (!root.has("environment")) {
    throw ConfigError("environment: required key is missing");
  }
  json env_obj;
  if (root.raw("environment").is_string()) {
    env_obj = json{{"name", root.raw("environment").get<std::string>()}};
  } else {
    env_obj = root.raw("environment");
  }
  ObjView env(env_obj, "environment");
  cfg.env_name = env.str("name", "");
  if (cfg.env_name != "cleanup" && cfg.env_name != "harvest") {
    throw ConfigError("environment.name: expected cleanup|harvest, got '" +
                      cfg.env_name + "'");
  }

  cfg.horizon = root.integer("horizon", 500, 1);
  cfg.episodes = root.integer("episodes", 200, 1);
  cfg.n_agents =
      root.integer("n_agents", cfg.env_name == "cleanup" ? 5 : 4, 2);

  if (cfg.env_name == "cleanup") {
    CleanupConfig& c = cfg.cleanup;
    c.width = env.integer("width", 18, 3);
    c.height = env.integer("height", 9, 3);
    c.river_rows = env.integer("river_rows", 2, 1);
    if (c.river_rows >= c.height) {
      throw ConfigError("environment.river_rows: must leave orchard rows");
    }
    c.waste_spawn_prob = env.number_in("waste_spawn_prob", 0.05, 0.0, 1.0);
    c.apple_spawn_prob_max =
        env.number_in("apple_spawn_prob_max", 0.02, 0.0, 1.0);
    c.waste_threshold = env.number_in("waste_threshold", 0.4, 0.0, 1.0);
    c.initial_waste_fraction =
        env.number_in("initial_waste_fraction", 1.0, 0.0, 1.0);
    c.window = env.integer("window", 7, 3);
    c.n_agents = cfg.n_agents;
    c.horizon = cfg.horizon;
    if (c.window % 2 == 0) {
      throw ConfigError("environment.window: expected an odd width");
    }
    env.finish({"name", "width", "height", "river_rows", "waste_spawn_prob",
                "apple_spawn_prob_max", "waste_threshold",
                "initial_waste_fraction", "window"});
  } else {
    HarvestConfig& c = cfg.harvest;
    c.width = env.integer("width", 16, 3);
    c.height = env.integer("height", 9, 3);
    c.window = env.integer("window", 7, 3);
    if (c.window % 2 == 0) {
      throw ConfigError("environment.window: expected an odd width");
    }
    if (env.has("regrowth_prob")) {
      const json& r = env.raw("regrowth_prob");
      if (!r.is_array() || r.size() != 9) {
        throw ConfigError(
            "environment.regrowth_prob: expected 9 probabilities "
            "(neighbour counts 0..8)");
      }
      for (int i = 0; i < 9; ++i) {
        if (!r[i].is_number() || r[i].get<double>() < 0.0 ||
            r[i].get<double>() > 1.0) {
          throw ConfigError("environment.regrowth_prob[" + std::to_string(i) +
                            "]: expected a probability");
        }
        c.regrowth_prob[i] = r[i].get<double>();
      }
      if (c.regrowth_prob[0] != 0.0) {
        throw ConfigError(
            "environment.regrowth_prob[0]: must be 0 (depleted patches stay "
            "dead)");
      }
    }
    c.n_agents = cfg.n_agents;
    c.horizon = cfg.horizon;
    env.finish({"name", "width", "height", "window", "regrowth_prob"});
  }

  if (!root.has("method")) {
    throw ConfigError("method: required key is missing");
  }
  const Method method = method_from_name(root.str("method", ""), "method");

  // shaping
  ShapingParams& sp = cfg.shaping;
  sp.method = method;
  sp.envy_coeff = VectorXd::Zero(cfg.n_agents);
  sp.guilt_coeff = VectorXd::Constant(cfg.n_agents, 0.05);
  if (root.has("shaping")) {
    ObjView sh = root.child("shaping");
    if (sh.has("preset")) {
      apply_shaping_preset(sp, sh.str("preset", ""), cfg.n_agents);
    }
    sp.envy_coeff = sh.per_agent("envy_coeff", sp.envy_coeff[0], cfg.n_agents);
    sp.guilt_coeff =
        sh.per_agent("guilt_coeff", sp.guilt_coeff[0], cfg.n_agents);
    sp.trace_decay = sh.number_in("trace_decay", 0.95, 0.0, 1.0);
    sp.discount = sh.number_in("discount", 0.99, 0.0, 1.0, true, false);
    sp.extrinsic_weight = sh.number("extrinsic_weight", 1.0);
    sp.intrinsic_weight = sh.number("intrinsic_weight", 1.0);
    sh.finish({"preset", "envy_coeff", "guilt_coeff", "trace_decay",
               "discount", "extrinsic_weight", "intrinsic_weight"});
  }
  if (method == Method::baseline && sp.intrinsic_weight != 0.0) {
    cfg.warnings.push_back(
        "shaping.intrinsic_weight: forced to 0 because method=baseline");
    sp.intrinsic_weight = 0.0;
  }
  sp.validate();

  // eicm
  EicmConfig& ec = cfg.eicm;
  ec.n_agents = cfg.n_agents;
  ec.n_actions = cfg.env_n_actions();
  if (root.has("eicm")) {
    ObjView em = root.child("eicm");
    ec.q = em.integer("q", 32, 1);
    ec.encoder_hidden = em.int_list("encoder_hidden", {128, 128});
    ec.forward_hidden = em.integer("forward_hidden", 32, 1);
    ec.inverse_hidden = em.integer("inverse_hidden", 32, 1);
    ec.moa_hidden = em.int_list("moa_hidden", {32, 32});
    ec.context_dim = em.integer("context_dim", 128, 1);
    ec.forward_weight = em.number_in("forward_weight", 0.5, 0.0, 1e9);
    ec.inverse_weight = em.number_in("inverse_weight", 0.4, 0.0, 1e9);
    ec.moa_weight = em.number_in("moa_weight", 0.1, 0.0, 1e9);
    ec.warmup_steps = em.integer("warmup_steps", 1000, 0);
    ec.eq4_literal = em.boolean("eq4_literal", false);
    const std::string ref = em.str("impact_reference", "previous");
    if (ref == "previous") {
      ec.impact_reference = ImpactReference::previous;
    } else if (ref == "current") {
      ec.impact_reference = ImpactReference::current;
    } else {
      throw ConfigError(
          "eicm.impact_reference: expected previous|current, got " + ref);
    }
    ec.use_context = em.boolean("use_context", true);
    ec.optimizer.learning_rate =
        em.number_in("learning_rate", 1e-3, 0.0, 1.0, true, false);
    em.finish({"q", "encoder_hidden", "forward_hidden", "inverse_hidden",
               "moa_hidden", "context_dim", "forward_weight",
               "inverse_weight", "moa_weight", "warmup_steps", "eq4_literal",
               "impact_reference", "use_context", "learning_rate"});
  }

  // agent (DQN)
  DqnConfig& ac = cfg.agent;
  ac.n_actions = cfg.env_n_actions();
  ac.discount = sp.discount;
  if (root.has("agent")) {
    ObjView ag = root.child("agent");
    ac.hidden = ag.int_list("hidden", {32, 32});
    ac.buffer_capacity = static_cast<std::size_t>(
        ag.integer("buffer_capacity", 50000, 1));
    ac.batch_size = ag.integer("batch_size", 64, 1);
    ac.epsilon_start = ag.number_in("epsilon_start", 1.0, 0.0, 1.0);
    ac.epsilon_end = ag.number_in("epsilon_end", 0.05, 0.0, 1.0);
    if (ac.epsilon_end > ac.epsilon_start) {
      throw ConfigError("agent.epsilon_end: must not exceed epsilon_start");
    }
    ac.epsilon_decay_steps = ag.integer("epsilon_decay_steps", 20000, 1);
    ac.target_sync_interval = ag.integer("target_sync", 500, 1);
    ac.learn_every = ag.integer("learn_every", 4, 1);
    ac.optimizer.learning_rate =
        ag.number_in("learning_rate", 1e-3, 0.0, 1.0, true, false);
    ag.finish({"hidden", "buffer_capacity", "batch_size", "epsilon_start",
               "epsilon_end", "epsilon_decay_steps", "target_sync",
               "learn_every", "learning_rate"});
  }

  // seeds
  if (!root.has("seeds")) {
    throw ConfigError("seeds: required key is missing");
  }
  const json& seeds = root.raw("seeds");
  if (!seeds.is_array() || seeds.empty()) {
    throw ConfigError("seeds: expected a non-empty array");
  }
  for (const auto& s : seeds) {
    if (!s.is_number_integer() || s.get<long long>() < 0) {
      throw ConfigError("seeds: expected non-negative integers");
    }
    cfg.seeds.push_back(s.get<std::uint64_t>());
  }

  cfg.output_dir = root.str("output_dir", "runs/out");
  cfg.log_per_step = root.boolean("log_per_step", false);
  cfg.workers = root.integer("workers", 1, 1);

  root.finish({"version", "environment", "method", "n_agents", "horizon",
               "episodes", "shaping", "eicm", "agent", "seeds", "output_dir",
               "log_per_step", "workers"});
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(path.string() + ": cannot open config file");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

}  // namespace marlab::harness
