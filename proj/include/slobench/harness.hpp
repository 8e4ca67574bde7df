#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include "slobench/agents.hpp"
#include "slobench/environment.hpp"
#include "slobench/runlog.hpp"

namespace slobench {

inline constexpr int kEvalSequences = 8;
inline constexpr int kEvalSequenceSteps = 640;
inline constexpr std::uint64_t kOracleSeed = 0x0b5e55ed07aceULL;

struct OracleResult {
  int action = 0;
  double value = -1.0;
  double stddev = 0.0;
  long samples = 0;
};

// Brute force over the whole configuration grid: the mean overall compliance
// of the best single configuration under the scenario's data source and
// transformations. Dataset mode sweeps every record; synthetic mode draws a
// fixed-seed sample per configuration.
inline OracleResult oracle_best(const ScenarioSpec& spec, const Dataset* dataset = nullptr,
                                int synth_samples = 10'000) {
  spec.validate();
  if (spec.mode == DataMode::dataset)
    require(dataset != nullptr, "oracle over a dataset scenario needs the dataset");

  OracleResult best;
  for (int a = 0; a < kNumActions; ++a) {
    double sum = 0.0, sum_sq = 0.0;
    long n = 0;
    auto accumulate = [&](const MetricsSample& m) {
      const double r = compliance(m, spec.slos).s_overall;
      sum += r;
      sum_sq += r * r;
      ++n;
    };
    if (spec.mode == DataMode::dataset) {
      ThermalModel thermal(spec.thermal_cooling_k.value_or(0.03));
      for (MetricsSample m : dataset->records_for(a)) {
        if (spec.bandwidth_cap_bps) m = Dataset::apply_bandwidth_cap(m, *spec.bandwidth_cap_bps);
        if (spec.thermal_cooling_k) m.thermal = thermal.step(m.throughput_bps);
        accumulate(m);
      }
    } else {
      Environment env(spec, derive_seed(kOracleSeed, "oracle", static_cast<std::uint64_t>(a)));
      for (const MetricsSample& m : env.sample_batch(a, synth_samples)) accumulate(m);
    }
    const double mean = sum / static_cast<double>(n);
    if (mean > best.value) {
      const double var = std::max(0.0, sum_sq / static_cast<double>(n) - mean * mean);
      best = {a, mean, std::sqrt(var), n};
    }
  }
  return best;
}

// Frozen-policy evaluation: eight sequences of 640 steps, each starting from
// a distinct corner configuration, with independent noise streams seeded from
// (run seed, sequence index). Rewards aggregate into batches of 32.
inline EvalBlock evaluate(const Agent& agent, const ScenarioSpec& spec,
                          const Dataset* dataset, std::uint64_t run_seed) {
  EvalBlock block;
  block.raw.resize(kEvalSequences);
  const auto& corners = corner_action_indices();
  for (int j = 0; j < kEvalSequences; ++j) {
    Environment env(spec, derive_seed(run_seed, "eval-seq", static_cast<std::uint64_t>(j)),
                    dataset);
    env.set_config(corners[j]);
    std::vector<StepRecord> window;
    window.reserve(agent.decision_interval());
    auto& rewards = block.raw[j];
    rewards.reserve(kEvalSequenceSteps);
    for (int t = 0; t < kEvalSequenceSteps; ++t) {
      StepRecord rec = env.step();
      rewards.push_back(rec.reward);
      window.push_back(std::move(rec));
      if (static_cast<int>(window.size()) == agent.decision_interval()) {
        env.set_config(agent.decide_eval(window));
        window.clear();
      }
    }
  }
  block.stats = aggregate(block.raw, kBatchSize);
  return block;
}

// Runs one training budget: the agent reconfigures the environment at its
// decision interval, evaluation snapshots fire every `cadence` steps, and
// resources are sampled once per 32-step batch.
inline RunLog train(Agent& agent, const ScenarioSpec& spec, const Dataset* dataset,
                    std::uint64_t seed) {
  spec.validate();
  require(spec.budget % agent.decision_interval() == 0,
          "budget must be divisible by the agent's decision interval");
  const OracleResult oracle = oracle_best(spec, dataset);

  Environment env(spec, seed, dataset);
  env.set_config(0);

  RunLog log;
  log.meta.scenario = spec.name;
  log.meta.agent = agent.name();
  log.meta.seed = seed;
  log.meta.budget = spec.budget;
  log.meta.cadence = spec.cadence;
  log.meta.mode = spec.mode == DataMode::synthetic ? "synthetic" : spec.dataset_path;
  log.meta.noise_sigma = spec.noise_sigma;
  log.meta.oracle_action = oracle.action;
  log.meta.oracle_value = oracle.value;
  log.meta.oracle_stddev = oracle.stddev;
  log.meta.oracle_samples = oracle.samples;
  log.train_rewards.reserve(spec.budget);

  ResourceMeter meter;
  std::vector<StepRecord> window;
  window.reserve(agent.decision_interval());
  for (long step = 1; step <= spec.budget; ++step) {
    StepRecord rec = env.step();
    log.train_rewards.push_back(rec.reward);
    window.push_back(std::move(rec));
    if (static_cast<int>(window.size()) == agent.decision_interval()) {
      env.set_config(agent.decide_train(window));
      window.clear();
    }
    if (step % kBatchSize == 0) log.resources.push_back(meter.sample());
    if (step % spec.cadence == 0) log.append_eval(evaluate(agent, spec, dataset, seed));
  }
  return log;
}

inline std::string serialize_agent(const Agent& agent) {
  std::ostringstream ss;
  agent.save(ss);
  return ss.str();
}

struct RunRequest {
  ScenarioSpec scenario;
  std::string agent_kind;
  std::uint64_t seed = 1;
  fs::path out_dir;         // empty: keep the run in memory only
  fs::path pretrained_dir;  // base-run directory for dependent scenarios
};

// Builds the agent (loading the base checkpoint when the scenario continues
// from one), trains, and persists the run directory with its checkpoint.
inline RunLog run_one(const RunRequest& req) {
  req.scenario.validate();
  std::optional<Dataset> dataset_store;
  const Dataset* dataset = nullptr;
  if (req.scenario.mode == DataMode::dataset) {
    dataset_store = Dataset::load(req.scenario.dataset_path);
    dataset = &*dataset_store;
  }

  Environment probe(req.scenario, req.seed, dataset);
  AgentContext ctx{probe.stats(), req.seed, req.scenario.budget};
  auto agent = make_agent(req.agent_kind, ctx);

  std::string parent_hash;
  if (req.scenario.requires_pretrained) {
    if (req.pretrained_dir.empty())
      throw config_error("scenario '" + req.scenario.name +
                         "' continues from a basic-scenario checkpoint; pass --pretrained");
    const fs::path ckpt = req.pretrained_dir / "checkpoint.bin";
    if (!fs::exists(ckpt))
      throw config_error("missing checkpoint: " + ckpt.string());
    RunLog parent = RunLog::load(req.pretrained_dir);
    if (parent.meta.agent != req.agent_kind)
      throw config_error("pretrained run is for agent '" + parent.meta.agent + "', requested '" +
                         req.agent_kind + "'");
    if (parent.meta.scenario != "basic")
      throw config_error("pretrained run must come from the basic scenario, got '" +
                         parent.meta.scenario + "'");
    parent_hash = hash_hex(hash_file(ckpt));
    if (parent.meta.checkpoint_hash != parent_hash)
      throw config_error("checkpoint bytes do not match their recorded hash in " +
                         req.pretrained_dir.string());
    std::ifstream in(ckpt, std::ios::binary);
    if (!in) throw io_error("cannot open " + ckpt.string());
    agent->load(in);
  }

  RunLog log = train(*agent, req.scenario, dataset, req.seed);
  log.meta.parent_checkpoint_hash = parent_hash;

  const std::string checkpoint_bytes = serialize_agent(*agent);
  log.meta.checkpoint_hash =
      hash_hex(fnv1a(checkpoint_bytes.data(), checkpoint_bytes.size()));
  if (!req.out_dir.empty()) {
    fs::create_directories(req.out_dir);
    write_file(req.out_dir / "checkpoint.bin", checkpoint_bytes);
    log.save(req.out_dir);
  }
  return log;
}

// Deterministic per-run seed within a multi-run plan.
inline std::uint64_t plan_seed(std::uint64_t base, const std::string& scenario,
                               const std::string& agent) {
  return derive_seed(derive_seed(base, scenario), agent);
}

struct PlanEntry {
  std::string scenario;
  std::string agent;
};

// Execution stages honoring the pre-training dependency: the basic scenario
// first, then everything that continues from its checkpoints.
inline std::vector<std::vector<PlanEntry>> plan_stages(const std::vector<std::string>& scenarios,
                                                       const std::vector<std::string>& agents) {
  std::vector<PlanEntry> base, dependent;
  bool needs_base = false;
  for (const auto& s : scenarios) {
    const ScenarioSpec spec = scenario_preset(s);
    for (const auto& a : agents) {
      if (spec.requires_pretrained) {
        dependent.push_back({s, a});
        needs_base = true;
      } else {
        base.push_back({s, a});
      }
    }
  }
  if (needs_base && base.empty())
    throw config_error("plan contains dependent scenarios but not the basic scenario");
  std::vector<std::vector<PlanEntry>> stages;
  if (!base.empty()) stages.push_back(std::move(base));
  if (!dependent.empty()) stages.push_back(std::move(dependent));
  return stages;
}

}  // namespace slobench
