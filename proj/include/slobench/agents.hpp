#pragma once

#include <sstream>

#include "slobench/a2c_agent.hpp"
#include "slobench/agent.hpp"
#include "slobench/aif_agent.hpp"
#include "slobench/dqn_agent.hpp"
#include "slobench/ppo_agent.hpp"

namespace slobench {

// Harness adapter for the active-inference core: consumes batches of 32 raw
// records, discretizes them, and runs the observe cycle. Evaluation decisions
// come from the frozen belief tensors.
class AifAgent : public Agent {
 public:
  explicit AifAgent(AifOptions opt = {}) : core_(opt) {}

  std::string name() const override { return "aif"; }
  int decision_interval() const override { return core_.options().batch_size; }

  int decide_train(std::span<const StepRecord> records) override {
    std::vector<DiscretizedObservation> batch;
    batch.reserve(records.size());
    for (const auto& rec : records)
      batch.push_back(discretize(rec.sample, rec.breakdown, rec.action_index));
    return core_.observe_batch(batch);
  }

  int decide_eval(std::span<const StepRecord>) const override { return core_.select_action(); }

  void save(std::ostream& out) const override { core_.save(out); }
  void load(std::istream& in) override { core_.load(in); }

  std::uint64_t param_hash() const override {
    std::ostringstream ss;
    core_.save(ss);
    const std::string bytes = ss.str();
    return fnv1a(bytes.data(), bytes.size());
  }

  AifAgentCore& core() { return core_; }
  const AifAgentCore& core() const { return core_; }

 private:
  AifAgentCore core_;
};

inline std::unique_ptr<Agent> make_agent(std::string_view kind, const AgentContext& ctx) {
  if (kind == "aif") return std::make_unique<AifAgent>();
  if (kind == "dqn")
    return std::make_unique<DqnAgent>(ctx.stats, ctx.seed, ctx.training_budget);
  if (kind == "a2c") return std::make_unique<A2cAgent>(ctx.stats, ctx.seed);
  if (kind == "ppo") return std::make_unique<PpoAgent>(ctx.stats, ctx.seed);
  throw config_error("unknown agent: " + std::string(kind));
}

}  // namespace slobench
