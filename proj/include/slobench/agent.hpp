#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <ostream>
#include <span>
#include <string>

#include "slobench/dataset.hpp"
#include "slobench/environment.hpp"

namespace slobench {

// Common surface the harness drives. Agents receive the step records since
// their last decision (one for the RL agents, a batch of 32 for AIF) and emit
// the next configuration's action index. decide_eval must not mutate state.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string name() const = 0;
  virtual int decision_interval() const = 0;
  virtual int decide_train(std::span<const StepRecord> records) = 0;
  virtual int decide_eval(std::span<const StepRecord> records) const = 0;
  virtual void save(std::ostream& out) const = 0;
  virtual void load(std::istream& in) = 0;
  virtual std::uint64_t param_hash() const = 0;
};

struct AgentContext {
  FeatureStats stats;
  std::uint64_t seed = 0;
  long training_budget = 0;
};

inline const std::array<const char*, 4>& agent_names() {
  static const std::array<const char*, 4> names{"aif", "dqn", "a2c", "ppo"};
  return names;
}

}  // namespace slobench
