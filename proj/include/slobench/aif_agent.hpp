#pragma once

#include <algorithm>
#include <array>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "slobench/actions.hpp"
#include "slobench/bayes_net.hpp"
#include "slobench/discretize.hpp"
#include "slobench/environment.hpp"
#include "slobench/errors.hpp"
#include "slobench/io_util.hpp"

namespace slobench {

// Fills unknown cells of a 6x3x6 grid (flattened in action-index order) by
// successive one-dimensional linear interpolation along the fps, resolution,
// and streams axes. Positions outside the known range of a line clamp to the
// nearest known value; lines with no known values are left for later axes.
inline std::array<double, kNumActions> interpolate_grid(const std::array<double, kNumActions>& values,
                                                        const std::array<bool, kNumActions>& known) {
  std::array<double, kNumActions> vals = values;
  std::array<bool, kNumActions> have = known;

  const int dims[3] = {static_cast<int>(kStreamChoices.size()),
                       static_cast<int>(kResolutionChoices.size()),
                       static_cast<int>(kFpsChoices.size())};
  auto flat = [](int s, int r, int f) { return action_index_from_axes(s, r, f); };

  for (int axis = 2; axis >= 0; --axis) {
    const int n = dims[axis];
    const int on = dims[(axis + 1) % 3];
    const int om = dims[(axis + 2) % 3];
    std::array<double, kNumActions> next_vals = vals;
    std::array<bool, kNumActions> next_have = have;
    for (int a = 0; a < on; ++a) {
      for (int b = 0; b < om; ++b) {
        auto at = [&](int i) {
          int coord[3];
          coord[axis] = i;
          coord[(axis + 1) % 3] = a;
          coord[(axis + 2) % 3] = b;
          return flat(coord[0], coord[1], coord[2]);
        };
        std::vector<int> anchors;
        for (int i = 0; i < n; ++i)
          if (have[at(i)]) anchors.push_back(i);
        if (anchors.empty()) continue;
        for (int i = 0; i < n; ++i) {
          const int idx = at(i);
          if (have[idx]) continue;
          auto hi = std::lower_bound(anchors.begin(), anchors.end(), i);
          double v;
          if (hi == anchors.begin()) {
            v = vals[at(*hi)];  // clamp below the known range
          } else if (hi == anchors.end()) {
            v = vals[at(anchors.back())];  // clamp above
          } else {
            const int i1 = *hi;
            const int i0 = *(hi - 1);
            const double t = static_cast<double>(i - i0) / (i1 - i0);
            v = vals[at(i0)] * (1.0 - t) + vals[at(i1)] * t;
          }
          next_vals[idx] = v;
          next_have[idx] = true;
        }
      }
    }
    vals = next_vals;
    have = next_have;
  }
  return vals;
}

struct AifOptions {
  double surprise_threshold_factor = 2.0;  // h
  double past_weight = 0.6;
  double initial_additional_surprise = 1.0;
  int max_indegree = 8;
  double hill_climb_epsilon = 1.0;
  int batch_size = 32;
  double noncorner_boost = 0.25;
  std::size_t surprise_history = 10;
  std::optional<std::size_t> observation_cap;  // ring buffer when set
  bool binary_baseline = false;  // score actions by joint full-compliance probability
};

// Active-inference configuration selector. Learns a discrete Bayesian-network
// generative model of the discretized observations, keeps per-configuration
// tensors of expected QoE compliance (pragmatic value), expected QoS
// compliance (risk assigned), and a decaying exploration bonus (information
// gain), and picks the configuration maximizing their sum. Model relearning
// is gated on batch surprise against the recent median.
class AifAgentCore {
 public:
  explicit AifAgentCore(AifOptions opt = {}) : opt_(opt) {
    for (int i = 0; i < kNumActions; ++i) info_gain_[i] = boost(i);
  }

  const AifOptions& options() const { return opt_; }

  // One full cycle on a batch of discretized observations collected under a
  // single configuration. Returns the next configuration's action index.
  int observe_batch(std::span<const DiscretizedObservation> batch) {
    require(static_cast<int>(batch.size()) == opt_.batch_size,
            "observe requires a batch of exactly " + std::to_string(opt_.batch_size));
    const int cell = batch.front().action;
    for (const auto& o : batch)
      require(o.action == batch.front().action, "batch spans multiple configurations");

    const double current = surprise(batch, model_, opt_.initial_additional_surprise);
    last_surprise_ = current;
    bool relearn_params = false;
    last_structure_relearned_ = false;
    if (history_.empty()) {
      relearn_params = true;
      last_structure_relearned_ = true;
    } else {
      const double med = history_median();
      last_median_ = med;
      if (current > med) relearn_params = true;
      if (current > med * opt_.surprise_threshold_factor) last_structure_relearned_ = true;
    }

    for (const auto& o : batch) {
      if (opt_.observation_cap && memory_.size() >= *opt_.observation_cap)
        memory_.erase(memory_.begin());
      memory_.push_back(o);
    }

    if (last_structure_relearned_) {
      StructureOptions sopt;
      sopt.max_indegree = opt_.max_indegree;
      sopt.epsilon = opt_.hill_climb_epsilon;
      const Dag dag = learn_structure(memory_, sopt);
      // A structure change invalidates the old tables; refit from memory.
      model_ = GenerativeModel::fit(dag, memory_);
      ++structure_relearns_;
      ++parameter_relearns_;
    } else if (relearn_params) {
      model_ = model_.blend_with(batch, opt_.past_weight);
      ++parameter_relearns_;
    }

    pragmatic_[cell] = expected_compliance(cell, Group::qoe);
    risk_[cell] = expected_compliance(cell, Group::qos);
    visits_[cell] += 1;
    visited_[cell] = true;
    info_gain_[cell] = boost(cell) / (1.0 + visits_[cell]);

    history_.push_back(current);
    if (history_.size() > opt_.surprise_history) history_.pop_front();

    return select_action();
  }

  enum class Group { qoe, qos };

  // Expected compliance of an SLO group under the model for one action:
  // the per-variable bin distribution collapsed through the bin
  // representative values, averaged over the group.
  double expected_compliance(int action, Group which) const {
    if (!model_.fitted()) return 0.5;
    static constexpr std::array<int, 2> kQoe{kNodeSf, kNodeRs};
    static constexpr std::array<int, 3> kQos{kNodeLat, kNodeTp, kNodeTs};
    std::span<const int> group =
        which == Group::qoe ? std::span<const int>(kQoe) : std::span<const int>(kQos);
    if (opt_.binary_baseline) return model_.joint_top_bin_given_action(group, action);
    double total = 0.0;
    for (int node : group) {
      const auto dist = model_.conditional_given_action(node, action);
      double e = 0.0;
      for (int k = 0; k < 6; ++k) e += approx_compliance(k) * dist[k];
      total += e;
    }
    return total / static_cast<double>(group.size());
  }

  // Deterministic argmax of pragmatic value + risk assigned + information
  // gain, with unvisited cells interpolated from visited neighbors and ties
  // broken by the lowest action index.
  int select_action() const {
    const auto pv = interpolate_grid(pragmatic_, visited_);
    const auto ra = interpolate_grid(risk_, visited_);
    int best = 0;
    double best_score = -1.0;
    for (int i = 0; i < kNumActions; ++i) {
      const double score = pv[i] + ra[i] + info_gain_[i];
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    return best;
  }

  const GenerativeModel& model() const { return model_; }
  const std::array<double, kNumActions>& pragmatic_values() const { return pragmatic_; }
  const std::array<double, kNumActions>& risk_values() const { return risk_; }
  const std::array<double, kNumActions>& info_gain_values() const { return info_gain_; }
  const std::array<int, kNumActions>& visit_counts() const { return visits_; }
  std::size_t memory_size() const { return memory_.size(); }

  long structure_relearn_count() const { return structure_relearns_; }
  long parameter_relearn_count() const { return parameter_relearns_; }
  bool last_structure_relearned() const { return last_structure_relearned_; }
  double last_surprise() const { return last_surprise_; }
  double last_median() const { return last_median_; }

  void save(std::ostream& out) const {
    put_str(out, "SLOAIF01");
    model_.save(out);
    for (double v : pragmatic_) put_f64(out, v);
    for (double v : risk_) put_f64(out, v);
    for (double v : info_gain_) put_f64(out, v);
    for (int v : visits_) put_u64(out, static_cast<std::uint64_t>(v));
    for (bool v : visited_) put_u64(out, v ? 1 : 0);
    put_u64(out, history_.size());
    for (double v : history_) put_f64(out, v);
  }

  void load(std::istream& in) {
    if (get_str(in) != "SLOAIF01") throw io_error("not an AIF checkpoint");
    model_.load(in);
    for (double& v : pragmatic_) v = get_f64(in);
    for (double& v : risk_) v = get_f64(in);
    for (double& v : info_gain_) v = get_f64(in);
    for (int& v : visits_) v = static_cast<int>(get_u64(in));
    for (int i = 0; i < kNumActions; ++i) visited_[i] = get_u64(in) != 0;
    history_.clear();
    const std::size_t n = get_u64(in);
    for (std::size_t i = 0; i < n; ++i) history_.push_back(get_f64(in));
    memory_.clear();
    structure_relearns_ = 0;
    parameter_relearns_ = 0;
  }

 private:
  double boost(int action) const {
    return is_corner(action_config(action)) ? opt_.initial_additional_surprise
                                            : opt_.noncorner_boost;
  }

  double history_median() const {
    std::vector<double> sorted(history_.begin(), history_.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    if (n % 2 == 1) return sorted[n / 2];
    return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  }

  AifOptions opt_;
  GenerativeModel model_;
  std::vector<DiscretizedObservation> memory_;
  std::deque<double> history_;
  std::array<double, kNumActions> pragmatic_{};
  std::array<double, kNumActions> risk_{};
  std::array<double, kNumActions> info_gain_{};
  std::array<int, kNumActions> visits_{};
  std::array<bool, kNumActions> visited_{};
  long structure_relearns_ = 0;
  long parameter_relearns_ = 0;
  bool last_structure_relearned_ = false;
  double last_surprise_ = 0.0;
  double last_median_ = 0.0;
};

}  // namespace slobench
