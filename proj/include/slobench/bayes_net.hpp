#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <span>
#include <vector>

#include "slobench/discretize.hpp"
#include "slobench/errors.hpp"
#include "slobench/io_util.hpp"

namespace slobench {

// Variables of the generative model, in fixed order. The action node is a
// decision variable: it may parent any other node but never takes parents
// itself, so conditioning on it coincides with setting it.
inline constexpr int kBnNodes = 8;
inline constexpr int kBnAction = 0;
inline constexpr std::array<int, kBnNodes> kBnCard{108, 5, 5, 6, 6, 6, 6, 6};
inline constexpr std::array<const char*, kBnNodes> kBnNames{"action", "cpu", "mem", "rs",
                                                            "sf",     "lat", "tp",  "ts"};
enum BnNode : int {
  kNodeAction = 0,
  kNodeCpu = 1,
  kNodeMem = 2,
  kNodeRs = 3,
  kNodeSf = 4,
  kNodeLat = 5,
  kNodeTp = 6,
  kNodeTs = 7,
};

inline int bn_value(const DiscretizedObservation& o, int node) {
  switch (node) {
    case kNodeAction: return o.action;
    case kNodeCpu: return o.cpu_bin - 1;
    case kNodeMem: return o.mem_bin - 1;
    case kNodeRs: return o.rs_bin;
    case kNodeSf: return o.sf_bin;
    case kNodeLat: return o.lat_bin;
    case kNodeTp: return o.tp_bin;
    case kNodeTs: return o.ts_bin;
    default: throw std::domain_error("bad node index");
  }
}

// Parent sets as bitmasks over the eight nodes.
struct Dag {
  std::array<std::uint16_t, kBnNodes> parents{};

  bool operator==(const Dag&) const = default;

  bool has_edge(int from, int to) const { return (parents[to] >> from) & 1; }
  int indegree(int node) const { return std::popcount(parents[node]); }

  std::vector<int> children_of(int node) const {
    std::vector<int> out;
    for (int v = 0; v < kBnNodes; ++v)
      if (has_edge(node, v)) out.push_back(v);
    return out;
  }

  // true if `to` can reach `from` along directed edges (adding from->to would
  // close a cycle).
  bool reaches(int src, int dst) const {
    std::uint16_t seen = 1u << src;
    std::vector<int> stack{src};
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      if (x == dst) return true;
      for (int v = 0; v < kBnNodes; ++v) {
        if (has_edge(x, v) && !((seen >> v) & 1)) {
          seen |= 1u << v;
          stack.push_back(v);
        }
      }
    }
    return false;
  }

  bool acyclic() const {
    std::array<int, kBnNodes> indeg{};
    for (int v = 0; v < kBnNodes; ++v) indeg[v] = indegree(v);
    std::array<bool, kBnNodes> done{};
    for (int pass = 0; pass < kBnNodes; ++pass) {
      int pick = -1;
      for (int v = 0; v < kBnNodes; ++v) {
        if (!done[v] && indeg[v] == 0) {
          pick = v;
          break;
        }
      }
      if (pick < 0) return false;
      done[pick] = true;
      for (int v = 0; v < kBnNodes; ++v)
        if (!done[v] && has_edge(pick, v)) --indeg[v];
    }
    return true;
  }

  std::vector<int> topological_order() const {
    std::array<int, kBnNodes> indeg{};
    for (int v = 0; v < kBnNodes; ++v) indeg[v] = indegree(v);
    std::vector<int> order;
    std::array<bool, kBnNodes> done{};
    while (order.size() < kBnNodes) {
      int pick = -1;
      for (int v = 0; v < kBnNodes; ++v) {
        if (!done[v] && indeg[v] == 0) {
          pick = v;
          break;
        }
      }
      require(pick >= 0, "graph is not acyclic");
      done[pick] = true;
      order.push_back(pick);
      for (int v = 0; v < kBnNodes; ++v)
        if (!done[v] && has_edge(pick, v)) --indeg[v];
    }
    return order;
  }

  std::uint16_t ancestors_of(int node) const {
    std::uint16_t anc = 0;
    std::vector<int> stack{node};
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      for (int p = 0; p < kBnNodes; ++p) {
        if (has_edge(p, x) && !((anc >> p) & 1)) {
          anc |= 1u << p;
          stack.push_back(p);
        }
      }
    }
    return anc;
  }

  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (int v = 0; v < kBnNodes; ++v)
      for (int p = 0; p < kBnNodes; ++p)
        if (has_edge(p, v)) out.emplace_back(p, v);
    return out;
  }
};

namespace detail {

// Mixed-radix index of a node's parent assignment.
inline long parent_config_index(const Dag& dag, int node, const DiscretizedObservation& o) {
  long idx = 0;
  for (int p = 0; p < kBnNodes; ++p) {
    if (dag.has_edge(p, node)) idx = idx * kBnCard[p] + bn_value(o, p);
  }
  return idx;
}

inline long parent_config_count(std::uint16_t parent_mask) {
  long q = 1;
  for (int p = 0; p < kBnNodes; ++p)
    if ((parent_mask >> p) & 1) q *= kBnCard[p];
  return q;
}

}  // namespace detail

// Largest admissible parent-configuration table. Scores of larger families
// are never competitive at the data sizes this model sees, so they are
// rejected outright instead of allocated.
inline constexpr long kMaxParentConfigs = 100'000;

struct StructureOptions {
  int max_indegree = 8;
  double epsilon = 1.0;  // stop when the best score gain falls below this
};

// Conditional probability tables over a fixed DAG, fit by Laplace-smoothed
// frequency counts.
class GenerativeModel {
 public:
  GenerativeModel() = default;

  static GenerativeModel fit(const Dag& dag, std::span<const DiscretizedObservation> data) {
    require(!data.empty(), "cannot fit a model from no data");
    GenerativeModel m;
    m.dag_ = dag;
    m.fitted_ = true;
    for (int v = 0; v < kBnNodes; ++v) {
      const long q = detail::parent_config_count(dag.parents[v]);
      require(q <= kMaxParentConfigs, "parent configuration table too large");
      const int r = kBnCard[v];
      std::vector<double> counts(static_cast<std::size_t>(q) * r, 0.0);
      for (const auto& o : data)
        counts[detail::parent_config_index(dag, v, o) * r + bn_value(o, v)] += 1.0;
      auto& probs = m.tables_[v];
      probs.assign(counts.size(), 0.0);
      for (long j = 0; j < q; ++j) {
        double total = 0.0;
        for (int k = 0; k < r; ++k) total += counts[j * r + k];
        for (int k = 0; k < r; ++k) probs[j * r + k] = (counts[j * r + k] + 1.0) / (total + r);
      }
    }
    return m;
  }

  // Row-wise blend of this model with a fresh fit on new data:
  // past_weight * old + (1 - past_weight) * new, renormalized.
  GenerativeModel blend_with(std::span<const DiscretizedObservation> new_data,
                             double past_weight) const {
    require(fitted_, "cannot blend an unfitted model");
    GenerativeModel fresh = fit(dag_, new_data);
    if (past_weight <= 0.0) return fresh;
    GenerativeModel out;
    out.dag_ = dag_;
    out.fitted_ = true;
    for (int v = 0; v < kBnNodes; ++v) {
      const int r = kBnCard[v];
      const auto& a = tables_[v];
      const auto& b = fresh.tables_[v];
      auto& probs = out.tables_[v];
      probs.resize(a.size());
      for (std::size_t j = 0; j < a.size() / r; ++j) {
        double total = 0.0;
        for (int k = 0; k < r; ++k) {
          probs[j * r + k] = past_weight * a[j * r + k] + (1.0 - past_weight) * b[j * r + k];
          total += probs[j * r + k];
        }
        for (int k = 0; k < r; ++k) probs[j * r + k] /= total;
      }
    }
    return out;
  }

  bool fitted() const { return fitted_; }
  const Dag& dag() const { return dag_; }
  const std::vector<double>& table(int node) const { return tables_[node]; }

  double prob(int node, const DiscretizedObservation& o) const {
    const int r = kBnCard[node];
    return tables_[node][detail::parent_config_index(dag_, node, o) * r + bn_value(o, node)];
  }

  double log_prob(const DiscretizedObservation& o) const {
    require(fitted_, "model not fitted");
    double lp = 0.0;
    for (int v = 0; v < kBnNodes; ++v) lp += std::log(prob(v, o));
    return lp;
  }

  // P(target = k | action = a) by enumerating the target's ancestor set with
  // the action clamped.
  std::array<double, 6> conditional_given_action(int target, int action) const {
    require(fitted_, "model not fitted");
    require(target != kBnAction, "target must be a metric or SLO node");
    const int r = kBnCard[target];
    std::uint16_t relevant = dag_.ancestors_of(target) | static_cast<std::uint16_t>(1u << target);

    std::vector<int> enum_nodes;  // in topological order, action excluded
    for (int v : dag_.topological_order())
      if (((relevant >> v) & 1) && v != kBnAction) enum_nodes.push_back(v);

    DiscretizedObservation assign{};
    assign.action = static_cast<std::uint8_t>(action);
    std::array<double, 6> dist{};
    enumerate(enum_nodes, 0, 1.0, assign, target, dist);

    double total = 0.0;
    for (int k = 0; k < r; ++k) total += dist[k];
    require(total > 0.0, "degenerate conditional distribution");
    for (int k = 0; k < r; ++k) dist[k] /= total;
    return dist;
  }

  // P(all of `targets` land in their top bin | action = a); the joint
  // full-compliance probability used by the binary-baseline mode.
  double joint_top_bin_given_action(std::span<const int> targets, int action) const {
    require(fitted_, "model not fitted");
    std::uint16_t relevant = 0;
    for (int t : targets) relevant |= dag_.ancestors_of(t) | static_cast<std::uint16_t>(1u << t);
    std::vector<int> enum_nodes;
    for (int v : dag_.topological_order())
      if (((relevant >> v) & 1) && v != kBnAction) enum_nodes.push_back(v);

    DiscretizedObservation assign{};
    assign.action = static_cast<std::uint8_t>(action);
    double hit = 0.0, total = 0.0;
    enumerate_joint(enum_nodes, 0, 1.0, assign, targets, hit, total);
    require(total > 0.0, "degenerate joint distribution");
    return hit / total;
  }

  void save(std::ostream& out) const {
    put_u64(out, fitted_ ? 1 : 0);
    for (int v = 0; v < kBnNodes; ++v) put_u64(out, dag_.parents[v]);
    if (!fitted_) return;
    for (int v = 0; v < kBnNodes; ++v) {
      put_u64(out, tables_[v].size());
      for (double p : tables_[v]) put_f64(out, p);
    }
  }

  void load(std::istream& in) {
    fitted_ = get_u64(in) != 0;
    for (int v = 0; v < kBnNodes; ++v)
      dag_.parents[v] = static_cast<std::uint16_t>(get_u64(in));
    if (!fitted_) {
      for (auto& t : tables_) t.clear();
      return;
    }
    for (int v = 0; v < kBnNodes; ++v) {
      tables_[v].resize(get_u64(in));
      for (auto& p : tables_[v]) p = get_f64(in);
    }
  }

 private:
  void set_value(DiscretizedObservation& o, int node, int value) const {
    switch (node) {
      case kNodeAction: o.action = static_cast<std::uint8_t>(value); break;
      case kNodeCpu: o.cpu_bin = static_cast<std::uint8_t>(value + 1); break;
      case kNodeMem: o.mem_bin = static_cast<std::uint8_t>(value + 1); break;
      case kNodeRs: o.rs_bin = static_cast<std::uint8_t>(value); break;
      case kNodeSf: o.sf_bin = static_cast<std::uint8_t>(value); break;
      case kNodeLat: o.lat_bin = static_cast<std::uint8_t>(value); break;
      case kNodeTp: o.tp_bin = static_cast<std::uint8_t>(value); break;
      case kNodeTs: o.ts_bin = static_cast<std::uint8_t>(value); break;
      default: throw std::domain_error("bad node index");
    }
  }

  void enumerate(const std::vector<int>& nodes, std::size_t depth, double weight,
                 DiscretizedObservation& assign, int target, std::array<double, 6>& dist) const {
    if (depth == nodes.size()) {
      dist[bn_value(assign, target)] += weight;
      return;
    }
    const int v = nodes[depth];
    for (int k = 0; k < kBnCard[v]; ++k) {
      set_value(assign, v, k);
      enumerate(nodes, depth + 1, weight * prob(v, assign), assign, target, dist);
    }
  }

  void enumerate_joint(const std::vector<int>& nodes, std::size_t depth, double weight,
                       DiscretizedObservation& assign, std::span<const int> targets, double& hit,
                       double& total) const {
    if (depth == nodes.size()) {
      total += weight;
      bool all_top = true;
      for (int t : targets)
        if (bn_value(assign, t) != kBnCard[t] - 1) all_top = false;
      if (all_top) hit += weight;
      return;
    }
    const int v = nodes[depth];
    for (int k = 0; k < kBnCard[v]; ++k) {
      set_value(assign, v, k);
      enumerate_joint(nodes, depth + 1, weight * prob(v, assign), assign, targets, hit, total);
    }
  }

  Dag dag_;
  std::array<std::vector<double>, kBnNodes> tables_;
  bool fitted_ = false;
};

// Mean negative log joint probability of a batch. Before any model exists the
// estimate falls back to the uniform joint plus the initial bonus, which
// guarantees a cold start relearns.
inline double surprise(std::span<const DiscretizedObservation> batch, const GenerativeModel& model,
                       double initial_additional_surprise = 1.0) {
  require(!batch.empty(), "surprise of an empty batch is undefined");
  if (!model.fitted()) {
    double uniform = 0.0;
    for (int v = 0; v < kBnNodes; ++v) uniform += std::log(static_cast<double>(kBnCard[v]));
    return initial_additional_surprise + uniform;
  }
  double total = 0.0;
  for (const auto& o : batch) total -= model.log_prob(o);
  return total / static_cast<double>(batch.size());
}

namespace detail {

// Decomposable family score: multinomial log-likelihood with a BIC penalty.
inline double family_score(int node, std::uint16_t parent_mask,
                           std::span<const DiscretizedObservation> data) {
  const long q = parent_config_count(parent_mask);
  if (q > kMaxParentConfigs) return -std::numeric_limits<double>::infinity();
  const int r = kBnCard[node];
  Dag probe;
  probe.parents[node] = parent_mask;
  std::vector<double> counts(static_cast<std::size_t>(q) * r, 0.0);
  std::vector<double> row_totals(static_cast<std::size_t>(q), 0.0);
  for (const auto& o : data) {
    const long j = parent_config_index(probe, node, o);
    counts[j * r + bn_value(o, node)] += 1.0;
    row_totals[j] += 1.0;
  }
  double ll = 0.0;
  for (long j = 0; j < q; ++j) {
    if (row_totals[j] == 0.0) continue;
    for (int k = 0; k < r; ++k) {
      const double c = counts[j * r + k];
      if (c > 0.0) ll += c * std::log(c / row_totals[j]);
    }
  }
  const double penalty =
      0.5 * std::log(static_cast<double>(data.size())) * static_cast<double>(q) * (r - 1);
  return ll - penalty;
}

}  // namespace detail

// Greedy hill climbing over single-edge additions, removals, and reversals,
// maximizing the BIC score. Stops when the best improvement drops below
// epsilon. The action node never takes parents.
inline Dag learn_structure(std::span<const DiscretizedObservation> data,
                           const StructureOptions& opt = {}) {
  require(!data.empty(), "cannot learn structure from no data");
  Dag dag;

  std::map<std::uint32_t, double> score_cache;
  auto family = [&](int node, std::uint16_t mask) {
    const std::uint32_t key = (static_cast<std::uint32_t>(node) << 16) | mask;
    auto it = score_cache.find(key);
    if (it != score_cache.end()) return it->second;
    const double s = detail::family_score(node, mask, data);
    score_cache.emplace(key, s);
    return s;
  };

  while (true) {
    double best_delta = 0.0;
    Dag best;
    bool found = false;

    auto consider = [&](const Dag& candidate, double delta) {
      if (delta >= opt.epsilon && (!found || delta > best_delta)) {
        best = candidate;
        best_delta = delta;
        found = true;
      }
    };

    for (int u = 0; u < kBnNodes; ++u) {
      for (int v = 0; v < kBnNodes; ++v) {
        if (u == v) continue;
        if (!dag.has_edge(u, v)) {
          // addition u -> v
          if (v == kBnAction) continue;
          if (dag.indegree(v) >= opt.max_indegree) continue;
          if (dag.reaches(v, u)) continue;  // would close a cycle
          const std::uint16_t with = dag.parents[v] | static_cast<std::uint16_t>(1u << u);
          const double delta = family(v, with) - family(v, dag.parents[v]);
          Dag candidate = dag;
          candidate.parents[v] = with;
          consider(candidate, delta);
        } else {
          // removal u -> v
          const std::uint16_t without = dag.parents[v] & ~static_cast<std::uint16_t>(1u << u);
          {
            const double delta = family(v, without) - family(v, dag.parents[v]);
            Dag candidate = dag;
            candidate.parents[v] = without;
            consider(candidate, delta);
          }
          // reversal u -> v to v -> u
          if (u != kBnAction && dag.indegree(u) < opt.max_indegree) {
            Dag candidate = dag;
            candidate.parents[v] = without;
            if (!candidate.reaches(u, v)) {
              candidate.parents[u] |= static_cast<std::uint16_t>(1u << v);
              const double delta = (family(v, without) - family(v, dag.parents[v])) +
                                   (family(u, candidate.parents[u]) - family(u, dag.parents[u]));
              consider(candidate, delta);
            }
          }
        }
      }
    }

    if (!found) break;
    dag = best;
  }

  require(dag.acyclic(), "structure learning produced a cycle");
  for (int v = 0; v < kBnNodes; ++v)
    require(dag.indegree(v) <= opt.max_indegree, "indegree bound violated");
  return dag;
}

}  // namespace slobench
