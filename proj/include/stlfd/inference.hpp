#pragma once

#include <string>
#include <vector>

#include "stlfd/envs.hpp"
#include "stlfd/features.hpp"
#include "stlfd/specgraph.hpp"
#include "stlfd/stl/formula.hpp"

namespace stlfd {

enum class DemoClass { Good, Bad };

std::string_view to_string(DemoClass c);

struct InferenceOptions {
  // Literal reading of the good-demo branch: every hard robustness must be
  // strictly positive. Off by default; robustness 0 counts as satisfied.
  bool strict_good_test = false;
  double cap = stl::kDefaultRobustnessCap;
};

struct DemoScore {
  std::string demo_id;
  std::vector<double> rob;  // per spec, in graph node order
  double total = 0.0;       // sum_i softmax_weight_i * rob_i
  DemoClass classification = DemoClass::Good;
  int rank = 0;
  // Step indices whose state violates the per-step condition of a violated
  // hard spec (only filled for bad demonstrations).
  std::vector<std::size_t> bad_steps;
};

// Dense per-state reward over an environment.
struct RewardMap {
  std::string env_id;
  std::vector<double> values;

  double max_abs() const;
  double at(StateId s) const { return values[static_cast<std::size_t>(s)]; }
};

// `params` supplies every parameter except T, which is set to the length of
// each demonstration.
DemoScore score_demo(const SpecGraph& graph, const Environment& env, const Trace& demo,
                     const FeatureSet& features, const stl::ParamMap& params,
                     std::string demo_id = {}, const InferenceOptions& opts = {});

// Good demo: state of step l (1-based) gets (l/L) * total, keeping the
// largest value on revisits. Bad demo: states at bad_steps get total.
// Every other state is 0.
std::vector<double> assign_demo_rewards(const DemoScore& score, const Trace& demo, int num_states);

// Ranks 1..m, m for the best. Good demonstrations always rank above bad
// ones; within a class higher totals rank higher and ties keep input order
// (earlier input ranks higher).
std::vector<DemoScore> rank_demos(std::vector<DemoScore> scores);

struct InferenceResult {
  std::vector<DemoScore> scores;  // input order, ranks filled
  RewardMap reward;
};

// sum_j rank_j * reward_j(s), divided by max_s |R(s)| when that is nonzero.
InferenceResult infer_learner_reward(const SpecGraph& graph, const Environment& env,
                                     const std::vector<Trace>& demos, const FeatureSet& features,
                                     const stl::ParamMap& params,
                                     const std::vector<std::string>& demo_ids = {},
                                     const InferenceOptions& opts = {});

}  // namespace stlfd
