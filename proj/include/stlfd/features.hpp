#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stlfd/envs.hpp"
#include "stlfd/stl/formula.hpp"
#include "stlfd/stl/signal.hpp"

namespace stlfd {

struct Step {
  StateId state = 0;
  std::optional<ActionId> action;
  bool operator==(const Step&) const = default;
};

// A demonstration or policy: finite sequence of (state, action) pairs.
struct Trace {
  std::string env_id;
  std::vector<Step> steps;

  std::size_t length() const { return steps.size(); }
  std::vector<StateId> states() const;
};

class UnreachableError : public Error {
 public:
  using Error::Error;
};

// Checks length >= 1 and every state id against the environment. Error
// messages name the offending step index.
void validate_trace(const Environment& env, const Trace& trace);

struct FeatureContext {
  // Waypoint that d_goal measures against; the environment's first goal
  // when unset.
  std::optional<StateId> target;
};

// Extractors see the trace prefix up to and including the sample index.
using Extractor = std::function<double(const Environment&, std::span<const Step> prefix,
                                       const FeatureContext&)>;

class FeatureSet {
 public:
  void add(std::string name, Extractor fn);
  const std::vector<std::string>& names() const { return names_; }
  bool contains(std::string_view name) const;
  // Only the named extractors, in the order given.
  FeatureSet subset(const std::vector<std::string>& names) const;
  // Feature values of the last step of `prefix`, in names() order.
  std::vector<double> sample(const Environment& env, std::span<const Step> prefix,
                             const FeatureContext& ctx) const;

 private:
  std::vector<std::string> names_;
  std::vector<Extractor> fns_;
};

// Grids:         t, d_obs, dist_red, d_goal, d_goal_1..d_goal_k, goals_left
// Mountain Car:  t, d_flag, pos_bin, vel_bin
// d_flag is the position-axis distance, in bins, from the bin centre to the
// flag; it is negative once the car is past the flag.
FeatureSet standard_features(const Environment& env);

// One channel per extractor, one sample per trace step.
stl::Signal extract_signal(const Environment& env, const Trace& trace, const FeatureSet& features,
                           const FeatureContext& ctx = {});

// Shortest obstacle-avoiding path length in steps under env.step. Throws
// UnreachableError when no path exists.
int bfs_time_bound(const Environment& env, StateId start, StateId goal);
// Sum of bfs_time_bound over consecutive waypoints start -> goals[0] -> ...
int bfs_chain_bound(const Environment& env, StateId start, std::span<const StateId> goals);
// Minimum chain bound over every visiting order of the goals.
int bfs_best_order_bound(const Environment& env, StateId start, std::vector<StateId> goals);

// Parameters derived from the task: T_goal is the BFS bound from the start
// to the goal (best visiting order with several goals). Empty for
// environments without a shortest-path structure (Mountain Car).
stl::ParamMap task_parameters(const Environment& env);

}  // namespace stlfd
