#include "stlfd/features.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace stlfd {

std::vector<StateId> Trace::states() const {
  std::vector<StateId> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.state);
  return out;
}

void validate_trace(const Environment& env, const Trace& trace) {
  if (trace.steps.empty()) throw ValidationError("trace has no steps");
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& st = trace.steps[i];
    if (!env.valid(st.state)) {
      throw ValidationError("step " + std::to_string(i) + ": state " + std::to_string(st.state) +
                            " outside environment '" + env.id() + "'");
    }
    if (st.action && (*st.action < 0 || *st.action >= env.num_actions())) {
      throw ValidationError("step " + std::to_string(i) + ": invalid action " +
                            std::to_string(*st.action));
    }
  }
}

void FeatureSet::add(std::string name, Extractor fn) {
  if (contains(name)) throw ValidationError("duplicate feature '" + name + "'");
  names_.push_back(std::move(name));
  fns_.push_back(std::move(fn));
}

bool FeatureSet::contains(std::string_view name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

FeatureSet FeatureSet::subset(const std::vector<std::string>& names) const {
  FeatureSet out;
  for (const auto& n : names) {
    auto it = std::find(names_.begin(), names_.end(), n);
    if (it == names_.end()) throw ValidationError("unknown feature '" + n + "'");
    out.add(n, fns_[static_cast<std::size_t>(it - names_.begin())]);
  }
  return out;
}

std::vector<double> FeatureSet::sample(const Environment& env, std::span<const Step> prefix,
                                       const FeatureContext& ctx) const {
  std::vector<double> out(fns_.size());
  for (std::size_t i = 0; i < fns_.size(); ++i) out[i] = fns_[i](env, prefix, ctx);
  return out;
}

namespace {

int manhattan(const GridEnv& g, StateId a, StateId b) {
  Cell x = g.to_cell(a);
  Cell y = g.to_cell(b);
  return std::abs(x.row - y.row) + std::abs(x.col - y.col);
}

FeatureSet grid_features(const GridEnv& grid) {
  FeatureSet fs;
  fs.add("t", [](const Environment&, std::span<const Step> p, const FeatureContext&) {
    return static_cast<double>(p.size() - 1);
  });
  auto d_obs = [](const Environment& e, std::span<const Step> p, const FeatureContext&) {
    return static_cast<double>(static_cast<const GridEnv&>(e).obstacle_distance(p.back().state));
  };
  fs.add("d_obs", d_obs);
  fs.add("dist_red", d_obs);
  fs.add("d_goal", [](const Environment& e, std::span<const Step> p, const FeatureContext& ctx) {
    const auto& g = static_cast<const GridEnv&>(e);
    StateId target = ctx.target ? *ctx.target : g.goals().front();
    return static_cast<double>(manhattan(g, p.back().state, target));
  });
  for (std::size_t k = 0; k < grid.goal_cells().size(); ++k) {
    fs.add("d_goal_" + std::to_string(k + 1),
           [k](const Environment& e, std::span<const Step> p, const FeatureContext&) {
             const auto& g = static_cast<const GridEnv&>(e);
             return static_cast<double>(manhattan(g, p.back().state, g.to_state(g.goal_cells()[k])));
           });
  }
  fs.add("goals_left", [](const Environment& e, std::span<const Step> p, const FeatureContext&) {
    int left = 0;
    for (StateId goal : e.goals()) {
      bool seen = std::any_of(p.begin(), p.end(), [&](const Step& s) { return s.state == goal; });
      left += seen ? 0 : 1;
    }
    return static_cast<double>(left);
  });
  return fs;
}

FeatureSet car_features() {
  FeatureSet fs;
  fs.add("t", [](const Environment&, std::span<const Step> p, const FeatureContext&) {
    return static_cast<double>(p.size() - 1);
  });
  fs.add("d_flag", [](const Environment& e, std::span<const Step> p, const FeatureContext&) {
    const auto& car = static_cast<const MountainCarEnv&>(e);
    const double x = car.center(p.back().state).position;
    return (MountainCarEnv::kGoalPosition - x) / car.pos_width();
  });
  fs.add("pos_bin", [](const Environment& e, std::span<const Step> p, const FeatureContext&) {
    return static_cast<double>(static_cast<const MountainCarEnv&>(e).pos_bin(p.back().state));
  });
  fs.add("vel_bin", [](const Environment& e, std::span<const Step> p, const FeatureContext&) {
    return static_cast<double>(static_cast<const MountainCarEnv&>(e).vel_bin(p.back().state));
  });
  return fs;
}

}  // namespace

FeatureSet standard_features(const Environment& env) {
  if (auto g = dynamic_cast<const GridEnv*>(&env)) return grid_features(*g);
  if (dynamic_cast<const MountainCarEnv*>(&env)) return car_features();
  throw ValidationError("no standard features for environment '" + env.id() + "'");
}

stl::Signal extract_signal(const Environment& env, const Trace& trace, const FeatureSet& features,
                           const FeatureContext& ctx) {
  validate_trace(env, trace);
  stl::Signal sig(features.names());
  std::span<const Step> steps(trace.steps);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    sig.append(features.sample(env, steps.first(i + 1), ctx));
  }
  return sig;
}

int bfs_time_bound(const Environment& env, StateId start, StateId goal) {
  if (!env.valid(start) || !env.valid(goal)) throw ValidationError("BFS endpoint outside environment");
  if (start == goal) return 0;
  std::vector<int> dist(static_cast<std::size_t>(env.num_states()), -1);
  std::deque<StateId> queue{start};
  dist[static_cast<std::size_t>(start)] = 0;
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    for (ActionId a = 0; a < env.num_actions(); ++a) {
      StateId n = env.step(s, a);
      if (dist[static_cast<std::size_t>(n)] >= 0 || env.is_blocked(n)) continue;
      dist[static_cast<std::size_t>(n)] = dist[static_cast<std::size_t>(s)] + 1;
      if (n == goal) return dist[static_cast<std::size_t>(n)];
      queue.push_back(n);
    }
  }
  throw UnreachableError("goal state " + std::to_string(goal) + " unreachable from state " +
                         std::to_string(start) + " in '" + env.id() + "'");
}

int bfs_chain_bound(const Environment& env, StateId start, std::span<const StateId> goals) {
  int total = 0;
  StateId from = start;
  for (StateId g : goals) {
    total += bfs_time_bound(env, from, g);
    from = g;
  }
  return total;
}

int bfs_best_order_bound(const Environment& env, StateId start, std::vector<StateId> goals) {
  std::sort(goals.begin(), goals.end());
  int best = std::numeric_limits<int>::max();
  bool any = false;
  do {
    try {
      best = std::min(best, bfs_chain_bound(env, start, goals));
      any = true;
    } catch (const UnreachableError&) {
    }
  } while (std::next_permutation(goals.begin(), goals.end()));
  if (!any) throw UnreachableError("no visiting order reaches every goal in '" + env.id() + "'");
  return best;
}

stl::ParamMap task_parameters(const Environment& env) {
  stl::ParamMap params;
  if (dynamic_cast<const GridEnv*>(&env) == nullptr) return params;
  const auto goals = env.goals();
  const int bound = goals.size() == 1 ? bfs_time_bound(env, env.start(), goals.front())
                                      : bfs_best_order_bound(env, env.start(), goals);
  params["T_goal"] = static_cast<double>(bound);
  return params;
}

}  // namespace stlfd
