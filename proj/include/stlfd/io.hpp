#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "stlfd/envs.hpp"
#include "stlfd/features.hpp"
#include "stlfd/inference.hpp"
#include "stlfd/qstl.hpp"
#include "stlfd/specgraph.hpp"

// File formats shared by the CLI and the browser recorder. JSON output is
// deterministic: fixed key order, shortest round-trip numbers.
namespace stlfd::io {

class FormatError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

std::string read_text(const std::filesystem::path& path);
// Writes atomically enough for our purposes: whole file, creating parents.
void write_text(const std::filesystem::path& path, std::string_view text);

// Shortest decimal that round-trips.
std::string format_number(double v);

// Spec file: [{name, kind: "hard"|"soft", formula, depends_on: [names],
// squash?: {kind: "identity"|"tanh", scale}}]. An edge runs from every
// dependency to the spec that lists it.
SpecGraph parse_specs(std::string_view json_text, double temperature = 1.0);
std::string specs_to_json(const SpecGraph& graph);

// Demonstration file. Grids: {env_id, steps: [{x, y, action}]} with x the
// column and y the row (origin top-left), action one of U, D, L, R or null
// on the final step. Mountain Car: {env_id, steps: [{bin_pos, bin_vel,
// action}]} with action push_left, no_push, push_right or null. Grid
// demonstrations must move between 4-adjacent cells (or stay put against a
// wall) consistently with the recorded action.
Trace parse_demo(const Environment& env, std::string_view json_text);
std::string demo_to_json(const Environment& env, const Trace& demo);

// {env_id, values: [{state, reward}]}. A reward map recorded on another
// environment is accepted only with `allow_other_env` and a matching state
// count (carrying a learned reward over to a modified map).
std::string reward_to_json(const RewardMap& reward);
RewardMap parse_reward(const Environment& env, std::string_view json_text,
                       bool allow_other_env = false);
// rows() lines of cols() comma-separated rewards.
std::string reward_to_csv(const Environment& env, const RewardMap& reward);

// {env_id, start, steps: [{state, action}]}
std::string policy_to_json(const Environment& env, const Trace& policy);
Trace parse_policy(const Environment& env, std::string_view json_text);

// episode,steps,reward,termination
std::string stats_to_csv(const std::vector<EpisodeRecord>& stats);

std::string rank_report_to_json(const SpecGraph& graph, const std::vector<DemoScore>& scores);

// {best, candidates: [{order, feasible, soft_score, rob, length, failure}]}
// with goals numbered from 1 in env.goals() order.
std::string candidates_to_json(const Environment& env, const SpecGraph& graph, const MultiGoalResult& result);

}  // namespace stlfd::io
