#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "stlfd/error.hpp"

namespace stlfd {

using StateId = std::int32_t;
using ActionId = std::int32_t;
using Rng = std::mt19937_64;

// Live episode simulator. Grid rollouts walk the abstract dynamics (plus
// optional slip); Mountain Car rollouts integrate the continuous car and
// report its bin.
class Rollout {
 public:
  virtual ~Rollout() = default;
  virtual StateId state() const = 0;
  virtual StateId advance(ActionId action, Rng& rng) = 0;
};

class Environment {
 public:
  explicit Environment(std::string id) : id_(std::move(id)) {}
  virtual ~Environment() = default;

  const std::string& id() const { return id_; }

  virtual int num_states() const = 0;
  virtual int num_actions() const = 0;
  // Deterministic abstract transition.
  virtual StateId step(StateId s, ActionId a) const = 0;
  virtual std::unique_ptr<Rollout> rollout(StateId start) const = 0;
  // Rollout without injected noise; used when extracting greedy policies.
  virtual std::unique_ptr<Rollout> nominal_rollout(StateId start) const { return rollout(start); }

  virtual std::string action_name(ActionId a) const = 0;
  virtual std::optional<ActionId> parse_action(std::string_view name) const = 0;

  virtual StateId start() const = 0;
  // Ordered goals for grids; every goal bin for Mountain Car.
  virtual std::vector<StateId> goals() const = 0;
  virtual bool is_goal(StateId s) const;
  // Cells an obstacle-avoiding search must not enter.
  virtual bool is_blocked(StateId) const { return false; }
  // True when rollouts follow step() exactly (no slip, no hidden state).
  virtual bool exact_dynamics() const { return true; }

  // Row-major 2-D layout used by heatmaps and file formats.
  virtual int rows() const = 0;
  virtual int cols() const = 0;
  StateId state_at(int row, int col) const { return row * cols() + col; }
  int row_of(StateId s) const { return s / cols(); }
  int col_of(StateId s) const { return s % cols(); }
  bool valid(StateId s) const { return s >= 0 && s < num_states(); }

 private:
  std::string id_;
};

struct Cell {
  int row = 0;
  int col = 0;
  auto operator<=>(const Cell&) const = default;
};

enum GridAction : ActionId { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };

// Grid world, (row, col) with the origin at the top-left cell. Moving into
// a wall leaves the agent in place; obstacle cells can be entered.
class GridEnv : public Environment {
 public:
  GridEnv(std::string id, int rows, int cols, Cell start, std::vector<Cell> goals,
          std::vector<Cell> obstacles, double slip = 0.0);

  int num_states() const override { return rows_ * cols_; }
  int num_actions() const override { return 4; }
  StateId step(StateId s, ActionId a) const override;
  std::unique_ptr<Rollout> rollout(StateId start) const override;
  std::unique_ptr<Rollout> nominal_rollout(StateId start) const override;
  std::string action_name(ActionId a) const override;
  std::optional<ActionId> parse_action(std::string_view name) const override;
  StateId start() const override { return to_state(start_); }
  std::vector<StateId> goals() const override;
  bool is_blocked(StateId s) const override { return obstacle_[static_cast<std::size_t>(s)]; }
  bool exact_dynamics() const override { return slip_ == 0.0; }
  int rows() const override { return rows_; }
  int cols() const override { return cols_; }

  bool in_bounds(Cell c) const { return c.row >= 0 && c.row < rows_ && c.col >= 0 && c.col < cols_; }
  StateId to_state(Cell c) const { return c.row * cols_ + c.col; }
  Cell to_cell(StateId s) const { return {s / cols_, s % cols_}; }
  Cell start_cell() const { return start_; }
  const std::vector<Cell>& goal_cells() const { return goals_; }
  const std::vector<Cell>& obstacle_cells() const { return obstacles_; }
  double slip() const { return slip_; }
  GridEnv with_slip(double slip) const;

  // Minimum Manhattan distance to any obstacle; rows + cols when there are none.
  int obstacle_distance(StateId s) const { return obstacle_distance_[static_cast<std::size_t>(s)]; }

  // Map text (S start, G or G1..Gk goals, # obstacle, . free).
  std::string to_text() const;

 private:
  int rows_;
  int cols_;
  Cell start_;
  std::vector<Cell> goals_;
  std::vector<Cell> obstacles_;
  std::vector<bool> obstacle_;
  std::vector<int> obstacle_distance_;
  double slip_;
};

// Parses a rectangular map. Cells: '.' or 'F' free, '#' or 'H' obstacle,
// 'S' start, 'G' or 'G<k>' goal. Spaces between cells are ignored.
GridEnv load_map(std::string_view text, std::string id, double slip = 0.0);

enum MountainCarAction : ActionId { kPushLeft = 0, kNoPush = 1, kPushRight = 2 };

struct CarState {
  double position = 0.0;
  double velocity = 0.0;
};

// Classic Mountain Car over a uniform bins_pos x bins_vel partition of
// [-1.2, 0.6] x [-0.07, 0.07]. State id = bin_pos * bins_vel + bin_vel.
// One abstract step holds the action until the car leaves its bin, for at
// most max_repeat physics frames; max_repeat = 1 gives single-frame steps.
class MountainCarEnv : public Environment {
 public:
  static constexpr double kMinPosition = -1.2;
  static constexpr double kMaxPosition = 0.6;
  static constexpr double kMaxSpeed = 0.07;
  static constexpr double kGoalPosition = 0.5;
  static constexpr double kForce = 0.001;
  static constexpr double kGravity = 0.0025;

  static constexpr int kDefaultMaxRepeat = 100;

  MountainCarEnv(std::string id, int bins_pos, int bins_vel, CarState initial = {-0.5, 0.0},
                 int max_repeat = kDefaultMaxRepeat);

  int num_states() const override { return bins_pos_ * bins_vel_; }
  int num_actions() const override { return 3; }
  // Advances from the bin centre and re-bins the result.
  StateId step(StateId s, ActionId a) const override;
  // Rollouts keep the continuous state; starting from start() uses the
  // configured initial state, any other bin starts at its centre.
  std::unique_ptr<Rollout> rollout(StateId start) const override;
  std::string action_name(ActionId a) const override;
  std::optional<ActionId> parse_action(std::string_view name) const override;
  StateId start() const override { return bin_of(initial_); }
  std::vector<StateId> goals() const override;
  bool is_goal(StateId s) const override { return pos_bin(s) >= goal_bin_; }
  bool exact_dynamics() const override { return false; }
  int rows() const override { return bins_pos_; }
  int cols() const override { return bins_vel_; }

  int bins_pos() const { return bins_pos_; }
  int bins_vel() const { return bins_vel_; }
  int pos_bin(StateId s) const { return s / bins_vel_; }
  int vel_bin(StateId s) const { return s % bins_vel_; }
  StateId state_of(int pos_bin, int vel_bin) const { return pos_bin * bins_vel_ + vel_bin; }
  StateId bin_of(CarState c) const;
  CarState center(StateId s) const;
  double pos_width() const { return (kMaxPosition - kMinPosition) / bins_pos_; }
  double vel_width() const { return 2 * kMaxSpeed / bins_vel_; }
  // First position bin counted as the goal (the bin holding kGoalPosition).
  int goal_bin() const { return goal_bin_; }
  CarState initial() const { return initial_; }

  int max_repeat() const { return max_repeat_; }
  // One physics frame.
  static CarState integrate(CarState c, ActionId a);
  // One abstract step: frames until the bin changes or max_repeat is hit.
  CarState advance(CarState c, ActionId a) const;

 private:
  int bins_pos_;
  int bins_vel_;
  int goal_bin_;
  CarState initial_;
  int max_repeat_;
};

// Built-in ids: grid5, grid7, grid7multi, grid10, example6, frozenlake4,
// frozenlake4-test, frozenlake8, frozenlake8-test1..3, mountaincar50,
// mountaincar75, mountaincar100. Anything else is read as a map file path
// whose stem becomes the environment id.
std::unique_ptr<Environment> make_environment(std::string_view id_or_path, double slip = 0.0);

// Map text of a built-in grid, or nullopt.
std::optional<std::string> builtin_map(std::string_view id);
std::vector<std::string> builtin_environment_ids();

}  // namespace stlfd
