#include "stlfd/envs.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace stlfd {

bool Environment::is_goal(StateId s) const {
  const auto gs = goals();
  return std::find(gs.begin(), gs.end(), s) != gs.end();
}

// ---------------------------------------------------------------- grid

GridEnv::GridEnv(std::string id, int rows, int cols, Cell start, std::vector<Cell> goals,
                 std::vector<Cell> obstacles, double slip)
    : Environment(std::move(id)),
      rows_(rows),
      cols_(cols),
      start_(start),
      goals_(std::move(goals)),
      obstacles_(std::move(obstacles)),
      slip_(slip) {
  if (rows_ < 1 || cols_ < 1) throw ValidationError("grid must have at least one cell");
  if (slip_ < 0.0 || slip_ > 1.0) throw ValidationError("slip probability must lie in [0, 1]");
  if (!in_bounds(start_)) throw ValidationError("start cell out of bounds");
  if (goals_.empty()) throw ValidationError("grid needs at least one goal");
  obstacle_.assign(static_cast<std::size_t>(rows_ * cols_), false);
  std::sort(obstacles_.begin(), obstacles_.end());
  obstacles_.erase(std::unique(obstacles_.begin(), obstacles_.end()), obstacles_.end());
  for (Cell c : obstacles_) {
    if (!in_bounds(c)) throw ValidationError("obstacle cell out of bounds");
    obstacle_[static_cast<std::size_t>(to_state(c))] = true;
  }
  if (obstacle_[static_cast<std::size_t>(to_state(start_))]) {
    throw ValidationError("start cell is an obstacle");
  }
  for (Cell g : goals_) {
    if (!in_bounds(g)) throw ValidationError("goal cell out of bounds");
    if (obstacle_[static_cast<std::size_t>(to_state(g))]) throw ValidationError("goal cell is an obstacle");
  }
  obstacle_distance_.assign(static_cast<std::size_t>(rows_ * cols_), rows_ + cols_);
  for (StateId s = 0; s < num_states(); ++s) {
    Cell c = to_cell(s);
    for (Cell o : obstacles_) {
      int d = std::abs(c.row - o.row) + std::abs(c.col - o.col);
      auto& best = obstacle_distance_[static_cast<std::size_t>(s)];
      best = std::min(best, d);
    }
  }
}

StateId GridEnv::step(StateId s, ActionId a) const {
  Cell c = to_cell(s);
  switch (a) {
    case kUp: c.row -= 1; break;
    case kDown: c.row += 1; break;
    case kLeft: c.col -= 1; break;
    case kRight: c.col += 1; break;
    default: throw ValidationError("invalid grid action " + std::to_string(a));
  }
  return in_bounds(c) ? to_state(c) : s;
}

namespace {

class GridRollout : public Rollout {
 public:
  GridRollout(const GridEnv& env, StateId start, double slip)
      : env_(env), state_(start), slip_(slip) {}
  StateId state() const override { return state_; }
  StateId advance(ActionId a, Rng& rng) override {
    if (slip_ > 0.0 && std::uniform_real_distribution<double>(0.0, 1.0)(rng) < slip_) {
      // Slip sideways, perpendicular to the intended move.
      const bool vertical = a == kUp || a == kDown;
      const int pick = std::uniform_int_distribution<int>(0, 1)(rng);
      a = vertical ? (pick ? kRight : kLeft) : (pick ? kDown : kUp);
    }
    state_ = env_.step(state_, a);
    return state_;
  }

 private:
  const GridEnv& env_;
  StateId state_;
  double slip_;
};

}  // namespace

std::unique_ptr<Rollout> GridEnv::rollout(StateId start) const {
  return std::make_unique<GridRollout>(*this, start, slip_);
}

std::unique_ptr<Rollout> GridEnv::nominal_rollout(StateId start) const {
  return std::make_unique<GridRollout>(*this, start, 0.0);
}

std::string GridEnv::action_name(ActionId a) const {
  static const std::array<const char*, 4> names{"U", "D", "L", "R"};
  if (a < 0 || a > 3) throw ValidationError("invalid grid action " + std::to_string(a));
  return names[static_cast<std::size_t>(a)];
}

std::optional<ActionId> GridEnv::parse_action(std::string_view name) const {
  if (name == "U") return kUp;
  if (name == "D") return kDown;
  if (name == "L") return kLeft;
  if (name == "R") return kRight;
  return std::nullopt;
}

std::vector<StateId> GridEnv::goals() const {
  std::vector<StateId> out;
  for (Cell g : goals_) out.push_back(to_state(g));
  return out;
}

GridEnv GridEnv::with_slip(double slip) const {
  return GridEnv(id(), rows_, cols_, start_, goals_, obstacles_, slip);
}

std::string GridEnv::to_text() const {
  std::vector<std::string> cells(static_cast<std::size_t>(rows_ * cols_), ".");
  for (Cell o : obstacles_) cells[static_cast<std::size_t>(to_state(o))] = "#";
  cells[static_cast<std::size_t>(to_state(start_))] = "S";
  for (std::size_t i = 0; i < goals_.size(); ++i) {
    cells[static_cast<std::size_t>(to_state(goals_[i]))] =
        goals_.size() == 1 ? "G" : "G" + std::to_string(i + 1);
  }
  std::string out;
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      if (c) out += ' ';
      out += cells[static_cast<std::size_t>(r * cols_ + c)];
    }
    out += '\n';
  }
  return out;
}

GridEnv load_map(std::string_view text, std::string id, double slip) {
  std::optional<Cell> start;
  std::vector<Cell> obstacles;
  std::map<int, Cell> numbered_goals;
  std::vector<Cell> plain_goals;
  int width = -1;
  int row = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == ';') continue;
    int col = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char ch = line[i];
      if (ch == ' ' || ch == '\t' || ch == '\r') continue;
      Cell cell{row, col};
      switch (ch) {
        case '.':
        case 'F':
          break;
        case '#':
        case 'H':
          obstacles.push_back(cell);
          break;
        case 'S':
          if (start) throw ValidationError("line " + std::to_string(line_no) + ": second start cell");
          start = cell;
          break;
        case 'G': {
          std::size_t j = i + 1;
          while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
          if (j == i + 1) {
            plain_goals.push_back(cell);
          } else {
            int k = std::stoi(line.substr(i + 1, j - i - 1));
            if (k < 1 || !numbered_goals.emplace(k, cell).second) {
              throw ValidationError("line " + std::to_string(line_no) + ": bad or repeated goal G" +
                                    std::to_string(k));
            }
          }
          i = j - 1;
          break;
        }
        default:
          throw ValidationError("line " + std::to_string(line_no) + ": unknown map cell '" +
                                std::string(1, ch) + "'");
      }
      ++col;
    }
    if (width < 0) width = col;
    if (col != width) {
      throw ValidationError("line " + std::to_string(line_no) + ": ragged row (" +
                            std::to_string(col) + " cells, expected " + std::to_string(width) + ")");
    }
    ++row;
  }
  if (row == 0) throw ValidationError("empty map");
  if (!start) throw ValidationError("map has no start cell 'S'");
  if (!plain_goals.empty() && !numbered_goals.empty()) {
    throw ValidationError("map mixes 'G' and numbered goals");
  }
  std::vector<Cell> goals = plain_goals;
  int expect = 1;
  for (const auto& [k, cell] : numbered_goals) {
    if (k != expect++) throw ValidationError("numbered goals must be G1..Gk without gaps");
    goals.push_back(cell);
  }
  if (goals.empty()) throw ValidationError("map has no goal cell");
  return GridEnv(std::move(id), row, width, *start, std::move(goals), std::move(obstacles), slip);
}

// --------------------------------------------------------- mountain car

MountainCarEnv::MountainCarEnv(std::string id, int bins_pos, int bins_vel, CarState initial,
                               int max_repeat)
    : Environment(std::move(id)),
      bins_pos_(bins_pos),
      bins_vel_(bins_vel),
      initial_(initial),
      max_repeat_(max_repeat) {
  if (bins_pos_ < 2 || bins_vel_ < 2) throw ValidationError("mountain car needs at least 2x2 bins");
  if (max_repeat_ < 1) throw ValidationError("mountain car max_repeat must be at least 1");
  goal_bin_ = pos_bin(bin_of({kGoalPosition, 0.0}));
}

StateId MountainCarEnv::bin_of(CarState c) const {
  auto index = [](double v, double lo, double width, int bins) {
    int i = static_cast<int>(std::floor((v - lo) / width));
    return std::clamp(i, 0, bins - 1);
  };
  return state_of(index(c.position, kMinPosition, pos_width(), bins_pos_),
                  index(c.velocity, -kMaxSpeed, vel_width(), bins_vel_));
}

CarState MountainCarEnv::center(StateId s) const {
  return {kMinPosition + (pos_bin(s) + 0.5) * pos_width(),
          -kMaxSpeed + (vel_bin(s) + 0.5) * vel_width()};
}

CarState MountainCarEnv::integrate(CarState c, ActionId a) {
  if (a < 0 || a > 2) throw ValidationError("invalid mountain car action " + std::to_string(a));
  double v = c.velocity + (a - 1) * kForce - kGravity * std::cos(3.0 * c.position);
  v = std::clamp(v, -kMaxSpeed, kMaxSpeed);
  double x = std::clamp(c.position + v, kMinPosition, kMaxPosition);
  if (x == kMinPosition && v < 0) v = 0;
  return {x, v};
}

CarState MountainCarEnv::advance(CarState c, ActionId a) const {
  const StateId from = bin_of(c);
  for (int k = 0; k < max_repeat_; ++k) {
    c = integrate(c, a);
    if (bin_of(c) != from) break;
  }
  return c;
}

StateId MountainCarEnv::step(StateId s, ActionId a) const { return bin_of(advance(center(s), a)); }

namespace {

class CarRollout : public Rollout {
 public:
  CarRollout(const MountainCarEnv& env, CarState c) : env_(env), car_(c) {}
  StateId state() const override { return env_.bin_of(car_); }
  StateId advance(ActionId a, Rng&) override {
    car_ = env_.advance(car_, a);
    return env_.bin_of(car_);
  }

 private:
  const MountainCarEnv& env_;
  CarState car_;
};

}  // namespace

std::unique_ptr<Rollout> MountainCarEnv::rollout(StateId start) const {
  return std::make_unique<CarRollout>(*this, start == this->start() ? initial_ : center(start));
}

std::string MountainCarEnv::action_name(ActionId a) const {
  switch (a) {
    case kPushLeft: return "push_left";
    case kNoPush: return "no_push";
    case kPushRight: return "push_right";
    default: throw ValidationError("invalid mountain car action " + std::to_string(a));
  }
}

std::optional<ActionId> MountainCarEnv::parse_action(std::string_view name) const {
  if (name == "push_left") return kPushLeft;
  if (name == "no_push") return kNoPush;
  if (name == "push_right") return kPushRight;
  return std::nullopt;
}

std::vector<StateId> MountainCarEnv::goals() const {
  std::vector<StateId> out;
  for (int p = goal_bin_; p < bins_pos_; ++p) {
    for (int v = 0; v < bins_vel_; ++v) out.push_back(state_of(p, v));
  }
  return out;
}

// ------------------------------------------------------------- registry

namespace {

const std::map<std::string, std::string, std::less<>>& builtin_maps() {
  static const std::map<std::string, std::string, std::less<>> maps{
      {"example6",
       "....G.\n"
       ".....#\n"
       "..#...\n"
       "...#..\n"
       "S.....\n"
       "......\n"},
      {"grid5",
       "....G\n"
       ".#...\n"
       "...#.\n"
       "#....\n"
       "S....\n"},
      {"grid7",
       "....#.G\n"
       ".#.....\n"
       "...#.#.\n"
       ".#.....\n"
       "....#..\n"
       "#.#....\n"
       "S....#.\n"},
      {"grid7multi",
       "...G1...\n"
       ".#...#.\n"
       "...#...\n"
       ".#...#.\n"
       "...#...\n"
       "#....#.\n"
       "S.....G2\n"},
      {"grid10",
       ".....#...G\n"
       ".##......#\n"
       "....#.#...\n"
       ".#......#.\n"
       "...##.....\n"
       ".#....#.#.\n"
       "...#......\n"
       ".#...##.#.\n"
       "#....#....\n"
       "S..#......\n"},
      {"frozenlake4",
       "SFFF\n"
       "FHFH\n"
       "FFFH\n"
       "HFFG\n"},
      {"frozenlake4-test",
       "SFFF\n"
       "FFFH\n"
       "HHFF\n"
       "FFHG\n"},
      {"frozenlake8",
       "SFFFFFFF\n"
       "FFFFFFFF\n"
       "FFFHFFFF\n"
       "FFFFFHFF\n"
       "FFFHFFFF\n"
       "FHHFFFHF\n"
       "FHFFHFHF\n"
       "FFFHFFFG\n"},
      {"frozenlake8-test1",
       "SFFFFFFF\n"
       "FFFFFHFF\n"
       "FFHFFFFF\n"
       "FFFFFFHF\n"
       "FHFFFFFF\n"
       "FFFHHFFF\n"
       "FHFFFFHF\n"
       "FFFFHFFG\n"},
      {"frozenlake8-test2",
       "SFFFFFFF\n"
       "FFFHFFFF\n"
       "FHFFFFHF\n"
       "FFFFHFFF\n"
       "FFHFFFFF\n"
       "FFFFFHFF\n"
       "FHHFFFFH\n"
       "FFFFFHFG\n"},
      {"frozenlake8-test3",
       "SFFHFFFF\n"
       "FFFFFFHF\n"
       "FHFFFFFF\n"
       "FFFHFFFF\n"
       "FFFFFFHF\n"
       "HFFHFFFF\n"
       "FFFFFHFF\n"
       "FHFFFFFG\n"},
  };
  return maps;
}

}  // namespace

std::optional<std::string> builtin_map(std::string_view id) {
  const auto& maps = builtin_maps();
  auto it = maps.find(id);
  if (it == maps.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> builtin_environment_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, text] : builtin_maps()) ids.push_back(id);
  ids.insert(ids.end(), {"mountaincar50", "mountaincar75", "mountaincar100"});
  return ids;
}

std::unique_ptr<Environment> make_environment(std::string_view id_or_path, double slip) {
  if (auto text = builtin_map(id_or_path)) {
    return std::make_unique<GridEnv>(load_map(*text, std::string(id_or_path), slip));
  }
  for (int bins : {50, 75, 100}) {
    if (id_or_path == "mountaincar" + std::to_string(bins)) {
      return std::make_unique<MountainCarEnv>(std::string(id_or_path), bins, bins);
    }
  }
  std::filesystem::path path{std::string(id_or_path)};
  std::ifstream in(path);
  if (!in) throw ValidationError("unknown environment '" + std::string(id_or_path) + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return std::make_unique<GridEnv>(load_map(buf.str(), path.stem().string(), slip));
}

}  // namespace stlfd
