// stlfd: rank demonstrations against STL specifications, infer a reward
// map, train and compose policies, and check policies against the specs.

#include <unistd.h>
#include <termios.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stlfd/io.hpp"
#include "stlfd/kernels.hpp"
#include "stlfd/record.hpp"
#include "stlfd/stl/parser.hpp"

namespace fs = std::filesystem;
using namespace stlfd;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNonConvergence = 4;
constexpr int kExitSpecViolation = 5;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Options {
  std::string env_id;
  double slip = 0.0;
  std::string specs;
  std::vector<std::string> demos;
  std::string reward;
  std::string policy;
  std::string out = ".";
  std::string name = "demo";
  std::string moves;
  std::string goal_order;
  std::vector<std::string> params;
  bool auto_demo = false;
  double init_pos = -0.5;
  bool strict_good = false;
  bool carry_reward = false;
  bool export_map = false;
  TrainConfig train;
  std::string reward_mode = "auto";
  std::string feedback = "penalty";
};

fs::path out_dir(const Options& o) {
  if (const char* env = std::getenv("STLFD_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return o.out;
}

void write_output(const Options& o, const std::string& file, const std::string& text) {
  const fs::path path = out_dir(o) / file;
  io::write_text(path, text);
  std::cout << "wrote " << path.string() << "\n";
}

std::string fixed(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(4) << v;
  return ss.str();
}

std::unique_ptr<Environment> load_env(const Options& o) { return make_environment(o.env_id, o.slip); }

SpecGraph load_specs(const Options& o) {
  if (o.specs.empty()) throw UsageError("--specs is required");
  try {
    return io::parse_specs(io::read_text(o.specs));
  } catch (const ValidationError& e) {
    throw ValidationError(o.specs + ": " + e.what());
  }
}

stl::ParamMap load_params(const Options& o, const Environment& env) {
  stl::ParamMap params = task_parameters(env);
  for (const std::string& kv : o.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--param expects NAME=VALUE, got '" + kv + "'");
    const std::string value = kv.substr(eq + 1);
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || *end != '\0') throw UsageError("--param " + kv + ": value is not a number");
    params[kv.substr(0, eq)] = v;
  }
  return params;
}

std::vector<Trace> load_demos(const Options& o, const Environment& env) {
  if (o.demos.empty()) throw UsageError("at least one demonstration is required (--demos)");
  std::vector<Trace> demos;
  for (const std::string& path : o.demos) {
    try {
      demos.push_back(io::parse_demo(env, io::read_text(path)));
    } catch (const ValidationError& e) {
      throw ValidationError(path + ": " + e.what());
    }
  }
  return demos;
}

std::vector<std::string> demo_ids(const Options& o) {
  std::vector<std::string> ids;
  for (const std::string& path : o.demos) ids.push_back(fs::path(path).stem().string());
  return ids;
}

InferenceOptions inference_options(const Options& o) {
  InferenceOptions opts;
  opts.strict_good_test = o.strict_good;
  return opts;
}

void print_scores(const SpecGraph& graph, const std::vector<DemoScore>& scores) {
  std::cout << std::left << std::setw(24) << "demo";
  for (const SpecNode& n : graph.nodes()) std::cout << std::setw(12) << n.name;
  std::cout << std::setw(12) << "total" << std::setw(7) << "class" << "rank\n";
  for (const DemoScore& s : scores) {
    std::cout << std::setw(24) << s.demo_id;
    for (double r : s.rob) std::cout << std::setw(12) << fixed(r);
    std::cout << std::setw(12) << fixed(s.total) << std::setw(7) << to_string(s.classification) << s.rank
              << "\n";
  }
}

// Prints the per-spec verdict table; returns true when every verdict passes.
bool print_verdicts(const Environment& env, const SpecGraph& graph, const Trace& policy,
                    const stl::ParamMap& params) {
  stl::ParamMap bound_params = params;
  bound_params["T"] = static_cast<double>(policy.length());
  const SpecGraph bound = graph.bind(bound_params);
  const stl::Signal sig = extract_signal(env, policy, standard_features(env));
  bool all = true;
  std::cout << std::left << std::setw(12) << "spec" << std::setw(6) << "kind" << std::setw(12) << "rho"
            << "verdict\n";
  for (const SpecNode& n : bound.nodes()) {
    const double rho = stl::robustness(n.formula, sig, 0).value;
    const bool pass = rho >= 0.0;
    all = all && pass;
    std::cout << std::setw(12) << n.name << std::setw(6) << to_string(n.kind) << std::setw(12) << fixed(rho)
              << (pass ? "pass" : "FAIL") << "\n";
  }
  std::cout << "policy length " << policy.length() - 1 << " steps: "
            << (all ? "satisfies every specification" : "violates a specification") << "\n";
  return all;
}

TrainConfig train_config(const Options& o) {
  TrainConfig cfg = o.train;
  cfg.reward_mode = parse_demo_reward_mode(o.reward_mode);
  cfg.feedback = parse_feedback_mode(o.feedback);
  cfg.validate();
  return cfg;
}

RewardMap load_or_infer_reward(const Options& o, const Environment& env, const SpecGraph& graph,
                               const stl::ParamMap& params) {
  if (!o.reward.empty()) {
    try {
      return io::parse_reward(env, io::read_text(o.reward), o.carry_reward);
    } catch (const ValidationError& e) {
      throw ValidationError(o.reward + ": " + e.what());
    }
  }
  if (o.demos.empty()) throw UsageError("either --reward or --demos is required");
  const auto demos = load_demos(o, env);
  return infer_learner_reward(graph, env, demos, standard_features(env), params, demo_ids(o),
                              inference_options(o))
      .reward;
}

// ------------------------------------------------------------- record

class RawTerminal {
 public:
  RawTerminal() {
    if (tcgetattr(STDIN_FILENO, &saved_) != 0) return;
    termios raw = saved_;
    raw.c_lflag &= static_cast<tcflag_t>(~(ICANON | ECHO));
    raw.c_cc[VMIN] = 1;
    raw.c_cc[VTIME] = 0;
    active_ = tcsetattr(STDIN_FILENO, TCSANOW, &raw) == 0;
  }
  ~RawTerminal() {
    if (active_) tcsetattr(STDIN_FILENO, TCSANOW, &saved_);
  }
  RawTerminal(const RawTerminal&) = delete;
  RawTerminal& operator=(const RawTerminal&) = delete;

 private:
  termios saved_{};
  bool active_ = false;
};

void show_walk(const Environment& env, const Trace& t, const std::optional<SpecGraph>& specs,
               const stl::ParamMap& params) {
  std::cout << "\n";
  if (const auto* grid = dynamic_cast<const GridEnv*>(&env)) {
    std::istringstream map(grid->to_text());
    std::string line;
    for (int r = 0; std::getline(map, line); ++r) {
      for (int c = 0; c < grid->cols(); ++c) {
        const StateId s = grid->state_at(r, c);
        std::cout << (s == t.steps.back().state ? '@' : grid->is_blocked(s) ? '#' : grid->is_goal(s) ? 'G' : '.');
      }
      std::cout << "\n";
    }
  }
  std::cout << "steps " << t.length() - 1;
  if (specs) {
    stl::ParamMap p = params;
    p["T"] = static_cast<double>(t.length());
    const SpecGraph bound = specs->bind(p);
    const auto sig = extract_signal(env, t, standard_features(env));
    for (const SpecNode& n : bound.nodes()) {
      std::cout << "  " << n.name << "=" << fixed(stl::robustness_prefix(n.formula, sig).value);
    }
  }
  std::cout << "\n";
}

// Lowercase w, a, s, d steer like the arrow keys; other letters go through
// move_action, so uppercase U, D, L, R also work on grids.
char interactive_key(const Environment& env, char c) {
  const bool grid = dynamic_cast<const GridEnv*>(&env) != nullptr;
  switch (c) {
    case 'w': return grid ? 'U' : '?';
    case 's': return grid ? 'D' : 'n';
    case 'a': return grid ? 'L' : 'l';
    case 'd': return grid ? 'R' : 'r';
    default: return c;
  }
}

// Arrow keys or move letters; backspace undoes, q or enter finishes.
Trace record_interactive(const Environment& env, const std::optional<SpecGraph>& specs,
                         const stl::ParamMap& params) {
  Trace t = trace_from_moves(env, env.start(), "");
  RawTerminal raw;
  std::cout << "move with arrow keys or w/a/s/d, backspace undoes, q or enter finishes\n";
  show_walk(env, t, specs, params);
  for (int ch; (ch = std::getchar()) != EOF;) {
    if (ch == 'q' || ch == '\n' || ch == '\r') break;
    std::optional<ActionId> a;
    if (ch == 27 && std::getchar() == '[') {
      const int arrow = std::getchar();
      const char key = arrow == 'A' ? 'w' : arrow == 'B' ? 's' : arrow == 'C' ? 'd' : 'a';
      a = move_action(env, interactive_key(env, key));
    } else if (ch == 127 || ch == 8) {
      if (t.length() > 1) {
        t.steps.pop_back();
        t.steps.back().action.reset();
      }
    } else {
      a = move_action(env, interactive_key(env, static_cast<char>(ch)));
    }
    if (a) {
      t.steps.back().action = a;
      t.steps.push_back(Step{env.step(t.steps.back().state, *a), std::nullopt});
    }
    show_walk(env, t, specs, params);
  }
  return t;
}

int cmd_record(const Options& o) {
  auto env = load_env(o);
  Trace demo;
  if (o.auto_demo) {
    const auto* car = dynamic_cast<const MountainCarEnv*>(env.get());
    if (car == nullptr) throw UsageError("--auto is only available for mountain car environments");
    const MountainCarEnv from(car->id(), car->bins_pos(), car->bins_vel(), {o.init_pos, 0.0},
                              car->max_repeat());
    demo = pumping_demo(from, from.initial());
  } else if (!o.moves.empty()) {
    demo = trace_from_moves(*env, env->start(), o.moves);
  } else if (isatty(STDIN_FILENO)) {
    std::optional<SpecGraph> specs;
    if (!o.specs.empty()) specs = load_specs(o);
    demo = record_interactive(*env, specs, load_params(o, *env));
  } else {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    demo = trace_from_moves(*env, env->start(), ss.str());
  }
  validate_trace(*env, demo);
  write_output(o, o.name + ".json", io::demo_to_json(*env, demo));
  return kExitOk;
}

// ------------------------------------------------------------- rank / infer

int cmd_rank(const Options& o) {
  auto env = load_env(o);
  const SpecGraph graph = load_specs(o);
  const auto params = load_params(o, *env);
  const auto demos = load_demos(o, *env);
  const auto scores = rank_demos(kernels::score_demos_omp(graph, *env, demos, standard_features(*env),
                                                          params, demo_ids(o), inference_options(o)));
  print_scores(graph, scores);
  write_output(o, "rank.json", io::rank_report_to_json(graph, scores));
  return kExitOk;
}

int cmd_infer(const Options& o) {
  auto env = load_env(o);
  const SpecGraph graph = load_specs(o);
  const auto params = load_params(o, *env);
  const auto demos = load_demos(o, *env);
  const auto result = infer_learner_reward(graph, *env, demos, standard_features(*env), params,
                                           demo_ids(o), inference_options(o));
  print_scores(graph, result.scores);
  write_output(o, "rank.json", io::rank_report_to_json(graph, result.scores));
  write_output(o, "reward.json", io::reward_to_json(result.reward));
  write_output(o, "reward.csv", io::reward_to_csv(*env, result.reward));
  return kExitOk;
}

// ------------------------------------------------------------- train / compose / eval

int cmd_train(const Options& o) {
  auto env = load_env(o);
  const SpecGraph graph = load_specs(o);
  const auto params = load_params(o, *env);
  const RewardMap reward = load_or_infer_reward(o, *env, graph, params);
  const TrainConfig cfg = train_config(o);

  std::vector<StateId> goal = env->goals();
  if (dynamic_cast<const GridEnv*>(env.get()) != nullptr && goal.size() != 1) {
    throw ValidationError("'" + env->id() + "' has " + std::to_string(goal.size()) +
                          " goals; use the compose command");
  }
  try {
    const TrainResult res = q_stl_train(*env, graph, reward, env->start(), goal, cfg, params);
    write_output(o, "policy.json", io::policy_to_json(*env, res.policy));
    write_output(o, "stats.csv", io::stats_to_csv(res.stats));
    return print_verdicts(*env, graph, res.policy, params) ? kExitOk : kExitSpecViolation;
  } catch (const NonConvergenceError& e) {
    write_output(o, "stats.csv", io::stats_to_csv(e.stats()));
    throw;
  }
}

std::optional<std::vector<StateId>> parse_goal_order(const Options& o, const Environment& env) {
  if (o.goal_order.empty()) return std::nullopt;
  const auto goals = env.goals();
  std::vector<StateId> order;
  std::stringstream ss(o.goal_order);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty() && (item[0] == 'G' || item[0] == 'g')) item.erase(0, 1);
    char* end = nullptr;
    const long k = std::strtol(item.c_str(), &end, 10);
    if (item.empty() || *end != '\0' || k < 1 || k > static_cast<long>(goals.size())) {
      throw UsageError("--goal-order expects goal numbers 1.." + std::to_string(goals.size()) +
                       " separated by commas");
    }
    order.push_back(goals[static_cast<std::size_t>(k - 1)]);
  }
  return order;
}

int cmd_compose(const Options& o) {
  auto env = load_env(o);
  const SpecGraph graph = load_specs(o);
  const auto params = load_params(o, *env);
  const RewardMap reward = load_or_infer_reward(o, *env, graph, params);
  const TrainConfig cfg = train_config(o);
  const auto order = parse_goal_order(o, *env);
  const MultiGoalResult res =
      multi_goal_policy(*env, graph, reward, env->start(), env->goals(), cfg, params, order);

  const auto goals = env->goals();
  std::cout << std::left << std::setw(16) << "order" << std::setw(10) << "feasible" << std::setw(12)
            << "soft" << "length\n";
  for (const PolicyCandidate& c : res.candidates) {
    std::string label;
    for (StateId g : c.order) {
      const auto k = std::find(goals.begin(), goals.end(), g) - goals.begin() + 1;
      label += (label.empty() ? "G" : ",G") + std::to_string(k);
    }
    std::cout << std::setw(16) << label << std::setw(10) << (c.feasible ? "yes" : "no") << std::setw(12)
              << fixed(c.soft_score) << (c.policy.length() > 0 ? c.policy.length() - 1 : 0);
    if (!c.failure.empty()) std::cout << "  (" << c.failure << ")";
    std::cout << "\n";
  }
  write_output(o, "policy.json", io::policy_to_json(*env, res.best));
  write_output(o, "candidates.json", io::candidates_to_json(*env, graph, res));
  return print_verdicts(*env, graph, res.best, params) ? kExitOk : kExitSpecViolation;
}

int cmd_eval(const Options& o) {
  auto env = load_env(o);
  const SpecGraph graph = load_specs(o);
  const auto params = load_params(o, *env);
  if (o.policy.empty()) throw UsageError("--policy is required");
  Trace policy;
  try {
    policy = io::parse_policy(*env, io::read_text(o.policy));
  } catch (const ValidationError& e) {
    throw ValidationError(o.policy + ": " + e.what());
  }
  return print_verdicts(*env, graph, policy, params) ? kExitOk : kExitSpecViolation;
}

int cmd_export(const Options& o) {
  auto env = load_env(o);
  bool wrote = false;
  if (!o.reward.empty()) {
    const RewardMap reward = io::parse_reward(*env, io::read_text(o.reward), o.carry_reward);
    write_output(o, "reward.csv", io::reward_to_csv(*env, reward));
    wrote = true;
  }
  if (o.export_map) {
    const auto* grid = dynamic_cast<const GridEnv*>(env.get());
    if (grid == nullptr) throw UsageError("--map is only available for grid environments");
    write_output(o, env->id() + ".map", grid->to_text());
    wrote = true;
  }
  if (!wrote) throw UsageError("nothing to export: pass --reward FILE and/or --map");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning from demonstrations with STL specifications"};
  app.require_subcommand(1);
  Options o;

  auto env_opts = [&](CLI::App* cmd) {
    cmd->add_option("--env", o.env_id, "Environment id or map file")->required();
    cmd->add_option("--slip", o.slip, "Grid slip probability")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--out", o.out, "Output directory (STLFD_OUT_DIR overrides)");
  };
  auto spec_opts = [&](CLI::App* cmd) {
    cmd->add_option("--specs", o.specs, "Specification file")->check(CLI::ExistingFile);
    cmd->add_option("--param", o.params, "Spec parameter NAME=VALUE (T_goal is derived by default)");
  };
  auto demo_opts = [&](CLI::App* cmd) {
    cmd->add_option("--demos", o.demos, "Demonstration files")->check(CLI::ExistingFile);
    cmd->add_flag("--strict-good", o.strict_good, "Good demonstrations need robustness > 0");
  };
  auto train_opts = [&](CLI::App* cmd) {
    cmd->add_option("--reward", o.reward, "Reward map (inferred from --demos when absent)")
        ->check(CLI::ExistingFile);
    cmd->add_flag("--carry-reward", o.carry_reward, "Accept a reward map from another map of equal size");
    cmd->add_option("--seed", o.train.seed, "Random seed");
    cmd->add_option("--episodes", o.train.episodes, "Training episodes");
    cmd->add_option("--alpha", o.train.alpha, "Learning rate");
    cmd->add_option("--gamma", o.train.gamma, "Discount factor");
    cmd->add_option("--epsilon", o.train.epsilon, "Exploration rate");
    cmd->add_flag("--epsilon-decay", o.train.epsilon_decay, "Decay epsilon linearly to 0");
    cmd->add_option("--max-steps", o.train.max_steps, "Episode step cap (0 = default)");
    cmd->add_option("--reward-mode", o.reward_mode, "auto|state|shaped|offset");
    cmd->add_option("--feedback", o.feedback, "additive|shaped|penalty");
  };

  auto* record = app.add_subcommand("record", "Record a demonstration");
  env_opts(record);
  record->add_option("--specs", o.specs, "Show live robustness while recording")->check(CLI::ExistingFile);
  record->add_option("--moves", o.moves, "Move string (UDLR for grids, lnr for mountain car)");
  record->add_flag("--auto", o.auto_demo, "Scripted mountain car demonstration");
  record->add_option("--init-pos", o.init_pos, "Initial car position for --auto");
  record->add_option("--name", o.name, "Output file stem");

  auto* rank = app.add_subcommand("rank", "Score and rank demonstrations");
  env_opts(rank);
  spec_opts(rank);
  demo_opts(rank);

  auto* infer = app.add_subcommand("infer", "Infer the learner reward map");
  env_opts(infer);
  spec_opts(infer);
  demo_opts(infer);

  auto* train = app.add_subcommand("train", "Train a single-goal policy");
  env_opts(train);
  spec_opts(train);
  demo_opts(train);
  train_opts(train);

  auto* compose = app.add_subcommand("compose", "Compose a multi-goal policy");
  env_opts(compose);
  spec_opts(compose);
  demo_opts(compose);
  train_opts(compose);
  compose->add_option("--goal-order", o.goal_order, "Explicit goal order, e.g. 2,1");

  auto* eval = app.add_subcommand("eval", "Check a policy against the specifications");
  env_opts(eval);
  spec_opts(eval);
  eval->add_option("--policy", o.policy, "Policy file")->check(CLI::ExistingFile);

  auto* exp = app.add_subcommand("export", "Export heatmap CSV or map text");
  env_opts(exp);
  exp->add_option("--reward", o.reward, "Reward map to convert")->check(CLI::ExistingFile);
  exp->add_flag("--carry-reward", o.carry_reward, "Accept a reward map from another map of equal size");
  exp->add_flag("--map", o.export_map, "Write the map text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*record) return cmd_record(o);
    if (*rank) return cmd_rank(o);
    if (*infer) return cmd_infer(o);
    if (*train) return cmd_train(o);
    if (*compose) return cmd_compose(o);
    if (*eval) return cmd_eval(o);
    if (*exp) return cmd_export(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NonConvergenceError& e) {
    std::cerr << "non-convergence: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const UnreachableError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const stl::UnboundParameter& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const stl::EvalError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}
