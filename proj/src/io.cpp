#include "stlfd/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "stlfd/stl/parser.hpp"

namespace stlfd::io {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

namespace {

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string(what) + ": " + e.what());
  }
}

const json& field(const json& obj, const char* key, std::string_view where) {
  if (!obj.is_object()) throw FormatError(std::string(where) + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(std::string(where) + ": missing field '" + key + "'");
  return *it;
}

std::string get_string(const json& obj, const char* key, std::string_view where) {
  const json& v = field(obj, key, where);
  if (!v.is_string()) throw FormatError(std::string(where) + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

long long get_int(const json& obj, const char* key, std::string_view where) {
  const json& v = field(obj, key, where);
  if (!v.is_number_integer()) {
    throw FormatError(std::string(where) + ": field '" + key + "' must be an integer");
  }
  return v.get<long long>();
}

const json& get_array(const json& obj, const char* key, std::string_view where) {
  const json& v = field(obj, key, where);
  if (!v.is_array()) throw FormatError(std::string(where) + ": field '" + key + "' must be an array");
  return v;
}

std::optional<ActionId> get_action(const Environment& env, const json& step, std::string_view where) {
  auto it = step.find("action");
  if (it == step.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw FormatError(std::string(where) + ": action must be a string or null");
  auto a = env.parse_action(it->get<std::string>());
  if (!a) throw FormatError(std::string(where) + ": unknown action '" + it->get<std::string>() + "'");
  return a;
}

void check_env(const Environment& env, const std::string& env_id, std::string_view what) {
  if (env_id != env.id()) {
    throw FormatError(std::string(what) + " is for environment '" + env_id + "', not '" + env.id() + "'");
  }
}

ordered action_json(const Environment& env, const std::optional<ActionId>& a) {
  return a ? ordered(env.action_name(*a)) : ordered(nullptr);
}

std::string dump(const ordered& j) { return j.dump(2) + "\n"; }

std::string step_where(std::size_t i) { return "step " + std::to_string(i); }

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

SpecGraph parse_specs(std::string_view json_text, double temperature) {
  const json doc = parse_json(json_text, "spec file");
  if (!doc.is_array()) throw FormatError("spec file: expected a list of specifications");
  std::vector<SpecNode> nodes;
  std::vector<SpecEdge> edges;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& entry = doc[i];
    const std::string where = "spec " + std::to_string(i);
    const std::string name = get_string(entry, "name", where);
    const std::string kind = get_string(entry, "kind", where);
    if (kind != "hard" && kind != "soft") {
      throw FormatError(where + " ('" + name + "'): kind must be \"hard\" or \"soft\"");
    }
    const std::string text = get_string(entry, "formula", where);
    std::optional<stl::Formula> formula;
    try {
      formula = stl::parse_formula(text);
    } catch (const stl::ParseError& e) {
      throw FormatError(where + " ('" + name + "'): " + e.what());
    }
    SpecNode node{name, *formula, kind == "hard" ? SpecKind::Hard : SpecKind::Soft, {}};
    if (auto sq = entry.find("squash"); sq != entry.end()) {
      const std::string k = get_string(*sq, "kind", where + " squash");
      if (k == "tanh") {
        node.squash.kind = stl::Squash::Kind::Tanh;
      } else if (k != "identity") {
        throw FormatError(where + ": squash kind must be \"identity\" or \"tanh\"");
      }
      if (auto sc = sq->find("scale"); sc != sq->end()) {
        if (!sc->is_number()) throw FormatError(where + ": squash scale must be a number");
        node.squash.scale = sc->get<double>();
      }
    }
    if (auto deps = entry.find("depends_on"); deps != entry.end()) {
      if (!deps->is_array()) throw FormatError(where + ": depends_on must be a list of names");
      for (const json& d : *deps) {
        if (!d.is_string()) throw FormatError(where + ": depends_on must be a list of names");
        edges.push_back({d.get<std::string>(), node.name});
      }
    }
    nodes.push_back(std::move(node));
  }
  return SpecGraph::build(std::move(nodes), std::move(edges), temperature);
}

std::string specs_to_json(const SpecGraph& graph) {
  ordered doc = ordered::array();
  for (const SpecNode& n : graph.nodes()) {
    ordered entry;
    entry["name"] = n.name;
    entry["kind"] = std::string(to_string(n.kind));
    entry["formula"] = n.formula.to_string();
    ordered deps = ordered::array();
    for (const SpecEdge& e : graph.edges()) {
      if (e.to == n.name) deps.push_back(e.from);
    }
    entry["depends_on"] = deps;
    if (n.squash.kind == stl::Squash::Kind::Tanh) {
      entry["squash"] = {{"kind", "tanh"}, {"scale", n.squash.scale}};
    }
    doc.push_back(std::move(entry));
  }
  return dump(doc);
}

Trace parse_demo(const Environment& env, std::string_view json_text) {
  const json doc = parse_json(json_text, "demonstration");
  Trace demo;
  demo.env_id = get_string(doc, "env_id", "demonstration");
  check_env(env, demo.env_id, "demonstration");
  const json& steps = get_array(doc, "steps", "demonstration");
  if (steps.empty()) throw FormatError("demonstration has no steps");
  const auto* car = dynamic_cast<const MountainCarEnv*>(&env);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const std::string where = step_where(i);
    Step step;
    if (car != nullptr) {
      const long long p = get_int(steps[i], "bin_pos", where);
      const long long v = get_int(steps[i], "bin_vel", where);
      if (p < 0 || p >= car->bins_pos() || v < 0 || v >= car->bins_vel()) {
        throw FormatError(where + ": bin (" + std::to_string(p) + ", " + std::to_string(v) +
                          ") outside the " + std::to_string(car->bins_pos()) + "x" +
                          std::to_string(car->bins_vel()) + " partition");
      }
      step.state = car->state_of(static_cast<int>(p), static_cast<int>(v));
    } else {
      const long long x = get_int(steps[i], "x", where);
      const long long y = get_int(steps[i], "y", where);
      if (x < 0 || x >= env.cols() || y < 0 || y >= env.rows()) {
        throw FormatError(where + ": cell (x=" + std::to_string(x) + ", y=" + std::to_string(y) +
                          ") outside the " + std::to_string(env.rows()) + "x" +
                          std::to_string(env.cols()) + " grid");
      }
      step.state = env.state_at(static_cast<int>(y), static_cast<int>(x));
    }
    step.action = get_action(env, steps[i], where);
    demo.steps.push_back(step);
  }
  if (car == nullptr) {
    for (std::size_t i = 0; i + 1 < demo.steps.size(); ++i) {
      const Step& cur = demo.steps[i];
      const StateId next = demo.steps[i + 1].state;
      const int dr = std::abs(env.row_of(next) - env.row_of(cur.state));
      const int dc = std::abs(env.col_of(next) - env.col_of(cur.state));
      if (dr + dc > 1) {
        throw FormatError(step_where(i + 1) + ": cell is not adjacent to the previous one");
      }
      if (cur.action && env.step(cur.state, *cur.action) != next) {
        throw FormatError(step_where(i) + ": action " + env.action_name(*cur.action) +
                          " does not lead to the next cell");
      }
    }
  }
  validate_trace(env, demo);
  return demo;
}

std::string demo_to_json(const Environment& env, const Trace& demo) {
  const auto* car = dynamic_cast<const MountainCarEnv*>(&env);
  ordered doc;
  doc["env_id"] = env.id();
  ordered steps = ordered::array();
  for (const Step& s : demo.steps) {
    ordered step;
    if (car != nullptr) {
      step["bin_pos"] = car->pos_bin(s.state);
      step["bin_vel"] = car->vel_bin(s.state);
    } else {
      step["x"] = env.col_of(s.state);
      step["y"] = env.row_of(s.state);
    }
    step["action"] = action_json(env, s.action);
    steps.push_back(std::move(step));
  }
  doc["steps"] = std::move(steps);
  return dump(doc);
}

std::string reward_to_json(const RewardMap& reward) {
  ordered doc;
  doc["env_id"] = reward.env_id;
  ordered values = ordered::array();
  for (std::size_t s = 0; s < reward.values.size(); ++s) {
    values.push_back(ordered{{"state", s}, {"reward", reward.values[s]}});
  }
  doc["values"] = std::move(values);
  return dump(doc);
}

RewardMap parse_reward(const Environment& env, std::string_view json_text, bool allow_other_env) {
  const json doc = parse_json(json_text, "reward file");
  RewardMap out;
  out.env_id = get_string(doc, "env_id", "reward file");
  if (!allow_other_env) check_env(env, out.env_id, "reward file");
  out.values.assign(static_cast<std::size_t>(env.num_states()), 0.0);
  std::vector<char> seen(out.values.size(), 0);
  const json& values = get_array(doc, "values", "reward file");
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::string where = "reward entry " + std::to_string(i);
    const long long s = get_int(values[i], "state", where);
    const json& r = field(values[i], "reward", where);
    if (!r.is_number()) throw FormatError(where + ": reward must be a number");
    if (s < 0 || s >= env.num_states()) throw FormatError(where + ": state out of range");
    if (seen[static_cast<std::size_t>(s)]) throw FormatError(where + ": duplicate state");
    seen[static_cast<std::size_t>(s)] = 1;
    out.values[static_cast<std::size_t>(s)] = r.get<double>();
  }
  if (allow_other_env && values.size() != out.values.size()) {
    throw FormatError("reward file has " + std::to_string(values.size()) + " states, environment '" +
                      env.id() + "' has " + std::to_string(out.values.size()));
  }
  out.env_id = env.id();
  return out;
}

std::string reward_to_csv(const Environment& env, const RewardMap& reward) {
  std::string out;
  for (int r = 0; r < env.rows(); ++r) {
    for (int c = 0; c < env.cols(); ++c) {
      if (c > 0) out += ',';
      out += format_number(reward.at(env.state_at(r, c)));
    }
    out += '\n';
  }
  return out;
}

std::string policy_to_json(const Environment& env, const Trace& policy) {
  ordered doc;
  doc["env_id"] = env.id();
  doc["start"] = policy.steps.empty() ? 0 : policy.steps.front().state;
  ordered steps = ordered::array();
  for (const Step& s : policy.steps) {
    steps.push_back(ordered{{"state", s.state}, {"action", action_json(env, s.action)}});
  }
  doc["steps"] = std::move(steps);
  return dump(doc);
}

Trace parse_policy(const Environment& env, std::string_view json_text) {
  const json doc = parse_json(json_text, "policy file");
  Trace out;
  out.env_id = get_string(doc, "env_id", "policy file");
  check_env(env, out.env_id, "policy file");
  const long long start = get_int(doc, "start", "policy file");
  const json& steps = get_array(doc, "steps", "policy file");
  if (steps.empty()) throw FormatError("policy file has no steps");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const std::string where = step_where(i);
    const long long s = get_int(steps[i], "state", where);
    if (s < 0 || s >= env.num_states()) throw FormatError(where + ": state out of range");
    out.steps.push_back(Step{static_cast<StateId>(s), get_action(env, steps[i], where)});
  }
  if (out.steps.front().state != start) throw FormatError("policy file: first step is not the start state");
  validate_trace(env, out);
  return out;
}

std::string stats_to_csv(const std::vector<EpisodeRecord>& stats) {
  std::string out = "episode,steps,reward,termination\n";
  for (const auto& r : stats) {
    out += std::to_string(r.episode) + ',' + std::to_string(r.steps) + ',' + format_number(r.reward) +
           ',' + std::string(to_string(r.cause)) + '\n';
  }
  return out;
}

std::string rank_report_to_json(const SpecGraph& graph, const std::vector<DemoScore>& scores) {
  ordered doc;
  ordered specs = ordered::array();
  for (std::size_t i = 0; i < graph.size(); ++i) {
    specs.push_back(ordered{{"name", graph.node(i).name},
                            {"kind", std::string(to_string(graph.node(i).kind))},
                            {"weight", graph.weights()[i]}});
  }
  doc["specs"] = std::move(specs);
  ordered demos = ordered::array();
  for (const DemoScore& s : scores) {
    ordered d;
    d["id"] = s.demo_id;
    d["rob"] = s.rob;
    d["total"] = s.total;
    d["class"] = std::string(to_string(s.classification));
    d["rank"] = s.rank;
    d["bad_steps"] = s.bad_steps;
    demos.push_back(std::move(d));
  }
  doc["demos"] = std::move(demos);
  return dump(doc);
}

std::string candidates_to_json(const Environment& env, const SpecGraph& graph, const MultiGoalResult& result) {
  const auto goals = env.goals();
  ordered doc;
  doc["best"] = result.best_index;
  ordered list = ordered::array();
  for (const PolicyCandidate& c : result.candidates) {
    ordered order = ordered::array();
    for (StateId g : c.order) {
      order.push_back(std::find(goals.begin(), goals.end(), g) - goals.begin() + 1);
    }
    ordered rob = ordered::object();
    for (std::size_t i = 0; i < c.rob.size() && i < graph.size(); ++i) rob[graph.node(i).name] = c.rob[i];
    ordered entry;
    entry["order"] = std::move(order);
    entry["feasible"] = c.feasible;
    entry["soft_score"] = c.soft_score;
    entry["rob"] = std::move(rob);
    entry["length"] = c.policy.length() > 0 ? c.policy.length() - 1 : 0;
    entry["failure"] = c.failure;
    list.push_back(std::move(entry));
  }
  doc["candidates"] = std::move(list);
  return dump(doc);
}

}  // namespace stlfd::io
