#include "stlfd/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stlfd/kernels.hpp"
#include "stlfd/stl/robustness.hpp"

namespace stlfd {

std::string_view to_string(DemoClass c) { return c == DemoClass::Good ? "good" : "bad"; }

double RewardMap::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

DemoScore score_demo(const SpecGraph& graph, const Environment& env, const Trace& demo,
                     const FeatureSet& features, const stl::ParamMap& params, std::string demo_id,
                     const InferenceOptions& opts) {
  validate_trace(env, demo);
  stl::ParamMap bound_params = params;
  bound_params["T"] = static_cast<double>(demo.length());
  const SpecGraph bound = graph.bind(bound_params);
  const stl::Signal signal = extract_signal(env, demo, features);
  const stl::EvalOptions eval{stl::WindowPolicy::Clip, opts.cap};

  DemoScore score;
  score.demo_id = std::move(demo_id);
  score.rob.resize(bound.size());
  std::vector<double> unsquashed(bound.size());
  for (std::size_t i = 0; i < bound.size(); ++i) {
    const auto& node = bound.node(i);
    unsquashed[i] = stl::robustness(node.formula, signal, 0, eval).value;
    score.rob[i] = node.squash.apply(unsquashed[i]);
    score.total += bound.weights()[i] * score.rob[i];
  }

  bool good = true;
  for (std::size_t i : bound.hard_indices()) {
    const double r = unsquashed[i];
    if (opts.strict_good_test ? !(r > 0.0) : r < 0.0) good = false;
  }
  score.classification = good ? DemoClass::Good : DemoClass::Bad;
  if (good) return score;

  // s_bad: samples where the body of a violated hard G-spec fails. Other
  // shapes cannot be localised, so the final state carries the blame.
  std::vector<char> bad(demo.length(), 0);
  for (std::size_t i : bound.hard_indices()) {
    const double r = unsquashed[i];
    const bool violated = opts.strict_good_test ? !(r > 0.0) : r < 0.0;
    if (!violated) continue;
    const auto& f = bound.node(i).formula;
    if (f.op() == stl::Op::Always) {
      const auto body = stl::robustness_trace(f.arg(), signal);
      const std::size_t lo = static_cast<std::size_t>(f.window().first());
      const std::size_t hi = std::min(static_cast<std::size_t>(f.window().last()), demo.length() - 1);
      bool marked = false;
      for (std::size_t t = lo; t <= hi; ++t) {
        if (opts.strict_good_test ? !(body[t] > 0.0) : body[t] < 0.0) {
          bad[t] = 1;
          marked = true;
        }
      }
      if (!marked) bad.back() = 1;
    } else {
      bad.back() = 1;
    }
  }
  for (std::size_t t = 0; t < bad.size(); ++t) {
    if (bad[t]) score.bad_steps.push_back(t);
  }
  return score;
}

std::vector<double> assign_demo_rewards(const DemoScore& score, const Trace& demo, int num_states) {
  std::vector<double> r(static_cast<std::size_t>(num_states), 0.0);
  if (score.classification == DemoClass::Good) {
    std::vector<char> touched(r.size(), 0);
    const double L = static_cast<double>(demo.length());
    for (std::size_t l = 1; l <= demo.length(); ++l) {
      const auto s = static_cast<std::size_t>(demo.steps[l - 1].state);
      const double v = static_cast<double>(l) / L * score.total;
      r[s] = touched[s] ? std::max(r[s], v) : v;
      touched[s] = 1;
    }
  } else {
    for (std::size_t t : score.bad_steps) {
      r[static_cast<std::size_t>(demo.steps[t].state)] = score.total;
    }
  }
  return r;
}

std::vector<DemoScore> rank_demos(std::vector<DemoScore> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const bool ga = scores[a].classification == DemoClass::Good;
    const bool gb = scores[b].classification == DemoClass::Good;
    if (ga != gb) return ga;
    return scores[a].total > scores[b].total;
  });
  const int m = static_cast<int>(scores.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    scores[order[pos]].rank = m - static_cast<int>(pos);
  }
  return scores;
}

InferenceResult infer_learner_reward(const SpecGraph& graph, const Environment& env,
                                     const std::vector<Trace>& demos, const FeatureSet& features,
                                     const stl::ParamMap& params,
                                     const std::vector<std::string>& demo_ids,
                                     const InferenceOptions& opts) {
  if (demos.empty()) throw ValidationError("reward inference needs at least one demonstration");
  InferenceResult out;
  out.scores = rank_demos(kernels::score_demos_omp(graph, env, demos, features, params, demo_ids, opts));
  out.reward.env_id = env.id();
  out.reward.values.assign(static_cast<std::size_t>(env.num_states()), 0.0);
  for (std::size_t j = 0; j < demos.size(); ++j) {
    const auto per_demo = assign_demo_rewards(out.scores[j], demos[j], env.num_states());
    for (std::size_t s = 0; s < per_demo.size(); ++s) {
      out.reward.values[s] += out.scores[j].rank * per_demo[s];
    }
  }
  const double scale = out.reward.max_abs();
  if (scale > 0.0) {
    for (double& v : out.reward.values) v /= scale;
  }
  return out;
}

}  // namespace stlfd
