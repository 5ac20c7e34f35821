#include "stlfd/kernels.hpp"

#include <exception>

namespace stlfd::kernels {
namespace {

void check_sizes(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ValidationError(std::string(what) + ": size mismatch (" + std::to_string(a) + " vs " +
                          std::to_string(b) + ")");
  }
}

std::string demo_id(const std::vector<std::string>& ids, std::size_t i) {
  return i < ids.size() ? ids[i] : "demo-" + std::to_string(i);
}

SeedOutcome train_one(const Environment& env, const SpecGraph& graph, const RewardMap& reward,
                      StateId start, const std::vector<StateId>& goal, TrainConfig cfg,
                      std::uint64_t seed, const stl::ParamMap& params) {
  SeedOutcome out;
  out.seed = seed;
  cfg.seed = seed;
  try {
    out.result = q_stl_train(env, graph, reward, start, goal, cfg, params);
  } catch (const Error& e) {
    out.failure = e.what();
  }
  return out;
}

// Runs body(i) for i in [0, n) in parallel and rethrows the first exception
// by index once the loop is done.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::vector<double> robustness_batch_serial(const std::vector<stl::Formula>& formulas,
                                            const std::vector<stl::Signal>& signals, std::size_t t,
                                            const stl::EvalOptions& opts) {
  check_sizes(formulas.size(), signals.size(), "robustness batch");
  std::vector<double> out(formulas.size());
  for (std::size_t i = 0; i < formulas.size(); ++i) {
    out[i] = stl::robustness(formulas[i], signals[i], t, opts).value;
  }
  return out;
}

std::vector<double> robustness_batch_omp(const std::vector<stl::Formula>& formulas,
                                         const std::vector<stl::Signal>& signals, std::size_t t,
                                         const stl::EvalOptions& opts) {
  check_sizes(formulas.size(), signals.size(), "robustness batch");
  std::vector<double> out(formulas.size());
  parallel_for(formulas.size(), [&](std::size_t i) {
    out[i] = stl::robustness(formulas[i], signals[i], t, opts).value;
  });
  return out;
}

std::vector<DemoScore> score_demos_serial(const SpecGraph& graph, const Environment& env,
                                          const std::vector<Trace>& demos,
                                          const FeatureSet& features, const stl::ParamMap& params,
                                          const std::vector<std::string>& demo_ids,
                                          const InferenceOptions& opts) {
  std::vector<DemoScore> out;
  out.reserve(demos.size());
  for (std::size_t i = 0; i < demos.size(); ++i) {
    out.push_back(score_demo(graph, env, demos[i], features, params, demo_id(demo_ids, i), opts));
  }
  return out;
}

std::vector<DemoScore> score_demos_omp(const SpecGraph& graph, const Environment& env,
                                       const std::vector<Trace>& demos, const FeatureSet& features,
                                       const stl::ParamMap& params,
                                       const std::vector<std::string>& demo_ids,
                                       const InferenceOptions& opts) {
  std::vector<DemoScore> out(demos.size());
  parallel_for(demos.size(), [&](std::size_t i) {
    out[i] = score_demo(graph, env, demos[i], features, params, demo_id(demo_ids, i), opts);
  });
  return out;
}

std::vector<SeedOutcome> train_seeds_serial(const Environment& env, const SpecGraph& graph,
                                            const RewardMap& reward, StateId start,
                                            const std::vector<StateId>& goal,
                                            const TrainConfig& cfg,
                                            const std::vector<std::uint64_t>& seeds,
                                            const stl::ParamMap& params) {
  std::vector<SeedOutcome> out;
  out.reserve(seeds.size());
  for (std::uint64_t seed : seeds) {
    out.push_back(train_one(env, graph, reward, start, goal, cfg, seed, params));
  }
  return out;
}

std::vector<SeedOutcome> train_seeds_omp(const Environment& env, const SpecGraph& graph,
                                         const RewardMap& reward, StateId start,
                                         const std::vector<StateId>& goal, const TrainConfig& cfg,
                                         const std::vector<std::uint64_t>& seeds,
                                         const stl::ParamMap& params) {
  std::vector<SeedOutcome> out(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) {
    out[i] = train_one(env, graph, reward, start, goal, cfg, seeds[i], params);
  });
  return out;
}

}  // namespace stlfd::kernels
