#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stlfd/inference.hpp"
#include "stlfd/qstl.hpp"
#include "stlfd/stl/robustness.hpp"

// Batch kernels in two flavours: a plain loop kept as the reference and an
// OpenMP loop. Both return results in input order and must agree exactly.
namespace stlfd::kernels {

// out[i] = robustness(formulas[i], signals[i], t).value
std::vector<double> robustness_batch_serial(const std::vector<stl::Formula>& formulas,
                                            const std::vector<stl::Signal>& signals,
                                            std::size_t t = 0, const stl::EvalOptions& opts = {});
std::vector<double> robustness_batch_omp(const std::vector<stl::Formula>& formulas,
                                         const std::vector<stl::Signal>& signals,
                                         std::size_t t = 0, const stl::EvalOptions& opts = {});

// score_demo over every demonstration; ids default to demo-<index>.
std::vector<DemoScore> score_demos_serial(const SpecGraph& graph, const Environment& env,
                                          const std::vector<Trace>& demos,
                                          const FeatureSet& features, const stl::ParamMap& params,
                                          const std::vector<std::string>& demo_ids = {},
                                          const InferenceOptions& opts = {});
std::vector<DemoScore> score_demos_omp(const SpecGraph& graph, const Environment& env,
                                       const std::vector<Trace>& demos, const FeatureSet& features,
                                       const stl::ParamMap& params,
                                       const std::vector<std::string>& demo_ids = {},
                                       const InferenceOptions& opts = {});

struct SeedOutcome {
  std::uint64_t seed = 0;
  std::optional<TrainResult> result;
  std::string failure;  // set when training threw
};

// q_stl_train once per seed (cfg.seed is replaced).
std::vector<SeedOutcome> train_seeds_serial(const Environment& env, const SpecGraph& graph,
                                            const RewardMap& reward, StateId start,
                                            const std::vector<StateId>& goal,
                                            const TrainConfig& cfg,
                                            const std::vector<std::uint64_t>& seeds,
                                            const stl::ParamMap& params = {});
std::vector<SeedOutcome> train_seeds_omp(const Environment& env, const SpecGraph& graph,
                                         const RewardMap& reward, StateId start,
                                         const std::vector<StateId>& goal, const TrainConfig& cfg,
                                         const std::vector<std::uint64_t>& seeds,
                                         const stl::ParamMap& params = {});

}  // namespace stlfd::kernels
