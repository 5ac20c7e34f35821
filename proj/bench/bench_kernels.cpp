#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "stlfd/io.hpp"
#include "stlfd/kernels.hpp"
#include "stlfd/stl/parser.hpp"

using namespace stlfd;

namespace {

std::string data(const std::string& rel) { return std::string(STLFD_DATA_DIR) + "/" + rel; }

SpecGraph load_specs(const std::string& name) { return io::parse_specs(io::read_text(data("specs/" + name + ".json"))); }

std::vector<Trace> load_demos(const Environment& env, const std::vector<std::string>& names) {
  std::vector<Trace> out;
  for (const auto& n : names) out.push_back(io::parse_demo(env, io::read_text(data("demos/" + n + ".json"))));
  return out;
}

struct Batch {
  std::vector<stl::Formula> formulas;
  std::vector<stl::Signal> signals;
};

Batch make_batch(std::size_t n, std::size_t length) {
  const std::vector<std::string> texts = {
      "G[0,40](x >= -3)", "F[5,60](y > 2 and x < 0)", "G[0,20](F[0,10](x > 1))",
      "x > 0 U[2,30] y < -1", "G[0,50](x > 0 -> F[0,5](y > 0))"};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  Batch b;
  for (std::size_t i = 0; i < n; ++i) {
    b.formulas.push_back(stl::parse_formula(texts[i % texts.size()]));
    stl::Signal s;
    for (const char* ch : {"x", "y"}) {
      std::vector<double> xs(length);
      for (double& v : xs) v = u(rng);
      s.add_channel(ch, std::move(xs));
    }
    b.signals.push_back(std::move(s));
  }
  return b;
}

template <auto Fn>
void BM_robustness_batch(benchmark::State& state) {
  const Batch b = make_batch(static_cast<std::size_t>(state.range(0)), 128);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(b.formulas, b.signals, 0, stl::EvalOptions{}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Fn>
void BM_score_demos(benchmark::State& state) {
  const auto env = make_environment("frozenlake8");
  const auto graph = load_specs("single_goal");
  const std::vector<std::string> names = {"frozenlake8_good_1", "frozenlake8_good_2", "frozenlake8_good_3",
                                          "frozenlake8_good_4", "frozenlake8_bad", "frozenlake8_incomplete"};
  std::vector<Trace> demos;
  const auto base = load_demos(*env, names);
  for (int i = 0; i < state.range(0); ++i) demos.push_back(base[static_cast<std::size_t>(i) % base.size()]);
  const auto features = standard_features(*env);
  const auto params = task_parameters(*env);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(graph, *env, demos, features, params, {}, InferenceOptions{}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Fn>
void BM_train_seeds(benchmark::State& state) {
  const auto env = make_environment("grid7");
  const auto graph = load_specs("single_goal");
  const std::vector<std::string> names = {"grid7_good_1", "grid7_good_2", "grid7_bad"};
  const auto params = task_parameters(*env);
  const auto reward =
      infer_learner_reward(graph, *env, load_demos(*env, names), standard_features(*env), params, names).reward;
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < state.range(0); ++i) seeds.push_back(static_cast<std::uint64_t>(i + 1));
  const TrainConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Fn(*env, graph, reward, env->start(), env->goals(), cfg, seeds, params));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_robustness_batch<kernels::robustness_batch_serial>)->Name("robustness_batch/serial")->Arg(256)->Arg(2048);
BENCHMARK(BM_robustness_batch<kernels::robustness_batch_omp>)->Name("robustness_batch/omp")->Arg(256)->Arg(2048);
BENCHMARK(BM_score_demos<kernels::score_demos_serial>)->Name("score_demos/serial")->Arg(6)->Arg(96);
BENCHMARK(BM_score_demos<kernels::score_demos_omp>)->Name("score_demos/omp")->Arg(6)->Arg(96);
BENCHMARK(BM_train_seeds<kernels::train_seeds_serial>)->Name("train_seeds/serial")->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_train_seeds<kernels::train_seeds_omp>)->Name("train_seeds/omp")->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
