#include <benchmark/benchmark.h>

#include "dsearch/gmm_model.hpp"
#include "dsearch/masked_model.hpp"
#include "dsearch/reward.hpp"
#include "dsearch/schedules.hpp"
#include "dsearch/search.hpp"
#include "dsearch/value.hpp"

namespace {

using namespace dsearch;

MaskedSequenceDiffusion motif_toy() {
  return MaskedSequenceDiffusion(FactorizedSeqPrior::random(32, 2, 2.0, 11), 16, 7);
}

GaussianMixtureDiffusion gmm_toy() {
  GmmPrior prior({{0.9, {0.0}, 0.05}, {0.1, {3.0}, 0.05}});
  return GaussianMixtureDiffusion(prior, NoiseSchedule::build(NoiseScheduleKind::kLinearBeta, 32));
}

SearchPlan plan_for(Algorithm a) {
  SearchPlan p;
  p.algorithm = a;
  switch (a) {
    case Algorithm::kDSearch:
      p.beams = {BeamKind::kExponential, 40, 4, 1.0};
      p.child_budget = 64;
      break;
    case Algorithm::kSvdd:
      p.beams = {BeamKind::kNone, 4, 4, 1.0};
      p.duplication = 10;
      break;
    case Algorithm::kSmc:
      p.beams = {BeamKind::kNone, 40, 40, 1.0};
      break;
    default:
      p.beams = {BeamKind::kNone, 4, 4, 1.0};
      p.best_of_n = 10;
      break;
  }
  return p;
}

void BM_MotifSearch(benchmark::State& state) {
  const auto model = motif_toy();
  MotifCountReward reward({0, 1});
  auto plan = plan_for(static_cast<Algorithm>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_search(plan, model, reward, seed++));
  state.SetLabel(std::string(to_string(plan.algorithm)));
}
BENCHMARK(BM_MotifSearch)
    ->Arg(static_cast<int>(Algorithm::kDSearch))
    ->Arg(static_cast<int>(Algorithm::kSvdd))
    ->Arg(static_cast<int>(Algorithm::kSmc))
    ->Arg(static_cast<int>(Algorithm::kBestOfN));

void BM_GmmSearch(benchmark::State& state) {
  const auto model = gmm_toy();
  NegSqDistReward reward({3.0});
  auto plan = plan_for(static_cast<Algorithm>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_search(plan, model, reward, seed++));
  state.SetLabel(std::string(to_string(plan.algorithm)));
}
BENCHMARK(BM_GmmSearch)->Arg(static_cast<int>(Algorithm::kDSearch))->Arg(static_cast<int>(Algorithm::kSvdd));

void BM_DSearchWorkers(benchmark::State& state) {
  const auto model = gmm_toy();
  NegSqDistReward reward({3.0});
  auto plan = plan_for(Algorithm::kDSearch);
  plan.estimator = {ValueMode::kLookahead, 4, 8, Pooling::kMax, 1.0};
  plan.workers = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_search(plan, model, reward, seed++));
}
BENCHMARK(BM_DSearchWorkers)->Arg(1)->Arg(4)->UseRealTime();

void BM_Lookahead(benchmark::State& state) {
  const auto model = motif_toy();
  MotifCountReward reward({0, 1});
  Rng rng(StreamKey{1, StreamPurpose::kTest, 0, 0, 0, 0});
  const auto x0 = run_search(plan_for(Algorithm::kNone), model, reward, 1).finals.front().state;
  const State x = model.forward_noise(x0, 12, rng);
  const ValueEstimatorSpec spec{ValueMode::kLookahead, static_cast<int>(state.range(0)), 16, Pooling::kMean, 1.0};
  CallCounters calls;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lookahead_value(x, 12, spec, model, reward, calls, StreamKey{2, StreamPurpose::kRollout, 12, 0, 0, 0}));
  }
}
BENCHMARK(BM_Lookahead)->Arg(1)->Arg(4)->Arg(12);

void BM_SearchSetCalibration(benchmark::State& state) {
  SearchSetSpec spec;
  spec.kind = SearchSetKind::kExponential;
  spec.budget_fraction = 0.65;
  for (auto _ : state) benchmark::DoNotOptimize(inclusion_probabilities(spec, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_SearchSetCalibration)->Arg(128)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
