#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "dsearch/error.hpp"
#include "dsearch/harness.hpp"
#include "dsearch/search.hpp"
#include "support.hpp"

using namespace dsearch;
using dsearch::testing::median_of;
using dsearch::testing::same_finals;

namespace {

std::vector<BeamNode> nodes_with(std::initializer_list<double> values) {
  std::vector<BeamNode> out;
  int j = 0;
  for (double v : values) {
    BeamNode n;
    n.value = v;
    n.parent = j++;
    out.push_back(n);
  }
  return out;
}

SearchPlan base_plan(Algorithm a) {
  SearchPlan p;
  p.algorithm = a;
  p.estimator.mode = ValueMode::kOneStep;
  return p;
}

SearchPlan dsearch_plan() {
  auto p = base_plan(Algorithm::kDSearch);
  p.beams = {BeamKind::kExponential, 8, 2, 1.0};
  p.child_budget = 16;
  return p;
}

const MotifCountReward& motif() {
  static const MotifCountReward r({0, 1});
  return r;
}

}  // namespace

TEST_CASE("greedy_select examples") {
  CHECK(greedy_select(nodes_with({7.0})) == 0);
  CHECK(greedy_select(nodes_with({1.0, 3.0, 2.0})) == 1);
  CHECK(greedy_select(nodes_with({2.0, 2.0, 2.0})) == 0);
  CHECK_THROWS_AS(greedy_select(std::vector<BeamNode>{}), Error);
}

TEST_CASE("selection_top_b examples") {
  const auto n = nodes_with({5.0, 1.0, 4.0, 2.0});
  CHECK(selection_top_b(n, 4) == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(selection_top_b(n, 2) == std::vector<std::size_t>{0, 2});
  CHECK(selection_top_b(nodes_with({3.0, 1.0, 3.0, 3.0}), 2) == std::vector<std::size_t>{0, 2});
  try {
    selection_top_b(n, 5);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidConfiguration);
  }
}

TEST_CASE("dsearch-r replacement rule") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto d = plan_replacements(v, 0.25, false);
  CHECK(d.dropped == std::vector<std::size_t>{0});
  CHECK(d.retained == std::vector<std::size_t>{1, 2, 3});
  const double z = std::exp(2.0 / 4) + std::exp(3.0 / 4) + std::exp(4.0 / 4);
  CHECK(d.weights[0] == doctest::Approx(std::exp(0.5) / z).epsilon(1e-14));
  CHECK(d.weights[1] == doctest::Approx(std::exp(0.75) / z).epsilon(1e-14));
  CHECK(d.weights[2] == doctest::Approx(std::exp(1.0) / z).epsilon(1e-14));

  CHECK(plan_replacements(v, 0.0, false).dropped.empty());
  const auto zeros = replacement_weights(std::vector<double>{0.0, 0.0});
  CHECK(zeros[0] == 0.5);

  SUBCASE("empirical pick frequencies over 1e4 events") {
    const std::vector<double> kept{2.0, 3.0, 4.0};
    const auto w = replacement_weights(kept);
    std::vector<int> hits(3, 0);
    const int n = 10'000;
    for (int e = 0; e < n; ++e) {
      Rng rng(StreamKey{5, StreamPurpose::kResample, e, 0, 0, 0});
      ++hits[rng.categorical(w)];
    }
    const double total = std::exp(0.5) + std::exp(0.75) + std::exp(1.0);
    for (std::size_t i = 0; i < 3; ++i) {
      const double p = std::exp(kept[i] / 4.0) / total;
      CHECK(std::abs(hits[i] / double(n) - p) <= 4.0 * std::sqrt(p * (1 - p) / n));
    }
  }
}

TEST_CASE("reduction equivalences are bit-exact") {
  const auto model = testing::seq_toy();
  SUBCASE("dsearch with fixed beams and full search is svdd") {
    auto d = base_plan(Algorithm::kDSearch);
    d.beams = {BeamKind::kNone, 4, 4, 1.0};
    d.child_budget = 12;
    auto s = base_plan(Algorithm::kSvdd);
    s.beams = d.beams;
    s.duplication = 3;
    for (std::uint64_t seed = 0; seed < 3; ++seed) CHECK(same_finals(run_dsearch(d, model, motif(), seed), run_svdd(s, model, motif(), seed)));
  }
  SUBCASE("dsearch with unit width is best-of-n") {
    auto d = base_plan(Algorithm::kDSearch);
    d.beams = {BeamKind::kNone, 8, 2, 1.0};
    d.child_budget = 8;
    auto b = base_plan(Algorithm::kBestOfN);
    b.beams = {BeamKind::kNone, 2, 2, 1.0};
    b.best_of_n = 4;
    for (std::uint64_t seed = 0; seed < 3; ++seed) CHECK(same_finals(run_dsearch(d, model, motif(), seed), run_best_of_n(b, model, motif(), seed)));
  }
  SUBCASE("dsearch-r without drops is svdd") {
    auto r = base_plan(Algorithm::kDSearchR);
    r.beams = {BeamKind::kNone, 4, 4, 1.0};
    r.child_budget = 12;
    r.resample_rate = 0.0;
    auto s = base_plan(Algorithm::kSvdd);
    s.beams = r.beams;
    s.duplication = 3;
    for (std::uint64_t seed = 0; seed < 3; ++seed) CHECK(same_finals(run_dsearch_r(r, model, motif(), seed), run_svdd(s, model, motif(), seed)));
  }
  SUBCASE("svdd with w = 1 is unguided") {
    auto s = base_plan(Algorithm::kSvdd);
    s.beams = {BeamKind::kNone, 3, 3, 1.0};
    auto u = base_plan(Algorithm::kNone);
    u.beams = s.beams;
    for (std::uint64_t seed = 0; seed < 3; ++seed) CHECK(same_finals(run_svdd(s, model, motif(), seed), run_unguided(u, model, motif(), seed)));
  }
  SUBCASE("single-particle smc is unguided") {
    auto s = base_plan(Algorithm::kSmc);
    s.beams = {BeamKind::kNone, 1, 1, 1.0};
    auto u = base_plan(Algorithm::kNone);
    u.beams = s.beams;
    for (std::uint64_t seed = 0; seed < 3; ++seed) CHECK(same_finals(run_smc(s, model, motif(), seed), run_unguided(u, model, motif(), seed)));
  }
  SUBCASE("best-of-n with N = 1 is unguided") {
    auto b = base_plan(Algorithm::kBestOfN);
    b.beams = {BeamKind::kNone, 3, 3, 1.0};
    auto u = base_plan(Algorithm::kNone);
    u.beams = b.beams;
    for (std::uint64_t seed = 0; seed < 3; ++seed) CHECK(same_finals(run_best_of_n(b, model, motif(), seed), run_unguided(u, model, motif(), seed)));
  }
}

TEST_CASE("dsearch-r rejects dropping every beam") {
  auto r = base_plan(Algorithm::kDSearchR);
  r.beams = {BeamKind::kNone, 4, 4, 1.0};
  r.child_budget = 8;
  r.resample_rate = 1.0;
  CHECK_THROWS_AS(r.validate(), Error);
  r.resample_rate = 0.9;  // ceil(3.6) = 4
  CHECK_THROWS_AS(r.validate(), Error);
  r.resample_rate = 0.5;
  CHECK_NOTHROW(r.validate());
}

TEST_CASE("svdd beams keep their lineage") {
  const auto model = testing::seq_toy();
  auto s = base_plan(Algorithm::kSvdd);
  s.beams = {BeamKind::kNone, 5, 5, 1.0};
  s.duplication = 4;
  const auto rep = run_svdd(s, model, motif(), 3);
  for (const auto& rec : rep.lineage) CHECK(rec.lineage == rec.beam);
  for (const auto& st : rep.steps) CHECK(st.unique_lineages == 5);
}

TEST_CASE("smc examples") {
  const auto model = testing::seq_toy();
  auto s = base_plan(Algorithm::kSmc);
  s.beams = {BeamKind::kNone, 16, 16, 1.0};
  s.estimator.alpha = 0.1;
  SUBCASE("unique lineage count never grows") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto rep = run_smc(s, model, motif(), seed);
      int prev = 16;
      for (const auto& st : rep.steps) {
        CHECK(st.unique_lineages <= prev);
        prev = st.unique_lineages;
      }
    }
  }
  SUBCASE("huge temperature gives an unweighted bootstrap") {
    // With uniform weights the resampling draw does not depend on the values,
    // so any reward with the same stream keys gives the same genealogy.
    s.estimator.alpha = 1e9;
    FunctionReward scaled("scaled", [](const State& x) { return 1e-3 * motif().evaluate(x); });
    const auto a = run_smc(s, model, motif(), 4);
    const auto b = run_smc(s, model, scaled, 4);
    REQUIRE(a.lineage.size() == b.lineage.size());
    for (std::size_t i = 0; i < a.lineage.size(); ++i) {
      CHECK(a.lineage[i].lineage == b.lineage[i].lineage);
      CHECK(a.lineage[i].parent == b.lineage[i].parent);
    }
  }
}

TEST_CASE("best-of-n returns the top block of the drawn set") {
  const auto model = testing::seq_toy();
  auto b = base_plan(Algorithm::kBestOfN);
  b.beams = {BeamKind::kNone, 3, 3, 1.0};
  b.best_of_n = 5;
  auto u = base_plan(Algorithm::kNone);
  u.beams = {BeamKind::kNone, 15, 15, 1.0};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto top = run_best_of_n(b, model, motif(), seed).rewards();
    auto all = run_unguided(u, model, motif(), seed).rewards();
    std::sort(all.rbegin(), all.rend());
    REQUIRE(top.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(top[i] == all[i]);
  }
}

TEST_CASE("dsearch structural invariants") {
  const auto model = testing::seq_toy();
  auto p = dsearch_plan();
  p.search_set.kind = SearchSetKind::kExponential;
  p.search_set.budget_fraction = 0.75;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto rep = run_dsearch(p, model, motif(), seed);
    CAPTURE(seed);
    {
      std::map<int, std::set<int>> parents, lineages;
      for (const auto& rec : rep.lineage) {
        if (rec.parent >= 0) CHECK(parents[rec.t].insert(rec.parent).second);
        CHECK(lineages[rec.t].insert(rec.lineage).second);
      }
      std::set<int> final_lineages;
      for (int l : rep.lineages()) CHECK(final_lineages.insert(l).second);
      CHECK(rep.finals.size() == 2);
    }
    {
      CHECK(rep.ledger.denoiser_calls == predicted_denoiser_calls(rep.steps));
      std::int64_t manual = 0;
      for (const auto& st : rep.steps) {
        manual += st.searched ? st.beams * st.width : st.beams;
        if (st.searched) {
          CHECK(st.beams * st.width <= p.child_budget);
          if (p.child_budget % st.beams == 0) CHECK(st.beams * st.width == p.child_budget);
        }
      }
      CHECK(rep.ledger.denoiser_calls == manual);
      const auto predicted = predict_schedule(p, 12, seed);
      REQUIRE(predicted.size() == rep.steps.size());
      for (std::size_t i = 0; i < predicted.size(); ++i) {
        CHECK(predicted[i].beams == rep.steps[i].beams);
        CHECK(predicted[i].width == rep.steps[i].width);
        CHECK(predicted[i].searched == rep.steps[i].searched);
        CHECK(predicted[i].next_beams == rep.steps[i].next_beams);
      }
      CHECK(rep.ledger.c_bar_formula == doctest::Approx(effective_budget(rep.search_set.size(), 16, 12)));
    }
  }
}

TEST_CASE("runs are independent of worker count") {
  const auto model = testing::seq_toy();
  const auto gmm = testing::gmm_toy();
  NegSqDistReward near({1.5, -0.5});
  std::vector<SearchPlan> plans{dsearch_plan()};
  plans.back().estimator = {ValueMode::kLookahead, 2, 3, Pooling::kMax, 1.0};
  auto r = base_plan(Algorithm::kDSearchR);
  r.beams = {BeamKind::kNone, 6, 6, 1.0};
  r.child_budget = 18;
  plans.push_back(r);
  auto smc = base_plan(Algorithm::kSmc);
  smc.beams = {BeamKind::kNone, 8, 8, 1.0};
  plans.push_back(smc);
  for (auto p : plans) {
    CAPTURE(to_string(p.algorithm));
    p.workers = 1;
    const auto a = run_search(p, model, motif(), 7);
    const auto g1 = run_search(p, gmm, near, 7);
    p.workers = 8;
    const auto b = run_search(p, model, motif(), 7);
    const auto g8 = run_search(p, gmm, near, 7);
    CHECK(same_finals(a, b));
    CHECK(same_finals(g1, g8));
    CHECK(a.ledger.denoiser_calls == b.ledger.denoiser_calls);
    CHECK(a.ledger.reward_calls == b.ledger.reward_calls);
  }
}

TEST_CASE("oracle failures report the node") {
  const auto model = testing::seq_toy();
  FunctionReward broken("broken", [](const State&) -> double { throw std::runtime_error("no"); });
  try {
    run_dsearch(dsearch_plan(), model, broken, 0);
    FAIL("expected oracle failure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kOracleFailure);
    CHECK(std::string(e.what()).find("t=") != std::string::npos);
  }
}

TEST_CASE("paired-seed experiments on the sequence toy") {
  const auto model = testing::seq_toy();

  SUBCASE("dsearch median is at least best-of-n at matched budget") {
    const auto d = dsearch_plan();
    std::vector<double> dm, bm;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto rd = run_dsearch(d, model, motif(), seed);
      const double c_bar = rd.ledger.c_bar_per_output;
      const auto b = matched_plan(d, Algorithm::kBestOfN, c_bar, 12, seed);
      dm.push_back(median_of(rd.rewards()));
      bm.push_back(median_of(run_best_of_n(b, model, motif(), seed).rewards()));
    }
    CHECK(median_of(dm) >= median_of(bm));
  }
  SUBCASE("svdd median is non-decreasing in duplication") {
    auto s = base_plan(Algorithm::kSvdd);
    s.beams = {BeamKind::kNone, 4, 4, 1.0};
    double prev = -1e300;
    for (int w : {1, 2, 4, 8}) {
      s.duplication = w;
      std::vector<double> med;
      for (std::uint64_t seed = 0; seed < 20; ++seed) med.push_back(median_of(run_svdd(s, model, motif(), seed).rewards()));
      CAPTURE(w);
      CHECK(median_of(med) >= prev);
      prev = median_of(med);
    }
  }
  SUBCASE("best-of-n median is non-decreasing in N") {
    auto b = base_plan(Algorithm::kBestOfN);
    b.beams = {BeamKind::kNone, 4, 4, 1.0};
    double prev = -1e300;
    for (int n : {1, 2, 4, 8}) {
      b.best_of_n = n;
      std::vector<double> med;
      for (std::uint64_t seed = 0; seed < 20; ++seed) med.push_back(median_of(run_best_of_n(b, model, motif(), seed).rewards()));
      CAPTURE(n);
      CHECK(median_of(med) >= prev);
      prev = median_of(med);
    }
  }
}
