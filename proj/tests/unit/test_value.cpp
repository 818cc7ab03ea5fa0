#include <doctest.h>

#include <cmath>

#include "dsearch/error.hpp"
#include "dsearch/value.hpp"
#include "support.hpp"

using namespace dsearch;

namespace {

StreamKey key(std::int64_t t, std::int64_t beam = 0) { return StreamKey{99, StreamPurpose::kRollout, t, beam, 0, 0}; }

// x_t of the sequence toy at time t, obtained by forward-masking a prior draw.
TokenSeq probe_state(const MaskedSequenceDiffusion& model, int t, std::uint64_t seed) {
  Rng rng(StreamKey{seed, StreamPurpose::kTest, t, 0, 0, 0});
  std::vector<int> x0;
  for (int l = 0; l < model.prior().length(); ++l) {
    x0.push_back(static_cast<int>(rng.categorical(model.prior().probs(l))));
  }
  return std::get<TokenSeq>(model.forward_noise(TokenSeq{x0, 0}, t, rng));
}

}  // namespace

TEST_CASE("one_step_value examples") {
  SUBCASE("fully denoised sequence scores itself") {
    MaskedSequenceDiffusion model(FactorizedSeqPrior::uniform(4, 4), 8, 2);
    MotifCountReward r({0, 1});
    CallCounters c;
    const State x{TokenSeq{{0, 1, 0, 1}, 1}};
    CHECK(one_step_value(x, 1, model, r, c) == r.evaluate(x));
    CHECK(one_step_value(x, 1, model, r, c) == 2.0);
  }
  SUBCASE("gmm composition") {
    const auto model = testing::gmm_toy(12);
    NegSqDistReward r({1.0, -1.0});
    CallCounters c;
    const ContinuousVec x{{0.3, 0.9}};
    const auto x0 = gmm_predict_x0(x, 5, model.prior(), model.schedule());
    const double expect = -((x0.values[0] - 1.0) * (x0.values[0] - 1.0) + (x0.values[1] + 1.0) * (x0.values[1] + 1.0));
    CHECK(one_step_value(x, 5, model, r, c) == doctest::Approx(expect).epsilon(1e-14));
  }
  SUBCASE("one reward call per invocation") {
    const auto model = testing::seq_toy();
    MotifCountReward r({0, 1});
    CallCounters c;
    const auto x = probe_state(model, 6, 1);
    for (int i = 1; i <= 5; ++i) {
      one_step_value(x, 6, model, r, c);
      CHECK(c.reward_calls.load() == i);
    }
  }
  SUBCASE("oracle failures carry node context") {
    const auto model = testing::seq_toy();
    FunctionReward r("boom", [](const State&) -> double { throw std::runtime_error("oracle down"); });
    CallCounters c;
    try {
      one_step_value(probe_state(model, 4, 1), 4, model, r, c);
      FAIL("expected oracle failure");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kOracleFailure);
      CHECK(std::string(e.what()).find("t=4") != std::string::npos);
    }
  }
  SUBCASE("incomplete states never reach the oracle") {
    MotifCountReward r({0});
    CallCounters c;
    CHECK_THROWS_AS(evaluate_reward(r, TokenSeq{{0, kMaskToken}, 1}, c), Error);
    CHECK(c.reward_calls.load() == 0);
  }
}

TEST_CASE("lookahead_value examples") {
  const auto model = testing::seq_toy(12);
  MotifCountReward r({0, 1});

  SUBCASE("K = t, M = 1 scores one full completion") {
    const int t = 7;
    const auto x = probe_state(model, t, 3);
    CallCounters c;
    const double v = lookahead_value(x, t, {ValueMode::kLookahead, t, 1, Pooling::kMean, 1.0}, model, r, c, key(t));
    Rng rng(key(t).with_sub(0));
    State y = x;
    for (int s = t; s >= 1; --s) y = model.reverse_children(y, s, std::span<Rng>(&rng, 1)).front();
    CHECK(!has_mask(std::get<TokenSeq>(y)));
    CHECK(v == r.evaluate(y));
  }
  SUBCASE("M = 1e4 converges to the enumeration oracle") {
    const int t = 9;
    const auto x = probe_state(model, t, 4);
    CallCounters c;
    const int m = 10'000;
    const auto samples = lookahead_rewards(x, t, t, m, model, r, c, key(t));
    double mean = 0.0, sq = 0.0;
    for (double s : samples) mean += s / m;
    for (double s : samples) sq += (s - mean) * (s - mean) / (m - 1);
    const double exact = oracle_conditional_mean_reward(x, model.prior(), r);
    CHECK(std::abs(mean - exact) <= 4.0 * std::sqrt(sq / m));
  }
  SUBCASE("single sample: max pooling equals mean pooling") {
    const auto x = probe_state(model, 5, 5);
    CallCounters c;
    const double a = lookahead_value(x, 5, {ValueMode::kLookahead, 2, 1, Pooling::kMax, 1.0}, model, r, c, key(5));
    const double b = lookahead_value(x, 5, {ValueMode::kLookahead, 2, 1, Pooling::kMean, 1.0}, model, r, c, key(5));
    CHECK(a == b);
  }
  SUBCASE("K > t is a configuration error") {
    CallCounters c;
    try {
      lookahead_value(probe_state(model, 3, 1), 3, {ValueMode::kLookahead, 4, 2, Pooling::kMean, 1.0}, model, r, c, key(3));
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kInvalidConfiguration);
    }
  }
  SUBCASE("call accounting") {
    const int t = 8, k = 3, m = 7;
    CallCounters c;
    lookahead_value(probe_state(model, t, 6), t, {ValueMode::kLookahead, k, m, Pooling::kMax, 1.0}, model, r, c, key(t));
    CHECK(c.reward_calls.load() == m);
    CHECK(c.lookahead_calls.load() == m * k);
  }
  SUBCASE("pooling dominance over fixed rollouts") {
    for (int seed = 0; seed < 20; ++seed) {
      const auto x = probe_state(model, 10, static_cast<std::uint64_t>(seed));
      CallCounters c;
      const auto s = lookahead_rewards(x, 10, 4, 8, model, r, c, key(10, seed));
      CHECK(pool(s, Pooling::kMax) >= pool(s, Pooling::kMean));
    }
  }
  SUBCASE("K = 0 is the one-step heuristic, bit for bit") {
    for (int t = 1; t <= 12; ++t) {
      const auto x = probe_state(model, t, 7);
      CallCounters c;
      const double a = lookahead_value(x, t, {ValueMode::kLookahead, 0, 5, Pooling::kMean, 1.0}, model, r, c, key(t));
      const double b = one_step_value(x, t, model, r, c);
      CHECK(a == b);
    }
  }
  SUBCASE("rollout m does not depend on M") {
    const auto x = probe_state(model, 10, 8);
    CallCounters c;
    const auto all = lookahead_rewards(x, 10, 5, 6, model, r, c, key(10));
    const auto few = lookahead_rewards(x, 10, 5, 3, model, r, c, key(10));
    for (std::size_t s = 0; s < few.size(); ++s) CHECK(few[s] == all[s]);
  }
}

TEST_CASE("oracle_conditional_mean_reward examples") {
  MotifCountReward motif({0, 1});
  const auto prior = FactorizedSeqPrior::uniform(4, 4);
  CHECK(oracle_conditional_mean_reward(TokenSeq{{0, 1, 0, 1}, 0}, prior, motif) == 2.0);

  FunctionReward first_is_zero("first-zero", [](const State& s) { return std::get<TokenSeq>(s).tokens[0] == 0 ? 1.0 : 0.0; });
  CHECK(oracle_conditional_mean_reward(TokenSeq{{kMaskToken, 2, 3, 1}, 1}, prior, first_is_zero) ==
        doctest::Approx(0.25).epsilon(1e-15));

  SUBCASE("count of symbol 0 with two masked positions") {
    const auto skew = FactorizedSeqPrior::random(4, 4, 1.0, 5);
    FunctionReward zeros("zeros", [](const State& s) {
      const auto& t = std::get<TokenSeq>(s).tokens;
      return static_cast<double>(std::count(t.begin(), t.end(), 0));
    });
    const TokenSeq x{{0, kMaskToken, 2, kMaskToken}, 2};
    const double exact = oracle_conditional_mean_reward(x, skew, zeros);
    // Linearity: revealed zeros plus the masked positions' zero probabilities.
    CHECK(exact == doctest::Approx(1.0 + skew.probs(1)[0] + skew.probs(3)[0]).epsilon(1e-12));
    Rng rng(StreamKey{3, StreamPurpose::kTest, 0, 0, 0, 0});
    const int n = 100'000;
    double mean = 0.0, sq = 0.0;
    std::vector<double> draws(n);
    for (int i = 0; i < n; ++i) {
      TokenSeq y = x;
      y.tokens[1] = static_cast<int>(rng.categorical(skew.probs(1)));
      y.tokens[3] = static_cast<int>(rng.categorical(skew.probs(3)));
      draws[i] = zeros.evaluate(y);
      mean += draws[i] / n;
    }
    for (double d : draws) sq += (d - mean) * (d - mean) / (n - 1);
    CHECK(std::abs(mean - exact) <= 4.0 * std::sqrt(sq / n));
  }
  SUBCASE("refuses more than 12 masked positions") {
    const auto wide = FactorizedSeqPrior::uniform(13, 2);
    CHECK_THROWS_AS(oracle_conditional_mean_reward(TokenSeq{std::vector<int>(13, kMaskToken), 1}, wide, motif), Error);
    CHECK_THROWS_AS(oracle_soft_value(TokenSeq{std::vector<int>(13, kMaskToken), 1}, wide, motif, 1.0), Error);
  }
}

TEST_CASE("oracle_soft_value limits") {
  const auto model = testing::seq_toy(12);
  MotifCountReward r({0, 1});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto x = probe_state(model, 8, seed);
    const double mean = oracle_conditional_mean_reward(x, model.prior(), r);
    const double best = oracle_max_reward(x, model.prior(), r);
    CHECK(std::abs(oracle_soft_value(x, model.prior(), r, 1e6) - mean) <= 1e-4);
    CHECK(std::abs(oracle_soft_value(x, model.prior(), r, 1e-6) - best) <= 1e-3);
  }
  FunctionReward constant("constant", [](const State&) { return 2.5; });
  const auto x = probe_state(model, 12, 1);
  for (double a : {1e-6, 0.1, 1.0, 1e6}) CHECK(oracle_soft_value(x, model.prior(), constant, a) == doctest::Approx(2.5).epsilon(1e-9));
  CHECK_THROWS_AS(oracle_soft_value(x, model.prior(), r, 0.0), Error);
  CHECK_THROWS_AS(oracle_soft_value(x, model.prior(), r, -1.0), Error);
}

TEST_CASE("estimator spec validation and parsing") {
  CHECK_THROWS_AS((ValueEstimatorSpec{ValueMode::kLookahead, 2, 0, Pooling::kMean, 1.0}.validate()), Error);
  CHECK_THROWS_AS((ValueEstimatorSpec{ValueMode::kLookahead, -1, 1, Pooling::kMean, 1.0}.validate()), Error);
  CHECK(parse_pooling("mean") == Pooling::kMean);
  CHECK(parse_value_mode("lookahead") == ValueMode::kLookahead);
  CHECK_THROWS_AS(parse_pooling("median"), Error);
  CHECK(ValueEstimatorSpec{}.pooling == Pooling::kMax);
}

TEST_CASE("built-in reward oracles") {
  CHECK(make_reward_oracle("motif-count:01")->evaluate(TokenSeq{{0, 1, 0, 1, 1}, 0}) == 2.0);
  CHECK(make_reward_oracle("motif-count:00")->evaluate(TokenSeq{{0, 0, 0}, 0}) == 2.0);
  CHECK(make_reward_oracle("motif-count:ACG")->evaluate(TokenSeq{{0, 1, 2, 0, 1, 2}, 0}) == 2.0);
  CHECK(make_reward_oracle("gc-band:0.4,0.6")->evaluate(TokenSeq{{1, 2, 0, 3}, 0}) == 1.0);
  CHECK(make_reward_oracle("gc-band:0.4,0.6")->evaluate(TokenSeq{{0, 0, 0, 3}, 0}) == doctest::Approx(-0.4));
  CHECK(make_reward_oracle("neg-sq-dist:1")->evaluate(ContinuousVec{{1.0, 3.0}}) == -4.0);
  CHECK(make_reward_oracle("indicator-box")->evaluate(ContinuousVec{{0.5, 0.2}}) == 1.0);
  CHECK(make_reward_oracle("indicator-box:0,1")->evaluate(ContinuousVec{{0.5, 1.2}}) == 0.0);
  const auto h = make_reward_oracle("lookup-hash");
  CHECK(h->evaluate(TokenSeq{{1, 2, 3}, 0}) == h->evaluate(TokenSeq{{1, 2, 3}, 0}));
  CHECK(h->deterministic());
  for (const char* bad : {"motif-count", "nope", "gc-band:1", "neg-sq-dist", "lookup-hash:1"}) {
    try {
      make_reward_oracle(bad);
      FAIL("expected error for " << bad);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kInvalidConfiguration);
      CHECK(e.field() == "reward");
    }
  }
}
