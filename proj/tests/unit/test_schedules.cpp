#include <doctest.h>

#include <cmath>
#include <random>

#include "dsearch/error.hpp"
#include "dsearch/schedules.hpp"

using namespace dsearch;

namespace {

Rng test_rng(std::uint64_t seed) { return Rng(StreamKey{seed, StreamPurpose::kTest, 0, 0, 0, 0}); }

}  // namespace

TEST_CASE("beam_width examples") {
  CHECK(beam_width({BeamKind::kExponential, 16, 4, 1.0}, 4, 8) == 8);
  CHECK(beam_width({BeamKind::kLinear, 10, 2, 1.0}, 4, 8) == 6);
  CHECK(beam_width({BeamKind::kNone, 7, 3, 1.0}, 5, 8) == 7);
  // Independent evaluation of 16 (1/4)^(s/8).
  for (int s = 0; s <= 8; ++s) {
    CHECK(beam_width({BeamKind::kExponential, 16, 4, 1.0}, s, 8) ==
          static_cast<int>(std::lround(16.0 * std::pow(0.25, s / 8.0))));
  }
  for (auto kind : {BeamKind::kLinear, BeamKind::kExponential, BeamKind::kQuadratic, BeamKind::kSigmoid}) {
    CAPTURE(to_string(kind));
    const BeamSchedule b{kind, 40, 4, 0.7};
    CHECK(beam_width(b, 0, 32) == 40);
    CHECK(beam_width(b, 32, 32) == 4);
  }
}

TEST_CASE("beam_width errors") {
  CHECK_THROWS_AS(beam_width({BeamKind::kLinear, 2, 5, 1.0}, 0, 8), Error);
  try {
    beam_width({BeamKind::kLinear, 2, 5, 1.0}, 0, 8);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidConfiguration);
  }
  CHECK_THROWS_AS(beam_width({BeamKind::kLinear, 5, 0, 1.0}, 0, 8), Error);
  CHECK_THROWS_AS(beam_width({BeamKind::kSigmoid, 5, 1, 0.0}, 0, 8), Error);
  CHECK_THROWS_AS(beam_width({BeamKind::kLinear, 5, 1, 1.0}, 9, 8), Error);
}

TEST_CASE("beam_width is monotone and bounded for random configurations") {
  std::mt19937 gen(2024);
  const BeamKind kinds[] = {BeamKind::kNone, BeamKind::kLinear, BeamKind::kExponential, BeamKind::kQuadratic,
                            BeamKind::kSigmoid};
  for (int trial = 0; trial < 50; ++trial) {
    const int fin = std::uniform_int_distribution<int>(1, 20)(gen);
    const int init = fin + std::uniform_int_distribution<int>(0, 60)(gen);
    const int steps = std::uniform_int_distribution<int>(1, 200)(gen);
    const double kappa = std::uniform_real_distribution<double>(0.01, 3.0)(gen);
    for (BeamKind kind : kinds) {
      const BeamSchedule b{kind, init, fin, kappa};
      int prev = beam_width(b, 0, steps);
      for (int s = 0; s <= steps; ++s) {
        const int w = beam_width(b, s, steps);
        CHECK(w <= prev);
        CHECK(w >= fin);
        CHECK(w <= init);
        prev = w;
      }
    }
  }
}

TEST_CASE("tree_width examples") {
  CHECK(tree_width(40, 8) == 5);
  CHECK(tree_width(40, 40) == 1);
  CHECK(tree_width(41, 8) == 5);
  CHECK(tree_width(3, 8) == 1);
  CHECK(budget_underflow(3, 8));
  CHECK_FALSE(budget_underflow(8, 8));
}

TEST_CASE("search set examples") {
  auto rng = test_rng(1);
  SUBCASE("all") {
    const auto a = generate_search_set(SearchSetSpec{}, 128, rng);
    CHECK(a.size() == 128);
    for (int t = 1; t <= 128; ++t) CHECK(a.contains(t));
  }
  SUBCASE("uniform systematic halves with an even stride") {
    SearchSetSpec spec;
    spec.kind = SearchSetKind::kUniform;
    spec.budget_fraction = 0.5;
    const auto a = generate_search_set(spec, 128, rng);
    REQUIRE(a.size() == 64);
    const auto ts = a.times();
    for (std::size_t i = 1; i < ts.size(); ++i) CHECK(ts[i - 1] - ts[i] == 2);
  }
  SUBCASE("exponential systematic 0.65 over 128 steps") {
    SearchSetSpec spec;
    spec.kind = SearchSetKind::kExponential;
    spec.budget_fraction = 0.65;
    spec.beta = 3.0;
    const auto a = generate_search_set(spec, 128, rng);
    CHECK(a.size() == 83);
    int late = 0;
    for (int t : a.times()) late += t <= 64 ? 1 : 0;
    CHECK(late >= 0.6 * 83);
    const auto p = inclusion_probabilities(spec, 128);
    for (std::size_t i = 1; i < p.size(); ++i) CHECK(p[i] <= p[i - 1]);
  }
}

TEST_CASE("systematic sets hit the target size exactly and ignore the seed") {
  const SearchSetKind kinds[] = {SearchSetKind::kUniform, SearchSetKind::kLinear, SearchSetKind::kExponential,
                                 SearchSetKind::kStep, SearchSetKind::kQuadratic, SearchSetKind::kSigmoid};
  for (SearchSetKind kind : kinds) {
    for (int steps : {1, 7, 32, 100, 128}) {
      for (double frac : {0.05, 0.3, 0.5, 0.65, 0.99, 1.0}) {
        SearchSetSpec spec;
        spec.kind = kind;
        spec.budget_fraction = frac;
        spec.delta = 0.2;
        CAPTURE(to_string(kind));
        CAPTURE(steps);
        CAPTURE(frac);
        auto r1 = test_rng(1);
        auto r2 = test_rng(999);
        const auto a = generate_search_set(spec, steps, r1);
        const auto b = generate_search_set(spec, steps, r2);
        CHECK(a.size() == static_cast<int>(std::lround(frac * steps)));
        CHECK(a.times() == b.times());
      }
    }
  }
}

TEST_CASE("stochastic calibration over 1e4 draws") {
  for (SearchSetKind kind : {SearchSetKind::kExponential, SearchSetKind::kLinear, SearchSetKind::kSigmoid}) {
    SearchSetSpec spec;
    spec.kind = kind;
    spec.mode = SearchSetMode::kStochastic;
    spec.budget_fraction = 0.4;
    spec.delta = 0.1;
    const auto p = inclusion_probabilities(spec, 64);
    double sum = 0.0;
    for (double x : p) {
      CHECK(x >= 0.0);
      CHECK(x <= 1.0);
      sum += x;
    }
    CHECK(sum == doctest::Approx(0.4 * 64).epsilon(1e-9));
    double mean = 0.0;
    for (int d = 0; d < 10'000; ++d) {
      Rng rng(StreamKey{static_cast<std::uint64_t>(d), StreamPurpose::kSearchSet, 0, 0, 0, 0});
      mean += generate_search_set(spec, 64, rng).size() / 1e4;
    }
    CHECK(std::abs(mean - 0.4 * 64) <= 0.02 * 0.4 * 64);
  }
}

TEST_CASE("search set errors") {
  SearchSetSpec spec;
  spec.kind = SearchSetKind::kExponential;
  spec.budget_fraction = 0.5;
  spec.beta = -1e4;  // all but the first few densities underflow to zero
  auto rng = test_rng(0);
  try {
    generate_search_set(spec, 64, rng);
    FAIL("expected calibration error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kCalibration);
    CHECK(std::string(e.what()).find("maximum achievable fraction") != std::string::npos);
  }
  spec.beta = 3.0;
  spec.budget_fraction = 0.0;
  CHECK_THROWS_AS(generate_search_set(spec, 64, rng), Error);
  spec.budget_fraction = 1.5;
  CHECK_THROWS_AS(generate_search_set(spec, 64, rng), Error);
  CHECK_THROWS_AS(parse_search_set_kind("cubic"), Error);
}

TEST_CASE("effective_budget examples") {
  CHECK(effective_budget(128, 40, 128) == 40.0);
  CHECK(effective_budget(0, 40, 128) == 1.0);
  CHECK(effective_budget(83, 40, 128) == doctest::Approx(3365.0 / 128.0).epsilon(1e-15));
  CHECK(effective_budget(83, 40, 128) == doctest::Approx(26.289).epsilon(1e-4));
  CHECK_THROWS_AS(effective_budget(129, 40, 128), Error);
}
