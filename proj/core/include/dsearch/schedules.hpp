#pragma once

#include <string_view>
#include <vector>

#include "dsearch/rng.hpp"

namespace dsearch {

// All schedules are indexed by the forward step s = T - t, so s = 0 is the
// start of generation (pure noise) and s = T is the finished sample.

enum class BeamKind { kNone, kLinear, kExponential, kQuadratic, kSigmoid };

BeamKind parse_beam_kind(std::string_view name);
std::string_view to_string(BeamKind kind);

struct BeamSchedule {
  BeamKind kind = BeamKind::kNone;
  int initial = 1;  // b at s = 0
  int final = 1;    // b at s = T
  double kappa = 1.0;  // sigmoid steepness, per step

  void validate() const;
};

// Continuous schedule value rounded to nearest and clamped to [final, initial].
int beam_width(const BeamSchedule& schedule, int s, int steps);

// max(1, floor(C / b)).
int tree_width(int child_budget, int beams);
// True when C < b, i.e. the budget cannot give every beam a child of its own.
bool budget_underflow(int child_budget, int beams);

enum class SearchSetKind { kAll, kUniform, kLinear, kExponential, kStep, kQuadratic, kSigmoid };
enum class SearchSetMode { kStochastic, kSystematic };

SearchSetKind parse_search_set_kind(std::string_view name);
std::string_view to_string(SearchSetKind kind);
SearchSetMode parse_search_set_mode(std::string_view name);
std::string_view to_string(SearchSetMode mode);

struct SearchSetSpec {
  SearchSetKind kind = SearchSetKind::kAll;
  double budget_fraction = 1.0;  // target |A| / T
  double beta = 3.0;             // exponential growth rate
  double gamma = 1.0;            // quadratic scale (shape-neutral after calibration)
  double delta = 1.0;            // sigmoid steepness, per step
  int step_levels = 4;           // number of density doublings for kind=step
  SearchSetMode mode = SearchSetMode::kSystematic;

  void validate() const;
};

// Membership over diffusion times 1..T.
class SearchSet {
 public:
  SearchSet() = default;
  explicit SearchSet(std::vector<bool> members);  // members[t - 1]
  static SearchSet all(int steps);

  bool contains(int t) const;
  int size() const { return count_; }
  int steps() const { return static_cast<int>(members_.size()); }
  std::vector<int> times() const;  // descending, T first

 private:
  std::vector<bool> members_;
  int count_ = 0;
};

// Unnormalized inclusion density for the step that leaves time t.
double search_density(const SearchSetSpec& spec, int t, int steps);

// Per-time inclusion probabilities min(1, lambda f(t)) summing to
// budget_fraction * T, indexed by t - 1. Throws kCalibration when the cap
// makes the budget unreachable.
std::vector<double> inclusion_probabilities(const SearchSetSpec& spec, int steps);

SearchSet generate_search_set(const SearchSetSpec& spec, int steps, Rng& rng);

// (|A| C + T - |A|) / T.
double effective_budget(int search_steps, int child_budget, int steps);

}  // namespace dsearch
