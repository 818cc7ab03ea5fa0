#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace dsearch {

enum class NoiseScheduleKind { kLinearBeta, kCosine };

NoiseScheduleKind parse_noise_schedule_kind(std::string_view name);
std::string_view to_string(NoiseScheduleKind kind);

// Per-step retention factors alpha_t in (0, 1) and their running products
// alpha_bar_t, for t = 1..T. alpha_bar_0 is 1 by convention.
class NoiseSchedule {
 public:
  static NoiseSchedule build(NoiseScheduleKind kind, int steps);
  // Explicit alphas; used by tests that need a prescribed alpha_bar.
  static NoiseSchedule from_alphas(std::vector<double> alphas);

  int steps() const { return static_cast<int>(alphas_.size()); }
  double alpha(int t) const;
  double alpha_bar(int t) const;
  std::span<const double> alphas() const { return alphas_; }
  std::span<const double> alpha_bars() const { return alpha_bars_; }

  // DDPM posterior variance (1 - alpha_t)(1 - alpha_bar_{t-1}) / (1 - alpha_bar_t).
  double posterior_variance(int t) const;

 private:
  explicit NoiseSchedule(std::vector<double> alphas);

  std::vector<double> alphas_;
  std::vector<double> alpha_bars_;
};

}  // namespace dsearch
