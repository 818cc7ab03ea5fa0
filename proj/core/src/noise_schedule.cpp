#include "dsearch/noise_schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dsearch/error.hpp"

namespace dsearch {

namespace {

constexpr double kMaxBeta = 0.999;

}  // namespace

NoiseScheduleKind parse_noise_schedule_kind(std::string_view name) {
  if (name == "linear-beta") return NoiseScheduleKind::kLinearBeta;
  if (name == "cosine") return NoiseScheduleKind::kCosine;
  fail(ErrorKind::kInvalidConfiguration,
       "unknown noise schedule '" + std::string(name) + "'", "schedule");
}

std::string_view to_string(NoiseScheduleKind kind) {
  return kind == NoiseScheduleKind::kLinearBeta ? "linear-beta" : "cosine";
}

NoiseSchedule NoiseSchedule::build(NoiseScheduleKind kind, int steps) {
  if (steps < 2) {
    fail(ErrorKind::kInvalidConfiguration, "noise schedule needs T >= 2", "steps");
  }
  const auto T = static_cast<double>(steps);
  std::vector<double> alphas(static_cast<std::size_t>(steps));
  if (kind == NoiseScheduleKind::kLinearBeta) {
    // The usual 1e-4 .. 0.02 ramp over 1000 steps, rescaled to T steps so that
    // the total noise injected is independent of T.
    const double beta_min = 0.1 / T;
    const double beta_max = std::min(kMaxBeta, 20.0 / T);
    for (int i = 0; i < steps; ++i) {
      const double frac = static_cast<double>(i) / (T - 1.0);
      alphas[static_cast<std::size_t>(i)] = 1.0 - (beta_min + frac * (beta_max - beta_min));
    }
  } else {
    constexpr double s = 0.008;
    auto f = [&](double t) {
      const double c = std::cos((t / T + s) / (1.0 + s) * std::numbers::pi / 2.0);
      return c * c;
    };
    const double f0 = f(0.0);
    for (int i = 1; i <= steps; ++i) {
      const double prev = f(i - 1.0) / f0;
      const double cur = f(static_cast<double>(i)) / f0;
      const double beta = std::clamp(1.0 - cur / prev, 0.0, kMaxBeta);
      alphas[static_cast<std::size_t>(i - 1)] = 1.0 - beta;
    }
  }
  return NoiseSchedule(std::move(alphas));
}

NoiseSchedule NoiseSchedule::from_alphas(std::vector<double> alphas) {
  if (alphas.size() < 1) {
    fail(ErrorKind::kInvalidConfiguration, "noise schedule needs at least one step");
  }
  return NoiseSchedule(std::move(alphas));
}

NoiseSchedule::NoiseSchedule(std::vector<double> alphas) : alphas_(std::move(alphas)) {
  alpha_bars_.reserve(alphas_.size());
  double prod = 1.0;
  for (double a : alphas_) {
    if (!(a > 0.0 && a <= 1.0)) {
      fail(ErrorKind::kInvalidConfiguration, "alpha_t must lie in (0, 1]");
    }
    prod *= a;
    alpha_bars_.push_back(prod);
  }
}

double NoiseSchedule::alpha(int t) const {
  if (t < 1 || t > steps()) fail(ErrorKind::kInvalidInput, "alpha: t out of range");
  return alphas_[static_cast<std::size_t>(t - 1)];
}

double NoiseSchedule::alpha_bar(int t) const {
  if (t == 0) return 1.0;
  if (t < 0 || t > steps()) fail(ErrorKind::kInvalidInput, "alpha_bar: t out of range");
  return alpha_bars_[static_cast<std::size_t>(t - 1)];
}

double NoiseSchedule::posterior_variance(int t) const {
  const double a = alpha(t);
  const double ab = alpha_bar(t);
  const double ab_prev = alpha_bar(t - 1);
  if (1.0 - ab <= 0.0) return 0.0;
  return (1.0 - a) * (1.0 - ab_prev) / (1.0 - ab);
}

}  // namespace dsearch
