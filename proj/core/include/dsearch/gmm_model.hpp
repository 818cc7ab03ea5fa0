#pragma once

#include <span>
#include <vector>

#include "dsearch/denoiser.hpp"
#include "dsearch/noise_schedule.hpp"

namespace dsearch {

struct GmmComponent {
  double weight = 1.0;
  std::vector<double> mean;
  double variance = 1.0;  // isotropic
};

// Prior p(x_0) = sum_k w_k N(mu_k, sigma_k^2 I).
class GmmPrior {
 public:
  explicit GmmPrior(std::vector<GmmComponent> components);

  std::size_t dim() const { return dim_; }
  std::span<const GmmComponent> components() const { return components_; }

  // Exact E[x_0 | x_t] when x_t ~ N(sqrt(abar) x_0, (1 - abar) I).
  std::vector<double> posterior_mean(std::span<const double> x_t, double alpha_bar) const;

  // Responsibilities of each component given x_t at noise level abar.
  std::vector<double> responsibilities(std::span<const double> x_t, double alpha_bar) const;

  double log_density(std::span<const double> x) const;
  std::vector<double> sample(Rng& rng) const;
  std::vector<double> mean() const;
  // Per-coordinate second central moment, averaged over coordinates.
  std::vector<double> coordinate_variance() const;

 private:
  std::vector<GmmComponent> components_;
  std::size_t dim_ = 0;
};

ContinuousVec gmm_predict_x0(const ContinuousVec& x_t, int t, const GmmPrior& prior,
                             const NoiseSchedule& schedule);

enum class GaussianReverseKernel {
  // N(mean(x_t, x0_hat(x_t)), sigma_t^2 I) with the DDPM posterior variance.
  kPosteriorMeanPlugIn,
  // Ancestral draw from the exact reverse marginal q(x_{t-1} | x_t), a
  // Gaussian mixture under a GMM prior. Same mean as the plug-in kernel.
  kExactMixture,
};

class GaussianMixtureDiffusion final : public DenoiserModel {
 public:
  GaussianMixtureDiffusion(GmmPrior prior, NoiseSchedule schedule,
                           GaussianReverseKernel kernel = GaussianReverseKernel::kPosteriorMeanPlugIn);

  int steps() const override { return schedule_.steps(); }
  std::string name() const override { return "gaussian-mixture"; }

  State prior_sample(Rng& rng) const override;
  std::vector<State> reverse_children(const State& x_t, int t,
                                      std::span<Rng> streams) const override;
  using DenoiserModel::reverse_children;
  State predict_x0(const State& x_t, int t) const override;
  State forward_noise(const State& x_0, int t, Rng& rng) const override;
  std::optional<double> exact_nll(const State& x_0) const override;

  // Mean of the reverse step t -> t-1.
  std::vector<double> reverse_mean(std::span<const double> x_t, int t) const;
  double reverse_variance(int t) const { return schedule_.posterior_variance(t); }

  const GmmPrior& prior() const { return prior_; }
  const NoiseSchedule& schedule() const { return schedule_; }
  GaussianReverseKernel kernel() const { return kernel_; }

 private:
  const ContinuousVec& checked(const State& s) const;

  GmmPrior prior_;
  NoiseSchedule schedule_;
  GaussianReverseKernel kernel_;
};

}  // namespace dsearch
