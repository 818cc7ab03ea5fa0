#include "dsearch/gmm_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "dsearch/error.hpp"

namespace dsearch {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b, double scale_b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - scale_b * b[i];
    acc += d * d;
  }
  return acc;
}

double log_sum_exp(std::span<const double> xs) {
  const double m = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - m);
  return m + std::log(acc);
}

}  // namespace

GmmPrior::GmmPrior(std::vector<GmmComponent> components) : components_(std::move(components)) {
  if (components_.empty()) {
    fail(ErrorKind::kInvalidConfiguration, "GMM prior needs at least one component", "components");
  }
  dim_ = components_.front().mean.size();
  if (dim_ == 0) fail(ErrorKind::kInvalidConfiguration, "GMM mean must be non-empty", "components");
  double total = 0.0;
  for (const auto& c : components_) {
    if (c.mean.size() != dim_) {
      fail(ErrorKind::kInvalidConfiguration, "GMM components differ in dimension", "components");
    }
    if (!(c.weight >= 0.0)) {
      fail(ErrorKind::kInvalidConfiguration, "GMM weight must be >= 0", "components");
    }
    if (!(c.variance > 0.0)) {
      fail(ErrorKind::kInvalidConfiguration, "GMM variance must be > 0", "components");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    fail(ErrorKind::kInvalidConfiguration, "GMM weights must sum to 1", "components");
  }
}

std::vector<double> GmmPrior::responsibilities(std::span<const double> x_t,
                                               double alpha_bar) const {
  const double root = std::sqrt(alpha_bar);
  const auto d = static_cast<double>(dim_);
  std::vector<double> logits(components_.size());
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const auto& c = components_[k];
    const double v = alpha_bar * c.variance + (1.0 - alpha_bar);
    logits[k] = (c.weight > 0.0 ? std::log(c.weight) : -INFINITY) - 0.5 * d * std::log(v) -
                0.5 * squared_distance(x_t, c.mean, root) / v;
  }
  const double norm = log_sum_exp(logits);
  for (double& l : logits) l = std::exp(l - norm);
  return logits;
}

std::vector<double> GmmPrior::posterior_mean(std::span<const double> x_t,
                                             double alpha_bar) const {
  if (x_t.size() != dim_) fail(ErrorKind::kInvalidInput, "state dimension mismatch");
  const double root = std::sqrt(alpha_bar);
  const auto resp = responsibilities(x_t, alpha_bar);
  std::vector<double> out(dim_, 0.0);
  for (std::size_t k = 0; k < components_.size(); ++k) {
    if (resp[k] == 0.0) continue;
    const auto& c = components_[k];
    const double v = alpha_bar * c.variance + (1.0 - alpha_bar);
    for (std::size_t i = 0; i < dim_; ++i) {
      out[i] += resp[k] * (c.variance * root * x_t[i] + (1.0 - alpha_bar) * c.mean[i]) / v;
    }
  }
  return out;
}

double GmmPrior::log_density(std::span<const double> x) const {
  if (x.size() != dim_) fail(ErrorKind::kInvalidInput, "state dimension mismatch");
  const auto d = static_cast<double>(dim_);
  std::vector<double> terms(components_.size());
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const auto& c = components_[k];
    terms[k] = (c.weight > 0.0 ? std::log(c.weight) : -INFINITY) -
               0.5 * d * std::log(2.0 * std::numbers::pi * c.variance) -
               0.5 * squared_distance(x, c.mean, 1.0) / c.variance;
  }
  return log_sum_exp(terms);
}

std::vector<double> GmmPrior::sample(Rng& rng) const {
  std::vector<double> weights(components_.size());
  std::transform(components_.begin(), components_.end(), weights.begin(),
                 [](const GmmComponent& c) { return c.weight; });
  const auto& c = components_[rng.categorical(weights)];
  const double sd = std::sqrt(c.variance);
  std::vector<double> x(dim_);
  for (std::size_t i = 0; i < dim_; ++i) x[i] = c.mean[i] + sd * rng.normal();
  return x;
}

std::vector<double> GmmPrior::mean() const {
  std::vector<double> m(dim_, 0.0);
  for (const auto& c : components_) {
    for (std::size_t i = 0; i < dim_; ++i) m[i] += c.weight * c.mean[i];
  }
  return m;
}

std::vector<double> GmmPrior::coordinate_variance() const {
  const auto m = mean();
  std::vector<double> v(dim_, 0.0);
  for (const auto& c : components_) {
    for (std::size_t i = 0; i < dim_; ++i) {
      v[i] += c.weight * (c.variance + c.mean[i] * c.mean[i]);
    }
  }
  for (std::size_t i = 0; i < dim_; ++i) v[i] -= m[i] * m[i];
  return v;
}

ContinuousVec gmm_predict_x0(const ContinuousVec& x_t, int t, const GmmPrior& prior,
                             const NoiseSchedule& schedule) {
  if (t < 0 || t > schedule.steps()) fail(ErrorKind::kInvalidInput, "predict_x0: t out of range");
  if (t == 0) return x_t;
  return ContinuousVec{prior.posterior_mean(x_t.values, schedule.alpha_bar(t))};
}

GaussianMixtureDiffusion::GaussianMixtureDiffusion(GmmPrior prior, NoiseSchedule schedule,
                                                   GaussianReverseKernel kernel)
    : prior_(std::move(prior)), schedule_(std::move(schedule)), kernel_(kernel) {}

const ContinuousVec& GaussianMixtureDiffusion::checked(const State& s) const {
  const auto* v = std::get_if<ContinuousVec>(&s);
  if (v == nullptr) fail(ErrorKind::kStateCorruption, "gaussian-mixture model expects a vector state");
  if (v->values.size() != prior_.dim()) fail(ErrorKind::kStateCorruption, "state dimension mismatch");
  if (!all_finite(*v)) fail(ErrorKind::kStateCorruption, "state has non-finite entries");
  return *v;
}

State GaussianMixtureDiffusion::prior_sample(Rng& rng) const {
  // Exact time-T marginal: push a prior draw through the forward kernel.
  ContinuousVec x0{prior_.sample(rng)};
  return forward_noise(x0, steps(), rng);
}

std::vector<double> GaussianMixtureDiffusion::reverse_mean(std::span<const double> x_t,
                                                           int t) const {
  const double a = schedule_.alpha(t);
  const double ab = schedule_.alpha_bar(t);
  const double ab_prev = schedule_.alpha_bar(t - 1);
  const auto x0 = prior_.posterior_mean(x_t, ab);
  const double cx = std::sqrt(a) * (1.0 - ab_prev) / (1.0 - ab);
  const double c0 = std::sqrt(ab_prev) * (1.0 - a) / (1.0 - ab);
  std::vector<double> m(x_t.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = cx * x_t[i] + c0 * x0[i];
  return m;
}

std::vector<State> GaussianMixtureDiffusion::reverse_children(const State& x_t, int t,
                                                              std::span<Rng> streams) const {
  const auto& x = checked(x_t);
  if (t < 1 || t > steps()) fail(ErrorKind::kInvalidInput, "reverse step: t out of range");
  std::vector<State> out;
  out.reserve(streams.size());
  const std::size_t d = prior_.dim();

  if (kernel_ == GaussianReverseKernel::kPosteriorMeanPlugIn) {
    const auto mean = reverse_mean(x.values, t);
    const double sd = std::sqrt(reverse_variance(t));
    for (Rng& rng : streams) {
      ContinuousVec child{mean};
      if (sd > 0.0) {
        for (std::size_t i = 0; i < d; ++i) child.values[i] += sd * rng.normal();
      }
      out.emplace_back(std::move(child));
    }
    return out;
  }

  // x_{t-1} = cx x_t + c0 x_0 + sigma_t eps with x_0 | x_t, k Gaussian.
  const double a = schedule_.alpha(t);
  const double ab = schedule_.alpha_bar(t);
  const double ab_prev = schedule_.alpha_bar(t - 1);
  const double cx = std::sqrt(a) * (1.0 - ab_prev) / (1.0 - ab);
  const double c0 = std::sqrt(ab_prev) * (1.0 - a) / (1.0 - ab);
  const double root = std::sqrt(ab);
  const double sigma2 = reverse_variance(t);
  const auto resp = prior_.responsibilities(x.values, ab);
  const auto comps = prior_.components();
  for (Rng& rng : streams) {
    const auto& c = comps[rng.categorical(resp)];
    const double v = ab * c.variance + (1.0 - ab);
    const double post_var = c.variance * (1.0 - ab) / v;
    const double sd = std::sqrt(sigma2 + c0 * c0 * post_var);
    ContinuousVec child{std::vector<double>(d)};
    for (std::size_t i = 0; i < d; ++i) {
      const double post_mean = (c.variance * root * x.values[i] + (1.0 - ab) * c.mean[i]) / v;
      child.values[i] = cx * x.values[i] + c0 * post_mean + sd * rng.normal();
    }
    out.emplace_back(std::move(child));
  }
  return out;
}

State GaussianMixtureDiffusion::predict_x0(const State& x_t, int t) const {
  return gmm_predict_x0(checked(x_t), t, prior_, schedule_);
}

State GaussianMixtureDiffusion::forward_noise(const State& x_0, int t, Rng& rng) const {
  const auto& x = checked(x_0);
  if (t == 0) return x;
  const double ab = schedule_.alpha_bar(t);
  const double root = std::sqrt(ab);
  const double sd = std::sqrt(1.0 - ab);
  ContinuousVec out{x.values};
  for (double& v : out.values) v = root * v + sd * rng.normal();
  return out;
}

std::optional<double> GaussianMixtureDiffusion::exact_nll(const State& x_0) const {
  return -prior_.log_density(checked(x_0).values);
}

}  // namespace dsearch
