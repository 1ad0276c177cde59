#pragma once

// DDPM noise schedule, closed-form forward noising, the posterior reverse
// step, an x0-predicting sampler with known-region replacement, guidance
// blending and the masked reconstruction loss.

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "unimotion/condition.hpp"
#include "unimotion/motion_repr.hpp"
#include "unimotion/temporal_ops.hpp"

namespace unimotion {

inline constexpr int kDefaultDiffusionSteps = 1000;
inline constexpr double kDefaultBetaStart = 1e-4;
inline constexpr double kDefaultBetaEnd = 2e-2;

/// Steps are 1-based: beta(t), alpha(t), alpha_bar(t) for t in [1, T];
/// alpha_bar(0) == 1.
class NoiseSchedule {
 public:
  NoiseSchedule(std::vector<double> betas);

  int steps() const noexcept { return static_cast<int>(beta_.size()); }
  double beta(int t) const;
  double alpha(int t) const;
  double alpha_bar(int t) const;

  std::span<const double> betas() const noexcept { return beta_; }
  std::span<const double> alpha_bars() const noexcept { return alpha_bar_; }

 private:
  std::vector<double> beta_;
  std::vector<double> alpha_bar_;  // alpha_bar_[t - 1] = prod_{s<=t} (1 - beta_s)
};

/// Linear beta ramp from beta_start to beta_end over T steps.
NoiseSchedule make_schedule(int steps = kDefaultDiffusionSteps,
                            double beta_start = kDefaultBetaStart,
                            double beta_end = kDefaultBetaEnd);

/// sqrt(alpha_bar_t) x0 + sqrt(1 - alpha_bar_t) eps, for t in [0, T].
Eigen::MatrixXd q_sample(const Eigen::MatrixXd& x0, int t, const Eigen::MatrixXd& noise,
                         const NoiseSchedule& schedule);

enum class PosteriorVariance { BetaTilde, Beta };

struct PosteriorCoefficients {
  double x0 = 0.0;   // weight of the x0 prediction
  double xt = 0.0;   // weight of x_t
  double variance = 0.0;
};

/// Mean weights and variance of q(x_{t-1} | x_t, x0) from the raw schedule terms.
PosteriorCoefficients posterior_coefficients(double beta_t, double alpha_bar_prev,
                                             double alpha_bar_t,
                                             PosteriorVariance variance = PosteriorVariance::BetaTilde);
PosteriorCoefficients posterior_coefficients(const NoiseSchedule& schedule, int t,
                                             PosteriorVariance variance = PosteriorVariance::BetaTilde);

/// One reverse step. At t == 1 the result is x0_pred exactly.
Eigen::MatrixXd ddpm_step(const Eigen::MatrixXd& x_t, const Eigen::MatrixXd& x0_pred, int t,
                          const NoiseSchedule& schedule, std::mt19937_64& rng,
                          PosteriorVariance variance = PosteriorVariance::BetaTilde);
Eigen::MatrixXd ddpm_step(const Eigen::MatrixXd& x_t, const Eigen::MatrixXd& x0_pred, int t,
                          const NoiseSchedule& schedule, std::uint64_t seed,
                          PosteriorVariance variance = PosteriorVariance::BetaTilde);

/// uncond + s * (cond - uncond).
Eigen::MatrixXd guided_x0(const Eigen::MatrixXd& cond_pred, const Eigen::MatrixXd& uncond_pred,
                          double scale);

/// Mean squared error over features of parts with weight 1 (F x 10 weights).
double training_loss(const Eigen::MatrixXd& x0_pred, const Eigen::MatrixXd& x0,
                     const Eigen::MatrixXd& weights);

/// x0 predictor: (x_t as F x 669, 1-based step t, conditions) -> F x 669.
using X0Predictor = std::function<Eigen::MatrixXd(const Eigen::MatrixXd& x_t, int t,
                                                  const ConditionSet& conditions)>;

struct SampleOptions {
  double guidance_scale = 1.0;
  std::uint64_t seed = 0;
  PosteriorVariance variance = PosteriorVariance::BetaTilde;
};

/// Reverse diffusion from unit Gaussian noise. Cells with visibility 1 are
/// overwritten by the noised known motion at every step and equal `known`
/// exactly in the result. `known` supplies fps, dataset and part flags.
MotionSequence sample(const X0Predictor& denoiser, std::size_t frames,
                      const BodyPartMask& visibility, const MotionSequence& known,
                      const ConditionSet& conditions, const NoiseSchedule& schedule,
                      const SampleOptions& options);

}  // namespace unimotion
