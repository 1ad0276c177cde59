#include "unimotion/diffusion.hpp"

#include <cmath>
#include <string>

#include "unimotion/errors.hpp"

namespace unimotion {

namespace {

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = normal(rng);
  }
  return m;
}

void check_same_shape(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": shapes " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + " differ");
  }
}

}  // namespace

NoiseSchedule::NoiseSchedule(std::vector<double> betas) : beta_(std::move(betas)) {
  if (beta_.empty()) throw ValidationError("noise schedule needs at least one step");
  alpha_bar_.resize(beta_.size());
  double running = 1.0;
  for (std::size_t i = 0; i < beta_.size(); ++i) {
    if (!(beta_[i] > 0.0 && beta_[i] < 1.0)) {
      throw ValidationError("beta values must lie in (0, 1)");
    }
    running *= 1.0 - beta_[i];
    alpha_bar_[i] = running;
  }
}

double NoiseSchedule::beta(int t) const {
  if (t < 1 || t > steps()) throw ValidationError("step " + std::to_string(t) + " out of range");
  return beta_[static_cast<std::size_t>(t - 1)];
}

double NoiseSchedule::alpha(int t) const { return 1.0 - beta(t); }

double NoiseSchedule::alpha_bar(int t) const {
  if (t == 0) return 1.0;
  if (t < 0 || t > steps()) throw ValidationError("step " + std::to_string(t) + " out of range");
  return alpha_bar_[static_cast<std::size_t>(t - 1)];
}

NoiseSchedule make_schedule(int steps, double beta_start, double beta_end) {
  if (steps < 1) throw ValidationError("schedule needs T >= 1");
  if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0)) {
    throw ValidationError("schedule requires 0 < beta_start <= beta_end < 1");
  }
  std::vector<double> betas(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    const double frac = steps == 1 ? 0.0 : static_cast<double>(i) / (steps - 1);
    betas[static_cast<std::size_t>(i)] = beta_start + (beta_end - beta_start) * frac;
  }
  return NoiseSchedule(std::move(betas));
}

Eigen::MatrixXd q_sample(const Eigen::MatrixXd& x0, int t, const Eigen::MatrixXd& noise,
                         const NoiseSchedule& schedule) {
  check_same_shape(x0, noise, "q_sample");
  const double ab = schedule.alpha_bar(t);
  return std::sqrt(ab) * x0 + std::sqrt(1.0 - ab) * noise;
}

PosteriorCoefficients posterior_coefficients(double beta_t, double alpha_bar_prev,
                                             double alpha_bar_t, PosteriorVariance variance) {
  PosteriorCoefficients c;
  const double denom = 1.0 - alpha_bar_t;
  c.x0 = std::sqrt(alpha_bar_prev) * beta_t / denom;
  c.xt = std::sqrt(1.0 - beta_t) * (1.0 - alpha_bar_prev) / denom;
  c.variance = variance == PosteriorVariance::BetaTilde
                   ? beta_t * (1.0 - alpha_bar_prev) / denom
                   : beta_t;
  return c;
}

PosteriorCoefficients posterior_coefficients(const NoiseSchedule& schedule, int t,
                                             PosteriorVariance variance) {
  if (t == 1) {
    // alpha_bar_0 == 1 makes these exact: the posterior collapses onto x0.
    return {1.0, 0.0, 0.0};
  }
  return posterior_coefficients(schedule.beta(t), schedule.alpha_bar(t - 1),
                                schedule.alpha_bar(t), variance);
}

Eigen::MatrixXd ddpm_step(const Eigen::MatrixXd& x_t, const Eigen::MatrixXd& x0_pred, int t,
                          const NoiseSchedule& schedule, std::mt19937_64& rng,
                          PosteriorVariance variance) {
  check_same_shape(x_t, x0_pred, "ddpm_step");
  if (t < 1 || t > schedule.steps()) {
    throw ValidationError("step " + std::to_string(t) + " out of range");
  }
  if (t == 1) return x0_pred;
  const auto c = posterior_coefficients(schedule, t, variance);
  Eigen::MatrixXd mean = c.x0 * x0_pred + c.xt * x_t;
  return mean + std::sqrt(c.variance) * gaussian(x_t.rows(), x_t.cols(), rng);
}

Eigen::MatrixXd ddpm_step(const Eigen::MatrixXd& x_t, const Eigen::MatrixXd& x0_pred, int t,
                          const NoiseSchedule& schedule, std::uint64_t seed,
                          PosteriorVariance variance) {
  std::mt19937_64 rng(seed);
  return ddpm_step(x_t, x0_pred, t, schedule, rng, variance);
}

Eigen::MatrixXd guided_x0(const Eigen::MatrixXd& cond_pred, const Eigen::MatrixXd& uncond_pred,
                          double scale) {
  check_same_shape(cond_pred, uncond_pred, "guided_x0");
  if (scale == 1.0) return cond_pred;
  return uncond_pred + scale * (cond_pred - uncond_pred);
}

double training_loss(const Eigen::MatrixXd& x0_pred, const Eigen::MatrixXd& x0,
                     const Eigen::MatrixXd& weights) {
  check_same_shape(x0_pred, x0, "training_loss");
  if (x0.cols() != static_cast<Eigen::Index>(kFrameDim)) {
    throw DimensionError("training_loss expects 669-wide frames");
  }
  if (weights.rows() != x0.rows() || weights.cols() != kNumParts) {
    throw DimensionError("loss weights must be F x 10");
  }
  const auto& layout = canonical_layout();
  double sum = 0.0;
  double count = 0.0;
  for (Eigen::Index f = 0; f < x0.rows(); ++f) {
    for (int p = 0; p < kNumParts; ++p) {
      if (weights(f, p) == 0.0) continue;
      for (auto idx : layout.indices(static_cast<Part>(p))) {
        const double r = x0_pred(f, static_cast<Eigen::Index>(idx)) -
                         x0(f, static_cast<Eigen::Index>(idx));
        sum += weights(f, p) * r * r;
        count += weights(f, p);
      }
    }
  }
  if (count == 0.0) throw ContractError("training_loss: every cell has zero weight");
  return sum / count;
}

MotionSequence sample(const X0Predictor& denoiser, std::size_t frames,
                      const BodyPartMask& visibility, const MotionSequence& known,
                      const ConditionSet& conditions, const NoiseSchedule& schedule,
                      const SampleOptions& options) {
  if (visibility.convention() != MaskConvention::Visibility) {
    throw ContractError("sample expects a visibility mask");
  }
  if (visibility.frames() != frames) {
    throw DimensionError("visibility mask frame count does not match the requested length");
  }
  const bool constrained = visibility.count() > 0;
  if (constrained) {
    if (known.frames.size() != frames) {
      throw ContractError("known motion must provide every frame when any cell is visible");
    }
    for (std::size_t f = 0; f < frames; ++f) {
      for (int p = 0; p < kNumParts; ++p) {
        if (visibility.at(f, p) && !known.parts_present[p]) {
          throw ContractError("visible part '" + std::string(part_name(static_cast<Part>(p))) +
                              "' is missing from the known motion");
        }
      }
    }
  }

  const auto rows = static_cast<Eigen::Index>(frames);
  const auto cols = static_cast<Eigen::Index>(kFrameDim);
  const Eigen::MatrixXd known_m = constrained ? to_matrix(known) : Eigen::MatrixXd();
  const Eigen::MatrixXd keep = expand_to_features(visibility);

  std::mt19937_64 rng(options.seed);
  auto overwrite_known = [&](Eigen::MatrixXd& x, int t) {
    if (!constrained) return;
    const Eigen::MatrixXd noisy =
        t == 0 ? known_m : q_sample(known_m, t, gaussian(rows, cols, rng), schedule);
    x = (keep.array() > 0.5).select(noisy, x);
  };

  const bool guided = options.guidance_scale != 1.0 && !conditions.empty();
  const ConditionSet unconditional;

  Eigen::MatrixXd x = gaussian(rows, cols, rng);
  overwrite_known(x, schedule.steps());
  for (int t = schedule.steps(); t >= 1; --t) {
    Eigen::MatrixXd x0 = denoiser(x, t, conditions);
    if (guided) x0 = guided_x0(x0, denoiser(x, t, unconditional), options.guidance_scale);
    x = ddpm_step(x, x0, t, schedule, rng, options.variance);
    overwrite_known(x, t - 1);
  }

  MotionSequence out = known;
  out.frames.clear();
  return from_matrix(x, out);
}

}  // namespace unimotion
