#include "unimotion/temporal_ops.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <random>
#include <string>

#include "unimotion/errors.hpp"

namespace unimotion {

namespace {

constexpr std::array<std::string_view, kNumModalities> kModalityNames = {"text", "speech",
                                                                         "music", "video"};

constexpr std::array<std::string_view, 10> kTaskNames = {"t2m", "a2m", "m2d", "s2g", "mim",
                                                         "mp",  "min", "cmp", "cmi", "mmg"};

constexpr std::array<std::string_view, 3> kStrategyNames = {"per_part", "per_frame", "span"};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

BodyPartMask flipped(const BodyPartMask& in, MaskConvention to) {
  BodyPartMask out(in.frames(), to);
  for (std::size_t f = 0; f < in.frames(); ++f) {
    for (int p = 0; p < kNumParts; ++p) out.set(f, p, in.at(f, p) == 0);
  }
  return out;
}

}  // namespace

std::string_view modality_name(Modality m) { return kModalityNames[static_cast<int>(m)]; }

Modality modality_from_name(std::string_view name) {
  const std::string n = lower(name);
  for (int i = 0; i < kNumModalities; ++i) {
    if (kModalityNames[i] == n) return static_cast<Modality>(i);
  }
  throw ValidationError("unknown modality '" + std::string(name) + "'");
}

BodyPartMask::BodyPartMask(std::size_t frames, MaskConvention convention, std::uint8_t fill)
    : frames_(frames),
      convention_(convention),
      cells_(frames * kNumParts, fill ? std::uint8_t{1} : std::uint8_t{0}) {}

std::size_t BodyPartMask::index(std::size_t frame, int part) const {
  if (frame >= frames_ || part < 0 || part >= kNumParts) {
    throw DimensionError("mask cell (" + std::to_string(frame) + ", " + std::to_string(part) +
                         ") outside " + std::to_string(frames_) + " x 10 grid");
  }
  return frame * kNumParts + static_cast<std::size_t>(part);
}

void BodyPartMask::set_frame(std::size_t frame, bool value) {
  for (int p = 0; p < kNumParts; ++p) set(frame, p, value);
}

void BodyPartMask::set_part(int part, bool value) {
  for (std::size_t f = 0; f < frames_; ++f) set(f, part, value);
}

std::size_t BodyPartMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

std::string_view task_name(Task task) { return kTaskNames[static_cast<int>(task)]; }

Task task_from_name(std::string_view name) {
  const std::string n = lower(name);
  for (std::size_t i = 0; i < kTaskNames.size(); ++i) {
    if (kTaskNames[i] == n) return static_cast<Task>(i);
  }
  throw ValidationError("unknown task '" + std::string(name) + "'");
}

void TaskSpec::validate(std::size_t frames) const {
  const auto f = static_cast<long long>(frames);
  switch (task) {
    case Task::MP:
    case Task::CMP:
      if (k < 1 || k >= f) {
        throw ValidationError("prediction boundary k=" + std::to_string(k) +
                              " must satisfy 1 <= k < F=" + std::to_string(f));
      }
      break;
    case Task::MIn:
    case Task::CMI:
      if (k1 < 1 || k1 >= k2 || k2 > f) {
        throw ValidationError("in-betweening boundaries (" + std::to_string(k1) + ", " +
                              std::to_string(k2) + ") must satisfy 1 <= k1 < k2 <= F=" +
                              std::to_string(f));
      }
      break;
    default:
      break;
  }
}

BodyPartMask task_mask(const TaskSpec& spec, std::size_t frames) {
  spec.validate(frames);
  BodyPartMask mask(frames, MaskConvention::Visibility);
  for (std::size_t row = 0; row < frames; ++row) {
    const auto x = static_cast<int>(row) + 1;
    bool visible = false;
    switch (spec.task) {
      case Task::MP:
      case Task::CMP:
        visible = x <= spec.k;
        break;
      case Task::MIn:
      case Task::CMI:
        visible = !(spec.k1 < x && x <= spec.k2);
        break;
      default:
        visible = false;
        break;
    }
    mask.set_frame(row, visible);
  }
  return mask;
}

std::string_view strategy_name(MaskStrategy s) { return kStrategyNames[static_cast<int>(s)]; }

MaskStrategy strategy_from_name(std::string_view name) {
  const std::string n = lower(name);
  for (std::size_t i = 0; i < kStrategyNames.size(); ++i) {
    if (kStrategyNames[i] == n) return static_cast<MaskStrategy>(i);
  }
  throw ValidationError("unknown masking strategy '" + std::string(name) + "'");
}

BodyPartMask random_train_mask(const BodyPartMask& source, double p, MaskStrategy strategy,
                               std::uint64_t seed) {
  if (source.convention() != MaskConvention::Drop) {
    throw ContractError("random_train_mask expects a drop mask");
  }
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("drop probability must lie in [0, 1]");

  BodyPartMask out = source;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const std::size_t frames = source.frames();

  switch (strategy) {
    case MaskStrategy::PerPart:
      for (int part = 0; part < kNumParts; ++part) {
        if (uniform(rng) < p) out.set_part(part, true);
      }
      break;
    case MaskStrategy::PerFrame:
      for (std::size_t f = 0; f < frames; ++f) {
        if (uniform(rng) < p) out.set_frame(f, true);
      }
      break;
    case MaskStrategy::Span: {
      const auto max_len = static_cast<std::size_t>(std::floor(p * static_cast<double>(frames)));
      if (max_len == 0) break;
      std::uniform_int_distribution<std::size_t> len_dist(0, max_len);
      const std::size_t len = len_dist(rng);
      std::uniform_int_distribution<std::size_t> start_dist(0, frames - len);
      const std::size_t start = start_dist(rng);
      for (std::size_t f = start; f < start + len; ++f) out.set_frame(f, true);
      break;
    }
  }
  return out;
}

Eigen::MatrixXd loss_weights(const BodyPartMask& source_drop) {
  if (source_drop.convention() != MaskConvention::Drop) {
    throw ContractError("loss weights are defined from the source drop mask");
  }
  Eigen::MatrixXd w(static_cast<Eigen::Index>(source_drop.frames()), kNumParts);
  for (std::size_t f = 0; f < source_drop.frames(); ++f) {
    for (int p = 0; p < kNumParts; ++p) {
      w(static_cast<Eigen::Index>(f), p) = source_drop.at(f, p) ? 0.0 : 1.0;
    }
  }
  return w;
}

BodyPartMask visibility_to_drop(const BodyPartMask& visibility) {
  if (visibility.convention() != MaskConvention::Visibility) {
    throw ContractError("expected a visibility mask");
  }
  return flipped(visibility, MaskConvention::Drop);
}

BodyPartMask drop_to_visibility(const BodyPartMask& drop) {
  if (drop.convention() != MaskConvention::Drop) throw ContractError("expected a drop mask");
  return flipped(drop, MaskConvention::Visibility);
}

Eigen::MatrixXd expand_to_features(const BodyPartMask& mask) {
  const auto& layout = canonical_layout();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(mask.frames()),
                                              static_cast<Eigen::Index>(kFrameDim));
  for (std::size_t f = 0; f < mask.frames(); ++f) {
    for (int p = 0; p < kNumParts; ++p) {
      if (!mask.at(f, p)) continue;
      for (auto idx : layout.indices(static_cast<Part>(p))) {
        out(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(idx)) = 1.0;
      }
    }
  }
  return out;
}

BodyPartMask missing_parts_mask(const MotionSequence& seq) {
  BodyPartMask mask(seq.frames.size(), MaskConvention::Drop);
  for (int p = 0; p < kNumParts; ++p) {
    if (!seq.parts_present[p]) mask.set_part(p, true);
  }
  return mask;
}

MotionSequence resample(const MotionSequence& seq, int factor) {
  if (factor < 1) throw ValidationError("resampling factor must be a positive integer");
  if (factor == 1) return seq;
  const std::size_t n = seq.frames.size();
  const auto step = static_cast<std::size_t>(factor);
  if (n <= step) {
    throw LengthError("resampling factor " + std::to_string(factor) + " needs more than " +
                      std::to_string(factor) + " frames, sequence has " + std::to_string(n));
  }

  const auto traj = integrate_root(seq);
  const auto world = unified_to_keypoints(seq);

  MotionSequence out = seq;
  out.fps = seq.fps / factor;
  out.frames.clear();
  for (std::size_t i = 0; i < n; i += step) out.frames.push_back(seq.frames[i]);

  const std::size_t kept = out.frames.size();
  for (std::size_t m = 0; m + 1 < kept; ++m) {
    const std::size_t i = m * step;
    const std::size_t next = i + step;
    auto& f = out.frames[m];
    // Summed per-frame yaw changes; left unwrapped so composition stays additive.
    double turn = 0.0;
    for (std::size_t s = i; s < next; ++s) turn += seq.frames[s].root_angular_vel;
    f.root_angular_vel = turn;

    const Mat3 to_local = yaw_rotation(-traj.yaw[i]);
    const Vec3 root_step = to_local * (traj.position[next] - traj.position[i]);
    f.root_lin_vel_x = root_step.x();
    f.root_lin_vel_z = root_step.z();
    for (int j = 0; j < kNumJoints; ++j) {
      f.set_velocity(j, to_local * (world[next][j] - world[i][j]));
    }
  }
  auto& last = out.frames[kept - 1];
  const auto& prev = out.frames[kept - 2];
  last.root_angular_vel = prev.root_angular_vel;
  last.root_lin_vel_x = prev.root_lin_vel_x;
  last.root_lin_vel_z = prev.root_lin_vel_z;
  last.joint_vel = prev.joint_vel;
  return out;
}

}  // namespace unimotion
