#include "unimotion/synth.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "unimotion/errors.hpp"

namespace unimotion {

namespace {

constexpr std::array<std::string_view, 3> kPatternNames = {"static", "constant_velocity",
                                                           "sine_walk"};

Mat3 rot_x(double a) { return Eigen::AngleAxisd(a, Vec3::UnitX()).toRotationMatrix(); }
Mat3 rot_z(double a) { return Eigen::AngleAxisd(a, Vec3::UnitZ()).toRotationMatrix(); }

struct WalkParams {
  double leg_amp;
  double arm_amp;
  double phase;
  double yaw_amp;
  std::array<double, kFaceDim> face_phase;
};

WalkParams draw_params(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  WalkParams w{};
  w.leg_amp = 0.35 + 0.15 * u(rng);
  w.arm_amp = 0.25 + 0.15 * u(rng);
  w.phase = 2.0 * std::numbers::pi * u(rng);
  w.yaw_amp = 0.1 + 0.2 * u(rng);
  for (auto& p : w.face_phase) p = 2.0 * std::numbers::pi * u(rng);
  return w;
}

JointRotations walk_rotations(const WalkParams& w, double time) {
  JointRotations r;
  r.fill(Mat3::Identity());
  const double s = std::sin(2.0 * std::numbers::pi * time + w.phase);
  const double c = std::cos(2.0 * std::numbers::pi * time + w.phase);
  r[0] = yaw_rotation(w.yaw_amp * std::sin(std::numbers::pi * time));
  r[1] = rot_x(w.leg_amp * s);             // left hip
  r[2] = rot_x(-w.leg_amp * s);            // right hip
  r[4] = rot_x(0.5 * w.leg_amp * (1.0 - c));  // left knee
  r[5] = rot_x(0.5 * w.leg_amp * (1.0 + c));  // right knee
  r[3] = rot_x(0.05 * s);
  r[16] = rot_z(-1.2) * rot_x(-w.arm_amp * s);  // left shoulder, arms lowered
  r[17] = rot_z(1.2) * rot_x(w.arm_amp * s);
  r[18] = rot_x(-0.3 - 0.2 * c);
  r[19] = rot_x(-0.3 + 0.2 * c);
  for (int j = 22; j < kNumJoints; ++j) r[j] = rot_z((j < 37 ? -1.0 : 1.0) * 0.15 * (1.0 + s));
  return r;
}

}  // namespace

std::string_view pattern_name(SynthPattern p) { return kPatternNames[static_cast<int>(p)]; }

SynthPattern pattern_from_name(std::string_view name) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  for (std::size_t i = 0; i < kPatternNames.size(); ++i) {
    if (kPatternNames[i] == n) return static_cast<SynthPattern>(i);
  }
  throw ValidationError("unknown synthetic pattern '" + std::string(name) + "'");
}

MotionSequence synth_motion(SynthPattern pattern, std::size_t frames, double fps,
                            std::uint64_t seed) {
  if (frames < 2) throw ValidationError("synthetic motion needs at least 2 frames");
  if (!(fps > 0.0)) throw ValidationError("fps must be positive");

  const Skeleton& skel = default_skeleton();
  const WalkParams walk = draw_params(seed);
  std::vector<JointPositions> positions(frames);
  std::vector<JointRotations> rotations(frames);

  for (std::size_t k = 0; k < frames; ++k) {
    const double time = static_cast<double>(k) / fps;
    Vec3 root(0.0, skel.rest_root_height, 0.0);
    JointRotations rot;
    rot.fill(Mat3::Identity());
    switch (pattern) {
      case SynthPattern::Static:
        break;
      case SynthPattern::ConstantVelocity:
        root.x() = kSynthStep * static_cast<double>(k);
        break;
      case SynthPattern::SineWalk:
        rot = walk_rotations(walk, time);
        root.z() = 1.2 * time;
        root.y() += 0.02 * std::sin(4.0 * std::numbers::pi * time + walk.phase);
        break;
    }
    rotations[k] = rot;
    positions[k] = forward_kinematics(skel, root, rot);
  }

  MotionSequence seq = keypoints_to_unified(
      positions, fps, [&](const JointPositions&, std::size_t frame) { return rotations[frame]; });
  seq.metadata["rotation_source"] = "synthetic";
  seq.metadata["pattern"] = std::string(pattern_name(pattern));
  seq.dataset = "synthetic";
  if (pattern == SynthPattern::SineWalk) {
    for (std::size_t k = 0; k < frames; ++k) {
      const double time = static_cast<double>(k) / fps;
      for (int i = 0; i < kFaceDim; ++i) {
        seq.frames[k].face[static_cast<std::size_t>(i)] =
            0.5 * std::sin(2.0 * std::numbers::pi * time + walk.face_phase[static_cast<std::size_t>(i)]);
      }
    }
  }
  return seq;
}

}  // namespace unimotion
