#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "unimotion/motion_repr.hpp"

namespace unimotion {

enum class SynthPattern { Static, ConstantVelocity, SineWalk };

std::string_view pattern_name(SynthPattern p);
SynthPattern pattern_from_name(std::string_view name);

/// Root step of the constant_velocity pattern, meters/frame along +X.
inline constexpr double kSynthStep = 0.1;

/// Synthetic motion built from forward kinematics on the default skeleton and
/// converted with keypoints_to_unified, so velocity channels are consistent
/// with the states. sine_walk is a function of real time (period 1 s), so
/// different frame rates sample the same underlying motion.
MotionSequence synth_motion(SynthPattern pattern, std::size_t frames, double fps,
                            std::uint64_t seed);

}  // namespace unimotion
