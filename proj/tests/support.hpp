#pragma once

// Hand-rolled generators shared by the unit and acceptance tests.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Geometry>

#include "unimotion/motion_repr.hpp"

namespace testing_support {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline unimotion::Mat3 random_rotation(Rng& rng) {
  // Uniform unit quaternion.
  std::normal_distribution<double> n;
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

inline unimotion::UnifiedFrame random_frame(Rng& rng) {
  std::array<double, unimotion::kFrameDim> v{};
  for (auto& x : v) x = uniform(rng, -3.0, 3.0);
  return unimotion::unpack(v);
}

inline unimotion::MotionSequence random_sequence(Rng& rng, std::size_t frames, double fps = 30.0) {
  unimotion::MotionSequence seq;
  seq.fps = fps;
  for (std::size_t f = 0; f < frames; ++f) seq.frames.push_back(random_frame(rng));
  return seq;
}

inline unimotion::JointRotations identity_rotations() {
  unimotion::JointRotations r;
  r.fill(unimotion::Mat3::Identity());
  return r;
}

// Rest skeleton posed at a root position and heading.
inline unimotion::JointPositions posed(const unimotion::Vec3& root, double yaw) {
  auto rot = identity_rotations();
  rot[0] = unimotion::yaw_rotation(yaw);
  const auto& sk = unimotion::default_skeleton();
  return unimotion::forward_kinematics(sk, root, rot);
}

inline Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols,
                                     double scale = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = uniform(rng, -scale, scale);
  }
  return m;
}

}  // namespace testing_support
