#include "unimotion/motion_repr.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "unimotion/errors.hpp"

namespace unimotion {

namespace {

constexpr std::array<std::string_view, kNumParts> kPartNames = {
    "global",   "face",      "head",     "spine",     "left_arm",
    "right_arm", "left_leg", "right_leg", "left_hand", "right_hand"};

void check_joint(int joint, int first) {
  if (joint < first || joint >= kNumJoints) {
    throw ValidationError("joint index " + std::to_string(joint) + " out of range");
  }
}

PartLayout build_canonical_layout() {
  std::array<std::vector<IndexRange>, kNumParts> ranges;
  auto& global = ranges[static_cast<int>(Part::Global)];
  global.push_back({kRootOffset, kRootOffset + 4});
  global.push_back({kJointVelOffset, kJointVelOffset + 3});
  ranges[static_cast<int>(Part::Face)].push_back({kFaceOffset, kFaceOffset + kFaceDim});

  // Per joint: position, velocity and rotation blocks. Adjacent blocks merge.
  auto append = [](std::vector<IndexRange>& out, std::size_t begin, std::size_t size) {
    if (!out.empty() && out.back().end == begin) {
      out.back().end += size;
    } else {
      out.push_back({begin, begin + size});
    }
  };
  for (int component = 0; component < 3; ++component) {
    for (int j = 1; j < kNumJoints; ++j) {
      auto& out = ranges[static_cast<int>(joint_part(j))];
      switch (component) {
        case 0:
          append(out, kJointPosOffset + 3 * static_cast<std::size_t>(j - 1), 3);
          break;
        case 1:
          append(out, kJointVelOffset + 3 * static_cast<std::size_t>(j), 3);
          break;
        default:
          append(out, kJointRotOffset + 6 * static_cast<std::size_t>(j - 1), 6);
          break;
      }
    }
  }
  return PartLayout(std::move(ranges));
}

Skeleton build_default_skeleton() {
  Skeleton s;
  s.rest_root_height = 0.93;
  const std::array<int, 22> body_parents = {-1, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7,
                                            8,  9, 9, 9, 12, 13, 14, 16, 17, 18, 19};
  const std::array<Vec3, 22> body_offsets = {
      Vec3(0.0, 0.0, 0.0),      Vec3(0.06, -0.09, 0.0),   Vec3(-0.06, -0.09, 0.0),
      Vec3(0.0, 0.11, -0.02),   Vec3(0.04, -0.38, 0.0),   Vec3(-0.04, -0.38, 0.0),
      Vec3(0.0, 0.14, 0.0),     Vec3(-0.01, -0.40, -0.04), Vec3(0.01, -0.40, -0.04),
      Vec3(0.0, 0.06, 0.02),    Vec3(0.03, -0.06, 0.12),  Vec3(-0.03, -0.06, 0.12),
      Vec3(0.0, 0.21, -0.03),   Vec3(0.08, 0.12, -0.01),  Vec3(-0.08, 0.12, -0.01),
      Vec3(0.0, 0.09, 0.05),    Vec3(0.12, 0.04, -0.01),  Vec3(-0.12, 0.04, -0.01),
      Vec3(0.26, 0.0, -0.02),   Vec3(-0.26, 0.0, -0.02),  Vec3(0.25, 0.01, 0.0),
      Vec3(-0.25, 0.01, 0.0)};
  for (int j = 0; j < 22; ++j) {
    s.parents[j] = body_parents[j];
    s.offsets[j] = body_offsets[j];
  }
  // Finger chains for the left hand: index, middle, pinky, ring, thumb.
  const std::array<std::array<Vec3, 3>, 5> fingers = {{
      {Vec3(0.09, -0.005, 0.025), Vec3(0.035, 0.0, 0.0), Vec3(0.025, 0.0, 0.0)},
      {Vec3(0.095, -0.005, 0.0), Vec3(0.04, 0.0, 0.0), Vec3(0.027, 0.0, 0.0)},
      {Vec3(0.075, -0.01, -0.04), Vec3(0.025, 0.0, 0.0), Vec3(0.02, 0.0, 0.0)},
      {Vec3(0.085, -0.008, -0.02), Vec3(0.035, 0.0, 0.0), Vec3(0.025, 0.0, 0.0)},
      {Vec3(0.025, -0.015, 0.025), Vec3(0.03, -0.005, 0.02), Vec3(0.025, -0.005, 0.015)},
  }};
  for (int side = 0; side < 2; ++side) {
    const int wrist = side == 0 ? 20 : 21;
    const int base = side == 0 ? 22 : 37;
    const double mirror = side == 0 ? 1.0 : -1.0;
    for (int f = 0; f < 5; ++f) {
      for (int k = 0; k < 3; ++k) {
        const int j = base + 3 * f + k;
        s.parents[j] = k == 0 ? wrist : j - 1;
        Vec3 off = fingers[f][k];
        off.x() *= mirror;
        s.offsets[j] = off;
      }
    }
  }
  return s;
}

}  // namespace

std::string_view part_name(Part part) { return kPartNames[static_cast<int>(part)]; }

Part part_from_name(std::string_view name) {
  for (int p = 0; p < kNumParts; ++p) {
    if (kPartNames[p] == name) return static_cast<Part>(p);
  }
  throw ValidationError("unknown body part '" + std::string(name) + "'");
}

Part joint_part(int joint) {
  check_joint(joint, 0);
  switch (joint) {
    case 0:
      return Part::Global;
    case 3: case 6: case 9:
      return Part::Spine;
    case 12: case 15:
      return Part::Head;
    case 13: case 16: case 18: case 20:
      return Part::LeftArm;
    case 14: case 17: case 19: case 21:
      return Part::RightArm;
    case 1: case 4: case 7: case 10:
      return Part::LeftLeg;
    case 2: case 5: case 8: case 11:
      return Part::RightLeg;
    default:
      return joint <= 36 ? Part::LeftHand : Part::RightHand;
  }
}

Vec3 UnifiedFrame::position(int joint) const {
  check_joint(joint, 1);
  const auto* p = &joint_pos[3 * (joint - 1)];
  return {p[0], p[1], p[2]};
}

void UnifiedFrame::set_position(int joint, const Vec3& v) {
  check_joint(joint, 1);
  auto* p = &joint_pos[3 * (joint - 1)];
  p[0] = v.x();
  p[1] = v.y();
  p[2] = v.z();
}

Vec3 UnifiedFrame::velocity(int joint) const {
  check_joint(joint, 0);
  const auto* p = &joint_vel[3 * joint];
  return {p[0], p[1], p[2]};
}

void UnifiedFrame::set_velocity(int joint, const Vec3& v) {
  check_joint(joint, 0);
  auto* p = &joint_vel[3 * joint];
  p[0] = v.x();
  p[1] = v.y();
  p[2] = v.z();
}

std::span<const double, 6> UnifiedFrame::rotation6d(int joint) const {
  check_joint(joint, 1);
  return std::span<const double, 6>(&joint_rot[6 * (joint - 1)], 6);
}

std::span<double, 6> UnifiedFrame::rotation6d(int joint) {
  check_joint(joint, 1);
  return std::span<double, 6>(&joint_rot[6 * (joint - 1)], 6);
}

FrameVector pack(const UnifiedFrame& frame) {
  FrameVector out{};
  out[0] = frame.root_angular_vel;
  out[1] = frame.root_lin_vel_x;
  out[2] = frame.root_lin_vel_z;
  out[3] = frame.root_height;
  std::copy(frame.joint_pos.begin(), frame.joint_pos.end(), out.begin() + kJointPosOffset);
  std::copy(frame.joint_vel.begin(), frame.joint_vel.end(), out.begin() + kJointVelOffset);
  std::copy(frame.joint_rot.begin(), frame.joint_rot.end(), out.begin() + kJointRotOffset);
  std::copy(frame.face.begin(), frame.face.end(), out.begin() + kFaceOffset);
  return out;
}

UnifiedFrame unpack(std::span<const double> vec) {
  if (vec.size() != kFrameDim) {
    throw DimensionError("frame vector has " + std::to_string(vec.size()) +
                         " values, expected " + std::to_string(kFrameDim));
  }
  UnifiedFrame f;
  f.root_angular_vel = vec[0];
  f.root_lin_vel_x = vec[1];
  f.root_lin_vel_z = vec[2];
  f.root_height = vec[3];
  auto copy_out = [&](std::size_t offset, auto& dst) {
    std::copy_n(vec.begin() + static_cast<std::ptrdiff_t>(offset), dst.size(), dst.begin());
  };
  copy_out(kJointPosOffset, f.joint_pos);
  copy_out(kJointVelOffset, f.joint_vel);
  copy_out(kJointRotOffset, f.joint_rot);
  copy_out(kFaceOffset, f.face);
  return f;
}

void validate(const MotionSequence& seq) {
  if (seq.frames.empty()) throw ValidationError("motion sequence has no frames");
  if (!(seq.fps > 0.0) || !std::isfinite(seq.fps)) {
    throw ValidationError("fps must be positive and finite");
  }
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    const auto v = pack(seq.frames[i]);
    if (!std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); })) {
      throw ValidationError("frame " + std::to_string(i) + " contains non-finite values");
    }
  }
}

Eigen::MatrixXd to_matrix(const MotionSequence& seq) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(seq.frames.size()),
                      static_cast<Eigen::Index>(kFrameDim));
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    const auto v = pack(seq.frames[i]);
    for (std::size_t d = 0; d < kFrameDim; ++d) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = v[d];
    }
  }
  return out;
}

MotionSequence from_matrix(const Eigen::MatrixXd& data, const MotionSequence& like) {
  if (data.cols() != static_cast<Eigen::Index>(kFrameDim)) {
    throw DimensionError("motion matrix must have 669 columns");
  }
  MotionSequence out = like;
  out.frames.resize(static_cast<std::size_t>(data.rows()));
  FrameVector row{};
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index d = 0; d < data.cols(); ++d) row[static_cast<std::size_t>(d)] = data(i, d);
    out.frames[static_cast<std::size_t>(i)] = unpack(row);
  }
  return out;
}

PartLayout::PartLayout(std::array<std::vector<IndexRange>, kNumParts> ranges)
    : ranges_(std::move(ranges)) {
  std::array<int, kFrameDim> hits{};
  for (int p = 0; p < kNumParts; ++p) {
    for (const auto& r : ranges_[p]) {
      if (r.begin > r.end || r.end > kFrameDim) {
        throw ValidationError("part range out of bounds");
      }
      sizes_[p] += r.size();
      for (std::size_t i = r.begin; i < r.end; ++i) {
        ++hits[i];
        owner_[i] = static_cast<Part>(p);
        indices_[p].push_back(i);
      }
    }
    std::sort(indices_[p].begin(), indices_[p].end());
  }
  for (std::size_t i = 0; i < kFrameDim; ++i) {
    if (hits[i] != 1) {
      throw ValidationError("part layout is not a partition at index " + std::to_string(i));
    }
  }
}

std::size_t PartLayout::total_size() const noexcept {
  std::size_t total = 0;
  for (auto s : sizes_) total += s;
  return total;
}

Part PartLayout::part_of(std::size_t index) const {
  if (index >= kFrameDim) throw DimensionError("index outside the frame vector");
  return owner_[index];
}

const PartLayout& canonical_layout() {
  static const PartLayout layout = build_canonical_layout();
  return layout;
}

Mat3 rot6d_to_matrix(std::span<const double, 6> r6) {
  const Vec3 a1(r6[0], r6[1], r6[2]);
  const Vec3 a2(r6[3], r6[4], r6[5]);
  const double n1 = a1.norm();
  if (!(n1 > 0.0) || !std::isfinite(n1)) {
    throw SingularityError("6D rotation has a zero first column");
  }
  const Vec3 b1 = a1 / n1;
  const Vec3 ortho = a2 - b1.dot(a2) * b1;
  const double n2 = ortho.norm();
  // |ortho| / |a2| is the sine of the angle between the columns.
  if (!(n2 > 1e-9 * a2.norm()) || !std::isfinite(n2)) {
    throw SingularityError("6D rotation columns are parallel");
  }
  const Vec3 b2 = ortho / n2;
  Mat3 m;
  m.col(0) = b1;
  m.col(1) = b2;
  m.col(2) = b1.cross(b2);
  return m;
}

std::array<double, 6> matrix_to_rot6d(const Mat3& m) {
  return {m(0, 0), m(1, 0), m(2, 0), m(0, 1), m(1, 1), m(2, 1)};
}

Mat3 yaw_rotation(double yaw) {
  return Eigen::AngleAxisd(yaw, Vec3::UnitY()).toRotationMatrix();
}

double wrap_angle(double radians) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(radians + std::numbers::pi, two_pi);
  if (r < 0.0) r += two_pi;
  return r - std::numbers::pi;
}

void Skeleton::validate() const {
  if (parents[0] >= 0) throw ValidationError("root joint must have a sentinel parent");
  for (int j = 1; j < kNumJoints; ++j) {
    if (parents[j] < 0 || parents[j] >= j) {
      throw ValidationError("skeleton is not topologically ordered at joint " +
                            std::to_string(j));
    }
  }
}

const Skeleton& default_skeleton() {
  static const Skeleton skeleton = build_default_skeleton();
  return skeleton;
}

JointPositions forward_kinematics(const Skeleton& skeleton, const Vec3& root_pos,
                                  const JointRotations& rotations) {
  skeleton.validate();
  JointPositions pos{};
  std::array<Mat3, kNumJoints> global{};
  pos[0] = root_pos;
  global[0] = rotations[0];
  for (int j = 1; j < kNumJoints; ++j) {
    const int p = skeleton.parents[j];
    pos[j] = pos[p] + global[p] * skeleton.offsets[j];
    global[j] = global[p] * rotations[j];
  }
  return pos;
}

JointPositions rest_pose(const Skeleton& skeleton) {
  JointRotations identity;
  identity.fill(Mat3::Identity());
  return forward_kinematics(skeleton, Vec3::Zero(), identity);
}

double estimate_yaw(const JointPositions& p) {
  constexpr int kLeftHip = 1, kRightHip = 2, kLeftShoulder = 16, kRightShoulder = 17;
  Vec3 across = (p[kLeftHip] - p[kRightHip]) + (p[kLeftShoulder] - p[kRightShoulder]);
  across.y() = 0.0;
  if (across.norm() < 1e-12) return 0.0;
  const Vec3 forward = across.cross(Vec3::UnitY());
  return std::atan2(forward.x(), forward.z());
}

MotionSequence keypoints_to_unified(std::span<const JointPositions> positions, double fps,
                                    const InverseKinematics& ik) {
  if (positions.empty()) throw ValidationError("keypoint sequence has no frames");
  if (!(fps > 0.0) || !std::isfinite(fps)) throw ValidationError("fps must be positive");
  for (std::size_t t = 0; t < positions.size(); ++t) {
    for (const auto& p : positions[t]) {
      if (!p.allFinite()) {
        throw ValidationError("keypoints at frame " + std::to_string(t) + " are not finite");
      }
    }
  }

  const std::size_t n = positions.size();
  std::vector<double> yaw(n);
  for (std::size_t t = 0; t < n; ++t) yaw[t] = estimate_yaw(positions[t]);

  MotionSequence seq;
  seq.fps = fps;
  seq.frames.resize(n);
  seq.anchor = {positions[0][0].x(), positions[0][0].z(), yaw[0]};
  seq.metadata["rotation_source"] = ik ? "ik" : "identity";

  for (std::size_t t = 0; t < n; ++t) {
    auto& f = seq.frames[t];
    const auto& p = positions[t];
    const Mat3 to_local = yaw_rotation(-yaw[t]);
    f.root_height = p[0].y();
    for (int j = 1; j < kNumJoints; ++j) f.set_position(j, to_local * (p[j] - p[0]));

    if (ik) {
      const JointRotations rot = ik(p, t);
      for (int j = 1; j < kNumJoints; ++j) {
        const auto r6 = matrix_to_rot6d(rot[j]);
        std::copy(r6.begin(), r6.end(), f.rotation6d(j).begin());
      }
    } else {
      for (int j = 1; j < kNumJoints; ++j) {
        std::copy(kIdentityRot6d.begin(), kIdentityRot6d.end(), f.rotation6d(j).begin());
      }
    }

    if (t + 1 < n) {
      const auto& next = positions[t + 1];
      f.root_angular_vel = wrap_angle(yaw[t + 1] - yaw[t]);
      const Vec3 root_step = to_local * (next[0] - p[0]);
      f.root_lin_vel_x = root_step.x();
      f.root_lin_vel_z = root_step.z();
      for (int j = 0; j < kNumJoints; ++j) f.set_velocity(j, to_local * (next[j] - p[j]));
    } else if (n > 1) {
      const auto& prev = seq.frames[t - 1];
      f.root_angular_vel = prev.root_angular_vel;
      f.root_lin_vel_x = prev.root_lin_vel_x;
      f.root_lin_vel_z = prev.root_lin_vel_z;
      f.joint_vel = prev.joint_vel;
    }
  }
  return seq;
}

MotionSequence complete_missing_parts(const MotionSequence& seq, const Skeleton& skeleton) {
  MotionSequence out = seq;
  const auto rest = rest_pose(skeleton);
  for (int part = 0; part < kNumParts; ++part) {
    if (seq.parts_present[part]) continue;
    const Part which = static_cast<Part>(part);
    for (auto& f : out.frames) {
      if (which == Part::Global) {
        f.root_angular_vel = 0.0;
        f.root_lin_vel_x = 0.0;
        f.root_lin_vel_z = 0.0;
        f.root_height = skeleton.rest_root_height;
        f.set_velocity(0, Vec3::Zero());
        continue;
      }
      if (which == Part::Face) {
        f.face.fill(0.0);
        continue;
      }
      for (int j = 1; j < kNumJoints; ++j) {
        if (joint_part(j) != which) continue;
        f.set_position(j, rest[j]);
        f.set_velocity(j, Vec3::Zero());
        std::copy(kIdentityRot6d.begin(), kIdentityRot6d.end(), f.rotation6d(j).begin());
      }
    }
  }
  return out;
}

}  // namespace unimotion

namespace unimotion {

RootTrajectory integrate_root(const MotionSequence& seq) {
  RootTrajectory traj;
  const std::size_t n = seq.frames.size();
  traj.yaw.resize(n);
  traj.position.resize(n);
  double yaw = seq.anchor.yaw;
  double x = seq.anchor.x;
  double z = seq.anchor.z;
  for (std::size_t t = 0; t < n; ++t) {
    const auto& f = seq.frames[t];
    traj.yaw[t] = yaw;
    traj.position[t] = Vec3(x, f.root_height, z);
    const Vec3 step = yaw_rotation(yaw) * Vec3(f.root_lin_vel_x, 0.0, f.root_lin_vel_z);
    x += step.x();
    z += step.z();
    yaw += f.root_angular_vel;
  }
  return traj;
}

std::vector<JointPositions> unified_to_keypoints(const MotionSequence& seq) {
  const auto traj = integrate_root(seq);
  std::vector<JointPositions> out(seq.frames.size());
  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    const Mat3 to_world = yaw_rotation(traj.yaw[t]);
    out[t][0] = traj.position[t];
    for (int j = 1; j < kNumJoints; ++j) {
      out[t][j] = traj.position[t] + to_world * seq.frames[t].position(j);
    }
  }
  return out;
}

}  // namespace unimotion
