#pragma once

// Unified per-frame pose vector, its ten body-part partition, 6D rotations,
// forward kinematics and keypoint conversion.

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace unimotion {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr int kNumJoints = 52;   // 22 body + 2 x 15 hand joints
inline constexpr int kNumParts = 10;
inline constexpr int kFaceDim = 50;
inline constexpr std::size_t kFrameDim = 669;

// Offsets into the packed frame vector.
inline constexpr std::size_t kRootOffset = 0;       // (ang vel, lin vel x, lin vel z, height)
inline constexpr std::size_t kJointPosOffset = 4;   // joints 1..51, 3 each
inline constexpr std::size_t kJointVelOffset = 157; // joints 0..51, 3 each
inline constexpr std::size_t kJointRotOffset = 313; // joints 1..51, 6 each
inline constexpr std::size_t kFaceOffset = 619;

enum class Part : int {
  Global = 0,
  Face,
  Head,
  Spine,
  LeftArm,
  RightArm,
  LeftLeg,
  RightLeg,
  LeftHand,
  RightHand,
};

std::string_view part_name(Part part);
/// Inverse of part_name; throws ValidationError on an unknown name.
Part part_from_name(std::string_view name);

/// Which body part a joint belongs to. Joint 0 (root) belongs to Global.
Part joint_part(int joint);

struct UnifiedFrame {
  double root_angular_vel = 0.0;  // radians/frame about +Y
  double root_lin_vel_x = 0.0;    // meters/frame, root-yaw frame
  double root_lin_vel_z = 0.0;
  double root_height = 0.0;       // meters
  std::array<double, 3 * (kNumJoints - 1)> joint_pos{};
  std::array<double, 3 * kNumJoints> joint_vel{};
  std::array<double, 6 * (kNumJoints - 1)> joint_rot{};
  std::array<double, kFaceDim> face{};

  bool operator==(const UnifiedFrame&) const = default;

  /// Root-relative position of joint j in [1, 52).
  Vec3 position(int joint) const;
  void set_position(int joint, const Vec3& p);
  /// Per-frame displacement of joint j in [0, 52).
  Vec3 velocity(int joint) const;
  void set_velocity(int joint, const Vec3& v);
  std::span<const double, 6> rotation6d(int joint) const;
  std::span<double, 6> rotation6d(int joint);
};

using FrameVector = std::array<double, kFrameDim>;

FrameVector pack(const UnifiedFrame& frame);
UnifiedFrame unpack(std::span<const double> vec);

/// Frame-0 placement of the root. The unified representation is invariant to
/// it; it is kept so keypoints can be reconstructed in world coordinates.
struct RootAnchor {
  double x = 0.0;
  double z = 0.0;
  double yaw = 0.0;

  bool operator==(const RootAnchor&) const = default;
};

struct MotionSequence {
  std::vector<UnifiedFrame> frames;
  double fps = 30.0;
  std::array<bool, kNumParts> parts_present{true, true, true, true, true,
                                            true, true, true, true, true};
  std::string dataset = "all";
  RootAnchor anchor;
  std::map<std::string, std::string> metadata;

  std::size_t num_frames() const noexcept { return frames.size(); }
  bool operator==(const MotionSequence&) const = default;
};

/// Throws ValidationError when F < 1, fps <= 0 or values are not finite.
void validate(const MotionSequence& seq);

/// Flattens to an F x 669 row-major matrix.
Eigen::MatrixXd to_matrix(const MotionSequence& seq);
/// Replaces frame data from an F x 669 matrix, keeping metadata of `like`.
MotionSequence from_matrix(const Eigen::MatrixXd& data, const MotionSequence& like);

struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive

  std::size_t size() const noexcept { return end - begin; }
};

class PartLayout {
 public:
  explicit PartLayout(std::array<std::vector<IndexRange>, kNumParts> ranges);

  const std::vector<IndexRange>& ranges(Part part) const {
    return ranges_[static_cast<int>(part)];
  }
  std::size_t size(Part part) const { return sizes_[static_cast<int>(part)]; }
  std::size_t total_size() const noexcept;
  /// Flat list of vector indices owned by a part, ascending.
  const std::vector<std::size_t>& indices(Part part) const {
    return indices_[static_cast<int>(part)];
  }
  Part part_of(std::size_t index) const;

 private:
  std::array<std::vector<IndexRange>, kNumParts> ranges_;
  std::array<std::size_t, kNumParts> sizes_{};
  std::array<std::vector<std::size_t>, kNumParts> indices_;
  std::array<Part, kFrameDim> owner_{};
};

/// The fixed layout used throughout the toolkit.
const PartLayout& canonical_layout();

/// Gram-Schmidt reconstruction from the first two columns.
/// Throws SingularityError for a zero first column or (near-)parallel columns.
Mat3 rot6d_to_matrix(std::span<const double, 6> r6);
std::array<double, 6> matrix_to_rot6d(const Mat3& m);
inline constexpr std::array<double, 6> kIdentityRot6d{1.0, 0.0, 0.0, 0.0, 1.0, 0.0};

Mat3 yaw_rotation(double yaw);

struct Skeleton {
  std::array<int, kNumJoints> parents{};
  std::array<Vec3, kNumJoints> offsets{};  // rest offset from parent, meters
  double rest_root_height = 0.0;

  /// Throws ValidationError unless parents[0] < 0 and parents[i] < i otherwise.
  void validate() const;
};

/// SMPL-X style 52-joint hierarchy (body + both hands) with approximate
/// adult rest offsets. +X points to the body's left, +Z forward, +Y up.
const Skeleton& default_skeleton();

using JointPositions = std::array<Vec3, kNumJoints>;
using JointRotations = std::array<Mat3, kNumJoints>;

/// Global joint positions from local rotations. rotations[0] is the root's
/// global orientation.
JointPositions forward_kinematics(const Skeleton& skeleton, const Vec3& root_pos,
                                  const JointRotations& rotations);

/// Root-relative rest-pose positions of every joint (index 0 is the origin).
JointPositions rest_pose(const Skeleton& skeleton);

/// Hook that supplies local joint rotations for frames given only keypoints.
using InverseKinematics =
    std::function<JointRotations(const JointPositions& positions, std::size_t frame)>;

/// Yaw of the body around +Y estimated from hips and shoulders. Rest pose is 0.
double estimate_yaw(const JointPositions& positions);

/// Builds the unified representation from world-space keypoints. Without an
/// IK hook, rotations are identity and metadata["rotation_source"] is "identity".
MotionSequence keypoints_to_unified(std::span<const JointPositions> positions, double fps,
                                    const InverseKinematics& ik = {});

/// Fills parts flagged absent with rest-pose defaults.
MotionSequence complete_missing_parts(const MotionSequence& seq,
                                      const Skeleton& skeleton = default_skeleton());

double wrap_angle(double radians);

/// World-space root state recovered by integrating the per-frame root
/// velocities from the sequence anchor.
struct RootTrajectory {
  std::vector<double> yaw;
  std::vector<Vec3> position;
};
RootTrajectory integrate_root(const MotionSequence& seq);

/// World-space joint positions: integrated root plus yaw-rotated local positions.
std::vector<JointPositions> unified_to_keypoints(const MotionSequence& seq);

}  // namespace unimotion
