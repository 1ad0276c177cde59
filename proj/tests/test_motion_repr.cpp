#include <doctest.h>

#include <cmath>
#include <set>

#include "support.hpp"
#include "unimotion/errors.hpp"
#include "unimotion/motion_repr.hpp"

using namespace unimotion;
namespace ts = testing_support;

TEST_CASE("canonical layout sizes and offsets") {
  const auto& layout = canonical_layout();
  CHECK(layout.total_size() == 669);
  CHECK(layout.size(Part::Global) == 7);
  CHECK(layout.size(Part::Face) == 50);
  CHECK(layout.size(Part::Head) == 24);
  CHECK(layout.size(Part::Spine) == 36);
  CHECK(layout.size(Part::LeftArm) == 48);
  CHECK(layout.size(Part::RightArm) == 48);
  CHECK(layout.size(Part::LeftLeg) == 48);
  CHECK(layout.size(Part::RightLeg) == 48);
  CHECK(layout.size(Part::LeftHand) == 180);
  CHECK(layout.size(Part::RightHand) == 180);

  // Trailing face block: 669 - (4 + 153 + 156 + 306) = 50 dims.
  const auto& face = layout.indices(Part::Face);
  CHECK(face.front() == 619);
  CHECK(face.back() == 668);
  CHECK(4 + 153 + 156 + 306 + 50 == 669);

  const auto& global = layout.indices(Part::Global);
  CHECK(global == std::vector<std::size_t>{0, 1, 2, 3, 157, 158, 159});
}

TEST_CASE("layout is a disjoint exhaustive cover") {
  const auto& layout = canonical_layout();
  std::vector<int> owners(kFrameDim, 0);
  for (int p = 0; p < kNumParts; ++p) {
    for (auto i : layout.indices(static_cast<Part>(p))) {
      ++owners[i];
      CHECK(layout.part_of(i) == static_cast<Part>(p));
    }
  }
  for (auto c : owners) CHECK(c == 1);
}

TEST_CASE("joint assignment follows the body grouping") {
  CHECK(joint_part(0) == Part::Global);
  for (int j : {3, 6, 9}) CHECK(joint_part(j) == Part::Spine);
  for (int j : {12, 15}) CHECK(joint_part(j) == Part::Head);
  for (int j : {13, 16, 18, 20}) CHECK(joint_part(j) == Part::LeftArm);
  for (int j : {14, 17, 19, 21}) CHECK(joint_part(j) == Part::RightArm);
  for (int j : {1, 4, 7, 10}) CHECK(joint_part(j) == Part::LeftLeg);
  for (int j : {2, 5, 8, 11}) CHECK(joint_part(j) == Part::RightLeg);
  for (int j = 22; j <= 36; ++j) CHECK(joint_part(j) == Part::LeftHand);
  for (int j = 37; j <= 51; ++j) CHECK(joint_part(j) == Part::RightHand);
  CHECK_THROWS_AS(joint_part(52), ValidationError);
}

TEST_CASE("part names round-trip") {
  for (int p = 0; p < kNumParts; ++p) {
    CHECK(part_from_name(part_name(static_cast<Part>(p))) == static_cast<Part>(p));
  }
  CHECK_THROWS_AS(part_from_name("tail"), ValidationError);
}

TEST_CASE("pack and unpack") {
  const UnifiedFrame zero;
  const auto v = pack(zero);
  CHECK(v.size() == 669);
  for (double x : v) CHECK(x == 0.0);

  UnifiedFrame f;
  f.root_height = 1.0;
  CHECK(pack(f)[3] == 1.0);

  ts::Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto frame = ts::random_frame(rng);
    CHECK(unpack(pack(frame)) == frame);
    const auto vec = pack(frame);
    CHECK(pack(unpack(vec)) == vec);
  }

  std::vector<double> short_vec(668, 0.0);
  CHECK_THROWS_AS(unpack(short_vec), DimensionError);
}

TEST_CASE("field accessors address the documented offsets") {
  UnifiedFrame f;
  f.set_position(1, Vec3(1, 2, 3));
  f.set_velocity(0, Vec3(4, 5, 6));
  f.rotation6d(51)[5] = 7.0;
  f.face[49] = 8.0;
  const auto v = pack(f);
  CHECK(v[4] == 1.0);
  CHECK(v[6] == 3.0);
  CHECK(v[157] == 4.0);
  CHECK(v[159] == 6.0);
  CHECK(v[618] == 7.0);
  CHECK(v[668] == 8.0);
}

TEST_CASE("6D rotation conversions") {
  const std::array<double, 6> id{1, 0, 0, 0, 1, 0};
  CHECK(rot6d_to_matrix(id).isApprox(Mat3::Identity(), 1e-15));
  const std::array<double, 6> scaled{2, 0, 0, 0, 3, 0};
  CHECK(rot6d_to_matrix(scaled).isApprox(Mat3::Identity(), 1e-15));

  ts::Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const Mat3 r = ts::random_rotation(rng);
    const auto r6 = matrix_to_rot6d(r);
    CHECK((rot6d_to_matrix(r6) - r).cwiseAbs().maxCoeff() < 1e-6);
  }

  const std::array<double, 6> zero_first{0, 0, 0, 0, 1, 0};
  CHECK_THROWS_AS(rot6d_to_matrix(zero_first), SingularityError);
  const std::array<double, 6> parallel{1, 0, 0, 2, 0, 0};
  CHECK_THROWS_AS(rot6d_to_matrix(parallel), SingularityError);
}

TEST_CASE("property: Gram-Schmidt output is a proper rotation") {
  ts::Rng rng(6);
  for (int i = 0; i < 500; ++i) {
    std::array<double, 6> r6;
    for (auto& x : r6) x = ts::uniform(rng, -5, 5);
    const Mat3 m = rot6d_to_matrix(r6);
    CHECK((m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(std::abs(m.determinant() - 1.0) < 1e-6);
  }
}

TEST_CASE("skeleton ordering") {
  const auto& sk = default_skeleton();
  CHECK(sk.parents[0] < 0);
  for (int j = 1; j < kNumJoints; ++j) {
    CHECK(sk.parents[j] >= 0);
    CHECK(sk.parents[j] < j);
  }
  Skeleton bad = sk;
  bad.parents[5] = 7;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("forward kinematics examples") {
  Skeleton sk = default_skeleton();
  sk.offsets[1] = Vec3(0, 1, 0);  // joint 1 hangs off the root
  auto rot = ts::identity_rotations();
  CHECK(forward_kinematics(sk, Vec3::Zero(), rot)[1].isApprox(Vec3(0, 1, 0), 1e-15));

  rot[0] = Eigen::AngleAxisd(M_PI / 2, Vec3::UnitZ()).toRotationMatrix();
  CHECK((forward_kinematics(sk, Vec3::Zero(), rot)[1] - Vec3(-1, 0, 0)).norm() < 1e-6);

  const auto a = forward_kinematics(sk, Vec3::Zero(), rot);
  const auto b = forward_kinematics(sk, Vec3(1, 2, 3), rot);
  for (int j = 0; j < kNumJoints; ++j) CHECK((b[j] - a[j] - Vec3(1, 2, 3)).norm() < 1e-12);
}

TEST_CASE("property: forward kinematics is equivariant under root rigid motion") {
  ts::Rng rng(8);
  const auto& sk = default_skeleton();
  for (int trial = 0; trial < 50; ++trial) {
    JointRotations rot;
    for (auto& r : rot) r = ts::random_rotation(rng);
    const Vec3 root(ts::uniform(rng, -2, 2), ts::uniform(rng, 0, 2), ts::uniform(rng, -2, 2));
    const Mat3 g = ts::random_rotation(rng);
    const Vec3 shift(ts::uniform(rng, -2, 2), ts::uniform(rng, -2, 2), ts::uniform(rng, -2, 2));

    const auto base = forward_kinematics(sk, root, rot);
    JointRotations moved_rot = rot;
    moved_rot[0] = g * rot[0];
    const auto moved = forward_kinematics(sk, g * root + shift, moved_rot);
    for (int j = 0; j < kNumJoints; ++j) {
      CHECK((moved[j] - (g * base[j] + shift)).norm() < 1e-9);
    }
  }
}

TEST_CASE("keypoints_to_unified examples") {
  SUBCASE("static skeleton has zero velocities") {
    std::vector<JointPositions> frames(6, ts::posed(Vec3(0, 0.9, 0), 0.3));
    const auto seq = keypoints_to_unified(frames, 30.0);
    for (const auto& f : seq.frames) {
      CHECK(f.root_angular_vel == 0.0);
      CHECK(f.root_lin_vel_x == 0.0);
      CHECK(f.root_lin_vel_z == 0.0);
      for (double v : f.joint_vel) CHECK(v == 0.0);
    }
    CHECK(seq.metadata.at("rotation_source") == "identity");
  }
  SUBCASE("root translating along world X") {
    std::vector<JointPositions> frames;
    for (int k = 0; k < 8; ++k) frames.push_back(ts::posed(Vec3(0.1 * k, 0.9, 0), 0.0));
    const auto seq = keypoints_to_unified(frames, 30.0);
    for (const auto& f : seq.frames) {
      CHECK(f.root_lin_vel_x == doctest::Approx(0.1).epsilon(1e-12));
      CHECK(std::abs(f.root_lin_vel_z) < 1e-12);
      CHECK(std::abs(f.root_angular_vel) < 1e-12);
    }
  }
  SUBCASE("turning in place") {
    std::vector<JointPositions> frames;
    for (int k = 0; k < 10; ++k) frames.push_back(ts::posed(Vec3(0.4, 0.9, -0.2), 0.05 * k));
    const auto seq = keypoints_to_unified(frames, 30.0);
    for (const auto& f : seq.frames) {
      CHECK(std::abs(f.root_angular_vel - 0.05) < 1e-9);
      CHECK(std::abs(f.root_lin_vel_x) < 1e-9);
      CHECK(std::abs(f.root_lin_vel_z) < 1e-9);
    }
  }
  SUBCASE("single frame yields zero velocities") {
    std::vector<JointPositions> frames(1, ts::posed(Vec3(1, 0.9, 2), 1.0));
    const auto seq = keypoints_to_unified(frames, 30.0);
    REQUIRE(seq.frames.size() == 1);
    for (double v : seq.frames[0].joint_vel) CHECK(v == 0.0);
  }
  SUBCASE("non-finite input is rejected") {
    std::vector<JointPositions> frames(3, ts::posed(Vec3(0, 0.9, 0), 0.0));
    frames[1][7].x() = std::nan("");
    CHECK_THROWS_AS(keypoints_to_unified(frames, 30.0), ValidationError);
  }
}

TEST_CASE("root height and relative positions") {
  std::vector<JointPositions> frames(3, ts::posed(Vec3(2.0, 1.1, -1.0), 0.0));
  const auto seq = keypoints_to_unified(frames, 30.0);
  CHECK(seq.frames[0].root_height == doctest::Approx(1.1));
  const auto rest = rest_pose(default_skeleton());
  for (int j = 1; j < kNumJoints; ++j) {
    CHECK((seq.frames[0].position(j) - rest[j]).norm() < 1e-12);
  }
}

TEST_CASE("inverse kinematics hook fills rotations") {
  const Mat3 r = Eigen::AngleAxisd(0.4, Vec3::UnitX()).toRotationMatrix();
  std::vector<JointPositions> frames(3, ts::posed(Vec3(0, 0.9, 0), 0.0));
  const InverseKinematics ik = [&](const JointPositions&, std::size_t) {
    auto rot = ts::identity_rotations();
    rot[5] = r;
    return rot;
  };
  const auto seq = keypoints_to_unified(frames, 30.0, ik);
  CHECK(seq.metadata.at("rotation_source") == "ik");
  CHECK((rot6d_to_matrix(seq.frames[0].rotation6d(5)) - r).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("property: keypoint reconstruction inverts the conversion") {
  ts::Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<JointPositions> frames;
    double yaw = ts::uniform(rng, -3, 3);
    Vec3 root(ts::uniform(rng, -1, 1), 0.9, ts::uniform(rng, -1, 1));
    for (int k = 0; k < 12; ++k) {
      auto p = ts::posed(root, yaw);
      for (int j = 1; j < kNumJoints; ++j) {
        p[j] += Vec3(ts::uniform(rng, -0.01, 0.01), ts::uniform(rng, -0.01, 0.01),
                     ts::uniform(rng, -0.01, 0.01));
      }
      frames.push_back(p);
      yaw += ts::uniform(rng, -0.2, 0.2);
      root += Vec3(ts::uniform(rng, -0.05, 0.05), ts::uniform(rng, -0.01, 0.01),
                   ts::uniform(rng, -0.05, 0.05));
    }
    const auto back = unified_to_keypoints(keypoints_to_unified(frames, 30.0));
    for (std::size_t k = 0; k < frames.size(); ++k) {
      for (int j = 0; j < kNumJoints; ++j) CHECK((back[k][j] - frames[k][j]).norm() < 1e-6);
    }
  }
}

TEST_CASE("complete_missing_parts") {
  ts::Rng rng(3);
  const auto full = ts::random_sequence(rng, 4);
  CHECK(complete_missing_parts(full) == full);

  auto seq = full;
  seq.parts_present[static_cast<int>(Part::LeftHand)] = false;
  seq.parts_present[static_cast<int>(Part::Head)] = false;
  seq.parts_present[static_cast<int>(Part::Face)] = false;
  const auto done = complete_missing_parts(seq);
  CHECK(done.parts_present == seq.parts_present);

  const auto rest = rest_pose(default_skeleton());
  const auto& layout = canonical_layout();
  for (std::size_t f = 0; f < done.frames.size(); ++f) {
    for (int j = 22; j <= 36; ++j) {
      const auto r6 = done.frames[f].rotation6d(j);
      CHECK(std::equal(r6.begin(), r6.end(), kIdentityRot6d.begin()));
      CHECK(done.frames[f].position(j) == rest[j]);
      CHECK(done.frames[f].velocity(j) == Vec3::Zero());
    }
    for (double v : done.frames[f].face) CHECK(v == 0.0);
    const auto before = pack(seq.frames[f]);
    const auto after = pack(done.frames[f]);
    for (auto i : layout.indices(Part::Spine)) CHECK(before[i] == after[i]);
    for (auto i : layout.indices(Part::RightHand)) CHECK(before[i] == after[i]);
  }
}

TEST_CASE("sequence validation") {
  MotionSequence seq;
  CHECK_THROWS_AS(validate(seq), ValidationError);
  seq.frames.resize(2);
  validate(seq);
  seq.fps = 0.0;
  CHECK_THROWS_AS(validate(seq), ValidationError);
}

TEST_CASE("matrix conversion round-trips") {
  ts::Rng rng(4);
  const auto seq = ts::random_sequence(rng, 5);
  const auto m = to_matrix(seq);
  CHECK(m.rows() == 5);
  CHECK(m.cols() == 669);
  CHECK(from_matrix(m, seq) == seq);
  CHECK_THROWS_AS(from_matrix(Eigen::MatrixXd::Zero(5, 668), seq), DimensionError);
}

TEST_CASE("wrap_angle maps into [-pi, pi)") {
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(std::abs(wrap_angle(3 * M_PI)) == doctest::Approx(M_PI));
  CHECK(wrap_angle(-3 * M_PI / 2) == doctest::Approx(M_PI / 2));
}
