#pragma once

// Frame-rate resampling and every mask form used for training and inference.

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "unimotion/modality.hpp"
#include "unimotion/motion_repr.hpp"

namespace unimotion {

/// Visibility: 1 = frame/part is given context. Drop: 1 = replaced by an empty token.
enum class MaskConvention { Visibility, Drop };

class BodyPartMask {
 public:
  BodyPartMask(std::size_t frames, MaskConvention convention, std::uint8_t fill = 0);

  std::size_t frames() const noexcept { return frames_; }
  MaskConvention convention() const noexcept { return convention_; }

  std::uint8_t at(std::size_t frame, int part) const { return cells_[index(frame, part)]; }
  void set(std::size_t frame, int part, bool value) { cells_[index(frame, part)] = value ? 1 : 0; }
  void set_frame(std::size_t frame, bool value);
  void set_part(int part, bool value);

  std::span<const std::uint8_t> cells() const noexcept { return cells_; }
  std::size_t count() const noexcept;

  bool operator==(const BodyPartMask&) const = default;

 private:
  std::size_t index(std::size_t frame, int part) const;

  std::size_t frames_;
  MaskConvention convention_;
  std::vector<std::uint8_t> cells_;  // frames x kNumParts, row-major
};

enum class Task { T2M, A2M, M2D, S2G, MIm, MP, MIn, CMP, CMI, MMG };

std::string_view task_name(Task task);
/// Case-insensitive; throws ValidationError for an unknown task.
Task task_from_name(std::string_view name);

/// Boundaries are 1-based frame indices, matching the task table.
struct TaskSpec {
  Task task = Task::T2M;
  int k = 0;
  int k1 = 0;
  int k2 = 0;
  std::set<Modality> conditions;

  /// Throws ValidationError if the boundaries do not fit `frames`.
  void validate(std::size_t frames) const;
};

BodyPartMask task_mask(const TaskSpec& spec, std::size_t frames);

enum class MaskStrategy { PerPart, PerFrame, Span };

std::string_view strategy_name(MaskStrategy s);
MaskStrategy strategy_from_name(std::string_view name);

/// Adds training-time drops on top of the data's own missing-part mask.
/// The result always contains every cell dropped in `source`.
BodyPartMask random_train_mask(const BodyPartMask& source, double p, MaskStrategy strategy,
                               std::uint64_t seed);

/// F x 10 loss weights: 0 where data is genuinely missing, 1 elsewhere.
Eigen::MatrixXd loss_weights(const BodyPartMask& source_drop);

BodyPartMask visibility_to_drop(const BodyPartMask& visibility);
BodyPartMask drop_to_visibility(const BodyPartMask& drop);

/// F x 669 0/1 matrix broadcasting each part cell over its feature indices.
Eigen::MatrixXd expand_to_features(const BodyPartMask& mask);

/// Drop mask marking parts absent from the sequence in every frame.
BodyPartMask missing_parts_mask(const MotionSequence& seq);

/// Keeps every `factor`-th frame and recomputes velocity channels from the
/// world-space states of consecutive kept frames. State channels are copied.
MotionSequence resample(const MotionSequence& seq, int factor);

}  // namespace unimotion
