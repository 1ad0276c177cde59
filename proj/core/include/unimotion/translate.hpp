#pragma once

#include <memory>
#include <string_view>
#include <variant>

#include "unimotion/motion_file.hpp"
#include "unimotion/motion_repr.hpp"

namespace unimotion {

enum class TranslateTarget { Unified, Keypoints52 };

std::string_view target_name(TranslateTarget t);
/// Throws ValidationError for an unsupported target name.
TranslateTarget target_from_name(std::string_view name);

using ForeignMotion = std::variant<MotionSequence, KeypointSequence>;

/// Maps unified motion to a dataset-specific representation. Learned
/// translators plug in by implementing this interface.
class MotionTranslator {
 public:
  virtual ~MotionTranslator() = default;
  virtual ForeignMotion translate(const MotionSequence& seq) const = 0;
};

/// Built-in deterministic translators: identity and keypoint reconstruction.
std::unique_ptr<MotionTranslator> make_translator(TranslateTarget target);

ForeignMotion translate(const MotionSequence& seq, TranslateTarget target);

}  // namespace unimotion
