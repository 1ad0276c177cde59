#include "unimotion/translate.hpp"

#include <array>
#include <string>

#include "unimotion/errors.hpp"

namespace unimotion {

namespace {

constexpr std::array<std::string_view, 2> kTargetNames = {"unified", "keypoints52"};

class IdentityTranslator final : public MotionTranslator {
 public:
  ForeignMotion translate(const MotionSequence& seq) const override { return seq; }
};

class KeypointTranslator final : public MotionTranslator {
 public:
  ForeignMotion translate(const MotionSequence& seq) const override {
    KeypointSequence out;
    out.fps = seq.fps;
    out.dataset = seq.dataset;
    out.frames = unified_to_keypoints(seq);
    return out;
  }
};

}  // namespace

std::string_view target_name(TranslateTarget t) { return kTargetNames[static_cast<int>(t)]; }

TranslateTarget target_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kTargetNames.size(); ++i) {
    if (kTargetNames[i] == name) return static_cast<TranslateTarget>(i);
  }
  throw ValidationError("unsupported translation target '" + std::string(name) + "'");
}

std::unique_ptr<MotionTranslator> make_translator(TranslateTarget target) {
  switch (target) {
    case TranslateTarget::Unified:
      return std::make_unique<IdentityTranslator>();
    case TranslateTarget::Keypoints52:
      return std::make_unique<KeypointTranslator>();
  }
  throw ValidationError("unsupported translation target");
}

ForeignMotion translate(const MotionSequence& seq, TranslateTarget target) {
  return make_translator(target)->translate(seq);
}

}  // namespace unimotion
