#include "unimotion/datasets.hpp"

#include <array>

namespace unimotion {

std::string_view category_name(TaskCategory c) {
  static constexpr std::array<std::string_view, 7> names = {
      "text_to_motion", "unconditional",  "action_to_motion", "speech_to_gesture",
      "music_to_dance", "motion_imitation", "other"};
  return names[static_cast<int>(c)];
}

const std::vector<DatasetInfo>& standard_datasets() {
  using C = TaskCategory;
  static const std::vector<DatasetInfo> datasets = {
      {"HumanML3D", C::TextToMotion, 0.15},
      {"Motion-X", C::TextToMotion, 0.15},
      {"KIT-ML", C::TextToMotion, 0.05},
      {"BABEL", C::TextToMotion, 0.05},
      {"AMASS", C::Unconditional, 0.25},
      {"HumanAct12", C::ActionToMotion, 0.10 / 3.0},
      {"UESTC", C::ActionToMotion, 0.10 / 3.0},
      {"NTU-RGBD-120", C::ActionToMotion, 0.10 / 3.0},
      {"BEAT", C::SpeechToGesture, 0.05},
      {"TED-Gesture++", C::SpeechToGesture, 0.05 / 3.0},
      {"TED-Expressive", C::SpeechToGesture, 0.05 / 3.0},
      {"Speech2Gesture-3D", C::SpeechToGesture, 0.05 / 3.0},
      {"AIST++", C::MusicToDance, 0.05},
      {"MPI-INF-3DHP", C::MotionImitation, 0.05},
      {"Human3.6M", C::MotionImitation, 0.05},
  };
  return datasets;
}

TaskCategory dataset_category(std::string_view tag) {
  for (const auto& d : standard_datasets()) {
    if (d.tag == tag) return d.category;
  }
  return TaskCategory::Other;
}

}  // namespace unimotion
