#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace unimotion {

/// Reserved tag whose read-in/read-out layers are shared by every source.
inline constexpr std::string_view kAllDataset = "all";

enum class TaskCategory { TextToMotion, Unconditional, ActionToMotion, SpeechToGesture,
                          MusicToDance, MotionImitation, Other };

std::string_view category_name(TaskCategory c);

struct DatasetInfo {
  std::string tag;
  TaskCategory category;
  double weight;  // default sampling weight; all entries sum to 1
};

/// Training sources with their default batch-formation weights.
const std::vector<DatasetInfo>& standard_datasets();

/// Category of a standard tag, Other for anything else.
TaskCategory dataset_category(std::string_view tag);

}  // namespace unimotion
