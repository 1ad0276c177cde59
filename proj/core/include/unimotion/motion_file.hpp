#pragma once

// Line-delimited JSON files. One record per line:
//
//   {"fps": 30.0, "dataset": "AMASS",
//    "parts_present": [true, ... 10 entries],
//    "anchor": [x, z, yaw],            (optional, defaults to zeros)
//    "metadata": {"key": "value"},     (optional)
//    "frames": [[669 numbers], ...]}
//
// Keypoint files use the same framing with "keypoints": [[156 numbers], ...]
// (52 joints x XYZ, world meters) instead of "frames".
//
// Blank lines are ignored. Numbers are written in shortest round-trip form.

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "unimotion/motion_repr.hpp"

namespace unimotion {

struct KeypointSequence {
  std::vector<JointPositions> frames;
  double fps = 30.0;
  std::string dataset = "all";

  bool operator==(const KeypointSequence&) const = default;
};

std::vector<MotionSequence> read_motions(std::istream& in);
void write_motions(std::ostream& out, const std::vector<MotionSequence>& motions);

/// Throws ParseError (malformed line) or DimensionError (row width); both name the line.
std::vector<MotionSequence> load(const std::filesystem::path& path);
void save(const std::vector<MotionSequence>& motions, const std::filesystem::path& path);

std::vector<KeypointSequence> read_keypoints(std::istream& in);
void write_keypoints(std::ostream& out, const std::vector<KeypointSequence>& sequences);
std::vector<KeypointSequence> load_keypoints(const std::filesystem::path& path);
void save_keypoints(const std::vector<KeypointSequence>& sequences,
                    const std::filesystem::path& path);

}  // namespace unimotion
