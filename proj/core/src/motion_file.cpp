#include "unimotion/motion_file.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "unimotion/errors.hpp"

namespace unimotion {

namespace {

using json = nlohmann::json;

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

template <typename Fn>
void for_each_record(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (blank(line)) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(number, std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object()) throw ParseError(number, "record must be a JSON object");
    try {
      fn(record, number);
    } catch (const json::exception& e) {
      throw ParseError(number, e.what());
    }
  }
}

std::vector<double> number_row(const json& row, std::size_t expected, std::size_t line,
                               std::size_t frame) {
  if (!row.is_array()) throw ParseError(line, "frame " + std::to_string(frame) + " is not an array");
  if (row.size() != expected) {
    throw DimensionError("line " + std::to_string(line) + ": frame " + std::to_string(frame) +
                         " has " + std::to_string(row.size()) + " values, expected " +
                         std::to_string(expected));
  }
  std::vector<double> values(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    if (!row[i].is_number()) {
      throw ParseError(line, "frame " + std::to_string(frame) + " has a non-numeric entry");
    }
    values[i] = row[i].get<double>();
  }
  return values;
}

double read_fps(const json& record, std::size_t line) {
  if (!record.contains("fps") || !record["fps"].is_number()) {
    throw ParseError(line, "missing numeric fps");
  }
  const double fps = record["fps"].get<double>();
  if (!(fps > 0.0) || !std::isfinite(fps)) throw ParseError(line, "fps must be positive");
  return fps;
}

std::string read_dataset(const json& record) {
  return record.contains("dataset") ? record["dataset"].get<std::string>() : "all";
}

json number_array(std::span<const double> values) {
  json arr = json::array();
  for (double v : values) {
    if (!std::isfinite(v)) throw ValidationError("cannot serialize non-finite value");
    arr.push_back(v);
  }
  return arr;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

}  // namespace

std::vector<MotionSequence> read_motions(std::istream& in) {
  std::vector<MotionSequence> out;
  for_each_record(in, [&](const json& record, std::size_t line) {
    MotionSequence seq;
    seq.fps = read_fps(record, line);
    seq.dataset = read_dataset(record);
    if (record.contains("parts_present")) {
      const auto& pp = record["parts_present"];
      if (!pp.is_array() || pp.size() != kNumParts) {
        throw ParseError(line, "parts_present must hold exactly 10 booleans");
      }
      for (int p = 0; p < kNumParts; ++p) seq.parts_present[p] = pp[p].get<bool>();
    }
    if (record.contains("anchor")) {
      const auto& a = record["anchor"];
      if (!a.is_array() || a.size() != 3) throw ParseError(line, "anchor must hold [x, z, yaw]");
      seq.anchor = {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
    }
    if (record.contains("metadata")) {
      seq.metadata = record["metadata"].get<std::map<std::string, std::string>>();
    }
    if (!record.contains("frames") || !record["frames"].is_array()) {
      throw ParseError(line, "missing frames array");
    }
    const auto& frames = record["frames"];
    if (frames.empty()) throw ParseError(line, "record has no frames");
    seq.frames.reserve(frames.size());
    for (std::size_t f = 0; f < frames.size(); ++f) {
      seq.frames.push_back(unpack(number_row(frames[f], kFrameDim, line, f)));
    }
    out.push_back(std::move(seq));
  });
  return out;
}

void write_motions(std::ostream& out, const std::vector<MotionSequence>& motions) {
  for (const auto& seq : motions) {
    validate(seq);
    json record;
    record["fps"] = seq.fps;
    record["dataset"] = seq.dataset;
    record["parts_present"] = seq.parts_present;
    record["anchor"] = {seq.anchor.x, seq.anchor.z, seq.anchor.yaw};
    record["metadata"] = seq.metadata;
    json frames = json::array();
    for (const auto& f : seq.frames) frames.push_back(number_array(pack(f)));
    record["frames"] = std::move(frames);
    out << record.dump() << '\n';
  }
}

std::vector<MotionSequence> load(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_motions(in);
}

void save(const std::vector<MotionSequence>& motions, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_motions(out, motions);
}

std::vector<KeypointSequence> read_keypoints(std::istream& in) {
  std::vector<KeypointSequence> out;
  for_each_record(in, [&](const json& record, std::size_t line) {
    KeypointSequence seq;
    seq.fps = read_fps(record, line);
    seq.dataset = read_dataset(record);
    if (!record.contains("keypoints") || !record["keypoints"].is_array()) {
      throw ParseError(line, "missing keypoints array");
    }
    const auto& frames = record["keypoints"];
    if (frames.empty()) throw ParseError(line, "record has no frames");
    for (std::size_t f = 0; f < frames.size(); ++f) {
      const auto row = number_row(frames[f], 3 * kNumJoints, line, f);
      JointPositions p;
      for (int j = 0; j < kNumJoints; ++j) p[j] = Vec3(row[3 * j], row[3 * j + 1], row[3 * j + 2]);
      seq.frames.push_back(p);
    }
    out.push_back(std::move(seq));
  });
  return out;
}

void write_keypoints(std::ostream& out, const std::vector<KeypointSequence>& sequences) {
  for (const auto& seq : sequences) {
    json record;
    record["fps"] = seq.fps;
    record["dataset"] = seq.dataset;
    json frames = json::array();
    for (const auto& p : seq.frames) {
      std::vector<double> row;
      row.reserve(3 * kNumJoints);
      for (const auto& v : p) row.insert(row.end(), {v.x(), v.y(), v.z()});
      frames.push_back(number_array(row));
    }
    record["keypoints"] = std::move(frames);
    out << record.dump() << '\n';
  }
}

std::vector<KeypointSequence> load_keypoints(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_keypoints(in);
}

void save_keypoints(const std::vector<KeypointSequence>& sequences,
                    const std::filesystem::path& path) {
  auto out = open_out(path);
  write_keypoints(out, sequences);
}

}  // namespace unimotion
