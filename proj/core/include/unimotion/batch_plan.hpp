#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace unimotion {

inline constexpr double kDefaultAllReplacement = 0.10;

struct BatchPlanConfig {
  std::map<std::string, double> weights;  // dataset tag -> sampling weight
  double all_probability = kDefaultAllReplacement;

  /// Throws ValidationError for empty/negative/zero-sum weights or a bad probability.
  void validate() const;

  /// The standard training mix (see standard_datasets()).
  static BatchPlanConfig defaults();
  /// JSON: {"weights": {"tag": w, ...}, "all_probability": p}.
  static BatchPlanConfig from_json_file(const std::filesystem::path& path);
};

struct PlannedSample {
  std::string dataset;    // drawn source
  std::string effective;  // tag handed to read-in/read-out ("all" when replaced)

  bool operator==(const PlannedSample&) const = default;
};

std::vector<PlannedSample> batch_plan(const BatchPlanConfig& config, std::size_t n,
                                      std::uint64_t seed);

}  // namespace unimotion
