#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace activemedia::cli {

struct PresetOptions {
  std::string out_dir = "results";
  /// Replaces every experiment's seed when set.
  std::optional<std::uint64_t> seed;
  /// Multiplies grid resolutions and sample counts; 1 is desk scale.
  double scale = 1.0;
};

const std::vector<std::string>& preset_ids();

/// Experiment configs reproducing one figure. Throws std::invalid_argument on
/// an unknown id or a non-positive scale.
std::vector<ExperimentConfig> preset(const std::string& id, const PresetOptions& options = {});

}  // namespace activemedia::cli
