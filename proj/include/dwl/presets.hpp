#pragma once

#include <string>
#include <vector>

#include "dwl/config.hpp"

namespace dwl {

enum class PresetKind { Potential, Ensemble };

struct PresetRun {
  std::string label;
  RunConfig config;
};

/// A named experiment: one or more complete runs sharing a purpose.
struct Preset {
  std::string id;
  PresetKind kind = PresetKind::Ensemble;
  std::string description;
  std::vector<PresetRun> runs;
};

/// Known preset ids in display order.
const std::vector<std::string>& preset_ids();

/// Throws UnknownPreset for an id not in preset_ids().
Preset expand_preset(const std::string& id);

}  // namespace dwl
