#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dwl/config.hpp"
#include "dwl/ensemble.hpp"
#include "dwl/spectral.hpp"

namespace dwl {

struct SimulationResult {
  BlochSpectrum spectrum;
  PreparedState initial;
  ObservableSeries series;
};

/// Full pipeline for one configuration: spectrum, partition, initial state,
/// propagator and Monte Carlo ensemble. Metadata lines echo the config.
SimulationResult simulate(const RunConfig& config);

/// Entry point behind the command-line tool. args excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dwl
