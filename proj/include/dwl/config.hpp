#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "dwl/decoherence.hpp"
#include "dwl/dynamics.hpp"
#include "dwl/ensemble.hpp"
#include "dwl/lattice.hpp"
#include "dwl/spectral.hpp"

namespace dwl {

enum class RateUnit { Hz, Dimensionless };

/// How the configured er_frequency is read: E_R/hbar (as given) or E_R/h
/// (multiplied by 2 pi before use).
enum class ErConvention { Hbar, H };

struct GridSpec {
  double x_min = -9.75;
  double x_max = 10.25;
  std::size_t n_points = 512;

  bool operator==(const GridSpec&) const = default;
};

struct PropagationSpec {
  double dt = 1e-3;
  double t_final = 40.0;
  std::size_t n_record = 200;  // record intervals; rows = n_record + 1

  std::size_t total_steps() const;
  std::size_t steps_per_record() const;
  bool operator==(const PropagationSpec&) const = default;
};

struct KickSpec {
  bool enabled = false;
  double strength_m = 10.0;
  double rate = 0.0;
  RateUnit unit = RateUnit::Hz;
  DirectionModel direction = DirectionModel::Isotropic;

  bool operator==(const KickSpec&) const = default;
};

struct EnsembleSpec {
  std::size_t n_trajectories = 50;
  std::uint64_t base_seed = 0;
  unsigned threads = 1;

  bool operator==(const EnsembleSpec&) const = default;
};

struct OutputSpec {
  std::string directory = ".";
  std::string format = "csv";
  bool error_bars = true;
  bool kick_log = false;

  bool operator==(const OutputSpec&) const = default;
};

/// Everything needed for one simulation run.
struct RunConfig {
  std::string label = "run";
  /// lattice.er_frequency holds the value as written in the file; use
  /// physical_lattice() for the E_R/hbar actually used in conversions.
  LatticeParams lattice;
  ErConvention er_convention = ErConvention::Hbar;
  int n_max = 32;
  GridSpec grid;
  PropagationSpec propagation;
  InitialState initial_state;
  KickSpec kick;
  EnsembleSpec ensemble;
  OutputSpec output;

  LatticeParams physical_lattice() const;
  /// Kick rate in events per 1/E_R.
  double dimensionless_rate() const;
  KickParams kick_params() const;
  EnsembleConfig ensemble_config() const;

  /// Throws ValidationError naming the violated constraint.
  void validate() const;
};

/// Parses the sectioned key = value format. Unknown sections or keys are
/// errors. A bare `rate` key is read in `bare_rate_unit`.
RunConfig parse_config(std::string_view text, RateUnit bare_rate_unit = RateUnit::Hz);

/// Canonical text form; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const RunConfig& config);

std::string to_string(RateUnit unit);
std::string to_string(ErConvention convention);
std::string to_string(InitialKind kind);
std::string to_string(DirectionModel model);

}  // namespace dwl
