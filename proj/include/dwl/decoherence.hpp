#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "dwl/dynamics.hpp"

namespace dwl {

using Rng = std::mt19937_64;

enum class DirectionModel {
  Isotropic,  // uniform on the unit sphere
  Dipole,     // sin^2(theta) about the z axis
};

/// Spontaneous-emission phase kicks: recoil wavenumber m k, Poisson timing.
struct KickParams {
  double strength_m = 10.0;
  double rate = 0.0;  // expected kicks per 1/E_R
  bool enabled = false;
  DirectionModel direction = DirectionModel::Isotropic;

  void validate() const;
  double effective_rate() const { return enabled ? rate : 0.0; }
};

struct KickEvent {
  double time = 0.0;
  double theta = 0.0;  // [0, pi]
  double phi = 0.0;    // [0, 2 pi)

  /// sin(theta) cos(phi): projection of the photon direction on x.
  double x_projection() const;
};

/// Identifies one trajectory's random stream. The same (base_seed, index)
/// always reproduces the same stream; different indices are independent.
struct TrajectorySeed {
  std::uint64_t base_seed = 0;
  std::uint64_t trajectory_index = 0;

  Rng make_engine() const;
};

/// Arrival times of a homogeneous Poisson process on [t_start, t_end).
std::vector<double> sample_kick_times(const KickParams& kp, double t_start, double t_end, Rng& rng);

struct Direction {
  double theta = 0.0;
  double phi = 0.0;
};

Direction sample_direction(Rng& rng, DirectionModel model = DirectionModel::Isotropic);

/// psi(x_j) <- psi(x_j) exp(-i m k x_j sin(theta) cos(phi)).
void apply_kick(WaveFunction& psi, const KickParams& kp, const KickEvent& ev);

/// Unitary evolution over [t_start, t_end] with the given kicks applied at
/// their exact times; events must be sorted and lie in [t_start, t_end).
void propagate_with_kicks(WaveFunction& psi, const PropagatorPlan& plan, const KickParams& kp,
                          std::span<const KickEvent> events, double t_start, double t_end);

/// A single kicked trajectory advanced one recording interval at a time.
/// Within each interval the kick times are drawn first, then one direction
/// per kick, then the state is propagated.
class Trajectory {
 public:
  Trajectory(WaveFunction psi0, const TrajectorySeed& seed);

  const WaveFunction& psi() const { return psi_; }
  double time() const { return time_; }
  const std::vector<KickEvent>& kick_log() const { return log_; }

  /// Advances by steps * plan.dt(); the end time is computed as
  /// (interval index) * steps * dt so it never accumulates rounding.
  void advance_interval(const PropagatorPlan& plan, const KickParams& kp, std::size_t steps);

 private:
  WaveFunction psi_;
  Rng rng_;
  double time_ = 0.0;
  std::size_t intervals_ = 0;
  std::vector<KickEvent> log_;
};

using SnapshotObserver = std::function<void(std::size_t record, double time, const WaveFunction& psi)>;

/// Runs one trajectory for n_intervals recording intervals of
/// steps_per_interval steps each; the observer sees record 0 (t = 0) and the
/// end of every interval. Returns the kick log.
std::vector<KickEvent> evolve_trajectory(const WaveFunction& psi0, const PropagatorPlan& plan, const KickParams& kp,
                                         std::size_t n_intervals, std::size_t steps_per_interval,
                                         const TrajectorySeed& seed, const SnapshotObserver& observer = {});

}  // namespace dwl
