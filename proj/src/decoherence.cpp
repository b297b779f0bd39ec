#include "dwl/decoherence.hpp"

#include <cmath>
#include <numbers>

#include "dwl/errors.hpp"

namespace dwl {

void KickParams::validate() const {
  if (!(strength_m > 0.0)) throw ValidationError("strength_m", "kick strength must be > 0");
  if (!(rate >= 0.0)) throw ValidationError("rate", "kick rate must be >= 0");
}

double KickEvent::x_projection() const { return std::sin(theta) * std::cos(phi); }

Rng TrajectorySeed::make_engine() const {
  std::seed_seq seq{static_cast<std::uint32_t>(base_seed), static_cast<std::uint32_t>(base_seed >> 32),
                    static_cast<std::uint32_t>(trajectory_index),
                    static_cast<std::uint32_t>(trajectory_index >> 32), 0x6b69636bU};
  return Rng(seq);
}

std::vector<double> sample_kick_times(const KickParams& kp, double t_start, double t_end, Rng& rng) {
  std::vector<double> times;
  const double rate = kp.effective_rate();
  if (!(rate > 0.0) || !(t_end > t_start)) return times;
  std::exponential_distribution<double> gap(rate);
  double t = t_start;
  for (;;) {
    t += gap(rng);
    if (t >= t_end) break;
    times.push_back(t);
  }
  return times;
}

Direction sample_direction(Rng& rng, DirectionModel model) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    const double cos_theta = 2.0 * unit(rng) - 1.0;
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    const double sin2 = 1.0 - cos_theta * cos_theta;
    if (model == DirectionModel::Dipole && unit(rng) >= sin2) continue;
    return {std::acos(cos_theta), phi};
  }
}

void apply_kick(WaveFunction& psi, const KickParams& kp, const KickEvent& ev) {
  const double q = kp.strength_m * kWavenumber * ev.x_projection();
  if (q == 0.0) return;
  const Grid& grid = psi.grid();
  for (std::size_t j = 0; j < grid.size(); ++j) psi[j] *= std::polar(1.0, -q * grid.x(j));
}

void propagate_with_kicks(WaveFunction& psi, const PropagatorPlan& plan, const KickParams& kp,
                          std::span<const KickEvent> events, double t_start, double t_end) {
  double t = t_start;
  for (const KickEvent& ev : events) {
    plan.propagate_for(psi, ev.time - t);
    apply_kick(psi, kp, ev);
    t = ev.time;
  }
  plan.propagate_for(psi, t_end - t);
}

Trajectory::Trajectory(WaveFunction psi0, const TrajectorySeed& seed)
    : psi_(std::move(psi0)), rng_(seed.make_engine()) {}

void Trajectory::advance_interval(const PropagatorPlan& plan, const KickParams& kp, std::size_t steps) {
  const double span = static_cast<double>(steps) * plan.dt();
  const double t_start = time_;
  const double t_end = static_cast<double>(intervals_ + 1) * span;

  std::vector<KickEvent> events;
  if (kp.effective_rate() > 0.0) {
    // Offsets are drawn relative to the interval start so a rate-0 run and
    // a kicked run take identical full steps between kicks.
    for (double offset : sample_kick_times(kp, 0.0, span, rng_)) events.push_back({offset, 0.0, 0.0});
    for (KickEvent& ev : events) {
      const Direction d = sample_direction(rng_, kp.direction);
      ev.theta = d.theta;
      ev.phi = d.phi;
    }
  }

  if (events.empty()) {
    for (std::size_t s = 0; s < steps; ++s) plan.step(psi_);
  } else {
    propagate_with_kicks(psi_, plan, kp, events, 0.0, span);
    for (KickEvent& ev : events) {
      ev.time += t_start;
      log_.push_back(ev);
    }
  }
  ++intervals_;
  time_ = t_end;
}

std::vector<KickEvent> evolve_trajectory(const WaveFunction& psi0, const PropagatorPlan& plan, const KickParams& kp,
                                         std::size_t n_intervals, std::size_t steps_per_interval,
                                         const TrajectorySeed& seed, const SnapshotObserver& observer) {
  Trajectory traj(psi0, seed);
  if (observer) observer(0, 0.0, traj.psi());
  for (std::size_t r = 1; r <= n_intervals; ++r) {
    traj.advance_interval(plan, kp, steps_per_interval);
    if (observer) observer(r, traj.time(), traj.psi());
  }
  return traj.kick_log();
}

}  // namespace dwl
