#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dwl/decoherence.hpp"
#include "dwl/dynamics.hpp"
#include "dwl/lattice.hpp"
#include "dwl/spectral.hpp"

namespace dwl {

enum class InitialKind {
  LState,        // (|0> +/- |1>)/sqrt(2)
  Gaussian,      // single packet on the grid
  Coefficients,  // explicit sum_l c_l |l>
};

struct InitialState {
  InitialKind kind = InitialKind::LState;
  double sigma = 0.1;
  double center = 0.0;
  std::size_t levels = 10;  // eigenstates used when projecting the Gaussian
  SuperpositionSpec coefficients;
};

struct PreparedState {
  WaveFunction psi;
  std::string description;
  std::vector<std::string> notes;  // e.g. chosen |L> phase, Gaussian projection
};

/// Builds the initial wavefunction described by `init` on the grid.
PreparedState prepare_initial_state(const InitialState& init, const BlochSpectrum& spectrum, const Grid& grid,
                                    const WellPartition& partition);

struct EnsembleConfig {
  std::size_t n_trajectories = 50;
  std::uint64_t base_seed = 0;
  std::size_t n_records = 200;         // record intervals after t = 0
  std::size_t steps_per_record = 200;  // propagator steps per interval
  KickParams kick;
  /// The "initial well" is the left sub-well of the cell containing this point.
  double initial_well_center = 0.0;
  unsigned threads = 1;  // 0 = hardware concurrency
  bool keep_kick_logs = false;

  void validate() const;
};

/// Observables at each record time.
struct ObservableSeries {
  std::vector<double> times;
  std::vector<double> p_left_total;
  std::vector<double> p_initial_well;
  std::vector<double> p_right_well;
  std::vector<double> survival;
  std::vector<double> purity;
  std::vector<double> se_p_left;
  std::vector<double> se_survival;
  // Diagnostics, not written to CSV.
  std::vector<double> max_norm_error;  // max_k | ||psi_k||^2 - 1 |
  std::vector<double> mean_energy;     // trajectory-averaged <H>
  std::size_t n_trajectories = 0;
  std::size_t total_kicks = 0;
  std::vector<std::vector<KickEvent>> kick_logs;  // filled when requested
  std::vector<std::string> metadata;

  std::size_t size() const { return times.size(); }
};

/// Monte Carlo ensemble of kicked trajectories started from psi0. Trajectory k
/// draws from TrajectorySeed{base_seed, k}; the result does not depend on the
/// thread count.
ObservableSeries run_ensemble(const EnsembleConfig& cfg, const PropagatorPlan& plan,
                              const WellPartition& partition, const WaveFunction& psi0);

// Observables over a trajectory set; each represents
// rho = (1/N) sum_k |psi_k><psi_k|.

double prob_in_interval(std::span<const WaveFunction> trajectories, const WellPartition& partition,
                        const Interval& interval);
double prob_in_mask(std::span<const WaveFunction> trajectories, std::span<const char> mask);
double prob_left_total(std::span<const WaveFunction> trajectories, const WellPartition& partition);
/// <psi0|rho|psi0>
double survival(std::span<const WaveFunction> trajectories, const WaveFunction& psi0);
/// G_kl = <psi_k|psi_l>
Eigen::MatrixXcd gram_matrix(std::span<const WaveFunction> trajectories);
/// Tr rho^2 = (1/N^2) sum_kl |G_kl|^2
double purity(std::span<const WaveFunction> trajectories);

/// Materialized rho(x_j, x_j') (no dx factors); for cross-checks on small grids.
Eigen::MatrixXcd density_matrix(std::span<const WaveFunction> trajectories);
/// sum_jj' rho(j, j') rho(j', j) dx^2
double purity_direct(const Eigen::MatrixXcd& rho, double dx);
/// sum_jj' psi0*(j) rho(j, j') psi0(j') dx^2
double survival_direct(const Eigen::MatrixXcd& rho, const WaveFunction& psi0);
/// sum_{j in mask} rho(j, j) dx
double prob_direct(const Eigen::MatrixXcd& rho, std::span<const char> mask, double dx);

}  // namespace dwl
