#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "dwl/lattice.hpp"

namespace dwl {

using complex = std::complex<double>;
using CVector = std::vector<complex>;

/// Uniform periodic grid; point j sits at x_min + j * dx.
class Grid {
 public:
  Grid() = default;
  Grid(double x_min, double x_max, std::size_t n_points);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double length() const { return x_max_ - x_min_; }
  std::size_t size() const { return n_; }
  double dx() const { return length() / static_cast<double>(n_); }
  double x(std::size_t j) const { return x_min_ + static_cast<double>(j) * dx(); }
  std::size_t n_cells() const;

  /// Spectral wavenumber of DFT bin j (standard FFT ordering).
  double wavenumber(std::size_t j) const;
  std::vector<double> positions() const;
  std::vector<double> wavenumbers() const;

  bool operator==(const Grid&) const = default;

 private:
  double x_min_ = 0.0;
  double x_max_ = kLambda;
  std::size_t n_ = 0;
};

/// Throws BadDomain unless the width is a whole number of lattice periods and
/// n_points is a power of two.
Grid init_grid(double x_min, double x_max, std::size_t n_points);

/// Complex amplitudes on a grid. Inner products carry the dx measure.
class WaveFunction {
 public:
  WaveFunction() = default;
  explicit WaveFunction(const Grid& grid) : grid_(grid), amp_(grid.size()) {}
  WaveFunction(const Grid& grid, CVector amplitudes);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return amp_.size(); }
  complex& operator[](std::size_t j) { return amp_[j]; }
  const complex& operator[](std::size_t j) const { return amp_[j]; }
  std::span<complex> amplitudes() { return amp_; }
  std::span<const complex> amplitudes() const { return amp_; }

  double norm_squared() const;
  /// Scales to unit norm; returns the norm before scaling.
  double normalize();
  /// <this|other>
  complex inner(const WaveFunction& other) const;
  /// Integral of |psi|^2 over the grid points flagged in mask.
  double probability(std::span<const char> mask) const;

  bool operator==(const WaveFunction&) const = default;

 private:
  Grid grid_;
  CVector amp_;
};

/// Normalized Gaussian exp(-(x - center)^2 / 2 sigma^2) sampled on the grid,
/// using the periodic minimum-image distance.
WaveFunction gaussian_on_grid(const Grid& grid, double sigma, double center);

/// Grid points lying in the `side` sub-well of any cell.
std::vector<char> side_mask(const Grid& grid, const WellPartition& partition, Side side);

/// Grid points lying in one sub-well of a single cell.
std::vector<char> well_mask(const Grid& grid, const WellPartition& partition, std::size_t cell, Side side);

namespace detail {

// In-place 1D complex FFT pair (unnormalized backward). Plans are built once
// and executed on caller buffers, which is safe from concurrent threads.
class FftPair {
 public:
  explicit FftPair(std::size_t n);
  ~FftPair();
  FftPair(const FftPair&) = delete;
  FftPair& operator=(const FftPair&) = delete;
  FftPair(FftPair&&) noexcept;
  FftPair& operator=(FftPair&&) noexcept;

  void forward(std::span<complex> data) const;
  void backward(std::span<complex> data) const;
  std::size_t size() const { return n_; }

 private:
  std::size_t n_ = 0;
  int alignment_ = 0;
  void* forward_ = nullptr;
  void* backward_ = nullptr;
  void* forward_unaligned_ = nullptr;
  void* backward_unaligned_ = nullptr;
};

}  // namespace detail

/// Precomputed Strang-splitting factors for one time step. Immutable after
/// construction; one plan may drive any number of trajectories concurrently.
class PropagatorPlan {
 public:
  PropagatorPlan(const LatticeParams& params, const Grid& grid, double dt);

  double dt() const { return dt_; }
  const Grid& grid() const { return grid_; }
  const CVector& half_potential_phase() const { return half_potential_; }
  const CVector& kinetic_phase() const { return kinetic_; }
  const std::vector<double>& potential() const { return potential_; }
  /// (p_j / k)^2, kinetic energy of bin j in E_R.
  const std::vector<double>& kinetic_energy() const { return kinetic_energy_; }

  /// One full step of length dt, in place.
  void step(WaveFunction& psi) const;
  /// One step of arbitrary length tau (used to land on kick times).
  void step_partial(WaveFunction& psi, double tau) const;
  /// Whole steps up to tau followed by a partial step for any remainder.
  void propagate_for(WaveFunction& psi, double tau) const;

  const detail::FftPair& fft() const { return fft_; }

 private:
  double dt_;
  Grid grid_;
  std::vector<double> potential_;
  std::vector<double> kinetic_energy_;
  CVector half_potential_;
  CVector kinetic_;
  detail::FftPair fft_;
};

PropagatorPlan plan_propagator(const LatticeParams& params, const Grid& grid, double dt);

WaveFunction step(WaveFunction psi, const PropagatorPlan& plan);

using StepObserver = std::function<void(std::size_t step, double time, const WaveFunction& psi)>;

/// Applies n_steps steps; the observer sees step 0 and every n_record-th step.
WaveFunction evolve(WaveFunction psi, const PropagatorPlan& plan, std::size_t n_steps,
                    std::size_t n_record = 0, const StepObserver& observer = {});

/// <psi|H|psi> with the kinetic part evaluated spectrally. Throws
/// NonHermitianResidual if the imaginary part exceeds 1e-8.
double expectation_energy(const WaveFunction& psi, const LatticeParams& params);

/// H psi on the grid (spectral kinetic term plus pointwise potential).
WaveFunction apply_hamiltonian(const WaveFunction& psi, const LatticeParams& params);

}  // namespace dwl
