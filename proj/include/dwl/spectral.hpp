#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "dwl/dynamics.hpp"
#include "dwl/lattice.hpp"

namespace dwl {

/// Plane waves e^{i n k x}, n = -n_max..n_max, at zero quasi-momentum.
struct PlaneWaveBasis {
  int n_max = 32;

  int dimension() const { return 2 * n_max + 1; }
  int index(int n) const { return n + n_max; }
  int harmonic(int index) const { return index - n_max; }
};

/// One q = 0 eigenstate. coeffs[i] multiplies e^{i (i - n_max) k x};
/// normalized over one lattice period.
struct BlochState {
  double energy = 0.0;
  Eigen::VectorXcd coeffs;
};

struct BlochSpectrum {
  PlaneWaveBasis basis;
  std::vector<BlochState> states;  // ascending energy
  std::uint64_t params_fingerprint = 0;

  std::size_t size() const { return states.size(); }
  const BlochState& operator[](std::size_t l) const { return states[l]; }
};

/// Amplitudes c_l on eigenstates |l>.
struct SuperpositionSpec {
  std::vector<std::pair<std::size_t, complex>> terms;

  double norm_squared() const;
  void normalize();
};

/// Fourier coefficient of potential_1d multiplying e^{i m k x}; zero for |m| > 2.
complex potential_harmonic(const LatticeParams& params, int m);

/// Kinetic n^2 on the diagonal plus potential harmonics coupling n to n +/- 1
/// and n +/- 2. Exactly Hermitian.
Eigen::MatrixXcd build_hamiltonian(const LatticeParams& params, const PlaneWaveBasis& basis);

/// Full eigendecomposition. Each eigenvector is rotated so that its
/// largest-modulus coefficient is real and positive.
/// Throws ConvergenceFailure if the eigensolver does not converge.
BlochSpectrum solve_spectrum(const Eigen::MatrixXcd& hamiltonian);

std::uint64_t fingerprint(const LatticeParams& params, const PlaneWaveBasis& basis);

/// build_hamiltonian + solve_spectrum, with the fingerprint filled in.
BlochSpectrum compute_spectrum(const LatticeParams& params, const PlaneWaveBasis& basis = {});

/// E_1 - E_0.
double splitting(const BlochSpectrum& spectrum);

/// Largest change in E_0..E_{levels-1} when n_max is doubled.
double convergence_residual(const LatticeParams& params, const PlaneWaveBasis& basis, std::size_t levels = 10);

/// sum_n d_n e^{i n k x_j} / sqrt(L): grid norm equals sum |d_n|^2 for a
/// grid spanning whole periods.
WaveFunction synthesize_raw(const Eigen::VectorXcd& coeffs, const PlaneWaveBasis& basis, const Grid& grid);

/// Eigenstate sampled on the grid and normalized under the grid measure.
WaveFunction synthesize_on_grid(const BlochState& state, const PlaneWaveBasis& basis, const Grid& grid);

struct LState {
  WaveFunction psi;
  double alpha = 0.0;        // relative phase of |1>, 0 or pi
  double p_left = 0.0;       // left-well probability of the chosen state
  double p_left_other = 0.0; // same for the rejected phase
};

/// (|0> + e^{i alpha}|1>)/sqrt(2) with alpha in {0, pi} chosen to put the
/// state in the left wells.
LState make_L_state(const BlochSpectrum& spectrum, const Grid& grid, const WellPartition& partition);

struct GaussianProjection {
  SuperpositionSpec coefficients;
  double residual = 0.0;  // 1 - sum |c_l|^2
};

/// Projects the lattice-periodic Gaussian exp(-(x - center)^2 / 2 sigma^2)
/// (one image per cell, normalized per cell) onto the lowest n_levels
/// eigenstates. Throws PoorOverlap if the residual exceeds 0.05.
GaussianProjection project_gaussian(const BlochSpectrum& spectrum, const Grid& grid, double sigma, double center,
                                    std::size_t n_levels = 10);

/// sum_l c_l phi_l on the grid, renormalized.
WaveFunction make_superposition(const SuperpositionSpec& spec, const BlochSpectrum& spectrum, const Grid& grid);

/// Same sum without renormalization.
WaveFunction superposition_raw(const SuperpositionSpec& spec, const BlochSpectrum& spectrum, const Grid& grid);

}  // namespace dwl
