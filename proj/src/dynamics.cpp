#include "dwl/dynamics.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <mutex>
#include <string>
#include <utility>

#include "dwl/errors.hpp"

namespace dwl {

namespace {

// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::span<complex> data) { return reinterpret_cast<fftw_complex*>(data.data()); }

// Plain product; std::complex operator* adds inf/nan recovery that dominates
// the cost of a step.
inline complex mul(complex a, complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace

Grid::Grid(double x_min, double x_max, std::size_t n_points) : x_min_(x_min), x_max_(x_max), n_(n_points) {}

std::size_t Grid::n_cells() const { return static_cast<std::size_t>(std::llround(length() / kLambda)); }

double Grid::wavenumber(std::size_t j) const {
  const auto n = static_cast<std::ptrdiff_t>(n_);
  auto jj = static_cast<std::ptrdiff_t>(j);
  if (jj >= n / 2) jj -= n;
  return 2.0 * std::numbers::pi * static_cast<double>(jj) / length();
}

std::vector<double> Grid::positions() const {
  std::vector<double> xs(n_);
  for (std::size_t j = 0; j < n_; ++j) xs[j] = x(j);
  return xs;
}

std::vector<double> Grid::wavenumbers() const {
  std::vector<double> ks(n_);
  for (std::size_t j = 0; j < n_; ++j) ks[j] = wavenumber(j);
  return ks;
}

Grid init_grid(double x_min, double x_max, std::size_t n_points) {
  if (!(x_max > x_min)) throw BadDomain("x_max must exceed x_min");
  const double periods = (x_max - x_min) / kLambda;
  if (std::abs(periods - std::round(periods)) > 1e-12 * periods) {
    throw BadDomain("domain width " + std::to_string(x_max - x_min) + " is not a whole number of lattice periods");
  }
  if (n_points < 2 || !std::has_single_bit(n_points)) {
    throw BadDomain("n_points = " + std::to_string(n_points) + " is not a power of two");
  }
  return Grid(x_min, x_max, n_points);
}

WaveFunction::WaveFunction(const Grid& grid, CVector amplitudes) : grid_(grid), amp_(std::move(amplitudes)) {
  if (amp_.size() != grid_.size()) throw BadDomain("amplitude count does not match grid");
}

double WaveFunction::norm_squared() const {
  double sum = 0.0;
  for (const complex& a : amp_) sum += std::norm(a);
  return sum * grid_.dx();
}

double WaveFunction::normalize() {
  const double n = std::sqrt(norm_squared());
  if (n > 0.0) {
    const double s = 1.0 / n;
    for (complex& a : amp_) a *= s;
  }
  return n;
}

complex WaveFunction::inner(const WaveFunction& other) const {
  complex sum{0.0, 0.0};
  for (std::size_t j = 0; j < amp_.size(); ++j) sum += std::conj(amp_[j]) * other.amp_[j];
  return sum * grid_.dx();
}

double WaveFunction::probability(std::span<const char> mask) const {
  double sum = 0.0;
  for (std::size_t j = 0; j < amp_.size(); ++j) {
    if (mask[j]) sum += std::norm(amp_[j]);
  }
  return sum * grid_.dx();
}

WaveFunction gaussian_on_grid(const Grid& grid, double sigma, double center) {
  WaveFunction psi(grid);
  const double length = grid.length();
  for (std::size_t j = 0; j < grid.size(); ++j) {
    double d = grid.x(j) - center;
    d -= length * std::round(d / length);
    psi[j] = std::exp(-d * d / (2.0 * sigma * sigma));
  }
  psi.normalize();
  return psi;
}

std::vector<char> side_mask(const Grid& grid, const WellPartition& partition, Side side) {
  std::vector<char> mask(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) mask[j] = partition.locate(grid.x(j)).side == side;
  return mask;
}

std::vector<char> well_mask(const Grid& grid, const WellPartition& partition, std::size_t cell, Side side) {
  std::vector<char> mask(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) mask[j] = partition.in(grid.x(j), cell, side);
  return mask;
}

namespace detail {

FftPair::FftPair(std::size_t n) : n_(n) {
  std::lock_guard lock(planner_mutex());
  auto* buf = fftw_alloc_complex(n);
  const int size = static_cast<int>(n);
  forward_ = fftw_plan_dft_1d(size, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  backward_ = fftw_plan_dft_1d(size, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  forward_unaligned_ = fftw_plan_dft_1d(size, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  backward_unaligned_ = fftw_plan_dft_1d(size, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  alignment_ = fftw_alignment_of(reinterpret_cast<double*>(buf));
  fftw_free(buf);
}

FftPair::~FftPair() {
  if (!forward_) return;
  std::lock_guard lock(planner_mutex());
  for (void* p : {forward_, backward_, forward_unaligned_, backward_unaligned_}) {
    if (p) fftw_destroy_plan(static_cast<fftw_plan>(p));
  }
}

FftPair::FftPair(FftPair&& other) noexcept
    : n_(other.n_),
      alignment_(other.alignment_),
      forward_(std::exchange(other.forward_, nullptr)),
      backward_(std::exchange(other.backward_, nullptr)),
      forward_unaligned_(std::exchange(other.forward_unaligned_, nullptr)),
      backward_unaligned_(std::exchange(other.backward_unaligned_, nullptr)) {}

FftPair& FftPair::operator=(FftPair&& other) noexcept {
  if (this != &other) {
    FftPair tmp(std::move(other));
    std::swap(n_, tmp.n_);
    std::swap(alignment_, tmp.alignment_);
    std::swap(forward_, tmp.forward_);
    std::swap(backward_, tmp.backward_);
    std::swap(forward_unaligned_, tmp.forward_unaligned_);
    std::swap(backward_unaligned_, tmp.backward_unaligned_);
  }
  return *this;
}

// SIMD plans are only valid for buffers with the planning alignment.
void FftPair::forward(std::span<complex> data) const {
  fftw_complex* p = as_fftw(data);
  const bool aligned = fftw_alignment_of(reinterpret_cast<double*>(p)) == alignment_;
  fftw_execute_dft(static_cast<fftw_plan>(aligned ? forward_ : forward_unaligned_), p, p);
}

void FftPair::backward(std::span<complex> data) const {
  fftw_complex* p = as_fftw(data);
  const bool aligned = fftw_alignment_of(reinterpret_cast<double*>(p)) == alignment_;
  fftw_execute_dft(static_cast<fftw_plan>(aligned ? backward_ : backward_unaligned_), p, p);
}

}  // namespace detail

PropagatorPlan::PropagatorPlan(const LatticeParams& params, const Grid& grid, double dt)
    : dt_(dt), grid_(grid), fft_(grid.size()) {
  if (dt < 0.0) throw BadDomain("time step must be >= 0");
  const std::size_t n = grid.size();
  potential_.resize(n);
  kinetic_energy_.resize(n);
  half_potential_.resize(n);
  kinetic_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    potential_[j] = potential_1d(params, grid.x(j));
    const double p = grid.wavenumber(j) / kWavenumber;
    kinetic_energy_[j] = p * p;
    half_potential_[j] = std::polar(1.0, -0.5 * potential_[j] * dt);
    kinetic_[j] = std::polar(1.0, -kinetic_energy_[j] * dt);
  }
}

void PropagatorPlan::step(WaveFunction& psi) const {
  auto a = psi.amplitudes();
  const std::size_t n = a.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) a[j] = mul(a[j], half_potential_[j]);
  fft_.forward(a);
  for (std::size_t j = 0; j < n; ++j) a[j] = mul(a[j], kinetic_[j]) * inv_n;
  fft_.backward(a);
  for (std::size_t j = 0; j < n; ++j) a[j] = mul(a[j], half_potential_[j]);
}

void PropagatorPlan::step_partial(WaveFunction& psi, double tau) const {
  auto a = psi.amplitudes();
  const std::size_t n = a.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  CVector half(n);
  for (std::size_t j = 0; j < n; ++j) {
    half[j] = std::polar(1.0, -0.5 * potential_[j] * tau);
    a[j] = mul(a[j], half[j]);
  }
  fft_.forward(a);
  for (std::size_t j = 0; j < n; ++j) a[j] = mul(a[j], std::polar(1.0, -kinetic_energy_[j] * tau)) * inv_n;
  fft_.backward(a);
  for (std::size_t j = 0; j < n; ++j) a[j] = mul(a[j], half[j]);
}

void PropagatorPlan::propagate_for(WaveFunction& psi, double tau) const {
  if (tau <= 0.0) return;
  const auto n_full = static_cast<std::size_t>(std::floor(tau / dt_ + 1e-9));
  for (std::size_t s = 0; s < n_full; ++s) step(psi);
  const double rest = tau - static_cast<double>(n_full) * dt_;
  if (rest > 1e-9 * dt_) step_partial(psi, rest);
}

PropagatorPlan plan_propagator(const LatticeParams& params, const Grid& grid, double dt) {
  return PropagatorPlan(params, grid, dt);
}

WaveFunction step(WaveFunction psi, const PropagatorPlan& plan) {
  plan.step(psi);
  return psi;
}

WaveFunction evolve(WaveFunction psi, const PropagatorPlan& plan, std::size_t n_steps, std::size_t n_record,
                    const StepObserver& observer) {
  const bool observe = observer && n_record > 0;
  if (observe) observer(0, 0.0, psi);
  for (std::size_t s = 1; s <= n_steps; ++s) {
    plan.step(psi);
    if (observe && s % n_record == 0) observer(s, static_cast<double>(s) * plan.dt(), psi);
  }
  return psi;
}

WaveFunction apply_hamiltonian(const WaveFunction& psi, const LatticeParams& params) {
  const Grid& grid = psi.grid();
  const std::size_t n = grid.size();
  detail::FftPair fft(n);
  WaveFunction out = psi;
  auto a = out.amplitudes();
  fft.forward(a);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double p = grid.wavenumber(j) / kWavenumber;
    a[j] *= p * p * inv_n;
  }
  fft.backward(a);
  for (std::size_t j = 0; j < n; ++j) a[j] += potential_1d(params, grid.x(j)) * psi[j];
  return out;
}

double expectation_energy(const WaveFunction& psi, const LatticeParams& params) {
  const complex e = psi.inner(apply_hamiltonian(psi, params));
  if (std::abs(e.imag()) > 1e-8) {
    throw NonHermitianResidual("imaginary part of <H> is " + std::to_string(e.imag()));
  }
  return e.real();
}

}  // namespace dwl
