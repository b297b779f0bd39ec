#include "dwl/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <string>

#include "dwl/errors.hpp"

namespace dwl {

double SuperpositionSpec::norm_squared() const {
  double sum = 0.0;
  for (const auto& [level, c] : terms) sum += std::norm(c);
  return sum;
}

void SuperpositionSpec::normalize() {
  const double n = std::sqrt(norm_squared());
  if (n > 0.0) {
    for (auto& term : terms) term.second /= n;
  }
}

complex potential_harmonic(const LatticeParams& p, int m) {
  const double depth = -p.v_xy / 4.0;
  const double z = p.z_f;
  complex h{0.0, 0.0};
  switch (std::abs(m)) {
    case 0:
      h = (1.0 - z) * (4.0 + 2.0 * std::cos(2.0 * p.phi_xy)) + z * (4.0 + 2.0 * std::cos(2.0 * p.phi_z));
      break;
    case 1:
      h = 2.0 * z * (std::polar(1.0, -p.theta_z) + std::polar(1.0, -p.theta_z - 2.0 * p.phi_z));
      break;
    case 2:
      h = (1.0 - z) * std::polar(1.0, -2.0 * p.theta_xy - 2.0 * p.phi_xy) +
          z * std::polar(1.0, -2.0 * p.theta_z - 2.0 * p.phi_z);
      break;
    default:
      return {0.0, 0.0};
  }
  h *= depth;
  return m < 0 ? std::conj(h) : h;
}

Eigen::MatrixXcd build_hamiltonian(const LatticeParams& params, const PlaneWaveBasis& basis) {
  const int dim = basis.dimension();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const int n = basis.harmonic(i);
    h(i, i) = static_cast<double>(n * n) + potential_harmonic(params, 0).real();
    for (int m = 1; m <= 2 && i - m >= 0; ++m) {
      // row n, column n - m couples through e^{i m k x}
      const complex v = potential_harmonic(params, m);
      h(i, i - m) = v;
      h(i - m, i) = std::conj(v);
    }
  }
  return h;
}

BlochSpectrum solve_spectrum(const Eigen::MatrixXcd& hamiltonian) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hamiltonian);
  if (solver.info() != Eigen::Success) throw ConvergenceFailure("Hermitian eigensolver did not converge");

  BlochSpectrum spectrum;
  spectrum.basis.n_max = static_cast<int>((hamiltonian.rows() - 1) / 2);
  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();
  spectrum.states.reserve(static_cast<std::size_t>(values.size()));
  for (Eigen::Index l = 0; l < values.size(); ++l) {
    Eigen::VectorXcd v = vectors.col(l);
    Eigen::Index top = 0;
    v.cwiseAbs().maxCoeff(&top);
    v *= std::conj(v(top)) / std::abs(v(top));
    v(top) = std::abs(v(top));
    v.normalize();
    spectrum.states.push_back({values(l), std::move(v)});
  }
  return spectrum;
}

std::uint64_t fingerprint(const LatticeParams& params, const PlaneWaveBasis& basis) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  for (double v : {params.v_xy, params.z_f, params.theta_xy, params.theta_z, params.phi_xy, params.phi_z,
                   params.er_frequency}) {
    mix(&v, sizeof v);
  }
  mix(&basis.n_max, sizeof basis.n_max);
  return h;
}

BlochSpectrum compute_spectrum(const LatticeParams& params, const PlaneWaveBasis& basis) {
  params.validate();
  if (basis.n_max < 2) throw ValidationError("n_max", "plane-wave basis needs n_max >= 2");
  BlochSpectrum spectrum = solve_spectrum(build_hamiltonian(params, basis));
  spectrum.params_fingerprint = fingerprint(params, basis);
  return spectrum;
}

double splitting(const BlochSpectrum& spectrum) {
  if (spectrum.size() < 2) throw ValidationError("spectrum", "splitting needs at least two states");
  return spectrum[1].energy - spectrum[0].energy;
}

double convergence_residual(const LatticeParams& params, const PlaneWaveBasis& basis, std::size_t levels) {
  const BlochSpectrum coarse = compute_spectrum(params, basis);
  const BlochSpectrum fine = compute_spectrum(params, PlaneWaveBasis{2 * basis.n_max});
  double worst = 0.0;
  for (std::size_t l = 0; l < std::min({levels, coarse.size(), fine.size()}); ++l) {
    worst = std::max(worst, std::abs(coarse[l].energy - fine[l].energy));
  }
  return worst;
}

WaveFunction synthesize_raw(const Eigen::VectorXcd& coeffs, const PlaneWaveBasis& basis, const Grid& grid) {
  WaveFunction psi(grid);
  const double scale = 1.0 / std::sqrt(grid.length());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double kx = kWavenumber * grid.x(j);
    complex sum{0.0, 0.0};
    for (int i = 0; i < basis.dimension(); ++i) {
      sum += coeffs(i) * std::polar(1.0, static_cast<double>(basis.harmonic(i)) * kx);
    }
    psi[j] = sum * scale;
  }
  return psi;
}

WaveFunction synthesize_on_grid(const BlochState& state, const PlaneWaveBasis& basis, const Grid& grid) {
  WaveFunction psi = synthesize_raw(state.coeffs, basis, grid);
  psi.normalize();
  return psi;
}

LState make_L_state(const BlochSpectrum& spectrum, const Grid& grid, const WellPartition& partition) {
  if (spectrum.size() < 2) throw ValidationError("spectrum", "|L> needs two eigenstates");
  const WaveFunction phi0 = synthesize_on_grid(spectrum[0], spectrum.basis, grid);
  const WaveFunction phi1 = synthesize_on_grid(spectrum[1], spectrum.basis, grid);
  const std::vector<char> left = side_mask(grid, partition, Side::Left);

  auto combine = [&](double sign) {
    WaveFunction psi(grid);
    for (std::size_t j = 0; j < grid.size(); ++j) psi[j] = (phi0[j] + sign * phi1[j]) / std::sqrt(2.0);
    psi.normalize();
    return psi;
  };
  WaveFunction plus = combine(1.0);
  WaveFunction minus = combine(-1.0);
  const double p_plus = plus.probability(left);
  const double p_minus = minus.probability(left);
  if (p_plus >= p_minus) return {std::move(plus), 0.0, p_plus, p_minus};
  return {std::move(minus), std::numbers::pi, p_minus, p_plus};
}

GaussianProjection project_gaussian(const BlochSpectrum& spectrum, const Grid& grid, double sigma, double center,
                                    std::size_t n_levels) {
  if (!(sigma > 0.0)) throw ValidationError("sigma", "must be > 0");
  if (!(center >= grid.x_min() && center < grid.x_max())) throw ValidationError("center", "must lie inside the domain");
  n_levels = std::min(n_levels, spectrum.size());

  WaveFunction g(grid);
  const double reach = 40.0 * sigma + kLambda;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double d0 = grid.x(j) - center;
    const auto lo = static_cast<long>(std::floor((d0 - reach) / kLambda));
    const auto hi = static_cast<long>(std::ceil((d0 + reach) / kLambda));
    double sum = 0.0;
    for (long image = lo; image <= hi; ++image) {
      const double d = d0 - static_cast<double>(image) * kLambda;
      sum += std::exp(-d * d / (2.0 * sigma * sigma));
    }
    g[j] = sum;
  }
  g.normalize();

  GaussianProjection out;
  for (std::size_t l = 0; l < n_levels; ++l) {
    const WaveFunction phi = synthesize_on_grid(spectrum[l], spectrum.basis, grid);
    out.coefficients.terms.emplace_back(l, phi.inner(g));
  }
  out.residual = 1.0 - out.coefficients.norm_squared();
  if (out.residual > 0.05) {
    throw PoorOverlap("lowest " + std::to_string(n_levels) + " levels miss " + std::to_string(out.residual) +
                      " of the Gaussian norm");
  }
  return out;
}

WaveFunction superposition_raw(const SuperpositionSpec& spec, const BlochSpectrum& spectrum, const Grid& grid) {
  WaveFunction psi(grid);
  for (const auto& [level, c] : spec.terms) {
    if (level >= spectrum.size()) {
      throw ValidationError("level", "index " + std::to_string(level) + " outside the spectrum");
    }
    const WaveFunction phi = synthesize_raw(spectrum[level].coeffs, spectrum.basis, grid);
    for (std::size_t j = 0; j < grid.size(); ++j) psi[j] += c * phi[j];
  }
  return psi;
}

WaveFunction make_superposition(const SuperpositionSpec& spec, const BlochSpectrum& spectrum, const Grid& grid) {
  WaveFunction psi = superposition_raw(spec, spectrum, grid);
  psi.normalize();
  return psi;
}

}  // namespace dwl
