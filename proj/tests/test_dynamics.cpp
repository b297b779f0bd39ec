#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "dwl/dynamics.hpp"
#include "dwl/errors.hpp"
#include "dwl/lattice.hpp"
#include "dwl/spectral.hpp"

using namespace dwl;

namespace {

LatticeParams reference(double z_f) {
  LatticeParams p;
  p.z_f = z_f;
  return p;
}

LatticeParams flat() {
  LatticeParams p;
  p.v_xy = 0.0;
  return p;
}

double distance(const WaveFunction& a, const WaveFunction& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += std::norm(a[j] - b[j]);
  return std::sqrt(s * a.grid().dx());
}

double max_abs_diff(const WaveFunction& a, const WaveFunction& b) {
  double worst = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) worst = std::max(worst, std::abs(a[j] - b[j]));
  return worst;
}

const Grid kGrid = init_grid(-9.75, 10.25, 512);

}  // namespace

TEST_CASE("grid construction") {
  const Grid g = init_grid(-9.75, 10.25, 512);
  CHECK(g.size() == 512);
  CHECK(g.dx() == doctest::Approx(20.0 / 512).epsilon(1e-15));
  CHECK(g.n_cells() == 20);
  CHECK(g.x(0) == -9.75);
  CHECK(g.wavenumber(1) == doctest::Approx(2 * std::numbers::pi / 20).epsilon(1e-14));
  CHECK(g.wavenumber(511) == doctest::Approx(-2 * std::numbers::pi / 20).epsilon(1e-14));
  CHECK(init_grid(0.0, 1.0, 64).n_cells() == 1);
  CHECK_THROWS_AS(init_grid(-9.75, 10.25, 511), BadDomain);
  CHECK_THROWS_AS(init_grid(-9.75, 10.0, 512), BadDomain);
  CHECK_THROWS_AS(init_grid(1.0, 1.0, 512), BadDomain);
}

TEST_CASE("Gaussian on the grid is normalized and centered") {
  const WaveFunction g = gaussian_on_grid(kGrid, 0.1, 0.0);
  CHECK(g.norm_squared() == doctest::Approx(1.0).epsilon(1e-14));
  double mean = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) mean += kGrid.x(j) * std::norm(g[j]) * kGrid.dx();
  CHECK(std::abs(mean) < 1e-10);
  // Minimum-image distance: a packet at the domain edge wraps around.
  const WaveFunction edge = gaussian_on_grid(kGrid, 0.1, kGrid.x_min());
  CHECK(std::abs(edge[kGrid.size() - 1]) == doctest::Approx(std::abs(edge[1])).epsilon(1e-12));
}

TEST_CASE("propagator phases have unit modulus") {
  for (double z : {0.05, 0.1}) {
    const PropagatorPlan plan = plan_propagator(reference(z), kGrid, 1e-3);
    for (const complex& c : plan.half_potential_phase()) CHECK(std::abs(std::abs(c) - 1.0) <= 1e-15);
    for (const complex& c : plan.kinetic_phase()) CHECK(std::abs(std::abs(c) - 1.0) <= 1e-15);
  }
}

TEST_CASE("trivial plans") {
  const PropagatorPlan flat_plan = plan_propagator(flat(), kGrid, 1e-3);
  for (const complex& c : flat_plan.half_potential_phase()) CHECK(c == complex(1.0));
  const PropagatorPlan zero_dt = plan_propagator(reference(0.1), kGrid, 0.0);
  for (const complex& c : zero_dt.half_potential_phase()) CHECK(c == complex(1.0));
  for (const complex& c : zero_dt.kinetic_phase()) CHECK(c == complex(1.0));
  // Zero-length evolution leaves the state unchanged.
  const WaveFunction g = gaussian_on_grid(kGrid, 0.1, 0.0);
  CHECK(max_abs_diff(step(g, zero_dt), g) < 1e-15);
}

TEST_CASE("plane wave acquires the free phase e^{-i n^2 dt}") {
  const double dt = 1e-3;
  const PropagatorPlan plan = plan_propagator(flat(), kGrid, dt);
  for (int n : {1, 3}) {
    WaveFunction psi(kGrid);
    for (std::size_t j = 0; j < kGrid.size(); ++j) psi[j] = std::polar(1.0, n * kWavenumber * kGrid.x(j));
    psi.normalize();
    WaveFunction expect = psi;
    for (std::size_t j = 0; j < kGrid.size(); ++j) expect[j] *= std::polar(1.0, -n * n * dt);
    CHECK(max_abs_diff(step(psi, plan), expect) < 1e-12);
  }
}

TEST_CASE("eigenstates are stationary under one step") {
  const LatticeParams p = reference(0.1);
  const BlochSpectrum s = compute_spectrum(p);
  const PropagatorPlan plan = plan_propagator(p, kGrid, 1e-3);
  for (std::size_t l = 0; l < 4; ++l) {
    const WaveFunction psi = synthesize_on_grid(s[l], s.basis, kGrid);
    CHECK(std::norm(psi.inner(step(psi, plan))) >= 1.0 - 1e-8);
  }
}

TEST_CASE("norm is preserved over 1e5 steps") {
  const LatticeParams p = reference(0.05);
  const PropagatorPlan plan = plan_propagator(p, kGrid, 1e-3);
  WaveFunction psi = gaussian_on_grid(kGrid, 0.1, 0.0);
  psi = evolve(psi, plan, 100000);
  CHECK(std::abs(psi.norm_squared() - 1.0) < 1e-9);
}

TEST_CASE("Strang splitting has a cubic local error") {
  // Two steps of dt against one step of 2 dt: the mismatch is O(dt^3), so
  // halving dt cuts it by about 8.
  const LatticeParams p = reference(0.1);
  const WaveFunction psi = gaussian_on_grid(kGrid, 0.1, 0.0);
  auto mismatch = [&](double dt) {
    const PropagatorPlan fine = plan_propagator(p, kGrid, dt);
    const PropagatorPlan coarse = plan_propagator(p, kGrid, 2 * dt);
    return distance(step(step(psi, fine), fine), step(psi, coarse));
  };
  const double ratio = mismatch(2e-3) / mismatch(1e-3);
  CHECK(ratio > 6.0);
  CHECK(ratio < 10.0);
}

TEST_CASE("partial steps compose") {
  const LatticeParams p = reference(0.1);
  const PropagatorPlan plan = plan_propagator(p, kGrid, 1e-3);
  const WaveFunction psi = gaussian_on_grid(kGrid, 0.1, 0.0);
  WaveFunction a = psi;
  plan.step_partial(a, 1e-3);
  CHECK(max_abs_diff(a, step(psi, plan)) < 1e-14);
  WaveFunction b = psi;
  plan.propagate_for(b, 0.0105);
  WaveFunction c = evolve(psi, plan, 10);
  plan.step_partial(c, 0.0005);
  CHECK(max_abs_diff(b, c) < 1e-14);
}

TEST_CASE("evolve records step 0 and every n_record-th step") {
  const PropagatorPlan plan = plan_propagator(reference(0.1), kGrid, 1e-3);
  const WaveFunction psi = gaussian_on_grid(kGrid, 0.1, 0.0);
  std::vector<std::size_t> seen;
  std::vector<double> times;
  const WaveFunction out = evolve(psi, plan, 10, 5, [&](std::size_t k, double t, const WaveFunction&) {
    seen.push_back(k);
    times.push_back(t);
  });
  CHECK(seen == std::vector<std::size_t>{0, 5, 10});
  CHECK(times[2] == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(evolve(psi, plan, 0) == psi);
}

TEST_CASE("energy expectation values") {
  // Free Gaussian of width sigma: <p^2>/k^2 = 1/(2 sigma^2 k^2).
  const double sigma = 0.1;
  const WaveFunction g = gaussian_on_grid(kGrid, sigma, 0.0);
  CHECK(expectation_energy(g, flat()) ==
        doctest::Approx(1.0 / (2 * sigma * sigma * kWavenumber * kWavenumber)).epsilon(1e-8));
  WaveFunction c(kGrid);
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = 1.0;
  c.normalize();
  CHECK(std::abs(expectation_energy(c, flat())) < 1e-14);
  // Constant state in the lattice: <V> = zeroth harmonic.
  CHECK(expectation_energy(c, reference(0.1)) ==
        doctest::Approx(potential_harmonic(reference(0.1), 0).real()).epsilon(1e-12));
}

TEST_CASE("grossly unnormalized input trips the Hermiticity check") {
  WaveFunction g = gaussian_on_grid(kGrid, 0.1, 0.3);
  for (std::size_t j = 0; j < g.size(); ++j) g[j] *= std::polar(1e12, 0.37 * j * j);
  CHECK_THROWS_AS(expectation_energy(g, reference(0.1)), NonHermitianResidual);
}

TEST_CASE("split-operator evolution converges to the eigen-expansion at second order") {
  const LatticeParams p = reference(0.1);
  const BlochSpectrum s = compute_spectrum(p);
  std::vector<WaveFunction> phi;
  for (std::size_t l = 0; l < 10; ++l) phi.push_back(synthesize_on_grid(s[l], s.basis, kGrid));
  const GaussianProjection proj = project_gaussian(s, kGrid, 0.1, 0.0, 10);
  const WaveFunction psi0 = make_superposition(proj.coefficients, s, kGrid);

  const double t = 1.0;
  WaveFunction exact(kGrid);
  for (std::size_t l = 0; l < 10; ++l) {
    const complex a = phi[l].inner(psi0) * std::polar(1.0, -s[l].energy * t);
    for (std::size_t j = 0; j < kGrid.size(); ++j) exact[j] += a * phi[l][j];
  }
  auto error = [&](double dt) {
    const PropagatorPlan plan = plan_propagator(p, kGrid, dt);
    return max_abs_diff(evolve(psi0, plan, static_cast<std::size_t>(std::llround(t / dt))), exact);
  };
  const double e1 = error(1e-3);
  const double e2 = error(5e-4);
  CHECK(e1 / e2 > 3.5);
  CHECK(e1 / e2 < 4.5);
  CHECK(error(2e-4) < 1e-6);
}

TEST_CASE("halving dt leaves the L-state well populations unchanged") {
  const LatticeParams p = reference(0.1);
  const BlochSpectrum s = compute_spectrum(p);
  const WellPartition part = partition_wells(p, kGrid.x_min(), kGrid.x_max());
  const auto left = side_mask(kGrid, part, Side::Left);
  const WaveFunction psi0 = make_L_state(s, kGrid, part).psi;
  auto run = [&](double dt, std::size_t n, std::size_t every) {
    std::vector<double> out;
    evolve(psi0, plan_propagator(p, kGrid, dt), n, every,
           [&](std::size_t, double, const WaveFunction& psi) { out.push_back(psi.probability(left)); });
    return out;
  };
  const auto coarse = run(1e-3, 20000, 1000);
  const auto fine = run(5e-4, 40000, 2000);
  REQUIRE(coarse.size() == fine.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < coarse.size(); ++i) worst = std::max(worst, std::abs(coarse[i] - fine[i]));
  CHECK(worst < 1e-6);
}

TEST_CASE("energy is conserved") {
  const LatticeParams p = reference(0.1);
  const PropagatorPlan plan = plan_propagator(p, kGrid, 1e-3);
  const WaveFunction psi0 = gaussian_on_grid(kGrid, 0.1, 0.0);
  const double e0 = expectation_energy(psi0, p);
  const WaveFunction psi = evolve(psi0, plan, 10000);
  CHECK(std::abs(expectation_energy(psi, p) - e0) < 1e-6 * std::abs(e0));
}

TEST_CASE("masks") {
  const LatticeParams p = reference(0.05);
  const WellPartition part = partition_wells(p, kGrid.x_min(), kGrid.x_max());
  const auto left = side_mask(kGrid, part, Side::Left);
  const auto right = side_mask(kGrid, part, Side::Right);
  for (std::size_t j = 0; j < kGrid.size(); ++j) CHECK(left[j] + right[j] == 1);
  const std::size_t home = part.cell_containing(0.0);
  const auto one = well_mask(kGrid, part, home, Side::Left);
  std::size_t count = 0;
  for (std::size_t j = 0; j < kGrid.size(); ++j) {
    count += one[j];
    if (one[j]) CHECK(left[j]);
  }
  CHECK(count > 0);
  CHECK(count < kGrid.size() / 20);
}
