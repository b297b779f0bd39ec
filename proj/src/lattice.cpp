#include "dwl/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dwl/errors.hpp"

namespace dwl {

namespace {

constexpr double kExtremumTol = 1e-9 * kLambda;

// Golden-section search for an extremum of f bracketed by [a, b].
// sign = +1 finds a minimum, -1 a maximum.
template <class F>
double golden_section(F&& f, double a, double b, double sign) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = sign * f(c);
  double fd = sign * f(d);
  while (b - a > kExtremumTol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = sign * f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = sign * f(d);
    }
  }
  return 0.5 * (a + b);
}

double positive_fmod(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0.0) r += period;
  return r;
}

}  // namespace

void LatticeParams::validate() const {
  if (!(v_xy > 0.0)) throw ValidationError("v_xy", "potential depth must be > 0");
  if (!(z_f >= 0.0 && z_f <= 1.0)) throw ValidationError("z_f", "must lie in [0, 1]");
  if (!(er_frequency > 0.0)) throw ValidationError("er_frequency", "must be > 0");
  for (double phase : {theta_xy, theta_z, phi_xy, phi_z}) {
    if (!std::isfinite(phase)) throw ValidationError("phase", "lattice phases must be finite");
  }
}

double potential_2d(const LatticeParams& p, double x, double y) {
  const double k = kWavenumber;
  const double v1 = 4.0 + 2.0 * std::cos(2.0 * k * x - 2.0 * p.theta_xy - 2.0 * p.phi_xy) +
                    2.0 * std::cos(2.0 * k * y + 2.0 * p.phi_xy);
  const double v2 = 4.0 + 4.0 * std::cos(k * x + k * y - p.theta_z) +
                    4.0 * std::cos(k * x - k * y - p.theta_z - 2.0 * p.phi_z) +
                    2.0 * std::cos(2.0 * k * x - 2.0 * p.theta_z - 2.0 * p.phi_z) +
                    2.0 * std::cos(2.0 * k * y + 2.0 * p.phi_z);
  return -(p.v_xy / 4.0) * ((1.0 - p.z_f) * v1 + p.z_f * v2);
}

double potential_1d(const LatticeParams& params, double x) { return potential_2d(params, x, 0.0); }

WellPartition::WellPartition(std::vector<Cell> cells, double x_min, double x_max)
    : cells_(std::move(cells)), x_min_(x_min), x_max_(x_max) {}

double WellPartition::wrap(double x) const {
  const double length = x_max_ - x_min_;
  double u = positive_fmod(x - origin(), length);
  if (u <= 0.0) u += length;
  return origin() + u;
}

WellLocation WellPartition::locate(double x) const {
  const double u = wrap(x) - origin();
  auto idx = static_cast<std::ptrdiff_t>(std::ceil(u / kLambda)) - 1;
  idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(cells_.size()) - 1);
  const Cell& cell = cells_[static_cast<std::size_t>(idx)];
  const double xw = wrap(x);
  return {static_cast<std::size_t>(idx), xw <= cell.barrier_position ? Side::Left : Side::Right};
}

bool WellPartition::in(double x, std::size_t cell, Side side) const {
  const WellLocation loc = locate(x);
  return loc.cell == cell && loc.side == side;
}

double WellPartition::total_length() const {
  double sum = 0.0;
  for (const Cell& c : cells_) sum += c.left.length() + c.right.length();
  return sum;
}

WellPartition partition_wells(const LatticeParams& params, double x_min, double x_max,
                              std::size_t samples_per_cell) {
  params.validate();
  if (samples_per_cell < 64) throw ValidationError("samples_per_cell", "must be >= 64");
  const double width = x_max - x_min;
  const double n_cells_real = width / kLambda;
  const auto n_cells = static_cast<std::size_t>(std::llround(n_cells_real));
  if (n_cells == 0 || std::abs(n_cells_real - static_cast<double>(n_cells)) > 1e-12 * n_cells_real) {
    throw BadDomain("well partition needs a domain that is a whole number of lattice periods");
  }

  auto v = [&params](double x) { return potential_1d(params, x); };
  const double h = kLambda / static_cast<double>(samples_per_cell);

  // Inter-cell barrier: the highest maximum within one period.
  std::size_t top = 0;
  double top_value = v(x_min);
  for (std::size_t i = 1; i < samples_per_cell; ++i) {
    const double val = v(x_min + static_cast<double>(i) * h);
    if (val > top_value) {
      top_value = val;
      top = i;
    }
  }
  const double xt = x_min + static_cast<double>(top) * h;
  const double boundary = golden_section(v, xt - h, xt + h, -1.0);
  double origin = x_min + positive_fmod(boundary - x_min, kLambda);
  if (origin - x_min > kLambda - kExtremumTol) origin -= kLambda;

  // Minima strictly inside (origin, origin + lambda).
  std::vector<double> samples(samples_per_cell + 1);
  for (std::size_t i = 0; i <= samples_per_cell; ++i) samples[i] = v(origin + static_cast<double>(i) * h);
  std::vector<double> minima;
  for (std::size_t i = 1; i < samples_per_cell; ++i) {
    if (samples[i] < samples[i - 1] && samples[i] <= samples[i + 1]) {
      const double xi = origin + static_cast<double>(i) * h;
      minima.push_back(golden_section(v, xi - h, xi + h, 1.0));
    }
  }
  if (minima.size() != 2) {
    throw DegenerateWell("expected two minima per lattice cell, found " + std::to_string(minima.size()));
  }

  const auto lo = static_cast<std::size_t>(std::ceil((minima[0] - origin) / h));
  const auto hi = static_cast<std::size_t>(std::floor((minima[1] - origin) / h));
  std::size_t best = lo;
  for (std::size_t i = lo; i <= hi; ++i) {
    if (samples[i] > samples[best]) best = i;
  }
  const double xb = origin + static_cast<double>(best) * h;
  const double barrier = golden_section(v, std::max(minima[0], xb - h), std::min(minima[1], xb + h), -1.0);

  std::vector<Cell> cells;
  cells.reserve(n_cells);
  for (std::size_t c = 0; c < n_cells; ++c) {
    const double shift = static_cast<double>(c) * kLambda;
    const double a = origin + shift;
    const double b = barrier + shift;
    cells.push_back(Cell{{a, b}, {b, a + kLambda}, b});
  }
  return WellPartition(std::move(cells), x_min, x_max);
}

double convert_rate(const LatticeParams& params, double rate_hz) {
  if (rate_hz < 0.0) throw ValidationError("rate_hz", "must be >= 0");
  return rate_hz / params.er_frequency;
}

}  // namespace dwl
