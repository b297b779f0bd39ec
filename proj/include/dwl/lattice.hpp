#pragma once

#include <cstddef>
#include <numbers>
#include <vector>

namespace dwl {

// Units: hbar = 1, lengths in lattice wavelengths, energies in recoil
// energies E_R, times in 1/E_R.
inline constexpr double kLambda = 1.0;
inline constexpr double kWavenumber = 2.0 * std::numbers::pi / kLambda;

/// Double-well lattice constants. Defaults give the reference lattice
/// (V_xy = 36 E_R, delta theta = pi/2, delta phi = 0) with the in-plane
/// phases fixed to zero, so the out-of-plane phases equal the differences.
struct LatticeParams {
  double v_xy = 36.0;
  double z_f = 0.05;
  double theta_xy = 0.0;
  double theta_z = std::numbers::pi / 2.0;
  double phi_xy = 0.0;
  double phi_z = 0.0;
  /// E_R / hbar in s^-1; divides laboratory rates quoted in Hz.
  double er_frequency = 3500.0;

  double delta_theta() const { return theta_z - theta_xy; }
  double delta_phi() const { return phi_z - phi_xy; }

  /// Throws ValidationError naming the first offending field.
  void validate() const;

  bool operator==(const LatticeParams&) const = default;
};

double potential_2d(const LatticeParams& params, double x, double y);

/// The y = 0 cut of potential_2d.
double potential_1d(const LatticeParams& params, double x);

/// Half-open interval (lo, hi]: a point on a shared boundary belongs to the
/// lower-x interval.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double x) const { return x > lo && x <= hi; }
};

enum class Side { Left, Right };

struct Cell {
  Interval left;
  Interval right;
  double barrier_position = 0.0;

  Interval whole() const { return {left.lo, right.hi}; }
};

struct WellLocation {
  std::size_t cell = 0;
  Side side = Side::Left;
};

/// Left/right sub-well intervals of every unit cell of a periodic domain.
///
/// Cell boundaries sit on the inter-cell potential maxima, which in general
/// are not aligned with the domain ends. Cells therefore start at `origin()`
/// (the first boundary at or above x_min) and the last cell may extend past
/// x_max; positions are mapped into (origin, origin + L] before lookup.
class WellPartition {
 public:
  WellPartition(std::vector<Cell> cells, double x_min, double x_max);

  const std::vector<Cell>& cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }
  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double origin() const { return cells_.front().left.lo; }

  /// Position folded into (origin, origin + L].
  double wrap(double x) const;
  WellLocation locate(double x) const;
  std::size_t cell_containing(double x) const { return locate(x).cell; }

  /// Membership test for one sub-well, periodic in the domain length.
  bool in(double x, std::size_t cell, Side side) const;

  double total_length() const;

 private:
  std::vector<Cell> cells_;
  double x_min_;
  double x_max_;
};

/// Finds the double-well structure of potential_1d over [x_min, x_max].
/// Extrema are found by dense sampling and refined by golden-section search
/// to 1e-9 lambda. Throws DegenerateWell unless every cell has exactly two
/// minima.
WellPartition partition_wells(const LatticeParams& params, double x_min, double x_max,
                              std::size_t samples_per_cell = 256);

/// Converts a laboratory rate in Hz into expected events per 1/E_R.
double convert_rate(const LatticeParams& params, double rate_hz);

}  // namespace dwl
