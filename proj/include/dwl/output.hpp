#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dwl/config.hpp"
#include "dwl/ensemble.hpp"
#include "dwl/spectral.hpp"

namespace dwl {

/// 12 significant digits, the precision of every numeric output column.
std::string format_number(double v);

/// CSV text for an observable series: '#' comment lines (metadata), then
/// t,p_left_total,p_initial_well,p_right_well,survival,purity[,se_p_left,se_survival]
std::string format_series(const ObservableSeries& series, bool error_bars);

/// Writes format_series to path. Throws IoError naming the path.
void write_series(const ObservableSeries& series, const std::filesystem::path& path, bool error_bars = true);

/// `level,energy_er,tail_mass` rows; tail_mass is sum |d_n|^2 over |n| > n_max/2.
std::string format_spectrum_table(const BlochSpectrum& spectrum);

/// `x_over_lambda,v_over_er` rows over the grid.
std::string format_potential_table(const LatticeParams& params, const Grid& grid);

/// `trajectory,time,theta,phi` rows.
std::string format_kick_log(const std::vector<std::vector<KickEvent>>& logs);

void write_text(const std::filesystem::path& path, std::string_view text);

/// Parsed numeric CSV: header column names and data rows; '#' lines skipped.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

CsvTable parse_csv(std::string_view text);

}  // namespace dwl
