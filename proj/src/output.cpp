#include "dwl/output.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "dwl/errors.hpp"

namespace dwl {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string format_series(const ObservableSeries& s, bool error_bars) {
  std::ostringstream o;
  for (const std::string& line : s.metadata) o << "# " << line << '\n';
  o << "t,p_left_total,p_initial_well,p_right_well,survival,purity";
  if (error_bars) o << ",se_p_left,se_survival";
  o << '\n';
  for (std::size_t i = 0; i < s.size(); ++i) {
    o << format_number(s.times[i]) << ',' << format_number(s.p_left_total[i]) << ','
      << format_number(s.p_initial_well[i]) << ',' << format_number(s.p_right_well[i]) << ','
      << format_number(s.survival[i]) << ',' << format_number(s.purity[i]);
    if (error_bars) o << ',' << format_number(s.se_p_left[i]) << ',' << format_number(s.se_survival[i]);
    o << '\n';
  }
  return o.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_series(const ObservableSeries& series, const std::filesystem::path& path, bool error_bars) {
  write_text(path, format_series(series, error_bars));
}

std::string format_spectrum_table(const BlochSpectrum& spectrum) {
  std::ostringstream o;
  o << "level,energy_er,tail_mass\n";
  const PlaneWaveBasis& basis = spectrum.basis;
  for (std::size_t l = 0; l < spectrum.size(); ++l) {
    double tail = 0.0;
    for (int i = 0; i < basis.dimension(); ++i) {
      if (2 * std::abs(basis.harmonic(i)) > basis.n_max) tail += std::norm(spectrum[l].coeffs(i));
    }
    o << l << ',' << format_number(spectrum[l].energy) << ',' << format_number(tail) << '\n';
  }
  return o.str();
}

std::string format_potential_table(const LatticeParams& params, const Grid& grid) {
  std::ostringstream o;
  o << "x_over_lambda,v_over_er\n";
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid.x(j);
    o << format_number(x / kLambda) << ',' << format_number(potential_1d(params, x)) << '\n';
  }
  return o.str();
}

std::string format_kick_log(const std::vector<std::vector<KickEvent>>& logs) {
  std::ostringstream o;
  o << "trajectory,time,theta,phi\n";
  for (std::size_t k = 0; k < logs.size(); ++k) {
    for (const KickEvent& ev : logs[k]) {
      o << k << ',' << format_number(ev.time) << ',' << format_number(ev.theta) << ',' << format_number(ev.phi)
        << '\n';
    }
  }
  return o.str();
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (table.columns.empty()) {
      table.columns = std::move(fields);
      continue;
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const std::string& f : fields) row.push_back(std::strtod(f.c_str(), nullptr));
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace dwl
