#include "dwl/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "dwl/errors.hpp"
#include "dwl/output.hpp"
#include "dwl/presets.hpp"

namespace dwl {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::string rate_note(const RunConfig& c) {
  std::ostringstream o;
  o.precision(12);
  const LatticeParams phys = c.physical_lattice();
  o << "rate conversion: E_R/hbar = " << phys.er_frequency << " s^-1 (er_convention = " << to_string(c.er_convention)
    << "); kick rate = " << c.dimensionless_rate() << " per 1/E_R";
  return o.str();
}

struct Job {
  std::string stem;
  RunConfig config;
};

}  // namespace

SimulationResult simulate(const RunConfig& config) {
  config.validate();
  const LatticeParams params = config.physical_lattice();
  const Grid grid = init_grid(config.grid.x_min, config.grid.x_max, config.grid.n_points);
  const WellPartition partition = partition_wells(params, grid.x_min(), grid.x_max());

  SimulationResult result;
  result.spectrum = compute_spectrum(params, PlaneWaveBasis{config.n_max});
  result.initial = prepare_initial_state(config.initial_state, result.spectrum, grid, partition);

  const PropagatorPlan plan(params, grid, config.propagation.dt);
  result.series = run_ensemble(config.ensemble_config(), plan, partition, result.initial.psi);

  std::vector<std::string>& meta = result.series.metadata;
  // Thread count and output location do not change the numbers, so they are
  // left out to keep files comparable across machines.
  for (const std::string& line : split_lines(serialize_config(config))) {
    if (line.starts_with("threads =") || line.starts_with("directory =")) continue;
    meta.push_back(line);
  }
  meta.push_back(rate_note(config));
  std::ostringstream spec;
  spec.precision(12);
  spec << "E_0 = " << result.spectrum[0].energy << ", E_1 = " << result.spectrum[1].energy
       << ", delta = " << splitting(result.spectrum);
  meta.push_back(spec.str());
  for (const std::string& note : result.initial.notes) meta.push_back(note);
  meta.push_back("total kicks = " + std::to_string(result.series.total_kicks));
  return result;
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Double-well optical lattice: spectra, tunnelling and kicked Monte Carlo ensembles", "dwlattice"};
  std::string command;
  std::string config_path;
  std::string preset_id;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string rate_unit = "hz";
  std::optional<double> t_final;
  std::optional<std::size_t> n_record;
  std::optional<std::size_t> trajectories;
  std::optional<unsigned> threads;
  bool kick_log = false;

  app.add_option("command", command, "spectrum | potential | evolve | ensemble | preset")
      ->required()
      ->check(CLI::IsMember({"spectrum", "potential", "evolve", "ensemble", "preset"}));
  auto* cfg_opt = app.add_option("--config", config_path, "run configuration file");
  auto* preset_opt = app.add_option("--preset", preset_id, "preset id (fig1 ... fig9b)");
  cfg_opt->excludes(preset_opt);
  app.add_option("--seed", seed, "base seed for the trajectory streams (default 0)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--rate-unit", rate_unit, "unit of a bare `rate` key in the config")
      ->check(CLI::IsMember({"hz", "dimensionless"}));
  app.add_option("--t-final", t_final, "override t_final (units of 1/E_R)");
  app.add_option("--n-record", n_record, "override the number of record intervals");
  app.add_option("--trajectories", trajectories, "override the ensemble size");
  app.add_option("--threads", threads, "worker threads for trajectories (0 = all cores)");
  app.add_flag("--kick-log", kick_log, "also write per-trajectory kick logs");

  if (args.empty()) {
    err << app.help();
    return 2;
  }
  std::vector<const char*> argv{"dwlattice"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  }
  if (config_path.empty() && preset_id.empty()) {
    err << "usage error: one of --config or --preset is required\n" << app.help();
    return 2;
  }
  if (command == "preset" && preset_id.empty()) {
    err << "usage error: the preset command needs --preset\n" << app.help();
    return 2;
  }

  try {
    const RateUnit bare_unit = rate_unit == "hz" ? RateUnit::Hz : RateUnit::Dimensionless;
    std::vector<Job> jobs;
    PresetKind kind = PresetKind::Ensemble;
    if (!preset_id.empty()) {
      Preset preset = expand_preset(preset_id);
      kind = preset.kind;
      for (PresetRun& run : preset.runs) jobs.push_back({preset.id + "_" + run.label, std::move(run.config)});
    } else {
      std::ifstream in(config_path);
      if (!in) throw IoError("cannot read config '" + config_path + "'");
      std::stringstream buf;
      buf << in.rdbuf();
      RunConfig c = parse_config(buf.str(), bare_unit);
      jobs.push_back({c.label, std::move(c)});
    }
    if (command == "preset") command = kind == PresetKind::Potential ? "potential" : "ensemble";

    for (Job& job : jobs) {
      RunConfig& c = job.config;
      if (seed) c.ensemble.base_seed = *seed;
      if (t_final) c.propagation.t_final = *t_final;
      if (n_record) c.propagation.n_record = *n_record;
      if (trajectories) c.ensemble.n_trajectories = *trajectories;
      if (threads) c.ensemble.threads = *threads;
      if (kick_log) c.output.kick_log = true;
      c.validate();
      const std::filesystem::path dir = out_dir.empty() ? std::filesystem::path(c.output.directory) : std::filesystem::path(out_dir);

      if (command == "spectrum") {
        const BlochSpectrum spectrum = compute_spectrum(c.physical_lattice(), PlaneWaveBasis{c.n_max});
        const auto path = dir / (job.stem + "_spectrum.csv");
        write_text(path, format_spectrum_table(spectrum));
        out << path.string() << '\n';
      } else if (command == "potential") {
        const Grid grid = init_grid(c.grid.x_min, c.grid.x_max, c.grid.n_points);
        const auto path = dir / (job.stem + "_potential.csv");
        write_text(path, format_potential_table(c.physical_lattice(), grid));
        out << path.string() << '\n';
      } else {
        std::string stem = job.stem;
        if (command == "evolve") {
          c.kick.enabled = false;
          c.ensemble.n_trajectories = 1;
          stem += "_evolve";
        }
        const SimulationResult result = simulate(c);
        const auto path = dir / (stem + ".csv");
        write_series(result.series, path, c.output.error_bars);
        out << path.string() << '\n';
        if (c.output.kick_log) {
          const auto log_path = dir / (stem + "_kicks.csv");
          write_text(log_path, format_kick_log(result.series.kick_logs));
          out << log_path.string() << '\n';
        }
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace dwl
