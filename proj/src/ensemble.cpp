#include "dwl/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "dwl/errors.hpp"

namespace dwl {

namespace {

struct Moments {
  double mean = 0.0;
  double standard_error = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  const auto n = static_cast<double>(v.size());
  for (double x : v) m.mean += x;
  m.mean /= n;
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.standard_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return m;
}

double energy_with_plan(const WaveFunction& psi, const PropagatorPlan& plan) {
  WaveFunction hpsi = psi;
  auto a = hpsi.amplitudes();
  const double inv_n = 1.0 / static_cast<double>(a.size());
  plan.fft().forward(a);
  for (std::size_t j = 0; j < a.size(); ++j) a[j] *= plan.kinetic_energy()[j] * inv_n;
  plan.fft().backward(a);
  for (std::size_t j = 0; j < a.size(); ++j) a[j] += plan.potential()[j] * psi[j];
  return psi.inner(hpsi).real();
}

std::vector<char> interval_mask(const Grid& grid, const WellPartition& partition, const Interval& interval) {
  std::vector<char> mask(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double xw = partition.wrap(grid.x(j));
    mask[j] = interval.contains(xw) || interval.contains(xw - grid.length()) || interval.contains(xw + grid.length());
  }
  return mask;
}

}  // namespace

PreparedState prepare_initial_state(const InitialState& init, const BlochSpectrum& spectrum, const Grid& grid,
                                    const WellPartition& partition) {
  PreparedState out;
  switch (init.kind) {
    case InitialKind::LState: {
      LState l = make_L_state(spectrum, grid, partition);
      out.psi = std::move(l.psi);
      out.description = "L";
      std::ostringstream note;
      note.precision(12);
      note << "L-state relative phase alpha = " << l.alpha << " (P_L = " << l.p_left << ", rejected "
           << l.p_left_other << ")";
      out.notes.push_back(note.str());
      break;
    }
    case InitialKind::Gaussian: {
      out.psi = gaussian_on_grid(grid, init.sigma, init.center);
      out.description = "gaussian";
      const GaussianProjection proj = project_gaussian(spectrum, grid, init.sigma, init.center, init.levels);
      std::ostringstream note;
      note.precision(6);
      note << "gaussian projection |c_l|:";
      for (const auto& [level, c] : proj.coefficients.terms) note << ' ' << std::abs(c);
      note << " residual " << proj.residual;
      out.notes.push_back(note.str());
      break;
    }
    case InitialKind::Coefficients:
      out.psi = make_superposition(init.coefficients, spectrum, grid);
      out.description = "coefficients";
      break;
  }
  return out;
}

void EnsembleConfig::validate() const {
  if (n_trajectories < 1) throw ValidationError("n_trajectories", "must be >= 1");
  if (n_records < 1) throw ValidationError("n_record", "must be >= 1");
  if (steps_per_record < 1) throw ValidationError("steps_per_record", "must be >= 1");
  kick.validate();
}

ObservableSeries run_ensemble(const EnsembleConfig& cfg, const PropagatorPlan& plan,
                              const WellPartition& partition, const WaveFunction& psi0) {
  cfg.validate();
  const Grid& grid = plan.grid();
  if (!(psi0.grid() == grid)) throw BadDomain("initial state and propagator use different grids");

  const std::vector<char> left = side_mask(grid, partition, Side::Left);
  const std::size_t home = partition.cell_containing(cfg.initial_well_center);
  const std::vector<char> home_left = well_mask(grid, partition, home, Side::Left);
  const std::vector<char> home_right = well_mask(grid, partition, home, Side::Right);

  std::vector<Trajectory> trajectories;
  trajectories.reserve(cfg.n_trajectories);
  for (std::size_t k = 0; k < cfg.n_trajectories; ++k) {
    trajectories.emplace_back(psi0, TrajectorySeed{cfg.base_seed, k});
  }

  ObservableSeries series;
  series.n_trajectories = cfg.n_trajectories;
  std::vector<WaveFunction> states(cfg.n_trajectories);

  auto record = [&](double t) {
    for (std::size_t k = 0; k < trajectories.size(); ++k) states[k] = trajectories[k].psi();
    std::vector<double> pl(states.size());
    std::vector<double> fs(states.size());
    double energy = 0.0;
    double norm_err = 0.0;
    for (std::size_t k = 0; k < states.size(); ++k) {
      pl[k] = states[k].probability(left);
      fs[k] = std::norm(psi0.inner(states[k]));
      energy += energy_with_plan(states[k], plan);
      norm_err = std::max(norm_err, std::abs(states[k].norm_squared() - 1.0));
    }
    const Moments mpl = moments(pl);
    const Moments mfs = moments(fs);
    series.times.push_back(t);
    series.p_left_total.push_back(mpl.mean);
    series.se_p_left.push_back(mpl.standard_error);
    series.survival.push_back(mfs.mean);
    series.se_survival.push_back(mfs.standard_error);
    series.p_initial_well.push_back(prob_in_mask(states, home_left));
    series.p_right_well.push_back(prob_in_mask(states, home_right));
    series.purity.push_back(purity(states));
    series.mean_energy.push_back(energy / static_cast<double>(states.size()));
    series.max_norm_error.push_back(norm_err);
  };

  unsigned threads = cfg.threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : cfg.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, trajectories.size()));

  const double span = static_cast<double>(cfg.steps_per_record) * plan.dt();
  record(0.0);
  for (std::size_t r = 1; r <= cfg.n_records; ++r) {
    auto work = [&](std::size_t first) {
      for (std::size_t k = first; k < trajectories.size(); k += threads) {
        trajectories[k].advance_interval(plan, cfg.kick, cfg.steps_per_record);
      }
    };
    if (threads <= 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      pool.reserve(threads);
      for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    }
    record(static_cast<double>(r) * span);
  }
  for (const Trajectory& t : trajectories) {
    series.total_kicks += t.kick_log().size();
    if (cfg.keep_kick_logs) series.kick_logs.push_back(t.kick_log());
  }
  return series;
}

double prob_in_mask(std::span<const WaveFunction> trajectories, std::span<const char> mask) {
  double sum = 0.0;
  for (const WaveFunction& psi : trajectories) sum += psi.probability(mask);
  return sum / static_cast<double>(trajectories.size());
}

double prob_in_interval(std::span<const WaveFunction> trajectories, const WellPartition& partition,
                        const Interval& interval) {
  if (trajectories.empty()) return 0.0;
  return prob_in_mask(trajectories, interval_mask(trajectories.front().grid(), partition, interval));
}

double prob_left_total(std::span<const WaveFunction> trajectories, const WellPartition& partition) {
  if (trajectories.empty()) return 0.0;
  return prob_in_mask(trajectories, side_mask(trajectories.front().grid(), partition, Side::Left));
}

double survival(std::span<const WaveFunction> trajectories, const WaveFunction& psi0) {
  double sum = 0.0;
  for (const WaveFunction& psi : trajectories) sum += std::norm(psi0.inner(psi));
  return sum / static_cast<double>(trajectories.size());
}

Eigen::MatrixXcd gram_matrix(std::span<const WaveFunction> trajectories) {
  const auto n = static_cast<Eigen::Index>(trajectories.size());
  Eigen::MatrixXcd g(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    g(k, k) = trajectories[static_cast<std::size_t>(k)].norm_squared();
    for (Eigen::Index l = k + 1; l < n; ++l) {
      const complex v = trajectories[static_cast<std::size_t>(k)].inner(trajectories[static_cast<std::size_t>(l)]);
      g(k, l) = v;
      g(l, k) = std::conj(v);
    }
  }
  return g;
}

double purity(std::span<const WaveFunction> trajectories) {
  const Eigen::MatrixXcd g = gram_matrix(trajectories);
  const auto n = static_cast<double>(trajectories.size());
  return g.cwiseAbs2().sum() / (n * n);
}

Eigen::MatrixXcd density_matrix(std::span<const WaveFunction> trajectories) {
  const auto n = static_cast<Eigen::Index>(trajectories.front().size());
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
  for (const WaveFunction& psi : trajectories) {
    const Eigen::Map<const Eigen::VectorXcd> v(psi.amplitudes().data(), n);
    rho += v * v.adjoint();
  }
  return rho / static_cast<double>(trajectories.size());
}

double purity_direct(const Eigen::MatrixXcd& rho, double dx) {
  complex sum{0.0, 0.0};
  for (Eigen::Index j = 0; j < rho.rows(); ++j) {
    for (Eigen::Index jp = 0; jp < rho.cols(); ++jp) sum += rho(j, jp) * rho(jp, j);
  }
  return sum.real() * dx * dx;
}

double survival_direct(const Eigen::MatrixXcd& rho, const WaveFunction& psi0) {
  complex sum{0.0, 0.0};
  for (Eigen::Index j = 0; j < rho.rows(); ++j) {
    for (Eigen::Index jp = 0; jp < rho.cols(); ++jp) {
      sum += std::conj(psi0[static_cast<std::size_t>(j)]) * rho(j, jp) * psi0[static_cast<std::size_t>(jp)];
    }
  }
  const double dx = psi0.grid().dx();
  return sum.real() * dx * dx;
}

double prob_direct(const Eigen::MatrixXcd& rho, std::span<const char> mask, double dx) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < rho.rows(); ++j) {
    if (mask[static_cast<std::size_t>(j)]) sum += rho(j, j).real();
  }
  return sum * dx;
}

}  // namespace dwl
