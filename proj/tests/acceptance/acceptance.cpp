// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
// Usage: dwl_acceptance [criterion numbers...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dwl/cli.hpp"
#include "dwl/config.hpp"
#include "dwl/decoherence.hpp"
#include "dwl/dynamics.hpp"
#include "dwl/ensemble.hpp"
#include "dwl/lattice.hpp"
#include "dwl/output.hpp"
#include "dwl/presets.hpp"
#include "dwl/spectral.hpp"

using namespace dwl;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

LatticeParams reference(double z_f) {
  LatticeParams p;
  p.z_f = z_f;
  return p;
}

RunConfig preset_run(const std::string& id, const std::string& label) {
  for (PresetRun& r : expand_preset(id).runs) {
    if (r.label == label) return r.config;
  }
  throw std::runtime_error("no run " + label + " in " + id);
}

// Every simulated series, for the conservation and purity-bound sweeps.
struct Recorded {
  std::string name;
  ObservableSeries series;
  bool kicked = false;
};
std::vector<Recorded> g_runs;

const ObservableSeries& record_run(const std::string& name, const RunConfig& c) {
  g_runs.push_back({name, simulate(c).series, c.kick.enabled && c.kick.rate > 0.0});
  return g_runs.back().series;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Refines an extremum at index i of a uniformly sampled series by a parabola
// through its neighbours.
double refine_extremum(const std::vector<double>& t, const std::vector<double>& y, std::size_t i) {
  if (i == 0 || i + 1 >= y.size()) return t[i];
  const double denom = y[i - 1] - 2 * y[i] + y[i + 1];
  if (denom == 0.0) return t[i];
  const double shift = 0.5 * (y[i - 1] - y[i + 1]) / denom;
  return t[i] + shift * (t[i + 1] - t[i]);
}

// ---------------------------------------------------------------------------

Outcome doublet() {
  std::string detail;
  bool ok = true;
  double deltas[2];
  int i = 0;
  for (double z : {0.05, 0.1}) {
    const BlochSpectrum s = compute_spectrum(reference(z));
    const double ratio = (s[1].energy - s[0].energy) / (s[2].energy - s[1].energy);
    deltas[i++] = splitting(s);
    ok = ok && ratio < 0.1;
    detail += fmt("Z_f=%g: delta=%.7g ratio=%.3g; ", z, splitting(s), ratio);
  }
  ok = ok && deltas[1] > deltas[0];
  return {ok, detail + fmt("delta(0.1) > delta(0.05): %s", deltas[1] > deltas[0] ? "yes" : "no")};
}

Outcome tunnelling() {
  bool ok = true;
  std::string detail;
  double periods[2];
  double deltas[2];
  int i = 0;
  for (const char* label : {"zf0.05", "zf0.1"}) {
    const RunConfig c = preset_run("fig2", label);
    const ObservableSeries& s = record_run(std::string("fig2 ") + label, c);
    const double delta = splitting(compute_spectrum(c.physical_lattice(), PlaneWaveBasis{c.n_max}));
    const auto& p = s.p_left_total;
    // First minimum, then the first maximum after it.
    std::size_t imin = 1;
    while (imin + 1 < p.size() && !(p[imin] <= p[imin - 1] && p[imin] < p[imin + 1])) ++imin;
    std::size_t imax = imin + 1;
    while (imax + 1 < p.size() && !(p[imax] >= p[imax - 1] && p[imax] > p[imax + 1])) ++imax;
    const double period = refine_extremum(s.times, p, imax);
    const double lo = p[imin];
    const double hi = p[imax];
    const double expect = 2.0 / delta;
    const bool swing = lo < 0.1 && hi > 0.9;
    const bool match = std::abs(period - expect) <= 0.25 * expect;
    ok = ok && swing && match;
    periods[i] = period;
    deltas[i++] = delta;
    detail += fmt("Z_f=%s: min %.4f max %.4f period %.1f vs 2/delta %.1f (ratio %.3f; 2pi/delta %.1f); ", label + 2,
                  lo, hi, period, expect, period / expect, 2 * std::numbers::pi / delta);
  }
  const double r_period = periods[0] / periods[1];
  const double r_delta = deltas[1] / deltas[0];
  const bool scaling = std::abs(r_period / r_delta - 1.0) <= 0.1;
  ok = ok && scaling;
  return {ok, detail + fmt("period ratio %.4f vs delta ratio %.4f", r_period, r_delta)};
}

Outcome gaussian_non_return() {
  bool ok = true;
  std::string detail;
  for (const char* id : {"fig3a", "fig3b"}) {
    const RunConfig c = expand_preset(id).runs.front().config;
    const ObservableSeries& s = record_run(id, c);
    const auto& p = s.p_initial_well;
    const bool start = p.front() >= 0.95;
    std::size_t left = 0;
    while (left < p.size() && p[left] >= 0.9) ++left;
    double worst = 0.0;
    double t_worst = 0.0;
    for (std::size_t i = left; i < p.size(); ++i) {
      if (p[i] > worst) {
        worst = p[i];
        t_worst = s.times[i];
      }
    }
    const bool stays = left < p.size() && worst < 0.9;
    const double norm = *std::max_element(s.max_norm_error.begin(), s.max_norm_error.end());
    ok = ok && start && stays && norm <= 1e-8;
    detail += fmt("%s (Z_f=%g): P(0)=%.4f, first below 0.9 at t=%.2f, later max %.4f at t=%.1f, norm err %.1e; ", id,
                  c.lattice.z_f, p.front(), left < p.size() ? s.times[left] : -1.0, worst, t_worst, norm);
  }
  return {ok, detail};
}

Outcome projection() {
  const BlochSpectrum s = compute_spectrum(reference(0.1));
  const Grid g = init_grid(-9.75, 10.25, 512);
  const GaussianProjection proj = project_gaussian(s, g, 0.1, 0.0, 10);
  const double c0 = std::abs(proj.coefficients.terms[0].second);
  const double c1 = std::abs(proj.coefficients.terms[1].second);
  const double sum = proj.coefficients.norm_squared();
  const bool ok = std::abs(c0 - 0.6785) <= 0.02 && std::abs(c1 - 0.677) <= 0.02 && sum >= 0.999;
  return {ok, fmt("|c0|=%.5f |c1|=%.5f sum|c|^2=%.6f", c0, c1, sum)};
}

Outcome equilibration() {
  RunConfig c = preset_run("fig4b", "L_m100_1e4hz");
  c.propagation.t_final = 100.0;
  c.propagation.n_record = 100;
  const ObservableSeries& s = record_run("fig4b L m=100 1e4 Hz", c);
  const std::size_t n = s.size();
  const std::size_t from = n - (n - 1) / 4 - 1;
  double avg = 0.0;
  for (std::size_t i = from; i < n; ++i) avg += s.p_left_total[i];
  avg /= static_cast<double>(n - from);
  return {std::abs(avg - 0.5) <= 0.1,
          fmt("mean P_L over t in [%.0f, %.0f] = %.4f (N=%zu, %zu kicks)", s.times[from], s.times.back(), avg,
              s.n_trajectories, s.total_kicks)};
}

// The fig8a command-line output is shared by the purity and determinism checks.
const fs::path kFig8aDir = fs::temp_directory_path() / "dwl_acceptance_fig8a";

bool run_fig8a(const fs::path& dir, std::vector<std::string> extra = {}) {
  std::vector<std::string> args{"ensemble", "--preset", "fig8a", "--seed", "7", "--out", dir.string()};
  args.insert(args.end(), extra.begin(), extra.end());
  std::ostringstream out;
  std::ostringstream err;
  return run_command(args, out, err) == 0;
}

double value_at(const CsvTable& t, const std::string& column, double time) {
  const auto col = std::find(t.columns.begin(), t.columns.end(), column) - t.columns.begin();
  for (const auto& row : t.rows) {
    if (std::abs(row[0] - time) < 1e-9) return row[static_cast<std::size_t>(col)];
  }
  return std::nan("");
}

bool g_fig8a_ready = false;

void ensure_fig8a() {
  if (g_fig8a_ready) return;
  fs::remove_all(kFig8aDir);
  g_fig8a_ready = run_fig8a(kFig8aDir / "first");
}

Outcome purity_contrast() {
  ensure_fig8a();
  struct Values {
    double gauss;
    double l;
  };
  const CsvTable tl = parse_csv(slurp(kFig8aDir / "first" / "fig8a_L.csv"));
  const CsvTable tg = parse_csv(slurp(kFig8aDir / "first" / "fig8a_gaussian.csv"));
  const Values hbar{value_at(tg, "purity", 40.0), value_at(tl, "purity", 40.0)};

  Values h{};
  for (const char* label : {"L", "gaussian"}) {
    RunConfig c = preset_run("fig8a", label);
    c.er_convention = ErConvention::H;
    c.ensemble.base_seed = 7;
    c.propagation.t_final = 40.0;
    c.propagation.n_record = 100;
    const double m = record_run(std::string("fig8a h-convention ") + label, c).purity.back();
    (std::string(label) == "L" ? h.l : h.gauss) = m;
  }

  auto absolute = [](const Values& v) { return std::abs(v.gauss - 0.8) <= 0.15 && std::abs(v.l - 0.3) <= 0.15; };
  auto ordered = [](const Values& v) { return v.gauss - v.l >= 0.3; };
  const bool ok = (absolute(hbar) || absolute(h)) && ordered(hbar) && ordered(h);
  return {ok, fmt("t=40, E_R/hbar: M_G=%.4f M_L=%.4f diff=%.4f; E_R/h: M_G=%.4f M_L=%.4f diff=%.4f", hbar.gauss,
                  hbar.l, hbar.gauss - hbar.l, h.gauss, h.l, h.gauss - h.l)};
}

Outcome propagator_oracle() {
  const LatticeParams p = reference(0.1);
  const Grid g = init_grid(-9.75, 10.25, 512);
  const BlochSpectrum s = compute_spectrum(p);
  const WellPartition part = partition_wells(p, g.x_min(), g.x_max());
  std::vector<WaveFunction> phi;
  for (std::size_t l = 0; l < 10; ++l) phi.push_back(synthesize_on_grid(s[l], s.basis, g));

  std::vector<std::pair<std::string, WaveFunction>> starts;
  starts.emplace_back("gaussian", make_superposition(project_gaussian(s, g, 0.1, 0.0, 10).coefficients, s, g));
  starts.emplace_back("L", make_L_state(s, g, part).psi);
  SuperpositionSpec mixed;
  for (std::size_t l = 0; l < 10; ++l) mixed.terms.emplace_back(l, std::polar(1.0 / (1.0 + l), 0.7 * l * l));
  starts.emplace_back("mixed", make_superposition(mixed, s, g));

  const double t = 10.0;
  const PropagatorPlan plan = plan_propagator(p, g, 1e-3);
  double worst = 0.0;
  std::string detail;
  for (const auto& [name, psi0] : starts) {
    const WaveFunction numeric = evolve(psi0, plan, 10000);
    WaveFunction exact(g);
    for (std::size_t l = 0; l < 10; ++l) {
      const complex a = phi[l].inner(psi0) * std::polar(1.0, -s[l].energy * t);
      for (std::size_t j = 0; j < g.size(); ++j) exact[j] += a * phi[l][j];
    }
    double err = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) err = std::max(err, std::abs(numeric[j] - exact[j]));
    worst = std::max(worst, err);
    detail += fmt("%s %.2e; ", name.c_str(), err);
  }
  return {worst < 1e-6, "max pointwise error at t=10, dt=1e-3: " + detail};
}

Outcome conservation() {
  bool ok = true;
  std::string detail;
  for (const Recorded& r : g_runs) {
    const auto& s = r.series;
    const double norm = *std::max_element(s.max_norm_error.begin(), s.max_norm_error.end());
    bool run_ok = norm < 1e-9;
    std::string energy;
    if (!r.kicked) {
      double drift = 0.0;
      for (double e : s.mean_energy) drift = std::max(drift, std::abs(e - s.mean_energy.front()));
      drift /= std::abs(s.mean_energy.front());
      run_ok = run_ok && drift < 1e-6;
      energy = fmt(" energy %.1e", drift);
    }
    ok = ok && run_ok;
    detail += fmt("%s: norm %.1e%s; ", r.name.c_str(), norm, energy.c_str());
  }
  if (g_runs.empty()) return {false, "no runs recorded (run criteria 2, 3, 5 or 6 first)"};
  return {ok, detail};
}

Outcome purity_identity() {
  const LatticeParams p = reference(0.1);
  const Grid g = init_grid(-0.25, 0.75, 64);
  const PropagatorPlan plan = plan_propagator(p, g, 1e-3);
  KickParams kp;
  kp.enabled = true;
  kp.rate = 20.0;
  kp.strength_m = 2.0;
  std::vector<WaveFunction> traj;
  for (std::uint64_t k = 0; k < 5; ++k) {
    WaveFunction last;
    evolve_trajectory(gaussian_on_grid(g, 0.1, 0.0), plan, kp, 4, 100, {7, k},
                      [&](std::size_t, double, const WaveFunction& psi) { last = psi; });
    traj.push_back(last);
  }
  const double gram = purity(traj);
  const double direct = purity_direct(density_matrix(traj), g.dx());
  bool ok = std::abs(gram - direct) < 1e-10;
  std::string detail = fmt("64-point grid, 5 trajectories: Gram %.12f direct %.12f; ", gram, direct);

  // Bounds hold exactly for unit-norm states; each run is allowed the
  // floating-point slack implied by its own measured norm error. Written
  // files carry no norm diagnostic, so they get the conservation tolerance.
  ensure_fig8a();
  struct Curve {
    std::string name;
    std::vector<double> purity;
    double n;
    double norm_error;
  };
  std::vector<Curve> curves;
  for (const Recorded& r : g_runs) {
    const auto& s = r.series;
    curves.push_back({r.name, s.purity, static_cast<double>(s.n_trajectories),
                      *std::max_element(s.max_norm_error.begin(), s.max_norm_error.end())});
  }
  for (const char* f : {"fig8a_L.csv", "fig8a_gaussian.csv"}) {
    const CsvTable t = parse_csv(slurp(kFig8aDir / "first" / f));
    std::vector<double> m;
    for (const auto& row : t.rows) m.push_back(row[5]);
    curves.push_back({f, m, 50.0, 1e-9});
  }
  std::size_t points = 0;
  for (const Curve& c : curves) {
    const double slack = 2.0 * c.norm_error + 1e-12;
    double lo = 1.0;
    double hi = 0.0;
    for (double m : c.purity) {
      ++points;
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
    if (lo < 1.0 / c.n - slack || hi > 1.0 + slack) {
      ok = false;
      detail += fmt("bound violated in %s (M in [%.12f, %.12f], N=%.0f); ", c.name.c_str(), lo, hi, c.n);
    }
  }
  return {ok, detail + fmt("bounds checked at %zu record times over %zu runs", points, curves.size())};
}

Outcome statistics() {
  KickParams kp;
  kp.enabled = true;
  kp.rate = 2.0;
  const double span = 3.0;
  Rng rng = TrajectorySeed{2024, 0}.make_engine();
  const int windows = 10000;
  double sum = 0.0;
  double sum2 = 0.0;
  for (int w = 0; w < windows; ++w) {
    const double n = static_cast<double>(sample_kick_times(kp, 0.0, span, rng).size());
    sum += n;
    sum2 += n * n;
  }
  const double mean = sum / windows;
  const double var = sum2 / windows - mean * mean;
  const double rt = kp.rate * span;

  double m1 = 0.0;
  double m2 = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const Direction d = sample_direction(rng);
    const double x = KickEvent{0.0, d.theta, d.phi}.x_projection();
    m1 += x;
    m2 += x * x;
  }
  m1 /= draws;
  m2 /= draws;
  const bool ok = std::abs(mean - rt) <= 0.05 * rt && std::abs(var - rt) <= 0.10 * rt && std::abs(m1) <= 0.02 &&
                  std::abs(m2 - 1.0 / 3.0) <= 0.02;
  return {ok, fmt("rT=%.1f: mean %.4f var %.4f; E[sin cos]=%.4f E[(sin cos)^2]=%.4f", rt, mean, var, m1, m2)};
}

Outcome determinism() {
  ensure_fig8a();
  const bool second = run_fig8a(kFig8aDir / "second");
  const bool parallel = run_fig8a(kFig8aDir / "parallel", {"--threads", "4"});
  bool ok = g_fig8a_ready && second && parallel;
  std::string detail;
  for (const char* f : {"fig8a_L.csv", "fig8a_gaussian.csv"}) {
    const std::string a = slurp(kFig8aDir / "first" / f);
    const bool same = !a.empty() && a == slurp(kFig8aDir / "second" / f);
    const bool same_par = !a.empty() && a == slurp(kFig8aDir / "parallel" / f);
    ok = ok && same && same_par;
    detail += fmt("%s: repeat %s, 4 threads %s; ", f, same ? "identical" : "DIFFERENT",
                  same_par ? "identical" : "DIFFERENT");
  }
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  // Conservation and purity bounds sweep the runs made by the earlier criteria,
  // so they go last.
  const std::vector<Criterion> all = {
      {1, "near-degenerate doublet", doublet},
      {4, "Gaussian projection", projection},
      {7, "propagator oracle", propagator_oracle},
      {10, "kick statistics", statistics},
      {2, "tunnelling oscillation", tunnelling},
      {3, "Gaussian non-return", gaussian_non_return},
      {5, "strong-decoherence equilibration", equilibration},
      {6, "purity contrast", purity_contrast},
      {11, "determinism", determinism},
      {8, "conservation", conservation},
      {9, "purity identity and bounds", purity_identity},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  std::vector<std::pair<int, std::string>> lines;
  bool all_pass = true;
  for (const Criterion& c : all) {
    if (!wanted.empty() && !wanted.contains(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    all_pass = all_pass && o.pass;
    const std::string line =
        fmt("%s criterion %2d (%s): ", o.pass ? "PASS" : "FAIL", c.id, c.name) + o.detail + fmt(" [%.1fs]", secs);
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    lines.emplace_back(c.id, line);
  }
  std::sort(lines.begin(), lines.end());
  std::printf("\nsummary\n");
  for (const auto& [id, line] : lines) std::printf("  %.*s\n", static_cast<int>(line.find(':')), line.c_str());
  return all_pass ? 0 : 1;
}
