#include "dwl/presets.hpp"

#include <functional>
#include <map>

#include "dwl/errors.hpp"

namespace dwl {

namespace {

// Common lattice: V_xy = 36 E_R, delta theta = pi/2, delta phi = 0,
// E_R = 3.5 kHz read as E_R/hbar.
RunConfig base(double z_f) {
  RunConfig c;
  c.lattice.z_f = z_f;
  return c;
}

// Kick-free runs: one trajectory suffices, the evolution is deterministic.
RunConfig coherent(double z_f, InitialKind kind, double t_final, std::size_t n_record) {
  RunConfig c = base(z_f);
  c.initial_state.kind = kind;
  c.propagation.t_final = t_final;
  c.propagation.n_record = n_record;
  c.ensemble.n_trajectories = 1;
  return c;
}

RunConfig kicked(double z_f, InitialKind kind, double m, double rate_hz, double t_final, std::size_t n_record) {
  RunConfig c = base(z_f);
  c.initial_state.kind = kind;
  c.propagation.t_final = t_final;
  c.propagation.n_record = n_record;
  c.kick.enabled = true;
  c.kick.strength_m = m;
  c.kick.rate = rate_hz;
  c.kick.unit = RateUnit::Hz;
  return c;
}

std::string rate_label(double rate_hz) {
  if (rate_hz == 1e4) return "1e4hz";
  return std::to_string(static_cast<long>(rate_hz)) + "hz";
}

// Tunnelling periods 2 pi / delta are about 3270 (Z_f = 0.05) and 750
// (Z_f = 0.1) in 1/E_R; coherent windows cover a little over two periods.
constexpr double kWindow005 = 7000.0;
constexpr double kWindow01 = 1600.0;
// Kicked L-state / Gaussian population runs: two tunnelling periods at Z_f = 0.1.
constexpr double kKickedWindow = 1600.0;
// Purity comparisons: past t = 40 / E_R.
constexpr double kPurityWindow = 80.0;

Preset rate_scan(const std::string& id, const std::string& desc, InitialKind kind, std::vector<double> strengths,
                 std::vector<double> rates) {
  Preset p{id, PresetKind::Ensemble, desc, {}};
  const std::string prefix = kind == InitialKind::LState ? "L" : "gaussian";
  for (double m : strengths) {
    for (double r : rates) {
      RunConfig c = kicked(0.1, kind, m, r, kKickedWindow, 400);
      c.label = prefix + "_m" + std::to_string(static_cast<int>(m)) + "_" + rate_label(r);
      p.runs.push_back({c.label, c});
    }
  }
  return p;
}

Preset purity_pair(const std::string& id, const std::string& desc, double m, double rate_hz) {
  Preset p{id, PresetKind::Ensemble, desc, {}};
  for (InitialKind kind : {InitialKind::LState, InitialKind::Gaussian}) {
    RunConfig c = kicked(0.1, kind, m, rate_hz, kPurityWindow, 200);
    c.label = kind == InitialKind::LState ? "L" : "gaussian";
    p.runs.push_back({c.label, c});
  }
  return p;
}

using Builder = std::function<Preset()>;

const std::map<std::string, Builder>& builders() {
  static const std::map<std::string, Builder> table = {
      {"fig1",
       [] {
         Preset p{"fig1", PresetKind::Potential, "double-well potential for Z_f = 0.05 and 0.1", {}};
         for (double z : {0.05, 0.1}) {
           RunConfig c = base(z);
           c.label = z == 0.05 ? "zf0.05" : "zf0.1";
           p.runs.push_back({c.label, c});
         }
         return p;
       }},
      {"fig2",
       [] {
         Preset p{"fig2", PresetKind::Ensemble, "|L> tunnelling without kicks, Z_f = 0.05 and 0.1", {}};
         RunConfig a = coherent(0.05, InitialKind::LState, kWindow005, 1000);
         a.label = "zf0.05";
         RunConfig b = coherent(0.1, InitialKind::LState, kWindow01, 800);
         b.label = "zf0.1";
         p.runs = {{a.label, a}, {b.label, b}};
         return p;
       }},
      {"fig3a",
       [] {
         RunConfig c = coherent(0.05, InitialKind::Gaussian, kWindow005, 1000);
         c.label = "zf0.05";
         return Preset{"fig3a", PresetKind::Ensemble, "Gaussian sigma = 0.1 without kicks, Z_f = 0.05", {{c.label, c}}};
       }},
      {"fig3b",
       [] {
         RunConfig c = coherent(0.1, InitialKind::Gaussian, kWindow01, 800);
         c.label = "zf0.1";
         return Preset{"fig3b", PresetKind::Ensemble, "Gaussian sigma = 0.1 without kicks, Z_f = 0.1", {{c.label, c}}};
       }},
      {"fig4a", [] { return rate_scan("fig4a", "|L> left-well probability, m = 10", InitialKind::LState, {10}, {10, 100, 1e4}); }},
      {"fig4b", [] { return rate_scan("fig4b", "|L> left-well probability, m = 100", InitialKind::LState, {100}, {1, 100, 1e4}); }},
      {"fig5a", [] { return rate_scan("fig5a", "|L> survival probability, m = 10", InitialKind::LState, {10}, {10, 100, 1e4}); }},
      {"fig5b", [] { return rate_scan("fig5b", "|L> survival probability, m = 100", InitialKind::LState, {100}, {1, 100, 1e4}); }},
      {"fig6",
       [] {
         return rate_scan("fig6", "Gaussian initial/right well probability, m = 10 and 100", InitialKind::Gaussian,
                          {10, 100}, {10, 100, 1e4});
       }},
      {"fig7",
       [] {
         return rate_scan("fig7", "Gaussian survival probability, m = 10 and 100", InitialKind::Gaussian, {10, 100},
                          {10, 100, 1e4});
       }},
      {"fig8a", [] { return purity_pair("fig8a", "purity of |L> and Gaussian, 100 Hz, m = 10", 10, 100); }},
      {"fig8b", [] { return purity_pair("fig8b", "purity of |L> and Gaussian, 100 Hz, m = 100", 100, 100); }},
      {"fig9a", [] { return purity_pair("fig9a", "purity of |L> and Gaussian, 1e4 Hz, m = 10", 10, 1e4); }},
      {"fig9b", [] { return purity_pair("fig9b", "purity of |L> and Gaussian, 1e4 Hz, m = 100", 100, 1e4); }},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& preset_ids() {
  static const std::vector<std::string> ids = {"fig1",  "fig2",  "fig3a", "fig3b", "fig4a", "fig4b", "fig5a",
                                               "fig5b", "fig6",  "fig7",  "fig8a", "fig8b", "fig9a", "fig9b"};
  return ids;
}

Preset expand_preset(const std::string& id) {
  const auto it = builders().find(id);
  if (it == builders().end()) throw UnknownPreset(id);
  Preset p = it->second();
  for (PresetRun& run : p.runs) run.config.validate();
  return p;
}

}  // namespace dwl
