// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.
//
//   nuccr_acceptance              run every criterion
//   nuccr_acceptance --only 7b    run one criterion
//
// Exit status is nonzero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "nuccr/correlations.hpp"
#include "nuccr/scan.hpp"

namespace {

using namespace nuccr;

// Pinned tolerances.
constexpr double tol_pure_hs = 1e-12;
constexpr double limit_pure_hs_seconds = 1.0;
constexpr double tol_worked_values = 1e-15;
constexpr double tol_mixed_ccr = 1e-10;
constexpr double limit_mixed_ccr_seconds = 10.0;
constexpr int mixed_ccr_total_points = 10000;
constexpr double tol_discord_numeric = 1e-6;
constexpr double tol_discord_identity = 1e-10;
constexpr int discord_scan_points = 100;
constexpr double tol_naqc = 1e-9;
constexpr int naqc_scan_points = 200;
constexpr double tol_local_coherence = 1e-12;
constexpr double tol_plateau = 1e-6;
constexpr double asymptotic_mi_fraction = 0.9;
constexpr double limit_small_mixing_mi = 0.1;
constexpr double monotonic_slack = 1e-9;
constexpr double tol_plane_wave = 1e-10;
constexpr int plane_wave_scan_points = 400;

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const std::vector<std::string> table_presets{"daya-bay", "kamland", "minos"};
const std::vector<std::string> all_presets{"daya-bay", "kamland", "kamland-alt", "minos"};

ExperimentParams with_grid(const std::string& preset, int points) {
  ExperimentParams p = find_preset(preset).params;
  p.grid_points = points;
  return p;
}

double plateau(const ExperimentParams& p) { return 1.0 - 0.5 * p.mixing.sin2_2theta(); }

// Rows in the last 10% of the scan, where every preset is fully decohered.
std::vector<ScanRow> deep_tail(const ScanTable& t) {
  const std::size_t n = t.rows.size();
  return {t.rows.end() - static_cast<std::ptrdiff_t>(std::max<std::size_t>(1, n / 10)), t.rows.end()};
}

// 1: pure-state Hilbert-Schmidt complementarity on random plane-wave states.
Verdict criterion_1() {
  std::mt19937_64 gen(20240501);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * static_cast<double>(gen() >> 11) * 0x1.0p-53; };
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const MixingSpec mix(uniform(0.0, std::numbers::pi / 2), 2.5e-3);
    const Flavor alpha = uniform(0.0, 1.0) < 0.5 ? Flavor::e : Flavor::mu;
    const TwoQubitState rho =
        pure_state_density_matrix(plane_wave_state(uniform(0.0, 2 * std::numbers::pi), mix, alpha));
    worst = std::max(worst, std::abs(ccr_pure_hs(rho) - 0.5));
  }
  const double secs = seconds_since(t0);
  return {worst < tol_pure_hs && secs < limit_pure_hs_seconds,
          "1000 states: max |P_hs + C_hs + C_hs_nl - 1/2| = " + fmt("%.2e", worst) + " (< " + fmt("%.0e", tol_pure_hs) +
              "), runtime " + fmt("%.3f", secs) + " s (< " + fmt("%g", limit_pure_hs_seconds) + " s)"};
}

// 2: worked values at P_ee = 3/4.
Verdict criterion_2() {
  const double p_ee = 0.75;
  const double p_emu = 1.0 - p_ee;
  const PureFlavorState st{Flavor::e, std::sqrt(p_ee), std::sqrt(p_emu)};
  const TwoQubitState rho = pure_state_density_matrix(st);
  const QubitState rho_a = partial_trace(rho, Subsystem::A);
  const double p_hs = predictability_hs(rho_a);
  const double c_nl = nonlocal_coherence_hs(rho);
  const double closed_p = p_ee * p_ee + p_emu * p_emu - 0.5;
  const double closed_c = 2.0 * p_ee * p_emu;
  const double dev = std::max({std::abs(p_hs - 0.125), std::abs(c_nl - 0.375), std::abs(p_hs - closed_p),
                               std::abs(c_nl - closed_c)});
  return {dev <= tol_worked_values, "P_hs = " + fmt("%.17g", p_hs) + " (1/8), C_hs_nl = " + fmt("%.17g", c_nl) +
                                        " (3/8), max deviation " + fmt("%.2e", dev) + " (<= " +
                                        fmt("%.0e", tol_worked_values) + ")"};
}

// 3: mixed-state complementarity residual over the three table presets,
// wave-packet picture, tail included, 10,000 points in total.
Verdict criterion_3() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int total = 0;
  const int per = mixed_ccr_total_points / static_cast<int>(table_presets.size());
  for (std::size_t i = 0; i < table_presets.size(); ++i) {
    const int points = i == 0 ? mixed_ccr_total_points - per * static_cast<int>(table_presets.size() - 1) : per;
    const ScanTable t = run_scan(with_grid(table_presets[i], points), Picture::wave_packet);
    for (const auto& r : t.rows) worst = std::max(worst, std::abs(r.report.ccr_residual));
    total += static_cast<int>(t.rows.size());
  }
  const double secs = seconds_since(t0);
  return {worst < tol_mixed_ccr && secs < limit_mixed_ccr_seconds,
          std::to_string(total) + " full-report points: max |residual| = " + fmt("%.2e", worst) + " (< " +
              fmt("%.0e", tol_mixed_ccr) + "), runtime " + fmt("%.2f", secs) + " s (< " +
              fmt("%g", limit_mixed_ccr_seconds) + " s)"};
}

// 4: minimized discord against H2(F_ee), and H2(F_ee) against I + S_A|B, on a
// 100-point Daya Bay wave-packet scan.
Verdict criterion_4() {
  const ExperimentParams p = with_grid("daya-bay", discord_scan_points);
  const ScanTable t = run_scan(p, Picture::wave_packet);
  double worst_numeric = 0.0;
  double worst_x = 0.0;
  double worst_identity = 0.0;
  for (const auto& r : t.rows) {
    const double d = std::abs(r.report.discord - r.report.discord_closed);
    if (d > worst_numeric) {
      worst_numeric = d;
      worst_x = r.x_km;
    }
    worst_identity =
        std::max(worst_identity, std::abs(r.report.discord_closed - (r.report.mutual_info + r.report.cond_entropy)));
  }
  const bool a = worst_numeric < tol_discord_numeric;
  const bool b = worst_identity < tol_discord_identity;
  return {a && b, std::string(a ? "pass" : "FAIL") + " max |QD_min - H2(F_ee)| = " + fmt("%.3e", worst_numeric) +
                      " at x = " + fmt("%.4g", worst_x) + " km (< " + fmt("%.0e", tol_discord_numeric) + "); " +
                      (b ? "pass" : "FAIL") + " max |H2(F_ee) - (I + S_A|B)| = " + fmt("%.2e", worst_identity) +
                      " (< " + fmt("%.0e", tol_discord_identity) + ")"};
}

// 5: measured NAQC against 2 + H2(F_ee), and N - QD = 2, on every preset.
Verdict criterion_5() {
  double worst_closed = 0.0;
  double worst_gap = 0.0;
  std::string where;
  for (const auto& name : all_presets) {
    const ScanTable t = run_scan(with_grid(name, naqc_scan_points), Picture::wave_packet);
    for (const auto& r : t.rows) {
      const double d = std::abs(r.report.naqc - r.report.naqc_closed);
      if (d > worst_closed) {
        worst_closed = d;
        where = name + " x = " + fmt("%.4g", r.x_km) + " km";
      }
      worst_gap = std::max(worst_gap, std::abs(r.report.naqc - r.report.discord - 2.0));
    }
  }
  const bool a = worst_closed < tol_naqc;
  const bool b = worst_gap < tol_naqc;
  return {a && b, std::string(a ? "pass" : "FAIL") + " max |N - (2 + H2(F_ee))| = " + fmt("%.3e", worst_closed) +
                      " (" + where + "); " + (b ? "pass" : "FAIL") + " max |N - QD - 2| = " + fmt("%.3e", worst_gap) +
                      " (tolerance " + fmt("%.0e", tol_naqc) + ")"};
}

// 6: local coherence of both reduced states vanishes on every scan state.
Verdict criterion_6() {
  double worst = 0.0;
  int count = 0;
  for (const auto& name : all_presets) {
    const ExperimentParams p = find_preset(name).params;
    for (double x : baseline_grid(p)) {
      const WavePacketParams wp(p.sigma_x_m, p.energy_mev);
      const TwoQubitState rho = flavor_density_matrix(flavor_kernel(p.initial_flavor, PropagationPoint(x), wp, p.mixing));
      for (Subsystem keep : {Subsystem::A, Subsystem::B})
        worst = std::max(worst, relative_entropy_coherence(partial_trace(rho, keep)));
      ++count;
    }
  }
  return {worst < tol_local_coherence, std::to_string(count) + " states, both subsystems: max C_re = " +
                                           fmt("%.2e", worst) + " (< " + fmt("%.0e", tol_local_coherence) + ")"};
}

// 7a: survival oscillates under a decaying envelope and settles on 1 - sin^2(2theta)/2.
Verdict criterion_7a() {
  bool ok = true;
  std::string detail;
  for (const auto& name : all_presets) {
    const ScanTable t = run_scan(find_preset(name).params, Picture::wave_packet);
    const double level = plateau(t.params);
    // Oscillation: crossings of the plateau level inside the nominal range.
    int crossings = 0;
    double prev = 0.0;
    double early = 0.0;
    double late = 0.0;
    const double x_max = t.params.x_max_km;
    for (const auto& r : t.rows) {
      const double dev = r.report.survival_prob - level;
      if (r.x_km <= x_max) {
        if (prev != 0.0 && dev * prev < 0.0) ++crossings;
        if (dev != 0.0) prev = dev;
      }
      if (r.x_km <= 0.25 * x_max) early = std::max(early, std::abs(dev));
      if (r.x_km >= 1.5 * x_max && r.x_km <= 2.0 * x_max) late = std::max(late, std::abs(dev));
    }
    double tail = 0.0;
    for (const auto& r : deep_tail(t)) tail = std::max(tail, std::abs(r.report.survival_prob - level));
    const bool good = crossings >= 2 && late < early && tail < tol_plateau;
    ok = ok && good;
    detail += (detail.empty() ? "" : "; ") + name + ": " + std::to_string(crossings) + " crossings, envelope " +
              fmt("%.3g", early) + " -> " + fmt("%.3g", late) + ", tail |P - " + fmt("%.6f", level) +
              "| = " + fmt("%.1e", tail);
  }
  return {ok, detail + " (tail tolerance " + fmt("%.0e", tol_plateau) + ")"};
}

double binary_h(double p) { return binary_entropy(p); }

// 7b: large-mixing presets keep a high mutual information after decoherence.
Verdict criterion_7b() {
  bool ok = true;
  std::string detail;
  for (const auto& name : {"minos", "kamland", "kamland-alt"}) {
    const ScanTable t = run_scan(find_preset(name).params, Picture::wave_packet);
    const double mi = summarize(t).asymptotic_mutual_info;
    const double ref = binary_h(plateau(t.params));
    const bool good = mi > asymptotic_mi_fraction * ref;
    ok = ok && good;
    detail += (detail.empty() ? "" : "; ") + std::string(name) + ": I_inf = " + fmt("%.4f", mi) + " vs " +
              fmt("%.1f", asymptotic_mi_fraction) + " * H2 = " + fmt("%.4f", asymptotic_mi_fraction * ref);
  }
  return {ok, detail};
}

// 7c: small-mixing Daya Bay asymptotic mutual information below 0.1 bits.
Verdict criterion_7c() {
  const ScanTable t = run_scan(find_preset("daya-bay").params, Picture::wave_packet);
  const double mi = summarize(t).asymptotic_mutual_info;
  const double s = t.params.mixing.sin2_2theta();
  const double c2 = std::pow(std::cos(t.params.mixing.theta()), 2);
  const double closed = 2.0 * binary_entropy(1.0 - 0.5 * s) - binary_entropy(c2);
  return {mi < limit_small_mixing_mi, "daya-bay: I_inf = " + fmt("%.4f", mi) + " bits (limit " +
                                          fmt("%g", limit_small_mixing_mi) + "); decohered closed form " +
                                          fmt("%.4f", closed) + " bits"};
}

// 7d: KamLAND conditional entropy is not monotonic.
Verdict criterion_7d() {
  bool ok = true;
  std::string detail;
  for (const auto& name : {"kamland", "kamland-alt"}) {
    const ScanTable t = run_scan(find_preset(name).params, Picture::wave_packet);
    int turns = 0;
    int trend = 0;
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
      const double d = t.rows[i].report.cond_entropy - t.rows[i - 1].report.cond_entropy;
      if (std::abs(d) <= monotonic_slack) continue;
      const int dir = d > 0 ? 1 : -1;
      if (trend != 0 && dir != trend) ++turns;
      trend = dir;
    }
    ok = ok && turns >= 2;
    detail += (detail.empty() ? "" : "; ") + std::string(name) + ": " + std::to_string(turns) + " turning points";
  }
  return {ok, detail + " (need >= 2, slack " + fmt("%.0e", monotonic_slack) + ")"};
}

// 8: sigma_x = inf reproduces the plane-wave path.
Verdict criterion_8() {
  double worst_purity = 0.0;
  double worst_diff = 0.0;
  std::string worst_field;
  for (const auto& name : all_presets) {
    ExperimentParams p = with_grid(name, plane_wave_scan_points);
    p.sigma_x_m = std::numeric_limits<double>::infinity();
    const ScanTable wp = run_scan(p, Picture::wave_packet);
    const ScanTable pw = run_scan(p, Picture::plane_wave);
    for (std::size_t i = 0; i < wp.rows.size(); ++i) {
      const double x = wp.rows[i].x_km;
      const FlavorKernel k = flavor_kernel(p.initial_flavor, PropagationPoint(x),
                                           WavePacketParams::plane_wave(p.energy_mev), p.mixing);
      worst_purity = std::max(worst_purity, std::abs(purity(flavor_density_matrix(k)) - 1.0));
      const auto& a = wp.rows[i].report;
      const auto& b = pw.rows[i].report;
      const std::vector<std::pair<const char*, double>> diffs{
          {"survival_prob", a.survival_prob - b.survival_prob}, {"mutual_info", a.mutual_info - b.mutual_info},
          {"cond_entropy", a.cond_entropy - b.cond_entropy},    {"p_vn", a.p_vn - b.p_vn},
          {"c_re", a.c_re - b.c_re},                            {"p_hs", a.p_hs - b.p_hs},
          {"c_hs", a.c_hs - b.c_hs},                            {"c_hs_nl", a.c_hs_nl - b.c_hs_nl},
          {"discord", a.discord - b.discord},                   {"classical_corr", a.classical_corr - b.classical_corr},
          {"naqc", a.naqc - b.naqc},                            {"ccr_residual", a.ccr_residual - b.ccr_residual}};
      for (const auto& [field, d] : diffs) {
        if (std::abs(d) > worst_diff) {
          worst_diff = std::abs(d);
          worst_field = field;
        }
      }
    }
  }
  return {worst_purity < tol_plane_wave && worst_diff < tol_plane_wave,
          "max |purity - 1| = " + fmt("%.2e", worst_purity) + ", max field difference " + fmt("%.2e", worst_diff) +
              (worst_field.empty() ? "" : " (" + worst_field + ")") + " (< " + fmt("%.0e", tol_plane_wave) + ")"};
}

struct Criterion {
  const char* id;
  const char* title;
  std::function<Verdict()> run;
};

const std::vector<Criterion> criteria{
    {"1", "pure-state Hilbert-Schmidt complementarity", criterion_1},
    {"2", "worked values at P_ee = 3/4", criterion_2},
    {"3", "mixed-state complementarity on all table presets", criterion_3},
    {"4", "discord closed form", criterion_4},
    {"5", "NAQC identities", criterion_5},
    {"6", "local coherence vanishes", criterion_6},
    {"7a", "survival oscillation, envelope and plateau", criterion_7a},
    {"7b", "large mixing keeps high asymptotic mutual information", criterion_7b},
    {"7c", "small mixing asymptotic mutual information below 0.1 bit", criterion_7c},
    {"7d", "KamLAND conditional entropy non-monotonic", criterion_7d},
    {"8", "plane-wave / wave-packet consistency", criterion_8},
};

}  // namespace

int main(int argc, char** argv) {
  std::string only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = argv[++i];
    } else {
      std::cerr << "usage: " << argv[0] << " [--only <criterion id>]\n";
      return 2;
    }
  }

  int failures = 0;
  int ran = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && only != c.id) continue;
    ++ran;
    Verdict o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.title << "): " << o.detail << '\n';
    if (!o.pass) ++failures;
  }
  if (ran == 0) {
    std::cerr << "unknown criterion '" << only << "'\n";
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
