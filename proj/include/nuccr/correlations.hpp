#pragma once

// Complementarity terms and correlation quantifiers for two-qubit states:
// Hilbert-Schmidt predictability/coherence, entropic predictability and
// relative entropy of coherence, mutual information, conditional entropy,
// quantum discord (projective measurements), and the nonlocal advantage of
// quantum coherence. All entropies are in bits.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "nuccr/errors.hpp"
#include "nuccr/matrix_core.hpp"
#include "nuccr/oscillation.hpp"

namespace nuccr {

// ---------------------------------------------------------------------------
// Measurement primitives

class BlochAxis {
 public:
  BlochAxis(double x, double y, double z) : n_{x, y, z} {
    const double norm = std::sqrt(x * x + y * y + z * z);
    if (!(std::abs(norm - 1.0) <= 1e-12)) {
      throw ValidationError("Bloch axis must have unit norm, got " + std::to_string(norm));
    }
  }

  static BlochAxis from_angles(double polar, double azimuth) {
    return {std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth), std::cos(polar)};
  }

  const std::array<double, 3>& components() const noexcept { return n_; }

 private:
  std::array<double, 3> n_;
};

enum class Outcome { plus, minus };

enum class Pauli { x, y, z };
inline constexpr std::array<Pauli, 3> all_paulis{Pauli::x, Pauli::y, Pauli::z};

inline Matrix2 pauli_matrix(Pauli p) {
  Matrix2 m;
  switch (p) {
    case Pauli::x:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case Pauli::y:
      m(0, 1) = Complex(0.0, -1.0);
      m(1, 0) = Complex(0.0, 1.0);
      break;
    case Pauli::z:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
  }
  return m;
}

/// Columns are the +1 and -1 eigenvectors of the Pauli operator.
inline Matrix2 pauli_eigenbasis(Pauli p) {
  const double h = std::numbers::sqrt2 / 2.0;
  Matrix2 u;
  switch (p) {
    case Pauli::x:
      u(0, 0) = h;
      u(1, 0) = h;
      u(0, 1) = h;
      u(1, 1) = -h;
      break;
    case Pauli::y:
      u(0, 0) = h;
      u(1, 0) = Complex(0.0, h);
      u(0, 1) = h;
      u(1, 1) = Complex(0.0, -h);
      break;
    case Pauli::z:
      u = Matrix2::identity();
      break;
  }
  return u;
}

inline BlochAxis pauli_axis(Pauli p) {
  return {p == Pauli::x ? 1.0 : 0.0, p == Pauli::y ? 1.0 : 0.0, p == Pauli::z ? 1.0 : 0.0};
}

/// Rank-one projector (I +- n.sigma)/2.
struct MeasurementSetting {
  BlochAxis axis;
  Outcome outcome;

  Matrix2 projector() const {
    const double sign = outcome == Outcome::plus ? 1.0 : -1.0;
    Matrix2 m = Matrix2::identity();
    const auto& n = axis.components();
    for (int k = 0; k < 3; ++k) m = m + Complex(sign * n[k]) * pauli_matrix(all_paulis[k]);
    return Complex(0.5) * m;
  }
};

namespace detail {

// -sum x log2 x over the eigenvalues of an unnormalized 2x2 Hermitian block.
inline double spectral_entropy_weight(const Matrix2& m) {
  const auto [hi, lo] = hermitian2_eigenvalues(m(0, 0).real(), m(1, 1).real(), m(0, 1));
  const std::array<double, 2> w{hi, lo < 0.0 && lo > -tolerance::negative_eigenvalue ? 0.0 : lo};
  return shannon_entropy(w);
}

inline double entropy_weight(std::span<const double> xs) { return shannon_entropy(xs); }

// Operator on the unmeasured side after applying `op` to the measured side:
// Tr_measured[(op (x) I) rho] or Tr_measured[(I (x) op) rho].
inline Matrix2 apply_and_reduce(const Matrix4& rho, const Matrix2& op, Subsystem measured) {
  const Matrix2 id = Matrix2::identity();
  const Matrix4 lifted = measured == Subsystem::A ? kron(op, id) : kron(id, op);
  return partial_trace(lifted * rho, other(measured));
}

// p * C_re(rho_cond) in the basis `u`, written for the unnormalized block
// m = p rho_cond so that the p -> 0 limit is continuous:
//   p C = [-sum d log d] - [-sum mu log mu], d = diag(u^+ m u), mu = eig(m).
inline double weighted_coherence(const Matrix2& m, const Matrix2& u) {
  const Matrix2 rotated = u.adjoint() * m * u;
  const std::array<double, 2> d{std::max(0.0, rotated(0, 0).real()), std::max(0.0, rotated(1, 1).real())};
  return entropy_weight(d) - spectral_entropy_weight(m);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Hilbert-Schmidt complementarity

/// sum_i (rho_ii)^2 - 1/2.
inline double predictability_hs(const QubitState& rho_a) {
  return std::norm(rho_a(0, 0)) + std::norm(rho_a(1, 1)) - 0.5;
}

/// sum_{i != k} |rho_ik|^2.
inline double coherence_hs(const QubitState& rho_a) {
  return std::norm(rho_a(0, 1)) + std::norm(rho_a(1, 0));
}

/// sum_{i!=k, j!=l} |rho_{ij,kl}|^2 - 2 sum_{i!=k, j<l} Re(rho_{ij,kj} rho*_{il,kl}),
/// with i, k indexing A and j, l indexing B.
inline double nonlocal_coherence_hs(const TwoQubitState& rho) {
  auto at = [&](int i, int j, int k, int l) { return rho(2 * i + j, 2 * k + l); };
  double squares = 0.0;
  double cross = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) {
      if (i == k) continue;
      for (int j = 0; j < 2; ++j)
        for (int l = 0; l < 2; ++l) {
          if (j != l) squares += std::norm(at(i, j, k, l));
          if (j < l) cross += (at(i, j, k, j) * std::conj(at(i, l, k, l))).real();
        }
    }
  return squares - 2.0 * cross;
}

/// P_hs + C_hs + C^nl_hs for a pure state; equals (d_A - 1)/d_A = 1/2.
/// Throws ValidationError for mixed input, where the relation does not close.
inline double ccr_pure_hs(const TwoQubitState& rho) {
  const double p = purity(rho);
  if (std::abs(p - 1.0) > 1e-8) {
    throw ValidationError("Hilbert-Schmidt complete complementarity needs a pure state (purity " +
                          std::to_string(p) + ")");
  }
  const QubitState rho_a = partial_trace(rho, Subsystem::A);
  return predictability_hs(rho_a) + coherence_hs(rho_a) + nonlocal_coherence_hs(rho);
}

// ---------------------------------------------------------------------------
// Entropic complementarity

/// 1 - S(rho_diag), in bits.
inline double predictability_vn(const QubitState& rho_a) { return 1.0 - vn_entropy(dephase(rho_a)); }

/// S(rho_diag) - S(rho) in the computational basis.
template <int N>
double relative_entropy_coherence(const DensityMatrix<N>& rho) {
  const double c = vn_entropy(dephase(rho)) - vn_entropy(rho);
  if (c < -1e-12) throw NumericError("relative entropy of coherence is negative: " + std::to_string(c));
  return std::max(0.0, c);
}

/// Relative entropy of coherence with respect to the eigenbasis of a Pauli operator.
inline double relative_entropy_coherence(const QubitState& rho, Pauli basis) {
  return std::max(0.0, detail::weighted_coherence(rho.matrix(), pauli_eigenbasis(basis)));
}

/// S(A) + S(B) - S(AB), with round-off below zero clamped.
inline double mutual_information(const TwoQubitState& rho) {
  const double i = vn_entropy(partial_trace(rho, Subsystem::A)) + vn_entropy(partial_trace(rho, Subsystem::B)) -
                   vn_entropy(rho);
  if (i < -tolerance::negative_eigenvalue) throw NumericError("negative mutual information " + std::to_string(i));
  return std::max(0.0, i);
}

/// S(AB) - S(given); negative values signal entanglement.
inline double conditional_entropy(const TwoQubitState& rho, Subsystem given = Subsystem::B) {
  return vn_entropy(rho) - vn_entropy(partial_trace(rho, given));
}

/// (I_{A:B} + S_{A|B} + P_vn(rho_A) + C_re(rho_A)) - log2 d_A.
inline double ccr_mixed_residual(const TwoQubitState& rho) {
  const QubitState rho_a = partial_trace(rho, Subsystem::A);
  return mutual_information(rho) + conditional_entropy(rho, Subsystem::B) + predictability_vn(rho_a) +
         relative_entropy_coherence(rho_a) - 1.0;
}

// ---------------------------------------------------------------------------
// Quantum discord

/// Coarse angular grid for the measurement search followed by a bounded
/// pattern-search refinement. Deterministic for a fixed configuration.
struct DiscordGrid {
  int polar = 64;      ///< points on [0, pi], endpoints included
  int azimuthal = 128; ///< points on [0, 2 pi)
  double step_tolerance = 1e-9;
  int max_iterations = 20000;
};

struct DiscordResult {
  double discord = 0.0;
  double min_conditional_entropy = 0.0;  ///< sum_b p_b S(rho_{unmeasured|b})
  double polar = 0.0;                    ///< optimal measurement axis
  double azimuth = 0.0;
  int refinement_iterations = 0;
};

namespace detail {

// Projective measurement along n on `measured` leaves the other side in
// (R +- sum_k n_k T_k) / 2, with R = Tr_measured rho, T_k = Tr_measured[sigma_k rho].
// Operators are held as Pauli coordinates (m0, mx, my, mz), M = m0 I + m.sigma,
// whose eigenvalues are m0 +- |m|.
class ConditionalEntropyProbe {
 public:
  ConditionalEntropyProbe(const Matrix4& rho, Subsystem measured)
      : reduced_(coordinates(partial_trace(rho, other(measured)))) {
    for (int k = 0; k < 3; ++k)
      t_[k] = coordinates(apply_and_reduce(rho, pauli_matrix(all_paulis[k]), measured));
  }

  double operator()(double polar, double azimuth) const {
    return at(std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth), std::cos(polar));
  }

  /// sum_b p_b S(rho_{other|b}) for the unit axis (nx, ny, nz).
  double at(double nx, double ny, double nz) const {
    std::array<double, 4> shift;
    for (int c = 0; c < 4; ++c) shift[c] = nx * t_[0][c] + ny * t_[1][c] + nz * t_[2][c];
    double total = 0.0;
    for (double sign : {1.0, -1.0}) {
      std::array<double, 4> b;
      for (int c = 0; c < 4; ++c) b[c] = 0.5 * (reduced_[c] + sign * shift[c]);
      const double p = 2.0 * b[0];
      if (p <= 0.0) continue;
      const double radius = std::sqrt(b[1] * b[1] + b[2] * b[2] + b[3] * b[3]);
      // p S(branch / p) = H(eig(branch)) + p log2 p
      total += p * std::log2(p) - xlog2x(b[0] + radius) - xlog2x(b[0] - radius);
    }
    return total;
  }

 private:
  static std::array<double, 4> coordinates(const Matrix2& m) {
    const double a = m(0, 0).real();
    const double d = m(1, 1).real();
    return {0.5 * (a + d), m(1, 0).real(), m(1, 0).imag(), 0.5 * (a - d)};
  }

  static double xlog2x(double v) {
    if (v > 0.0) return v * std::log2(v);
    if (v < -tolerance::negative_eigenvalue) {
      throw NumericError("negative weight " + std::to_string(v) + " in conditional entropy");
    }
    return 0.0;
  }

  std::array<double, 4> reduced_;
  std::array<std::array<double, 4>, 3> t_;
};

}  // namespace detail

/// Minimizes the post-measurement conditional entropy over rank-one
/// projective measurements on `measured` and returns the discord
/// S(measured) - S(AB) + min_n sum_b p_b S(rho_{other|b}).
inline DiscordResult minimize_discord(const TwoQubitState& rho, const DiscordGrid& grid = {},
                                      Subsystem measured = Subsystem::B) {
  if (grid.polar < 2 || grid.azimuthal < 1) throw ValidationError("discord grid needs >= 2 x 1 points");
  const detail::ConditionalEntropyProbe probe(rho.matrix(), measured);

  const double d_polar = std::numbers::pi / (grid.polar - 1);
  const double d_azimuth = 2.0 * std::numbers::pi / grid.azimuthal;
  double best = std::numeric_limits<double>::infinity();
  double best_t = 0.0;
  double best_f = 0.0;
  std::vector<double> cos_f(grid.azimuthal), sin_f(grid.azimuthal);
  for (int j = 0; j < grid.azimuthal; ++j) {
    cos_f[j] = std::cos(j * d_azimuth);
    sin_f[j] = std::sin(j * d_azimuth);
  }
  // n and -n define the same measurement, and every azimuth at a pole is the
  // same axis, so a grid point is skipped when an equivalent one comes
  // earlier in (polar, azimuth) order. Strict '<' keeps the lexicographically
  // first grid minimizer.
  const bool antipodes_on_grid = grid.azimuthal % 2 == 0;
  for (int i = 0; i < grid.polar; ++i) {
    const int mirror = grid.polar - 1 - i;
    if (antipodes_on_grid && mirror < i) continue;
    const bool pole = i == 0 || i == grid.polar - 1;
    const double t = i * d_polar;
    const double st = pole ? 0.0 : std::sin(t);
    const double ct = i == 0 ? 1.0 : (i == grid.polar - 1 ? -1.0 : std::cos(t));
    for (int j = 0; j < grid.azimuthal; ++j) {
      if (pole && j > 0) break;
      if (antipodes_on_grid && mirror == i && j >= grid.azimuthal / 2) break;
      const double v = probe.at(st * cos_f[j], st * sin_f[j], ct);
      if (v < best) {
        best = v;
        best_t = t;
        best_f = j * d_azimuth;
      }
    }
  }

  double step_t = d_polar;
  double step_f = d_azimuth;
  int iterations = 0;
  while (step_t > grid.step_tolerance || step_f > grid.step_tolerance) {
    if (++iterations > grid.max_iterations) {
      throw NumericError("discord refinement did not converge after " + std::to_string(grid.max_iterations) +
                         " iterations (best " + std::to_string(best) + " at polar " + std::to_string(best_t) +
                         ", azimuth " + std::to_string(best_f) + ", steps " + std::to_string(step_t) + "/" +
                         std::to_string(step_f) + ")");
    }
    bool moved = false;
    const std::array<std::array<double, 2>, 4> moves{{{step_t, 0.0}, {-step_t, 0.0}, {0.0, step_f}, {0.0, -step_f}}};
    for (const auto& mv : moves) {
      const double v = probe(best_t + mv[0], best_f + mv[1]);
      if (v < best) {
        best = v;
        best_t += mv[0];
        best_f += mv[1];
        moved = true;
        break;
      }
    }
    if (!moved) {
      step_t *= 0.5;
      step_f *= 0.5;
    }
  }

  DiscordResult r;
  r.min_conditional_entropy = best;
  r.discord = vn_entropy(partial_trace(rho, measured)) - vn_entropy(rho) + best;
  r.polar = best_t;
  r.azimuth = best_f;
  r.refinement_iterations = iterations;
  return r;
}

inline double quantum_discord_numeric(const TwoQubitState& rho, const DiscordGrid& grid = {},
                                      Subsystem measured = Subsystem::B) {
  return minimize_discord(rho, grid, measured).discord;
}

/// Closed form -F_ee log2 F_ee - F_mumu log2 F_mumu. Coincides with
/// I_{A:B} + S_{A|B} of the embedded state; matches the minimized discord
/// only when the state is pure.
inline double quantum_discord_closed(const FlavorKernel& kernel) { return binary_entropy(kernel.f_ee()); }

/// I - QD: classical correlations accessible by the optimal measurement.
inline double classical_correlations(const TwoQubitState& rho, const DiscordGrid& grid = {},
                                     Subsystem measured = Subsystem::B) {
  return mutual_information(rho) - quantum_discord_numeric(rho, grid, measured);
}

// ---------------------------------------------------------------------------
// Nonlocal advantage of quantum coherence

/// N = 1/2 sum_{i != j, a = +-} p_{i,a} C^{sigma_j}(rho_{other | Pi_i^a}), with
/// Pi_i^+- = (I +- sigma_i)/2 applied to `measured` and C the relative entropy
/// of coherence. Zero-probability branches contribute zero.
inline double naqc_measured(const TwoQubitState& rho, Subsystem measured = Subsystem::A) {
  double total = 0.0;
  for (Pauli i : all_paulis) {
    for (Outcome a : {Outcome::plus, Outcome::minus}) {
      const MeasurementSetting setting{pauli_axis(i), a};
      const Matrix2 branch = detail::apply_and_reduce(rho.matrix(), setting.projector(), measured);
      const double p = branch.trace().real();
      if (p <= 0.0) continue;
      for (Pauli j : all_paulis) {
        if (j == i) continue;
        total += detail::weighted_coherence(branch, pauli_eigenbasis(j));
      }
    }
  }
  return 0.5 * total;
}

/// Closed form 2 - F_ee log2 F_ee - F_mumu log2 F_mumu.
inline double naqc_closed(const FlavorKernel& kernel) { return 2.0 + binary_entropy(kernel.f_ee()); }

struct LocalBoundOptions {
  int resolution = 64;  ///< polar points; azimuth uses twice as many
  bool incoherent_only = false;
  double step_tolerance = 1e-10;
};

struct LocalBound {
  double value = 0.0;
  double polar = 0.0;
  double azimuth = 0.0;
};

/// Total single-qubit coherence sum_j C^{sigma_j}(rho) for the pure state
/// with Bloch vector n(polar, azimuth).
inline double single_qubit_coherence_sum(double polar, double azimuth) {
  const MeasurementSetting state{BlochAxis::from_angles(polar, azimuth), Outcome::plus};
  const Matrix2 rho = state.projector();
  double s = 0.0;
  for (Pauli j : all_paulis) s += detail::weighted_coherence(rho, pauli_eigenbasis(j));
  return s;
}

/// Largest sum_j C^{sigma_j} attainable by a single qubit: Bloch-sphere grid
/// followed by pattern-search refinement. Mixed states lie inside the ball
/// and do not exceed the surface maximum. With `incoherent_only` the feasible
/// set is the maximally mixed state, the only state incoherent in all three
/// Pauli bases.
inline LocalBound naqc_local_bound(const LocalBoundOptions& opt = {}) {
  if (opt.incoherent_only) {
    const QubitState mixed = QubitState::diagonal({0.5, 0.5});
    double s = 0.0;
    for (Pauli j : all_paulis) s += relative_entropy_coherence(mixed, j);
    return {s, 0.0, 0.0};
  }
  if (opt.resolution < 2) throw ValidationError("bound resolution must be >= 2");
  const int n_polar = opt.resolution;
  const int n_azimuth = 2 * opt.resolution;
  const double d_polar = std::numbers::pi / (n_polar - 1);
  const double d_azimuth = 2.0 * std::numbers::pi / n_azimuth;
  LocalBound best{-1.0, 0.0, 0.0};
  for (int i = 0; i < n_polar; ++i)
    for (int j = 0; j < n_azimuth; ++j) {
      const double v = single_qubit_coherence_sum(i * d_polar, j * d_azimuth);
      if (v > best.value) best = {v, i * d_polar, j * d_azimuth};
    }
  double step_t = d_polar;
  double step_f = d_azimuth;
  int iterations = 0;
  while (step_t > opt.step_tolerance || step_f > opt.step_tolerance) {
    if (++iterations > 100000) throw NumericError("coherence bound refinement did not converge");
    bool moved = false;
    const std::array<std::array<double, 2>, 4> moves{{{step_t, 0.0}, {-step_t, 0.0}, {0.0, step_f}, {0.0, -step_f}}};
    for (const auto& mv : moves) {
      const double v = single_qubit_coherence_sum(best.polar + mv[0], best.azimuth + mv[1]);
      if (v > best.value) {
        best = {v, best.polar + mv[0], best.azimuth + mv[1]};
        moved = true;
        break;
      }
    }
    if (!moved) {
      step_t *= 0.5;
      step_f *= 0.5;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Full report

struct CorrelationReport {
  double p_hs = 0.0;
  double c_hs = 0.0;
  double c_hs_nl = 0.0;
  double p_vn = 0.0;
  double c_re = 0.0;
  double s_vn_a = 0.0;
  double mutual_info = 0.0;
  double cond_entropy = 0.0;
  double discord = 0.0;         ///< minimized over measurements on B
  double classical_corr = 0.0;
  double naqc = 0.0;            ///< measured on A
  double survival_prob = 0.0;
  double ccr_residual = 0.0;
  // Closed-form companions (not part of the CSV contract).
  double discord_closed = 0.0;
  double naqc_closed = 0.0;
};

struct ReportOptions {
  DiscordGrid grid{};
  Subsystem discord_measured = Subsystem::B;
  Subsystem naqc_measured = Subsystem::A;
};

/// `rho` must be the two-mode embedding of `kernel` (or of the matching
/// plane-wave amplitudes).
inline CorrelationReport full_report(const TwoQubitState& rho, const FlavorKernel& kernel,
                                     const ReportOptions& opt = {}) {
  const QubitState rho_a = partial_trace(rho, Subsystem::A);
  CorrelationReport r;
  r.p_hs = predictability_hs(rho_a);
  r.c_hs = coherence_hs(rho_a);
  r.c_hs_nl = nonlocal_coherence_hs(rho);
  r.p_vn = predictability_vn(rho_a);
  r.c_re = relative_entropy_coherence(rho_a);
  r.s_vn_a = vn_entropy(rho_a);
  r.mutual_info = mutual_information(rho);
  r.cond_entropy = conditional_entropy(rho, Subsystem::B);
  r.discord = quantum_discord_numeric(rho, opt.grid, opt.discord_measured);
  r.classical_corr = r.mutual_info - r.discord;
  r.naqc = naqc_measured(rho, opt.naqc_measured);
  r.survival_prob = survival_probability(kernel);
  r.ccr_residual = r.mutual_info + r.cond_entropy + r.p_vn + r.c_re - 1.0;
  r.discord_closed = quantum_discord_closed(kernel);
  r.naqc_closed = naqc_closed(kernel);
#ifndef NDEBUG
  if (std::abs(r.discord_closed - (r.mutual_info + r.cond_entropy)) > 1e-10) {
    throw NumericError("closed-form discord disagrees with I + S_A|B");
  }
  if (std::abs(r.ccr_residual) > 1e-10) throw NumericError("mixed-state CCR residual above 1e-10");
#endif
  return r;
}

}  // namespace nuccr
