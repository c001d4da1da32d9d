#pragma once

// Two-flavor neutrino propagation: mixing, natural-unit phases, the Gaussian
// wave-packet coherence factors f_jk(x), the flavor kernel F^alpha(x) and its
// embedding into the two-mode (two-qubit) flavor representation.
//
// Mass convention: m_1^2 = 0, m_2^2 = dm2, so Delta m^2_jk = m_j^2 - m_k^2.
// Only |dm2| enters observable two-flavor quantities. Neutrinos and
// antineutrinos share one code path (no CP phase with two flavors).
//
// Flavor-mode layout in the |00>,|01>,|10>,|11> basis:
//   nu_e  <-> |01>   (basis index 1)
//   nu_mu <-> |10>   (basis index 2)
// independently of the initial flavor.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>

#include "nuccr/errors.hpp"
#include "nuccr/matrix_core.hpp"

namespace nuccr {

/// Every length/energy conversion is derived from hbar*c.
namespace units {
inline constexpr double hbar_c_mev_fm = 197.3269804;
inline constexpr double ev_per_mev = 1e6;
/// 1 km expressed in eV^-1 (1 km = 1e18 fm).
inline constexpr double inv_ev_per_km = 1e18 / (hbar_c_mev_fm * ev_per_mev);
inline constexpr double inv_ev_per_m = inv_ev_per_km / 1e3;
}  // namespace units

enum class Flavor { e, mu };

inline constexpr int index(Flavor f) noexcept { return f == Flavor::e ? 0 : 1; }
inline constexpr Flavor partner(Flavor f) noexcept {
  return f == Flavor::e ? Flavor::mu : Flavor::e;
}
/// Position of a flavor's single-occupation ket in the two-qubit basis.
inline constexpr int mode_basis_index(Flavor f) noexcept { return f == Flavor::e ? 1 : 2; }

inline std::string_view to_string(Flavor f) noexcept { return f == Flavor::e ? "e" : "mu"; }

inline Flavor parse_flavor(std::string_view s) {
  if (s == "e") return Flavor::e;
  if (s == "mu") return Flavor::mu;
  throw ValidationError("unknown flavor '" + std::string(s) + "' (expected e or mu)");
}

/// Mixing angle theta in [0, pi/2] and splitting dm2 > 0 (eV^2).
class MixingSpec {
 public:
  MixingSpec(double theta_rad, double dm2_ev2) : theta_(theta_rad), dm2_(dm2_ev2) {
    if (!(theta_ >= 0.0 && theta_ <= std::numbers::pi / 2)) {
      throw ValidationError("mixing angle must lie in [0, pi/2], got " + std::to_string(theta_));
    }
    if (!(dm2_ > 0.0) || !std::isfinite(dm2_)) {
      throw ValidationError("dm2 must be positive, got " + std::to_string(dm2_));
    }
  }

  /// theta = asin(sqrt(s)) / 2, i.e. the solution in [0, pi/4].
  static MixingSpec from_sin2_2theta(double s, double dm2_ev2) {
    if (!(s >= 0.0 && s <= 1.0)) throw ValidationError("sin^2(2 theta) must lie in [0, 1]");
    return {0.5 * std::asin(std::sqrt(s)), dm2_ev2};
  }
  static MixingSpec from_tan2_2theta(double t, double dm2_ev2) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("tan^2(2 theta) must be >= 0");
    return {0.5 * std::atan(std::sqrt(t)), dm2_ev2};
  }
  static MixingSpec from_tan2_theta(double t, double dm2_ev2) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("tan^2(theta) must be >= 0");
    return {std::atan(std::sqrt(t)), dm2_ev2};
  }

  double theta() const noexcept { return theta_; }
  double dm2() const noexcept { return dm2_; }
  double sin2_2theta() const {
    const double s = std::sin(2.0 * theta_);
    return s * s;
  }

  /// U[flavor][mass] = [[cos, sin], [-sin, cos]].
  std::array<std::array<double, 2>, 2> matrix() const {
    const double c = std::cos(theta_);
    const double s = std::sin(theta_);
    return {{{c, s}, {-s, c}}};
  }

  /// m_j^2 with m_1^2 = 0 (j in {1, 2}).
  double mass_squared(int j) const { return j == 1 ? 0.0 : dm2_; }

 private:
  double theta_;
  double dm2_;
};

/// Wave-packet width sigma_x (meters; +inf selects plane waves) and energy E (MeV).
class WavePacketParams {
 public:
  WavePacketParams(double sigma_x_m, double energy_mev) : sigma_x_m_(sigma_x_m), energy_mev_(energy_mev) {
    if (!(sigma_x_m_ > 0.0)) {
      throw ValidationError("sigma_x must be positive or infinite, got " + std::to_string(sigma_x_m_));
    }
    if (!(energy_mev_ > 0.0) || !std::isfinite(energy_mev_)) {
      throw ValidationError("energy must be positive, got " + std::to_string(energy_mev_));
    }
  }

  static WavePacketParams plane_wave(double energy_mev) {
    return {std::numeric_limits<double>::infinity(), energy_mev};
  }

  double sigma_x_m() const noexcept { return sigma_x_m_; }
  double energy_mev() const noexcept { return energy_mev_; }
  bool is_plane_wave() const noexcept { return std::isinf(sigma_x_m_); }

 private:
  double sigma_x_m_;
  double energy_mev_;
};

class PropagationPoint {
 public:
  explicit PropagationPoint(double x_km) : x_km_(x_km) {
    if (!(x_km_ >= 0.0) || !std::isfinite(x_km_)) {
      throw ValidationError("baseline must be finite and >= 0 km, got " + std::to_string(x_km_));
    }
  }
  double x_km() const noexcept { return x_km_; }

 private:
  double x_km_;
};

/// dm2 * x / (2E) in radians, with x in km and E in MeV.
inline double natural_units_phase(double dm2_ev2, double x_km, double energy_mev) {
  if (!(dm2_ev2 >= 0.0) || !(x_km >= 0.0) || !(energy_mev > 0.0) || !std::isfinite(dm2_ev2) ||
      !std::isfinite(x_km) || !std::isfinite(energy_mev)) {
    throw ValidationError("natural_units_phase needs dm2 >= 0, x >= 0 and E > 0");
  }
  return dm2_ev2 * (x_km * units::inv_ev_per_km) / (2.0 * energy_mev * units::ev_per_mev);
}

/// Baseline (km) at which the Gaussian damping exponent of f_12 reaches one:
/// 4 sqrt(2) E^2 sigma_x / dm2. Infinite for plane waves.
inline double coherence_length_km(const WavePacketParams& wp, double dm2_ev2) {
  if (wp.is_plane_wave()) return std::numeric_limits<double>::infinity();
  const double e_ev = wp.energy_mev() * units::ev_per_mev;
  const double sigma = wp.sigma_x_m() * units::inv_ev_per_m;
  return 4.0 * std::numbers::sqrt2 * e_ev * e_ev * sigma / dm2_ev2 / units::inv_ev_per_km;
}

/// f_jk(x) = exp[-i dm2_jk x / 2E - (dm2_jk x / (4 sqrt2 E^2 sigma_x))^2], j, k in {1, 2}.
inline Complex coherence_factor(int j, int k, const PropagationPoint& p, const WavePacketParams& wp,
                                const MixingSpec& mix) {
  if (j < 1 || j > 2 || k < 1 || k > 2) throw ValidationError("mass indices must be 1 or 2");
  if (j == k) return 1.0;
  const double dm2_jk = mix.mass_squared(j) - mix.mass_squared(k);
  const double x = p.x_km() * units::inv_ev_per_km;
  const double e_ev = wp.energy_mev() * units::ev_per_mev;
  const double phase = dm2_jk * x / (2.0 * e_ev);
  double damping = 0.0;
  if (!wp.is_plane_wave()) {
    const double sigma = wp.sigma_x_m() * units::inv_ev_per_m;
    damping = dm2_jk * x / (4.0 * std::numbers::sqrt2 * e_ev * e_ev * sigma);
  }
  return std::polar(std::exp(-damping * damping), -phase);
}

/// F^alpha_{beta gamma}(x) for a fixed initial flavor alpha. Hermitian with
/// unit trace.
class FlavorKernel {
 public:
  FlavorKernel(Flavor initial, const Matrix2& entries) : initial_(initial), f_(entries) {
    if (!f_.all_finite()) throw ValidationError("flavor kernel has non-finite entries");
    if (f_.hermiticity_defect() > tolerance::hermitian) {
      throw ValidationError("flavor kernel is not Hermitian");
    }
    if (std::abs(f_.trace() - 1.0) >= tolerance::trace) {
      throw ValidationError("flavor kernel diagonal does not sum to 1");
    }
  }

  Flavor initial_flavor() const noexcept { return initial_; }
  Complex operator()(Flavor beta, Flavor gamma) const { return f_(index(beta), index(gamma)); }
  const Matrix2& entries() const noexcept { return f_; }

  double f_ee() const { return f_(0, 0).real(); }
  double f_mumu() const { return f_(1, 1).real(); }
  Complex f_emu() const { return f_(0, 1); }

 private:
  Flavor initial_;
  Matrix2 f_;
};

/// F^alpha_{beta gamma} = sum_{kj} U*_{alpha j} U_{alpha k} f_jk U_{beta j} U*_{gamma k}.
inline FlavorKernel flavor_kernel(Flavor alpha, const PropagationPoint& p, const WavePacketParams& wp,
                                  const MixingSpec& mix) {
  const auto u = mix.matrix();
  std::array<std::array<Complex, 2>, 2> f{};
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) f[j][k] = coherence_factor(j + 1, k + 1, p, wp, mix);

  const int a = index(alpha);
  Matrix2 out;
  for (int beta = 0; beta < 2; ++beta)
    for (int gamma = 0; gamma < 2; ++gamma) {
      Complex sum = 0.0;
      for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j) sum += u[a][j] * u[a][k] * f[j][k] * u[beta][j] * u[gamma][k];
      out(beta, gamma) = sum;
    }
  // Diagonal entries are real by construction; drop the rounding residue.
  out(0, 0) = out(0, 0).real();
  out(1, 1) = out(1, 1).real();
  out(1, 0) = std::conj(out(0, 1));
  return {alpha, out};
}

/// Two-mode embedding: F placed on the |01>,|10> block, zero elsewhere.
inline TwoQubitState flavor_density_matrix(const FlavorKernel& kernel) {
  Matrix4 m;
  for (Flavor beta : {Flavor::e, Flavor::mu})
    for (Flavor gamma : {Flavor::e, Flavor::mu})
      m(mode_basis_index(beta), mode_basis_index(gamma)) = kernel(beta, gamma);
  return TwoQubitState(m);
}

/// Plane-wave amplitudes a_{alpha alpha}, a_{alpha beta} of an initial flavor alpha.
struct PureFlavorState {
  Flavor initial;
  Complex same;   ///< a_{alpha alpha}
  Complex other;  ///< a_{alpha beta}

  Complex amplitude(Flavor f) const { return f == initial ? same : other; }
};

/// Amplitudes after accumulating the oscillation phase dm2 x / 2E, with the
/// m_1 phase factored out: a_ee = cos^2 + sin^2 e^{-i phase},
/// a_emu = sin cos (e^{-i phase} - 1).
inline PureFlavorState plane_wave_state(double phase, const MixingSpec& mix, Flavor alpha = Flavor::e) {
  if (!std::isfinite(phase)) throw ValidationError("phase must be finite");
  const auto u = mix.matrix();
  const std::array<Complex, 2> evolution{1.0, std::polar(1.0, -phase)};
  auto amp = [&](Flavor beta) {
    Complex s = 0.0;
    for (int j = 0; j < 2; ++j) s += u[index(beta)][j] * u[index(alpha)][j] * evolution[j];
    return s;
  };
  PureFlavorState st{alpha, amp(alpha), amp(partner(alpha))};
  const double norm = std::norm(st.same) + std::norm(st.other);
  if (std::abs(norm - 1.0) > 1e-12) throw NumericError("plane-wave state lost normalization");
  return st;
}

/// Projector onto a_e |01> + a_mu |10>.
inline TwoQubitState pure_state_density_matrix(const PureFlavorState& st) {
  std::array<Complex, 4> psi{};
  psi[mode_basis_index(Flavor::e)] = st.amplitude(Flavor::e);
  psi[mode_basis_index(Flavor::mu)] = st.amplitude(Flavor::mu);
  Matrix4 m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = psi[r] * std::conj(psi[c]);
  return TwoQubitState(m);
}

/// F^alpha_{alpha alpha}.
inline double survival_probability(const FlavorKernel& kernel) {
  const Flavor a = kernel.initial_flavor();
  return kernel(a, a).real();
}

}  // namespace nuccr
