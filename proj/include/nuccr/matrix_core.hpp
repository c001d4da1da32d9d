#pragma once

// Small dense complex Hermitian matrices (dimension 2 or 4) and the density
// matrix primitives built on them: spectra, von Neumann entropy, partial
// trace, dephasing and purity.
//
// Two-qubit basis ordering is fixed everywhere as |00>, |01>, |10>, |11>,
// with the first tensor factor called A and the second B.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "nuccr/errors.hpp"

namespace nuccr {

using Complex = std::complex<double>;

namespace tolerance {
inline constexpr double hermitian = 1e-12;
inline constexpr double trace = 1e-12;
// Eigenvalues in [-negative_eigenvalue, 0) are treated as round-off and
// clamped to zero; anything more negative is rejected.
inline constexpr double negative_eigenvalue = 1e-10;
}  // namespace tolerance

enum class Subsystem { A, B };

inline constexpr Subsystem other(Subsystem s) noexcept {
  return s == Subsystem::A ? Subsystem::B : Subsystem::A;
}

inline std::string_view to_string(Subsystem s) noexcept {
  return s == Subsystem::A ? "A" : "B";
}

/// Dense row-major complex matrix of fixed dimension N (2 or 4).
template <int N>
class Matrix {
  static_assert(N == 2 || N == 4, "only qubit and two-qubit matrices are supported");

 public:
  static constexpr int dim = N;
  static constexpr std::size_t size = static_cast<std::size_t>(N) * N;

  Matrix() = default;

  explicit Matrix(std::span<const Complex> row_major) {
    if (row_major.size() != size) {
      throw ValidationError("matrix of dimension " + std::to_string(N) + " needs " +
                            std::to_string(size) + " entries, got " +
                            std::to_string(row_major.size()));
    }
    std::copy(row_major.begin(), row_major.end(), e_.begin());
  }

  static Matrix identity() {
    Matrix m;
    for (int i = 0; i < N; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(const std::array<double, N>& d) {
    Matrix m;
    for (int i = 0; i < N; ++i) m(i, i) = d[i];
    return m;
  }

  Complex& operator()(int r, int c) { return e_[static_cast<std::size_t>(r * N + c)]; }
  const Complex& operator()(int r, int c) const {
    return e_[static_cast<std::size_t>(r * N + c)];
  }

  std::span<const Complex, size> entries() const { return e_; }

  Complex trace() const {
    Complex t = 0.0;
    for (int i = 0; i < N; ++i) t += (*this)(i, i);
    return t;
  }

  Matrix adjoint() const {
    Matrix m;
    for (int r = 0; r < N; ++r)
      for (int c = 0; c < N; ++c) m(r, c) = std::conj((*this)(c, r));
    return m;
  }

  /// Largest |m_rc - conj(m_cr)| over all entries (diagonal imaginary parts included).
  double hermiticity_defect() const {
    double worst = 0.0;
    for (int r = 0; r < N; ++r)
      for (int c = r; c < N; ++c)
        worst = std::max(worst, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
    return worst;
  }

  bool all_finite() const {
    return std::all_of(e_.begin(), e_.end(), [](const Complex& z) {
      return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
  }

  friend Matrix operator+(Matrix a, const Matrix& b) {
    for (std::size_t i = 0; i < size; ++i) a.e_[i] += b.e_[i];
    return a;
  }
  friend Matrix operator-(Matrix a, const Matrix& b) {
    for (std::size_t i = 0; i < size; ++i) a.e_[i] -= b.e_[i];
    return a;
  }
  friend Matrix operator*(Complex s, Matrix a) {
    for (auto& z : a.e_) z *= s;
    return a;
  }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    Matrix m;
    for (int r = 0; r < N; ++r)
      for (int k = 0; k < N; ++k) {
        const Complex ark = a(r, k);
        if (ark == Complex{}) continue;
        for (int c = 0; c < N; ++c) m(r, c) += ark * b(k, c);
      }
    return m;
  }

 private:
  std::array<Complex, size> e_{};
};

using Matrix2 = Matrix<2>;
using Matrix4 = Matrix<4>;

inline Matrix4 kron(const Matrix2& a, const Matrix2& b) {
  Matrix4 m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) m(2 * i + j, 2 * k + l) = a(i, k) * b(j, l);
  return m;
}

/// Eigenvalues in descending order.
template <int N>
struct Spectrum {
  std::array<double, N> eigenvalues{};

  double sum() const {
    double s = 0.0;
    for (double v : eigenvalues) s += v;
    return s;
  }
  double min() const { return eigenvalues.back(); }
};

/// Spectrum plus matching orthonormal eigenvectors stored as matrix columns.
template <int N>
struct EigenSystem {
  Spectrum<N> spectrum;
  Matrix<N> vectors;
};

namespace detail {

inline void require_hermitian(double defect) {
  if (!(defect <= tolerance::hermitian)) {
    throw ValidationError("matrix is not Hermitian (defect " + std::to_string(defect) + ")");
  }
}

// lambda_+- = (tr +- sqrt((a - d)^2 + 4|b|^2)) / 2
inline std::pair<double, double> hermitian2_eigenvalues(double a, double d, Complex b) {
  const double half_gap = 0.5 * std::hypot(a - d, 2.0 * std::abs(b));
  const double mean = 0.5 * (a + d);
  return {mean + half_gap, mean - half_gap};
}

template <int N>
void sort_descending(EigenSystem<N>& es) {
  std::array<int, N> order{};
  for (int i = 0; i < N; ++i) order[i] = i;
  auto& ev = es.spectrum.eigenvalues;
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return ev[x] > ev[y]; });
  EigenSystem<N> sorted;
  for (int i = 0; i < N; ++i) {
    sorted.spectrum.eigenvalues[i] = ev[order[i]];
    for (int r = 0; r < N; ++r) sorted.vectors(r, i) = es.vectors(r, order[i]);
  }
  es = sorted;
}

// Cyclic Jacobi for complex Hermitian matrices. Each pivot first removes the
// phase of a_pq with a diagonal unitary, then applies a real Givens rotation.
template <int N>
EigenSystem<N> jacobi(Matrix<N> a) {
  Matrix<N> v = Matrix<N>::identity();
  constexpr int max_sweeps = 64;
  bool converged = false;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    double total = 0.0;
    for (int p = 0; p < N; ++p)
      for (int q = 0; q < N; ++q) {
        const double n2 = std::norm(a(p, q));
        total += n2;
        if (p != q) off += n2;
      }
    if (off <= 1e-34 * total || off == 0.0) {
      converged = true;
      break;
    }
    for (int p = 0; p < N - 1; ++p) {
      for (int q = p + 1; q < N; ++q) {
        const double mag = std::abs(a(p, q));
        if (mag == 0.0) continue;
        const Complex phase = a(p, q) / mag;
        for (int r = 0; r < N; ++r) {
          a(r, q) *= std::conj(phase);
          v(r, q) *= std::conj(phase);
        }
        for (int r = 0; r < N; ++r) a(q, r) *= phase;

        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * mag);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int r = 0; r < N; ++r) {
          if (r == p || r == q) continue;
          const Complex arp = a(r, p);
          const Complex arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = s * arp + c * arq;
          a(p, r) = std::conj(a(r, p));
          a(q, r) = std::conj(a(r, q));
        }
        a(p, p) = app - t * mag;
        a(q, q) = aqq + t * mag;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (int r = 0; r < N; ++r) {
          const Complex vrp = v(r, p);
          const Complex vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }
  if (!converged) throw NumericError("Jacobi eigensolver did not converge");
  EigenSystem<N> es;
  for (int i = 0; i < N; ++i) es.spectrum.eigenvalues[i] = a(i, i).real();
  es.vectors = v;
  sort_descending(es);
  return es;
}

// X-structured 4x4 matrices (nonzero only on the diagonal and anti-diagonal)
// split into the {|00>,|11>} and {|01>,|10>} blocks.
inline bool is_x_structured(const Matrix4& m) {
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      if (r != c && r + c != 3 && m(r, c) != Complex{}) return false;
  return true;
}

inline Spectrum<4> x_state_spectrum(const Matrix4& m) {
  const auto [o1, o2] = hermitian2_eigenvalues(m(0, 0).real(), m(3, 3).real(), m(0, 3));
  const auto [c1, c2] = hermitian2_eigenvalues(m(1, 1).real(), m(2, 2).real(), m(1, 2));
  Spectrum<4> s{{o1, o2, c1, c2}};
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end(), std::greater<>());
  return s;
}

}  // namespace detail

/// Full eigen-decomposition by cyclic Jacobi. Throws ValidationError for
/// non-Hermitian input.
template <int N>
EigenSystem<N> eig_hermitian_system(const Matrix<N>& m) {
  detail::require_hermitian(m.hermiticity_defect());
  return detail::jacobi(m);
}

/// Eigenvalues, descending. Dimension 2 uses the trace/determinant closed
/// form, X-structured 4x4 matrices split into two 2x2 blocks, anything else
/// goes through Jacobi.
template <int N>
Spectrum<N> eig_hermitian(const Matrix<N>& m) {
  detail::require_hermitian(m.hermiticity_defect());
  if constexpr (N == 2) {
    const auto [hi, lo] = detail::hermitian2_eigenvalues(m(0, 0).real(), m(1, 1).real(), m(0, 1));
    return Spectrum<2>{{hi, lo}};
  } else {
    if (detail::is_x_structured(m)) return detail::x_state_spectrum(m);
    return detail::jacobi(m).spectrum;
  }
}

/// Shannon entropy in bits with 0 log 0 = 0. Slightly negative round-off
/// weights are clamped; weights below -tolerance::negative_eigenvalue throw.
inline double shannon_entropy(std::span<const double> weights) {
  double h = 0.0;
  for (double p : weights) {
    if (p < -tolerance::negative_eigenvalue) {
      throw NumericError("negative weight " + std::to_string(p) + " in entropy");
    }
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

/// H2(p) = -p log2 p - (1 - p) log2 (1 - p).
inline double binary_entropy(double p) {
  const std::array<double, 2> w{p, 1.0 - p};
  return shannon_entropy(w);
}

/// Complex Hermitian, unit-trace, positive semidefinite matrix. The spectrum
/// is computed once on construction and kept with the value.
template <int N>
class DensityMatrix {
 public:
  static constexpr int dim = N;

  explicit DensityMatrix(const Matrix<N>& m) : m_(m) {
    if (!m_.all_finite()) throw ValidationError("density matrix has non-finite entries");
    const Complex tr = m_.trace();
    if (std::abs(tr - 1.0) >= tolerance::trace) {
      throw ValidationError("density matrix trace is " + std::to_string(tr.real()) + " + " +
                            std::to_string(tr.imag()) + "i, expected 1");
    }
    spectrum_ = eig_hermitian(m_);
    if (spectrum_.min() < -tolerance::negative_eigenvalue) {
      throw ValidationError("density matrix is not positive semidefinite (eigenvalue " +
                            std::to_string(spectrum_.min()) + ")");
    }
  }

  static DensityMatrix from_entries(std::span<const Complex> row_major) {
    return DensityMatrix(Matrix<N>(row_major));
  }

  static DensityMatrix diagonal(const std::array<double, N>& d) {
    return DensityMatrix(Matrix<N>::diagonal(d));
  }

  const Matrix<N>& matrix() const noexcept { return m_; }
  Complex operator()(int r, int c) const { return m_(r, c); }
  const Spectrum<N>& spectrum() const noexcept { return spectrum_; }

  static std::span<const std::string_view> basis_labels() {
    static constexpr std::array<std::string_view, 2> qubit{"0", "1"};
    static constexpr std::array<std::string_view, 4> pair{"00", "01", "10", "11"};
    if constexpr (N == 2) {
      return qubit;
    } else {
      return pair;
    }
  }

 private:
  Matrix<N> m_;
  Spectrum<N> spectrum_;
};

using QubitState = DensityMatrix<2>;
using TwoQubitState = DensityMatrix<4>;

template <int N>
const Spectrum<N>& eig_hermitian(const DensityMatrix<N>& rho) {
  return rho.spectrum();
}

/// Von Neumann entropy in bits.
template <int N>
double vn_entropy(const DensityMatrix<N>& rho) {
  return shannon_entropy(rho.spectrum().eigenvalues);
}

/// Unnormalized partial trace of a two-qubit operator, keeping `keep`.
inline Matrix2 partial_trace(const Matrix4& m, Subsystem keep) {
  Matrix2 r;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int s = 0; s < 2; ++s) {
        r(x, y) += keep == Subsystem::A ? m(2 * x + s, 2 * y + s) : m(2 * s + x, 2 * s + y);
      }
  return r;
}

/// Reduced state of the subsystem `keep`.
inline QubitState partial_trace(const TwoQubitState& rho, Subsystem keep) {
  return QubitState(partial_trace(rho.matrix(), keep));
}

/// Zero the off-diagonal entries in the computational basis.
template <int N>
DensityMatrix<N> dephase(const DensityMatrix<N>& rho) {
  std::array<double, N> d{};
  for (int i = 0; i < N; ++i) d[i] = rho(i, i).real();
  return DensityMatrix<N>::diagonal(d);
}

/// Tr(rho^2).
template <int N>
double purity(const DensityMatrix<N>& rho) {
  double p = 0.0;
  for (const Complex& z : rho.matrix().entries()) p += std::norm(z);
  return p;
}

}  // namespace nuccr
