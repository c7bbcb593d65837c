// Copyright 2026 The qchange Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Phase-space description of bosonic Gaussian states.
//
// Quadratures are ordered q_1..q_m p_1..p_m and the vacuum has variance 1/2,
// so a single-mode thermal state with occupancy n has covariance (n + 1/2) I.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qchange/errors.hpp"

namespace qchange {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kPhysicalityTolerance = 1e-10;
inline constexpr double kStructureTolerance = 1e-10;
inline constexpr double kOccupancyClamp = 1e-12;

/// Ω = [0 I_m; -I_m 0].
inline Matrix symplectic_form(int mode_count) {
  Matrix omega = Matrix::Zero(2 * mode_count, 2 * mode_count);
  omega.topRightCorner(mode_count, mode_count).setIdentity();
  omega.bottomLeftCorner(mode_count, mode_count) = -Matrix::Identity(mode_count, mode_count);
  return omega;
}

/// Pre/post-change parameters of the lossy thermal-noise channel.
struct ChangeScenario {
  double n_bar = 0.0;    // mean input photon number per mode
  double n_bar_B = 0.0;  // thermal environment occupancy
  double eta0 = 1.0;     // prechange transmittance
  double eta1 = 1.0;     // postchange transmittance

  double eta(int s) const { return s == 0 ? eta0 : eta1; }

  void validate() const {
    detail::require(std::isfinite(n_bar) && n_bar >= 0.0, "n_bar must be finite and >= 0");
    detail::require(std::isfinite(n_bar_B) && n_bar_B >= 0.0, "n_bar_B must be finite and >= 0");
    detail::require(std::isfinite(eta0) && eta0 >= 0.0 && eta0 <= 1.0, "eta0 must lie in [0, 1]");
    detail::require(std::isfinite(eta1) && eta1 >= 0.0 && eta1 <= 1.0, "eta1 must lie in [0, 1]");
  }
};

namespace detail {

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double scale_of(const Matrix& m) { return std::max(1.0, max_abs(m)); }

// Square root and inverse square root of a symmetric positive definite matrix.
struct SpdRoots {
  Matrix root;
  Matrix inverse_root;
};

inline SpdRoots spd_roots(const Matrix& cov) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
  if (solver.info() != Eigen::Success) throw NumericError("covariance eigendecomposition failed");
  const Vector& w = solver.eigenvalues();
  if (w.minCoeff() <= 0.0) throw PhysicalityError("covariance is not positive definite");
  const Matrix& v = solver.eigenvectors();
  return {v * w.cwiseSqrt().asDiagonal() * v.transpose(),
          v * w.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose()};
}

// Spectral data of iΣΩ, obtained from the Hermitian matrix K = Σ^{1/2} iΩ Σ^{1/2}
// which is similar to it. Eigenvalues come in ± pairs ±ν_k, sorted ascending.
struct SymplecticSpectrum {
  SpdRoots roots;
  Vector eigenvalues;
  ComplexMatrix eigenvectors;
};

inline SymplecticSpectrum symplectic_spectrum(const Matrix& cov) {
  const int n = static_cast<int>(cov.rows());
  SpdRoots roots = spd_roots(cov);
  const Matrix omega = symplectic_form(n / 2);
  const ComplexMatrix k =
      std::complex<double>(0.0, 1.0) * (roots.root * omega * roots.root).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(k);
  if (solver.info() != Eigen::Success) throw NumericError("symplectic eigendecomposition failed");
  return {std::move(roots), solver.eigenvalues(), solver.eigenvectors()};
}

}  // namespace detail

/// Symplectic (Williamson) spectrum ν_1 <= ... <= ν_m of a covariance matrix.
inline Vector symplectic_eigenvalues(const Matrix& cov) {
  const auto spectrum = detail::symplectic_spectrum(cov);
  const int m = static_cast<int>(cov.rows()) / 2;
  return spectrum.eigenvalues.tail(m);
}

/// Smallest eigenvalue of Σ + iΩ/2; nonnegative exactly for physical states.
inline double uncertainty_margin(const Matrix& cov) {
  const int m = static_cast<int>(cov.rows()) / 2;
  const ComplexMatrix h = cov.cast<std::complex<double>>() +
                          std::complex<double>(0.0, 0.5) * symplectic_form(m).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

/// Mean vector and covariance matrix of an m-mode Gaussian state.
///
/// Construction validates symmetry, shape and the uncertainty principle, so a
/// GaussianState value is always physical.
class GaussianState {
 public:
  GaussianState(Vector mean, Matrix cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
    if (cov_.rows() != cov_.cols() || cov_.rows() == 0 || cov_.rows() % 2 != 0)
      throw DomainError("covariance must be a non-empty 2m x 2m matrix");
    mode_count_ = static_cast<int>(cov_.rows()) / 2;
    if (mean_.size() != cov_.rows()) throw DomainError("mean must have length 2 * mode_count");
    if (!mean_.allFinite() || !cov_.allFinite()) throw DomainError("state entries must be finite");
    const double scale = detail::scale_of(cov_);
    if (detail::max_abs(cov_ - cov_.transpose()) > kSymmetryTolerance * scale)
      throw DomainError("covariance is not symmetric");
    cov_ = 0.5 * (cov_ + cov_.transpose());
    if (uncertainty_margin(cov_) < -kPhysicalityTolerance * scale)
      throw PhysicalityError("covariance violates the uncertainty principle");
  }

  static GaussianState vacuum(int mode_count) {
    if (mode_count < 1) throw DomainError("mode_count must be positive");
    return {Vector::Zero(2 * mode_count), 0.5 * Matrix::Identity(2 * mode_count, 2 * mode_count)};
  }

  int mode_count() const { return mode_count_; }
  const Vector& mean() const { return mean_; }
  const Matrix& cov() const { return cov_; }

 private:
  int mode_count_ = 0;
  Vector mean_;
  Matrix cov_;
};

inline bool is_physical(const Matrix& cov) {
  if (cov.rows() != cov.cols() || cov.rows() % 2 != 0) return false;
  const double scale = detail::scale_of(cov);
  if (detail::max_abs(cov - cov.transpose()) > kSymmetryTolerance * scale) return false;
  return uncertainty_margin(cov) >= -kPhysicalityTolerance * scale;
}

/// Mean photon number of one mode: (Σ_qq + Σ_pp - 1)/2 + (μ_q² + μ_p²)/2.
inline double mean_photon_number(const GaussianState& state, int mode) {
  const int m = state.mode_count();
  if (mode < 0 || mode >= m) throw DomainError("mode index out of range");
  const auto& c = state.cov();
  const auto& mu = state.mean();
  return 0.5 * (c(mode, mode) + c(mode + m, mode + m) - 1.0) +
         0.5 * (mu(mode) * mu(mode) + mu(mode + m) * mu(mode + m));
}

/// Total photon number over all modes: (tr Σ - m)/2 + |μ|²/2.
inline double total_photon_number(const GaussianState& state) {
  return 0.5 * (state.cov().trace() - state.mode_count()) + 0.5 * state.mean().squaredNorm();
}

/// Two-mode squeezed vacuum with n_bar photons per mode; mode 0 is the signal.
inline GaussianState make_tmsv(double n_bar) {
  detail::require(std::isfinite(n_bar) && n_bar >= 0.0, "make_tmsv: n_bar must be >= 0");
  const double mu1 = n_bar + 0.5;
  const double mu2 = std::sqrt(n_bar * (n_bar + 1.0));
  Matrix cov(4, 4);
  cov << mu1, mu2, 0, 0,
         mu2, mu1, 0, 0,
         0, 0, mu1, -mu2,
         0, 0, -mu2, mu1;
  return {Vector::Zero(4), cov};
}

/// Coherent state |√n̄⟩ with the displacement on the q quadrature.
inline GaussianState make_coherent(double n_bar) {
  detail::require(std::isfinite(n_bar) && n_bar >= 0.0, "make_coherent: n_bar must be >= 0");
  Vector mean(2);
  mean << std::sqrt(2.0 * n_bar), 0.0;
  return {mean, 0.5 * Matrix::Identity(2, 2)};
}

/// Squeezed coherent state |x; r⟩: q variance e^{-2r}/2, mean √2 x on q.
inline GaussianState make_squeezed_coherent(double x, double r) {
  detail::require(std::isfinite(x) && std::isfinite(r), "make_squeezed_coherent: non-finite input");
  Vector mean(2);
  mean << std::sqrt(2.0) * x, 0.0;
  Matrix cov = Matrix::Zero(2, 2);
  cov(0, 0) = 0.5 * std::exp(-2.0 * r);
  cov(1, 1) = 0.5 * std::exp(2.0 * r);
  return {mean, cov};
}

/// TMSV carrying κn̄ photons per mode with the signal displaced by (1-κ)n̄ photons.
inline GaussianState make_displaced_tmsv(double n_bar, double kappa) {
  detail::require(std::isfinite(kappa) && kappa >= 0.0 && kappa <= 1.0,
                  "make_displaced_tmsv: kappa must lie in [0, 1]");
  detail::require(std::isfinite(n_bar) && n_bar >= 0.0, "make_displaced_tmsv: n_bar must be >= 0");
  const GaussianState squeezed = make_tmsv(kappa * n_bar);
  Vector mean = Vector::Zero(4);
  mean(0) = std::sqrt(2.0 * (1.0 - kappa) * n_bar);
  return {mean, squeezed.cov()};
}

/// Direct sum a ⊕ b, with the modes of a first (quadrature ordering preserved).
inline GaussianState tensor_product(const GaussianState& a, const GaussianState& b) {
  const int ma = a.mode_count();
  const int mb = b.mode_count();
  const int m = ma + mb;
  // position of quadrature i of each factor in the combined qq..pp ordering
  auto index_a = [&](int i) { return i < ma ? i : m + (i - ma); };
  auto index_b = [&](int i) { return i < mb ? ma + i : m + ma + (i - mb); };
  Vector mean = Vector::Zero(2 * m);
  Matrix cov = Matrix::Zero(2 * m, 2 * m);
  for (int i = 0; i < 2 * ma; ++i) {
    mean(index_a(i)) = a.mean()(i);
    for (int j = 0; j < 2 * ma; ++j) cov(index_a(i), index_a(j)) = a.cov()(i, j);
  }
  for (int i = 0; i < 2 * mb; ++i) {
    mean(index_b(i)) = b.mean()(i);
    for (int j = 0; j < 2 * mb; ++j) cov(index_b(i), index_b(j)) = b.cov()(i, j);
  }
  return {mean, cov};
}

/// Gaussian unitary x -> S x + d applied to a state.
inline GaussianState apply_symplectic(const GaussianState& state, const Matrix& s, const Vector& shift) {
  if (s.rows() != state.cov().rows() || s.cols() != state.cov().cols() || shift.size() != state.mean().size())
    throw DomainError("apply_symplectic: dimension mismatch");
  return {s * state.mean() + shift, s * state.cov() * s.transpose()};
}

/// Lossy thermal-noise channel on one mode: Σ -> XΣXᵀ + Y with X = √η on that
/// mode and Y = (n̄_B + 1/2)(1 - η) on its diagonal.
inline GaussianState apply_lossy_thermal(const GaussianState& state, int mode, double eta, double n_bar_B) {
  const int m = state.mode_count();
  if (mode < 0 || mode >= m) throw DomainError("apply_lossy_thermal: mode index out of range");
  detail::require(std::isfinite(eta) && eta >= 0.0 && eta <= 1.0, "apply_lossy_thermal: eta must lie in [0, 1]");
  detail::require(std::isfinite(n_bar_B) && n_bar_B >= 0.0, "apply_lossy_thermal: n_bar_B must be >= 0");
  const double gain = std::sqrt(eta);
  Vector mean = state.mean();
  Matrix cov = state.cov();
  for (int idx : {mode, mode + m}) {
    mean(idx) *= gain;
    cov.row(idx) *= gain;
    cov.col(idx) *= gain;
  }
  const double added = (n_bar_B + 0.5) * (1.0 - eta);
  cov(mode, mode) += added;
  cov(mode + m, mode + m) += added;
  return {mean, cov};
}

/// Two-mode squeezer and thermal occupancies diagonalizing a TMSV-pattern covariance.
struct TwoModeStandardForm {
  double nu = 0.0;    // squeezer coefficient; carries the sign of w12
  double n_t1 = 0.0;  // thermal occupancy of mode 1 (signal)
  double n_t2 = 0.0;  // thermal occupancy of mode 2 (idler)
};

/// Symplectic matrix of a two-mode squeezer with coefficient ν = sinh r.
inline Matrix tms_symplectic(double nu) {
  const double c = std::sqrt(nu * nu + 1.0);
  Matrix l(4, 4);
  l << c, nu, 0, 0,
       nu, c, 0, 0,
       0, 0, c, -nu,
       0, 0, -nu, c;
  return l;
}

namespace detail {

inline double clamp_occupancy(double n, const char* what) {
  if (n >= 0.0) return n;
  if (n >= -kOccupancyClamp) return 0.0;
  throw PhysicalityError(std::string(what) + " is negative beyond tolerance");
}

struct TmsvBlocks {
  double w11, w22, w12;
};

inline TmsvBlocks tmsv_blocks(const GaussianState& state) {
  if (state.mode_count() != 2) throw StructuralError("expected a two-mode state");
  const Matrix& c = state.cov();
  const double tol = kStructureTolerance * scale_of(c);
  if (state.mean().cwiseAbs().maxCoeff() > tol) throw StructuralError("expected a zero-mean state");
  const double w11 = c(0, 0), w22 = c(1, 1), w12 = c(0, 1);
  const bool pattern = std::abs(c(2, 2) - w11) <= tol && std::abs(c(3, 3) - w22) <= tol &&
                       std::abs(c(2, 3) + w12) <= tol && c.topRightCorner(2, 2).cwiseAbs().maxCoeff() <= tol;
  if (!pattern) throw StructuralError("covariance does not have the (w11, w22, ±w12) block pattern");
  return {w11, w22, w12};
}

}  // namespace detail

/// Standard form of a zero-mean two-mode state whose covariance has the
/// [[w11, w12], [w12, w22]] ⊕ [[w11, -w12], [-w12, w22]] pattern.
inline TwoModeStandardForm two_mode_standard_form(const GaussianState& state) {
  const auto [w11, w22, w12] = detail::tmsv_blocks(state);
  const double sum = w11 + w22;
  const double disc = sum * sum - 4.0 * w12 * w12;
  if (disc <= 0.0) throw PhysicalityError("two_mode_standard_form: (w11 + w22)^2 <= 4 w12^2");
  const double a = std::sqrt(disc);
  const double nu = std::copysign(std::sqrt(std::max(0.0, 0.5 * (sum / a - 1.0))), w12);
  return {nu, detail::clamp_occupancy(0.5 * (a + w11 - w22 - 1.0), "n_t1"),
          detail::clamp_occupancy(0.5 * (a + w22 - w11 - 1.0), "n_t2")};
}

/// Standard form of the TMSV output after the signal passes a lossy thermal
/// channel, written to avoid cancellation when n̄_B(1-η) is tiny.
inline TwoModeStandardForm tmsv_output_standard_form(double n_bar, double eta, double n_bar_B) {
  detail::require(std::isfinite(n_bar) && n_bar >= 0.0, "n_bar must be >= 0");
  detail::require(std::isfinite(eta) && eta >= 0.0 && eta <= 1.0, "eta must lie in [0, 1]");
  detail::require(std::isfinite(n_bar_B) && n_bar_B >= 0.0, "n_bar_B must be >= 0");
  const double noise = n_bar_B * (1.0 - eta);
  const double s0 = (1.0 + eta) * n_bar + 1.0;  // w11 + w22 without noise
  const double a0 = (1.0 - eta) * n_bar + 1.0;  // a without noise
  const double a = std::sqrt(a0 * a0 + 2.0 * s0 * noise + noise * noise);
  const double excess = (2.0 * s0 * noise + noise * noise) / (a + a0);  // a - a0
  return {std::sqrt(std::max(0.0, (s0 + noise - a) / (2.0 * a))), 0.5 * (excess + noise),
          0.5 * (excess - noise) + (1.0 - eta) * n_bar};
}

/// Occupancy of mode 1 after undoing a two-mode squeezer L(ν) and tracing mode 2.
inline double reduced_thermal_occupancy(const GaussianState& state, double nu) {
  detail::tmsv_blocks(state);
  const Matrix l = tms_symplectic(-nu);
  const Matrix c = l * state.cov() * l.transpose();
  const double tol = kStructureTolerance * detail::scale_of(c);
  if (std::abs(c(0, 0) - c(2, 2)) > tol || std::abs(c(0, 2)) > tol)
    throw StructuralError("reduced covariance is not thermal-diagonal");
  return detail::clamp_occupancy(0.5 * (c(0, 0) + c(2, 2)) - 0.5, "reduced occupancy");
}

}  // namespace qchange
