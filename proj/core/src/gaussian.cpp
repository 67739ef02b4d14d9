// Copyright 2026 The qnet Authors
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

#include "qnet/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <fmt/format.h>

namespace qnet {
namespace {

double scale_of(const Matrix& m) { return std::max(1.0, m.cwiseAbs().maxCoeff()); }

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InputError(fmt::format("{} must be a non-empty square matrix, got {}x{}", what,
                                 m.rows(), m.cols()));
  }
}

}  // namespace

Matrix symplectic_form(int modes) {
  Matrix omega = Matrix::Zero(2 * modes, 2 * modes);
  omega.topRightCorner(modes, modes).setIdentity();
  omega.bottomLeftCorner(modes, modes) = -Matrix::Identity(modes, modes);
  return omega;
}

double db_to_variance(double db) { return std::pow(10.0, db / 10.0); }

double variance_to_db(double variance) {
  if (!(variance > 0.0)) {
    throw InputError(fmt::format("variance must be positive, got {}", variance));
  }
  return 10.0 * std::log10(variance);
}

// ---------------------------------------------------------------------------
// CovarianceMatrix

CovarianceMatrix::CovarianceMatrix(Matrix data) {
  require_square(data, "covariance matrix");
  if (data.rows() % 2 != 0) {
    throw InputError(fmt::format("covariance matrix dimension {} is odd", data.rows()));
  }
  if (!data.allFinite()) throw InputError("covariance matrix has non-finite entries");
  const double scale = scale_of(data);
  const double asym = (data - data.transpose()).cwiseAbs().maxCoeff();
  if (asym > kStructuralTolerance * scale) {
    throw InputError(fmt::format("covariance matrix is not symmetric (max asymmetry {:.3e})", asym));
  }
  modes_ = static_cast<int>(data.rows() / 2);
  data_ = 0.5 * (data + data.transpose());
  const double margin = uncertainty_margin();
  if (margin < -kUncertaintyTolerance * scale) {
    throw InputError(fmt::format(
        "covariance matrix violates the uncertainty bound (min eigenvalue of V + i*Omega = {:.3e})",
        margin));
  }
}

CovarianceMatrix CovarianceMatrix::vacuum(int modes) {
  if (modes < 1) throw InputError("mode count must be positive");
  return CovarianceMatrix(Matrix::Identity(2 * modes, 2 * modes));
}

CovarianceMatrix CovarianceMatrix::squeezed(std::span<const double> p_variances) {
  const auto n = static_cast<Eigen::Index>(p_variances.size());
  if (n == 0) throw InputError("squeezed state needs at least one mode");
  Matrix v = Matrix::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = p_variances[static_cast<std::size_t>(i)];
    if (!(s > 0.0)) throw InputError(fmt::format("p-variance {} of mode {} is not positive", s, i));
    v(i, i) = 1.0 / s;
    v(n + i, n + i) = s;
  }
  return CovarianceMatrix(std::move(v));
}

double CovarianceMatrix::uncertainty_margin() const {
  const ComplexMatrix h =
      data_.cast<std::complex<double>>() + std::complex<double>(0.0, 1.0) * symplectic_form(modes_);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------
// ModeUnitary

double unitarity_residual(const ComplexMatrix& u) {
  const auto n = u.rows();
  return (u * u.adjoint() - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

ComplexMatrix nearest_unitary(const ComplexMatrix& u) {
  Eigen::JacobiSVD<ComplexMatrix> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

ModeUnitary::ModeUnitary(ComplexMatrix u) : u_(std::move(u)) {
  if (u_.rows() != u_.cols() || u_.rows() == 0) {
    throw InputError(
        fmt::format("unitary must be a non-empty square matrix, got {}x{}", u_.rows(), u_.cols()));
  }
  if (!u_.allFinite()) throw InputError("unitary has non-finite entries");
  const double residual = unitarity_residual(u_);
  if (residual > kInputTolerance) {
    throw InputError(fmt::format("matrix is not unitary: residual max |U U^dag - I| = {:.3e}", residual));
  }
}

ModeUnitary ModeUnitary::from_parts(const Matrix& real, const Matrix& imag) {
  if (real.rows() != imag.rows() || real.cols() != imag.cols()) {
    throw InputError("real and imaginary parts differ in shape");
  }
  ComplexMatrix u(real.rows(), real.cols());
  u.real() = real;
  u.imag() = imag;
  return ModeUnitary(std::move(u));
}

ModeUnitary ModeUnitary::identity(int modes) {
  return ModeUnitary(ComplexMatrix::Identity(modes, modes));
}

ModeUnitary ModeUnitary::adjoint() const { return ModeUnitary(u_.adjoint()); }

ModeUnitary ModeUnitary::operator*(const ModeUnitary& rhs) const {
  if (modes() != rhs.modes()) throw InputError("unitary dimension mismatch");
  return ModeUnitary(u_ * rhs.u_);
}

// ---------------------------------------------------------------------------
// SymplecticMatrix

double symplectic_residual(const Matrix& s) {
  const int n = static_cast<int>(s.rows() / 2);
  const Matrix omega = symplectic_form(n);
  return (s * omega * s.transpose() - omega).cwiseAbs().maxCoeff();
}

SymplecticMatrix::SymplecticMatrix(Matrix data) : data_(std::move(data)) {
  require_square(data_, "symplectic matrix");
  if (data_.rows() % 2 != 0) throw InputError("symplectic matrix dimension is odd");
  const double residual = symplectic_residual(data_);
  if (residual > kInputTolerance * scale_of(data_)) {
    throw InputError(fmt::format("matrix is not symplectic: max |S Omega S^T - Omega| = {:.3e}",
                                 residual));
  }
}

SymplecticMatrix SymplecticMatrix::identity(int modes) {
  return SymplecticMatrix(Matrix::Identity(2 * modes, 2 * modes));
}

// ---------------------------------------------------------------------------
// SqueezingProfile

SqueezingProfile::SqueezingProfile(std::vector<double> variances) : variances_(std::move(variances)) {
  for (std::size_t i = 0; i < variances_.size(); ++i) {
    if (!(variances_[i] > 0.0) || !std::isfinite(variances_[i])) {
      throw InputError(fmt::format("profile entry {} = {} is not a positive variance", i, variances_[i]));
    }
  }
}

SqueezingProfile SqueezingProfile::from_db(std::span<const double> db) {
  std::vector<double> v;
  v.reserve(db.size());
  for (double d : db) {
    if (!std::isfinite(d)) throw InputError("profile dB value is not finite");
    v.push_back(db_to_variance(d));
  }
  return SqueezingProfile(std::move(v));
}

SqueezingProfile SqueezingProfile::uniform(int modes, double variance) {
  return SqueezingProfile(std::vector<double>(static_cast<std::size_t>(modes), variance));
}

std::vector<double> SqueezingProfile::db() const {
  std::vector<double> out;
  out.reserve(variances_.size());
  for (double v : variances_) out.push_back(variance_to_db(v));
  return out;
}

SqueezingProfile SqueezingProfile::sorted() const {
  std::vector<double> v = variances_;
  std::stable_sort(v.begin(), v.end());
  return SqueezingProfile(std::move(v));
}

SqueezingProfile SqueezingProfile::leading(int count) const {
  if (count < 0 || count > size()) {
    throw InputError(fmt::format("profile has {} entries, {} requested", size(), count));
  }
  std::vector<double> v = sorted().variances_;
  v.resize(static_cast<std::size_t>(count));
  return SqueezingProfile(std::move(v));
}

int SqueezingProfile::squeezed_count(double tolerance) const {
  return static_cast<int>(
      std::count_if(variances_.begin(), variances_.end(), [&](double v) { return v < 1.0 - tolerance; }));
}

// ---------------------------------------------------------------------------
// Operations

SymplecticMatrix unitary_to_symplectic(const ModeUnitary& u) {
  const int n = u.modes();
  const Matrix x = u.real();
  const Matrix y = u.imag();
  Matrix s(2 * n, 2 * n);
  s << x, -y, y, x;
  return SymplecticMatrix(std::move(s));
}

CovarianceMatrix apply_symplectic(const SymplecticMatrix& s, const CovarianceMatrix& v) {
  if (s.modes() != v.modes()) {
    throw InputError(fmt::format("symplectic matrix acts on {} modes, state has {}", s.modes(), v.modes()));
  }
  Matrix out = s.data() * v.data() * s.data().transpose();
  return CovarianceMatrix(0.5 * (out + out.transpose()));
}

CovarianceMatrix apply_loss(const CovarianceMatrix& v, std::span<const double> eta) {
  const int n = v.modes();
  if (static_cast<int>(eta.size()) != n) {
    throw InputError(fmt::format("loss vector has {} entries for {} modes", eta.size(), n));
  }
  Vector g(2 * n);
  for (int i = 0; i < n; ++i) {
    const double e = eta[static_cast<std::size_t>(i)];
    if (!(e >= 0.0 && e <= 1.0)) throw InputError(fmt::format("loss {} of mode {} outside [0, 1]", e, i));
    g(i) = g(n + i) = std::sqrt(1.0 - e);
  }
  Matrix out = g.asDiagonal() * v.data() * g.asDiagonal();
  out.diagonal() += (Vector::Ones(2 * n) - g.cwiseAbs2()) * kVacuumVariance;
  return CovarianceMatrix(std::move(out));
}

CovarianceMatrix apply_loss(const CovarianceMatrix& v, double eta) {
  const std::vector<double> per_mode(static_cast<std::size_t>(v.modes()), eta);
  return apply_loss(v, per_mode);
}

double quadrature_variance(const CovarianceMatrix& v, const Vector& u) {
  if (u.size() != v.data().rows()) {
    throw InputError(fmt::format("quadrature vector has length {}, expected {}", u.size(), v.data().rows()));
  }
  return u.dot(v.data() * u);
}

namespace {

// Deterministic orthonormal basis of span(q): project e_0, e_1, ... in turn
// and keep whatever is left after removing earlier picks.
Matrix canonical_subspace_basis(const Matrix& q) {
  const auto n = q.rows();
  const auto k = q.cols();
  Matrix out(n, k);
  Eigen::Index found = 0;
  for (Eigen::Index i = 0; i < n && found < k; ++i) {
    Vector v = q * q.row(i).transpose();
    for (Eigen::Index j = 0; j < found; ++j) v -= out.col(j).dot(v) * out.col(j);
    const double norm = v.norm();
    if (norm > 1e-6) out.col(found++) = v / norm;
  }
  return out;
}

void fix_sign(Eigen::Ref<Vector> v) {
  const double peak = v.cwiseAbs().maxCoeff();
  Eigen::Index arg = 0;
  while (std::abs(v(arg)) < peak - 1e-9) ++arg;
  if (v(arg) < 0.0) v = -v;
}

}  // namespace

EigenmodeDecomposition eigenmode_extract(const CovarianceMatrix& v) {
  const int n = v.modes();
  const Matrix cp = v.p_block();
  const Matrix cx = v.x_block();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(cp);
  const Vector values = solver.eigenvalues();
  Matrix vectors = solver.eigenvectors();

  const double tie = 1e-9 * std::max(1.0, values.cwiseAbs().maxCoeff());
  std::vector<double> sorted_values(values.data(), values.data() + n);
  for (int start = 0; start < n;) {
    int stop = start + 1;
    while (stop < n && values(stop) - values(stop - 1) <= tie) ++stop;
    const int width = stop - start;
    Matrix block = vectors.middleCols(start, width);
    if (width > 1) block = canonical_subspace_basis(block);
    for (int c = 0; c < width; ++c) fix_sign(block.col(c));
    std::vector<int> order(static_cast<std::size_t>(width));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      for (int r = 0; r < n; ++r) {
        if (std::abs(block(r, a) - block(r, b)) > 1e-12) return block(r, a) > block(r, b);
      }
      return a < b;
    });
    for (int c = 0; c < width; ++c) vectors.col(start + c) = block.col(order[static_cast<std::size_t>(c)]);
    start = stop;
  }

  Matrix rotated_x = vectors.transpose() * cx * vectors;
  rotated_x.diagonal().setZero();
  ComplexMatrix basis = vectors.transpose().cast<std::complex<double>>();
  return EigenmodeDecomposition{ModeUnitary(std::move(basis)), SqueezingProfile(std::move(sorted_values)),
                                rotated_x.norm()};
}

}  // namespace qnet
