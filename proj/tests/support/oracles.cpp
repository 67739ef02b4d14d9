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

#include "oracles.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace qnet::testing {

Matrix symplectic_by_action(const ComplexMatrix& u) {
  const Eigen::Index n = u.rows();
  Matrix s(2 * n, 2 * n);
  const std::complex<double> i(0.0, 1.0);
  for (Eigen::Index j = 0; j < 2 * n; ++j) {
    ComplexVector a = ComplexVector::Zero(n);
    a(j % n) = j < n ? std::complex<double>(1.0) : i;
    const ComplexVector b = u * a;
    s.col(j) << b.real(), b.imag();
  }
  return s;
}

Matrix loss_by_dilation(const Matrix& v, const std::vector<double>& eta) {
  const Eigen::Index n = v.rows() / 2;
  // Modes (system 0..n-1, environment n..2n-1).
  ComplexMatrix bs = ComplexMatrix::Zero(2 * n, 2 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double t = std::sqrt(1.0 - eta[static_cast<std::size_t>(k)]);
    const double r = std::sqrt(eta[static_cast<std::size_t>(k)]);
    bs(k, k) = t;
    bs(k, n + k) = r;
    bs(n + k, k) = -r;
    bs(n + k, n + k) = t;
  }
  Matrix total = Matrix::Identity(4 * n, 4 * n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      total(r, c) = v(r, c);
      total(r, 2 * n + c) = v(r, n + c);
      total(2 * n + r, c) = v(n + r, c);
      total(2 * n + r, 2 * n + c) = v(n + r, n + c);
    }
  }
  const Matrix s = symplectic_by_action(bs);
  const Matrix out = s * total * s.transpose();
  Matrix reduced(2 * n, 2 * n);
  for (Eigen::Index r = 0; r < 2 * n; ++r) {
    for (Eigen::Index c = 0; c < 2 * n; ++c) {
      const Eigen::Index rr = r < n ? r : n + r;
      const Eigen::Index cc = c < n ? c : n + c;
      reduced(r, c) = out(rr, cc);
    }
  }
  return reduced;
}

GaussianSampler::GaussianSampler(const Matrix& covariance) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(covariance);
  const Vector root = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  root_ = solver.eigenvectors() * root.asDiagonal();
}

Vector GaussianSampler::draw(Rng& rng) const {
  std::normal_distribution<double> normal;
  Vector z(root_.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
  return root_ * z;
}

SampleEstimate sampled_variance(const Matrix& covariance, const Vector& u, int samples, Rng& rng) {
  const GaussianSampler sampler(covariance);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double value = u.dot(sampler.draw(rng));
    sum += value;
    sum_sq += value * value;
  }
  const double n = samples;
  const double var = (sum_sq - sum * sum / n) / (n - 1.0);
  return {var, var * std::sqrt(2.0 / (n - 1.0))};
}

double nullifier_by_propagation(const cluster::Graph& graph, const ComplexMatrix& u, const Matrix& squeezer_cov,
                                int node) {
  const int n = graph.size();
  Vector w = Vector::Zero(2 * n);
  w(n + node) = 1.0;
  for (int j = 0; j < n; ++j) w(j) -= graph.adjacency()(node, j);
  const Vector pulled = symplectic_by_action(u).transpose() * w;
  return pulled.dot(squeezer_cov * pulled);
}

Matrix pure_squeezer_covariance(const SqueezingProfile& profile, int modes) {
  const SqueezingProfile lead = profile.leading(modes);
  Matrix v = Matrix::Zero(2 * modes, 2 * modes);
  for (int j = 0; j < modes; ++j) {
    v(j, j) = 1.0 / lead[static_cast<std::size_t>(j)];
    v(modes + j, modes + j) = lead[static_cast<std::size_t>(j)];
  }
  return v;
}

double linear_objective_optimum(const cluster::Graph& graph, const SqueezingProfile& profile) {
  const int n = graph.size();
  const Matrix a = Matrix::Identity(n, n) + graph.adjacency() * graph.adjacency();
  Vector lambda = Eigen::SelfAdjointEigenSolver<Matrix>(a).eigenvalues();  // ascending
  std::vector<double> s = profile.leading(n).variances();
  std::sort(s.begin(), s.end());
  double total = 0.0;
  for (int j = 0; j < n; ++j) total += lambda(n - 1 - j) * s[static_cast<std::size_t>(j)];
  return total / n;
}

double rotation_objective(const cluster::Graph& graph, const SqueezingProfile& profile, double theta,
                          cluster::Objective objective) {
  Matrix r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  const ComplexMatrix u = cluster::cluster_unitary(graph).matrix() * r.cast<std::complex<double>>();
  const Matrix cov = pure_squeezer_covariance(profile, 2);
  const Vector ref = graph.vacuum_references();
  double total = 0.0;
  for (int k = 0; k < 2; ++k) {
    const double v = nullifier_by_propagation(graph, u, cov, k);
    total += objective == cluster::Objective::kLinearMean ? v : 10.0 * std::log10(v / ref(k));
  }
  return total / 2.0;
}

double brute_force_rotation(const cluster::Graph& graph, const SqueezingProfile& profile,
                            cluster::Objective objective, int points) {
  const double step = 2.0 * std::numbers::pi / points;
  double best = rotation_objective(graph, profile, 0.0, objective);
  int best_k = 0;
  for (int k = 1; k < points; ++k) {
    const double v = rotation_objective(graph, profile, k * step, objective);
    if (v < best) {
      best = v;
      best_k = k;
    }
  }
  double lo = (best_k - 1) * step;
  double hi = (best_k + 1) * step;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double a = hi - g * (hi - lo);
    const double b = lo + g * (hi - lo);
    if (rotation_objective(graph, profile, a, objective) < rotation_objective(graph, profile, b, objective)) {
      hi = b;
    } else {
      lo = a;
    }
  }
  return std::min(best, rotation_objective(graph, profile, 0.5 * (lo + hi), objective));
}

namespace {

Matrix combination_columns(const Matrix& s, int n, int dealer, const std::vector<int>& party) {
  const int k = static_cast<int>(party.size());
  Matrix m(2 * n, 2 * k + 1);
  for (int c = 0; c < k; ++c) {
    m.col(c) = s.row(party[static_cast<std::size_t>(c)]).transpose();
    m.col(k + c) = s.row(n + party[static_cast<std::size_t>(c)]).transpose();
  }
  m.col(2 * k) = s.row(n + dealer).transpose();
  return m;
}

}  // namespace

SharingOracle sharing_least_squares(const ComplexMatrix& u, int dealer, const std::vector<int>& party,
                                    bool x_quadrature) {
  const int n = static_cast<int>(u.rows());
  const Matrix s = symplectic_by_action(u);
  const Matrix m = combination_columns(s, n, dealer, party);
  Matrix a(n + 1, m.cols());
  Vector b = Vector::Zero(n + 1);
  for (int j = 0; j < n - 1; ++j) a.row(j) = m.row(j);
  a.row(n - 1) = m.row(n - 1);
  a.row(n) = m.row(2 * n - 1);
  b(x_quadrature ? n - 1 : n) = 1.0;
  const Vector z = Eigen::CompleteOrthogonalDecomposition<Matrix>(a).solve(b);
  return {z, m * z, (a * z - b).norm()};
}

SampleEstimate sampled_reconstruction(const ComplexMatrix& u, int dealer, const std::vector<int>& party,
                                      const sharing::QuadratureReconstruction& coeffs,
                                      const std::vector<double>& resource, sharing::SecretVariances secret,
                                      int samples, Rng& rng) {
  const int n = static_cast<int>(u.rows());
  const Matrix s = symplectic_by_action(u);
  const int k = static_cast<int>(party.size());
  Vector z(2 * k + 1);
  z << coeffs.player_x, coeffs.player_p, coeffs.dealer;
  const Vector w = combination_columns(s, n, dealer, party) * z;  // on squeezer quadratures

  Vector sd(2 * n);
  for (int j = 0; j < n - 1; ++j) {
    sd(j) = std::sqrt(1.0 / resource[static_cast<std::size_t>(j)]);
    sd(n + j) = std::sqrt(resource[static_cast<std::size_t>(j)]);
  }
  sd(n - 1) = std::sqrt(secret.vx);
  sd(2 * n - 1) = std::sqrt(secret.vp);

  std::normal_distribution<double> normal;
  Vector q(2 * n);
  double sum_sq = 0.0;
  for (int t = 0; t < samples; ++t) {
    for (int i = 0; i < 2 * n; ++i) q(i) = sd(i) * normal(rng);
    const double value = w.dot(q);
    sum_sq += value * value;
  }
  const double var = sum_sq / samples;
  return {var, var * std::sqrt(2.0 / samples)};
}

double wigner_overlap(const Eigen::Matrix2d& v1, const Eigen::Matrix2d& v2, const Eigen::Vector2d& alpha, int grid,
                      double half_width) {
  auto wigner = [](const Eigen::Matrix2d& v, const Eigen::Vector2d& q) {
    return std::exp(-0.5 * q.dot(v.inverse() * q)) / (2.0 * std::numbers::pi * std::sqrt(v.determinant()));
  };
  const double h = 2.0 * half_width / (grid - 1);
  double total = 0.0;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const Eigen::Vector2d q(-half_width + i * h, -half_width + j * h);
      total += wigner(v1, q) * wigner(v2, q - alpha);
    }
  }
  return 4.0 * std::numbers::pi * total * h * h;
}

}  // namespace qnet::testing
