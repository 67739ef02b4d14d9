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

#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qnet/gaussian.hpp"

namespace qnet::sharing {

// Quadrature variances of the secret mode.
struct SecretVariances {
  double vx = 1.0;
  double vp = 1.0;
};

// Network a_net = U a_sqz. The last squeezer column carries the secret; the
// other columns are p-squeezed resource modes. The dealer measures p of
// network mode `dealer_index`; every other network mode is a player.
struct SharingNetwork {
  ModeUnitary unitary;
  int dealer_index = 5;
  SecretVariances secret;

  int modes() const { return unitary.modes(); }
  int secret_column() const { return modes() - 1; }
  std::vector<int> players() const;
  void validate() const;
};

// The printed six-mode network (4-decimal entries, not exactly unitary).
Matrix u6se_printed_real();
Matrix u6se_printed_imag();
// Printed matrices re-unitarized by polar projection.
ModeUnitary u6se();
SharingNetwork default_network();

// Coefficients of one reconstructed quadrature:
//   sum_i player_x[i] x_net_i + player_p[i] p_net_i + dealer p_net_dealer
//   = secret quadrature + sum_j leakage[j] p_sqz_j  (j over resource columns)
struct QuadratureReconstruction {
  Vector player_x;
  Vector player_p;
  double dealer = 0.0;
  Vector leakage;
  // Largest deviation from the target after substituting back into the full
  // quadrature relations (anti-squeezed coefficients -> 0, target -> 1,
  // conjugate secret quadrature -> 0).
  double constraint_residual = 0.0;
};

struct AccessSolution {
  std::vector<int> party;
  int pivot = -1;  // anti-squeezed quadrature eliminated with the dealer relation
  QuadratureReconstruction x;  // (m_i, n_i, C) and a_i
  QuadratureReconstruction p;  // (p_i, q_i, D) and b_i
};

// Eliminates one anti-squeezed quadrature through the dealer's p relation and
// solves the remaining square system for both secret quadratures. The pivot
// defaults to the resource column with the largest |dealer Y| entry. Throws
// SingularSystem when the system is rank deficient, InputError for a bad
// party (duplicates, dealer included, wrong size for a square system).
AccessSolution access_party_solve(const SharingNetwork& net, std::span<const int> party,
                                  std::optional<int> pivot = std::nullopt);

struct PairCertificate {
  std::array<int, 2> pair{};
  double x_residual = 0.0;  // least-squares residual of the x-reconstruction constraints
  double p_residual = 0.0;
  // Neither quadrature is recoverable when this exceeds the threshold.
  double residual() const { return std::min(x_residual, p_residual); }
  bool infeasible(double threshold = 1e-6) const { return residual() > threshold; }
};

PairCertificate pair_infeasibility(const SharingNetwork& net, std::span<const int> pair);

// diag(vx + sum a_j^2 s_j, vp + sum b_j^2 s_j); `resource` holds the p-variances
// of the resource columns in column order.
Eigen::Matrix2d reconstructed_covariance(const AccessSolution& solution, const SqueezingProfile& resource,
                                         SecretVariances secret);

// Gaussian fidelity 2 / (sqrt(A + B) - sqrt(B)) * exp(-alpha^T (Vs + Vr)^-1 alpha),
// A = det(Vs + Vr), B = (det Vs - 1)(det Vr - 1). alpha is in amplitude
// units: the quadrature-mean difference is sqrt(2) * alpha. Throws InputError
// for a non-positive-definite input.
double fidelity(const Eigen::Matrix2d& secret, const Eigen::Matrix2d& reconstructed,
                const Eigen::Vector2d& alpha = Eigen::Vector2d::Zero());

struct PartyFidelity {
  std::vector<int> party;
  double var_x;
  double var_p;
  double fidelity;
};

// All access parties of size three, in lexicographic order. The first
// modes() - 1 entries of the sorted profile feed the resource columns; the
// coherent secret (V_s = I) and the resource see uniform loss `loss`.
std::vector<PartyFidelity> protocol_run(const SharingNetwork& net, const SqueezingProfile& profile,
                                        double loss = 0.0, int threads = 1);

struct FidelitySweepRow {
  double leading_db;
  double f_min;
  double f_avg;
  double f_max;
};

// 0 to -15 dB in 31 points.
std::vector<double> default_sweep_grid(int points = 31, double last_db = -15.0);

// protocol_run on `base` rescaled (common dB factor) to each leading value.
std::vector<FidelitySweepRow> sweep_fidelity(const SharingNetwork& net, const SqueezingProfile& base,
                                             std::span<const double> leading_db, double loss = 0.0,
                                             int threads = 1);

}  // namespace qnet::sharing
