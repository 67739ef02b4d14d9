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

#include "qnet/secret_sharing.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/SVD>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "parallel.hpp"
#include "qnet/resource.hpp"

namespace qnet::sharing {

namespace {

// Relative singular-value floor below which an elimination system counts as
// rank deficient.
constexpr double kRankTolerance = 1e-10;

Matrix printed(const double (&rows)[6][6]) {
  Matrix m(6, 6);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

// Unknown z = (m_1..m_k, n_1..n_k, C) multiplies the columns of M, whose rows
// are the squeezer quadratures (x_sqz_0..x_sqz_{n-1}, p_sqz_0..p_sqz_{n-1}).
//   x_net_i = sum_j X_ij x_j - Y_ij p_j,   p_net_i = sum_j Y_ij x_j + X_ij p_j.
Matrix relation_matrix(const SharingNetwork& net, std::span<const int> party) {
  const int n = net.modes();
  const int k = static_cast<int>(party.size());
  const Matrix x = net.unitary.real();
  const Matrix y = net.unitary.imag();
  Matrix m(2 * n, 2 * k + 1);
  for (int c = 0; c < k; ++c) {
    const int i = party[static_cast<std::size_t>(c)];
    m.col(c) << x.row(i).transpose(), -y.row(i).transpose();
    m.col(k + c) << y.row(i).transpose(), x.row(i).transpose();
  }
  const int d = net.dealer_index;
  m.col(2 * k) << y.row(d).transpose(), x.row(d).transpose();
  return m;
}

// Constraint rows: anti-squeezed resource quadratures, then the secret x and p.
std::vector<int> constraint_rows(int n) {
  std::vector<int> rows;
  for (int j = 0; j < n - 1; ++j) rows.push_back(j);
  rows.push_back(n - 1);
  rows.push_back(2 * n - 1);
  return rows;
}

void check_party(const SharingNetwork& net, std::span<const int> party) {
  const int n = net.modes();
  std::set<int> seen;
  for (int i : party) {
    if (i < 0 || i >= n) throw InputError(fmt::format("player {} out of range [0, {})", i, n));
    if (i == net.dealer_index) throw InputError(fmt::format("party {} includes the dealer", fmt::join(party, ",")));
    if (!seen.insert(i).second) throw InputError(fmt::format("party {} repeats player {}", fmt::join(party, ","), i));
  }
}

struct Elimination {
  Matrix reduced;          // constraints without the pivot row, C substituted
  Vector dealer_weights;   // C = dealer_weights . z_players
  std::vector<int> rows;   // constraint rows kept, in order
  int pivot;
};

int default_pivot(const SharingNetwork& net) {
  const Vector row = net.unitary.imag().row(net.dealer_index).head(net.modes() - 1).cwiseAbs().transpose();
  Eigen::Index best = 0;
  row.maxCoeff(&best);
  return static_cast<int>(best);
}

// The dealer's p relation fixes x_sqz_pivot; requiring its total coefficient
// to vanish determines C from the players' coefficients.
Elimination eliminate(const Matrix& m, int n, int pivot) {
  const Eigen::Index players = m.cols() - 1;
  const double dealer_coeff = m(pivot, players);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (std::abs(dealer_coeff) <= kRankTolerance * scale) {
    throw SingularSystem(fmt::format("dealer relation has no x_sqz_{} component to eliminate", pivot));
  }
  Elimination e;
  e.pivot = pivot;
  e.dealer_weights = -m.row(pivot).head(players).transpose() / dealer_coeff;
  for (int r : constraint_rows(n)) {
    if (r != pivot) e.rows.push_back(r);
  }
  e.reduced = Matrix(static_cast<Eigen::Index>(e.rows.size()), players);
  for (std::size_t r = 0; r < e.rows.size(); ++r) {
    const int row = e.rows[r];
    e.reduced.row(static_cast<Eigen::Index>(r)) =
        m.row(row).head(players) + m(row, players) * e.dealer_weights.transpose();
  }
  return e;
}

Vector target_for(const Elimination& e, int n, bool x_quadrature) {
  Vector b = Vector::Zero(static_cast<Eigen::Index>(e.rows.size()));
  const int target_row = x_quadrature ? n - 1 : 2 * n - 1;
  for (std::size_t r = 0; r < e.rows.size(); ++r) {
    if (e.rows[r] == target_row) b(static_cast<Eigen::Index>(r)) = 1.0;
  }
  return b;
}

QuadratureReconstruction assemble(const Matrix& m, int n, const Elimination& e, const Vector& players,
                                  bool x_quadrature) {
  const Eigen::Index k = players.size() / 2;
  Vector z(players.size() + 1);
  z << players, e.dealer_weights.dot(players);
  const Vector coeff = m * z;

  QuadratureReconstruction q;
  q.player_x = players.head(k);
  q.player_p = players.tail(k);
  q.dealer = z(z.size() - 1);
  q.leakage = coeff.segment(n, n - 1);
  double residual = 0.0;
  for (int j = 0; j < n - 1; ++j) residual = std::max(residual, std::abs(coeff(j)));
  residual = std::max(residual, std::abs(coeff(n - 1) - (x_quadrature ? 1.0 : 0.0)));
  residual = std::max(residual, std::abs(coeff(2 * n - 1) - (x_quadrature ? 0.0 : 1.0)));
  q.constraint_residual = residual;
  return q;
}

}  // namespace

std::vector<int> SharingNetwork::players() const {
  std::vector<int> out;
  for (int i = 0; i < modes(); ++i) {
    if (i != dealer_index) out.push_back(i);
  }
  return out;
}

void SharingNetwork::validate() const {
  if (modes() < 3) throw InputError(fmt::format("sharing network needs at least 3 modes, got {}", modes()));
  if (dealer_index < 0 || dealer_index >= modes()) {
    throw InputError(fmt::format("dealer_index {} out of range [0, {})", dealer_index, modes()));
  }
  if (!(secret.vx > 0.0) || !(secret.vp > 0.0) || !std::isfinite(secret.vx) || !std::isfinite(secret.vp)) {
    throw InputError("secret variances must be positive and finite");
  }
  if (secret.vx * secret.vp < 1.0 - kInputTolerance) {
    throw InputError(fmt::format("secret variances violate vx * vp >= 1 (product {:.6g})", secret.vx * secret.vp));
  }
}

Matrix u6se_printed_real() {
  static constexpr double rows[6][6] = {
      {.6234, .0078, -.1375, -.1375, .0078, -.0591},  {.0078, .6234, .0078, -.1375, -.1375, -.0591},
      {-.1375, .0078, .6234, .0078, -.1375, -.0591},  {-.1375, -.1375, .0078, .6233, .0078, -.0591},
      {.0078, -.1375, -.1375, .0078, .6234, -.0591},  {-.0591, -.0591, -.0591, -.0591, -.0591, .4822},
  };
  return printed(rows);
}

Matrix u6se_printed_imag() {
  static constexpr double rows[6][6] = {
      {-.0434, .4268, -.1887, -.1887, .4268, .3641},  {.4268, -.0434, .4268, -.1887, -.1887, .3641},
      {-.1887, .4268, -.04342, .4268, -.1887, .3641}, {-.1887, -.1887, .4268, -.0434, .4268, .3641},
      {.4268, -.1887, -.1887, .4268, -.04342, .3641}, {.3641, .3641, .3641, .3641, .3641, -.2954},
  };
  return printed(rows);
}

ModeUnitary u6se() {
  ComplexMatrix raw(6, 6);
  raw.real() = u6se_printed_real();
  raw.imag() = u6se_printed_imag();
  return ModeUnitary(nearest_unitary(raw));
}

SharingNetwork default_network() { return SharingNetwork{u6se(), 5, {}}; }

AccessSolution access_party_solve(const SharingNetwork& net, std::span<const int> party, std::optional<int> pivot) {
  net.validate();
  check_party(net, party);
  const int n = net.modes();
  if (2 * static_cast<int>(party.size()) != n) {
    throw InputError(fmt::format("a square system on {} modes needs {} players, got {}", n, n / 2, party.size()));
  }
  const int piv = pivot.value_or(default_pivot(net));
  if (piv < 0 || piv >= n - 1) throw InputError(fmt::format("pivot {} is not a resource quadrature", piv));

  const Matrix m = relation_matrix(net, party);
  const Elimination e = eliminate(m, n, piv);
  Eigen::JacobiSVD<Matrix> svd(e.reduced, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector sv = svd.singularValues();
  if (sv(sv.size() - 1) <= kRankTolerance * std::max(1.0, sv(0))) {
    throw SingularSystem(fmt::format("access party {} gives a rank-deficient system (smallest singular value {:.3e})",
                                     fmt::join(party, ","), sv(sv.size() - 1)));
  }

  AccessSolution out;
  out.party.assign(party.begin(), party.end());
  out.pivot = piv;
  out.x = assemble(m, n, e, svd.solve(target_for(e, n, true)), true);
  out.p = assemble(m, n, e, svd.solve(target_for(e, n, false)), false);
  return out;
}

PairCertificate pair_infeasibility(const SharingNetwork& net, std::span<const int> pair) {
  net.validate();
  check_party(net, pair);
  if (pair.size() != 2) throw InputError(fmt::format("pair certificate needs 2 players, got {}", pair.size()));
  const int n = net.modes();
  const Matrix m = relation_matrix(net, pair);
  const Elimination e = eliminate(m, n, default_pivot(net));
  const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(e.reduced);
  auto residual = [&](bool x_quadrature) {
    const Vector b = target_for(e, n, x_quadrature);
    return (e.reduced * cod.solve(b) - b).norm();
  };
  return PairCertificate{{pair[0], pair[1]}, residual(true), residual(false)};
}

Eigen::Matrix2d reconstructed_covariance(const AccessSolution& solution, const SqueezingProfile& resource,
                                         SecretVariances secret) {
  const Eigen::Index count = solution.x.leakage.size();
  if (resource.size() != count || solution.p.leakage.size() != count) {
    throw InputError(fmt::format("resource has {} squeezers, solution has {} leakage terms", resource.size(), count));
  }
  Eigen::Matrix2d v = Eigen::Matrix2d::Zero();
  v(0, 0) = secret.vx;
  v(1, 1) = secret.vp;
  for (Eigen::Index j = 0; j < count; ++j) {
    const double s = resource[static_cast<std::size_t>(j)];
    v(0, 0) += solution.x.leakage(j) * solution.x.leakage(j) * s;
    v(1, 1) += solution.p.leakage(j) * solution.p.leakage(j) * s;
  }
  return v;
}

double fidelity(const Eigen::Matrix2d& secret, const Eigen::Matrix2d& reconstructed, const Eigen::Vector2d& alpha) {
  auto check = [](const Eigen::Matrix2d& v, std::string_view what) {
    if (!v.allFinite() || std::abs(v(0, 1) - v(1, 0)) > kStructuralTolerance * std::max(1.0, v.cwiseAbs().maxCoeff()) ||
        v(0, 0) <= 0.0 || v.determinant() <= 0.0) {
      throw InputError(fmt::format("{} covariance is not positive definite", what));
    }
  };
  check(secret, "secret");
  check(reconstructed, "reconstructed");
  const Eigen::Matrix2d sum = secret + reconstructed;
  const double a = sum.determinant();
  const double b = std::max(0.0, (secret.determinant() - 1.0) * (reconstructed.determinant() - 1.0));
  const double overlap = 2.0 / (std::sqrt(a + b) - std::sqrt(b));
  return overlap * std::exp(-alpha.dot(sum.inverse() * alpha));
}

std::vector<PartyFidelity> protocol_run(const SharingNetwork& net, const SqueezingProfile& profile, double loss,
                                        int threads) {
  net.validate();
  const int n = net.modes();
  if (profile.size() < n - 1) {
    throw InputError(fmt::format("profile has {} squeezers, the network needs {}", profile.size(), n - 1));
  }
  if (!(loss >= 0.0 && loss <= 1.0)) throw InputError(fmt::format("loss {} outside [0, 1]", loss));
  const SqueezingProfile lead = profile.leading(n - 1);
  std::vector<double> lossy(lead.variances());
  for (double& s : lossy) s = (1.0 - loss) * s + loss;
  const SqueezingProfile resource(std::move(lossy));
  const SecretVariances secret{(1.0 - loss) * net.secret.vx + loss, (1.0 - loss) * net.secret.vp + loss};
  Eigen::Matrix2d vs = Eigen::Matrix2d::Zero();
  vs(0, 0) = secret.vx;
  vs(1, 1) = secret.vp;

  const std::vector<int> players = net.players();
  const std::size_t k = static_cast<std::size_t>(n / 2);
  std::vector<std::vector<int>> parties;
  std::vector<bool> pick(players.size(), false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(std::min(k, players.size())), true);
  do {
    std::vector<int> party;
    for (std::size_t i = 0; i < players.size(); ++i) {
      if (pick[i]) party.push_back(players[i]);
    }
    parties.push_back(std::move(party));
  } while (std::prev_permutation(pick.begin(), pick.end()));

  std::vector<PartyFidelity> out(parties.size());
  detail::parallel_for(parties.size(), threads, [&](std::size_t i) {
    const AccessSolution sol = access_party_solve(net, parties[i]);
    const Eigen::Matrix2d v = reconstructed_covariance(sol, resource, secret);
    out[i] = PartyFidelity{parties[i], v(0, 0), v(1, 1), fidelity(vs, v)};
  });
  return out;
}

std::vector<double> default_sweep_grid(int points, double last_db) {
  if (points < 2) throw InputError("sweep grid needs at least 2 points");
  if (!(last_db <= 0.0)) throw InputError("sweep grid must end at a non-positive dB value");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = last_db * i / (points - 1);
  return grid;
}

std::vector<FidelitySweepRow> sweep_fidelity(const SharingNetwork& net, const SqueezingProfile& base,
                                             std::span<const double> leading_db, double loss, int threads) {
  for (double db : leading_db) {
    if (!(db <= 0.0)) throw InputError(fmt::format("sweep level {} dB is not a squeezing level", db));
  }
  std::vector<FidelitySweepRow> rows(leading_db.size());
  detail::parallel_for(leading_db.size(), threads, [&](std::size_t i) {
    const auto run = protocol_run(net, resource::rescale_profile(base, leading_db[i]), loss, 1);
    FidelitySweepRow row{leading_db[i], 1.0, 0.0, 0.0};
    for (const auto& p : run) {
      row.f_min = std::min(row.f_min, p.fidelity);
      row.f_max = std::max(row.f_max, p.fidelity);
      row.f_avg += p.fidelity;
    }
    row.f_avg /= static_cast<double>(run.size());
    rows[i] = row;
  });
  return rows;
}

}  // namespace qnet::sharing
