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

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "qnet/resource.hpp"
#include "qnet/secret_sharing.hpp"

namespace qnet::sharing {
namespace {

using testing::Rng;

std::vector<std::vector<int>> subsets(const std::vector<int>& items, std::size_t k) {
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (current.size() == k) {
      out.push_back(current);
      return;
    }
    for (std::size_t i = start; i < items.size(); ++i) {
      current.push_back(items[i]);
      self(self, i + 1);
      current.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

Eigen::Matrix2d diag2(double a, double b) {
  Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

Eigen::Matrix2d random_pure(Rng& rng) {
  const double r = testing::uniform(rng, 0.2, 1.0);
  const double phi = testing::uniform(rng, 0.0, 3.14159);
  Eigen::Matrix2d rot;
  rot << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  return rot * diag2(1.0 / r, r) * rot.transpose();
}

Eigen::Matrix2d random_mixed(Rng& rng) {
  return random_pure(rng) * testing::uniform(rng, 1.0, 3.0);
}

TEST(U6se, ProjectionStaysCloseToPrintedEntries) {
  const ComplexMatrix printed =
      u6se_printed_real().cast<std::complex<double>>() + std::complex<double>(0, 1) * u6se_printed_imag();
  EXPECT_GT(unitarity_residual(printed), 1e-6);
  const ModeUnitary u = u6se();
  EXPECT_LT(unitarity_residual(u.matrix()), 1e-13);
  EXPECT_LT((u.matrix() - printed).cwiseAbs().maxCoeff(), 5e-4);
}

TEST(SharingNetwork, PlayersAndValidation) {
  const SharingNetwork net = default_network();
  EXPECT_EQ(net.players(), (std::vector<int>{0, 1, 2, 3, 4}));
  EXPECT_EQ(net.secret_column(), 5);
  EXPECT_NO_THROW(net.validate());
  SharingNetwork bad = net;
  bad.dealer_index = 6;
  EXPECT_THROW(bad.validate(), InputError);
  bad = net;
  bad.secret = {0.5, 0.5};
  EXPECT_THROW(bad.validate(), InputError);
  EXPECT_THROW((SharingNetwork{ModeUnitary::identity(2), 1, {}}.validate()), InputError);
}

TEST(AccessPartySolve, EveryTripleIsSolvable) {
  const SharingNetwork net = default_network();
  for (const auto& party : subsets(net.players(), 3)) {
    const AccessSolution sol = access_party_solve(net, party);
    EXPECT_LT(sol.x.constraint_residual, 1e-8);
    EXPECT_LT(sol.p.constraint_residual, 1e-8);
    EXPECT_EQ(sol.party, party);
    EXPECT_EQ(sol.x.leakage.size(), 5);
  }
}

// The reduced square system has a unique solution, so the minimum-norm
// solve of the unreduced equations must land on the same coefficients.
TEST(AccessPartySolve, MatchesUnreducedLeastSquares) {
  const SharingNetwork net = default_network();
  const int n = net.modes();
  for (const auto& party : subsets(net.players(), 3)) {
    const AccessSolution sol = access_party_solve(net, party);
    for (bool x : {true, false}) {
      const QuadratureReconstruction& q = x ? sol.x : sol.p;
      const testing::SharingOracle oracle = testing::sharing_least_squares(net.unitary.matrix(), 5, party, x);
      EXPECT_LT(oracle.residual, 1e-10);
      Vector z(7);
      z << q.player_x, q.player_p, q.dealer;
      EXPECT_LT((z - oracle.unknowns).cwiseAbs().maxCoeff(), 1e-9);
      EXPECT_LT((q.leakage - oracle.squeezer_coefficients.segment(n, n - 1)).cwiseAbs().maxCoeff(), 1e-9);
      EXPECT_NEAR(oracle.squeezer_coefficients(x ? n - 1 : 2 * n - 1), 1.0, 1e-10);
    }
  }
}

TEST(AccessPartySolve, PivotChoiceDoesNotMatter) {
  const SharingNetwork net = default_network();
  const std::vector<int> party{0, 2, 4};
  const AccessSolution reference = access_party_solve(net, party);
  const Matrix y = net.unitary.imag();
  for (int pivot = 0; pivot < 5; ++pivot) {
    if (std::abs(y(5, pivot)) < 1e-3) continue;
    const AccessSolution other = access_party_solve(net, party, pivot);
    EXPECT_EQ(other.pivot, pivot);
    EXPECT_LT((other.x.leakage - reference.x.leakage).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((other.p.player_p - reference.p.player_p).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(AccessPartySolve, RandomNetworksAgreeWithOracle) {
  Rng rng(1);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 * testing::uniform_int(rng, 2, 4);
    SharingNetwork net{testing::random_unitary(n, rng), testing::uniform_int(rng, 0, n - 1), {}};
    std::vector<int> players = net.players();
    std::shuffle(players.begin(), players.end(), rng);
    std::vector<int> party(players.begin(), players.begin() + n / 2);
    std::sort(party.begin(), party.end());
    const AccessSolution sol = access_party_solve(net, party);
    const auto oracle = testing::sharing_least_squares(net.unitary.matrix(), net.dealer_index, party, true);
    EXPECT_LT(sol.x.constraint_residual, 1e-8);
    EXPECT_LT((sol.x.leakage - oracle.squeezer_coefficients.segment(n, n - 1)).cwiseAbs().maxCoeff(),
              1e-7 * (1.0 + oracle.unknowns.norm()));
  }
}

TEST(AccessPartySolve, RejectsBadParties) {
  const SharingNetwork net = default_network();
  EXPECT_THROW(access_party_solve(net, std::vector<int>{0, 1}), InputError);
  EXPECT_THROW(access_party_solve(net, std::vector<int>{0, 1, 5}), InputError);
  EXPECT_THROW(access_party_solve(net, std::vector<int>{0, 0, 1}), InputError);
  EXPECT_THROW(access_party_solve(net, std::vector<int>{0, 1, 7}), InputError);
  EXPECT_THROW(access_party_solve(net, std::vector<int>{0, 1, 2}, 5), InputError);
}

TEST(AccessPartySolve, IdentityNetworkIsSingular) {
  const SharingNetwork net{ModeUnitary::identity(6), 5, {}};
  EXPECT_THROW(access_party_solve(net, std::vector<int>{0, 1, 2}), SingularSystem);
}

TEST(PairInfeasibility, NoPairRecoversTheSecret) {
  const SharingNetwork net = default_network();
  for (const auto& pair : subsets(net.players(), 2)) {
    const PairCertificate cert = pair_infeasibility(net, pair);
    EXPECT_TRUE(cert.infeasible()) << pair[0] << "," << pair[1] << " residual " << cert.residual();
    for (bool x : {true, false}) {
      EXPECT_GT(testing::sharing_least_squares(net.unitary.matrix(), 5, pair, x).residual, 1e-6);
    }
  }
  EXPECT_THROW(pair_infeasibility(net, std::vector<int>{0, 1, 2}), InputError);
}

TEST(ReconstructedCovariance, ClosedFormOnLeakage) {
  const SharingNetwork net = default_network();
  const AccessSolution sol = access_party_solve(net, std::vector<int>{1, 2, 3});
  const SqueezingProfile s({0.1, 0.2, 0.3, 0.4, 0.5});
  const Eigen::Matrix2d v = reconstructed_covariance(sol, s, {2.0, 0.5});
  double vx = 2.0;
  double vp = 0.5;
  for (int j = 0; j < 5; ++j) {
    vx += sol.x.leakage(j) * sol.x.leakage(j) * s[static_cast<std::size_t>(j)];
    vp += sol.p.leakage(j) * sol.p.leakage(j) * s[static_cast<std::size_t>(j)];
  }
  EXPECT_NEAR(v(0, 0), vx, 1e-14);
  EXPECT_NEAR(v(1, 1), vp, 1e-14);
  EXPECT_EQ(v(0, 1), 0.0);
  EXPECT_THROW(reconstructed_covariance(sol, SqueezingProfile({0.1}), {}), InputError);
}

TEST(ReconstructedCovariance, MatchesSampling) {
  const SharingNetwork net = default_network();
  const SqueezingProfile s = resource::paper_profile().leading(5);
  Rng rng(2);
  for (const auto& party : subsets(net.players(), 3)) {
    const AccessSolution sol = access_party_solve(net, party);
    const Eigen::Matrix2d v = reconstructed_covariance(sol, s, net.secret);
    const auto x = testing::sampled_reconstruction(net.unitary.matrix(), 5, party, sol.x, s.variances(), net.secret,
                                                   100000, rng);
    const auto p = testing::sampled_reconstruction(net.unitary.matrix(), 5, party, sol.p, s.variances(), net.secret,
                                                   100000, rng);
    EXPECT_NEAR(x.value, v(0, 0), 4.0 * x.sigma);
    EXPECT_NEAR(p.value, v(1, 1), 4.0 * p.sigma);
  }
}

TEST(Fidelity, IdenticalStates) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Matrix2d pure = random_pure(rng);
    EXPECT_NEAR(fidelity(pure, pure), 1.0, 1e-12);
    const double nu = testing::uniform(rng, 1.0, 5.0);
    EXPECT_NEAR(fidelity(diag2(nu, nu), diag2(nu, nu)), 1.0, 1e-12);
  }
}

TEST(Fidelity, CoherentStatesAgainstVacuumNoise) {
  // Coherent secret vs coherent state with added noise n per quadrature:
  // F = 2 / (2 + n).
  for (double n : {0.0, 0.5, 1.0, 2.0}) {
    EXPECT_NEAR(fidelity(Eigen::Matrix2d::Identity(), diag2(1.0 + n, 1.0 + n)), 2.0 / (2.0 + n), 1e-14);
  }
}

TEST(Fidelity, MatchesWignerOverlapForPureSecret) {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Matrix2d vs = random_pure(rng);
    const Eigen::Matrix2d vr = random_mixed(rng);
    const Eigen::Vector2d alpha(testing::uniform(rng, -1.0, 1.0), testing::uniform(rng, -1.0, 1.0));
    // alpha is measured in units where the quadrature displacement is sqrt(2) alpha.
    const double overlap = testing::wigner_overlap(vs, vr, std::sqrt(2.0) * alpha);
    EXPECT_NEAR(fidelity(vs, vr, alpha), overlap, 1e-6);
    EXPECT_NEAR(fidelity(vr, vs, alpha), overlap, 1e-6);
  }
}

TEST(Fidelity, BoundedAndSymmetric) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Matrix2d a = random_mixed(rng);
    const Eigen::Matrix2d b = random_mixed(rng);
    const Eigen::Vector2d alpha(testing::uniform(rng, -2.0, 2.0), testing::uniform(rng, -2.0, 2.0));
    const double f = fidelity(a, b, alpha);
    EXPECT_GT(f, 0.0);
    EXPECT_LE(f, 1.0 + 1e-12);
    EXPECT_NEAR(f, fidelity(b, a, alpha), 1e-12);
    EXPECT_LE(f, fidelity(a, b) + 1e-12);
  }
}

TEST(Fidelity, RejectsInvalidCovariance) {
  EXPECT_THROW(fidelity(diag2(1.0, -1.0), Eigen::Matrix2d::Identity()), InputError);
  EXPECT_THROW(fidelity(Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Zero()), InputError);
}

// Vacuum resource: reconstruct the variances from the unreduced oracle and
// evaluate the coherent-state fidelity directly.
TEST(ProtocolRun, VacuumResourceMatchesOracle) {
  const SharingNetwork net = default_network();
  const auto run = protocol_run(net, SqueezingProfile::uniform(5, 1.0));
  const auto parties = subsets(net.players(), 3);
  ASSERT_EQ(run.size(), parties.size());
  for (std::size_t i = 0; i < run.size(); ++i) {
    EXPECT_EQ(run[i].party, parties[i]);
    double vx = 1.0;
    double vp = 1.0;
    const auto ox = testing::sharing_least_squares(net.unitary.matrix(), 5, parties[i], true);
    const auto op = testing::sharing_least_squares(net.unitary.matrix(), 5, parties[i], false);
    vx += ox.squeezer_coefficients.segment(6, 5).squaredNorm();
    vp += op.squeezer_coefficients.segment(6, 5).squaredNorm();
    EXPECT_NEAR(run[i].var_x, vx, 1e-9);
    EXPECT_NEAR(run[i].var_p, vp, 1e-9);
    EXPECT_NEAR(run[i].fidelity, 2.0 / std::sqrt((1.0 + vx) * (1.0 + vp)), 1e-9);
  }
}

TEST(ProtocolRun, MoreSqueezingNeverHurts) {
  const SharingNetwork net = default_network();
  const SqueezingProfile base = resource::paper_profile();
  std::vector<PartyFidelity> previous = protocol_run(net, SqueezingProfile::uniform(5, 1.0));
  for (double db : {-1.0, -3.0, -6.0, -10.0, -20.0}) {
    const auto current = protocol_run(net, resource::rescale_profile(base, db));
    for (std::size_t i = 0; i < current.size(); ++i) EXPECT_GE(current[i].fidelity, previous[i].fidelity - 1e-12);
    previous = current;
  }
}

TEST(ProtocolRun, LossLowersFidelity) {
  const SharingNetwork net = default_network();
  const SqueezingProfile p = resource::paper_profile(-10.0);
  const auto clean = protocol_run(net, p, 0.0);
  const auto lossy = protocol_run(net, p, 0.2);
  for (std::size_t i = 0; i < clean.size(); ++i) EXPECT_LT(lossy[i].fidelity, clean[i].fidelity);
  EXPECT_THROW(protocol_run(net, p, 1.5), InputError);
  EXPECT_THROW(protocol_run(net, SqueezingProfile({0.5})), InputError);
}

TEST(ProtocolRun, ThreadCountDoesNotChangeResults) {
  const SharingNetwork net = default_network();
  const SqueezingProfile p = resource::paper_profile();
  const auto a = protocol_run(net, p, 0.1, 1);
  const auto b = protocol_run(net, p, 0.1, 4);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].fidelity, b[i].fidelity);
}

TEST(SweepFidelity, GridAndOrdering) {
  const auto grid = default_sweep_grid();
  ASSERT_EQ(grid.size(), 31u);
  EXPECT_EQ(grid.front(), 0.0);
  EXPECT_EQ(grid.back(), -15.0);
  EXPECT_NEAR(grid[1], -0.5, 1e-15);
  EXPECT_THROW(default_sweep_grid(1), InputError);

  const auto rows = sweep_fidelity(default_network(), resource::paper_profile(), grid);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_LE(rows[i].f_min, rows[i].f_avg);
    EXPECT_LE(rows[i].f_avg, rows[i].f_max);
    if (i > 0) {
      EXPECT_GE(rows[i].f_avg, rows[i - 1].f_avg);
    }
  }
  const std::vector<double> deep{-30.0};
  EXPECT_GT(sweep_fidelity(default_network(), resource::paper_profile(), deep)[0].f_min, 0.99);
}

}  // namespace
}  // namespace qnet::sharing
