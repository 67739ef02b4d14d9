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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qnet/gaussian.hpp"
#include "qnet/homodyne.hpp"

namespace qnet::cluster {

struct Edge {
  int from;
  int to;
  double weight = 1.0;
};

// Weighted undirected graph: symmetric adjacency with an exactly zero
// diagonal.
class Graph {
 public:
  explicit Graph(Matrix adjacency, std::string name = {});
  static Graph from_edges(int nodes, const std::vector<Edge>& edges, std::string name = {});

  int size() const { return static_cast<int>(adjacency_.rows()); }
  const Matrix& adjacency() const { return adjacency_; }
  const std::string& name() const { return name_; }
  std::vector<Edge> edges() const;

  // Vacuum variance of each nullifier, 1 + sum_j V_kj^2.
  Vector vacuum_references() const;

 private:
  Matrix adjacency_;
  std::string name_;
};

// linear, diagonal_square, t_shape, square, star, pentagon_dealer.
Graph builtin_graph(std::string_view name, int nodes);
std::vector<std::string> builtin_graph_names();

// Nullifier coefficients in the squeezer basis: delta = Mx x_sqz + Mp p_sqz.
struct NullifierSet {
  Matrix mx;
  Matrix mp;
};

// U0 = (I + iV)(I + V^2)^(-1/2). Satisfies Y = V X.
ModeUnitary cluster_unitary(const Graph& graph);

// ||Y - V X||_max: zero for every member of the cluster family of `graph`.
double cluster_condition_residual(const Graph& graph, const ModeUnitary& u);

// Mx = Y - V X, Mp = X + V Y for U = X + iY.
NullifierSet nullifier_matrix(const Graph& graph, const ModeUnitary& u);

struct NullifierReport {
  Vector variance;           // variance of delta_k as an operator combination
  Vector vacuum_reference;   // the same combination on vacuum

  Vector relative() const { return variance.cwiseQuotient(vacuum_reference); }
  std::vector<double> relative_db() const;
};

// Independent pure squeezers: the first graph.size() entries of the sorted
// profile feed network inputs 0..n-1.
NullifierReport nullifier_variances(const Graph& graph, const ModeUnitary& u, const SqueezingProfile& profile);

// General squeezer-basis covariance (2n x 2n, n = graph.size()).
NullifierReport nullifier_variances(const Graph& graph, const ModeUnitary& u,
                                    const CovarianceMatrix& squeezer_covariance);

// LO measuring nullifier k of a network read out through u_lo
// (b_net = u_lo a_pix; network modes are the first graph.size() rows).
// The shape is a_k + i sum_j V_kj a_j at theta = pi/2, normalized;
// operator_scale is the squared norm removed by normalization, so
// operator_scale * measure_variance(...) is the operator-combination variance.
struct NullifierLO {
  homodyne::LOShape lo;
  double operator_scale;
};
NullifierLO nullifier_lo(const Graph& graph, const ModeUnitary& u_lo, int node);

// --- Orthogonal freedom ----------------------------------------------------

// O = exp(A) with A antisymmetric.
class OrthogonalFreedom {
 public:
  static OrthogonalFreedom identity(int size);
  // Throws InputError unless A = -A^T exactly.
  static OrthogonalFreedom from_generator(Matrix generator);

  int size() const { return static_cast<int>(matrix_.rows()); }
  const Matrix& matrix() const { return matrix_; }
  const Matrix& generator() const { return generator_; }
  // U0 * O as a mode unitary.
  ModeUnitary apply_to(const ModeUnitary& u0) const;

 private:
  OrthogonalFreedom(Matrix generator, Matrix matrix);
  Matrix generator_;
  Matrix matrix_;
};

enum class Objective { kLinearMean, kDbMean };

struct OptimizerConfig {
  std::uint64_t seed = 1;
  int lambda = 16;
  int max_evals = 40000;  // total over all runs
  int restarts = 3;       // runs after the first one, which starts at O = I
  double initial_step = 0.5;
  double min_step = 1e-13;
  Objective objective = Objective::kLinearMean;
  int threads = 1;

  void validate() const;
};

struct HistoryEntry {
  int run;
  int evaluations;
  double best_objective;
  double step;
};

struct OptimizationResult {
  OrthogonalFreedom best;
  double objective;
  double baseline;  // objective at O = I
  int evaluations;
  std::vector<HistoryEntry> history;
};

// Mean (linear or dB) of the nullifier variances of U0 * O on `profile`.
double cluster_objective(const Graph& graph, const SqueezingProfile& profile, const Matrix& orthogonal,
                         Objective objective = Objective::kLinearMean);

// (1 + lambda) evolution strategy over the n(n-1)/2 generator entries with
// Gaussian mutations and success-rate step control. Elitist, so the result
// never loses to O = I. Candidates for a generation are drawn sequentially
// from one seeded generator and reduced in index order, so the result is the
// same for every thread count.
OptimizationResult optimize_orthogonal(const Graph& graph, const SqueezingProfile& profile,
                                       const OptimizerConfig& config = {});

}  // namespace qnet::cluster
