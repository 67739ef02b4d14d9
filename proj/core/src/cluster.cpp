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

#include "qnet/cluster.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

namespace qnet::cluster {

Graph::Graph(Matrix adjacency, std::string name) : adjacency_(std::move(adjacency)), name_(std::move(name)) {
  if (adjacency_.rows() != adjacency_.cols() || adjacency_.rows() == 0) {
    throw InputError(fmt::format("adjacency matrix must be non-empty and square, got {}x{}",
                                 adjacency_.rows(), adjacency_.cols()));
  }
  if (!adjacency_.allFinite()) throw InputError("adjacency matrix has non-finite entries");
  for (Eigen::Index i = 0; i < adjacency_.rows(); ++i) {
    if (adjacency_(i, i) != 0.0) throw InputError(fmt::format("adjacency diagonal entry {} is non-zero", i));
    for (Eigen::Index j = i + 1; j < adjacency_.cols(); ++j) {
      if (adjacency_(i, j) != adjacency_(j, i)) {
        throw InputError(fmt::format("adjacency matrix is not symmetric at ({}, {})", i, j));
      }
    }
  }
}

Graph Graph::from_edges(int nodes, const std::vector<Edge>& edges, std::string name) {
  if (nodes < 1) throw InputError("graph needs at least one node");
  Matrix v = Matrix::Zero(nodes, nodes);
  for (const Edge& e : edges) {
    if (e.from < 0 || e.to < 0 || e.from >= nodes || e.to >= nodes) {
      throw InputError(fmt::format("edge ({}, {}) references a node outside [0, {})", e.from, e.to, nodes));
    }
    if (e.from == e.to) throw InputError(fmt::format("self-loop on node {}", e.from));
    if (v(e.from, e.to) != 0.0) throw InputError(fmt::format("duplicate edge ({}, {})", e.from, e.to));
    v(e.from, e.to) = v(e.to, e.from) = e.weight;
  }
  return Graph(std::move(v), std::move(name));
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  for (int i = 0; i < size(); ++i) {
    for (int j = i + 1; j < size(); ++j) {
      if (adjacency_(i, j) != 0.0) out.push_back({i, j, adjacency_(i, j)});
    }
  }
  return out;
}

Vector Graph::vacuum_references() const {
  return Vector::Ones(size()) + adjacency_.rowwise().squaredNorm();
}

// ---------------------------------------------------------------------------
// Builtin catalog

namespace {

void require_nodes(std::string_view name, int nodes, bool ok, std::string_view rule) {
  if (!ok) throw InputError(fmt::format("graph '{}' needs {}, got n = {}", name, rule, nodes));
}

// Two rows of squares, one diagonal each, walked as a triangle strip
// b0 t0 b1 t1 ...: consecutive strip nodes and nodes two apart are joined.
// Top row takes labels 0..floor(n/2)-1, bottom row the rest.
Graph diagonal_square(int nodes) {
  const int top = nodes / 2;
  std::vector<int> strip(static_cast<std::size_t>(nodes));
  for (int i = 0; i < nodes; ++i) strip[static_cast<std::size_t>(i)] = (i % 2 == 0) ? top + i / 2 : i / 2;
  std::vector<Edge> edges;
  for (int i = 0; i < nodes; ++i) {
    for (int step : {1, 2}) {
      if (i + step < nodes) {
        edges.push_back({strip[static_cast<std::size_t>(i)], strip[static_cast<std::size_t>(i + step)]});
      }
    }
  }
  return Graph::from_edges(nodes, edges, fmt::format("diagonal_square-{}", nodes));
}

}  // namespace

std::vector<std::string> builtin_graph_names() {
  return {"linear", "diagonal_square", "t_shape", "square", "star", "pentagon_dealer"};
}

Graph builtin_graph(std::string_view name, int nodes) {
  std::vector<Edge> edges;
  if (name == "linear") {
    require_nodes(name, nodes, nodes >= 2, "n >= 2");
    for (int i = 0; i + 1 < nodes; ++i) edges.push_back({i, i + 1});
  } else if (name == "diagonal_square") {
    require_nodes(name, nodes, nodes >= 4, "n >= 4");
    return diagonal_square(nodes);
  } else if (name == "t_shape") {
    require_nodes(name, nodes, nodes == 4, "n = 4");
    edges = {{0, 1}, {1, 2}, {1, 3}};
  } else if (name == "square") {
    require_nodes(name, nodes, nodes == 4, "n = 4");
    edges = {{0, 1}, {1, 3}, {3, 2}, {2, 0}};
  } else if (name == "star") {
    require_nodes(name, nodes, nodes >= 2, "n >= 2");
    for (int i = 1; i < nodes; ++i) edges.push_back({0, i});
  } else if (name == "pentagon_dealer") {
    // Players 0..4 on a 5-cycle, dealer 5 joined to every player.
    require_nodes(name, nodes, nodes == 6, "n = 6");
    for (int i = 0; i < 5; ++i) {
      edges.push_back({i, (i + 1) % 5});
      edges.push_back({i, 5});
    }
  } else {
    throw InputError(fmt::format("unknown graph '{}'", name));
  }
  return Graph::from_edges(nodes, edges, fmt::format("{}-{}", name, nodes));
}

// ---------------------------------------------------------------------------
// Cluster unitary and nullifiers

double cluster_condition_residual(const Graph& graph, const ModeUnitary& u) {
  if (u.modes() != graph.size()) throw InputError("unitary and graph differ in size");
  return (u.imag() - graph.adjacency() * u.real()).cwiseAbs().maxCoeff();
}

ModeUnitary cluster_unitary(const Graph& graph) {
  const Matrix& v = graph.adjacency();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(v);
  const Vector lambda = solver.eigenvalues();
  const Matrix& q = solver.eigenvectors();
  const Vector inv_sqrt = (Vector::Ones(lambda.size()) + lambda.cwiseAbs2()).cwiseSqrt().cwiseInverse();
  Matrix x = q * inv_sqrt.asDiagonal() * q.transpose();
  x = 0.5 * (x + x.transpose());
  const Matrix y = v * x;
  ModeUnitary u = ModeUnitary::from_parts(x, y);
  const double residual = unitarity_residual(u.matrix());
  if (residual > kStructuralTolerance) {
    throw std::logic_error(fmt::format("cluster unitary self-check failed: unitarity residual {:.3e}", residual));
  }
  return u;
}

NullifierSet nullifier_matrix(const Graph& graph, const ModeUnitary& u) {
  if (u.modes() != graph.size()) {
    throw InputError(fmt::format("unitary has {} modes, graph has {} nodes", u.modes(), graph.size()));
  }
  const Matrix& v = graph.adjacency();
  const Matrix x = u.real();
  const Matrix y = u.imag();
  return NullifierSet{y - v * x, x + v * y};
}

std::vector<double> NullifierReport::relative_db() const {
  std::vector<double> out;
  const Vector r = relative();
  out.reserve(static_cast<std::size_t>(r.size()));
  for (Eigen::Index i = 0; i < r.size(); ++i) out.push_back(variance_to_db(r(i)));
  return out;
}

NullifierReport nullifier_variances(const Graph& graph, const ModeUnitary& u, const SqueezingProfile& profile) {
  const int n = graph.size();
  const NullifierSet m = nullifier_matrix(graph, u);
  const SqueezingProfile inputs = profile.leading(n);
  Vector s(n);
  for (int j = 0; j < n; ++j) s(j) = inputs[static_cast<std::size_t>(j)];
  Vector variance = m.mx.cwiseAbs2() * s.cwiseInverse() + m.mp.cwiseAbs2() * s;
  return NullifierReport{std::move(variance), graph.vacuum_references()};
}

NullifierReport nullifier_variances(const Graph& graph, const ModeUnitary& u,
                                    const CovarianceMatrix& squeezer_covariance) {
  const int n = graph.size();
  if (squeezer_covariance.modes() != n) {
    throw InputError(fmt::format("squeezer covariance has {} modes, graph has {} nodes",
                                 squeezer_covariance.modes(), n));
  }
  const NullifierSet m = nullifier_matrix(graph, u);
  Matrix rows(n, 2 * n);
  rows << m.mx, m.mp;
  Vector variance = (rows * squeezer_covariance.data()).cwiseProduct(rows).rowwise().sum();
  return NullifierReport{std::move(variance), graph.vacuum_references()};
}

NullifierLO nullifier_lo(const Graph& graph, const ModeUnitary& u_lo, int node) {
  const int n = graph.size();
  if (node < 0 || node >= n) throw InputError(fmt::format("node {} out of range [0, {})", node, n));
  if (u_lo.modes() < n) {
    throw InputError(fmt::format("readout unitary has {} modes, graph needs {}", u_lo.modes(), n));
  }
  ComplexVector c_net = ComplexVector::Zero(u_lo.modes());
  c_net(node) = 1.0;
  for (int j = 0; j < n; ++j) c_net(j) += std::complex<double>(0.0, graph.adjacency()(node, j));
  const ComplexVector c_pix = u_lo.matrix().adjoint() * c_net;
  const double scale = c_pix.squaredNorm();
  return NullifierLO{homodyne::LOShape{c_pix / std::sqrt(scale), std::numbers::pi / 2}, scale};
}

}  // namespace qnet::cluster
