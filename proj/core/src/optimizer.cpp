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
#include <limits>
#include <random>

#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "parallel.hpp"
#include "qnet/cluster.hpp"

namespace qnet::cluster {

OrthogonalFreedom::OrthogonalFreedom(Matrix generator, Matrix matrix)
    : generator_(std::move(generator)), matrix_(std::move(matrix)) {}

OrthogonalFreedom OrthogonalFreedom::identity(int size) {
  return OrthogonalFreedom(Matrix::Zero(size, size), Matrix::Identity(size, size));
}

OrthogonalFreedom OrthogonalFreedom::from_generator(Matrix generator) {
  if (generator.rows() != generator.cols() || generator.rows() == 0) {
    throw InputError("generator must be a non-empty square matrix");
  }
  if (generator != -generator.transpose()) throw InputError("generator is not antisymmetric");
  Matrix o = generator.exp();
  const auto n = o.rows();
  const double residual = (o * o.transpose() - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (residual > kStructuralTolerance) {
    throw std::logic_error(fmt::format("exp(A) lost orthogonality: residual {:.3e}", residual));
  }
  return OrthogonalFreedom(std::move(generator), std::move(o));
}

ModeUnitary OrthogonalFreedom::apply_to(const ModeUnitary& u0) const {
  if (u0.modes() != size()) throw InputError("unitary and orthogonal matrix differ in size");
  return ModeUnitary(u0.matrix() * matrix_.cast<std::complex<double>>());
}

void OptimizerConfig::validate() const {
  if (lambda < 1) throw InputError(fmt::format("lambda must be >= 1, got {}", lambda));
  if (restarts < 0) throw InputError(fmt::format("restarts must be >= 0, got {}", restarts));
  if (max_evals < lambda * (restarts + 1)) {
    throw InputError(fmt::format("max_evals = {} cannot cover one generation of lambda = {} per run",
                                 max_evals, lambda));
  }
  if (!(initial_step > 0.0)) throw InputError("initial_step must be positive");
  if (!(min_step >= 0.0) || min_step >= initial_step) {
    throw InputError("min_step must be in [0, initial_step)");
  }
}

namespace {

// Nullifier coefficients for U0 * O are (Mx0 O, Mp0 O).
class ObjectiveFunction {
 public:
  ObjectiveFunction(const Graph& graph, const SqueezingProfile& profile, Objective kind)
      : kind_(kind), reference_(graph.vacuum_references()) {
    const int n = graph.size();
    const NullifierSet m = nullifier_matrix(graph, cluster_unitary(graph));
    mx_ = m.mx;
    mp_ = m.mp;
    const SqueezingProfile inputs = profile.leading(n);
    s_ = Vector(n);
    for (int j = 0; j < n; ++j) s_(j) = inputs[static_cast<std::size_t>(j)];
  }

  double operator()(const Matrix& o) const {
    const Vector variance = (mx_ * o).cwiseAbs2() * s_.cwiseInverse() + (mp_ * o).cwiseAbs2() * s_;
    if (kind_ == Objective::kLinearMean) return variance.mean();
    double total = 0.0;
    for (Eigen::Index k = 0; k < variance.size(); ++k) total += 10.0 * std::log10(variance(k) / reference_(k));
    return total / static_cast<double>(variance.size());
  }

 private:
  Objective kind_;
  Vector reference_;
  Matrix mx_;
  Matrix mp_;
  Vector s_;
};

Matrix generator_from(const Vector& params, int n) {
  Matrix a = Matrix::Zero(n, n);
  Eigen::Index k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      a(i, j) = params(k);
      a(j, i) = -params(k);
      ++k;
    }
  }
  return a;
}

}  // namespace

double cluster_objective(const Graph& graph, const SqueezingProfile& profile, const Matrix& orthogonal,
                         Objective objective) {
  if (orthogonal.rows() != graph.size() || orthogonal.cols() != graph.size()) {
    throw InputError("orthogonal matrix and graph differ in size");
  }
  return ObjectiveFunction(graph, profile, objective)(orthogonal);
}

OptimizationResult optimize_orthogonal(const Graph& graph, const SqueezingProfile& profile,
                                       const OptimizerConfig& config) {
  config.validate();
  const int n = graph.size();
  if (n < 2) throw InputError("orthogonal optimization needs at least two nodes");
  const ObjectiveFunction objective(graph, profile, config.objective);
  const Eigen::Index dim = static_cast<Eigen::Index>(n) * (n - 1) / 2;
  const int runs = config.restarts + 1;
  const int budget = config.max_evals / runs;
  // Success-rate step control: target rate 1/5 per offspring.
  const double damping = 1.0 + std::sqrt(static_cast<double>(dim) / config.lambda);

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double baseline = objective(Matrix::Identity(n, n));

  Vector best_params = Vector::Zero(dim);
  double best_value = baseline;
  int total_evals = 1;
  std::vector<HistoryEntry> history;
  std::vector<Vector> offspring(static_cast<std::size_t>(config.lambda), Vector(dim));
  std::vector<double> values(static_cast<std::size_t>(config.lambda));

  for (int run = 0; run < runs; ++run) {
    Vector parent = Vector::Zero(dim);
    if (run > 0) {
      for (Eigen::Index k = 0; k < dim; ++k) parent(k) = normal(rng);
    }
    double parent_value = objective(generator_from(parent, n).exp());
    int evals = 1;
    double step = config.initial_step;
    int generation = 0;
    while (evals + config.lambda <= budget && step > config.min_step) {
      for (auto& child : offspring) {
        for (Eigen::Index k = 0; k < dim; ++k) child(k) = normal(rng);
        child = parent + step * child;
      }
      detail::parallel_for(offspring.size(), config.threads, [&](std::size_t i) {
        values[i] = objective(generator_from(offspring[i], n).exp());
      });
      evals += config.lambda;
      std::size_t arg = 0;
      int successes = 0;
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] < values[arg]) arg = i;
        if (values[i] < parent_value) ++successes;
      }
      if (values[arg] < parent_value) {
        parent = offspring[arg];
        parent_value = values[arg];
      }
      const double rate = static_cast<double>(successes) / config.lambda;
      step *= std::exp((rate - 0.2) / (0.8 * damping));
      ++generation;
      if (generation % 25 == 0) history.push_back({run, total_evals + evals, std::min(best_value, parent_value), step});
    }
    total_evals += evals;
    if (parent_value < best_value) {
      best_value = parent_value;
      best_params = parent;
    }
    history.push_back({run, total_evals, best_value, step});
  }

  Matrix generator = generator_from(best_params, n);
  OrthogonalFreedom best = OrthogonalFreedom::from_generator(std::move(generator));
  const double value = objective(best.matrix());
  return OptimizationResult{std::move(best), value, baseline, total_evals, std::move(history)};
}

}  // namespace qnet::cluster
