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

#include "qnet/homodyne.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "parallel.hpp"

namespace qnet::homodyne {

bool LOShape::normalized() const { return std::abs(c.squaredNorm() - 1.0) <= 1e-12; }

LOShape LOShape::normalized_copy() const {
  const double norm = c.norm();
  if (!(norm > 0.0)) throw InputError("local oscillator shape is the zero vector");
  return LOShape{c / norm, theta};
}

Vector LOShape::quadrature_vector() const {
  const auto n = c.size();
  const ComplexVector rotated = c * std::polar(1.0, theta);
  Vector u(2 * n);
  u.head(n) = rotated.real();
  u.tail(n) = rotated.imag();
  return u;
}

LOShape lo_from_network_row(const ModeUnitary& u_lo, int row, double theta) {
  if (row < 0 || row >= u_lo.modes()) {
    throw InputError(fmt::format("network row {} out of range [0, {})", row, u_lo.modes()));
  }
  return LOShape{u_lo.matrix().row(row).adjoint(), theta};
}

double measure_variance(const CovarianceMatrix& v_pix, const LOShape& lo) {
  if (lo.c.size() != v_pix.modes()) {
    throw InputError(fmt::format("LO has {} pixel amplitudes, state has {} modes", lo.c.size(), v_pix.modes()));
  }
  if (!lo.normalized()) {
    throw InputError(fmt::format("LO shape is not normalized (|c|^2 = {:.15g})", lo.squared_norm()));
  }
  return quadrature_variance(v_pix, lo.quadrature_vector());
}

std::vector<double> theta_grid(int points) {
  if (points < 1) throw InputError("theta grid needs at least one point");
  std::vector<double> grid(static_cast<std::size_t>(points));
  if (points == 1) return {0.0};
  for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = std::numbers::pi * i / (points - 1);
  return grid;
}

std::vector<SweepPoint> phase_sweep(const CovarianceMatrix& v_pix, const LOShape& lo,
                                    std::span<const double> thetas, int threads) {
  if (thetas.empty()) throw InputError("phase sweep grid is empty");
  std::vector<SweepPoint> out(thetas.size());
  detail::parallel_for(thetas.size(), threads, [&](std::size_t i) {
    LOShape shifted = lo;
    shifted.theta = thetas[i];
    out[i] = SweepPoint{thetas[i], measure_variance(v_pix, shifted)};
  });
  return out;
}

CovarianceBlocks pixel_covariance_blocks(const CovarianceMatrix& v_pix, bool subtract_shot_noise) {
  CovarianceBlocks blocks{v_pix.x_block(), v_pix.p_block()};
  if (subtract_shot_noise) {
    blocks.amplitude.diagonal().array() -= kVacuumVariance;
    blocks.phase.diagonal().array() -= kVacuumVariance;
  }
  return blocks;
}

ModeUnitary network_lo_unitary(const ModeUnitary& u_net, const resource::ResourceSpec& spec) {
  const int total = spec.modes();
  const int used = u_net.modes();
  if (used > total) {
    throw InputError(fmt::format("network needs {} squeezers, resource has {}", used, total));
  }
  if (spec.u_sqz.modes() != total) throw InputError("resource unitary and profile disagree in size");
  std::vector<int> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), 0);
  const auto& s = spec.profile.variances();
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return s[static_cast<std::size_t>(a)] < s[static_cast<std::size_t>(b)]; });

  ComplexMatrix sorted_sqz(total, total);
  for (int r = 0; r < total; ++r) sorted_sqz.row(r) = spec.u_sqz.matrix().row(order[static_cast<std::size_t>(r)]);
  ComplexMatrix net = ComplexMatrix::Identity(total, total);
  net.topLeftCorner(used, used) = u_net.matrix();
  return ModeUnitary(net * sorted_sqz);
}

}  // namespace qnet::homodyne
