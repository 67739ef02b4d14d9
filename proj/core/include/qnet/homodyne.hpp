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

#include <span>
#include <vector>

#include "qnet/gaussian.hpp"
#include "qnet/resource.hpp"

namespace qnet::homodyne {

// Shaped local oscillator in the pixel basis. With c~ = c * exp(i theta)
// the detector reads the quadrature u^T q, u = (Re c~, Im c~).
struct LOShape {
  ComplexVector c;
  double theta = 0.0;

  double squared_norm() const { return c.squaredNorm(); }
  bool normalized() const;
  // Copy with unit-norm amplitudes. Throws InputError for a zero vector.
  LOShape normalized_copy() const;
  // The 2n real quadrature vector u for this shape.
  Vector quadrature_vector() const;
};

// LO that reads the x-quadrature of network mode k at theta = 0 and its
// p-quadrature at theta = pi/2: c = conj(row k of u_lo).
LOShape lo_from_network_row(const ModeUnitary& u_lo, int row, double theta = 0.0);

// u^T V u with u built from the shape. Throws InputError if the shape is not
// normalized to 1e-12 (vacuum then reads exactly 1).
double measure_variance(const CovarianceMatrix& v_pix, const LOShape& lo);

struct SweepPoint {
  double theta;
  double variance;
};

inline constexpr int kDefaultSweepPoints = 201;

// `points` equally spaced phases on [0, pi], both ends included.
std::vector<double> theta_grid(int points = kDefaultSweepPoints);

// measure_variance over the grid; lo.theta is replaced by each grid value.
// Points may be evaluated on `threads` workers; output is in grid order.
std::vector<SweepPoint> phase_sweep(const CovarianceMatrix& v_pix, const LOShape& lo,
                                    std::span<const double> thetas, int threads = 1);

struct CovarianceBlocks {
  Matrix amplitude;  // x-block
  Matrix phase;      // p-block
};

// x- and p-blocks of the pixel covariance, optionally with the vacuum
// contribution removed from the diagonal.
CovarianceBlocks pixel_covariance_blocks(const CovarianceMatrix& v_pix, bool subtract_shot_noise = false);

// Full pixel -> network unitary U_LO = U_net * P * U_sqz for a network on
// the first u_net.modes() squeezers in sorted order (most squeezed first).
// Unused squeezers pass through unchanged.
ModeUnitary network_lo_unitary(const ModeUnitary& u_net, const resource::ResourceSpec& spec);

}  // namespace qnet::homodyne
