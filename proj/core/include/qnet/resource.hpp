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

namespace qnet::resource {

// Uncorrected detection loss of the homodyne chain (visibility included).
inline constexpr double kPaperDetectionLoss = 0.15;
inline constexpr int kPaperModes = 16;

// Approximate 16-band squeezing profile in dB, most squeezed first: twelve
// squeezed eigenmodes from -6.6 dB down to -0.3 dB, four vacuum bands. The
// individual values are a stand-in, not measured data.
std::span<const double> paper_profile_db();

// The shipped profile with every dB value multiplied by leading_db / -6.6.
// Throws InputError for leading_db > 0.
SqueezingProfile paper_profile(double leading_db = -6.6);

// Rescale all dB values of `base` by a common factor so that its most
// squeezed entry sits at leading_db.
SqueezingProfile rescale_profile(const SqueezingProfile& base, double leading_db);

// Multimode squeezed resource: independent p-squeezers plus the
// pixel -> squeezer unitary (a_sqz = u_sqz * a_pix).
struct ResourceSpec {
  SqueezingProfile profile;
  ModeUnitary u_sqz;
  std::vector<double> loss;  // per pixel mode, in [0, 1]
  double dark_noise = 0.0;

  int modes() const { return profile.size(); }
  // Throws InputError on dimension mismatch, loss outside [0, 1], negative
  // dark noise, or a profile entry above the vacuum level.
  void validate() const;
};

// Resource with the default synthetic unitary and uniform loss.
ResourceSpec make_resource(SqueezingProfile profile, double loss = 0.0, double dark_noise = 0.0);

// V_pix = S(u_sqz^dag) diag(1/s, s) S(u_sqz^dag)^T, then loss, then
// + dark_noise * I.
CovarianceMatrix build_pixel_covariance(const ResourceSpec& spec);

// Squeezer-basis covariance diag(1/s, s) after uniform loss (loss commutes
// with every passive basis change when it is uniform).
CovarianceMatrix squeezer_covariance(const SqueezingProfile& profile, double loss = 0.0);

// Synthetic pixel -> squeezer unitary. Row k is the k-th eigenvector of a
// discretized harmonic oscillator on n pixels: a bell-shaped envelope for
// k = 0 and exactly k sign changes for row k. Real, so every squeezer stays
// p-squeezed in the pixel basis.
ModeUnitary default_usqz(int modes);

}  // namespace qnet::resource
