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

#include "qnet/resource.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

namespace qnet::resource {
namespace {

constexpr std::array<double, kPaperModes> kPaperProfileDb = {
    -6.6, -5.6, -5.3, -5.1, -4.9, -4.3, -3.6, -2.9, -2.1, -1.4, -0.8, -0.3, 0.0, 0.0, 0.0, 0.0};

}  // namespace

std::span<const double> paper_profile_db() { return kPaperProfileDb; }

SqueezingProfile rescale_profile(const SqueezingProfile& base, double leading_db) {
  if (leading_db > 0.0) {
    throw InputError(fmt::format("leading squeezing must be <= 0 dB, got {}", leading_db));
  }
  if (base.empty()) throw InputError("cannot rescale an empty profile");
  const std::vector<double> db = base.db();
  double base_leading = 0.0;
  for (double d : db) base_leading = std::min(base_leading, d);
  if (base_leading == 0.0) {
    if (leading_db == 0.0) return base;
    throw InputError("cannot rescale a vacuum profile to a non-zero squeezing level");
  }
  const double factor = leading_db / base_leading;
  std::vector<double> scaled;
  scaled.reserve(db.size());
  for (double d : db) scaled.push_back(d * factor);
  return SqueezingProfile::from_db(scaled);
}

SqueezingProfile paper_profile(double leading_db) {
  return rescale_profile(SqueezingProfile::from_db(paper_profile_db()), leading_db);
}

void ResourceSpec::validate() const {
  const int n = modes();
  if (n == 0) throw InputError("resource profile is empty");
  if (u_sqz.modes() != n) {
    throw InputError(fmt::format("u_sqz acts on {} modes but the profile has {}", u_sqz.modes(), n));
  }
  if (static_cast<int>(loss.size()) != n) {
    throw InputError(fmt::format("loss has {} entries for {} modes", loss.size(), n));
  }
  for (std::size_t i = 0; i < loss.size(); ++i) {
    if (!(loss[i] >= 0.0 && loss[i] <= 1.0)) {
      throw InputError(fmt::format("loss[{}] = {} outside [0, 1]", i, loss[i]));
    }
  }
  if (!(dark_noise >= 0.0)) throw InputError(fmt::format("dark_noise = {} is negative", dark_noise));
  for (int i = 0; i < n; ++i) {
    if (profile[static_cast<std::size_t>(i)] > 1.0 + 1e-12) {
      throw InputError(fmt::format("profile entry {} = {} is above the vacuum level", i,
                                   profile[static_cast<std::size_t>(i)]));
    }
  }
}

ResourceSpec make_resource(SqueezingProfile profile, double loss, double dark_noise) {
  const int n = profile.size();
  ResourceSpec spec{std::move(profile), default_usqz(n),
                    std::vector<double>(static_cast<std::size_t>(n), loss), dark_noise};
  spec.validate();
  return spec;
}

CovarianceMatrix build_pixel_covariance(const ResourceSpec& spec) {
  spec.validate();
  const CovarianceMatrix squeezers = CovarianceMatrix::squeezed(spec.profile.variances());
  const CovarianceMatrix pixel = apply_symplectic(unitary_to_symplectic(spec.u_sqz.adjoint()), squeezers);
  const CovarianceMatrix lossy = apply_loss(pixel, spec.loss);
  if (spec.dark_noise == 0.0) return lossy;
  Matrix data = lossy.data();
  data.diagonal().array() += spec.dark_noise;
  return CovarianceMatrix(std::move(data));
}

CovarianceMatrix squeezer_covariance(const SqueezingProfile& profile, double loss) {
  return apply_loss(CovarianceMatrix::squeezed(profile.variances()), loss);
}

ModeUnitary default_usqz(int modes) {
  if (modes < 1) throw InputError("mode count must be positive");
  const double h = std::sqrt(2.0 * std::numbers::pi / modes);
  const double centre = 0.5 * (modes - 1);
  Matrix hamiltonian = Matrix::Zero(modes, modes);
  for (int j = 0; j < modes; ++j) {
    const double t = (j - centre) * h;
    hamiltonian(j, j) = 2.0 / (h * h) + t * t;
    if (j + 1 < modes) hamiltonian(j, j + 1) = hamiltonian(j + 1, j) = -1.0 / (h * h);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hamiltonian);
  Matrix shapes = solver.eigenvectors();
  for (int k = 0; k < modes; ++k) {
    // First component within 1e-9 of the largest magnitude decides the sign;
    // odd envelopes have mirror-image ties.
    const double peak = shapes.col(k).cwiseAbs().maxCoeff();
    Eigen::Index arg = 0;
    while (std::abs(shapes(arg, k)) < peak - 1e-9) ++arg;
    if (shapes(arg, k) < 0.0) shapes.col(k) = -shapes.col(k);
  }
  return ModeUnitary(shapes.transpose().cast<std::complex<double>>());
}

}  // namespace qnet::resource
