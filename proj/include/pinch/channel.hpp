// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "pinch/activation_mask.hpp"
#include "pinch/geometry.hpp"

namespace pinch {

using cplx = std::complex<double>;

// Waveguide effective refractive index used when none is configured.
inline constexpr double kDefaultEtaEff = 1.4;

// Free-space LoS gain from a radiating element to a user:
// magnitude lambda / (4 pi d), phase -2 pi d / lambda.
// Throws std::domain_error for separations below 1 mm.
cplx pa_user_gain(const Point3 &pa, const Point3 &user, double wavelength);

// In-waveguide phase from the feed point to a PA, exp(-j 2 pi eta d / lambda).
cplx feed_phase(const Point3 &fp, const Point3 &pa, double wavelength, double eta_eff);

// h_{n,m->k} and g_{n,m} for every candidate PA.
class GainTensor {
  public:
    GainTensor() = default;
    GainTensor(int pas, int waveguides, int users)
        : pas_(pas), waveguides_(waveguides), users_(users),
          pa_user_(std::size_t(pas) * waveguides * users), feed_pa_(std::size_t(pas) * waveguides)
    {
    }

    int pas() const { return pas_; }
    int waveguides() const { return waveguides_; }
    int users() const { return users_; }

    cplx &pa_user(int n, int m, int k) { return pa_user_[(std::size_t(n) * waveguides_ + m) * users_ + k]; }
    cplx pa_user(int n, int m, int k) const { return pa_user_[(std::size_t(n) * waveguides_ + m) * users_ + k]; }
    cplx &feed_pa(int n, int m) { return feed_pa_[std::size_t(n) * waveguides_ + m]; }
    cplx feed_pa(int n, int m) const { return feed_pa_[std::size_t(n) * waveguides_ + m]; }

    bool operator==(const GainTensor &) const = default;

  private:
    int pas_ = 0, waveguides_ = 0, users_ = 0;
    std::vector<cplx> pa_user_;
    std::vector<cplx> feed_pa_;
};

// OpenMP-parallel over the (n, m) grid.
GainTensor compute_gains(const SystemLayout &layout, const Grid<Point3> &grid, const UserDrop &users,
                         double eta_eff = kDefaultEtaEff);
// Straight loop; reference for compute_gains.
GainTensor compute_gains_serial(const SystemLayout &layout, const Grid<Point3> &grid, const UserDrop &users,
                                double eta_eff = kDefaultEtaEff);

// Per-user M-dimensional channel h_k.
struct EffectiveChannel {
    std::vector<Eigen::VectorXcd> h;

    int users() const { return int(h.size()); }
    int waveguides() const { return h.empty() ? 0 : int(h.front().size()); }
};

EffectiveChannel effective_channel(const ActivationMask &mask, const GainTensor &gains);

// Equal power split over the active PAs of each waveguide.
struct PowerAllocation {
    Eigen::VectorXd L;
};

// L_m = sqrt(1 / active count on m), or 0 for a waveguide with nothing active.
PowerAllocation power_coefficients(const ActivationMask &mask);

// H_k = (L o h_k)(L o h_k)^H / noise_power. The optimizer then works with unit noise;
// noise_power = 1 leaves the channels in physical units.
struct LiftedChannel {
    std::vector<Eigen::MatrixXcd> H;
    double noise_power = 1.0;

    int users() const { return int(H.size()); }
    int dim() const { return H.empty() ? 0 : int(H.front().rows()); }
};

LiftedChannel lift_channels(const EffectiveChannel &channels, const PowerAllocation &power, double noise_power = 1.0);

} // namespace pinch
