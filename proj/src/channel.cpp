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

#include "pinch/channel.hpp"

#include <numbers>
#include <stdexcept>

namespace pinch {

namespace {

constexpr double kMinSeparation = 1.0e-3;

void check_dims(const SystemLayout &layout, const Grid<Point3> &grid, const UserDrop &users)
{
    if (grid.rows() != layout.pas_per_waveguide || grid.cols() != layout.waveguides)
        throw std::invalid_argument("compute_gains: grid does not match layout");
    if (int(layout.feed_points.size()) != layout.waveguides)
        throw std::invalid_argument("compute_gains: feed point count does not match M");
    if (users.positions.empty())
        throw std::invalid_argument("compute_gains: empty user drop");
}

void fill_cell(GainTensor &g, const SystemLayout &layout, const Grid<Point3> &grid, const UserDrop &users,
               double eta_eff, int n, int m)
{
    const double lambda = layout.wavelength();
    g.feed_pa(n, m) = feed_phase(layout.feed_points[m], grid(n, m), lambda, eta_eff);
    for (int k = 0; k < int(users.positions.size()); ++k)
        g.pa_user(n, m, k) = pa_user_gain(grid(n, m), users.positions[k], lambda);
}

} // namespace

cplx pa_user_gain(const Point3 &pa, const Point3 &user, double wavelength)
{
    const double d = distance(pa, user);
    if (!(d >= kMinSeparation))
        throw std::domain_error("pa_user_gain: PA-user separation below 1 mm");
    const double mag = wavelength / (4.0 * std::numbers::pi * d);
    return std::polar(mag, -2.0 * std::numbers::pi * std::fmod(d / wavelength, 1.0));
}

cplx feed_phase(const Point3 &fp, const Point3 &pa, double wavelength, double eta_eff)
{
    if (!(eta_eff > 1.0))
        throw std::invalid_argument("feed_phase: effective refractive index must exceed 1");
    const double cycles = eta_eff * distance(fp, pa) / wavelength;
    return std::polar(1.0, -2.0 * std::numbers::pi * std::fmod(cycles, 1.0));
}

GainTensor compute_gains_serial(const SystemLayout &layout, const Grid<Point3> &grid, const UserDrop &users,
                                double eta_eff)
{
    check_dims(layout, grid, users);
    GainTensor g(grid.rows(), grid.cols(), int(users.positions.size()));
    for (int n = 0; n < grid.rows(); ++n)
        for (int m = 0; m < grid.cols(); ++m)
            fill_cell(g, layout, grid, users, eta_eff, n, m);
    return g;
}

GainTensor compute_gains(const SystemLayout &layout, const Grid<Point3> &grid, const UserDrop &users,
                         double eta_eff)
{
    check_dims(layout, grid, users);
    GainTensor g(grid.rows(), grid.cols(), int(users.positions.size()));
    const int cells = grid.rows() * grid.cols();
#pragma omp parallel for schedule(static)
    for (int c = 0; c < cells; ++c)
        fill_cell(g, layout, grid, users, eta_eff, c / grid.cols(), c % grid.cols());
    return g;
}

EffectiveChannel effective_channel(const ActivationMask &mask, const GainTensor &gains)
{
    if (mask.pas() != gains.pas() || mask.waveguides() != gains.waveguides())
        throw std::invalid_argument("effective_channel: mask and gain dimensions differ");
    EffectiveChannel out;
    out.h.assign(gains.users(), Eigen::VectorXcd::Zero(gains.waveguides()));
    for (int k = 0; k < gains.users(); ++k)
        for (int m = 0; m < gains.waveguides(); ++m) {
            cplx acc{0.0, 0.0};
            for (int n = 0; n < gains.pas(); ++n)
                if (mask.active(n, m))
                    acc += gains.pa_user(n, m, k) * gains.feed_pa(n, m);
            out.h[k](m) = acc;
        }
    return out;
}

PowerAllocation power_coefficients(const ActivationMask &mask)
{
    PowerAllocation p;
    p.L = Eigen::VectorXd::Zero(mask.waveguides());
    for (int m = 0; m < mask.waveguides(); ++m) {
        const int c = mask.count_on(m);
        if (c > 0)
            p.L(m) = std::sqrt(1.0 / c);
    }
    return p;
}

LiftedChannel lift_channels(const EffectiveChannel &channels, const PowerAllocation &power, double noise_power)
{
    if (!(noise_power > 0.0))
        throw std::invalid_argument("lift_channels: noise power must be positive");
    LiftedChannel out;
    out.noise_power = noise_power;
    const double s = 1.0 / std::sqrt(noise_power);
    for (const auto &h : channels.h) {
        if (h.size() != power.L.size())
            throw std::invalid_argument("lift_channels: channel and power-allocation lengths differ");
        const Eigen::VectorXcd v = (h.array() * power.L.array().cast<cplx>()).matrix() * s;
        out.H.push_back(v * v.adjoint());
    }
    return out;
}

} // namespace pinch
