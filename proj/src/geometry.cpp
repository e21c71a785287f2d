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

#include "pinch/geometry.hpp"

#include <random>
#include <string>

namespace pinch {

void SystemLayout::validate() const
{
    validate_geometry();
    if (users <= waveguides)
        throw std::invalid_argument("layout: K must exceed M (K=" + std::to_string(users) +
                                    ", M=" + std::to_string(waveguides) + ")");
}

void SystemLayout::validate_geometry() const
{
    if (waveguides < 1)
        throw std::invalid_argument("layout: at least one waveguide is required");
    if (pas_per_waveguide < 2)
        throw std::invalid_argument("layout: N must be at least 2");
    if (!(length > 0.0) || !std::isfinite(length))
        throw std::invalid_argument("layout: waveguide length must be positive");
    if (!(carrier_freq > 0.0))
        throw std::invalid_argument("layout: carrier frequency must be positive");
    if (int(feed_points.size()) != waveguides)
        throw std::invalid_argument("layout: need exactly one feed point per waveguide");
    for (const auto &fp : feed_points) {
        if (!std::isfinite(fp.x) || !std::isfinite(fp.y) || !std::isfinite(fp.z))
            throw std::invalid_argument("layout: non-finite feed point");
        if (fp.x != 0.0 || fp.z != pa_height)
            throw std::invalid_argument("layout: feed point must sit at the x = 0 end at PA height");
    }
    if (pa_spacing() < wavelength() / 2.0)
        throw std::invalid_argument("layout: PA spacing " + std::to_string(pa_spacing()) +
                                    " m is below half a wavelength");
    if (!(user_region.x_max > user_region.x_min) || !(user_region.y_max > user_region.y_min))
        throw std::invalid_argument("layout: degenerate user region");
}

Grid<Point3> pa_grid(const SystemLayout &layout)
{
    layout.validate_geometry();
    const int N = layout.pas_per_waveguide, M = layout.waveguides;
    const double step = layout.pa_spacing();
    Grid<Point3> grid(N, M);
    for (int n = 0; n < N; ++n) {
        // Last PA pinned to D exactly so the grid is symmetric about D/2.
        const double x = (n == N - 1) ? layout.length : step * n;
        for (int m = 0; m < M; ++m)
            grid(n, m) = Point3{x, layout.feed_points[m].y, layout.pa_height};
    }
    return grid;
}

UserDrop sample_users(const SystemLayout &layout, std::uint64_t seed)
{
    const Rect &r = layout.user_region;
    if (!(r.x_max > r.x_min) || !(r.y_max > r.y_min))
        throw std::invalid_argument("sample_users: degenerate user region");

    std::mt19937_64 rng(seed);
    // Raw 53-bit draws keep the mapping identical across standard library implementations.
    auto unit = [&rng] { return double(rng() >> 11) * 0x1.0p-53; };

    UserDrop drop;
    drop.seed = seed;
    drop.positions.reserve(layout.users);
    for (int k = 0; k < layout.users; ++k) {
        const double x = r.x_min + (r.x_max - r.x_min) * unit();
        const double y = r.y_min + (r.y_max - r.y_min) * unit();
        drop.positions.push_back(Point3{x, y, 0.0});
    }
    return drop;
}

} // namespace pinch
