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

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace pinch {

// Propagation speed used for the wavelength (c / f_c).
inline constexpr double kSpeedOfLight = 3.0e8;

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool operator==(const Point3 &) const = default;
};

inline double distance(const Point3 &a, const Point3 &b)
{
    const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Axis-aligned rectangle in the z = 0 plane.
struct Rect {
    double x_min = 0.0;
    double y_min = -10.0;
    double x_max = 20.0;
    double y_max = 10.0;
};

// Dense row-major N x M table indexed (pa, waveguide).
template <typename T>
class Grid {
  public:
    Grid() = default;
    Grid(int rows, int cols, T fill = T{}) : rows_(rows), cols_(cols), data_(std::size_t(rows) * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    T &operator()(int n, int m) { return data_[std::size_t(n) * cols_ + m]; }
    const T &operator()(int n, int m) const { return data_[std::size_t(n) * cols_ + m]; }

    const std::vector<T> &data() const { return data_; }

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> data_;
};

// Waveguides run parallel to the x-axis, starting at their feed point (x = 0 end).
// Defaults reproduce the two-waveguide deployment used in the evaluation.
struct SystemLayout {
    int waveguides = 2;          // M
    int pas_per_waveguide = 20;  // N
    double length = 20.0;        // D, meters
    double pa_height = 3.0;      // meters
    std::vector<Point3> feed_points{{0.0, -5.0, 3.0}, {0.0, 5.0, 3.0}};
    double carrier_freq = 2.8e9; // Hz
    Rect user_region{};
    int users = 4;               // K

    double wavelength() const { return kSpeedOfLight / carrier_freq; }
    double pa_spacing() const { return length / (pas_per_waveguide - 1); }

    // Waveguide/PA/region checks; throws std::invalid_argument.
    void validate_geometry() const;
    // validate_geometry() plus the overload condition K > M.
    void validate() const;
};

struct UserDrop {
    std::vector<Point3> positions;
    std::uint64_t seed = 0;
};

// Candidate PA positions, N x M. Row n holds x = n * D / (N - 1).
Grid<Point3> pa_grid(const SystemLayout &layout);

// K i.i.d. uniform positions in the user region, z = 0. Pure function of (layout, seed).
UserDrop sample_users(const SystemLayout &layout, std::uint64_t seed);

} // namespace pinch
