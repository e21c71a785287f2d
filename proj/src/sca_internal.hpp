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

#include <random>
#include <vector>

#include "pinch/beamform.hpp"

namespace pinch {

// Split of the common rate meeting r_k + R_kp >= R_min first, then following `preferred`.
// Sets *qos_met to false (and returns a scaled-down floor) when R_c cannot cover the floor.
std::vector<double> qos_split(const std::vector<double> &preferred, double common, const std::vector<double> &priv,
                              double r_min, bool *qos_met);

namespace detail {

// Surrogate of log2(1 + A / B) as `offset + form`, where A = scale_a * x[a] and
// B = scale_b * x[b]. The minorant adds a 2x2 block (recorded in *blocks) and two
// equality rows to `prob`; the affine surrogate adds nothing.
struct RateExpr {
    conic::LinearForm form;
    double offset = 0.0;
};

RateExpr rate_expression(conic::ConicProblem &prob, int a, double scale_a, int b, double scale_b, double a_t,
                         double b_t, Surrogate kind, std::vector<int> *blocks);

// dst += sign * src
void accumulate(conic::LinearForm &dst, const conic::LinearForm &src, double sign);

// Streams whose top eigenvalue is below this fraction of P_max are treated as switched off.
inline constexpr double kZeroPowerFraction = 1e-6;

std::vector<double> flatten(const SurrogatePoint &p);
SurrogatePoint unflatten(const std::vector<double> &v, int K);
double quad_gain(const Eigen::MatrixXcd &H, const Eigen::VectorXcd &w);
void validate_config(const ScaConfig &cfg);
// Draw from CN(0, W), rescaled to power Tr(W).
Eigen::VectorXcd sample_from(const Eigen::MatrixXcd &W, std::mt19937_64 &rng);

} // namespace detail
} // namespace pinch
