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

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "pinch/activation_mask.hpp"
#include "pinch/channel.hpp"
#include "pinch/geometry.hpp"

namespace pinch {

class DegenerateChannelError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class BudgetExceededError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

double sum_distances(const Point3 &pa, const UserDrop &users);

// Sum-distance table d(n, m) over the PA grid (OpenMP-parallel) and its serial reference.
Grid<double> distance_table(const Grid<Point3> &grid, const UserDrop &users);
Grid<double> distance_table_serial(const Grid<Point3> &grid, const UserDrop &users);

// Per waveguide, the PA index with the smallest sum distance (lowest n on ties).
std::vector<int> initial_selection(const Grid<Point3> &grid, const UserDrop &users);

// Sum over k <= i of |h_k^H h_i| / (|h_k| |h_i|), self-terms included.
// Throws DegenerateChannelError when any channel has zero norm.
double spatial_correlation(const EffectiveChannel &channels);

struct GreedyStep {
    PaIndex candidate;
    double rho_trial = 0.0;
    bool accepted = false;
};

struct GreedyResult {
    ActivationMask mask;
    double initial_rho = 0.0;
    double rho = 0.0;               // correlation of the returned mask
    int candidate_evaluations = 0;  // always N*M - M
    std::vector<GreedyStep> steps;
};

// Distance-seeded greedy activation driven by spatial correlation.
GreedyResult greedy_activation(const GainTensor &gains, const Grid<Point3> &grid, const UserDrop &users);

using MaskEvaluator = std::function<double(const ActivationMask &)>;

struct ExhaustiveResult {
    ActivationMask mask;
    double score = 0.0;
    std::int64_t masks_evaluated = 0;
};

inline constexpr std::int64_t kDefaultExhaustiveBudget = 4096;

// Every mask with at least one PA per waveguide, scored by `evaluate`; best score wins,
// first enumerated mask on ties. Throws BudgetExceededError when (2^N - 1)^M > budget.
ExhaustiveResult exhaustive_activation(const GainTensor &gains, const Grid<Point3> &grid, const UserDrop &users,
                                       const MaskEvaluator &evaluate,
                                       std::int64_t budget = kDefaultExhaustiveBudget);

struct BaselineMasks {
    ActivationMask full;    // every PA on
    ActivationMask nearest; // initial_selection only
};

BaselineMasks baseline_masks(const SystemLayout &layout, const Grid<Point3> &grid, const UserDrop &users);

} // namespace pinch
