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

#include "pinch/activation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace pinch {

double sum_distances(const Point3 &pa, const UserDrop &users)
{
    double total = 0.0;
    for (const auto &u : users.positions)
        total += distance(pa, u);
    return total;
}

Grid<double> distance_table_serial(const Grid<Point3> &grid, const UserDrop &users)
{
    Grid<double> d(grid.rows(), grid.cols());
    for (int n = 0; n < grid.rows(); ++n)
        for (int m = 0; m < grid.cols(); ++m)
            d(n, m) = sum_distances(grid(n, m), users);
    return d;
}

Grid<double> distance_table(const Grid<Point3> &grid, const UserDrop &users)
{
    Grid<double> d(grid.rows(), grid.cols());
    const int cells = grid.rows() * grid.cols();
#pragma omp parallel for schedule(static)
    for (int c = 0; c < cells; ++c) {
        const int n = c / grid.cols(), m = c % grid.cols();
        d(n, m) = sum_distances(grid(n, m), users);
    }
    return d;
}

namespace {

std::vector<int> argmin_per_waveguide(const Grid<double> &d)
{
    std::vector<int> best(d.cols(), 0);
    for (int m = 0; m < d.cols(); ++m)
        for (int n = 1; n < d.rows(); ++n)
            if (d(n, m) < d(best[m], m))
                best[m] = n;
    return best;
}

} // namespace

std::vector<int> initial_selection(const Grid<Point3> &grid, const UserDrop &users)
{
    return argmin_per_waveguide(distance_table(grid, users));
}

double spatial_correlation(const EffectiveChannel &channels)
{
    const int K = channels.users();
    std::vector<double> norms(K);
    for (int k = 0; k < K; ++k) {
        norms[k] = channels.h[k].norm();
        if (!(norms[k] > 0.0))
            throw DegenerateChannelError("spatial_correlation: user " + std::to_string(k) + " has a zero channel");
    }
    double rho = 0.0;
    for (int k = 0; k < K; ++k)
        for (int i = k; i < K; ++i)
            rho += std::abs(channels.h[k].dot(channels.h[i])) / (norms[k] * norms[i]);
    return rho;
}

GreedyResult greedy_activation(const GainTensor &gains, const Grid<Point3> &grid, const UserDrop &users)
{
    const int N = gains.pas(), M = gains.waveguides(), K = gains.users();
    if (grid.rows() != N || grid.cols() != M || int(users.positions.size()) != K)
        throw std::invalid_argument("greedy_activation: gains, grid and users disagree");

    const Grid<double> dist = distance_table(grid, users);

    GreedyResult out;
    out.mask = ActivationMask(N, M);
    const std::vector<int> seed = argmin_per_waveguide(dist);
    for (int m = 0; m < M; ++m)
        out.mask.activate({seed[m], m});

    EffectiveChannel current = effective_channel(out.mask, gains);
    out.rho = out.initial_rho = spatial_correlation(current);

    // Remaining candidates, globally ascending in sum distance; ties by (n, m).
    std::vector<PaIndex> pending;
    pending.reserve(std::size_t(N) * M);
    for (int n = 0; n < N; ++n)
        for (int m = 0; m < M; ++m)
            if (!out.mask.active(n, m))
                pending.push_back({n, m});
    std::stable_sort(pending.begin(), pending.end(),
                     [&dist](const PaIndex &a, const PaIndex &b) { return dist(a.n, a.m) < dist(b.n, b.m); });

    EffectiveChannel trial = current;
    for (const PaIndex c : pending) {
        const cplx g = gains.feed_pa(c.n, c.m);
        for (int k = 0; k < K; ++k) {
            trial.h[k] = current.h[k];
            trial.h[k](c.m) += gains.pa_user(c.n, c.m, k) * g;
        }
        const double rho_trial = spatial_correlation(trial);
        ++out.candidate_evaluations;

        const bool accept = rho_trial < out.rho;
        out.steps.push_back({c, rho_trial, accept});
        if (accept) {
            out.mask.activate(c);
            out.rho = rho_trial;
            std::swap(current, trial);
        }
    }
    return out;
}

ExhaustiveResult exhaustive_activation(const GainTensor &gains, const Grid<Point3> &grid, const UserDrop &users,
                                       const MaskEvaluator &evaluate, std::int64_t budget)
{
    const int N = gains.pas(), M = gains.waveguides();
    if (grid.rows() != N || grid.cols() != M || int(users.positions.size()) != gains.users())
        throw std::invalid_argument("exhaustive_activation: gains, grid and users disagree");
    if (N >= 62)
        throw BudgetExceededError("exhaustive_activation: N too large to enumerate");

    const std::int64_t per_guide = (std::int64_t(1) << N) - 1;
    std::int64_t total = 1;
    for (int m = 0; m < M; ++m) {
        if (total > budget / per_guide + 1)
            throw BudgetExceededError("exhaustive_activation: search space exceeds budget");
        total *= per_guide;
    }
    if (total > budget)
        throw BudgetExceededError("exhaustive_activation: " + std::to_string(total) + " masks exceed budget " +
                                  std::to_string(budget));

    ExhaustiveResult best;
    best.score = -std::numeric_limits<double>::infinity();
    // Mixed-radix counter: digit m is the non-empty subset (1..2^N-1) of PAs on waveguide m.
    std::vector<std::int64_t> digit(M, 1);
    for (std::int64_t i = 0; i < total; ++i) {
        ActivationMask mask(N, M);
        for (int m = 0; m < M; ++m)
            for (int n = 0; n < N; ++n)
                if (digit[m] >> n & 1)
                    mask.activate({n, m});
        const double score = evaluate(mask);
        ++best.masks_evaluated;
        if (score > best.score) {
            best.score = score;
            best.mask = mask;
        }
        for (int m = 0; m < M; ++m) {
            if (++digit[m] <= per_guide)
                break;
            digit[m] = 1;
        }
    }
    return best;
}

BaselineMasks baseline_masks(const SystemLayout &layout, const Grid<Point3> &grid, const UserDrop &users)
{
    const int N = layout.pas_per_waveguide, M = layout.waveguides;
    if (grid.rows() != N || grid.cols() != M)
        throw std::invalid_argument("baseline_masks: grid does not match layout");
    BaselineMasks out{ActivationMask::all_on(N, M), ActivationMask(N, M)};
    const std::vector<int> nearest = initial_selection(grid, users);
    for (int m = 0; m < M; ++m)
        out.nearest.activate({nearest[m], m});
    return out;
}

} // namespace pinch
