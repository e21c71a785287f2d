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

// Shared successive-convex-approximation loop for the RSMA and NOMA models.

#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "pinch/beamform.hpp"

namespace pinch::detail {

// Objective drops smaller than this are treated as non-decreasing.
inline constexpr double kMonotoneSlack = 1e-6;
inline constexpr int kMaxHalvings = 5;

template <typename Sub>
struct ScaRun {
    std::optional<Sub> sub;
    conic::ConicSolution sol;
    std::vector<double> point; // expansion point that produced `sol`
    std::vector<double> trace;
    std::vector<IterationRecord> log;
    int iterations = 0;
    ScaStatus status = ScaStatus::max_iterations;
};

inline std::vector<double> blend(const std::vector<double> &from, const std::vector<double> &to, double step)
{
    std::vector<double> out(from.size());
    for (std::size_t i = 0; i < from.size(); ++i)
        out[i] = from[i] + step * (to[i] - from[i]);
    return out;
}

// build(point) -> Sub with .problem and .objective(sol);
// expand(sub, sol) -> tight expansion point at the solution's beamformers;
// rank(sub, sol) -> largest rank residual, for the log only.
template <typename Sub, typename Build, typename Expand, typename Rank>
ScaRun<Sub> run_sca(Build build, Expand expand, Rank rank, std::vector<double> point, double start_objective,
                    const ScaConfig &cfg)
{
    ScaRun<Sub> run;
    double previous = start_objective;

    auto attempt = [&](const std::vector<double> &p, Sub &sub, conic::ConicSolution &sol) {
        sub = build(p);
        sol = conic::solve(sub.problem, cfg.solver);
        ++run.iterations;
        return sol.status == conic::SolveStatus::optimal;
    };

    for (int t = 0; t < cfg.max_iterations; ++t) {
        Sub sub;
        conic::ConicSolution sol;
        bool ok = attempt(point, sub, sol);
        double objective = ok ? sub.objective(sol) : -std::numeric_limits<double>::infinity();
        double step = 1.0;

        if (!run.sub) {
            if (!ok) {
                run.status = sol.status == conic::SolveStatus::infeasible ? ScaStatus::infeasible
                                                                          : ScaStatus::solver_failure;
                return run;
            }
        } else if (!ok || objective < run.trace.back() - kMonotoneSlack) {
            // Pull the expansion point back toward the last accepted one.
            const std::vector<double> target = point;
            ok = false;
            for (int h = 1; h <= kMaxHalvings && !ok; ++h) {
                step = std::ldexp(1.0, -h);
                point = blend(run.point, target, step);
                ok = attempt(point, sub, sol) && sub.objective(sol) >= run.trace.back() - kMonotoneSlack;
            }
            if (!ok) {
                run.status = ScaStatus::stalled;
                break;
            }
            objective = sub.objective(sol);
        }

        run.point = point;
        run.trace.push_back(objective);
        run.log.push_back({t, objective, conic::max_violation(sub.problem, sol), rank(sub, sol), step});
        if (cfg.log)
            *cfg.log << "sca iter " << t << " objective " << objective << " violation " << run.log.back().max_violation
                     << " rank " << run.log.back().max_rank_residual << " step " << step << "\n";
        run.sol = sol;
        run.sub = std::move(sub);

        if (std::abs(objective - previous) < cfg.eps) {
            run.status = ScaStatus::converged;
            break;
        }
        previous = objective;
        point = expand(*run.sub, run.sol);
    }
    return run;
}

} // namespace pinch::detail
