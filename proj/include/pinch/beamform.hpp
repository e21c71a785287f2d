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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pinch/channel.hpp"
#include "pinch/conic.hpp"

namespace pinch {

// Lifted beamformers: W_c and one W_{k,p} per user, all M x M Hermitian PSD.
struct Beamformers {
    Eigen::MatrixXcd common;
    std::vector<Eigen::MatrixXcd> priv;

    double total_power() const;
};

// Re Tr(H W).
double trace_gain(const Eigen::MatrixXcd &H, const Eigen::MatrixXcd &W);

// log2(1 + Tr(H_k W_c) / (sum_i Tr(H_k W_i,p) + noise)) for every user.
std::vector<double> rate_common(const LiftedChannel &H, const Eigen::MatrixXcd &common,
                                const std::vector<Eigen::MatrixXcd> &priv, double noise);

// log2(1 + Tr(H_k W_k,p) / (sum_{i != k} Tr(H_k W_i,p) + noise)) for every user.
std::vector<double> rate_private(const LiftedChannel &H, const std::vector<Eigen::MatrixXcd> &priv, double noise);

// ---------------------------------------------------------------------------
// First-order surrogate of log2(1 + A / B) around (A_t, B_t).

struct AffineRate {
    double slope_a = 0.0;
    double slope_b = 0.0;
    double offset = 0.0;

    double operator()(double a, double b) const { return offset + slope_a * a + slope_b * b; }
};

AffineRate linearize_rate(double a_t, double b_t);

double surrogate_mu(double a, double b, double a_t, double b_t);

// Concave global minorant of log2(1 + A / B) with the same value and gradient as
// surrogate_mu at (A_t, B_t): log(A + B) is bounded below by its tangent hyperbola
// log x_t + 1 - x_t / (A + B) and -log B by its tangent line.
double surrogate_minorant(double a, double b, double a_t, double b_t);

// Which surrogate the SCA subproblems use. `affine` is the plain first-order
// expansion; it is not a bound and can overshoot badly once a stream switches off.
enum class Surrogate { minorant, affine };

// Expansion points for the SINR numerators (A) and denominators (B), per user.
struct SurrogatePoint {
    std::vector<double> a_p, b_p, a_c, b_c;

    int users() const { return int(a_p.size()); }
};

// Expansion numerators are clamped to at least this fraction of their denominator.
inline constexpr double kMinExpansion = 1e-9;

// Tight expansion point at the given beamformers (A = signal trace, B = interference + noise).
SurrogatePoint expansion_point(const LiftedChannel &H, const Beamformers &W, double noise);

// Convex SCA subproblem plus the bookkeeping needed to read its solution back.
// Internally W is expressed in units of P_max and every A/B variable in units of
// its expansion value, so coefficients stay O(1); the accessors undo both scalings.
struct Subproblem {
    conic::ConicProblem problem;
    int users = 0;
    double power_scale = 1.0;
    double objective_offset = 0.0; // constant part of the surrogate objective
    std::vector<double> scale_ap, scale_bp, scale_ac, scale_bc;
    std::vector<int> hyperbolic; // 2x2 blocks of the minorant, [u 1; 1 s] with u s >= 1
    Eigen::MatrixXcd common_basis; // W_c = V X V^H when set, X = W_c otherwise
    // Variable indices.
    int block_common = 0;
    std::vector<int> block_priv;
    std::vector<int> a_p, b_p, a_c, b_c, split;
    int mu_c = 0; // free scalar

    Beamformers beamformers(const conic::ConicSolution &s) const;
    SurrogatePoint relaxation(const conic::ConicSolution &s) const; // solver's (A, B)
    std::vector<double> common_split(const conic::ConicSolution &s) const;
    double common_surrogate(const conic::ConicSolution &s) const;
    double objective(const conic::ConicSolution &s) const { return s.objective + objective_offset; }
};

Subproblem build_subproblem(const LiftedChannel &H, const SurrogatePoint &point, double p_max, double r_min,
                            double noise, Surrogate surrogate = Surrogate::minorant,
                            const Eigen::MatrixXcd *common_basis = nullptr);

struct InitialPoint {
    Beamformers W;
    SurrogatePoint point;
};

// Half the budget on the common stream along the principal eigenvector of sum_k H_k,
// the rest split evenly over private streams along each user's principal eigenvector.
InitialPoint initial_point(const LiftedChannel &H, double p_max, double noise);

struct RankOne {
    Eigen::VectorXcd vector;
    double residual = 0.0; // lambda_2 / lambda_1, 0 for the zero matrix
};

// w = sqrt(lambda_1) u_1 with the largest-magnitude entry made real positive.
// A matrix whose top eigenvalue is <= zero_tol counts as the zero matrix.
RankOne extract_rank_one(const Eigen::MatrixXcd &W, double zero_tol = 0.0);

struct ScaConfig {
    double p_max = 10.0;          // same power unit as the lifted channels
    double r_min = 0.1;           // bits/s/Hz
    double noise = 1.0;           // noise power seen by the lifted channels
    double eps = 1e-3;            // stop when the objective moves less than this
    int max_iterations = 50;
    double rank_tol = 1e-5;
    int randomization_candidates = 200;
    Surrogate surrogate = Surrogate::minorant;
    std::uint64_t seed = 0;       // randomization stream
    conic::SolverOptions solver{};
    std::ostream *log = nullptr;  // per-iteration trace when set
};

struct IterationRecord {
    int iteration = 0;
    double objective = 0.0;
    double max_violation = 0.0;
    double max_rank_residual = 0.0;
    double step = 1.0; // fraction of the move toward the new expansion point
};

enum class ScaStatus { converged, max_iterations, stalled, infeasible, solver_failure };

std::string to_string(ScaStatus s);

struct BeamformingSolution {
    Beamformers W;                       // relaxed solution of the last accepted subproblem
    Eigen::VectorXcd w_common;
    std::vector<Eigen::VectorXcd> w_priv;
    std::vector<double> common_split;
    std::vector<double> objective_trace; // accepted subproblem objectives
    std::vector<IterationRecord> log;
    std::vector<double> rank_residuals;  // of W: [common, private...]
    int iterations = 0;                  // subproblems solved, refinement included
    ScaStatus status = ScaStatus::infeasible;
    bool randomized = false;             // W was not rank-one, vectors come from a fallback
    bool refined = false;                // vectors come from the fixed-direction common refinement
    std::vector<double> refinement_trace;

    double objective() const { return objective_trace.empty() ? 0.0 : objective_trace.back(); }
    double max_rank_residual() const;
};

BeamformingSolution sca_beamforming(const LiftedChannel &H, const ScaConfig &config);

struct RsmaRates {
    std::vector<double> common_per_user; // R_{k,c}
    double common = 0.0;                 // R_c = min_k R_{k,c}
    std::vector<double> priv;            // R_{k,p}
    std::vector<double> split;           // r_{k,c}
    std::vector<double> total;           // r_{k,c} + R_{k,p}
    double sum_rate = 0.0;               // R_c + sum_k R_{k,p}
};

// Rates from the recovered vectors: |h_k^H (L o w)|^2 over the given noise power.
RsmaRates evaluate_solution(const EffectiveChannel &channels, const PowerAllocation &power,
                            const BeamformingSolution &solution, double noise);

// Rates straight from the vectors, with a caller-supplied split (rescaled to fit R_c).
RsmaRates evaluate_vectors(const EffectiveChannel &channels, const PowerAllocation &power,
                           const Eigen::VectorXcd &w_common, const std::vector<Eigen::VectorXcd> &w_priv,
                           const std::vector<double> &split, double noise);

// ---------------------------------------------------------------------------
// Multi-waveguide NOMA baseline with SIC.

struct NomaSolution {
    std::vector<Eigen::MatrixXcd> W;
    std::vector<Eigen::VectorXcd> w;
    std::vector<int> order;              // order[k] = SIC rank of user k (0 = strongest)
    std::vector<double> objective_trace;
    std::vector<IterationRecord> log;
    std::vector<double> rank_residuals;
    int iterations = 0;
    ScaStatus status = ScaStatus::infeasible;
    bool randomized = false;

    double objective() const { return objective_trace.empty() ? 0.0 : objective_trace.back(); }
};

// SIC ranks by descending |L o h_k| (ties by user index).
std::vector<int> noma_order(const LiftedChannel &H);

// Per-user NOMA rate: min over users j at least as strong as k of decoding message k at j.
std::vector<double> noma_rates(const LiftedChannel &H, const std::vector<Eigen::MatrixXcd> &W,
                               const std::vector<int> &order, double noise);

NomaSolution noma_beamforming(const LiftedChannel &H, const ScaConfig &config);

// ---------------------------------------------------------------------------
// Conventional-antenna baseline: one antenna at each feed point, free-space LoS only.

struct ConventionalChannels {
    EffectiveChannel channels;
    PowerAllocation power; // all ones
    LiftedChannel lifted;
};

ConventionalChannels conventional_channels(const SystemLayout &layout, const UserDrop &users,
                                           double noise_power = 1.0);

} // namespace pinch
