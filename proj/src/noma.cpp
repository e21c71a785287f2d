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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "pinch/beamform.hpp"
#include "sca_driver.hpp"
#include "sca_internal.hpp"

namespace pinch {

using conic::LinearForm;
using conic::Relation;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

// Message k is decoded at user j (j = k or j stronger than k).
struct Pair {
    int k = 0, j = 0;
};

std::vector<Pair> decoding_pairs(const std::vector<int> &order)
{
    std::vector<Pair> pairs;
    const int K = int(order.size());
    for (int k = 0; k < K; ++k)
        for (int j = 0; j < K; ++j)
            if (order[j] <= order[k])
                pairs.push_back({k, j});
    return pairs;
}

// Tight (A, B) for every pair: own signal at j, and the stronger users' messages
// (not yet cancelled) plus noise.
std::vector<double> noma_point(const LiftedChannel &H, const std::vector<MatrixXcd> &W, const std::vector<int> &order,
                               const std::vector<Pair> &pairs, double noise)
{
    std::vector<double> p;
    p.reserve(2 * pairs.size());
    for (const Pair &q : pairs) {
        double b = noise;
        for (int i = 0; i < int(W.size()); ++i)
            if (order[i] < order[q.k])
                b += std::max(0.0, trace_gain(H.H[q.j], W[i]));
        const double a = std::max(std::max(0.0, trace_gain(H.H[q.j], W[q.k])), kMinExpansion * b);
        p.push_back(a);
        p.push_back(b);
    }
    return p;
}

struct NomaSub {
    conic::ConicProblem problem;
    double power_scale = 1.0;
    double objective_offset = 0.0;
    std::vector<int> blocks;

    double objective(const conic::ConicSolution &s) const { return s.objective + objective_offset; }
    std::vector<MatrixXcd> beamformers(const conic::ConicSolution &s) const
    {
        std::vector<MatrixXcd> W;
        for (int b : blocks)
            W.push_back(power_scale * s.blocks.at(b));
        return W;
    }
};

NomaSub build_noma(const LiftedChannel &H, const std::vector<int> &order, const std::vector<Pair> &pairs,
                   const std::vector<double> &point, const ScaConfig &cfg)
{
    const int K = H.users(), M = H.dim();
    NomaSub sp;
    sp.power_scale = cfg.p_max;
    auto &prob = sp.problem;
    prob.sense = conic::Sense::maximize;
    for (int k = 0; k < K; ++k)
        sp.blocks.push_back(prob.add_block(M));
    std::vector<int> rate(K);
    for (int k = 0; k < K; ++k)
        rate[k] = prob.add_free();

    for (std::size_t n = 0; n < pairs.size(); ++n) {
        const auto [k, j] = pairs[n];
        const double a_t = point[2 * n], b_t = point[2 * n + 1];
        const double sa = std::max(a_t, 1e-3 * b_t), sb = b_t;
        const int a = prob.add_nonneg(), b = prob.add_nonneg();
        const MatrixXcd &Hj = H.H[j];
        prob.add_constraint(LinearForm{{{sp.blocks[k], Hj * (cfg.p_max / sa)}}, {{a, -1.0}}, {}},
                            Relation::greater_equal, 0.0, "signal");
        LinearForm f;
        f.nonneg.push_back({b, 1.0});
        for (int i = 0; i < K; ++i)
            if (order[i] < order[k])
                f.blocks.push_back({sp.blocks[i], -Hj * (cfg.p_max / sb)});
        prob.add_constraint(std::move(f), Relation::greater_equal, cfg.noise / sb, "interference");

        // R_k <= mu_kj
        const auto mu = detail::rate_expression(prob, a, sa, b, sb, a_t, b_t, cfg.surrogate, nullptr);
        LinearForm g = mu.form;
        g.free.push_back({rate[k], -1.0});
        prob.add_constraint(std::move(g), Relation::greater_equal, -mu.offset, "decode");
    }
    for (int k = 0; k < K; ++k) {
        prob.add_constraint(LinearForm{{}, {}, {{rate[k], 1.0}}}, Relation::greater_equal, cfg.r_min, "qos");
        prob.objective.free.push_back({rate[k], 1.0});
    }
    LinearForm power;
    for (int b : sp.blocks)
        power.blocks.push_back({b, MatrixXcd::Identity(M, M)});
    prob.add_constraint(std::move(power), Relation::less_equal, 1.0, "power");
    return sp;
}

double sum_of(const std::vector<double> &v) { return std::accumulate(v.begin(), v.end(), 0.0); }

} // namespace

std::vector<int> noma_order(const LiftedChannel &H)
{
    const int K = H.users();
    std::vector<int> users(K);
    std::iota(users.begin(), users.end(), 0);
    std::stable_sort(users.begin(), users.end(),
                     [&](int a, int b) { return H.H[a].trace().real() > H.H[b].trace().real(); });
    std::vector<int> order(K);
    for (int r = 0; r < K; ++r)
        order[users[r]] = r;
    return order;
}

std::vector<double> noma_rates(const LiftedChannel &H, const std::vector<MatrixXcd> &W, const std::vector<int> &order,
                               double noise)
{
    const int K = H.users();
    if (int(W.size()) != K || int(order.size()) != K)
        throw std::invalid_argument("noma_rates: need one beamformer and one SIC rank per user");
    if (!(noise > 0.0))
        throw std::invalid_argument("noma_rates: noise power must be positive");
    std::vector<double> rates(K, std::numeric_limits<double>::infinity());
    for (const Pair &q : decoding_pairs(order)) {
        double b = noise;
        for (int i = 0; i < K; ++i)
            if (order[i] < order[q.k])
                b += std::max(0.0, trace_gain(H.H[q.j], W[i]));
        const double a = std::max(0.0, trace_gain(H.H[q.j], W[q.k]));
        rates[q.k] = std::min(rates[q.k], std::log2(1.0 + a / b));
    }
    return rates;
}

NomaSolution noma_beamforming(const LiftedChannel &H, const ScaConfig &cfg)
{
    detail::validate_config(cfg);
    const int K = H.users(), M = H.dim();
    if (K == 0)
        throw std::invalid_argument("noma_beamforming: no users");
    const double zero_tol = detail::kZeroPowerFraction * cfg.p_max;

    NomaSolution out;
    out.order = noma_order(H);
    const std::vector<Pair> pairs = decoding_pairs(out.order);

    // Equal power along each user's own channel direction.
    std::vector<MatrixXcd> W0;
    for (const auto &Hk : H.H) {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(Hk);
        const VectorXcd u = es.eigenvectors().col(M - 1);
        W0.push_back((cfg.p_max / K) * u * u.adjoint());
    }

    auto build = [&](const std::vector<double> &p) { return build_noma(H, out.order, pairs, p, cfg); };
    auto expand = [&](const NomaSub &sp, const conic::ConicSolution &sol) {
        return noma_point(H, sp.beamformers(sol), out.order, pairs, cfg.noise);
    };
    auto rank = [&](const NomaSub &sp, const conic::ConicSolution &sol) {
        double r = 0.0;
        for (const auto &W : sp.beamformers(sol))
            r = std::max(r, extract_rank_one(W, zero_tol).residual);
        return r;
    };
    auto run = detail::run_sca<NomaSub>(build, expand, rank, noma_point(H, W0, out.order, pairs, cfg.noise),
                                        sum_of(noma_rates(H, W0, out.order, cfg.noise)), cfg);

    out.status = run.status;
    out.iterations = run.iterations;
    out.objective_trace = run.trace;
    out.log = run.log;
    if (!run.sub)
        return out;

    out.W = run.sub->beamformers(run.sol);
    for (const auto &W : out.W) {
        const RankOne r = extract_rank_one(W, zero_tol);
        out.w.push_back(r.vector);
        out.rank_residuals.push_back(r.residual);
    }
    const double worst = *std::max_element(out.rank_residuals.begin(), out.rank_residuals.end());
    if (worst > cfg.rank_tol) {
        auto score = [&](const std::vector<VectorXcd> &w) {
            std::vector<MatrixXcd> Wv;
            for (const auto &v : w)
                Wv.push_back(v * v.adjoint());
            const auto r = noma_rates(H, Wv, out.order, cfg.noise);
            for (double x : r)
                if (x < cfg.r_min - 1e-9)
                    return -std::numeric_limits<double>::infinity();
            return sum_of(r);
        };
        std::mt19937_64 rng(cfg.seed);
        double best = score(out.w);
        for (int i = 0; i < cfg.randomization_candidates; ++i) {
            std::vector<VectorXcd> w;
            double power = 0.0;
            for (const auto &W : out.W) {
                w.push_back(detail::sample_from(W, rng));
                power += w.back().squaredNorm();
            }
            if (power > cfg.p_max)
                for (auto &v : w)
                    v *= std::sqrt(cfg.p_max / power);
            const double s = score(w);
            if (s > best) {
                best = s;
                out.w = w;
            }
        }
        out.randomized = true;
    }
    return out;
}

} // namespace pinch
