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

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace detail {

std::vector<double> flatten(const SurrogatePoint &p)
{
    std::vector<double> v;
    v.reserve(4 * p.a_p.size());
    for (const auto *part : {&p.a_p, &p.b_p, &p.a_c, &p.b_c})
        v.insert(v.end(), part->begin(), part->end());
    return v;
}

SurrogatePoint unflatten(const std::vector<double> &v, int K)
{
    SurrogatePoint p;
    p.a_p.assign(v.begin(), v.begin() + K);
    p.b_p.assign(v.begin() + K, v.begin() + 2 * K);
    p.a_c.assign(v.begin() + 2 * K, v.begin() + 3 * K);
    p.b_c.assign(v.begin() + 3 * K, v.begin() + 4 * K);
    return p;
}

double quad_gain(const MatrixXcd &H, const VectorXcd &w) { return std::max(0.0, w.dot(H * w).real()); }

void validate_config(const ScaConfig &cfg)
{
    if (!(cfg.p_max > 0.0))
        throw std::invalid_argument("sca: power budget must be positive");
    if (!(cfg.noise > 0.0))
        throw std::invalid_argument("sca: noise power must be positive");
    if (!(cfg.r_min >= 0.0))
        throw std::invalid_argument("sca: minimum rate must be nonnegative");
    if (cfg.max_iterations < 1)
        throw std::invalid_argument("sca: need at least one iteration");
    if (!(cfg.eps > 0.0))
        throw std::invalid_argument("sca: tolerance must be positive");
}

VectorXcd sample_from(const MatrixXcd &W, std::mt19937_64 &rng)
{
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (W + W.adjoint()));
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    VectorXcd xi(W.rows());
    for (Eigen::Index i = 0; i < xi.size(); ++i)
        xi(i) = cplx(normal(rng), normal(rng));
    const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    VectorXcd w = es.eigenvectors() * root.cast<cplx>().cwiseProduct(xi);
    const double target = std::max(0.0, W.trace().real());
    const double n2 = w.squaredNorm();
    if (n2 > 0.0)
        w *= std::sqrt(target / n2);
    return w;
}

} // namespace detail

std::vector<double> qos_split(const std::vector<double> &preferred, double common, const std::vector<double> &priv,
                              double r_min, bool *qos_met)
{
    const int K = int(priv.size());
    std::vector<double> need(K);
    double need_total = 0.0;
    for (int k = 0; k < K; ++k) {
        need[k] = std::max(0.0, r_min - priv[k]);
        need_total += need[k];
    }
    if (qos_met)
        *qos_met = need_total <= common;
    if (need_total > common) {
        const double s = need_total > 0.0 ? common / need_total : 0.0;
        for (double &v : need)
            v *= s;
        return need;
    }
    // Leftover common rate follows the solver's preference beyond the QoS floor.
    std::vector<double> extra(K, 0.0);
    double extra_total = 0.0;
    for (int k = 0; k < K; ++k) {
        const double pref = k < int(preferred.size()) ? preferred[k] : 0.0;
        extra[k] = std::max(0.0, pref - need[k]);
        extra_total += extra[k];
    }
    const double leftover = common - need_total;
    std::vector<double> r(K);
    for (int k = 0; k < K; ++k)
        r[k] = need[k] + leftover * (extra_total > 0.0 ? extra[k] / extra_total : 1.0 / K);
    return r;
}

namespace {

struct VectorRates {
    double common = 0.0;
    std::vector<double> priv;
};

VectorRates vector_rates(const LiftedChannel &H, const VectorXcd &wc, const std::vector<VectorXcd> &wp, double noise)
{
    const int K = H.users();
    VectorRates r;
    r.common = std::numeric_limits<double>::infinity();
    r.priv.resize(K);
    for (int k = 0; k < K; ++k) {
        double others = noise;
        for (int i = 0; i < K; ++i)
            if (i != k)
                others += detail::quad_gain(H.H[k], wp[i]);
        const double own = detail::quad_gain(H.H[k], wp[k]);
        r.priv[k] = std::log2(1.0 + own / others);
        r.common = std::min(r.common, std::log2(1.0 + detail::quad_gain(H.H[k], wc) / (others + own)));
    }
    if (K == 0)
        r.common = 0.0;
    return r;
}

double exact_objective(const LiftedChannel &H, const Beamformers &W, double noise)
{
    const auto rc = rate_common(H, W.common, W.priv, noise);
    const auto rp = rate_private(H, W.priv, noise);
    return *std::min_element(rc.begin(), rc.end()) + std::accumulate(rp.begin(), rp.end(), 0.0);
}

} // namespace

namespace {

detail::ScaRun<Subproblem> run_model(const LiftedChannel &H, const ScaConfig &cfg, const Beamformers &start,
                                     const MatrixXcd *common_basis)
{
    const int K = H.users();
    const double zero_tol = detail::kZeroPowerFraction * cfg.p_max;
    auto build = [&](const std::vector<double> &p) {
        return build_subproblem(H, detail::unflatten(p, K), cfg.p_max, cfg.r_min, cfg.noise, cfg.surrogate,
                                common_basis);
    };
    auto expand = [&](const Subproblem &sp, const conic::ConicSolution &sol) {
        return detail::flatten(expansion_point(H, sp.beamformers(sol), cfg.noise));
    };
    auto rank = [&](const Subproblem &sp, const conic::ConicSolution &sol) {
        const Beamformers W = sp.beamformers(sol);
        double r = extract_rank_one(W.common, zero_tol).residual;
        for (const auto &Wk : W.priv)
            r = std::max(r, extract_rank_one(Wk, zero_tol).residual);
        return r;
    };
    return detail::run_sca<Subproblem>(build, expand, rank, detail::flatten(expansion_point(H, start, cfg.noise)),
                                       exact_objective(H, start, cfg.noise), cfg);
}

// Power shares tried when building a feasible refinement start.
constexpr int kPowerShares = 64;

// Unit direction among the candidates whose worst per-user gain, relative to what the
// relaxed W_c delivers to that user, is largest.
VectorXcd common_direction(const LiftedChannel &H, const MatrixXcd &Wc, const std::vector<VectorXcd> &candidates)
{
    const double power = Wc.trace().real();
    VectorXcd best;
    double best_ratio = -1.0;
    for (const VectorXcd &w : candidates) {
        const double n = w.norm();
        if (!(n > 0.0))
            continue;
        const VectorXcd v = w / n;
        double ratio = std::numeric_limits<double>::infinity();
        for (const auto &Hk : H.H) {
            const double relaxed = trace_gain(Hk, Wc) / power;
            if (relaxed > 0.0)
                ratio = std::min(ratio, detail::quad_gain(Hk, v) / relaxed);
        }
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best = v;
        }
    }
    return best;
}

} // namespace

BeamformingSolution sca_beamforming(const LiftedChannel &H, const ScaConfig &cfg)
{
    detail::validate_config(cfg);
    const int K = H.users();
    if (K == 0)
        throw std::invalid_argument("sca_beamforming: no users");
    const double zero_tol = detail::kZeroPowerFraction * cfg.p_max;

    auto run = run_model(H, cfg, initial_point(H, cfg.p_max, cfg.noise).W, nullptr);

    BeamformingSolution out;
    out.status = run.status;
    out.iterations = run.iterations;
    out.objective_trace = run.trace;
    out.log = run.log;
    if (!run.sub)
        return out;

    const Subproblem &sp = *run.sub;
    out.W = sp.beamformers(run.sol);
    const std::vector<double> solver_split = sp.common_split(run.sol);

    const RankOne c = extract_rank_one(out.W.common, zero_tol);
    out.w_common = c.vector;
    out.rank_residuals.push_back(c.residual);
    for (const auto &Wk : out.W.priv) {
        const RankOne p = extract_rank_one(Wk, zero_tol);
        out.w_priv.push_back(p.vector);
        out.rank_residuals.push_back(p.residual);
    }

    auto score = [&](const VectorXcd &wc, const std::vector<VectorXcd> &wp, std::vector<double> *split) {
        const VectorRates r = vector_rates(H, wc, wp, cfg.noise);
        bool ok = false;
        auto s = qos_split(solver_split, r.common, r.priv, cfg.r_min, &ok);
        if (split)
            *split = std::move(s);
        const double sum = r.common + std::accumulate(r.priv.begin(), r.priv.end(), 0.0);
        return ok ? sum : -std::numeric_limits<double>::infinity();
    };

    if (out.max_rank_residual() > cfg.rank_tol) {
        // Gaussian randomization around the relaxed solution; the principal vectors compete too.
        std::mt19937_64 rng(cfg.seed);
        double best = score(out.w_common, out.w_priv, nullptr);
        std::vector<VectorXcd> common_candidates{out.w_common};
        for (int i = 0; i < cfg.randomization_candidates; ++i) {
            VectorXcd wc = detail::sample_from(out.W.common, rng);
            std::vector<VectorXcd> wp;
            for (const auto &Wk : out.W.priv)
                wp.push_back(detail::sample_from(Wk, rng));
            common_candidates.push_back(wc);
            double power = wc.squaredNorm();
            for (const auto &w : wp)
                power += w.squaredNorm();
            if (power > cfg.p_max) {
                const double s = std::sqrt(cfg.p_max / power);
                wc *= s;
                for (auto &w : wp)
                    w *= s;
            }
            const double v = score(wc, wp, nullptr);
            if (v > best) {
                best = v;
                out.w_common = wc;
                out.w_priv = wp;
            }
        }
        out.randomized = true;

        // A rank-deficient W_c is the multicast case: fix the common beam direction
        // and re-optimize its power together with the private streams.
        if (out.rank_residuals[0] > cfg.rank_tol) {
            // The refinement keeps every iterate feasible only if it starts feasible, so look
            // for a rank-one start with the most QoS slack (a start on the QoS boundary leaves the
            // subproblem without interior): the best randomized candidate, or the chosen common
            // direction with its power share scanned against the private beams.
            const VectorXcd v = common_direction(H, out.W.common, common_candidates);
            VectorXcd start_c;
            std::vector<VectorXcd> start_p;
            auto slack = [&](const VectorXcd &wc, const std::vector<VectorXcd> &wp) {
                const VectorRates r = vector_rates(H, wc, wp, cfg.noise);
                double need = 0.0;
                for (double rp : r.priv)
                    need += std::max(0.0, cfg.r_min - rp);
                return r.common - need;
            };
            double start_score = -std::numeric_limits<double>::infinity();
            if (std::isfinite(best)) {
                start_score = slack(out.w_common, out.w_priv);
                start_c = out.w_common;
                start_p = out.w_priv;
            }
            std::vector<VectorXcd> beams;
            double pp = 0.0;
            for (const auto &Wk : out.W.priv) {
                beams.push_back(extract_rank_one(Wk, zero_tol).vector);
                pp += beams.back().squaredNorm();
            }
            if (v.size() != 0 && pp > 0.0) {
                for (int i = 1; i < kPowerShares; ++i) {
                    const double share = double(i) / kPowerShares;
                    const VectorXcd wc = std::sqrt(share * cfg.p_max) * v;
                    std::vector<VectorXcd> wp = beams;
                    for (auto &w : wp)
                        w *= std::sqrt((1.0 - share) * cfg.p_max / pp);
                    const double sc = slack(wc, wp);
                    if (sc > start_score) {
                        start_score = sc;
                        start_c = wc;
                        start_p = wp;
                    }
                }
            }
            if (start_score > 0.0 && start_c.norm() > 0.0) {
                Beamformers start;
                start.common = start_c * start_c.adjoint();
                for (const auto &w : start_p)
                    start.priv.push_back(w * w.adjoint());
                const MatrixXcd basis = start_c.normalized();
                auto refine = run_model(H, cfg, start, &basis);
                out.iterations += refine.iterations;
                if (refine.sub) {
                    const Beamformers Wr = refine.sub->beamformers(refine.sol);
                    VectorXcd wc = extract_rank_one(Wr.common, zero_tol).vector;
                    std::vector<VectorXcd> wp;
                    bool rank_one = true;
                    for (const auto &Wk : Wr.priv) {
                        const RankOne p = extract_rank_one(Wk, zero_tol);
                        rank_one = rank_one && p.residual <= cfg.rank_tol;
                        wp.push_back(p.vector);
                    }
                    const double v_score = score(wc, wp, nullptr);
                    if (rank_one && v_score > best) {
                        best = v_score;
                        out.w_common = wc;
                        out.w_priv = wp;
                        out.refined = true;
                        out.refinement_trace = refine.trace;
                    }
                }
            }
        }
    }
    score(out.w_common, out.w_priv, &out.common_split);
    return out;
}

} // namespace pinch
