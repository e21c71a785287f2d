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
#include <numbers>
#include <stdexcept>

#include "pinch/beamform.hpp"
#include "sca_internal.hpp"

namespace pinch {

using conic::BlockTerm;
using conic::LinearForm;
using conic::Relation;
using conic::ScalarTerm;
using Eigen::MatrixXcd;

namespace detail {

RateExpr rate_expression(conic::ConicProblem &prob, int a, double scale_a, int b, double scale_b, double a_t,
                         double b_t, Surrogate kind, std::vector<int> *blocks)
{
    RateExpr r;
    if (kind == Surrogate::affine) {
        const AffineRate f = linearize_rate(a_t, b_t);
        r.offset = f.offset;
        r.form.nonneg = {{a, f.slope_a * scale_a}, {b, f.slope_b * scale_b}};
        return r;
    }
    // Q = [u c; c* s] >= 0 with Re c = 1 and s = (A + B) / x_t forces u >= x_t / (A + B).
    const double x_t = a_t + b_t;
    const int q = prob.add_block(2);
    if (blocks)
        blocks->push_back(q);
    MatrixXcd off = MatrixXcd::Zero(2, 2);
    off(0, 1) = off(1, 0) = 0.5;
    prob.add_constraint(LinearForm{{{q, off}}, {}, {}}, Relation::equal, 1.0, "minorant_link");
    MatrixXcd e22 = MatrixXcd::Zero(2, 2);
    e22(1, 1) = 1.0;
    prob.add_constraint(LinearForm{{{q, e22}}, {{a, -scale_a / x_t}, {b, -scale_b / x_t}}, {}}, Relation::equal, 0.0,
                        "minorant_sum");
    MatrixXcd e11 = MatrixXcd::Zero(2, 2);
    e11(0, 0) = -1.0 / std::numbers::ln2;
    r.offset = (std::log(x_t / b_t) + 2.0) / std::numbers::ln2;
    r.form.blocks = {{q, e11}};
    r.form.nonneg = {{b, -scale_b / (b_t * std::numbers::ln2)}};
    return r;
}

void accumulate(LinearForm &dst, const LinearForm &src, double sign)
{
    for (const auto &t : src.blocks)
        dst.blocks.push_back({t.block, sign * t.coeff});
    for (const auto &t : src.nonneg)
        dst.nonneg.push_back({t.index, sign * t.coeff});
    for (const auto &t : src.free)
        dst.free.push_back({t.index, sign * t.coeff});
}

} // namespace detail

Subproblem build_subproblem(const LiftedChannel &H, const SurrogatePoint &point, double p_max, double r_min,
                            double noise, Surrogate surrogate, const MatrixXcd *common_basis)
{
    const int K = H.users(), M = H.dim();
    if (K == 0)
        throw std::invalid_argument("build_subproblem: no users");
    if (point.users() != K || int(point.b_p.size()) != K || int(point.a_c.size()) != K || int(point.b_c.size()) != K)
        throw std::invalid_argument("build_subproblem: expansion point does not match user count");
    if (!(p_max > 0.0) || !(noise > 0.0))
        throw std::invalid_argument("build_subproblem: power budget and noise must be positive");
    for (int k = 0; k < K; ++k)
        if (!(point.a_p[k] > 0.0) || !(point.b_p[k] > 0.0) || !(point.a_c[k] > 0.0) || !(point.b_c[k] > 0.0))
            throw std::invalid_argument("build_subproblem: expansion point must be strictly positive");

    Subproblem sp;
    sp.users = K;
    sp.power_scale = p_max;
    auto &prob = sp.problem;
    prob.sense = conic::Sense::maximize;

    if (common_basis) {
        if (common_basis->rows() != M || common_basis->cols() < 1 || common_basis->cols() > M)
            throw std::invalid_argument("build_subproblem: common basis must be M x d with 1 <= d <= M");
        sp.common_basis = *common_basis;
    }
    const bool restricted = sp.common_basis.size() != 0;
    const int Mc = restricted ? int(sp.common_basis.cols()) : M;
    // Common-stream channels and power form in the (possibly restricted) coordinates.
    auto common_gain = [&](const MatrixXcd &Hk) -> MatrixXcd {
        return restricted ? MatrixXcd(sp.common_basis.adjoint() * Hk * sp.common_basis) : Hk;
    };
    sp.block_common = prob.add_block(Mc);
    for (int k = 0; k < K; ++k)
        sp.block_priv.push_back(prob.add_block(M));
    for (int k = 0; k < K; ++k) {
        sp.a_p.push_back(prob.add_nonneg());
        sp.b_p.push_back(prob.add_nonneg());
        sp.a_c.push_back(prob.add_nonneg());
        sp.b_c.push_back(prob.add_nonneg());
        sp.split.push_back(prob.add_nonneg());
        // A is scaled by its expansion value, floored so a switched-off stream keeps O(1) columns.
        sp.scale_ap.push_back(std::max(point.a_p[k], 1e-3 * point.b_p[k]));
        sp.scale_bp.push_back(point.b_p[k]);
        sp.scale_ac.push_back(std::max(point.a_c[k], 1e-3 * point.b_c[k]));
        sp.scale_bc.push_back(point.b_c[k]);
    }
    sp.mu_c = prob.add_free();

    for (int k = 0; k < K; ++k) {
        const MatrixXcd &Hk = H.H[k];
        // A_kp <= Tr(H_k W_kp)
        prob.add_constraint(LinearForm{{{sp.block_priv[k], Hk * (p_max / sp.scale_ap[k])}}, {{sp.a_p[k], -1.0}}, {}},
                            Relation::greater_equal, 0.0, "signal_p");
        // B_kp >= sum_{i != k} Tr(H_k W_ip) + noise
        {
            LinearForm f;
            f.nonneg.push_back({sp.b_p[k], 1.0});
            for (int i = 0; i < K; ++i)
                if (i != k)
                    f.blocks.push_back({sp.block_priv[i], -Hk * (p_max / sp.scale_bp[k])});
            prob.add_constraint(std::move(f), Relation::greater_equal, noise / sp.scale_bp[k], "interference_p");
        }
        // A_kc <= Tr(H_k W_c)
        prob.add_constraint(LinearForm{{{sp.block_common, common_gain(Hk) * (p_max / sp.scale_ac[k])}},
                                       {{sp.a_c[k], -1.0}},
                                       {}},
                            Relation::greater_equal, 0.0, "signal_c");
        // B_kc >= sum_i Tr(H_k W_ip) + noise
        {
            LinearForm f;
            f.nonneg.push_back({sp.b_c[k], 1.0});
            for (int i = 0; i < K; ++i)
                f.blocks.push_back({sp.block_priv[i], -Hk * (p_max / sp.scale_bc[k])});
            prob.add_constraint(std::move(f), Relation::greater_equal, noise / sp.scale_bc[k], "interference_c");
        }
        const auto mp = detail::rate_expression(prob, sp.a_p[k], sp.scale_ap[k], sp.b_p[k], sp.scale_bp[k],
                                                point.a_p[k], point.b_p[k], surrogate, &sp.hyperbolic);
        const auto mc = detail::rate_expression(prob, sp.a_c[k], sp.scale_ac[k], sp.b_c[k], sp.scale_bc[k],
                                                point.a_c[k], point.b_c[k], surrogate, &sp.hyperbolic);
        // mu_kp + r_kc >= R_min
        {
            LinearForm f = mp.form;
            f.nonneg.push_back({sp.split[k], 1.0});
            prob.add_constraint(std::move(f), Relation::greater_equal, r_min - mp.offset, "qos");
        }
        // mu_c <= mu_kc
        {
            LinearForm f = mc.form;
            f.free.push_back({sp.mu_c, -1.0});
            prob.add_constraint(std::move(f), Relation::greater_equal, -mc.offset, "common_min");
        }
        detail::accumulate(prob.objective, mp.form, 1.0);
        sp.objective_offset += mp.offset;
    }
    // sum_k r_kc <= mu_c
    {
        LinearForm f;
        f.free.push_back({sp.mu_c, 1.0});
        for (int k = 0; k < K; ++k)
            f.nonneg.push_back({sp.split[k], -1.0});
        prob.add_constraint(std::move(f), Relation::greater_equal, 0.0, "split");
    }
    // Tr(W_c) + sum_k Tr(W_kp) <= P_max, in units of P_max
    {
        LinearForm f;
        const MatrixXcd I = MatrixXcd::Identity(M, M);
        f.blocks.push_back({sp.block_common, restricted ? MatrixXcd(sp.common_basis.adjoint() * sp.common_basis)
                                                        : I});
        for (int k = 0; k < K; ++k)
            f.blocks.push_back({sp.block_priv[k], I});
        prob.add_constraint(std::move(f), Relation::less_equal, 1.0, "power");
    }
    prob.objective.free.push_back({sp.mu_c, 1.0});
    return sp;
}

Beamformers Subproblem::beamformers(const conic::ConicSolution &s) const
{
    Beamformers W;
    const MatrixXcd &X = s.blocks.at(block_common);
    W.common = power_scale * (common_basis.size() != 0 ? MatrixXcd(common_basis * X * common_basis.adjoint()) : X);
    for (int b : block_priv)
        W.priv.push_back(power_scale * s.blocks.at(b));
    return W;
}

SurrogatePoint Subproblem::relaxation(const conic::ConicSolution &s) const
{
    SurrogatePoint p;
    for (int k = 0; k < users; ++k) {
        p.a_p.push_back(s.nonneg(a_p[k]) * scale_ap[k]);
        p.b_p.push_back(s.nonneg(b_p[k]) * scale_bp[k]);
        p.a_c.push_back(s.nonneg(a_c[k]) * scale_ac[k]);
        p.b_c.push_back(s.nonneg(b_c[k]) * scale_bc[k]);
    }
    return p;
}

std::vector<double> Subproblem::common_split(const conic::ConicSolution &s) const
{
    std::vector<double> r;
    for (int idx : split)
        r.push_back(std::max(0.0, s.nonneg(idx)));
    return r;
}

double Subproblem::common_surrogate(const conic::ConicSolution &s) const { return s.free(mu_c); }

} // namespace pinch
