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
#include <numeric>
#include <stdexcept>

#include "pinch/beamform.hpp"

namespace pinch {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

double Beamformers::total_power() const
{
    double p = common.trace().real();
    for (const auto &W : priv)
        p += W.trace().real();
    return p;
}

double trace_gain(const MatrixXcd &H, const MatrixXcd &W)
{
    // Re Tr(HW) = sum_ij H_ij W_ji
    return H.cwiseProduct(W.transpose()).sum().real();
}

namespace {

double log2_1p(double x) { return std::log1p(x) / std::numbers::ln2; }

void check_sizes(const LiftedChannel &H, const std::vector<MatrixXcd> &priv)
{
    if (int(priv.size()) != H.users())
        throw std::invalid_argument("rates: need one private beamformer per user");
}

} // namespace

std::vector<double> rate_common(const LiftedChannel &H, const MatrixXcd &common, const std::vector<MatrixXcd> &priv,
                                double noise)
{
    check_sizes(H, priv);
    std::vector<double> out(H.users());
    for (int k = 0; k < H.users(); ++k) {
        double interference = noise;
        for (const auto &W : priv)
            interference += trace_gain(H.H[k], W);
        out[k] = log2_1p(std::max(0.0, trace_gain(H.H[k], common)) / interference);
    }
    return out;
}

std::vector<double> rate_private(const LiftedChannel &H, const std::vector<MatrixXcd> &priv, double noise)
{
    check_sizes(H, priv);
    std::vector<double> out(H.users());
    for (int k = 0; k < H.users(); ++k) {
        double interference = noise;
        for (int i = 0; i < H.users(); ++i)
            if (i != k)
                interference += trace_gain(H.H[k], priv[i]);
        out[k] = log2_1p(std::max(0.0, trace_gain(H.H[k], priv[k])) / interference);
    }
    return out;
}

AffineRate linearize_rate(double a_t, double b_t)
{
    if (!(a_t > 0.0) || !(b_t > 0.0))
        throw std::invalid_argument("linearize_rate: expansion point must be strictly positive");
    AffineRate f;
    f.slope_a = 1.0 / ((a_t + b_t) * std::numbers::ln2);
    f.slope_b = -a_t / (b_t * (a_t + b_t) * std::numbers::ln2);
    f.offset = log2_1p(a_t / b_t) - f.slope_a * a_t - f.slope_b * b_t;
    return f;
}

double surrogate_mu(double a, double b, double a_t, double b_t)
{
    if (!(a_t > 0.0) || !(b_t > 0.0) || !(b > 0.0))
        throw std::invalid_argument("surrogate_mu: A_t, B_t and B must be positive");
    const double s = a_t + b_t;
    return log2_1p(a_t / b_t) + ((a - a_t) / s - a_t * (b - b_t) / (b_t * s)) / std::numbers::ln2;
}

double surrogate_minorant(double a, double b, double a_t, double b_t)
{
    if (!(a_t > 0.0) || !(b_t > 0.0) || !(b > 0.0) || !(a >= 0.0))
        throw std::invalid_argument("surrogate_minorant: need A >= 0 and positive B, A_t, B_t");
    const double x_t = a_t + b_t;
    return (std::log(x_t / b_t) + 2.0 - x_t / (a + b) - b / b_t) / std::numbers::ln2;
}

SurrogatePoint expansion_point(const LiftedChannel &H, const Beamformers &W, double noise)
{
    check_sizes(H, W.priv);
    const int K = H.users();
    SurrogatePoint p;
    p.a_p.resize(K);
    p.b_p.resize(K);
    p.a_c.resize(K);
    p.b_c.resize(K);
    for (int k = 0; k < K; ++k) {
        double others = noise;
        for (int i = 0; i < K; ++i)
            if (i != k)
                others += std::max(0.0, trace_gain(H.H[k], W.priv[i]));
        const double own = std::max(0.0, trace_gain(H.H[k], W.priv[k]));
        p.b_p[k] = others;
        p.b_c[k] = others + own;
        p.a_p[k] = std::max(own, kMinExpansion * p.b_p[k]);
        p.a_c[k] = std::max(std::max(0.0, trace_gain(H.H[k], W.common)), kMinExpansion * p.b_c[k]);
    }
    return p;
}

InitialPoint initial_point(const LiftedChannel &H, double p_max, double noise)
{
    const int K = H.users(), M = H.dim();
    if (K == 0)
        throw std::invalid_argument("initial_point: no users");
    auto principal = [](const MatrixXcd &A) -> VectorXcd {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(A);
        return es.eigenvectors().col(A.rows() - 1);
    };
    InitialPoint init;
    MatrixXcd sum = MatrixXcd::Zero(M, M);
    for (const auto &Hk : H.H)
        sum += Hk;
    const VectorXcd v = principal(sum);
    init.W.common = (p_max / 2.0) * v * v.adjoint();
    for (const auto &Hk : H.H) {
        const VectorXcd u = principal(Hk);
        init.W.priv.push_back((p_max / (2.0 * K)) * u * u.adjoint());
    }
    init.point = expansion_point(H, init.W, noise);
    return init;
}

RankOne extract_rank_one(const MatrixXcd &W, double zero_tol)
{
    RankOne out;
    out.vector = VectorXcd::Zero(W.rows());
    if (W.size() == 0)
        return out;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (W + W.adjoint()));
    const Eigen::Index n = W.rows();
    const double l1 = es.eigenvalues()(n - 1);
    if (!(l1 > zero_tol) || l1 <= 0.0)
        return out;
    const double l2 = n > 1 ? std::max(0.0, es.eigenvalues()(n - 2)) : 0.0;
    out.residual = l2 / l1;
    VectorXcd u = es.eigenvectors().col(n - 1);
    Eigen::Index imax = 0;
    u.cwiseAbs().maxCoeff(&imax);
    u *= std::conj(u(imax)) / std::abs(u(imax));
    out.vector = std::sqrt(l1) * u;
    return out;
}

double BeamformingSolution::max_rank_residual() const
{
    double r = 0.0;
    for (double v : rank_residuals)
        r = std::max(r, v);
    return r;
}

std::string to_string(ScaStatus s)
{
    switch (s) {
    case ScaStatus::converged: return "converged";
    case ScaStatus::max_iterations: return "max_iterations";
    case ScaStatus::stalled: return "stalled";
    case ScaStatus::infeasible: return "infeasible";
    case ScaStatus::solver_failure: return "solver_failure";
    }
    return "unknown";
}

RsmaRates evaluate_vectors(const EffectiveChannel &channels, const PowerAllocation &power, const VectorXcd &w_common,
                           const std::vector<VectorXcd> &w_priv, const std::vector<double> &split, double noise)
{
    const int K = channels.users();
    if (int(w_priv.size()) != K)
        throw std::invalid_argument("evaluate_vectors: need one private vector per user");
    if (!(noise > 0.0))
        throw std::invalid_argument("evaluate_vectors: noise power must be positive");
    const Eigen::VectorXcd L = power.L.cast<cplx>();
    auto gain = [&](int k, const VectorXcd &w) {
        return std::norm(channels.h[k].dot(L.cwiseProduct(w)));
    };

    RsmaRates r;
    r.common_per_user.resize(K);
    r.priv.resize(K);
    for (int k = 0; k < K; ++k) {
        double others = noise;
        for (int i = 0; i < K; ++i)
            if (i != k)
                others += gain(k, w_priv[i]);
        const double own = gain(k, w_priv[k]);
        r.common_per_user[k] = log2_1p(gain(k, w_common) / (others + own));
        r.priv[k] = log2_1p(own / others);
    }
    r.common = K > 0 ? *std::min_element(r.common_per_user.begin(), r.common_per_user.end()) : 0.0;

    r.split.assign(K, 0.0);
    for (int k = 0; k < K && k < int(split.size()); ++k)
        r.split[k] = std::max(0.0, split[k]);
    const double total_split = std::accumulate(r.split.begin(), r.split.end(), 0.0);
    if (total_split > r.common) {
        const double s = total_split > 0.0 ? r.common / total_split : 0.0;
        for (double &v : r.split)
            v *= s;
    }
    r.total.resize(K);
    r.sum_rate = r.common;
    for (int k = 0; k < K; ++k) {
        r.total[k] = r.split[k] + r.priv[k];
        r.sum_rate += r.priv[k];
    }
    return r;
}

RsmaRates evaluate_solution(const EffectiveChannel &channels, const PowerAllocation &power,
                            const BeamformingSolution &solution, double noise)
{
    return evaluate_vectors(channels, power, solution.w_common, solution.w_priv, solution.common_split, noise);
}

ConventionalChannels conventional_channels(const SystemLayout &layout, const UserDrop &users, double noise_power)
{
    ConventionalChannels out;
    const int M = int(layout.feed_points.size());
    const double lambda = layout.wavelength();
    for (const auto &u : users.positions) {
        VectorXcd h(M);
        for (int m = 0; m < M; ++m)
            h(m) = pa_user_gain(layout.feed_points[m], u, lambda);
        out.channels.h.push_back(h);
    }
    out.power.L = Eigen::VectorXd::Ones(M);
    out.lifted = lift_channels(out.channels, out.power, noise_power);
    return out;
}

} // namespace pinch
