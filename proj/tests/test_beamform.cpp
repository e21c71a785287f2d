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

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "pinch/beamform.hpp"

using namespace pinch;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

VectorXcd random_vector(int n, std::mt19937_64 &rng, double scale = 1.0)
{
    std::normal_distribution<double> g;
    VectorXcd v(n);
    for (int i = 0; i < n; ++i)
        v(i) = scale * cplx(g(rng), g(rng));
    return v;
}

struct Instance {
    EffectiveChannel ch;
    PowerAllocation pw;
    LiftedChannel H;
};

Instance random_instance(int K, int M, std::mt19937_64 &rng, double scale = 10.0)
{
    Instance in;
    for (int k = 0; k < K; ++k)
        in.ch.h.push_back(random_vector(M, rng, scale));
    in.pw.L = Eigen::VectorXd::Ones(M);
    in.H = lift_channels(in.ch, in.pw);
    return in;
}

double log2_1p(double x) { return std::log2(1.0 + x); }

} // namespace

TEST_CASE("rate_common")
{
    std::mt19937_64 rng(1);
    const Instance in = random_instance(3, 2, rng);
    std::vector<MatrixXcd> priv;
    std::vector<VectorXcd> wp;
    for (int k = 0; k < 3; ++k) {
        wp.push_back(random_vector(2, rng, 0.3));
        priv.push_back(wp.back() * wp.back().adjoint());
    }
    const auto zero = rate_common(in.H, MatrixXcd::Zero(2, 2), priv, 1.0);
    for (double r : zero)
        CHECK(r == 0.0);

    // Single user, SNR one.
    LiftedChannel one;
    one.H.push_back(MatrixXcd::Identity(1, 1));
    CHECK(rate_common(one, MatrixXcd::Constant(1, 1, 2.0), {MatrixXcd::Zero(1, 1)}, 2.0)[0] == doctest::Approx(1.0));

    // Quadratic-form oracle through the vectors.
    const VectorXcd wc = random_vector(2, rng);
    const auto r = rate_common(in.H, wc * wc.adjoint(), priv, 1.0);
    for (int k = 0; k < 3; ++k) {
        double interf = 1.0;
        for (const auto &w : wp)
            interf += std::norm(in.ch.h[k].dot(w));
        CHECK(r[k] == doctest::Approx(log2_1p(std::norm(in.ch.h[k].dot(wc)) / interf)).epsilon(1e-12));
    }
}

TEST_CASE("rate_private")
{
    LiftedChannel one;
    one.H.push_back(MatrixXcd::Identity(2, 2) * 3.0);
    CHECK(rate_private(one, {MatrixXcd::Identity(2, 2)}, 2.0)[0] == doctest::Approx(log2_1p(6.0 / 2.0)));

    // Orthogonal channels with matched beams: no cross terms.
    EffectiveChannel e;
    e.h = {VectorXcd::Unit(2, 0) * 2.0, VectorXcd::Unit(2, 1) * 3.0};
    const auto H = lift_channels(e, {Eigen::VectorXd::Ones(2)});
    std::vector<MatrixXcd> W{VectorXcd::Unit(2, 0) * VectorXcd::Unit(2, 0).adjoint(),
                             VectorXcd::Unit(2, 1) * VectorXcd::Unit(2, 1).adjoint()};
    const auto r = rate_private(H, W, 1.0);
    CHECK(r[0] == doctest::Approx(log2_1p(4.0)));
    CHECK(r[1] == doctest::Approx(log2_1p(9.0)));

    std::mt19937_64 rng(2);
    const Instance in = random_instance(4, 2, rng);
    std::vector<VectorXcd> wp;
    std::vector<MatrixXcd> priv;
    for (int k = 0; k < 4; ++k) {
        wp.push_back(random_vector(2, rng, 0.2));
        priv.push_back(wp.back() * wp.back().adjoint());
    }
    const auto rp = rate_private(in.H, priv, 0.5);
    for (int k = 0; k < 4; ++k) {
        double interf = 0.5;
        for (int i = 0; i < 4; ++i)
            if (i != k)
                interf += std::norm(in.ch.h[k].dot(wp[i]));
        CHECK(rp[k] == doctest::Approx(log2_1p(std::norm(in.ch.h[k].dot(wp[k])) / interf)).epsilon(1e-12));
    }
}

TEST_CASE("surrogate_mu")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.01, 50.0);
    for (int i = 0; i < 100; ++i) {
        const double a = u(rng), b = u(rng);
        CHECK(std::abs(surrogate_mu(a, b, a, b) - std::log2(1.0 + a / b)) <= 1e-12);
    }
    // Symmetric expansion point algebra.
    for (double A : {0.0, 0.5, 3.0})
        for (double B : {0.5, 1.0, 4.0})
            CHECK(surrogate_mu(A, B, 1.0, 1.0) ==
                  doctest::Approx(1.0 + ((A - 1.0) / 2.0 - (B - 1.0) / 2.0) / std::numbers::ln2).epsilon(1e-14));

    // Affine in (A, B): second differences vanish.
    const double at = 2.0, bt = 3.0;
    CHECK(surrogate_mu(1, 1, at, bt) + surrogate_mu(3, 5, at, bt) ==
          doctest::Approx(2 * surrogate_mu(2, 3, at, bt)).epsilon(1e-14));
}

TEST_CASE("surrogate gradient matches centered finite differences")
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    const double h = 1e-6;
    auto f = [](double a, double b) { return std::log2(1.0 + a / b); };
    for (int i = 0; i < 100; ++i) {
        const double a = u(rng), b = u(rng);
        const AffineRate lin = linearize_rate(a, b);
        const double fa = (f(a + h, b) - f(a - h, b)) / (2 * h);
        const double fb = (f(a, b + h) - f(a, b - h)) / (2 * h);
        CHECK(std::abs(lin.slope_a - fa) <= 1e-6 * std::abs(fa));
        CHECK(std::abs(lin.slope_b - fb) <= 1e-6 * std::abs(fb));
        // The printed ln2 factor would be off by (ln2)^2 ~ 0.48.
        CHECK(std::abs(lin.slope_a * std::numbers::ln2 * std::numbers::ln2 - fa) > 0.1 * std::abs(fa));
    }
}

TEST_CASE("minorant: tight, same gradient, global lower bound, concave")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> lg(-4.0, 4.0);
    auto f = [](double a, double b) { return std::log2(1.0 + a / b); };
    const double h = 1e-6;
    for (int i = 0; i < 200; ++i) {
        const double at = std::pow(10.0, lg(rng)), bt = std::pow(10.0, lg(rng));
        CHECK(std::abs(surrogate_minorant(at, bt, at, bt) - f(at, bt)) <= 1e-12 * std::max(1.0, f(at, bt)));
        const AffineRate lin = linearize_rate(at, bt);
        const double ga = (surrogate_minorant(at + h * at, bt, at, bt) - surrogate_minorant(at - h * at, bt, at, bt)) /
                          (2 * h * at);
        const double gb = (surrogate_minorant(at, bt + h * bt, at, bt) - surrogate_minorant(at, bt - h * bt, at, bt)) /
                          (2 * h * bt);
        CHECK(ga == doctest::Approx(lin.slope_a).epsilon(1e-5));
        CHECK(gb == doctest::Approx(lin.slope_b).epsilon(1e-5));
        for (int j = 0; j < 20; ++j) {
            const double a = std::pow(10.0, lg(rng)), b = std::pow(10.0, lg(rng));
            CHECK(surrogate_minorant(a, b, at, bt) <= f(a, b) + 1e-12);
            CHECK(surrogate_minorant(a, b, at, bt) <= surrogate_mu(a, b, at, bt) + 1e-12);
        }
        const double a1 = std::pow(10.0, lg(rng)), b1 = std::pow(10.0, lg(rng));
        const double a2 = std::pow(10.0, lg(rng)), b2 = std::pow(10.0, lg(rng));
        const double mid = surrogate_minorant((a1 + a2) / 2, (b1 + b2) / 2, at, bt);
        CHECK(mid >= (surrogate_minorant(a1, b1, at, bt) + surrogate_minorant(a2, b2, at, bt)) / 2 - 1e-9);
    }
    CHECK_THROWS_AS(surrogate_minorant(1.0, 0.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("build_subproblem structure")
{
    std::mt19937_64 rng(6);
    const Instance in = random_instance(2, 2, rng);
    const auto init = initial_point(in.H, 10.0, 1.0);

    const Subproblem affine = build_subproblem(in.H, init.point, 10.0, 0.1, 1.0, Surrogate::affine);
    CHECK(affine.problem.block_dims == std::vector<int>{2, 2, 2});
    CHECK(affine.problem.nonneg_count == 4 * 2 + 2); // A/B pairs for both streams plus the splits
    CHECK(affine.problem.free_count == 1);            // mu_c
    CHECK(affine.hyperbolic.empty());

    // The minorant adds one 2x2 block per rate term.
    const Subproblem minorant = build_subproblem(in.H, init.point, 10.0, 0.1, 1.0);
    CHECK(minorant.problem.block_dims.size() == 3 + 4);
    CHECK(minorant.hyperbolic.size() == 4);

    SurrogatePoint bad = init.point;
    bad.a_p[0] = 0.0;
    CHECK_THROWS_AS(build_subproblem(in.H, bad, 10.0, 0.1, 1.0), std::invalid_argument);
}

TEST_CASE("solved subproblem replays its trace constraints")
{
    std::mt19937_64 rng(7);
    for (int t = 0; t < 10; ++t) {
        const Instance in = random_instance(3, 2, rng);
        const auto init = initial_point(in.H, 10.0, 1.0);
        for (Surrogate kind : {Surrogate::minorant, Surrogate::affine}) {
            const Subproblem sp = build_subproblem(in.H, init.point, 10.0, 0.1, 1.0, kind);
            const auto sol = conic::solve(sp.problem);
            REQUIRE(sol.status == conic::SolveStatus::optimal);
            const Beamformers W = sp.beamformers(sol);
            const SurrogatePoint r = sp.relaxation(sol);
            CHECK(W.total_power() <= 10.0 * (1 + 1e-6));
            for (int k = 0; k < 3; ++k) {
                double all = 1.0;
                for (const auto &Wi : W.priv)
                    all += trace_gain(in.H.H[k], Wi);
                const double own = trace_gain(in.H.H[k], W.priv[k]);
                CHECK(trace_gain(in.H.H[k], W.priv[k]) - r.a_p[k] >= -1e-6 * (1 + r.a_p[k]));
                CHECK(r.b_p[k] - (all - own) >= -1e-6 * (1 + r.b_p[k]));
                CHECK(trace_gain(in.H.H[k], W.common) - r.a_c[k] >= -1e-6 * (1 + r.a_c[k]));
                CHECK(r.b_c[k] - all >= -1e-6 * (1 + r.b_c[k]));
            }
            const auto split = sp.common_split(sol);
            CHECK(std::accumulate(split.begin(), split.end(), 0.0) <= sp.common_surrogate(sol) + 1e-6);
        }
    }
}

TEST_CASE("all-zero channels leave a degenerate but honest subproblem")
{
    LiftedChannel H;
    H.H = {MatrixXcd::Zero(2, 2), MatrixXcd::Zero(2, 2)};
    const auto init = initial_point(H, 10.0, 1.0);
    const Subproblem sp = build_subproblem(H, init.point, 10.0, 0.0, 1.0, Surrogate::affine);
    const auto sol = conic::solve(sp.problem);
    CHECK(sol.status != conic::SolveStatus::numerical_failure);
    if (sol.status == conic::SolveStatus::optimal) {
        // A is forced to zero, B to the noise, so the objective is the surrogate constant.
        double constant = 0.0;
        for (int k = 0; k < 2; ++k)
            constant += surrogate_mu(0.0, 1.0, init.point.a_p[k], init.point.b_p[k]);
        const double mu_c = std::min(surrogate_mu(0.0, 1.0, init.point.a_c[0], init.point.b_c[0]),
                                     surrogate_mu(0.0, 1.0, init.point.a_c[1], init.point.b_c[1]));
        CHECK(sp.objective(sol) == doctest::Approx(constant + mu_c).epsilon(1e-5));
    }
}

TEST_CASE("initial_point")
{
    std::mt19937_64 rng(8);
    for (int t = 0; t < 20; ++t) {
        const Instance in = random_instance(4, 2, rng);
        const auto init = initial_point(in.H, 10.0, 1.0);
        CHECK(init.W.total_power() == doctest::Approx(10.0).epsilon(1e-12));
        for (int k = 0; k < 4; ++k) {
            CHECK(init.point.a_p[k] > 0.0);
            CHECK(init.point.b_p[k] > 0.0);
            CHECK(init.point.a_c[k] > 0.0);
            CHECK(init.point.b_c[k] > 0.0);
        }
    }
    // K = 1 with a rank-one channel: the private beam is aligned, A_p = (P/2) Tr(H).
    const Instance one = random_instance(1, 2, rng);
    const auto init = initial_point(one.H, 10.0, 1.0);
    CHECK(init.point.a_p[0] == doctest::Approx(5.0 * one.H.H[0].trace().real()).epsilon(1e-10));
}

TEST_CASE("extract_rank_one")
{
    std::mt19937_64 rng(9);
    const VectorXcd w0 = random_vector(3, rng);
    const RankOne r = extract_rank_one(w0 * w0.adjoint());
    CHECK(r.residual <= 1e-14);
    // Same vector up to a global phase.
    CHECK(std::abs(std::abs(r.vector.dot(w0)) - w0.squaredNorm()) <= 1e-10 * w0.squaredNorm());
    int big = 0;
    r.vector.cwiseAbs().maxCoeff(&big);
    CHECK(r.vector(big).imag() == doctest::Approx(0.0));
    CHECK(r.vector(big).real() > 0.0);

    CHECK(extract_rank_one(MatrixXcd::Identity(2, 2)).residual == doctest::Approx(1.0));
    const RankOne z = extract_rank_one(MatrixXcd::Zero(2, 2));
    CHECK(z.residual == 0.0);
    CHECK(z.vector.norm() == 0.0);
}

TEST_CASE("evaluate_vectors")
{
    std::mt19937_64 rng(10);
    const Instance in = random_instance(3, 2, rng);
    const auto zero = evaluate_vectors(in.ch, in.pw, VectorXcd::Zero(2), {VectorXcd::Zero(2), VectorXcd::Zero(2),
                                                                         VectorXcd::Zero(2)}, {}, 1.0);
    CHECK(zero.sum_rate == 0.0);
    CHECK(zero.common == 0.0);

    // Vector and trace paths agree.
    const VectorXcd wc = random_vector(2, rng, 0.3);
    std::vector<VectorXcd> wp;
    std::vector<MatrixXcd> priv;
    for (int k = 0; k < 3; ++k) {
        wp.push_back(random_vector(2, rng, 0.3));
        priv.push_back(wp.back() * wp.back().adjoint());
    }
    const auto r = evaluate_vectors(in.ch, in.pw, wc, wp, {0.1, 0.2, 0.3}, 1.0);
    const auto rc = rate_common(in.H, wc * wc.adjoint(), priv, 1.0);
    const auto rp = rate_private(in.H, priv, 1.0);
    for (int k = 0; k < 3; ++k) {
        CHECK(r.common_per_user[k] == doctest::Approx(rc[k]).epsilon(1e-10));
        CHECK(r.priv[k] == doctest::Approx(rp[k]).epsilon(1e-10));
    }
    CHECK(r.common == doctest::Approx(*std::min_element(rc.begin(), rc.end())));
    const double split = std::accumulate(r.split.begin(), r.split.end(), 0.0);
    CHECK(split <= r.common + 1e-9);
    CHECK(r.sum_rate == doctest::Approx(r.common + std::accumulate(rp.begin(), rp.end(), 0.0)));
}

TEST_CASE("SCA: one iteration when eps is infinite")
{
    std::mt19937_64 rng(11);
    const Instance in = random_instance(3, 2, rng);
    ScaConfig cfg;
    cfg.eps = std::numeric_limits<double>::infinity();
    const auto sol = sca_beamforming(in.H, cfg);
    CHECK(sol.log.size() == 1);
    CHECK(sol.objective_trace.size() == 1);
    CHECK(sol.status == ScaStatus::converged);
}

TEST_CASE("SCA: scalar single-user case reaches capacity")
{
    EffectiveChannel e;
    e.h = {VectorXcd::Constant(1, cplx(0.3, -0.4))};
    PowerAllocation pw{Eigen::VectorXd::Constant(1, 0.8)};
    const double noise = 0.01, p = 2.0;
    const auto H = lift_channels(e, pw, noise);
    ScaConfig cfg;
    cfg.p_max = p;
    cfg.r_min = 0.1;
    const auto sol = sca_beamforming(H, cfg);
    REQUIRE(sol.status == ScaStatus::converged);
    const auto r = evaluate_solution(e, pw, sol, noise);
    const double capacity = std::log2(1.0 + p * 0.25 * 0.64 / noise);
    CHECK(std::abs(r.sum_rate - capacity) <= 1e-3);
    CHECK(r.total[0] >= 0.1 - 1e-6);
}

TEST_CASE("SCA on random overloaded instances: monotone, feasible, QoS met")
{
    std::mt19937_64 rng(12);
    for (int t = 0; t < 8; ++t) {
        const Instance in = random_instance(4, 2, rng, 30.0);
        ScaConfig cfg;
        cfg.seed = t;
        const auto sol = sca_beamforming(in.H, cfg);
        REQUIRE(!sol.w_priv.empty());
        for (std::size_t i = 1; i < sol.objective_trace.size(); ++i)
            CHECK(sol.objective_trace[i] >= sol.objective_trace[i - 1] - 1e-6);
        CHECK(sol.W.total_power() <= cfg.p_max * (1 + 1e-6));
        double power = sol.w_common.squaredNorm();
        for (const auto &w : sol.w_priv)
            power += w.squaredNorm();
        CHECK(power <= cfg.p_max * (1 + 1e-6));
        const auto r = evaluate_solution(in.ch, in.pw, sol, 1.0);
        for (double v : r.total)
            CHECK(v >= cfg.r_min - 1e-6);
        // The true rate dominates the minorant objective when the relaxation is rank-one.
        if (!sol.randomized)
            CHECK(r.sum_rate >= sol.objective() - 1e-6);
    }
}

TEST_CASE("SCA reports an infeasible QoS target per drop")
{
    std::mt19937_64 rng(13);
    const Instance in = random_instance(4, 2, rng, 1e-3);
    ScaConfig cfg;
    cfg.r_min = 5.0;
    const auto sol = sca_beamforming(in.H, cfg);
    CHECK(sol.status == ScaStatus::infeasible);
    CHECK(sol.w_priv.empty());
}

TEST_CASE("conventional channels")
{
    SystemLayout l;
    UserDrop u{{{4.0, 0.0, 0.0}, {8.0, 3.0, 0.0}, {1.0, -7.0, 0.0}}};
    const auto cc = conventional_channels(l, u);
    CHECK(std::abs(cc.channels.h[0](0)) == doctest::Approx(std::abs(cc.channels.h[0](1))).epsilon(1e-14));
    for (int k = 0; k < 3; ++k)
        for (int m = 0; m < 2; ++m) {
            const double d = distance(l.feed_points[m], u.positions[k]);
            CHECK(std::abs(cc.channels.h[k](m)) ==
                  doctest::Approx(l.wavelength() / (4 * std::numbers::pi * d)).epsilon(1e-13));
        }
    CHECK(cc.power.L == Eigen::VectorXd::Ones(2));
}
