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

#include "pinch/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "pinch/activation.hpp"
#include "pinch/beamform.hpp"
#include "pinch/bench.hpp"
#include "pinch/conic.hpp"

namespace pinch {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string describe(double worst, double tol)
{
    std::ostringstream os;
    os << "worst " << worst << " (tol " << tol << ")";
    return os.str();
}

// max <C, X> over Tr X = 1, X PSD is the top eigenvalue of C.
ValidationCheck check_top_eigenvalue(const ValidationOptions &opt)
{
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> gauss;
    double worst = 0.0;
    bool all_optimal = true;
    for (int t = 0; t < opt.sdp_instances; ++t) {
        const int n = 1 + t % 4;
        MatrixXcd A(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                A(i, j) = {gauss(rng), gauss(rng)};
        const MatrixXcd C = A + A.adjoint();

        conic::ConicProblem p;
        const int b = p.add_block(n);
        p.objective.blocks.push_back({b, C});
        p.add_constraint({{{b, MatrixXcd::Identity(n, n)}}, {}, {}}, conic::Relation::equal, 1.0);
        conic::SolverOptions so;
        so.gap_tol = 1e-9;
        const auto s = conic::solve(p, so);
        all_optimal = all_optimal && s.status == conic::SolveStatus::optimal;

        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(C);
        const double top = es.eigenvalues()(n - 1);
        worst = std::max(worst, std::abs(s.objective - top) / std::max(std::abs(top), 1e-12));
    }
    return {"conic_top_eigenvalue", all_optimal && worst <= 1e-6, describe(worst, 1e-6)};
}

// max c'x, A x <= b, x >= 0 with A > 0, checked against every basic solution.
double lp_vertex_optimum(const MatrixXd &A, const VectorXd &b, const VectorXd &c)
{
    const int m = int(A.rows()), n = int(A.cols());
    MatrixXd G(m + n, n);
    VectorXd h(m + n);
    G << A, -MatrixXd::Identity(n, n);
    h << b, VectorXd::Zero(n);
    double best = -std::numeric_limits<double>::infinity();
    std::vector<int> pick(n);
    std::vector<bool> sel(m + n, false);
    std::fill(sel.end() - n, sel.end(), true);
    do {
        MatrixXd S(n, n);
        VectorXd r(n);
        int row = 0;
        for (int i = 0; i < m + n; ++i)
            if (sel[i]) {
                S.row(row) = G.row(i);
                r(row++) = h(i);
            }
        Eigen::FullPivLU<MatrixXd> lu(S);
        if (!lu.isInvertible())
            continue;
        const VectorXd x = lu.solve(r);
        if (((G * x - h).array() <= 1e-12).all())
            best = std::max(best, c.dot(x));
    } while (std::next_permutation(sel.begin(), sel.end()));
    return best;
}

ValidationCheck check_lp(const ValidationOptions &opt)
{
    std::mt19937_64 rng(opt.seed + 1);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    double worst = 0.0;
    bool all_optimal = true;
    for (int t = 0; t < opt.lp_instances; ++t) {
        const int n = 2 + t % 3, m = 2 + (t / 3) % 3;
        MatrixXd A(m, n);
        VectorXd b(m), c(n);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j)
                A(i, j) = u(rng);
            b(i) = u(rng);
        }
        for (int j = 0; j < n; ++j)
            c(j) = u(rng) - 0.3;

        // Even instances use nonnegative scalars, odd ones 1x1 PSD blocks.
        conic::ConicProblem p;
        const bool blocks = t % 2;
        for (int j = 0; j < n; ++j) {
            if (blocks) {
                p.add_block(1);
                p.objective.blocks.push_back({j, MatrixXcd::Constant(1, 1, c(j))});
            } else {
                p.add_nonneg();
                p.objective.nonneg.push_back({j, c(j)});
            }
        }
        for (int i = 0; i < m; ++i) {
            conic::LinearForm row;
            for (int j = 0; j < n; ++j) {
                if (blocks)
                    row.blocks.push_back({j, MatrixXcd::Constant(1, 1, A(i, j))});
                else
                    row.nonneg.push_back({j, A(i, j)});
            }
            p.add_constraint(row, conic::Relation::less_equal, b(i));
        }
        conic::SolverOptions so;
        so.gap_tol = 1e-11;
        so.feas_tol = 1e-11;
        const auto s = conic::solve(p, so);
        all_optimal = all_optimal && s.status == conic::SolveStatus::optimal;
        const double ref = lp_vertex_optimum(A, b, c);
        worst = std::max(worst, std::abs(s.objective - ref));
    }
    return {"conic_lp_vertices", all_optimal && worst <= 1e-8, describe(worst, 1e-8)};
}

double true_rate(double a, double b) { return std::log2(1.0 + a / b); }

ValidationCheck check_surrogate_exact(const ValidationOptions &opt)
{
    std::mt19937_64 rng(opt.seed + 2);
    std::uniform_real_distribution<double> lg(-3.0, 3.0);
    double worst = 0.0;
    for (int t = 0; t < opt.surrogate_points; ++t) {
        const double a = std::pow(10.0, lg(rng)), b = std::pow(10.0, lg(rng));
        const double f = true_rate(a, b);
        worst = std::max({worst, std::abs(surrogate_mu(a, b, a, b) - f), std::abs(surrogate_minorant(a, b, a, b) - f)});
    }
    return {"surrogate_exact", worst <= 1e-12, describe(worst, 1e-12)};
}

ValidationCheck check_surrogate_gradient(const ValidationOptions &opt)
{
    std::mt19937_64 rng(opt.seed + 3);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    constexpr double h = 1e-6;
    double worst = 0.0;
    for (int t = 0; t < opt.surrogate_points; ++t) {
        const double a = u(rng), b = u(rng);
        const double fa = (true_rate(a + h, b) - true_rate(a - h, b)) / (2 * h);
        const double fb = (true_rate(a, b + h) - true_rate(a, b - h)) / (2 * h);
        const AffineRate lin = linearize_rate(a, b);
        worst = std::max({worst, std::abs(lin.slope_a - fa) / std::abs(fa), std::abs(lin.slope_b - fb) / std::abs(fb)});
    }
    return {"surrogate_gradient", worst <= 1e-6, describe(worst, 1e-6)};
}

ValidationCheck check_minorant_bound(const ValidationOptions &opt)
{
    std::mt19937_64 rng(opt.seed + 4);
    std::uniform_real_distribution<double> lg(-3.0, 3.0);
    double worst = 0.0; // largest amount by which the minorant exceeds the true rate
    for (int t = 0; t < opt.surrogate_points; ++t) {
        const double at = std::pow(10.0, lg(rng)), bt = std::pow(10.0, lg(rng));
        for (int s = 0; s < 10; ++s) {
            const double a = std::pow(10.0, lg(rng)), b = std::pow(10.0, lg(rng));
            worst = std::max(worst, surrogate_minorant(a, b, at, bt) - true_rate(a, b));
        }
    }
    return {"minorant_lower_bound", worst <= 1e-12, describe(worst, 1e-12)};
}

ValidationCheck check_greedy_vs_exhaustive(const ValidationOptions &opt, std::ostream *progress)
{
    RunConfig cfg;
    cfg.layout.users = 3;
    cfg.n_values = {3};
    cfg.base_seed = opt.seed;
    bool dominated = true;
    double min_ratio = std::numeric_limits<double>::infinity();
    for (int d = 0; d < opt.exhaustive_instances; ++d) {
        const DropScenario s = make_scenario(cfg, 3, d);
        const std::uint64_t seed = cell_seed(cfg.base_seed, d, Scheme::sd_rsma, 3);
        auto eval = [&](const ActivationMask &m) { return mask_sum_rate(cfg, s, m, seed); };
        const double greedy = eval(greedy_activation(s.gains, s.grid, s.users).mask);
        const double best = exhaustive_activation(s.gains, s.grid, s.users, eval).score;
        dominated = dominated && best >= greedy;
        if (std::isfinite(greedy) && best > 0.0)
            min_ratio = std::min(min_ratio, greedy / best);
        if (progress)
            *progress << "  instance " << d << ": greedy " << greedy << ", exhaustive " << best << '\n';
    }
    std::ostringstream os;
    os << opt.exhaustive_instances << " instances, worst greedy/exhaustive ratio " << min_ratio;
    return {"greedy_vs_exhaustive", dominated, os.str()};
}

} // namespace

std::vector<ValidationCheck> run_validation(const ValidationOptions &opt, std::ostream *progress)
{
    std::vector<ValidationCheck> out;
    auto add = [&](ValidationCheck c) {
        if (progress)
            *progress << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << std::endl;
        out.push_back(std::move(c));
    };
    add(check_top_eigenvalue(opt));
    add(check_lp(opt));
    add(check_surrogate_exact(opt));
    add(check_surrogate_gradient(opt));
    add(check_minorant_bound(opt));
    add(check_greedy_vs_exhaustive(opt, progress));
    return out;
}

} // namespace pinch
