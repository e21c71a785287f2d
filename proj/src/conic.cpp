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

#include "pinch/conic.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace pinch::conic {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd hermitian_embed(const MatrixXcd &H)
{
    if (H.rows() != H.cols())
        throw std::invalid_argument("hermitian_embed: matrix is not square");
    if ((H - H.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + H.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("hermitian_embed: matrix is not Hermitian");
    const Eigen::Index n = H.rows();
    MatrixXd E(2 * n, 2 * n);
    E.topLeftCorner(n, n) = H.real();
    E.topRightCorner(n, n) = -H.imag();
    E.bottomLeftCorner(n, n) = H.imag();
    E.bottomRightCorner(n, n) = H.real();
    return E;
}

MatrixXcd hermitian_extract(const MatrixXd &X)
{
    const Eigen::Index n = X.rows() / 2;
    const MatrixXd re = 0.5 * (X.topLeftCorner(n, n) + X.bottomRightCorner(n, n));
    const MatrixXd im = 0.5 * (X.bottomLeftCorner(n, n) - X.topRightCorner(n, n));
    MatrixXcd W(n, n);
    W.real() = re;
    W.imag() = im;
    // Exact Hermitian symmetry on the way out.
    return 0.5 * (W + W.adjoint());
}

std::string to_string(SolveStatus s)
{
    switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::numerical_failure: return "numerical_failure";
    }
    return "unknown";
}

namespace {

void check_form(const LinearForm &f, const ConicProblem &p, const char *what)
{
    for (const auto &t : f.blocks) {
        if (t.block < 0 || t.block >= int(p.block_dims.size()))
            throw std::invalid_argument(std::string(what) + ": block index out of range");
        const int n = p.block_dims[t.block];
        if (t.coeff.rows() != n || t.coeff.cols() != n)
            throw std::invalid_argument(std::string(what) + ": block coefficient has wrong size");
        if (!t.coeff.allFinite())
            throw std::invalid_argument(std::string(what) + ": non-finite block coefficient");
        if ((t.coeff - t.coeff.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + t.coeff.cwiseAbs().maxCoeff()))
            throw std::invalid_argument(std::string(what) + ": block coefficient is not Hermitian");
    }
    for (const auto &t : f.nonneg)
        if (t.index < 0 || t.index >= p.nonneg_count || !std::isfinite(t.coeff))
            throw std::invalid_argument(std::string(what) + ": bad nonnegative-scalar term");
    for (const auto &t : f.free)
        if (t.index < 0 || t.index >= p.free_count || !std::isfinite(t.coeff))
            throw std::invalid_argument(std::string(what) + ": bad free-scalar term");
}

} // namespace

void ConicProblem::validate() const
{
    for (int d : block_dims)
        if (d < 1)
            throw std::invalid_argument("ConicProblem: block dimension must be positive");
    if (nonneg_count < 0 || free_count < 0)
        throw std::invalid_argument("ConicProblem: negative scalar count");
    check_form(objective, *this, "objective");
    for (const auto &c : constraints) {
        check_form(c.lhs, *this, "constraint");
        if (!std::isfinite(c.rhs))
            throw std::invalid_argument("constraint: non-finite right-hand side");
    }
}

void ConicProblem::dump(std::ostream &os) const
{
    auto put_form = [&os](const LinearForm &f) {
        for (const auto &t : f.blocks) {
            os << "  block " << t.block << " " << t.coeff.rows() << "\n";
            for (Eigen::Index r = 0; r < t.coeff.rows(); ++r) {
                os << "   ";
                for (Eigen::Index c = 0; c < t.coeff.cols(); ++c)
                    os << " " << t.coeff(r, c).real() << " " << t.coeff(r, c).imag();
                os << "\n";
            }
        }
        for (const auto &t : f.nonneg)
            os << "  nonneg " << t.index << " " << t.coeff << "\n";
        for (const auto &t : f.free)
            os << "  free " << t.index << " " << t.coeff << "\n";
    };
    const auto old_prec = os.precision(17);
    os << "conic-problem v1\n";
    os << "blocks " << block_dims.size();
    for (int d : block_dims)
        os << " " << d;
    os << "\nnonneg " << nonneg_count << "\nfree " << free_count << "\n";
    os << "objective " << (sense == Sense::maximize ? "max" : "min") << "\n";
    put_form(objective);
    os << "constraints " << constraints.size() << "\n";
    for (std::size_t i = 0; i < constraints.size(); ++i) {
        const auto &c = constraints[i];
        const char *rel = c.relation == Relation::equal ? "==" : c.relation == Relation::less_equal ? "<=" : ">=";
        os << "constraint " << i << " " << rel << " " << c.rhs;
        if (!c.label.empty())
            os << " # " << c.label;
        os << "\n";
        put_form(c.lhs);
    }
    os << "end\n";
    os.precision(old_prec);
}

double evaluate(const LinearForm &form, const std::vector<MatrixXcd> &blocks, const VectorXd &nonneg,
                const VectorXd &free)
{
    double v = 0.0;
    for (const auto &t : form.blocks)
        v += (t.coeff.cwiseProduct(blocks[t.block].transpose())).sum().real();
    for (const auto &t : form.nonneg)
        v += t.coeff * nonneg(t.index);
    for (const auto &t : form.free)
        v += t.coeff * free(t.index);
    return v;
}

double max_violation(const ConicProblem &problem, const ConicSolution &sol)
{
    double worst = 0.0;
    for (const auto &c : problem.constraints) {
        const double lhs = evaluate(c.lhs, sol.blocks, sol.nonneg, sol.free);
        double v = 0.0;
        switch (c.relation) {
        case Relation::equal: v = std::abs(lhs - c.rhs); break;
        case Relation::less_equal: v = std::max(0.0, lhs - c.rhs); break;
        case Relation::greater_equal: v = std::max(0.0, c.rhs - lhs); break;
        }
        worst = std::max(worst, v);
    }
    return worst;
}

namespace {

// Standard form over real symmetric blocks:
//   min <C, X> + c.x + cf.f   s.t.  A(X) + Al x + Af f = b,  X >= 0, x >= 0.
struct RealForm {
    std::vector<int> dims;
    std::vector<MatrixXd> C;
    VectorXd c_lin;
    VectorXd c_free;
    // by_block[j] lists (row, coefficient) pairs touching block j.
    std::vector<std::vector<std::pair<int, MatrixXd>>> by_block;
    MatrixXd A_lin;
    MatrixXd A_free;
    VectorXd b;
    VectorXd row_scale; // original row = scaled row / row_scale
    int user_nonneg = 0;
};

RealForm to_real_form(const ConicProblem &p)
{
    RealForm r;
    const int nb = int(p.block_dims.size());
    const int m = int(p.constraints.size());
    int slacks = 0;
    for (const auto &c : p.constraints)
        if (c.relation != Relation::equal)
            ++slacks;

    r.user_nonneg = p.nonneg_count;
    for (int d : p.block_dims)
        r.dims.push_back(2 * d);
    r.C.resize(nb);
    for (int j = 0; j < nb; ++j)
        r.C[j] = MatrixXd::Zero(r.dims[j], r.dims[j]);
    r.c_lin = VectorXd::Zero(p.nonneg_count + slacks);
    r.c_free = VectorXd::Zero(p.free_count);

    const double sign = p.sense == Sense::maximize ? -1.0 : 1.0;
    for (const auto &t : p.objective.blocks)
        r.C[t.block] += sign * 0.5 * hermitian_embed(0.5 * (t.coeff + t.coeff.adjoint()));
    for (const auto &t : p.objective.nonneg)
        r.c_lin(t.index) += sign * t.coeff;
    for (const auto &t : p.objective.free)
        r.c_free(t.index) += sign * t.coeff;

    r.by_block.resize(nb);
    r.A_lin = MatrixXd::Zero(m, p.nonneg_count + slacks);
    r.A_free = MatrixXd::Zero(m, p.free_count);
    r.b = VectorXd::Zero(m);
    r.row_scale = VectorXd::Ones(m);

    int slack = p.nonneg_count;
    for (int i = 0; i < m; ++i) {
        const auto &c = p.constraints[i];
        std::vector<MatrixXd> rows(nb);
        for (const auto &t : c.lhs.blocks) {
            MatrixXd e = 0.5 * hermitian_embed(0.5 * (t.coeff + t.coeff.adjoint()));
            if (rows[t.block].size() == 0)
                rows[t.block] = std::move(e);
            else
                rows[t.block] += e;
        }
        for (const auto &t : c.lhs.nonneg)
            r.A_lin(i, t.index) += t.coeff;
        for (const auto &t : c.lhs.free)
            r.A_free(i, t.index) += t.coeff;
        if (c.relation == Relation::less_equal)
            r.A_lin(i, slack++) = 1.0;
        else if (c.relation == Relation::greater_equal)
            r.A_lin(i, slack++) = -1.0;
        r.b(i) = c.rhs;

        // Row equilibration: unit Euclidean norm over all coefficients.
        double norm2 = r.A_lin.row(i).squaredNorm() + r.A_free.row(i).squaredNorm();
        for (const auto &e : rows)
            if (e.size() != 0)
                norm2 += e.squaredNorm();
        const double s = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 1.0;
        r.row_scale(i) = s;
        r.A_lin.row(i) *= s;
        r.A_free.row(i) *= s;
        r.b(i) *= s;
        for (int j = 0; j < nb; ++j)
            if (rows[j].size() != 0)
                r.by_block[j].emplace_back(i, rows[j] * s);
    }
    return r;
}

MatrixXd sym(const MatrixXd &A) { return 0.5 * (A + A.transpose()); }

// Largest alpha with X + alpha dX PSD (infinity when unbounded). Requires X PD.
double max_step_psd(const MatrixXd &X, const MatrixXd &dX, bool &ok)
{
    Eigen::LLT<MatrixXd> llt(X);
    if (llt.info() != Eigen::Success) {
        ok = false;
        return 0.0;
    }
    const MatrixXd Linv_dX = llt.matrixL().solve(dX);
    const MatrixXd T = llt.matrixL().solve(Linv_dX.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(T), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()(0);
    return lmin >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

double max_step_lin(const VectorXd &x, const VectorXd &dx)
{
    double a = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (dx(i) < 0.0)
            a = std::min(a, -x(i) / dx(i));
    return a;
}

struct Iterate {
    std::vector<MatrixXd> X, Z;
    VectorXd x, z, f, y;
};

struct Direction {
    std::vector<MatrixXd> dX, dZ;
    VectorXd dx, dz, df, dy;
};

class Ipm {
  public:
    Ipm(const RealForm &rf, const SolverOptions &opt) : p_(rf), opt_(opt)
    {
        nb_ = int(p_.dims.size());
        m_ = int(p_.b.size());
        nl_ = int(p_.c_lin.size());
        nf_ = int(p_.c_free.size());
        nu_ = nl_;
        for (int d : p_.dims)
            nu_ += d;
    }

    ConicSolution run(Iterate &it);

  private:
    void residuals(const Iterate &it);
    bool factor(const Iterate &it);
    Direction direction(const Iterate &it, const std::vector<MatrixXd> &Rc, const VectorXd &rc);

    const RealForm &p_;
    const SolverOptions &opt_;
    int nb_ = 0, m_ = 0, nl_ = 0, nf_ = 0, nu_ = 0;

    // Residuals at the current iterate.
    VectorXd rp_;
    std::vector<MatrixXd> Rd_;
    VectorXd rd_lin_, rd_free_;
    double pobj_ = 0.0, dobj_ = 0.0, compl_ = 0.0;

    std::vector<MatrixXd> Zinv_;
    Eigen::PartialPivLU<MatrixXd> lu_;
};

void Ipm::residuals(const Iterate &it)
{
    rp_ = p_.b - p_.A_lin * it.x - p_.A_free * it.f;
    Rd_.assign(nb_, MatrixXd());
    pobj_ = p_.c_lin.dot(it.x) + p_.c_free.dot(it.f);
    compl_ = it.x.dot(it.z);
    for (int j = 0; j < nb_; ++j) {
        Rd_[j] = p_.C[j] - it.Z[j];
        for (const auto &[i, A] : p_.by_block[j]) {
            rp_(i) -= A.cwiseProduct(it.X[j]).sum();
            Rd_[j] -= it.y(i) * A;
        }
        pobj_ += p_.C[j].cwiseProduct(it.X[j]).sum();
        compl_ += it.X[j].cwiseProduct(it.Z[j]).sum();
    }
    rd_lin_ = p_.c_lin - p_.A_lin.transpose() * it.y - it.z;
    rd_free_ = p_.c_free - p_.A_free.transpose() * it.y;
    dobj_ = p_.b.dot(it.y);
}

bool Ipm::factor(const Iterate &it)
{
    Zinv_.assign(nb_, MatrixXd());
    const int n_aug = m_ + nf_;
    MatrixXd K = MatrixXd::Zero(n_aug, n_aug);
    for (int j = 0; j < nb_; ++j) {
        Eigen::LLT<MatrixXd> llt(it.Z[j]);
        if (llt.info() != Eigen::Success)
            return false;
        Zinv_[j] = llt.solve(MatrixXd::Identity(p_.dims[j], p_.dims[j]));
        const auto &terms = p_.by_block[j];
        // G_k = X A_k Z^{-1};  M_ik += <A_i, G_k>.
        std::vector<MatrixXd> G;
        G.reserve(terms.size());
        for (const auto &[k, A] : terms)
            G.push_back(it.X[j] * A * Zinv_[j]);
        for (std::size_t a = 0; a < terms.size(); ++a)
            for (std::size_t c = a; c < terms.size(); ++c) {
                const double v = terms[a].second.cwiseProduct(G[c]).sum();
                K(terms[a].first, terms[c].first) += v;
                if (c != a)
                    K(terms[c].first, terms[a].first) += v;
            }
    }
    if (nl_ > 0) {
        const VectorXd d = it.x.cwiseQuotient(it.z);
        K.topLeftCorner(m_, m_) += p_.A_lin * d.asDiagonal() * p_.A_lin.transpose();
    }
    if (nf_ > 0) {
        K.topRightCorner(m_, nf_) = p_.A_free;
        K.bottomLeftCorner(nf_, m_) = p_.A_free.transpose();
    }
    if (n_aug > 0) {
        lu_.compute(K);
        if (!std::isfinite(lu_.rcond()) || lu_.rcond() < 1e-300)
            return false;
    }
    return true;
}

Direction Ipm::direction(const Iterate &it, const std::vector<MatrixXd> &Rc, const VectorXd &rc)
{
    Direction d;
    VectorXd rhs = VectorXd::Zero(m_ + nf_);
    rhs.head(m_) = rp_;
    std::vector<MatrixXd> T(nb_);
    for (int j = 0; j < nb_; ++j) {
        T[j] = (Rc[j] - it.X[j] * Rd_[j]) * Zinv_[j];
        for (const auto &[i, A] : p_.by_block[j])
            rhs(i) -= A.cwiseProduct(T[j]).sum();
    }
    VectorXd t_lin;
    if (nl_ > 0) {
        t_lin = (rc - it.x.cwiseProduct(rd_lin_)).cwiseQuotient(it.z);
        rhs.head(m_) -= p_.A_lin * t_lin;
    }
    if (nf_ > 0)
        rhs.tail(nf_) = rd_free_;

    VectorXd sol = (m_ + nf_) > 0 ? VectorXd(lu_.solve(rhs)) : VectorXd();
    d.dy = sol.head(m_);
    d.df = sol.tail(nf_);

    d.dX.resize(nb_);
    d.dZ.resize(nb_);
    for (int j = 0; j < nb_; ++j) {
        d.dZ[j] = Rd_[j];
        for (const auto &[i, A] : p_.by_block[j])
            d.dZ[j] -= d.dy(i) * A;
        d.dX[j] = sym((Rc[j] - it.X[j] * d.dZ[j]) * Zinv_[j]);
    }
    if (nl_ > 0) {
        d.dz = rd_lin_ - p_.A_lin.transpose() * d.dy;
        d.dx = (rc - it.x.cwiseProduct(d.dz)).cwiseQuotient(it.z);
    } else {
        d.dz = VectorXd();
        d.dx = VectorXd();
    }
    return d;
}

ConicSolution Ipm::run(Iterate &it)
{
    ConicSolution out;
    const double b_norm = p_.b.norm();
    double c_norm2 = p_.c_lin.squaredNorm() + p_.c_free.squaredNorm();
    for (const auto &C : p_.C)
        c_norm2 += C.squaredNorm();
    const double c_norm = std::sqrt(c_norm2);

    auto primal_step = [&](const Direction &d, bool &ok) {
        double a = max_step_lin(it.x, d.dx);
        for (int j = 0; j < nb_; ++j)
            a = std::min(a, max_step_psd(it.X[j], d.dX[j], ok));
        return a;
    };
    auto dual_step = [&](const Direction &d, bool &ok) {
        double a = max_step_lin(it.z, d.dz);
        for (int j = 0; j < nb_; ++j)
            a = std::min(a, max_step_psd(it.Z[j], d.dZ[j], ok));
        return a;
    };

    double best_merit = std::numeric_limits<double>::infinity();
    int stall = 0;

    for (int iter = 0;; ++iter) {
        residuals(it);
        double rd_norm2 = rd_lin_.squaredNorm() + rd_free_.squaredNorm();
        for (const auto &R : Rd_)
            rd_norm2 += R.squaredNorm();
        const double pinf = rp_.norm() / (1.0 + b_norm);
        const double dinf = std::sqrt(rd_norm2) / (1.0 + c_norm);
        const double denom = 1.0 + std::abs(pobj_) + std::abs(dobj_);
        const double relgap = std::max(std::abs(compl_), std::abs(pobj_ - dobj_)) / denom;

        out.iterations = iter;
        out.gap = relgap;
        out.primal_residual = pinf;
        out.dual_residual = dinf;

        if (relgap <= opt_.gap_tol && pinf <= opt_.feas_tol && dinf <= opt_.feas_tol) {
            out.status = SolveStatus::optimal;
            break;
        }
        // Farkas-type certificates once the iterates diverge.
        if (dobj_ > 0.0 && (c_norm + std::sqrt(rd_norm2)) <= 1e-8 * dobj_ && pinf > opt_.feas_tol) {
            out.status = SolveStatus::infeasible;
            break;
        }
        if (pobj_ < 0.0 && (b_norm + rp_.norm()) <= 1e-8 * (-pobj_) && dinf > opt_.feas_tol) {
            out.status = SolveStatus::unbounded;
            break;
        }
        if (iter >= opt_.max_iterations) {
            out.status = SolveStatus::max_iterations;
            break;
        }
        const double merit = std::max({relgap, pinf, dinf});
        if (merit < 0.5 * best_merit) {
            best_merit = merit;
            stall = 0;
        } else if (++stall > 12) {
            out.status = SolveStatus::max_iterations;
            break;
        }

        if (!factor(it)) {
            out.status = SolveStatus::numerical_failure;
            break;
        }
        const double mu = compl_ / nu_;

        // Predictor (affine scaling).
        std::vector<MatrixXd> Rc(nb_);
        for (int j = 0; j < nb_; ++j)
            Rc[j] = -it.X[j] * it.Z[j];
        VectorXd rc = nl_ > 0 ? VectorXd(-it.x.cwiseProduct(it.z)) : VectorXd();
        Direction aff = direction(it, Rc, rc);
        bool ok = true;
        const double ap_aff = std::min(1.0, primal_step(aff, ok));
        const double ad_aff = std::min(1.0, dual_step(aff, ok));
        if (!ok) {
            out.status = SolveStatus::numerical_failure;
            break;
        }
        double mu_aff = 0.0;
        for (int j = 0; j < nb_; ++j)
            mu_aff += (it.X[j] + ap_aff * aff.dX[j]).cwiseProduct(it.Z[j] + ad_aff * aff.dZ[j]).sum();
        if (nl_ > 0)
            mu_aff += (it.x + ap_aff * aff.dx).dot(it.z + ad_aff * aff.dz);
        mu_aff /= nu_;
        const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

        // Corrector with the second-order term.
        for (int j = 0; j < nb_; ++j)
            Rc[j] = sigma * mu * MatrixXd::Identity(p_.dims[j], p_.dims[j]) - it.X[j] * it.Z[j] -
                    aff.dX[j] * aff.dZ[j];
        if (nl_ > 0)
            rc = VectorXd::Constant(nl_, sigma * mu) - it.x.cwiseProduct(it.z) - aff.dx.cwiseProduct(aff.dz);
        Direction d = direction(it, Rc, rc);

        const double tau = std::clamp(1.0 - 10.0 * mu / (1.0 + mu), 0.9, 0.98);
        const double ap = std::min(1.0, tau * primal_step(d, ok));
        const double ad = std::min(1.0, tau * dual_step(d, ok));
        if (!ok) {
            out.status = SolveStatus::numerical_failure;
            break;
        }
        for (int j = 0; j < nb_; ++j) {
            it.X[j] = sym(it.X[j] + ap * d.dX[j]);
            it.Z[j] = sym(it.Z[j] + ad * d.dZ[j]);
        }
        if (nl_ > 0) {
            it.x += ap * d.dx;
            it.z += ad * d.dz;
        }
        if (nf_ > 0)
            it.f += ap * d.df;
        it.y += ad * d.dy;
    }
    out.objective = pobj_;
    out.dual_objective = dobj_;
    return out;
}

// Rows are equilibrated to unit norm, which leaves primal solutions at O(1) scale while
// multipliers of badly scaled rows run large; the scaled-identity start is skewed to match.
constexpr double kPrimalStart = 0.1;
constexpr double kDualStart = 10.0;

Iterate initial_iterate(const RealForm &p)
{
    Iterate it;
    const int m = int(p.b.size());
    for (std::size_t j = 0; j < p.dims.size(); ++j) {
        const int n = p.dims[j];
        double ratio = 0.0, a_max = 0.0;
        for (const auto &[i, A] : p.by_block[j]) {
            const double an = A.norm();
            ratio = std::max(ratio, (1.0 + std::abs(p.b(i))) / (1.0 + an));
            a_max = std::max(a_max, an);
        }
        const double xi = kPrimalStart * std::max({10.0, std::sqrt(double(n)), n * ratio});
        const double eta = kDualStart * std::max({10.0, std::sqrt(double(n)), 1.0 + a_max, 1.0 + p.C[j].norm()});
        it.X.push_back(xi * MatrixXd::Identity(n, n));
        it.Z.push_back(eta * MatrixXd::Identity(n, n));
    }
    const int nl = int(p.c_lin.size());
    it.x = VectorXd::Ones(nl);
    it.z = VectorXd::Ones(nl);
    for (int l = 0; l < nl; ++l) {
        const double col = p.A_lin.col(l).norm();
        double ratio = 0.0;
        for (int i = 0; i < m; ++i)
            if (p.A_lin(i, l) != 0.0)
                ratio = std::max(ratio, (1.0 + std::abs(p.b(i))) / (1.0 + std::abs(p.A_lin(i, l))));
        it.x(l) = kPrimalStart * std::max(10.0, ratio);
        it.z(l) = kDualStart * std::max({10.0, 1.0 + col, 1.0 + std::abs(p.c_lin(l))});
    }
    it.f = VectorXd::Zero(p.c_free.size());
    it.y = VectorXd::Zero(m);
    return it;
}

} // namespace

ConicSolution solve(const ConicProblem &problem, const SolverOptions &options)
{
    problem.validate();
    for (int d : problem.block_dims)
        if (d > options.max_block_dim)
            throw std::invalid_argument("conic::solve: block dimension exceeds configured limit");
    if (int(problem.constraints.size()) > options.max_constraints)
        throw std::invalid_argument("conic::solve: constraint count exceeds configured limit");

    const RealForm rf = to_real_form(problem);
    Iterate it = initial_iterate(rf);
    Ipm ipm(rf, options);
    ConicSolution sol = ipm.run(it);

    for (const auto &X : it.X)
        sol.blocks.push_back(hermitian_extract(X));
    sol.nonneg = it.x.head(problem.nonneg_count);
    sol.free = it.f;
    sol.duals = it.y.cwiseProduct(rf.row_scale);
    if (problem.sense == Sense::maximize) {
        sol.objective = -sol.objective;
        sol.dual_objective = -sol.dual_objective;
    }
    // Report the primal value exactly as the caller's objective evaluates it.
    sol.objective = evaluate(problem.objective, sol.blocks, sol.nonneg, sol.free);
    return sol;
}

} // namespace pinch::conic
