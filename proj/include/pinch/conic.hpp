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

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pinch::conic {

// Real symmetric embedding [[Re H, -Im H], [Im H, Re H]] of a Hermitian matrix.
// Every eigenvalue of H appears twice and Tr(embed(A) embed(B)) = 2 Re Tr(AB).
// Throws std::invalid_argument if H is not Hermitian to 1e-10.
Eigen::MatrixXd hermitian_embed(const Eigen::MatrixXcd &H);

// Inverse of hermitian_embed on the structured subspace; for an arbitrary symmetric X
// it returns the Hermitian matrix whose embedding is the nearest structured matrix.
Eigen::MatrixXcd hermitian_extract(const Eigen::MatrixXd &X);

enum class Relation { equal, less_equal, greater_equal };
enum class Sense { minimize, maximize };

// Re Tr(coeff * W_block) for a complex Hermitian PSD block variable.
struct BlockTerm {
    int block = 0;
    Eigen::MatrixXcd coeff;
};

struct ScalarTerm {
    int index = 0;
    double coeff = 0.0;
};

// Affine expression over the problem variables.
struct LinearForm {
    std::vector<BlockTerm> blocks;
    std::vector<ScalarTerm> nonneg;
    std::vector<ScalarTerm> free;
};

struct Constraint {
    LinearForm lhs;
    Relation relation = Relation::equal;
    double rhs = 0.0;
    std::string label;
};

// Variables: Hermitian PSD blocks, nonnegative scalars and free scalars.
struct ConicProblem {
    std::vector<int> block_dims;
    int nonneg_count = 0;
    int free_count = 0;
    Sense sense = Sense::maximize;
    LinearForm objective;
    std::vector<Constraint> constraints;

    int add_block(int dim)
    {
        block_dims.push_back(dim);
        return int(block_dims.size()) - 1;
    }
    int add_nonneg() { return nonneg_count++; }
    int add_free() { return free_count++; }
    void add_constraint(LinearForm lhs, Relation rel, double rhs, std::string label = {})
    {
        constraints.push_back({std::move(lhs), rel, rhs, std::move(label)});
    }

    // Throws std::invalid_argument on inconsistent indices/dimensions or non-finite data.
    void validate() const;

    // Self-describing text dump (dimensions plus dense coefficient lists).
    void dump(std::ostream &os) const;
};

enum class SolveStatus { optimal, infeasible, unbounded, max_iterations, numerical_failure };

std::string to_string(SolveStatus s);

struct SolverOptions {
    double gap_tol = 1e-7;      // relative duality gap
    double feas_tol = 1e-8;     // relative primal/dual residual
    int max_iterations = 100;
    int max_block_dim = 16;
    int max_constraints = 200;
};

struct ConicSolution {
    std::vector<Eigen::MatrixXcd> blocks;
    Eigen::VectorXd nonneg;
    Eigen::VectorXd free;
    Eigen::VectorXd duals; // one multiplier per constraint, internal minimisation sign convention
    double objective = 0.0;      // primal value, in the problem's sense
    double dual_objective = 0.0; // in the problem's sense
    double gap = 0.0;            // relative duality gap at exit
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    int iterations = 0;
    SolveStatus status = SolveStatus::max_iterations;
};

// Evaluates a linear form at a point (complex blocks read back in the Hermitian domain).
double evaluate(const LinearForm &form, const std::vector<Eigen::MatrixXcd> &blocks, const Eigen::VectorXd &nonneg,
                const Eigen::VectorXd &free);

// Largest violation of any constraint at the given point, in absolute units.
double max_violation(const ConicProblem &problem, const ConicSolution &solution);

// Infeasible-start primal-dual interior point (HKM direction, Mehrotra predictor-corrector)
// on the real embedding. Throws std::invalid_argument for malformed or oversized problems;
// infeasibility and stalls are reported through the status.
ConicSolution solve(const ConicProblem &problem, const SolverOptions &options = {});

} // namespace pinch::conic
