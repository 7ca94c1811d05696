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

#include "risisac/linalg.hpp"

#include <Eigen/SparseCore>

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace risisac::conic {

using SpMat = Eigen::SparseMatrix<double>;

enum class ConeKind { nonnegative, second_order };

/// One block of the product cone. A second-order block (t, u) requires
/// t >= ||u||; a nonnegative block is an orthant of the given dimension.
struct Cone {
    ConeKind kind;
    Eigen::Index dim;
};

/// minimize c^T x  subject to  A x = b,  s = h - G x,  s in K.
/// K is the product of `cones`, stacked in order along the rows of G.
struct ConeProgram {
    RVec c;
    SpMat A;
    RVec b;
    SpMat G;
    RVec h;
    std::vector<Cone> cones;

    Eigen::Index num_vars() const { return c.size(); }
    Eigen::Index num_equalities() const { return b.size(); }
    Eigen::Index num_cone_rows() const { return h.size(); }
    /// Throws std::invalid_argument on inconsistent shapes or non-finite data.
    void validate() const;
};

/// optimal_inaccurate: the solve stalled, and the best iterate meets
/// `reduced_tol` but not `tol`.
enum class ConeStatus { optimal, optimal_inaccurate, infeasible, unbounded, max_iter };

/// optimal or optimal_inaccurate.
inline bool solved(ConeStatus s) { return s == ConeStatus::optimal || s == ConeStatus::optimal_inaccurate; }

std::string to_string(ConeStatus status);

struct ConeSolution {
    RVec x, s, y, z;
    ConeStatus status = ConeStatus::max_iter;
    int iterations = 0;
    double primal_residual = 0.0;  ///< max of ||Ax-b||/(1+||b||), ||Gx+s-h||/(1+||h||)
    double dual_residual = 0.0;    ///< ||A^T y + G^T z + c|| / (1+||c||)
    double gap = 0.0;              ///< s^T z
    double relative_gap = 0.0;     ///< s^T z / max(1, |c^T x|)
    double primal_objective = 0.0;
    double dual_objective = 0.0;
};

struct SolverOptions {
    double tol = 1e-8;
    double reduced_tol = 1e-6;
    int max_iter = 100;
    bool verbose = false;  ///< one line per iteration on stderr
};

/// Homogeneous self-dual primal-dual interior point method with
/// Nesterov-Todd scaling and Mehrotra predictor-corrector steps.
ConeSolution solve(const ConeProgram& prog, const SolverOptions& opts = {});

/// Plain-text dump for cross-checking against external solvers:
///   conic-program v1
///   n <n> p <p> m <m>
///   cones <count>
///   l <dim> | q <dim>          (one line per cone)
///   c <n values>
///   b <p values>
///   h <m values>
///   A <nnz>  followed by nnz lines "row col value"
///   G <nnz>  followed by nnz lines "row col value"
void dump(const ConeProgram& prog, std::ostream& out);

/// Inverse of dump(). Throws std::runtime_error on malformed input.
ConeProgram read_dump(std::istream& in);

// ------------------------------------------------------------------------
// Model building and complex lifting.

/// sum_i coeff_i * x[index_i] + constant over the real decision vector.
struct AffineExpr {
    std::vector<std::pair<Eigen::Index, double>> terms;
    double constant = 0.0;

    static AffineExpr constant_term(double v) { return {{}, v}; }
    static AffineExpr variable(Eigen::Index i, double coeff = 1.0) { return {{{i, coeff}}, 0.0}; }
};

/// A complex decision variable z = x[re] + j x[im].
struct ComplexVar {
    Eigen::Index re;
    Eigen::Index im;
};

/// sum_i coeff_i * z_i + constant over complex variables.
struct ComplexAffine {
    std::vector<std::pair<ComplexVar, cplx>> terms;
    cplx constant{0.0, 0.0};
};

AffineExpr real_part(const ComplexAffine& e);
AffineExpr imag_part(const ComplexAffine& e);

class ConeProgramBuilder {
public:
    /// Appends n real variables, returns the index of the first.
    Eigen::Index add_variables(Eigen::Index n);
    /// Appends n complex variables laid out as n real parts followed by n
    /// imaginary parts ([Re; Im] stacking).
    std::vector<ComplexVar> add_complex_variables(Eigen::Index n);

    void set_objective(Eigen::Index var, double coeff);

    void add_equality(const AffineExpr& e);                 // e == 0
    void add_complex_equality(const ComplexAffine& e);       // Re e == 0, Im e == 0
    void add_nonnegative(const AffineExpr& e);               // e >= 0
    void add_soc(const std::vector<AffineExpr>& rows);       // rows[0] >= ||rows[1:]||
    /// head >= ||[complex_tail; real_tail]||; each complex entry occupies two
    /// rows (Re, Im), so |z| <= t is a 3-dimensional real cone.
    void add_complex_soc(const AffineExpr& head, const std::vector<ComplexAffine>& complex_tail,
                         const std::vector<AffineExpr>& real_tail = {});

    Eigen::Index num_vars() const { return num_vars_; }
    ConeProgram build() const;

private:
    using Triplet = Eigen::Triplet<double>;
    void push_row(std::vector<Triplet>& trips, Eigen::Index row, const AffineExpr& e) const;

    Eigen::Index num_vars_ = 0;
    std::vector<std::pair<Eigen::Index, double>> objective_;
    std::vector<AffineExpr> equalities_;
    std::vector<std::pair<Cone, std::vector<AffineExpr>>> cone_rows_;
};

}  // namespace risisac::conic
