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

#include "risisac/beamform.hpp"

#include <cmath>
#include <string>

namespace risisac {

using conic::AffineExpr;
using conic::ComplexAffine;
using conic::ComplexVar;
using conic::ConeProgramBuilder;
using conic::ConeStatus;

CMat build_c1(const std::vector<CMat>& H_t, const std::vector<double>& weights, double sigma_r_sq)
{
    if (H_t.empty() || H_t.size() != weights.size())
        throw std::invalid_argument("build_c1: need one weight per target");
    CMat C1 = CMat::Zero(H_t.front().cols(), H_t.front().cols());
    for (std::size_t t = 0; t < H_t.size(); ++t)
        C1.noalias() += (weights[t] / sigma_r_sq) * H_t[t].adjoint() * H_t[t];
    // Symmetrize away round-off so downstream code can rely on exact Hermitian structure.
    return 0.5 * (C1 + C1.adjoint());
}

double mm_surrogate_w(const BeamformerMatrix& W, const BeamformerMatrix& W_i, const CMat& C1)
{
    if (W.rows() != W_i.rows() || W.cols() != W_i.cols() || C1.rows() != W.rows())
        throw std::invalid_argument("mm_surrogate_w: shape mismatch");
    // vec(W_i^H)^H (C1^T kron I) vec(W^H) = Tr(W^H C1 W_i)
    const double linear = (W.adjoint() * C1 * W_i).trace().real();
    const double c1 = -(W_i.adjoint() * C1 * W_i).trace().real();
    return 2.0 * linear + c1;
}

BeamformerMatrix rotate_columns(const BeamformerMatrix& W, const std::vector<CVec>& h_k)
{
    if (static_cast<Eigen::Index>(h_k.size()) > W.cols())
        throw std::invalid_argument("rotate_columns: more users than columns");
    BeamformerMatrix out = W;
    for (std::size_t k = 0; k < h_k.size(); ++k) {
        const cplx g = h_k[k].transpose() * W.col(static_cast<Eigen::Index>(k));
        const double mag = std::abs(g);
        if (mag > 0.0)
            out.col(static_cast<Eigen::Index>(k)) *= std::conj(g) / mag;
    }
    return out;
}

namespace {

// h^T x_j as a complex affine expression over column j of the variable matrix.
ComplexAffine channel_times_column(const std::vector<ComplexVar>& vars, const CVec& h,
                                   Eigen::Index col, Eigen::Index M)
{
    ComplexAffine e;
    e.terms.reserve(static_cast<std::size_t>(M));
    for (Eigen::Index m = 0; m < M; ++m)
        e.terms.push_back({vars[static_cast<std::size_t>(col * M + m)], h(m)});
    return e;
}

// Adds the rotated SINR cone of user k over `num_cols` variable columns.
// `h` is the channel over the noise amplitude. Every row is divided by ||h||,
// which leaves the cone unchanged and keeps coefficients O(1).
void add_sinr_cone(ConeProgramBuilder& b, const std::vector<ComplexVar>& vars, const CVec& h_scaled,
                   Eigen::Index k, Eigen::Index num_cols, double gamma)
{
    const double hn = h_scaled.norm();
    if (!(hn > 0.0))
        throw InfeasibleScenario("user " + std::to_string(k) + " has an all-zero channel");
    const CVec h = h_scaled / hn;
    const Eigen::Index M = h.size();
    const ComplexAffine own = channel_times_column(vars, h, k, M);
    AffineExpr head = conic::real_part(own);
    const double scale = std::sqrt(1.0 + 1.0 / gamma);
    for (auto& t : head.terms)
        t.second *= scale;
    std::vector<ComplexAffine> tail;
    tail.reserve(static_cast<std::size_t>(num_cols));
    for (Eigen::Index j = 0; j < num_cols; ++j)
        tail.push_back(channel_times_column(vars, h, j, M));
    b.add_complex_soc(head, tail, {AffineExpr::constant_term(1.0 / hn)});
    b.add_equality(conic::imag_part(own));
}

CMat extract(const RVec& x, const std::vector<ComplexVar>& vars, Eigen::Index rows, Eigen::Index cols)
{
    CMat out(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index m = 0; m < rows; ++m) {
            const ComplexVar& v = vars[static_cast<std::size_t>(j * rows + m)];
            out(m, j) = {x(v.re), x(v.im)};
        }
    return out;
}

void check_context(const WStepContext& ctx)
{
    const Eigen::Index M = ctx.C1.rows();
    if (ctx.C1.cols() != M || ctx.W_prev.rows() != M)
        throw std::invalid_argument("solve_w_step: C1 / W shape mismatch");
    if (ctx.gamma.size() != ctx.h_k.size() || ctx.sigma_k_sq.size() != ctx.h_k.size())
        throw std::invalid_argument("solve_w_step: per-user data size mismatch");
    if (static_cast<Eigen::Index>(ctx.h_k.size()) > ctx.W_prev.cols())
        throw std::invalid_argument("solve_w_step: more users than beamformer columns");
    if (!(ctx.power > 0.0))
        throw std::invalid_argument("solve_w_step: power must be > 0");
}

}  // namespace

BeamformerMatrix solve_w_step(const WStepContext& ctx)
{
    check_context(ctx);
    const Eigen::Index M = ctx.C1.rows();
    const Eigen::Index cols = ctx.W_prev.cols();
    const double sqrt_p = std::sqrt(ctx.power);

    const BeamformerMatrix W_rot = rotate_columns(ctx.W_prev, ctx.h_k);
    CMat D = ctx.C1 * W_rot;  // gradient direction of Re Tr(W^H C1 W_rot)
    const double dnorm = D.norm();
    if (dnorm > 0.0)
        D /= dnorm;

    // Variables X = W / sqrt(P), so the budget is the unit ball.
    ConeProgramBuilder b;
    const auto vars = b.add_complex_variables(M * cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index m = 0; m < M; ++m) {
            const ComplexVar& v = vars[static_cast<std::size_t>(j * M + m)];
            b.set_objective(v.re, -D(m, j).real());
            b.set_objective(v.im, -D(m, j).imag());
        }
    for (std::size_t k = 0; k < ctx.h_k.size(); ++k) {
        const CVec h = (sqrt_p / std::sqrt(ctx.sigma_k_sq[k])) * ctx.h_k[k];
        add_sinr_cone(b, vars, h, static_cast<Eigen::Index>(k), cols, ctx.gamma[k]);
    }
    {
        std::vector<AffineExpr> rows{AffineExpr::constant_term(1.0)};
        rows.reserve(vars.size() * 2 + 1);
        for (const auto& v : vars) {
            rows.push_back(AffineExpr::variable(v.re));
            rows.push_back(AffineExpr::variable(v.im));
        }
        b.add_soc(rows);
    }

    const auto sol = conic::solve(b.build(), ctx.solver);
    if (!conic::solved(sol.status))
        throw StepFailure("W-step SOCP failed", sol.status, sol.primal_residual, sol.dual_residual);

    BeamformerMatrix W = sqrt_p * extract(sol.x, vars, M, cols);
    const double pw = W.squaredNorm();
    if (pw > ctx.power)
        W *= std::sqrt(ctx.power / pw);
    return W;
}

CMat min_power_beamformer(const std::vector<CVec>& h_k, const std::vector<double>& gamma,
                          const std::vector<double>& sigma_k_sq, Eigen::Index num_antennas,
                          double power, const conic::SolverOptions& solver)
{
    const Eigen::Index K = static_cast<Eigen::Index>(h_k.size());
    const Eigen::Index M = num_antennas;
    if (K == 0)
        return CMat::Zero(M, 0);
    if (gamma.size() != h_k.size() || sigma_k_sq.size() != h_k.size())
        throw std::invalid_argument("min_power_beamformer: per-user data size mismatch");
    if (!(power > 0.0))
        throw std::invalid_argument("min_power_beamformer: power must be > 0");
    const double sqrt_p = std::sqrt(power);

    ConeProgramBuilder b;
    const auto t = b.add_variables(1);
    const auto vars = b.add_complex_variables(M * K);
    b.set_objective(t, 1.0);
    for (Eigen::Index k = 0; k < K; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        const CVec h = (sqrt_p / std::sqrt(sigma_k_sq[ku])) * h_k[ku];
        add_sinr_cone(b, vars, h, k, K, gamma[static_cast<std::size_t>(k)]);
    }
    std::vector<AffineExpr> rows{AffineExpr::variable(t)};
    for (const auto& v : vars) {
        rows.push_back(AffineExpr::variable(v.re));
        rows.push_back(AffineExpr::variable(v.im));
    }
    b.add_soc(rows);
    b.add_nonnegative({{{t, -1.0}}, 1.0});

    const auto sol = conic::solve(b.build(), solver);
    if (sol.status == ConeStatus::infeasible)
        throw InfeasibleScenario("SINR targets cannot be met within the power budget");
    if (!conic::solved(sol.status))
        throw StepFailure("power-minimization SOCP failed", sol.status, sol.primal_residual,
                          sol.dual_residual);
    return sqrt_p * extract(sol.x, vars, M, K);
}

WStepContext make_w_step_context(const ChannelSet& ch, const PhaseVector& phi,
                                 const ScenarioConfig& config, const BeamformerMatrix& W_prev,
                                 bool constrained)
{
    WStepContext ctx;
    std::vector<CMat> H;
    for (int t = 0; t < ch.num_targets(); ++t)
        H.push_back(equivalent_target_channel(ch, phi, t));
    ctx.C1 = build_c1(H, config.weights, config.sigma_r_sq);
    if (constrained) {
        for (int k = 0; k < ch.num_users(); ++k) {
            ctx.h_k.push_back(effective_user_channel(ch, phi, k));
            ctx.gamma.push_back(config.gamma_linear());
            ctx.sigma_k_sq.push_back(config.sigma_k_sq);
        }
    }
    ctx.power = config.power;
    ctx.W_prev = W_prev;
    ctx.solver.tol = config.solver.conic_tol;
    ctx.solver.max_iter = config.solver.conic_max_iter;
    return ctx;
}

}  // namespace risisac
