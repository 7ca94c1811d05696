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

#include "risisac/ris_phase.hpp"

#include "risisac/beamform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace risisac {

PenaltyState PenaltyState::from_params(const SolverParams& p)
{
    PenaltyState s;
    s.rho = p.rho_init;
    s.shrink = p.shrink;
    s.epsilon = p.epsilon;
    return s;
}

CMat build_bt(const CMat& G, const CVec& h_r_t)
{
    if (G.rows() != h_r_t.size())
        throw std::invalid_argument("build_bt: G has " + std::to_string(G.rows()) +
                                    " rows, h_r_t has " + std::to_string(h_r_t.size()));
    return G.transpose() * h_r_t.asDiagonal();
}

CVec build_vt(const CMat& B_t, const CVec& h_d_t, const PhaseVector& phi)
{
    if (B_t.rows() != h_d_t.size() || B_t.cols() != phi.size())
        throw std::invalid_argument("build_vt: shape mismatch");
    const CVec& p = phi.values();
    const CVec hd_mat = h_d_t;
    const CMat pp = p * p.transpose();
    return kron(B_t, B_t) * vec(pp) + vec(CMat(hd_mat * hd_mat.transpose())) +
           (kron(CMat(hd_mat), B_t) + kron(B_t, CMat(hd_mat))) * p;
}

CVec apply_c2t(const CVec& x, const BeamformerMatrix& W, double weight, double sigma_r_sq)
{
    const Eigen::Index M = W.rows();
    if (x.size() != M * M)
        throw std::invalid_argument("apply_c2t: x must have length M^2");
    const CMat X = unvec(x, M, M);
    return vec(CMat((weight / sigma_r_sq) * X * (W * W.adjoint())));
}

MmPhiTerms mm_phi_coeffs(const std::vector<CVec>& v_t, const std::vector<CMat>& B_t,
                         const std::vector<CVec>& h_d_t, const BeamformerMatrix& W,
                         const std::vector<double>& weights, double sigma_r_sq)
{
    const std::size_t T = v_t.size();
    if (T == 0 || B_t.size() != T || h_d_t.size() != T || weights.size() != T)
        throw std::invalid_argument("mm_phi_coeffs: per-target inputs disagree in length");
    const Eigen::Index M = W.rows();
    const Eigen::Index N = B_t.front().cols();
    MmPhiTerms out;
    out.F1 = CMat::Zero(N, N);
    out.f2 = CVec::Zero(N);
    for (std::size_t t = 0; t < T; ++t) {
        const CVec c2v = apply_c2t(v_t[t], W, weights[t], sigma_r_sq);
        const CMat Y = unvec(c2v, M, M);
        const CMat& B = B_t[t];
        const CVec& hd = h_d_t[t];
        out.F1.noalias() += 2.0 * B.adjoint() * Y * B.conjugate();
        out.f2.noalias() += 2.0 * B.adjoint() * (Y + Y.transpose()) * hd.conjugate();
        out.c2 += 2.0 * (hd.transpose() * Y.conjugate() * hd)(0, 0).real();
        out.offset += v_t[t].dot(c2v).real();
    }
    return out;
}

namespace {

// h_k^T W / sigma_k for every user, K x L.
CMat normalized_user_products(const BeamformerMatrix& W, const ChannelSet& ch, const PhaseVector& phi,
                              double sigma_k_sq)
{
    const int K = ch.num_users();
    CMat out(K, W.cols());
    const double s = 1.0 / std::sqrt(sigma_k_sq);
    for (int k = 0; k < K; ++k)
        out.row(k) = s * (effective_user_channel(ch, phi, k).transpose() * W);
    return out;
}

}  // namespace

PenaltyTerms penalty_quadratic(const BeamformerMatrix& W, const ChannelSet& ch, const AuxVars& aux,
                               double sigma_k_sq)
{
    const Eigen::Index N = ch.num_elements();
    PenaltyTerms out;
    out.Q = CMat::Zero(N, N);
    out.q = CVec::Zero(N);
    if (aux.a.rows() == 0)
        return out;
    if (aux.a.rows() != ch.num_users() || aux.a.cols() != W.cols())
        throw std::invalid_argument("penalty_quadratic: auxiliary variables have the wrong shape");
    const double s = 1.0 / std::sqrt(sigma_k_sq);
    const CMat GW = ch.G * W;                  // N x L
    const CMat gram = GW * GW.adjoint();       // N x N
    for (int k = 0; k < ch.num_users(); ++k) {
        const CVec& hr = ch.h_r_k[static_cast<std::size_t>(k)];
        // g_kj = diag(h_r,k) G w_j / sigma_k, residual c_kj = a_kj - h_d,k^T w_j / sigma_k.
        const CVec c = aux.a.row(k).transpose() - s * (W.transpose() * ch.h_d_k[static_cast<std::size_t>(k)]);
        out.Q += (s * s) * ((hr * hr.adjoint()).array() * gram.array()).matrix();
        out.q += (-2.0 * s) * hr.cwiseProduct(GW * c.conjugate());
        out.c3 += c.squaredNorm();
    }
    out.Q = 0.5 * (out.Q + out.Q.adjoint());
    return out;
}

double penalty_value(const BeamformerMatrix& W, const ChannelSet& ch, const PhaseVector& phi,
                     const AuxVars& aux, double sigma_k_sq)
{
    if (aux.a.rows() == 0)
        return 0.0;
    return (aux.a - normalized_user_products(W, ch, phi, sigma_k_sq)).squaredNorm();
}

double stopping_indicator(const BeamformerMatrix& W, const ChannelSet& ch, const PhaseVector& phi,
                          const AuxVars& aux, double sigma_k_sq)
{
    if (aux.a.rows() == 0)
        return 0.0;
    return (aux.a - normalized_user_products(W, ch, phi, sigma_k_sq)).cwiseAbs().maxCoeff();
}

PhiStepCoeffs build_phi_coeffs(const ChannelSet& ch, const PhaseVector& phi_i,
                               const BeamformerMatrix& W, const AuxVars& aux,
                               const ScenarioConfig& config)
{
    PhiStepCoeffs c;
    for (int t = 0; t < ch.num_targets(); ++t) {
        const auto tu = static_cast<std::size_t>(t);
        c.B_t.push_back(build_bt(ch.G, ch.h_r_t[tu]));
        c.v_t.push_back(vec(equivalent_target_channel(ch, phi_i, t)));
    }
    const MmPhiTerms mm = mm_phi_coeffs(c.v_t, c.B_t, ch.h_d_t, W, config.weights, config.sigma_r_sq);
    c.F1 = mm.F1;
    c.f2 = mm.f2;
    c.c2 = mm.c2;
    c.mm_offset = mm.offset;
    PenaltyTerms pen = penalty_quadratic(W, ch, aux, config.sigma_k_sq);
    c.Q = std::move(pen.Q);
    c.q = std::move(pen.q);
    c.c3 = pen.c3;
    return c;
}

double phi_objective(const CVec& phi, const PhiStepCoeffs& c, double rho)
{
    const double mm = phi.dot(c.F1 * phi.conjugate()).real() + c.f2.dot(phi).real();
    const double pen = phi.transpose().dot(c.Q.conjugate() * phi).real()  // phi^T Q phi^*
                       + (c.q.transpose() * phi)(0, 0).real() + c.c3;
    return -mm + rho * pen;
}

CVec phi_euclidean_gradient(const CVec& phi, const PhiStepCoeffs& c, double rho)
{
    const CVec pc = phi.conjugate();
    return -(c.F1 * pc + c.F1.transpose() * pc) - c.f2 +
           rho * (2.0 * (c.Q.transpose() * phi) + c.q.conjugate());
}

double mm_phi_minorizer(const CVec& phi, const PhiStepCoeffs& c)
{
    const double mm = phi.dot(c.F1 * phi.conjugate()).real() + c.f2.dot(phi).real();
    return mm + c.c2 - c.mm_offset;
}

namespace {

CVec retract(const CVec& z)
{
    CVec out(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double m = std::abs(z(i));
        out(i) = m > 0.0 ? z(i) / m : cplx(1.0, 0.0);
    }
    return out;
}

// Orthogonal projection onto the tangent space at x; doubles as vector transport.
CVec project(const CVec& x, const CVec& v)
{
    return v - (v.array() * x.array().conjugate()).real().matrix().cwiseProduct(x);
}

double inner(const CVec& a, const CVec& b) { return a.dot(b).real(); }

}  // namespace

RcgResult rcg_optimize(const PhaseVector& phi_init, const PhiStepCoeffs& c, double rho,
                       const RcgOptions& opts)
{
    constexpr double kArmijoSlope = 1e-4;
    constexpr double kBacktrack = 0.5;
    constexpr int kMaxBacktracks = 60;
    constexpr double kPi = 3.14159265358979323846;

    RcgResult res;
    CVec x = phi_init.values();
    double f = phi_objective(x, c, rho);
    CVec rg = project(x, phi_euclidean_gradient(x, c, rho));
    CVec d = -rg;
    // First trial step moves the steepest coordinate by pi/8 rad.
    double step = rg.size() > 0 && rg.cwiseAbs().maxCoeff() > 0.0 ? (kPi / 8.0) / rg.cwiseAbs().maxCoeff() : 1.0;

    int it = 0;
    for (; it < opts.max_iters; ++it) {
        const double gn2 = rg.squaredNorm();
        if (std::sqrt(gn2) < opts.grad_tol)
            break;
        double slope = inner(rg, d);
        if (slope >= 0.0) {
            d = -rg;
            slope = -gn2;
        }
        double t = step;
        CVec x_new;
        double f_new = f;
        bool accepted = false;
        for (int ls = 0; ls < kMaxBacktracks; ++ls) {
            x_new = retract(x + t * d);
            f_new = phi_objective(x_new, c, rho);
            if (f_new <= f + kArmijoSlope * t * slope) {
                accepted = true;
                break;
            }
            t *= kBacktrack;
        }
        if (!accepted) {
            res.line_search_failed = true;
            break;
        }
        const CVec rg_new = project(x_new, phi_euclidean_gradient(x_new, c, rho));
        const CVec rg_old = project(x_new, rg);
        const CVec d_old = project(x_new, d);
        const CVec y = rg_new - rg_old;
        const CVec s = t * d_old;
        const double beta = std::max(0.0, inner(rg_new, y) / gn2);  // Polak-Ribiere+
        const double sy = inner(s, y);
        const bool stalled = std::abs(f - f_new) <= 1e-15 * std::max(1.0, std::abs(f));

        d = -rg_new + beta * d_old;
        // Barzilai-Borwein step, rescaled from gradient length to direction length.
        const double dn = d.norm();
        step = (sy > 0.0 && dn > 0.0) ? (s.squaredNorm() / sy) * rg_new.norm() / dn : 2.0 * t;
        x = x_new;
        f = f_new;
        rg = rg_new;
        if (stalled) {
            ++it;
            break;
        }
    }
    res.phi = PhaseVector::retract(x);
    res.objective = phi_objective(res.phi.values(), c, rho);
    res.grad_norm = rg.norm();
    res.iterations = it;
    return res;
}

AuxVars solve_a_step(const BeamformerMatrix& W, const ChannelSet& ch, const PhaseVector& phi,
                     double gamma, double sigma_k_sq, const conic::SolverOptions& solver)
{
    if (!(gamma > 0.0))
        throw std::invalid_argument("solve_a_step: gamma must be > 0");
    const CMat b = normalized_user_products(W, ch, phi, sigma_k_sq);
    const Eigen::Index K = b.rows();
    const Eigen::Index L = b.cols();
    AuxVars out{b};
    const double sqrt_gamma = std::sqrt(gamma);
    for (Eigen::Index k = 0; k < K; ++k) {
        const RVec mag = b.row(k).cwiseAbs().transpose();
        const double interf = mag.squaredNorm() - mag(k) * mag(k) + 1.0;
        if (mag(k) * mag(k) >= gamma * interf)
            continue;  // already feasible: the projection is the point itself

        // Phases follow b; only the moduli r are optimized.
        conic::ConeProgramBuilder pb;
        const Eigen::Index t = pb.add_variables(1);
        const Eigen::Index r0 = pb.add_variables(L);
        pb.set_objective(t, 1.0);
        std::vector<conic::AffineExpr> fit{conic::AffineExpr::variable(t)};
        for (Eigen::Index j = 0; j < L; ++j)
            fit.push_back({{{r0 + j, 1.0}}, -mag(j)});
        pb.add_soc(fit);
        std::vector<conic::AffineExpr> sinr{conic::AffineExpr::variable(r0 + k, 1.0 / sqrt_gamma)};
        for (Eigen::Index j = 0; j < L; ++j)
            if (j != k)
                sinr.push_back(conic::AffineExpr::variable(r0 + j));
        sinr.push_back(conic::AffineExpr::constant_term(1.0));
        pb.add_soc(sinr);

        const auto sol = conic::solve(pb.build(), solver);
        if (!conic::solved(sol.status))
            throw StepFailure("a-step SOCP failed for user " + std::to_string(k), sol.status,
                              sol.primal_residual, sol.dual_residual);
        RVec r = sol.x.segment(r0, L).cwiseMax(0.0);
        // Lift the desired modulus onto the cone boundary if the solve left it a hair short.
        const double need = std::sqrt(gamma * (r.squaredNorm() - r(k) * r(k) + 1.0));
        r(k) = std::max(r(k), need);
        for (Eigen::Index j = 0; j < L; ++j) {
            const cplx bj = b(k, j);
            const cplx ph = std::abs(bj) > 0.0 ? bj / std::abs(bj) : cplx(1.0, 0.0);
            out.a(k, j) = r(j) * ph;
        }
    }
    return out;
}

namespace {

double weighted_snr_sum(const BeamformerMatrix& W, const ChannelSet& ch, const PhaseVector& phi,
                        const ScenarioConfig& config)
{
    return weighted_sum_snr(W, phi, ch, config);
}

bool settled(double prev, double cur, double tol)
{
    return std::abs(cur - prev) <= tol * std::max(1.0, std::abs(prev));
}

}  // namespace

PenaltyLoopResult penalty_loop(const BeamformerMatrix& W, const ChannelSet& ch,
                               const PhaseVector& phi_init, PenaltyState state,
                               const ScenarioConfig& config, bool constrained)
{
    const SolverParams& sp = config.solver;
    const RcgOptions ro{sp.rcg_max_iters, sp.rcg_grad_tol};
    conic::SolverOptions so;
    so.tol = sp.conic_tol;
    so.max_iter = sp.conic_max_iter;

    PenaltyLoopResult res;
    res.phi = phi_init;
    res.aux.a = CMat::Zero(0, W.cols());

    if (!constrained || ch.num_users() == 0) {
        // Pure MM on the radar objective; no penalty and zeta is identically zero.
        double prev = weighted_snr_sum(W, ch, res.phi, config);
        for (int m = 0; m < sp.max_inner_rounds; ++m) {
            const PhiStepCoeffs c = build_phi_coeffs(ch, res.phi, W, res.aux, config);
            const RcgResult r = rcg_optimize(res.phi, c, 0.0, ro);
            res.rcg_line_search_failures += r.line_search_failed ? 1 : 0;
            res.phi = r.phi;
            ++state.inner_rounds;
            const double cur = weighted_snr_sum(W, ch, res.phi, config);
            if (settled(prev, cur, sp.inner_tol))
                break;
            prev = cur;
        }
        state.zeta = 0.0;
        res.state = state;
        res.converged = true;
        return res;
    }

    const double gamma = config.gamma_linear();
    for (int round = 0; round < sp.max_penalty_rounds; ++round) {
        double prev = 0.0;
        for (int m = 0; m < sp.max_inner_rounds; ++m) {
            res.aux = solve_a_step(W, ch, res.phi, gamma, config.sigma_k_sq, so);
            const PhiStepCoeffs c = build_phi_coeffs(ch, res.phi, W, res.aux, config);
            const RcgResult r = rcg_optimize(res.phi, c, state.rho, ro);
            res.rcg_line_search_failures += r.line_search_failed ? 1 : 0;
            res.phi = r.phi;
            ++state.inner_rounds;
            const double cur = -weighted_snr_sum(W, ch, res.phi, config) +
                               state.rho * penalty_value(W, ch, res.phi, res.aux, config.sigma_k_sq);
            if (m > 0 && settled(prev, cur, sp.inner_tol))
                break;
            prev = cur;
        }
        state.zeta = stopping_indicator(W, ch, res.phi, res.aux, config.sigma_k_sq);
        if (state.zeta < state.epsilon) {
            res.converged = true;
            break;
        }
        state.tighten();
    }
    res.state = state;
    return res;
}

}  // namespace risisac
