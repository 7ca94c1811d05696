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
#include "risisac/oracle.hpp"
#include "risisac/ris_phase.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <Eigen/Cholesky>

using namespace risisac;
using namespace risisac::testing;

namespace {

PhaseVector random_phase(Eigen::Index n, Rng& rng) { return PhaseVector::random(n, rng); }

double snr_sum_direct(const CMat& W, const ChannelSet& ch, const PhaseVector& phi, const ScenarioConfig& cfg)
{
    double s = 0.0;
    for (int t = 0; t < ch.num_targets(); ++t)
        s += cfg.weights[t] * (equivalent_target_channel(ch, phi, t) * W).squaredNorm() / cfg.sigma_r_sq;
    return s;
}

AuxVars random_aux(int K, Eigen::Index L, Rng& rng) { return AuxVars{random_cmat(K, L, rng)}; }

// Feasible W for unit-noise channels at phases phi: power-min comm columns plus random radar columns.
CMat feasible_w(const ChannelSet& ch, const PhaseVector& phi, const ScenarioConfig& cfg, Rng& rng)
{
    const int K = ch.num_users();
    const Eigen::Index M = ch.num_antennas();
    std::vector<CVec> h;
    for (int k = 0; k < K; ++k) h.push_back(effective_user_channel(ch, phi, k));
    CMat W = CMat::Zero(M, K + M);
    W.leftCols(K) = 1.05 * min_power_beamformer(h, std::vector<double>(K, cfg.gamma_linear()),
                                                 std::vector<double>(K, cfg.sigma_k_sq), M, cfg.power);
    W.rightCols(M) = random_cmat(M, M, rng, 1e-3);
    return W;
}

}  // namespace

TEST_CASE("build_bt structure")
{
    Rng rng(1);
    const CMat G = random_cmat(5, 3, rng);
    CHECK((build_bt(G, CVec::Ones(5)) - G.transpose()).norm() == 0.0);
    CVec e1 = CVec::Zero(5);
    e1(0) = 1.0;
    CMat ref = CMat::Zero(3, 5);
    ref.col(0) = G.transpose().col(0);
    CHECK((build_bt(G, e1) - ref).norm() == 0.0);
    const CVec hr = random_cvec(5, rng);
    const PhaseVector phi = random_phase(5, rng);
    const CVec lhs = build_bt(G, hr) * phi.values();
    const CVec rhs = G.transpose() * phi.values().asDiagonal() * hr;
    CHECK((lhs - rhs).norm() < 1e-12 * rhs.norm());
    CHECK_THROWS_AS(build_bt(G, CVec::Ones(4)), std::invalid_argument);
}

TEST_CASE("build_vt reconstructs vec(H_t)")
{
    Rng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const ChannelSet ch = random_channels(3, 5, 1, 2, rng);
        const PhaseVector phi = random_phase(5, rng);
        for (int t = 0; t < 2; ++t) {
            const CVec v = build_vt(build_bt(ch.G, ch.h_r_t[t]), ch.h_d_t[t], phi);
            const CVec ref = vec(equivalent_target_channel(ch, phi, t));
            CHECK((v - ref).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
        }
    }
    // Reflected path switched off.
    const CMat B = CMat::Zero(2, 3);
    const CVec hd = random_cvec(2, rng);
    CHECK((build_vt(B, hd, random_phase(3, rng)) - vec(CMat(hd * hd.transpose()))).norm() < 1e-14);
    // N = 1, M = 1: (h_d + b phi)^2.
    CMat b1(1, 1);
    b1(0, 0) = cplx(0.3, -0.7);
    CVec hd1(1);
    hd1(0) = cplx(1.1, 0.2);
    const PhaseVector p1 = PhaseVector::from_angles(RVec::Constant(1, 0.9));
    const cplx expect = std::pow(hd1(0) + b1(0, 0) * p1.values()(0), 2);
    CHECK(std::abs(build_vt(b1, hd1, p1)(0) - expect) < 1e-14);
}

TEST_CASE("apply_c2t equals the dense Kronecker operator")
{
    Rng rng(3);
    const int M = 3;
    const CMat W = random_cmat(M, 5, rng);
    const CMat C2 = 0.7 / 2.0 * kron(CMat(W.conjugate() * W.transpose()), CMat::Identity(M, M));
    for (int trial = 0; trial < 5; ++trial) {
        const CVec x = random_cvec(M * M, rng);
        const CVec ref = C2 * x;
        CHECK((apply_c2t(x, W, 0.7, 2.0) - ref).norm() < 1e-12 * ref.norm());
    }
    const CVec x = random_cvec(M * M, rng);
    CHECK((apply_c2t(x, 2.0 * CMat::Identity(M, M), 1.0, 1.0) - 4.0 * x).norm() < 1e-13 * x.norm());

    const ChannelSet ch = random_channels(M, 4, 1, 1, rng);
    const PhaseVector phi = random_phase(4, rng);
    const CMat H = equivalent_target_channel(ch, phi, 0);
    const CVec v = vec(H);
    const double lhs = v.dot(apply_c2t(v, W, 0.7, 2.0)).real();
    CHECK(lhs == doctest::Approx(0.7 * radar_snr(W, H, 2.0)).epsilon(1e-12));
}

TEST_CASE("MM coefficients reproduce the linearized radar term for every phi")
{
    Rng rng(4);
    const int M = 3, N = 6, T = 2;
    auto cfg = unit_config(M, N, 0, T);
    cfg.weights = {0.6, 1.4};
    cfg.sigma_r_sq = 0.5;
    const ChannelSet ch = random_channels(M, N, 0, T, rng);
    const CMat W = random_cmat(M, M, rng);
    const PhaseVector phi_i = random_phase(N, rng);
    const PhiStepCoeffs c = build_phi_coeffs(ch, phi_i, W, AuxVars{CMat::Zero(0, M)}, cfg);
    for (int trial = 0; trial < 100; ++trial) {
        const PhaseVector phi = random_phase(N, rng);
        double lhs = 0.0;
        for (int t = 0; t < T; ++t)
            lhs += 2.0 * c.v_t[t].dot(apply_c2t(vec(equivalent_target_channel(ch, phi, t)), W, cfg.weights[t],
                                                cfg.sigma_r_sq)).real();
        const CVec& p = phi.values();
        const double rhs = p.dot(c.F1 * p.conjugate()).real() + c.f2.dot(p).real() + c.c2;
        CHECK(rel_err(lhs, rhs) < 1e-10);
        // Minorizer never exceeds the true objective.
        CHECK(mm_phi_minorizer(p, c) <= snr_sum_direct(W, ch, phi, cfg) * (1.0 + 1e-12));
    }
    CHECK(rel_err(mm_phi_minorizer(phi_i.values(), c), snr_sum_direct(W, ch, phi_i, cfg)) < 1e-10);

    ChannelSet no_direct = ch;
    for (auto& h : no_direct.h_d_t) h.setZero();
    const PhiStepCoeffs c0 = build_phi_coeffs(no_direct, phi_i, W, AuxVars{CMat::Zero(0, M)}, cfg);
    CHECK(c0.f2.norm() == 0.0);
    CHECK(c0.c2 == 0.0);
}

TEST_CASE("penalty quadratic matches the direct penalty sum")
{
    Rng rng(5);
    const int M = 3, N = 5, K = 2;
    const ChannelSet ch = random_channels(M, N, K, 1, rng);
    const CMat W = random_cmat(M, K + M, rng);
    const AuxVars aux = random_aux(K, K + M, rng);
    const double sk = 0.3;
    const PenaltyTerms pen = penalty_quadratic(W, ch, aux, sk);
    for (int trial = 0; trial < 100; ++trial) {
        const PhaseVector phi = random_phase(N, rng);
        const CVec& p = phi.values();
        const double quad = (p.transpose() * pen.Q * p.conjugate())(0, 0).real() +
                            (pen.q.transpose() * p)(0, 0).real() + pen.c3;
        CHECK(rel_err(quad, penalty_value(W, ch, phi, aux, sk)) < 1e-10);
    }
    CHECK((pen.Q - pen.Q.adjoint()).norm() == 0.0);
    Eigen::LLT<CMat> llt(pen.Q + 1e-12 * CMat::Identity(N, N));
    CHECK(llt.info() == Eigen::Success);

    ChannelSet direct_only = ch;
    for (auto& h : direct_only.h_r_k) h.setZero();
    AuxVars exact{CMat(K, K + M)};
    for (int k = 0; k < K; ++k)
        exact.a.row(k) = (direct_only.h_d_k[k].transpose() * W) / std::sqrt(sk);
    const PenaltyTerms z = penalty_quadratic(W, direct_only, exact, sk);
    CHECK(z.Q.norm() == 0.0);
    CHECK(z.q.norm() == 0.0);
    CHECK(z.c3 < 1e-28);
}

TEST_CASE("phase objective and gradient")
{
    Rng rng(6);
    const int M = 3, N = 8, K = 2, T = 2;
    const auto cfg = unit_config(M, N, K, T);
    const ChannelSet ch = random_channels(M, N, K, T, rng);
    const CMat W = random_cmat(M, K + M, rng, 0.5);
    const PhiStepCoeffs c = build_phi_coeffs(ch, random_phase(N, rng), W, random_aux(K, K + M, rng), cfg);

    PhiStepCoeffs zero;
    zero.F1 = CMat::Zero(N, N);
    zero.f2 = CVec::Zero(N);
    zero.Q = CMat::Zero(N, N);
    zero.q = CVec::Zero(N);
    CHECK(phi_objective(random_cvec(N, rng), zero, 3.0) == 0.0);
    CHECK(phi_euclidean_gradient(random_cvec(N, rng), zero, 3.0).norm() == 0.0);

    for (int trial = 0; trial < 20; ++trial) {
        const CVec p = random_cvec(N, rng);
        const double rho = 0.5;
        const CVec g = phi_euclidean_gradient(p, c, rho);
        const CVec fd = oracle::finite_diff_gradient([&](const CVec& z) { return phi_objective(z, c, rho); }, p, 1e-6);
        CHECK((g - fd).norm() < 1e-6 * g.norm());
        CHECK(rel_err(phi_objective(p, c, rho), oracle::phi_objective_direct(p, c, rho)) < 1e-12);
    }

    // Pure penalty: stationary point of the convex quadratic.
    PhiStepCoeffs pen = zero;
    pen.Q = c.Q + 0.1 * CMat::Identity(N, N);
    pen.q = c.q;
    const CVec p_star = -0.5 * pen.Q.transpose().lu().solve(CVec(pen.q.conjugate()));
    CHECK(phi_euclidean_gradient(p_star, pen, 2.0).norm() < 1e-10 * pen.q.norm());
}

TEST_CASE("RCG stays on the manifold and decreases the objective")
{
    Rng rng(7);
    const int M = 4, N = 36, K = 2, T = 3;
    const auto cfg = unit_config(M, N, K, T);
    const ChannelSet ch = random_channels(M, N, K, T, rng);
    const CMat W = random_cmat(M, K + M, rng, 0.3);
    const PhaseVector phi0 = random_phase(N, rng);
    const PhiStepCoeffs c = build_phi_coeffs(ch, phi0, W, random_aux(K, K + M, rng), cfg);
    const double f0 = phi_objective(phi0.values(), c, 1.0);
    // Objective after each iteration cap is non-increasing in the cap.
    double prev = f0;
    for (int cap : {1, 2, 5, 10, 20, 50, 200}) {
        const RcgResult r = rcg_optimize(phi0, c, 1.0, {cap, 1e-6});
        CHECK(r.phi.max_modulus_error() < 1e-12);
        CHECK(r.objective <= prev + 1e-12 * std::abs(prev));
        prev = r.objective;
    }
    CHECK(prev < f0);
}

TEST_CASE("RCG recovers the separable closed form")
{
    Rng rng(8);
    const int N = 10;
    PhiStepCoeffs c;
    c.F1 = CMat::Zero(N, N);
    c.f2 = random_cvec(N, rng);
    c.Q = CMat::Zero(N, N);
    c.q = CVec::Zero(N);
    const RcgResult r = rcg_optimize(PhaseVector::random(N, rng), c, 0.0);
    const CVec expect = c.f2.cwiseQuotient(CVec(c.f2.cwiseAbs().cast<cplx>()));
    CHECK((r.phi.values() - expect).cwiseAbs().maxCoeff() < 1e-5);
    CHECK(r.objective == doctest::Approx(-c.f2.cwiseAbs().sum()).epsilon(1e-10));
}

TEST_CASE("RCG agrees with the N = 2 grid oracle")
{
    Rng rng(9);
    int within = 0;
    for (int trial = 0; trial < 5; ++trial) {
        const ChannelSet ch = random_channels(2, 2, 1, 1, rng, 1.0);
        const auto cfg = unit_config(2, 2, 1, 1);
        const CMat W = random_cmat(2, 3, rng);
        PhiStepCoeffs c = build_phi_coeffs(ch, random_phase(2, rng), W, random_aux(1, 3, rng), cfg);
        const double scale = std::max({c.F1.norm(), c.f2.norm(), c.Q.norm(), 1.0});
        c.F1 /= scale; c.f2 /= scale; c.Q /= scale; c.q /= scale; c.c3 /= scale;
        const auto grid = oracle::grid_search_phi(c, 1.0, 0.5);
        const RcgResult r = rcg_optimize(PhaseVector::retract(grid.phi), c, 1.0);
        CHECK(r.objective <= grid.value + 1e-12);
        within += (r.objective - grid.value < 1e-3) ? 1 : 0;
    }
    CHECK(within == 5);
}

TEST_CASE("a-step projection")
{
    Rng rng(10);
    const int M = 3, N = 4, K = 2;
    const ChannelSet ch = random_channels(M, N, K, 1, rng);
    const PhaseVector phi = random_phase(N, rng);

    SUBCASE("feasible point is its own projection")
    {
        auto cfg = unit_config(M, N, K, 1, 100.0, 0.0);
        const CMat W = feasible_w(ch, phi, cfg, rng);
        const AuxVars a = solve_a_step(W, ch, phi, cfg.gamma_linear(), 1.0);
        CHECK(stopping_indicator(W, ch, phi, a, 1.0) == 0.0);
    }
    SUBCASE("infeasible point lands on the SINR boundary and beats a feasible rescaling")
    {
        const CMat W = random_cmat(M, K + M, rng);
        const double gamma = 4.0;
        const AuxVars a = solve_a_step(W, ch, phi, gamma, 1.0);
        for (int k = 0; k < K; ++k) {
            const RVec r = a.a.row(k).cwiseAbs().transpose();
            const double interf = r.squaredNorm() - r(k) * r(k) + 1.0;
            CHECK(r(k) * r(k) >= gamma * interf * (1.0 - 1e-8));
            // Explicit feasible point: scale the desired term up to the boundary.
            const CVec b = (effective_user_channel(ch, phi, k).transpose() * W).transpose();
            CVec feas = b;
            const double bi = b.squaredNorm() - std::norm(b(k)) + 1.0;
            feas(k) = b(k) / std::abs(b(k)) * std::sqrt(gamma * bi);
            const double obj = (a.a.row(k).transpose() - b).squaredNorm();
            CHECK(obj <= (feas - b).squaredNorm() + 1e-9);
        }
    }
}

TEST_CASE("a-step matches a two-dimensional grid")
{
    // One user, L = 2: b = (1, 10), sigma = 1, Gamma = 1.
    ChannelSet ch;
    ch.G = CMat::Zero(1, 1);
    ch.h_d_k = {CVec::Ones(1)};
    ch.h_r_k = {CVec::Zero(1)};
    CMat W(1, 2);
    W << 1.0, 10.0;
    const AuxVars a = solve_a_step(W, ch, PhaseVector(1), 1.0, 1.0);
    // r0^2 >= r1^2 + 1; minimize (r0 - 1)^2 + (r1 - 10)^2 on a refined grid.
    double best = 1e300, br0 = 0, br1 = 0;
    double lo0 = 0, hi0 = 12, lo1 = 0, hi1 = 12;
    for (int level = 0; level < 6; ++level) {
        const int n = 400;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j) {
                const double r1 = lo1 + (hi1 - lo1) * j / n;
                // Boundary or interior: r0 at least sqrt(r1^2 + 1).
                const double r0 = std::max(lo0 + (hi0 - lo0) * i / n, std::sqrt(r1 * r1 + 1.0));
                const double v = (r0 - 1) * (r0 - 1) + (r1 - 10) * (r1 - 10);
                if (v < best) { best = v; br0 = r0; br1 = r1; }
            }
        const double w0 = (hi0 - lo0) / 20, w1 = (hi1 - lo1) / 20;
        lo0 = br0 - w0; hi0 = br0 + w0; lo1 = br1 - w1; hi1 = br1 + w1;
    }
    CHECK(std::abs(std::abs(a.a(0, 0)) - br0) < 1e-4);
    CHECK(std::abs(std::abs(a.a(0, 1)) - br1) < 1e-4);
}

TEST_CASE("penalty loop without RIS users' reflection converges in one round")
{
    Rng rng(11);
    const int M = 3, N = 4, K = 2, T = 1;
    auto cfg = unit_config(M, N, K, T, 50.0, 3.0);
    ChannelSet ch = random_channels(M, N, K, T, rng);
    for (auto& h : ch.h_r_k) h.setZero();
    const PhaseVector phi = random_phase(N, rng);
    const CMat W = feasible_w(ch, phi, cfg, rng);
    const auto res = penalty_loop(W, ch, phi, PenaltyState::from_params(cfg.solver), cfg);
    CHECK(res.converged);
    CHECK(res.state.zeta < cfg.solver.epsilon);
    CHECK(res.state.outer_rounds == 0);
    CHECK(res.phi.max_modulus_error() < 1e-12);
}

TEST_CASE("penalty coefficient follows rho_init * c^-n")
{
    PenaltyState s;
    s.rho = 1e-3;
    s.shrink = 0.5;
    for (int n = 1; n <= 10; ++n) {
        const double before = s.rho;
        s.tighten();
        CHECK(s.rho > before);
        CHECK(s.rho == doctest::Approx(1e-3 * std::pow(0.5, -n)).epsilon(1e-14));
        CHECK(s.outer_rounds == n);
    }
}

TEST_CASE("penalty loop drives zeta below epsilon on a random instance")
{
    Rng rng(12);
    const int M = 4, N = 8, K = 2, T = 2;
    auto cfg = unit_config(M, N, K, T, 20.0, 3.0);
    const ChannelSet ch = random_channels(M, N, K, T, rng);
    const PhaseVector phi = random_phase(N, rng);
    const CMat W = feasible_w(ch, phi, cfg, rng);
    const auto res = penalty_loop(W, ch, phi, PenaltyState::from_params(cfg.solver), cfg);
    CHECK(res.converged);
    CHECK(res.state.zeta < cfg.solver.epsilon);
    for (int k = 0; k < K; ++k)
        CHECK(comm_sinr(W, res.phi, ch, k, 1.0) >= cfg.gamma_linear() * (1.0 - 1e-3));
}
