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
#include "risisac/linalg.hpp"
#include "test_util.hpp"

#include <doctest.h>

using namespace risisac;
using namespace risisac::testing;

namespace {

CMat random_psd(Eigen::Index m, Rng& rng)
{
    const CMat A = random_cmat(m, m, rng);
    return A.adjoint() * A;
}

double quad(const CMat& W, const CMat& C1) { return (W.adjoint() * C1 * W).trace().real(); }

WStepContext context_for(const ChannelSet& ch, const ScenarioConfig& cfg, const CMat& W_prev)
{
    return make_w_step_context(ch, PhaseVector(cfg.num_elements), cfg, W_prev, true);
}

}  // namespace

TEST_CASE("surrogate equals the Kronecker-form minorizer and touches at the expansion point")
{
    Rng rng(11);
    const Eigen::Index M = 4, L = 6;
    const CMat C1 = random_psd(M, rng);
    const CMat Wi = random_cmat(M, L, rng);
    CHECK(mm_surrogate_w(Wi, Wi, C1) == doctest::Approx(quad(Wi, C1)).epsilon(1e-12));
    const CMat K = kron(CMat(C1.transpose()), CMat::Identity(L, L));
    for (int trial = 0; trial < 20; ++trial) {
        const CMat W = random_cmat(M, L, rng);
        const cplx lin = (vec(CMat(Wi.adjoint())).adjoint() * K * vec(CMat(W.adjoint())))(0, 0);
        const double kron_form = 2.0 * lin.real() - quad(Wi, C1);
        CHECK(mm_surrogate_w(W, Wi, C1) == doctest::Approx(kron_form).epsilon(1e-10));
        CHECK(mm_surrogate_w(W, Wi, C1) <= quad(W, C1) * (1.0 + 1e-12) + 1e-12);
    }
}

TEST_CASE("build_c1 is Hermitian and rejects mismatched weights")
{
    Rng rng(2);
    std::vector<CMat> H{random_cmat(3, 3, rng), random_cmat(3, 3, rng)};
    const CMat C1 = build_c1(H, {1.0, 2.0}, 0.5);
    const CMat ref = (H[0].adjoint() * H[0] + 2.0 * H[1].adjoint() * H[1]) / 0.5;
    CHECK((C1 - ref).norm() < 1e-12 * ref.norm());
    CHECK((C1 - C1.adjoint()).norm() == 0.0);
    CHECK_THROWS_AS(build_c1(H, {1.0}, 1.0), std::invalid_argument);
}

TEST_CASE("rotate_columns aligns communication columns and preserves SINR")
{
    Rng rng(3);
    const int M = 4, K = 3;
    std::vector<CVec> h;
    for (int k = 0; k < K; ++k) h.push_back(random_cvec(M, rng));
    const CMat W = random_cmat(M, K + M, rng);
    const CMat R = rotate_columns(W, h);
    for (int k = 0; k < K; ++k) {
        const cplx g = h[k].transpose() * R.col(k);
        CHECK(std::abs(g.imag()) < 1e-12 * std::abs(g));
        CHECK(g.real() > 0.0);
        CHECK(comm_sinr(R, h[k], k, 1.0) == doctest::Approx(comm_sinr(W, h[k], k, 1.0)).epsilon(1e-12));
    }
    CHECK((R.rightCols(M) - W.rightCols(M)).norm() == 0.0);
}

TEST_CASE("W-step without users returns the scaled surrogate gradient")
{
    Rng rng(4);
    const int M = 5;
    WStepContext ctx;
    ctx.C1 = random_psd(M, rng);
    ctx.power = 3.0;
    ctx.W_prev = random_cmat(M, M, rng);
    const CMat W = solve_w_step(ctx);
    const CMat D = ctx.C1 * ctx.W_prev;
    const CMat ref = std::sqrt(ctx.power) * D / D.norm();
    CHECK((W - ref).norm() < 1e-6 * ref.norm());
    CHECK(W.squaredNorm() <= ctx.power + 1e-8);
}

TEST_CASE("W-step with a vanishing SINR target reduces to the unconstrained solution")
{
    Rng rng(5);
    const int M = 4, K = 2;
    WStepContext ctx;
    ctx.C1 = CMat::Identity(M, M);
    ctx.power = 2.0;
    for (int k = 0; k < K; ++k) {
        ctx.h_k.push_back(random_cvec(M, rng));
        ctx.gamma.push_back(1e-7);
        ctx.sigma_k_sq.push_back(1.0);
    }
    ctx.W_prev = random_cmat(M, K + M, rng);
    const CMat W = solve_w_step(ctx);
    const CMat Wr = rotate_columns(ctx.W_prev, ctx.h_k);
    const CMat ref = std::sqrt(ctx.power) * Wr / Wr.norm();
    // Linear objective on a ball: value error e moves the point by O(sqrt(e)).
    const double best = std::sqrt(ctx.power) * Wr.norm();
    CHECK((Wr.adjoint() * W).trace().real() == doctest::Approx(best).epsilon(1e-7));
    CHECK((W - ref).norm() < 1e-4 * ref.norm());
}

TEST_CASE("W-step output meets SINR and power and never decreases the radar objective")
{
    for (std::uint64_t seed : {21u, 22u, 23u}) {
        Rng rng(seed);
        const int M = 4, N = 6, K = 2, T = 2;
        const auto cfg = unit_config(M, N, K, T, 10.0, 5.0);
        const ChannelSet ch = random_channels(M, N, K, T, rng);
        const PhaseVector phi(N);
        std::vector<CVec> h;
        for (int k = 0; k < K; ++k) h.push_back(effective_user_channel(ch, phi, k));
        const CMat Wc = min_power_beamformer(h, std::vector<double>(K, cfg.gamma_linear()),
                                             std::vector<double>(K, 1.0), M, cfg.power);
        REQUIRE(Wc.squaredNorm() < cfg.power);
        CMat W = CMat::Zero(M, K + M);
        W.leftCols(K) = Wc;

        auto ctx = context_for(ch, cfg, W);
        double prev = quad(W, ctx.C1);
        for (int it = 0; it < 8; ++it) {
            ctx.W_prev = W;
            W = solve_w_step(ctx);
            const double cur = quad(W, ctx.C1);
            CHECK(cur >= prev * (1.0 - 1e-9));
            prev = cur;
            CHECK(W.squaredNorm() <= cfg.power + 1e-8);
            for (int k = 0; k < K; ++k)
                CHECK(comm_sinr(W, h[k], k, 1.0) >= cfg.gamma_linear() * (1.0 - 1e-6));
        }
    }
}

TEST_CASE("power minimization meets every SINR target with equality")
{
    Rng rng(31);
    const int M = 4, K = 3;
    std::vector<CVec> h;
    for (int k = 0; k < K; ++k) h.push_back(random_cvec(M, rng));
    const double gamma = db_to_linear(10.0);
    const CMat Wc = min_power_beamformer(h, std::vector<double>(K, gamma), std::vector<double>(K, 2.0), M, 1e3);
    for (int k = 0; k < K; ++k)
        CHECK(comm_sinr(Wc, h[k], k, 2.0) == doctest::Approx(gamma).epsilon(1e-5));
}

TEST_CASE("power minimization reports infeasible SINR targets")
{
    Rng rng(32);
    std::vector<CVec> h{random_cvec(1, rng), random_cvec(1, rng)};
    CHECK_THROWS_AS(min_power_beamformer(h, {1.0, 1.0}, {1.0, 1.0}, 1, 100.0), InfeasibleScenario);

    // Feasible targets, budget below the minimum power.
    std::vector<CVec> h2{random_cvec(3, rng), random_cvec(3, rng)};
    const CMat Wc = min_power_beamformer(h2, {2.0, 2.0}, {1.0, 1.0}, 3, 1e4);
    const double pmin = Wc.squaredNorm();
    CHECK_THROWS_AS(min_power_beamformer(h2, {2.0, 2.0}, {1.0, 1.0}, 3, 0.9 * pmin), InfeasibleScenario);
    CHECK(min_power_beamformer(h2, {2.0, 2.0}, {1.0, 1.0}, 3, 1.1 * pmin).squaredNorm() ==
          doctest::Approx(pmin).epsilon(1e-6));
}
