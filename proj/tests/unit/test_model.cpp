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

#include "risisac/model.hpp"
#include "risisac/oracle.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <Eigen/SVD>

using namespace risisac;
using namespace risisac::testing;

TEST_CASE("effective user channel")
{
    Rng rng(1);
    ChannelSet ch = random_channels(4, 6, 2, 1, rng);
    const PhaseVector phi = PhaseVector::random(6, rng);
    const CVec ref = ch.h_d_k[1] + ch.G.transpose() * phi.values().asDiagonal() * ch.h_r_k[1];
    CHECK((effective_user_channel(ch, phi, 1) - ref).norm() < 1e-14);
    CHECK_THROWS_AS(effective_user_channel(ch, phi, 2), std::out_of_range);

    ChannelSet off = ch;
    for (auto& h : off.h_r_k) h.setZero();
    CHECK((effective_user_channel(off, phi, 0) - ch.h_d_k[0]).norm() == 0.0);

    // N = 1: h_d + phi_1 h_r,1 G_row^T.
    ChannelSet one = random_channels(3, 1, 1, 1, rng);
    const PhaseVector p1 = PhaseVector::random(1, rng);
    const CVec exp1 = one.h_d_k[0] + p1.values()(0) * one.h_r_k[0](0) * one.G.row(0).transpose();
    CHECK((effective_user_channel(one, p1, 0) - exp1).norm() < 1e-15);
}

TEST_CASE("equivalent target channel is rank one and symmetric")
{
    Rng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const ChannelSet ch = random_channels(5, 7, 1, 2, rng);
        const PhaseVector phi = PhaseVector::random(7, rng);
        for (int t = 0; t < 2; ++t) {
            const CMat H = equivalent_target_channel(ch, phi, t);
            CHECK((H - H.transpose()).norm() == 0.0);
            Eigen::JacobiSVD<CMat> svd(H);
            CHECK(svd.singularValues()(1) < 1e-10 * svd.singularValues()(0));
        }
    }
    ChannelSet ch = random_channels(3, 4, 1, 1, rng);
    ch.h_r_t[0].setZero();
    const CMat H = equivalent_target_channel(ch, PhaseVector(4), 0);
    CHECK((H - ch.h_d_t[0] * ch.h_d_t[0].transpose()).norm() == 0.0);
    CHECK_THROWS_AS(equivalent_target_channel(ch, PhaseVector(4), 1), std::out_of_range);
}

TEST_CASE("radar SNR and weighted sum")
{
    Rng rng(3);
    const int M = 4;
    const CMat H = random_cmat(M, M, rng);
    CHECK(radar_snr(CMat::Zero(M, 6), H, 1.0) == 0.0);
    const CMat W = random_cmat(M, 6, rng);
    const double s = radar_snr(W, H, 1.0);
    CHECK(radar_snr(W / std::sqrt(s), H, 1.0) == doctest::Approx(1.0).epsilon(1e-13));
    // Per-column phase rotations leave the SNR unchanged.
    CMat Wr = W;
    for (int j = 0; j < 6; ++j) Wr.col(j) *= std::polar(1.0, 0.3 * j + 0.1);
    CHECK(radar_snr(Wr, H, 2.0) == doctest::Approx(radar_snr(W, H, 2.0)).epsilon(1e-13));

    ChannelSet ch = random_channels(M, 5, 2, 1, rng);
    auto cfg = unit_config(M, 5, 2, 1);
    const PhaseVector phi = PhaseVector::random(5, rng);
    CHECK(weighted_sum_snr(W, phi, ch, cfg) ==
          doctest::Approx(radar_snr(W, equivalent_target_channel(ch, phi, 0), 1.0)).epsilon(1e-14));
    ch = random_channels(M, 5, 2, 3, rng);
    cfg = unit_config(M, 5, 2, 3);
    const double base = weighted_sum_snr(W, phi, ch, cfg);
    cfg.weights = {2.0, 2.0, 2.0};
    CHECK(weighted_sum_snr(W, phi, ch, cfg) == doctest::Approx(2.0 * base).epsilon(1e-14));
}

TEST_CASE("communication SINR")
{
    Rng rng(4);
    const CVec h = random_cvec(3, rng);
    CMat w = random_cmat(3, 1, rng);
    CHECK(comm_sinr(w, h, 0, 0.5) == doctest::Approx(std::norm(cplx(h.transpose() * w.col(0))) / 0.5));
    // Column orthogonal to h under the bilinear product: h^T w = 0.
    CMat w0(3, 1);
    w0.col(0) = CVec::Zero(3);
    w0(0, 0) = h(1);
    w0(1, 0) = -h(0);
    CHECK(comm_sinr(w0, h, 0, 1.0) < 1e-30);

    const ChannelSet ch = random_channels(3, 4, 2, 1, rng);
    const CMat W = random_cmat(3, 5, rng);
    const PhaseVector phi = PhaseVector::random(4, rng);
    const CVec hk = effective_user_channel(ch, phi, 1);
    double interf = 0.0;
    for (int j = 0; j < 5; ++j)
        if (j != 1) interf += std::norm(cplx(hk.transpose() * W.col(j)));
    const double ref = std::norm(cplx(hk.transpose() * W.col(1))) / (interf + 0.7);
    CHECK(comm_sinr(W, phi, ch, 1, 0.7) == doctest::Approx(ref).epsilon(1e-13));
}

TEST_CASE("metrics bundle is consistent")
{
    Rng rng(5);
    const ChannelSet ch = random_channels(4, 5, 2, 3, rng);
    const auto cfg = unit_config(4, 5, 2, 3);
    const CMat W = random_cmat(4, 6, rng);
    const PhaseVector phi = PhaseVector::random(5, rng);
    const Metrics m = compute_metrics(W, phi, ch, cfg);
    CHECK(m.target_snr.size() == 3);
    CHECK(m.user_sinr.size() == 2);
    CHECK(m.power == doctest::Approx(W.squaredNorm()));
    CHECK(std::abs(m.weighted_sum_snr_db - 10.0 * std::log10(m.weighted_sum_snr)) < 1e-12);
    for (std::size_t k = 0; k < 2; ++k)
        CHECK(std::abs(m.user_sinr_db[k] - 10.0 * std::log10(m.user_sinr[k])) < 1e-12);
    double s = 0.0;
    for (double v : m.target_snr) {
        CHECK(v >= 0.0);
        s += v;
    }
    CHECK(s == doctest::Approx(m.weighted_sum_snr).epsilon(1e-14));
}

TEST_CASE("Monte-Carlo estimates agree with closed forms")
{
    Rng rng(6);
    const ChannelSet ch = random_channels(3, 4, 2, 2, rng);
    const auto cfg = unit_config(3, 4, 2, 2);
    const CMat W = random_cmat(3, 5, rng);
    const PhaseVector phi = PhaseVector::random(4, rng);
    const Metrics m = compute_metrics(W, phi, ch, cfg);
    const auto est = oracle::monte_carlo_metrics(W, phi, ch, cfg, 100000, 99);
    for (int t = 0; t < 2; ++t) CHECK(std::abs(est.radar_snr[t] / m.target_snr[t] - 1.0) < 0.02);
    for (int k = 0; k < 2; ++k) CHECK(std::abs(est.sinr[k] / m.user_sinr[k] - 1.0) < 0.02);

    const auto zero = oracle::monte_carlo_metrics(CMat::Zero(3, 5), phi, ch, cfg, 1000, 1);
    for (double v : zero.radar_snr) CHECK(v == 0.0);
    for (double v : zero.sinr) CHECK(v == 0.0);
}
