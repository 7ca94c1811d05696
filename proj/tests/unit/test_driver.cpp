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

#include "risisac/driver.hpp"
#include "risisac/model.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace risisac;
using namespace risisac::testing;

namespace {

ScenarioConfig desk_config()
{
    ScenarioConfig c;
    c.num_antennas = 8;
    c.num_elements = 16;
    c.num_users = 2;
    c.target_azimuths_deg = {-30.0, 30.0};
    c.weights = {1.0, 1.0};
    return c;
}

void check_feasible(const BeamformerMatrix& W, const PhaseVector& phi, const ChannelSet& ch,
                    const ScenarioConfig& c, double sinr_rel_tol)
{
    CHECK(W.squaredNorm() <= c.power * (1.0 + 1e-9));
    for (int k = 0; k < ch.num_users(); ++k)
        CHECK(comm_sinr(W, phi, ch, k, c.sigma_k_sq) >= c.gamma_linear() * (1.0 - sinr_rel_tol));
}

}  // namespace

TEST_CASE("scheme and status names round-trip")
{
    for (Scheme s : all_schemes()) CHECK(parse_scheme(to_string(s)) == s);
    CHECK(all_schemes().size() == 5);
    CHECK_THROWS_WITH_AS(parse_scheme("ris_only"), doctest::Contains("ris_only"), std::invalid_argument);
    CHECK(to_string(RunStatus::infeasible) == "infeasible");
}

TEST_CASE("initialization is feasible and spends the whole budget")
{
    const ScenarioConfig c = desk_config();
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const Realization r = make_realization(c, seed);
        const InitialPoint init = initialize(r.channels, c, random_phases(c.num_elements, seed));
        check_feasible(init.W, init.phi, r.channels, c, 1e-6);
        CHECK(init.W.squaredNorm() == doctest::Approx(c.power).epsilon(1e-9));
        CHECK(init.phi.values().isApprox(random_phases(c.num_elements, seed).values()));
    }
}

TEST_CASE("initialization at the full-size operating point")
{
    const ScenarioConfig c;  // M=16, N=36, K=4, P=35 W, Gamma=5 dB
    const Realization r = make_realization(c, 1);
    const InitialPoint init = initialize(r.channels, c, random_phases(c.num_elements, 1));
    check_feasible(init.W, init.phi, r.channels, c, 1e-6);
}

TEST_CASE("vanishing SINR target initializes at full power")
{
    ScenarioConfig c = desk_config();
    c.gamma_db = -200.0;
    const Realization r = make_realization(c, 4);
    const InitialPoint init = initialize(r.channels, c, random_phases(c.num_elements, 4));
    CHECK(init.W.squaredNorm() == doctest::Approx(c.power).epsilon(1e-9));
}

TEST_CASE("infeasible toy reports infeasibility")
{
    ScenarioConfig c = desk_config();
    c.num_antennas = 2;
    c.num_users = 4;
    c.gamma_db = 40.0;
    c.power = 1e-6;
    const Realization r = make_realization(c, 1);
    CHECK_THROWS_AS(initialize(r.channels, c, random_phases(c.num_elements, 1)), InfeasibleScenario);

    const RunResult res = run_baseline(r.channels, c, Scheme::proposed, 1);
    CHECK(res.trace.status == RunStatus::infeasible);
    CHECK(res.trace.records.empty());
    CHECK_FALSE(res.trace.message.empty());

    // Dropping the SINR targets makes the same channels solvable.
    const RunResult radar = run_baseline(r.channels, c, Scheme::radar_only, 1);
    CHECK(radar.trace.status != RunStatus::infeasible);
}

TEST_CASE("radar-only without RIS and one target: all power on the dominant eigenvector")
{
    ScenarioConfig c = desk_config();
    c.target_azimuths_deg = {10.0};
    c.weights = {1.0};
    for (std::uint64_t seed : {1u, 2u}) {
        const Realization r = make_realization(c, seed);
        const RunResult res = run_baseline(r.channels, c, Scheme::radar_only_no_ris, seed);
        // C1 = H^H H / sigma^2 with H = u u^T, u = h_d: lambda_max = |u|^4 / sigma^2.
        const double u2 = r.channels.h_d_t[0].squaredNorm();
        const double expected = c.power * u2 * u2 / c.sigma_r_sq;
        CHECK(res.metrics.weighted_sum_snr == doctest::Approx(expected).epsilon(1e-3));
        CHECK(res.trace.status == RunStatus::converged);
    }
}

TEST_CASE("no-RIS baseline leaves the phases alone")
{
    const ScenarioConfig c = desk_config();
    const Realization r = make_realization(c, 5);
    const RunResult res = run_baseline(r.channels, c, Scheme::no_ris, 5);
    CHECK(res.trace.status == RunStatus::converged);
    CHECK(res.phi.values().isApprox(random_phases(c.num_elements, 5).values()));
    for (const auto& rec : res.trace.records) {
        CHECK(rec.zeta == 0.0);
        CHECK(rec.rho == 0.0);
    }
    // The phases are irrelevant once the RIS links are cut.
    const auto cut = apply_baseline(r.channels, BaselineMode::no_ris).first;
    check_feasible(res.W, res.phi, cut, c, 1e-6);
}

TEST_CASE("random-RIS baseline keeps its seeded phases")
{
    const ScenarioConfig c = desk_config();
    const Realization r = make_realization(c, 6);
    const RunResult res = run_baseline(r.channels, c, Scheme::random_ris, 6);
    CHECK(res.phi.values().isApprox(apply_baseline(r.channels, BaselineMode::random_ris, 6).second->values()));
    check_feasible(res.W, res.phi, r.channels, c, 1e-6);
}

TEST_CASE("desk-scale proposed run converges feasibly with monotone W-steps")
{
    const ScenarioConfig c = desk_config();
    for (std::uint64_t seed : {1u, 2u}) {
        const Realization r = make_realization(c, seed);
        const RunResult res = alternating_optimize(r.channels, c, seed);
        REQUIRE(res.trace.status == RunStatus::converged);
        CHECK(res.trace.iterations() <= 50);
        CHECK(res.trace.records.back().zeta < c.solver.epsilon);
        check_feasible(res.W, res.phi, r.channels, c, 1e-4);
        CHECK((res.phi.values().cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
        for (const auto& rec : res.trace.records) {
            CHECK(rec.sum_snr >= rec.sum_snr_before - 1e-6 * std::abs(rec.sum_snr_before));
            CHECK(rec.sinr.size() == 2);
        }
        CHECK(res.metrics.weighted_sum_snr == doctest::Approx(res.trace.records.back().sum_snr));
    }
}

TEST_CASE("radar-only dominates the constrained scheme on the same channels")
{
    const ScenarioConfig c = desk_config();
    const Realization r = make_realization(c, 3);
    const RunResult isac = run_baseline(r.channels, c, Scheme::proposed, 3);
    const RunResult radar = run_baseline(r.channels, c, Scheme::radar_only, 3);
    const RunResult isac0 = run_baseline(r.channels, c, Scheme::no_ris, 3);
    const RunResult radar0 = run_baseline(r.channels, c, Scheme::radar_only_no_ris, 3);
    CHECK(radar.metrics.weighted_sum_snr >= isac.metrics.weighted_sum_snr);
    CHECK(radar0.metrics.weighted_sum_snr >= isac0.metrics.weighted_sum_snr * (1.0 - 1e-9));
}

TEST_CASE("same config and seed give an identical trace")
{
    const ScenarioConfig c = desk_config();
    const Realization r = make_realization(c, 7);
    const RunResult a = alternating_optimize(r.channels, c, 7);
    const RunResult b = alternating_optimize(r.channels, c, 7);
    REQUIRE(a.trace.iterations() == b.trace.iterations());
    for (int i = 0; i < a.trace.iterations(); ++i) {
        CHECK(a.trace.records[i].sum_snr == b.trace.records[i].sum_snr);
        CHECK(a.trace.records[i].zeta == b.trace.records[i].zeta);
    }
    CHECK(a.W == b.W);
    CHECK(a.phi.values() == b.phi.values());
}

TEST_CASE("iteration cap bounds the trace")
{
    ScenarioConfig c = desk_config();
    c.solver.max_outer_iters = 2;
    const Realization r = make_realization(c, 8);
    const RunResult res = alternating_optimize(r.channels, c, 8);
    CHECK(res.trace.iterations() <= 2);
    CHECK(res.trace.status == RunStatus::max_iterations);
}
