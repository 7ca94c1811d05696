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

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace risisac {

std::string to_string(Scheme s)
{
    switch (s) {
    case Scheme::proposed: return "proposed";
    case Scheme::no_ris: return "no_ris";
    case Scheme::random_ris: return "random_ris";
    case Scheme::radar_only: return "radar_only";
    case Scheme::radar_only_no_ris: return "radar_only_no_ris";
    }
    throw std::logic_error("to_string: unknown scheme");
}

const std::vector<Scheme>& all_schemes()
{
    static const std::vector<Scheme> all{Scheme::proposed, Scheme::no_ris, Scheme::random_ris,
                                         Scheme::radar_only, Scheme::radar_only_no_ris};
    return all;
}

Scheme parse_scheme(const std::string& name)
{
    for (Scheme s : all_schemes())
        if (to_string(s) == name)
            return s;
    throw std::invalid_argument("unknown scheme '" + name + "'");
}

std::string to_string(RunStatus s)
{
    switch (s) {
    case RunStatus::converged: return "converged";
    case RunStatus::max_iterations: return "max_iterations";
    case RunStatus::subproblem_failure: return "subproblem_failure";
    case RunStatus::infeasible: return "infeasible";
    }
    throw std::logic_error("to_string: unknown status");
}

namespace {

CVec dominant_eigenvector(const CMat& A)
{
    Eigen::SelfAdjointEigenSolver<CMat> es(A);
    return es.eigenvectors().col(A.rows() - 1);
}

}  // namespace

InitialPoint initialize(const ChannelSet& ch, const ScenarioConfig& config, const PhaseVector& phi0,
                        bool constrained)
{
    const Eigen::Index M = ch.num_antennas();
    const int K = ch.num_users();
    InitialPoint init{BeamformerMatrix::Zero(M, K + M), phi0};
    const WStepContext ctx = make_w_step_context(ch, phi0, config, init.W, constrained);

    double used = 0.0;
    if (constrained && K > 0) {
        conic::SolverOptions so;
        so.tol = config.solver.conic_tol;
        so.max_iter = config.solver.conic_max_iter;
        init.W.leftCols(K) = min_power_beamformer(ctx.h_k, ctx.gamma, ctx.sigma_k_sq, M, config.power, so);
        used = init.W.leftCols(K).squaredNorm();
    }
    const double left = std::max(0.0, config.power - used);
    if (!constrained || K == 0) {
        init.W.col(K) = std::sqrt(config.power) * dominant_eigenvector(ctx.C1);
        return init;
    }
    if (K >= M) {
        init.W.leftCols(K) *= std::sqrt(config.power / used);
        return init;
    }
    // Projector onto the null space of the stacked user channels (rows h_k^T).
    CMat Hc(K, M);
    for (int k = 0; k < K; ++k) Hc.row(k) = ctx.h_k[static_cast<std::size_t>(k)].transpose();
    const CMat P = CMat::Identity(M, M) - Hc.adjoint() * (Hc * Hc.adjoint()).ldlt().solve(Hc);
    const CMat A = P * ctx.C1 * P;
    init.W.col(K) = std::sqrt(left) * (P * dominant_eigenvector(0.5 * (A + A.adjoint()))).normalized();
    return init;
}

InitialPoint initialize(const ChannelSet& ch, const ScenarioConfig& config, Rng& rng, bool constrained)
{
    return initialize(ch, config, PhaseVector::random(ch.num_elements(), rng), constrained);
}

namespace {

IterationRecord snapshot(int iter, const BeamformerMatrix& W, const PhaseVector& phi, const ChannelSet& ch,
                         const ScenarioConfig& config, bool constrained, double zeta, double rho,
                         std::chrono::steady_clock::time_point start)
{
    IterationRecord r;
    r.iter = iter;
    r.sum_snr = weighted_sum_snr(W, phi, ch, config);
    r.sum_snr_db = linear_to_db(r.sum_snr);
    if (constrained)
        for (int k = 0; k < ch.num_users(); ++k) r.sinr.push_back(comm_sinr(W, phi, ch, k, config.sigma_k_sq));
    r.zeta = zeta;
    r.rho = rho;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

bool objective_settled(const std::vector<IterationRecord>& recs, int window, double tol)
{
    const int n = static_cast<int>(recs.size());
    if (n < window + 1)
        return false;
    for (int i = n - window; i < n; ++i) {
        const double prev = recs[static_cast<std::size_t>(i - 1)].sum_snr;
        const double cur = recs[static_cast<std::size_t>(i)].sum_snr;
        if (std::abs(cur - prev) > tol * std::abs(prev))
            return false;
    }
    return true;
}

}  // namespace

RunResult alternating_optimize(const ChannelSet& ch, const ScenarioConfig& config,
                               const InitialPoint& init, const RunOptions& opts)
{
    const auto start = std::chrono::steady_clock::now();
    const SolverParams& sp = config.solver;
    RunResult res{init.W, init.phi, {}, {}};
    PenaltyState state = PenaltyState::from_params(sp);
    // Without a phase step there is nothing for zeta to measure.
    double zeta = opts.optimize_phi ? std::numeric_limits<double>::infinity() : 0.0;
    double rho = opts.optimize_phi ? state.rho : 0.0;
    PhaseVector phi_prev = res.phi;

    for (int it = 1; it <= sp.max_outer_iters; ++it) {
        const double before = weighted_sum_snr(res.W, res.phi, ch, config);
        try {
            const WStepContext ctx = make_w_step_context(ch, res.phi, config, res.W, opts.constrained);
            res.W = solve_w_step(ctx);
        } catch (const StepFailure& e) {
            res.trace.status = RunStatus::subproblem_failure;
            res.trace.message = std::string("iteration ") + std::to_string(it) + ": " + e.what();
            // Fall back to the phases the current W was optimized for.
            res.phi = phi_prev;
            break;
        }
        res.trace.records.push_back(snapshot(it, res.W, res.phi, ch, config, opts.constrained, zeta, rho, start));
        res.trace.records.back().sum_snr_before = before;
        if (zeta < sp.epsilon && objective_settled(res.trace.records, sp.convergence_window, sp.objective_rel_tol)) {
            res.trace.status = RunStatus::converged;
            break;
        }
        if (!opts.optimize_phi)
            continue;

        if (sp.reset_penalty)
            state = PenaltyState::from_params(sp);
        try {
            const PenaltyLoopResult pl = penalty_loop(res.W, ch, res.phi, state, config, opts.constrained);
            phi_prev = res.phi;
            res.phi = pl.phi;
            state = pl.state;
            zeta = state.zeta;
            rho = state.rho;
        } catch (const StepFailure& e) {
            res.trace.status = RunStatus::subproblem_failure;
            res.trace.message = std::string("iteration ") + std::to_string(it) + ": " + e.what();
            break;
        }
    }
    res.metrics = compute_metrics(res.W, res.phi, ch, config);
    return res;
}

RunResult alternating_optimize(const ChannelSet& ch, const ScenarioConfig& config, std::uint64_t seed)
{
    return run_baseline(ch, config, Scheme::proposed, seed);
}

RunResult run_baseline(const ChannelSet& ch, const ScenarioConfig& config, Scheme scheme, std::uint64_t seed)
{
    const bool no_ris = scheme == Scheme::no_ris || scheme == Scheme::radar_only_no_ris;
    const bool constrained = scheme != Scheme::radar_only && scheme != Scheme::radar_only_no_ris;
    const ChannelSet used = no_ris ? apply_baseline(ch, BaselineMode::no_ris).first : ch;
    const PhaseVector phi0 = random_phases(ch.num_elements(), seed);

    RunOptions opts;
    opts.constrained = constrained;
    opts.optimize_phi = !no_ris && scheme != Scheme::random_ris;

    InitialPoint init;
    try {
        init = initialize(used, config, phi0, constrained);
    } catch (const InfeasibleScenario& e) {
        RunResult r;
        r.phi = phi0;
        r.W = BeamformerMatrix::Zero(ch.num_antennas(), ch.num_users() + ch.num_antennas());
        r.trace.status = RunStatus::infeasible;
        r.trace.message = e.what();
        return r;
    }
    return alternating_optimize(used, config, init, opts);
}

}  // namespace risisac
