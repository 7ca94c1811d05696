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

#include "risisac/beamform.hpp"
#include "risisac/ris_phase.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace risisac {

enum class Scheme { proposed, no_ris, random_ris, radar_only, radar_only_no_ris };

std::string to_string(Scheme s);
/// Throws std::invalid_argument naming the unknown scheme.
Scheme parse_scheme(const std::string& name);
const std::vector<Scheme>& all_schemes();

enum class RunStatus { converged, max_iterations, subproblem_failure, infeasible };
std::string to_string(RunStatus s);

/// Snapshot taken right after each W-step.
struct IterationRecord {
    int iter = 0;                ///< 1-based outer iteration
    double sum_snr = 0.0;        ///< weighted radar sum-SNR (linear)
    double sum_snr_db = 0.0;
    double sum_snr_before = 0.0; ///< linear, at the W entering this W-step
    std::vector<double> sinr;    ///< linear, one per user
    double zeta = 0.0;           ///< stopping indicator of the preceding phase step
    double rho = 0.0;            ///< penalty coefficient of the preceding phase step
    double seconds = 0.0;        ///< wall time since the run started
};

struct RunTrace {
    std::vector<IterationRecord> records;
    RunStatus status = RunStatus::max_iterations;
    std::string message;
    int iterations() const { return static_cast<int>(records.size()); }
};

struct InitialPoint {
    BeamformerMatrix W;
    PhaseVector phi;
};

struct RunOptions {
    bool constrained = true;   ///< enforce the SINR targets
    bool optimize_phi = true;  ///< false keeps the initial phases fixed
};

struct RunResult {
    BeamformerMatrix W;
    PhaseVector phi;
    Metrics metrics;
    RunTrace trace;
};

/// Feasible starting beamformer at fixed phases: minimum-power communication
/// columns, then a single radar column along the dominant direction of
/// C_1 inside the null space of the user channels carrying the leftover
/// power. With K >= M the communication columns are scaled up instead.
/// Throws InfeasibleScenario if the SINR targets cannot be met.
InitialPoint initialize(const ChannelSet& ch, const ScenarioConfig& config, const PhaseVector& phi0,
                        bool constrained = true);

/// Draws phi0 with i.i.d. uniform phases from `rng`.
InitialPoint initialize(const ChannelSet& ch, const ScenarioConfig& config, Rng& rng,
                        bool constrained = true);

/// W-step / phase-step alternation from `init`. Convergence requires the
/// last `convergence_window` relative changes of the sum-SNR to be below
/// `objective_rel_tol` and zeta < epsilon. The returned iterate always comes
/// straight out of a W-step, so power and SINR hold to solver accuracy.
RunResult alternating_optimize(const ChannelSet& ch, const ScenarioConfig& config,
                               const InitialPoint& init, const RunOptions& opts = {});

/// The proposed scheme started from random_phases(N, seed).
RunResult alternating_optimize(const ChannelSet& ch, const ScenarioConfig& config, std::uint64_t seed);

/// Runs one scheme. `seed` selects the random phases shared by the
/// proposed initialization and the random-RIS baseline. An infeasible
/// initialization returns status infeasible and an empty trace.
RunResult run_baseline(const ChannelSet& ch, const ScenarioConfig& config, Scheme scheme,
                       std::uint64_t seed);

}  // namespace risisac
