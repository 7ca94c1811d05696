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

#include "risisac/driver.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace risisac {

// Seed s draws the channel realization and the initial / random phases, so
// every scheme at the same seed sees the same channels.

struct SchemeRun {
    Scheme scheme = Scheme::proposed;
    std::uint64_t seed = 0;
    RunResult result;
};

SchemeRun run_scheme(const ScenarioConfig& config, Scheme scheme, std::uint64_t seed);

/// Runs every (job index) in [0, n_jobs) on at most `workers` threads.
/// Results must be written to per-index slots by `job`.
template <class Job>
void parallel_for(std::size_t n_jobs, int workers, Job&& job);

enum class SweepAxis { power, ris_elems, sinr_target };
std::string to_string(SweepAxis a);
SweepAxis parse_axis(const std::string& name);

/// Copy of `config` with the swept parameter set to `value`.
/// Throws std::invalid_argument for power <= 0, non-integer or < 1 element counts.
ScenarioConfig apply_axis(const ScenarioConfig& config, SweepAxis axis, double value);

struct ConvergenceRow {
    std::string config_hash;
    Scheme scheme = Scheme::proposed;
    std::uint64_t seed = 0;
    int iter = 0;                 ///< 0 marks a run that never started
    double snr_db = 0.0;
    double zeta = 0.0;
    double rho = 0.0;
    RunStatus status = RunStatus::converged;  ///< final status of the run
};

struct SweepRow {
    std::string config_hash;
    SweepAxis axis = SweepAxis::power;
    double value = 0.0;
    Scheme scheme = Scheme::proposed;
    bool is_mean = false;         ///< aggregate over the feasible seeds
    std::uint64_t seed = 0;
    RunStatus status = RunStatus::converged;
    int iterations = 0;           ///< for mean rows: number of seeds averaged
    double sum_snr_db = 0.0;      ///< NaN when no feasible solution exists
};

/// Mean of the linear sum-SNRs, in dB. Non-finite entries are skipped;
/// NaN if none remain.
double mean_snr_db(const std::vector<double>& snr_db);

std::vector<ConvergenceRow> run_convergence(const ScenarioConfig& config,
                                            const std::vector<Scheme>& schemes,
                                            const std::vector<std::uint64_t>& seeds, int workers);

/// Per-seed rows ordered by (value, scheme, seed), then one mean row per
/// (value, scheme). Infeasible points stay in the table.
std::vector<SweepRow> run_sweep(const ScenarioConfig& config, SweepAxis axis,
                                const std::vector<double>& values,
                                const std::vector<Scheme>& schemes,
                                const std::vector<std::uint64_t>& seeds, int workers);

// CSV writers. The first line is "# generated <UTC timestamp>"; everything
// after it is a deterministic function of the rows.
extern const std::vector<std::string> kConvergenceColumns;
extern const std::vector<std::string> kSweepColumns;
void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
std::string generated_header();

}  // namespace risisac

#include "risisac/detail/parallel.hpp"
