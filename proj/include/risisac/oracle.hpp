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

// Brute-force and sampling verifiers for tests. Nothing here is called by the
// optimizer, and the formulas are re-derived rather than shared with it.

#include "risisac/beamform.hpp"
#include "risisac/ris_phase.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace risisac::oracle {

struct GridResult {
    CVec phi;
    double value = 0.0;
    long evaluations = 0;
};

/// Exhaustive minimization of f over the phase grid {k * step_deg}^N, N <= 3.
GridResult grid_search_phi(const std::function<double(const CVec&)>& f, int num_elements,
                           double step_deg);

/// Same, for the phase-step objective evaluated by explicit element sums.
GridResult grid_search_phi(const PhiStepCoeffs& c, double rho, double step_deg);

/// Element-wise double-sum evaluation of the phase-step objective.
double phi_objective_direct(const CVec& phi, const PhiStepCoeffs& c, double rho);

/// Central differences, h in [1e-7, 1e-5].
RVec finite_diff_gradient(const std::function<double(const RVec&)>& f, const RVec& x, double h);

/// Central differences on [Re phi; Im phi], returned as d/dRe + j d/dIm.
CVec finite_diff_gradient(const std::function<double(const CVec&)>& f, const CVec& phi, double h);

struct MetricsEstimate {
    std::vector<double> radar_snr;
    std::vector<double> sinr;
};

/// Sample averages over n_samples symbol vectors s ~ CN(0, I) and receiver noise.
MetricsEstimate monte_carlo_metrics(const BeamformerMatrix& W, const PhaseVector& phi,
                                    const ChannelSet& ch, const ScenarioConfig& config,
                                    int n_samples, std::uint64_t seed);

/// Semidefinite relaxation bound on the W-step problem: lifts each
/// communication column and the radar block to PSD matrices and solves the
/// resulting SDP with a log-det barrier. M <= 4, K <= 2.
double sdr_w_oracle(const WStepContext& ctx);

}  // namespace risisac::oracle
