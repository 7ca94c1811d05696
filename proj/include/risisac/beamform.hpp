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

#include "risisac/conic.hpp"
#include "risisac/model.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace risisac {

/// A subproblem solve that did not reach an optimal certificate.
class StepFailure : public std::runtime_error {
public:
    StepFailure(const std::string& what, conic::ConeStatus status, double primal_residual,
                double dual_residual)
        : std::runtime_error(what + " (status " + conic::to_string(status) + ", primal residual " +
                             std::to_string(primal_residual) + ", dual residual " +
                             std::to_string(dual_residual) + ")"),
          status(status), primal_residual(primal_residual), dual_residual(dual_residual)
    {
    }
    conic::ConeStatus status;
    double primal_residual;
    double dual_residual;
};

/// The SINR targets cannot be met within the power budget.
class InfeasibleScenario : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Data of one beamformer update at fixed RIS phases.
struct WStepContext {
    CMat C1;                          ///< sum_t w_t H_t^H H_t / sigma_r^2
    std::vector<CVec> h_k;            ///< effective user channels (empty: no SINR constraints)
    std::vector<double> gamma;        ///< linear SINR targets
    std::vector<double> sigma_k_sq;   ///< user noise powers
    double power = 1.0;
    BeamformerMatrix W_prev;          ///< expansion point W^i
    conic::SolverOptions solver;
};

CMat build_c1(const std::vector<CMat>& H_t, const std::vector<double>& weights, double sigma_r_sq);

/// Linear minorizer of Tr(W^H C1 W) at W_i:
///   2 Re{ vec(W_i^H)^H (C1^T kron I) vec(W^H) } + c_1,
/// c_1 = -Tr(W_i^H C1 W_i). Touches at W = W_i and lies below everywhere
/// when C1 is PSD.
double mm_surrogate_w(const BeamformerMatrix& W, const BeamformerMatrix& W_i, const CMat& C1);

/// Multiplies column k (k < K) by the unit phasor that makes h_k^T w_k real
/// and nonnegative. Columns with h_k^T w_k = 0 are left unchanged.
BeamformerMatrix rotate_columns(const BeamformerMatrix& W, const std::vector<CVec>& h_k);

/// Maximizes the linear minorizer subject to the rotated SINR cones
///   sqrt(1 + 1/Gamma_k) Re{h_k^T w_k} >= ||[h_k^T W, sigma_k]||,  Im{h_k^T w_k} = 0
/// and ||W||_F <= sqrt(P). Throws StepFailure if the conic solve fails.
BeamformerMatrix solve_w_step(const WStepContext& ctx);

/// Communication columns of minimum total power meeting every SINR target
/// with no radar streams (M x K). The search is confined to ||W||_F^2 <= power:
/// the unbounded problem can be infeasible without a certificate.
/// Throws InfeasibleScenario when no beamformer within the budget exists.
CMat min_power_beamformer(const std::vector<CVec>& h_k, const std::vector<double>& gamma,
                          const std::vector<double>& sigma_k_sq, Eigen::Index num_antennas,
                          double power, const conic::SolverOptions& solver = {});

/// Context for the current phases. `constrained = false` drops the SINR
/// constraints (radar-only variants).
WStepContext make_w_step_context(const ChannelSet& ch, const PhaseVector& phi,
                                 const ScenarioConfig& config, const BeamformerMatrix& W_prev,
                                 bool constrained);

}  // namespace risisac
