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

#include <limits>
#include <vector>

namespace risisac {

// All user-side quantities of the phase step (auxiliary variables, penalty,
// stopping indicator) are measured in units of the user's noise amplitude
// sigma_k, so their magnitudes are comparable to SINR values.

/// Auxiliary variables a_{k,j} ~ h_k^T w_j / sigma_k, K x (K+M).
struct AuxVars {
    CMat a;
};

/// Coefficients of the phase-step objective at an expansion point phi^i.
struct PhiStepCoeffs {
    std::vector<CMat> B_t;   ///< G^T diag(h_r,t), M x N
    std::vector<CVec> v_t;   ///< vec(H_t) at phi^i
    CMat F1;                 ///< N x N
    CVec f2;                 ///< N
    double c2 = 0.0;
    double mm_offset = 0.0;  ///< sum_t v_t^H C_2t v_t at phi^i
    CMat Q;                  ///< N x N Hermitian PSD
    CVec q;                  ///< N
    double c3 = 0.0;
};

struct PenaltyState {
    double rho = 1e-3;
    double shrink = 0.5;     ///< c in rho <- rho / c
    double zeta = std::numeric_limits<double>::infinity();
    double epsilon = 1e-4;
    int inner_rounds = 0;    ///< cumulative a/phi rounds
    int outer_rounds = 0;    ///< cumulative penalty updates

    static PenaltyState from_params(const SolverParams& p);
    void tighten() { rho /= shrink; ++outer_rounds; }
};

CMat build_bt(const CMat& G, const CVec& h_r_t);

/// (B kron B) vec(phi phi^T) + vec(h_d h_d^T) + (h_d kron B + B kron h_d) phi.
CVec build_vt(const CMat& B_t, const CVec& h_d_t, const PhaseVector& phi);

/// C_2t x with C_2t = weight (W^* W^T kron I) / sigma_r^2, applied as
/// weight/sigma_r^2 vec(unvec(x) W W^H).
CVec apply_c2t(const CVec& x, const BeamformerMatrix& W, double weight, double sigma_r_sq);

struct MmPhiTerms {
    CMat F1;
    CVec f2;
    double c2 = 0.0;
    double offset = 0.0;
};

/// Coefficients with
///   sum_t 2 Re{(v_t^i)^H C_2t v_t(phi)} = Re{phi^H F1 phi^* + f2^H phi} + c2
/// for every phi.
MmPhiTerms mm_phi_coeffs(const std::vector<CVec>& v_t, const std::vector<CMat>& B_t,
                         const std::vector<CVec>& h_d_t, const BeamformerMatrix& W,
                         const std::vector<double>& weights, double sigma_r_sq);

struct PenaltyTerms {
    CMat Q;
    CVec q;
    double c3 = 0.0;
};

/// phi^T Q phi^* + Re{q^T phi} + c3 = sum_{k,j} |a_{k,j} - h_k^T w_j / sigma_k|^2.
PenaltyTerms penalty_quadratic(const BeamformerMatrix& W, const ChannelSet& ch, const AuxVars& aux,
                               double sigma_k_sq);

/// Direct evaluation of the penalty sum.
double penalty_value(const BeamformerMatrix& W, const ChannelSet& ch, const PhaseVector& phi,
                     const AuxVars& aux, double sigma_k_sq);

PhiStepCoeffs build_phi_coeffs(const ChannelSet& ch, const PhaseVector& phi_i,
                               const BeamformerMatrix& W, const AuxVars& aux,
                               const ScenarioConfig& config);

/// -Re{phi^H F1 phi^* + f2^H phi} + rho (phi^T Q phi^* + Re{q^T phi} + c3).
/// Defined for any complex phi (finite differences leave the manifold).
double phi_objective(const CVec& phi, const PhiStepCoeffs& c, double rho);

/// Gradient for the real inner product Re{x^H y}: d/dRe(phi) + j d/dIm(phi),
///   -(F1 + F1^T) phi^* - f2 + rho (2 Q^T phi + q^*).
CVec phi_euclidean_gradient(const CVec& phi, const PhiStepCoeffs& c, double rho);

/// Minorizer of sum_t w_t SNR_t(phi) built at phi^i; equal at phi = phi^i.
double mm_phi_minorizer(const CVec& phi, const PhiStepCoeffs& c);

struct RcgOptions {
    int max_iters = 200;
    double grad_tol = 1e-6;
};

struct RcgResult {
    PhaseVector phi;
    double objective = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    bool line_search_failed = false;
};

/// Riemannian conjugate gradient on the complex circle manifold.
/// The objective never exceeds its value at phi_init.
RcgResult rcg_optimize(const PhaseVector& phi_init, const PhiStepCoeffs& c, double rho,
                       const RcgOptions& opts = {});

/// Per-user projection of h_k^T W / sigma_k onto the SINR-feasible set.
/// Throws StepFailure naming the user when a conic solve fails.
AuxVars solve_a_step(const BeamformerMatrix& W, const ChannelSet& ch, const PhaseVector& phi,
                     double gamma, double sigma_k_sq, const conic::SolverOptions& solver = {});

/// zeta = max_{k,j} |a_{k,j} - h_k^T w_j / sigma_k|.
double stopping_indicator(const BeamformerMatrix& W, const ChannelSet& ch, const PhaseVector& phi,
                          const AuxVars& aux, double sigma_k_sq);

struct PenaltyLoopResult {
    PhaseVector phi;
    AuxVars aux;
    PenaltyState state;
    bool converged = false;    ///< zeta < epsilon on exit
    int rcg_line_search_failures = 0;
};

/// Alternates the a-update and RCG at fixed rho until the penalized objective
/// settles, then tightens rho, until zeta < epsilon or the round cap.
/// `constrained = false` runs the radar-only phase update (no users).
PenaltyLoopResult penalty_loop(const BeamformerMatrix& W, const ChannelSet& ch,
                               const PhaseVector& phi_init, PenaltyState state,
                               const ScenarioConfig& config, bool constrained = true);

}  // namespace risisac
