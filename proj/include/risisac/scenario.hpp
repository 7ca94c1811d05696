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

#include "risisac/linalg.hpp"
#include "risisac/phase.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace risisac {

/// Knobs of the alternating optimizer and of its subproblem solvers.
struct SolverParams {
    double rho_init = 1e-3;        ///< initial penalty coefficient
    double shrink = 0.5;           ///< c in rho <- rho / c, 0 < c < 1
    double epsilon = 1e-4;         ///< threshold on the stopping indicator zeta
    double inner_tol = 1e-5;       ///< relative change ending an inner phi/a round
    int max_inner_rounds = 30;
    int max_penalty_rounds = 60;
    bool reset_penalty = true;    ///< restart rho at rho_init for every phi-step
    int max_outer_iters = 100;
    double objective_rel_tol = 1e-3;
    int convergence_window = 3;
    int rcg_max_iters = 200;
    double rcg_grad_tol = 1e-6;
    double conic_tol = 1e-8;
    int conic_max_iter = 100;
};

/// Physical and algorithmic parameters of one experiment. Defaults are the
/// M=16 / N=36 / K=4 / T=3 operating point with P=35 W and Gamma=5 dB.
struct ScenarioConfig {
    int num_antennas = 16;   ///< M, BS transmit = receive
    int num_elements = 36;   ///< N, RIS
    int num_users = 4;       ///< K
    double power = 35.0;     ///< P, watts
    std::vector<double> target_azimuths_deg{-30.0, 0.0, 30.0};
    std::vector<double> weights{1.0, 1.0, 1.0};

    double d_bs_target = 30.0;
    double d_bs_ris = 35.0;
    double d_ris_user = 3.0;

    double alpha_br = 2.3;
    double alpha_rt = 2.3;
    double alpha_ru = 2.3;
    double alpha_bt = 2.7;
    double alpha_bu = 3.3;
    double pl0_db = -30.0;   ///< reference power gain at 1 m

    double beta_ru_db = 3.0;
    double beta_other_db = 0.0;

    double sigma_r_sq = 1e-11;  ///< watts (-80 dBm)
    double sigma_k_sq = 1e-11;  ///< watts (-80 dBm)
    double gamma_db = 5.0;

    std::uint64_t rng_seed = 1;
    SolverParams solver;

    int num_targets() const { return static_cast<int>(target_azimuths_deg.size()); }
    int num_columns() const { return num_users + num_antennas; }
    double gamma_linear() const { return db_to_linear(gamma_db); }

    /// Throws std::invalid_argument naming the first violated invariant.
    void validate() const;
};

using Point2 = std::array<double, 2>;

/// Planar deployment. The BS sits at the origin, both arrays are ULAs whose
/// axis is the y-axis, so broadside points along +x and an angle theta seen
/// from an array corresponds to the direction cosine sin(theta) = dy / d.
struct Geometry {
    Point2 bs_position{0.0, 0.0};
    Point2 ris_position{0.0, 0.0};
    std::vector<Point2> user_positions;
    std::vector<Point2> target_positions;
};

struct ChannelSet {
    std::vector<CVec> h_d_t;  ///< BS -> target t, length M
    std::vector<CVec> h_r_t;  ///< RIS -> target t, length N
    CMat G;                   ///< BS -> RIS, N x M
    std::vector<CVec> h_d_k;  ///< BS -> user k, length M
    std::vector<CVec> h_r_k;  ///< RIS -> user k, length N

    Eigen::Index num_antennas() const { return G.cols(); }
    Eigen::Index num_elements() const { return G.rows(); }
    int num_users() const { return static_cast<int>(h_d_k.size()); }
    int num_targets() const { return static_cast<int>(h_d_t.size()); }
};

/// ULA response exp(j*pi*m*sin(angle)), m = 0..n-1, half-wavelength spacing.
/// The angle is measured from broadside and must lie in (-90, 90) degrees.
CVec steering_vector(double angle_deg, Eigen::Index n_elems);

/// Same response parametrized by the direction cosine u = sin(angle) in [-1, 1].
CVec steering_vector_from_sine(double u, Eigen::Index n_elems);

/// Amplitude gain sqrt(PL0 * d^-alpha).
double path_loss_gain(double distance, double exponent, double pl0_db = -30.0);

/// sqrt(b/(1+b)) * los + sqrt(1/(1+b)) * CN(0, 1) entries, b = 10^(beta_db/10).
/// beta_db = +inf returns the LoS part unchanged.
CMat rician_channel(const CMat& los_part, double beta_db, Rng& rng);

Geometry make_geometry(const ScenarioConfig& config, Rng& rng);

ChannelSet generate_channels(const ScenarioConfig& config, const Geometry& geometry, Rng& rng);

/// Geometry and channels of one Monte-Carlo draw seeded by `seed`.
struct Realization {
    Geometry geometry;
    ChannelSet channels;
};
Realization make_realization(const ScenarioConfig& config, std::uint64_t seed);

enum class BaselineMode { full, no_ris, random_ris };

/// no_ris zeroes every RIS-side channel; random_ris keeps the channels and
/// draws a fixed phase vector from `seed`; full is the identity.
std::pair<ChannelSet, std::optional<PhaseVector>> apply_baseline(const ChannelSet& ch,
                                                                 BaselineMode mode,
                                                                 std::uint64_t seed = 0);

/// Seeded i.i.d.-uniform phases used both as the random-RIS baseline and as
/// the starting point of the joint optimizer.
PhaseVector random_phases(Eigen::Index n, std::uint64_t seed);

// Structured text config: one `key = value` per line, '#' starts a comment,
// list values are comma separated. Every ScenarioConfig / SolverParams field
// is settable by its member name.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);
std::string serialize_config(const ScenarioConfig& config);
/// FNV-1a over the canonical serialization, hex encoded.
std::string config_hash(const ScenarioConfig& config);

}  // namespace risisac
