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

#include "risisac/scenario.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace risisac {

namespace {

constexpr double kGeometryTol = 1e-9;
// Separates the phase stream from the channel stream of the same seed.
constexpr std::uint64_t kPhaseStreamSalt = 0x9e3779b97f4a7c15ULL;

double distance(const Point2& a, const Point2& b)
{
    return std::hypot(a[0] - b[0], a[1] - b[1]);
}

// Direction cosine of `to` as seen from an array at `from` (axis along y).
double direction_sine(const Point2& from, const Point2& to)
{
    const double d = distance(from, to);
    if (d <= 0.0)
        throw std::invalid_argument("geometry: coincident points");
    return (to[1] - from[1]) / d;
}

CVec rician_vector(const CVec& los, double beta_db, Rng& rng)
{
    return rician_channel(los, beta_db, rng).col(0);
}

}  // namespace

PhaseVector PhaseVector::retract(const CVec& z)
{
    PhaseVector out;
    out.values_.resize(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double mag = std::abs(z(i));
        out.values_(i) = mag > 0.0 ? z(i) / mag : cplx(1.0, 0.0);
    }
    return out;
}

PhaseVector PhaseVector::from_angles(const RVec& radians)
{
    PhaseVector out;
    out.values_.resize(radians.size());
    for (Eigen::Index i = 0; i < radians.size(); ++i)
        out.values_(i) = std::polar(1.0, radians(i));
    return out;
}

PhaseVector PhaseVector::random(Eigen::Index n, Rng& rng)
{
    std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
    RVec angles(n);
    for (Eigen::Index i = 0; i < n; ++i)
        angles(i) = uniform(rng);
    return from_angles(angles);
}

double PhaseVector::max_modulus_error() const
{
    double err = 0.0;
    for (Eigen::Index i = 0; i < values_.size(); ++i)
        err = std::max(err, std::abs(std::abs(values_(i)) - 1.0));
    return err;
}

void ScenarioConfig::validate() const
{
    auto fail = [](const std::string& what) { throw std::invalid_argument("config: " + what); };
    if (num_antennas < 1) fail("num_antennas must be >= 1");
    if (num_elements < 1) fail("num_elements must be >= 1");
    if (num_users < 0) fail("num_users must be >= 0");
    if (num_targets() < 1) fail("at least one target azimuth is required");
    if (!(power > 0.0)) fail("power must be > 0");
    if (weights.size() != target_azimuths_deg.size())
        fail("weights must have one entry per target");
    bool any_positive = false;
    for (double w : weights) {
        if (!(w >= 0.0)) fail("weights must be nonnegative");
        any_positive = any_positive || w > 0.0;
    }
    if (!any_positive) fail("at least one weight must be positive");
    for (double a : target_azimuths_deg)
        if (!(a > -90.0 && a < 90.0)) fail("target azimuths must lie in (-90, 90) degrees");
    if (!(d_bs_target > 0.0 && d_bs_ris > 0.0 && d_ris_user > 0.0))
        fail("distances must be > 0");
    if (!(sigma_r_sq > 0.0 && sigma_k_sq > 0.0)) fail("noise powers must be > 0");
    if (!std::isfinite(gamma_db)) fail("gamma_db must be finite");
    if (!(solver.shrink > 0.0 && solver.shrink < 1.0)) fail("shrink must satisfy 0 < c < 1");
    if (!(solver.rho_init > 0.0)) fail("rho_init must be > 0");
    if (!(solver.epsilon > 0.0)) fail("epsilon must be > 0");
    if (solver.max_outer_iters < 1) fail("max_outer_iters must be >= 1");
    if (solver.convergence_window < 1) fail("convergence_window must be >= 1");
}

CVec steering_vector(double angle_deg, Eigen::Index n_elems)
{
    if (!(angle_deg > -90.0 && angle_deg < 90.0))
        throw std::invalid_argument("steering_vector: angle must lie in (-90, 90) degrees");
    return steering_vector_from_sine(std::sin(angle_deg * std::numbers::pi / 180.0), n_elems);
}

CVec steering_vector_from_sine(double u, Eigen::Index n_elems)
{
    if (n_elems < 1)
        throw std::invalid_argument("steering_vector: n_elems must be >= 1");
    if (!(u >= -1.0 && u <= 1.0))
        throw std::invalid_argument("steering_vector: direction cosine outside [-1, 1]");
    CVec a(n_elems);
    for (Eigen::Index m = 0; m < n_elems; ++m)
        a(m) = std::polar(1.0, std::numbers::pi * static_cast<double>(m) * u);
    return a;
}

double path_loss_gain(double distance, double exponent, double pl0_db)
{
    if (!(distance > 0.0))
        throw std::invalid_argument("path_loss_gain: distance must be > 0");
    return std::sqrt(db_to_linear(pl0_db) * std::pow(distance, -exponent));
}

CMat rician_channel(const CMat& los_part, double beta_db, Rng& rng)
{
    if (std::isinf(beta_db) && beta_db > 0.0)
        return los_part;
    const double beta = db_to_linear(beta_db);
    const double los_scale = std::sqrt(beta / (1.0 + beta));
    const double nlos_scale = std::sqrt(1.0 / (1.0 + beta));
    // CN(0, 1): real and imaginary parts each N(0, 1/2).
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    CMat out(los_part.rows(), los_part.cols());
    for (Eigen::Index j = 0; j < out.cols(); ++j)
        for (Eigen::Index i = 0; i < out.rows(); ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            out(i, j) = los_scale * los_part(i, j) + nlos_scale * cplx(re, im);
        }
    return out;
}

Geometry make_geometry(const ScenarioConfig& config, Rng& rng)
{
    config.validate();
    Geometry g;
    g.bs_position = {0.0, 0.0};
    g.ris_position = {config.d_bs_ris, 0.0};
    for (double az : config.target_azimuths_deg) {
        const double rad = az * std::numbers::pi / 180.0;
        g.target_positions.push_back({config.d_bs_target * std::cos(rad),
                                      config.d_bs_target * std::sin(rad)});
    }
    std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
    for (int k = 0; k < config.num_users; ++k) {
        const double ang = uniform(rng);
        g.user_positions.push_back({g.ris_position[0] + config.d_ris_user * std::cos(ang),
                                    g.ris_position[1] + config.d_ris_user * std::sin(ang)});
    }
    return g;
}

ChannelSet generate_channels(const ScenarioConfig& config, const Geometry& geometry, Rng& rng)
{
    config.validate();
    const Eigen::Index M = config.num_antennas;
    const Eigen::Index N = config.num_elements;
    const int K = config.num_users;
    const int T = config.num_targets();

    if (static_cast<int>(geometry.user_positions.size()) != K ||
        static_cast<int>(geometry.target_positions.size()) != T)
        throw std::invalid_argument("generate_channels: geometry does not match user/target counts");
    if (std::abs(distance(geometry.bs_position, geometry.ris_position) - config.d_bs_ris) >
        kGeometryTol * config.d_bs_ris)
        throw std::invalid_argument("generate_channels: BS-RIS distance inconsistent with config");
    for (const auto& u : geometry.user_positions)
        if (std::abs(distance(u, geometry.ris_position) - config.d_ris_user) >
            kGeometryTol * config.d_ris_user)
            throw std::invalid_argument("generate_channels: RIS-user distance inconsistent with config");
    for (const auto& t : geometry.target_positions)
        if (std::abs(distance(t, geometry.bs_position) - config.d_bs_target) >
            kGeometryTol * config.d_bs_target)
            throw std::invalid_argument("generate_channels: BS-target distance inconsistent with config");

    const Point2& bs = geometry.bs_position;
    const Point2& ris = geometry.ris_position;
    ChannelSet ch;

    // Target links: deterministic LoS.
    for (const auto& tgt : geometry.target_positions) {
        ch.h_d_t.push_back(path_loss_gain(distance(bs, tgt), config.alpha_bt, config.pl0_db) *
                           steering_vector_from_sine(direction_sine(bs, tgt), M));
        ch.h_r_t.push_back(path_loss_gain(distance(ris, tgt), config.alpha_rt, config.pl0_db) *
                           steering_vector_from_sine(direction_sine(ris, tgt), N));
    }

    // Stochastic links. BS-user channels are drawn before anything whose size
    // depends on N, so an N sweep at a fixed seed shares them.
    for (const auto& usr : geometry.user_positions) {
        const CVec los = steering_vector_from_sine(direction_sine(bs, usr), M);
        ch.h_d_k.push_back(path_loss_gain(distance(bs, usr), config.alpha_bu, config.pl0_db) *
                           rician_vector(los, config.beta_other_db, rng));
    }
    {
        const CMat los = steering_vector_from_sine(direction_sine(ris, bs), N) *
                         steering_vector_from_sine(direction_sine(bs, ris), M).transpose();
        ch.G = path_loss_gain(distance(bs, ris), config.alpha_br, config.pl0_db) *
               rician_channel(los, config.beta_other_db, rng);
    }
    for (const auto& usr : geometry.user_positions) {
        const CVec los = steering_vector_from_sine(direction_sine(ris, usr), N);
        ch.h_r_k.push_back(path_loss_gain(distance(ris, usr), config.alpha_ru, config.pl0_db) *
                           rician_vector(los, config.beta_ru_db, rng));
    }
    return ch;
}

Realization make_realization(const ScenarioConfig& config, std::uint64_t seed)
{
    Rng rng(seed);
    Realization r;
    r.geometry = make_geometry(config, rng);
    r.channels = generate_channels(config, r.geometry, rng);
    return r;
}

PhaseVector random_phases(Eigen::Index n, std::uint64_t seed)
{
    Rng rng(seed ^ kPhaseStreamSalt);
    return PhaseVector::random(n, rng);
}

std::pair<ChannelSet, std::optional<PhaseVector>> apply_baseline(const ChannelSet& ch,
                                                                 BaselineMode mode,
                                                                 std::uint64_t seed)
{
    switch (mode) {
    case BaselineMode::full:
        return {ch, std::nullopt};
    case BaselineMode::random_ris:
        return {ch, random_phases(ch.num_elements(), seed)};
    case BaselineMode::no_ris: {
        ChannelSet out = ch;
        out.G.setZero();
        for (auto& h : out.h_r_t) h.setZero();
        for (auto& h : out.h_r_k) h.setZero();
        return {out, std::nullopt};
    }
    }
    throw std::logic_error("apply_baseline: unknown mode");
}

}  // namespace risisac
