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

#include "risisac/oracle.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace risisac::oracle {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

GridResult grid_search_phi(const std::function<double(const CVec&)>& f, int num_elements,
                           double step_deg)
{
    if (num_elements < 1 || num_elements > 3)
        throw std::invalid_argument("grid_search_phi: supports 1 <= N <= 3");
    if (!(step_deg > 0.0) || step_deg > 360.0)
        throw std::invalid_argument("grid_search_phi: step must be in (0, 360]");
    const long per_axis = std::lround(360.0 / step_deg);
    long total = 1;
    for (int n = 0; n < num_elements; ++n) total *= per_axis;
    if (total > 50'000'000L)
        throw std::invalid_argument("grid_search_phi: grid too large");

    GridResult best;
    best.value = std::numeric_limits<double>::infinity();
    std::vector<long> idx(static_cast<std::size_t>(num_elements), 0);
    CVec phi(num_elements);
    for (long e = 0; e < total; ++e) {
        long rem = e;
        for (int n = 0; n < num_elements; ++n) {
            idx[static_cast<std::size_t>(n)] = rem % per_axis;
            rem /= per_axis;
            const double ang = static_cast<double>(idx[static_cast<std::size_t>(n)]) * step_deg * kPi / 180.0;
            phi(n) = {std::cos(ang), std::sin(ang)};
        }
        const double v = f(phi);
        if (v < best.value) {
            best.value = v;
            best.phi = phi;
        }
    }
    best.evaluations = total;
    return best;
}

double phi_objective_direct(const CVec& phi, const PhiStepCoeffs& c, double rho)
{
    const Eigen::Index N = phi.size();
    cplx quad_f{0.0, 0.0}, lin_f{0.0, 0.0}, quad_q{0.0, 0.0}, lin_q{0.0, 0.0};
    for (Eigen::Index m = 0; m < N; ++m) {
        for (Eigen::Index n = 0; n < N; ++n) {
            quad_f += std::conj(phi(m)) * c.F1(m, n) * std::conj(phi(n));
            quad_q += phi(m) * c.Q(m, n) * std::conj(phi(n));
        }
        lin_f += std::conj(c.f2(m)) * phi(m);
        lin_q += c.q(m) * phi(m);
    }
    return -(quad_f.real() + lin_f.real()) + rho * (quad_q.real() + lin_q.real() + c.c3);
}

GridResult grid_search_phi(const PhiStepCoeffs& c, double rho, double step_deg)
{
    return grid_search_phi([&](const CVec& p) { return phi_objective_direct(p, c, rho); },
                           static_cast<int>(c.F1.rows()), step_deg);
}

RVec finite_diff_gradient(const std::function<double(const RVec&)>& f, const RVec& x, double h)
{
    if (!(h >= 1e-7 && h <= 1e-5))
        throw std::invalid_argument("finite_diff_gradient: h must lie in [1e-7, 1e-5]");
    RVec g(x.size());
    RVec xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double xi = x(i);
        xp(i) = xi + h;
        const double fp = f(xp);
        xp(i) = xi - h;
        const double fm = f(xp);
        xp(i) = xi;
        g(i) = (fp - fm) / (2.0 * h);
    }
    return g;
}

CVec finite_diff_gradient(const std::function<double(const CVec&)>& f, const CVec& phi, double h)
{
    const Eigen::Index N = phi.size();
    RVec x(2 * N);
    x << phi.real(), phi.imag();
    auto fr = [&](const RVec& v) {
        CVec z(N);
        for (Eigen::Index i = 0; i < N; ++i) z(i) = {v(i), v(N + i)};
        return f(z);
    };
    const RVec g = finite_diff_gradient(fr, x, h);
    CVec out(N);
    for (Eigen::Index i = 0; i < N; ++i) out(i) = {g(i), g(N + i)};
    return out;
}

namespace {

// h_d + G^T diag(phi) h_r, entry by entry.
CVec cascade(const CVec& h_d, const CMat& G, const CVec& phi, const CVec& h_r)
{
    CVec out = h_d;
    for (Eigen::Index m = 0; m < G.cols(); ++m)
        for (Eigen::Index n = 0; n < G.rows(); ++n)
            out(m) += G(n, m) * phi(n) * h_r(n);
    return out;
}

}  // namespace

MetricsEstimate monte_carlo_metrics(const BeamformerMatrix& W, const PhaseVector& phi,
                                    const ChannelSet& ch, const ScenarioConfig& config,
                                    int n_samples, std::uint64_t seed)
{
    if (n_samples < 1)
        throw std::invalid_argument("monte_carlo_metrics: n_samples must be >= 1");
    const Eigen::Index M = W.rows();
    const Eigen::Index L = W.cols();
    const int T = ch.num_targets();
    const int K = ch.num_users();
    std::vector<CVec> u(static_cast<std::size_t>(T)), h(static_cast<std::size_t>(K));
    for (int t = 0; t < T; ++t)
        u[static_cast<std::size_t>(t)] = cascade(ch.h_d_t[static_cast<std::size_t>(t)], ch.G, phi.values(),
                                                 ch.h_r_t[static_cast<std::size_t>(t)]);
    for (int k = 0; k < K; ++k)
        h[static_cast<std::size_t>(k)] = cascade(ch.h_d_k[static_cast<std::size_t>(k)], ch.G, phi.values(),
                                                 ch.h_r_k[static_cast<std::size_t>(k)]);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
    auto cn = [&](double scale) { return cplx(nd(rng), nd(rng)) * scale; };
    const double sr = std::sqrt(config.sigma_r_sq);
    const double sk = std::sqrt(config.sigma_k_sq);

    std::vector<double> echo(static_cast<std::size_t>(T), 0.0), rnoise(static_cast<std::size_t>(T), 0.0);
    std::vector<double> des(static_cast<std::size_t>(K), 0.0), intf(static_cast<std::size_t>(K), 0.0),
        unoise(static_cast<std::size_t>(K), 0.0);
    CVec s(L), x(M);
    for (int n = 0; n < n_samples; ++n) {
        for (Eigen::Index j = 0; j < L; ++j) s(j) = cn(1.0);
        x.setZero();
        for (Eigen::Index j = 0; j < L; ++j)
            for (Eigen::Index m = 0; m < M; ++m) x(m) += W(m, j) * s(j);
        for (int t = 0; t < T; ++t) {
            const CVec& ut = u[static_cast<std::size_t>(t)];
            cplx utx{0.0, 0.0};
            for (Eigen::Index m = 0; m < M; ++m) utx += ut(m) * x(m);
            // Echo y = u u^T x + n.
            for (Eigen::Index m = 0; m < M; ++m) {
                echo[static_cast<std::size_t>(t)] += std::norm(ut(m) * utx);
                rnoise[static_cast<std::size_t>(t)] += std::norm(cn(sr)) / static_cast<double>(M);
            }
        }
        for (int k = 0; k < K; ++k) {
            const CVec& hk = h[static_cast<std::size_t>(k)];
            cplx d{0.0, 0.0}, i{0.0, 0.0};
            for (Eigen::Index j = 0; j < L; ++j) {
                cplx g{0.0, 0.0};
                for (Eigen::Index m = 0; m < M; ++m) g += hk(m) * W(m, j);
                (j == k ? d : i) += g * s(j);
            }
            des[static_cast<std::size_t>(k)] += std::norm(d);
            intf[static_cast<std::size_t>(k)] += std::norm(i);
            unoise[static_cast<std::size_t>(k)] += std::norm(cn(sk));
        }
    }
    MetricsEstimate est;
    for (int t = 0; t < T; ++t)
        est.radar_snr.push_back(echo[static_cast<std::size_t>(t)] / rnoise[static_cast<std::size_t>(t)]);
    for (int k = 0; k < K; ++k)
        est.sinr.push_back(des[static_cast<std::size_t>(k)] /
                           (intf[static_cast<std::size_t>(k)] + unoise[static_cast<std::size_t>(k)]));
    return est;
}

// ---------------------------------------------------------------------------
// Log-det barrier SDP over real parameter vectors.

namespace {

// F(z) = F0 + sum_i z_i F_i, Hermitian; only the listed coefficients are nonzero.
struct Lmi {
    CMat F0;
    std::vector<std::pair<Eigen::Index, CMat>> terms;
};

// a^T z + b > 0.
struct LinIneq {
    RVec a;
    double b;
};

struct BarrierProblem {
    RVec c;  // minimize c^T z
    std::vector<Lmi> lmis;
    std::vector<LinIneq> lins;

    int barrier_degree() const
    {
        int m = static_cast<int>(lins.size());
        for (const auto& l : lmis) m += static_cast<int>(l.F0.rows());
        return m;
    }
};

CMat lmi_value(const Lmi& l, const RVec& z)
{
    CMat F = l.F0;
    for (const auto& [i, Fi] : l.terms) F += z(i) * Fi;
    return F;
}

bool strictly_feasible(const BarrierProblem& p, const RVec& z)
{
    for (const auto& l : p.lins)
        if (!(l.a.dot(z) + l.b > 0.0)) return false;
    for (const auto& l : p.lmis) {
        Eigen::LLT<CMat> llt(lmi_value(l, z));
        if (llt.info() != Eigen::Success) return false;
    }
    return true;
}

double barrier_value(const BarrierProblem& p, const RVec& z, double t)
{
    double v = t * p.c.dot(z);
    for (const auto& l : p.lins) v -= std::log(l.a.dot(z) + l.b);
    for (const auto& l : p.lmis) {
        Eigen::LLT<CMat> llt(lmi_value(l, z));
        const CMat& L = llt.matrixL();
        for (Eigen::Index i = 0; i < L.rows(); ++i) v -= 2.0 * std::log(L(i, i).real());
    }
    return v;
}

// Newton iterations on t c^T z + barrier. Returns early when `stop(z)` holds.
RVec center(const BarrierProblem& p, RVec z, double t, const std::function<bool(const RVec&)>& stop)
{
    const Eigen::Index n = z.size();
    for (int it = 0; it < 200; ++it) {
        RVec g = t * p.c;
        RMat H = RMat::Zero(n, n);
        for (const auto& l : p.lins) {
            const double s = l.a.dot(z) + l.b;
            g -= l.a / s;
            H += l.a * l.a.transpose() / (s * s);
        }
        for (const auto& l : p.lmis) {
            const CMat Finv = lmi_value(l, z).inverse();
            std::vector<CMat> X;
            X.reserve(l.terms.size());
            for (const auto& [i, Fi] : l.terms) {
                X.push_back(Finv * Fi);
                g(i) -= X.back().trace().real();
            }
            for (std::size_t a = 0; a < l.terms.size(); ++a)
                for (std::size_t b = a; b < l.terms.size(); ++b) {
                    const double h = (X[a] * X[b]).trace().real();
                    H(l.terms[a].first, l.terms[b].first) += h;
                    if (a != b) H(l.terms[b].first, l.terms[a].first) += h;
                }
        }
        const RVec dz = -H.ldlt().solve(g);
        const double dec2 = -g.dot(dz);
        if (dec2 < 1e-12) break;
        double step = 1.0;
        const double f0 = barrier_value(p, z, t);
        while (step > 1e-14) {
            const RVec zn = z + step * dz;
            if (strictly_feasible(p, zn) && barrier_value(p, zn, t) <= f0 - 0.25 * step * dec2) break;
            step *= 0.5;
        }
        if (step <= 1e-14) break;
        z += step * dz;
        if (stop && stop(z)) break;
    }
    return z;
}

// Hermitian basis: diagonal units, then (E_pq + E_qp) and j(E_pq - E_qp) for p < q.
std::vector<CMat> hermitian_basis(Eigen::Index M)
{
    std::vector<CMat> b;
    for (Eigen::Index p = 0; p < M; ++p) {
        CMat E = CMat::Zero(M, M);
        E(p, p) = 1.0;
        b.push_back(E);
    }
    for (Eigen::Index p = 0; p < M; ++p)
        for (Eigen::Index q = p + 1; q < M; ++q) {
            CMat E = CMat::Zero(M, M);
            E(p, q) = 1.0;
            E(q, p) = 1.0;
            b.push_back(E);
            CMat F = CMat::Zero(M, M);
            F(p, q) = cplx(0.0, 1.0);
            F(q, p) = cplx(0.0, -1.0);
            b.push_back(F);
        }
    return b;
}

}  // namespace

double sdr_w_oracle(const WStepContext& ctx)
{
    const Eigen::Index M = ctx.C1.rows();
    const int K = static_cast<int>(ctx.h_k.size());
    if (M > 4 || K > 2)
        throw std::invalid_argument("sdr_w_oracle: limited to M <= 4, K <= 2");
    if (ctx.gamma.size() != ctx.h_k.size() || ctx.sigma_k_sq.size() != ctx.h_k.size())
        throw std::invalid_argument("sdr_w_oracle: per-user data size mismatch");

    // Blocks 0..K-1: w_k w_k^H; block K: W_r W_r^H.
    const int nb = K + 1;
    const auto basis = hermitian_basis(M);
    const Eigen::Index per = static_cast<Eigen::Index>(basis.size());
    const Eigen::Index ny = nb * per;
    auto trace_coeffs = [&](const CMat& A, int block) {
        RVec a = RVec::Zero(ny);
        for (Eigen::Index i = 0; i < per; ++i) a(block * per + i) = (A * basis[static_cast<std::size_t>(i)]).trace().real();
        return a;
    };

    RVec obj = RVec::Zero(ny);
    for (int j = 0; j < nb; ++j) obj += trace_coeffs(ctx.C1, j);
    std::vector<LinIneq> lins;
    for (int k = 0; k < K; ++k) {
        const CVec& h = ctx.h_k[static_cast<std::size_t>(k)];
        const CMat A = h.conjugate() * h.transpose();
        const double g = ctx.gamma[static_cast<std::size_t>(k)];
        RVec a = RVec::Zero(ny);
        for (int j = 0; j < nb; ++j) a += (j == k ? 1.0 : -g) * trace_coeffs(A, j);
        lins.push_back({a, -g * ctx.sigma_k_sq[static_cast<std::size_t>(k)]});
    }
    {
        RVec a = RVec::Zero(ny);
        for (int j = 0; j < nb; ++j) a -= trace_coeffs(CMat::Identity(M, M), j);
        lins.push_back({a, ctx.power});
    }

    // Phase I on (y, s): push s below zero.
    BarrierProblem p1;
    p1.c = RVec::Zero(ny + 1);
    p1.c(ny) = 1.0;
    for (int j = 0; j < nb; ++j) {
        Lmi l{CMat::Zero(M, M), {}};
        for (Eigen::Index i = 0; i < per; ++i) l.terms.emplace_back(j * per + i, basis[static_cast<std::size_t>(i)]);
        l.terms.emplace_back(ny, CMat::Identity(M, M));
        p1.lmis.push_back(std::move(l));
    }
    for (const auto& li : lins) {
        RVec a(ny + 1);
        a << li.a, 1.0;
        p1.lins.push_back({a, li.b});
    }
    double s0 = 1.0;
    for (const auto& li : lins) s0 = std::max(s0, 2.0 * std::abs(li.b));
    RVec z = RVec::Zero(ny + 1);
    z(ny) = s0;
    const double margin = 1e-9 * s0;
    auto feasible_found = [&](const RVec& v) { return v(ny) < -margin; };
    for (double t = 1.0; t < 1e12 && !feasible_found(z); t *= 10.0)
        z = center(p1, z, t, feasible_found);
    if (!feasible_found(z))
        throw InfeasibleScenario("sdr_w_oracle: relaxation is infeasible");

    // Phase II: maximize the lifted objective.
    BarrierProblem p2;
    p2.c = -obj;
    for (int j = 0; j < nb; ++j) {
        Lmi l{CMat::Zero(M, M), {}};
        for (Eigen::Index i = 0; i < per; ++i) l.terms.emplace_back(j * per + i, basis[static_cast<std::size_t>(i)]);
        p2.lmis.push_back(std::move(l));
    }
    p2.lins = lins;
    RVec y = z.head(ny);
    const double m = p2.barrier_degree();
    double t = 1.0 / std::max(1.0, std::abs(obj.dot(y)));
    for (;;) {
        y = center(p2, y, t, {});
        const double val = obj.dot(y);
        if (m / t < 1e-10 * std::max(1.0, std::abs(val)))
            return val + m / t;  // central-path gap bound
        t *= 10.0;
    }
}

}  // namespace risisac::oracle
