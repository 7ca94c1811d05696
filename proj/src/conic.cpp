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

#include "risisac/conic.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <istream>
#include <ostream>
#include <string>
#include <stdexcept>

namespace risisac::conic {

namespace {

constexpr double kStepFraction = 0.99;
constexpr int kRefinementSteps = 3;

// Nesterov-Todd scaling of one cone block. For the orthant W = diag(sqrt(s/z));
// for a second-order cone W = eta * (2 v v^T - J) with J = diag(1, -1, ..., -1).
struct BlockScaling {
    ConeKind kind;
    Eigen::Index offset;
    Eigen::Index dim;
    RVec d;      // orthant: diagonal of W
    double eta = 1.0;
    RVec v;      // second-order: hyperbolic reflection vector
};

double soc_residual(const Eigen::Ref<const RVec>& u)
{
    return u(0) * u(0) - u.tail(u.size() - 1).squaredNorm();
}

RVec apply_j(const Eigen::Ref<const RVec>& u)
{
    RVec out = -u;
    out(0) = u(0);
    return out;
}

class Scaling {
public:
    explicit Scaling(const std::vector<Cone>& cones)
    {
        Eigen::Index off = 0;
        for (const Cone& c : cones) {
            BlockScaling b{c.kind, off, c.dim, {}, 1.0, {}};
            if (c.kind == ConeKind::nonnegative) {
                b.d = RVec::Ones(c.dim);
            } else {
                b.v = RVec::Zero(c.dim);
                b.v(0) = 1.0;
            }
            blocks_.push_back(std::move(b));
            off += c.dim;
        }
    }

    // Returns false when s or z left the interior.
    bool update(const RVec& s, const RVec& z)
    {
        for (auto& b : blocks_) {
            const auto sb = s.segment(b.offset, b.dim);
            const auto zb = z.segment(b.offset, b.dim);
            if (b.kind == ConeKind::nonnegative) {
                if ((sb.array() <= 0.0).any() || (zb.array() <= 0.0).any())
                    return false;
                b.d = (sb.array() / zb.array()).sqrt();
            } else {
                const double sres = soc_residual(sb);
                const double zres = soc_residual(zb);
                if (!(sres > 0.0 && zres > 0.0 && sb(0) > 0.0 && zb(0) > 0.0))
                    return false;
                const double snorm = std::sqrt(sres);
                const double znorm = std::sqrt(zres);
                const RVec sbar = sb / snorm;
                const RVec zbar = zb / znorm;
                const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
                RVec wbar = (sbar + apply_j(zbar)) / (2.0 * gamma);
                b.eta = std::sqrt(snorm / znorm);
                b.v = wbar;
                b.v(0) += 1.0;
                b.v /= std::sqrt(2.0 * (wbar(0) + 1.0));
            }
        }
        return true;
    }

    RVec apply_w(const RVec& u) const { return apply(u, false, 1); }
    RVec apply_winv(const RVec& u) const { return apply(u, true, 1); }
    RVec apply_w2(const RVec& u) const { return apply(u, false, 2); }
    RVec apply_winv2(const RVec& u) const { return apply(u, true, 2); }

    const std::vector<BlockScaling>& blocks() const { return blocks_; }

private:
    RVec apply(const RVec& u, bool inverse, int power) const
    {
        RVec out(u.size());
        for (const auto& b : blocks_) {
            RVec seg = u.segment(b.offset, b.dim);
            for (int p = 0; p < power; ++p) {
                if (b.kind == ConeKind::nonnegative) {
                    seg = inverse ? RVec(seg.cwiseQuotient(b.d)) : RVec(seg.cwiseProduct(b.d));
                } else if (!inverse) {
                    seg = b.eta * (2.0 * b.v.dot(seg) * b.v - apply_j(seg));
                } else {
                    const RVec jv = apply_j(b.v);
                    seg = (2.0 * jv.dot(seg) * jv - apply_j(seg)) / b.eta;
                }
            }
            out.segment(b.offset, b.dim) = seg;
        }
        return out;
    }

    std::vector<BlockScaling> blocks_;
};

// Jordan product and its inverse for the product cone.
RVec jordan_product(const std::vector<Cone>& cones, const RVec& u, const RVec& w)
{
    RVec out(u.size());
    Eigen::Index off = 0;
    for (const Cone& c : cones) {
        if (c.kind == ConeKind::nonnegative) {
            out.segment(off, c.dim) = u.segment(off, c.dim).cwiseProduct(w.segment(off, c.dim));
        } else {
            const auto ub = u.segment(off, c.dim);
            const auto wb = w.segment(off, c.dim);
            out(off) = ub.dot(wb);
            out.segment(off + 1, c.dim - 1) =
                ub(0) * wb.tail(c.dim - 1) + wb(0) * ub.tail(c.dim - 1);
        }
        off += c.dim;
    }
    return out;
}

// Solves lambda o x = w for x.
RVec jordan_divide(const std::vector<Cone>& cones, const RVec& lambda, const RVec& w)
{
    RVec out(w.size());
    Eigen::Index off = 0;
    for (const Cone& c : cones) {
        if (c.kind == ConeKind::nonnegative) {
            out.segment(off, c.dim) =
                w.segment(off, c.dim).cwiseQuotient(lambda.segment(off, c.dim));
        } else {
            const auto lb = lambda.segment(off, c.dim);
            const auto wb = w.segment(off, c.dim);
            const double l0 = lb(0);
            const auto l1 = lb.tail(c.dim - 1);
            const double det = l0 * l0 - l1.squaredNorm();
            const double x0 = (l0 * wb(0) - l1.dot(wb.tail(c.dim - 1))) / det;
            out(off) = x0;
            out.segment(off + 1, c.dim - 1) = (wb.tail(c.dim - 1) - x0 * l1) / l0;
        }
        off += c.dim;
    }
    return out;
}

RVec cone_identity(const std::vector<Cone>& cones, Eigen::Index m)
{
    RVec e = RVec::Zero(m);
    Eigen::Index off = 0;
    for (const Cone& c : cones) {
        if (c.kind == ConeKind::nonnegative)
            e.segment(off, c.dim).setOnes();
        else
            e(off) = 1.0;
        off += c.dim;
    }
    return e;
}

// Smallest "eigenvalue" of u with respect to the cone: min entry for the
// orthant, u0 - ||u1|| for a second-order block.
double min_cone_eigenvalue(const std::vector<Cone>& cones, const RVec& u)
{
    double out = std::numeric_limits<double>::infinity();
    Eigen::Index off = 0;
    for (const Cone& c : cones) {
        if (c.kind == ConeKind::nonnegative)
            out = std::min(out, u.segment(off, c.dim).minCoeff());
        else
            out = std::min(out, u(off) - u.segment(off + 1, c.dim - 1).norm());
        off += c.dim;
    }
    return out;
}

// Largest alpha such that u + alpha du stays in the cone (capped at `cap`).
double max_step(const std::vector<Cone>& cones, const RVec& u, const RVec& du, double cap)
{
    double alpha = cap;
    Eigen::Index off = 0;
    for (const Cone& c : cones) {
        if (c.kind == ConeKind::nonnegative) {
            for (Eigen::Index i = off; i < off + c.dim; ++i)
                if (du(i) < 0.0)
                    alpha = std::min(alpha, -u(i) / du(i));
        } else {
            const auto ub = u.segment(off, c.dim);
            const auto db = du.segment(off, c.dim);
            const double qa = soc_residual(db);
            const double qb = 2.0 * (ub(0) * db(0) - ub.tail(c.dim - 1).dot(db.tail(c.dim - 1)));
            const double qc = std::max(soc_residual(ub), 0.0);
            // Roots of qa t^2 + qb t + qc; the first positive one is where the
            // ray leaves the cone.
            double first = std::numeric_limits<double>::infinity();
            if (qa == 0.0) {
                if (qb < 0.0) first = -qc / qb;
            } else {
                const double disc = qb * qb - 4.0 * qa * qc;
                if (disc >= 0.0) {
                    const double sq = std::sqrt(disc);
                    const double q = -0.5 * (qb + std::copysign(sq, qb));
                    const double r1 = q / qa;
                    const double r2 = q != 0.0 ? qc / q : std::numeric_limits<double>::infinity();
                    for (double r : {r1, r2})
                        if (r > 0.0) first = std::min(first, r);
                }
            }
            if (db(0) < 0.0)
                first = std::min(first, -ub(0) / db(0));
            alpha = std::min(alpha, first);
        }
        off += c.dim;
    }
    return std::max(alpha, 0.0);
}

// Reduced KKT system
//   [ 0   A^T  G^T  ] [dx]   [r1]
//   [ A   0    0    ] [dy] = [r2]
//   [ G   0   -W^2  ] [dz]   [r3]
// eliminated to (G^T W^-2 G) dx + A^T dy = r1 + G^T W^-2 r3.
class KktSolver {
public:
    explicit KktSolver(const ConeProgram& prog) : prog_(prog), Gt_(prog.G.transpose())
    {
        Eigen::Index off = 0;
        for (const Cone& c : prog.cones) {
            SpMat rows = prog.G.middleRows(off, c.dim);
            if (c.kind == ConeKind::second_order)
                gram_.emplace_back(SpMat(rows.transpose() * rows));
            else
                gram_.emplace_back();
            block_rows_.push_back(std::move(rows));
            off += c.dim;
        }
    }

    bool factor(const Scaling& scaling)
    {
        scaling_ = &scaling;
        const Eigen::Index n = prog_.num_vars();
        RMat H = RMat::Zero(n, n);
        std::size_t bi = 0;
        for (const auto& b : scaling.blocks()) {
            const SpMat& Gi = block_rows_[bi];
            if (b.kind == ConeKind::nonnegative) {
                const RVec w = b.d.cwiseInverse().cwiseAbs2();
                H += SpMat(Gi.transpose() * w.asDiagonal() * Gi);
            } else {
                // W^-2 = eta^-2 (I + 4 (v.v) J v v^T J - 2 J v v^T - 2 v v^T J)
                const RVec jv = apply_j(b.v);
                const RVec a = Gi.transpose() * jv;
                const RVec c = Gi.transpose() * b.v;
                const double inv_eta2 = 1.0 / (b.eta * b.eta);
                H += inv_eta2 * gram_[bi];
                H.noalias() += (inv_eta2 * 4.0 * b.v.squaredNorm()) * a * a.transpose();
                H.noalias() -= (inv_eta2 * 2.0) * (a * c.transpose() + c * a.transpose());
            }
            ++bi;
        }
        const double scale = std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
        double reg = 1e-13 * scale;
        for (int attempt = 0; attempt < 8; ++attempt) {
            RMat Hreg = H;
            Hreg.diagonal().array() += reg;
            llt_.compute(Hreg);
            if (llt_.info() == Eigen::Success)
                break;
            reg *= 100.0;
        }
        if (llt_.info() != Eigen::Success)
            return false;
        if (prog_.num_equalities() > 0) {
            const RMat At = RMat(prog_.A.transpose());
            HinvAt_ = llt_.solve(At);
            RMat S = RMat(prog_.A * HinvAt_);
            S.diagonal().array() += 1e-14 * std::max(1.0, S.diagonal().cwiseAbs().maxCoeff());
            schur_.compute(S);
            if (schur_.info() != Eigen::Success)
                return false;
        }
        return true;
    }

    void solve(const RVec& r1, const RVec& r2, const RVec& r3, RVec& dx, RVec& dy, RVec& dz) const
    {
        solve_once(r1, r2, r3, dx, dy, dz);
        const double ref = 1.0 + std::max({r1.lpNorm<Eigen::Infinity>(),
                                           r2.size() ? r2.lpNorm<Eigen::Infinity>() : 0.0,
                                           r3.lpNorm<Eigen::Infinity>()});
        for (int it = 0; it < kRefinementSteps; ++it) {
            const RVec e1 = r1 - (prog_.A.transpose() * dy + Gt_ * dz);
            const RVec e2 = r2 - prog_.A * dx;
            const RVec e3 = r3 - (prog_.G * dx - scaling_->apply_w2(dz));
            const double err = std::max({e1.lpNorm<Eigen::Infinity>(),
                                         e2.size() ? e2.lpNorm<Eigen::Infinity>() : 0.0,
                                         e3.lpNorm<Eigen::Infinity>()});
            if (err <= 1e-14 * ref)
                break;
            RVec cx, cy, cz;
            solve_once(e1, e2, e3, cx, cy, cz);
            dx += cx;
            dy += cy;
            dz += cz;
        }
    }

private:
    void solve_once(const RVec& r1, const RVec& r2, const RVec& r3, RVec& dx, RVec& dy,
                    RVec& dz) const
    {
        const RVec t = r1 + Gt_ * scaling_->apply_winv2(r3);
        if (prog_.num_equalities() > 0) {
            dy = schur_.solve(prog_.A * llt_.solve(t) - r2);
            dx = llt_.solve(t - prog_.A.transpose() * dy);
        } else {
            dy = RVec(0);
            dx = llt_.solve(t);
        }
        dz = scaling_->apply_winv2(prog_.G * dx - r3);
    }

    const ConeProgram& prog_;
    SpMat Gt_;
    std::vector<SpMat> block_rows_;
    std::vector<SpMat> gram_;
    const Scaling* scaling_ = nullptr;
    Eigen::LLT<RMat> llt_;
    RMat HinvAt_;
    Eigen::LDLT<RMat> schur_;
};

struct Iterate {
    RVec x, y, z, s;
    double tau = 1.0;
    double kappa = 1.0;
};

struct Direction {
    RVec dx, dy, dz, ds;
    double dtau = 0.0;
    double dkappa = 0.0;
};

}  // namespace

std::string to_string(ConeStatus status)
{
    switch (status) {
    case ConeStatus::optimal: return "optimal";
    case ConeStatus::optimal_inaccurate: return "optimal_inaccurate";
    case ConeStatus::infeasible: return "infeasible";
    case ConeStatus::unbounded: return "unbounded";
    case ConeStatus::max_iter: return "max_iter";
    }
    return "unknown";
}

void ConeProgram::validate() const
{
    const Eigen::Index n = c.size();
    if (A.rows() != b.size() || (A.rows() > 0 && A.cols() != n))
        throw std::invalid_argument("ConeProgram: equality block shape mismatch");
    if (G.rows() != h.size() || G.cols() != n)
        throw std::invalid_argument("ConeProgram: cone block shape mismatch");
    Eigen::Index rows = 0;
    for (const Cone& cone : cones) {
        if (cone.dim < 1)
            throw std::invalid_argument("ConeProgram: cone dimension must be >= 1");
        rows += cone.dim;
    }
    if (rows != h.size())
        throw std::invalid_argument("ConeProgram: cone dimensions do not sum to rows of G");
    if (cones.empty())
        throw std::invalid_argument("ConeProgram: at least one cone is required");
    auto finite = [](const auto& m) { return m.size() == 0 || m.allFinite(); };
    if (!finite(c) || !finite(b) || !finite(h))
        throw std::invalid_argument("ConeProgram: non-finite data");
    for (Eigen::Index k = 0; k < G.outerSize(); ++k)
        for (SpMat::InnerIterator it(G, k); it; ++it)
            if (!std::isfinite(it.value()))
                throw std::invalid_argument("ConeProgram: non-finite entry in G");
    for (Eigen::Index k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it)
            if (!std::isfinite(it.value()))
                throw std::invalid_argument("ConeProgram: non-finite entry in A");
}

ConeSolution solve(const ConeProgram& prog_in, const SolverOptions& opts)
{
    prog_in.validate();
    ConeProgram prog = prog_in;
    if (prog.A.rows() == 0)
        prog.A.resize(0, prog.num_vars());
    const auto& cones = prog.cones;
    const Eigen::Index n = prog.num_vars();
    const Eigen::Index p = prog.num_equalities();
    const Eigen::Index m = prog.num_cone_rows();

    Eigen::Index degree = 0;
    for (const Cone& c : cones)
        degree += c.kind == ConeKind::nonnegative ? c.dim : 1;

    const RVec e = cone_identity(cones, m);
    const double norm_b = p ? prog.b.norm() : 0.0;
    const double norm_c = prog.c.norm();
    const double norm_h = prog.h.norm();
    const SpMat At = prog.A.transpose();
    const SpMat Gt = prog.G.transpose();

    Scaling scaling(cones);
    KktSolver kkt(prog);
    ConeSolution sol;

    // Starting point from two least-squares solves with W = I.
    Iterate it;
    if (!kkt.factor(scaling)) {
        sol.status = ConeStatus::max_iter;
        return sol;
    }
    {
        RVec x, y, z;
        kkt.solve(RVec::Zero(n), p ? RVec(prog.b) : RVec(0), prog.h, x, y, z);
        it.x = x;
        it.s = -z;
        const double ap = -min_cone_eigenvalue(cones, it.s);
        if (ap >= 0.0)
            it.s += (1.0 + ap) * e;
        kkt.solve(-prog.c, RVec::Zero(p), RVec::Zero(m), x, y, z);
        it.y = y;
        it.z = z;
        const double ad = -min_cone_eigenvalue(cones, it.z);
        if (ad >= 0.0)
            it.z += (1.0 + ad) * e;
    }

    auto fill_solution = [&](const Iterate& cur, ConeSolution& out) {
        const double tau = cur.tau;
        out.x = cur.x / tau;
        out.y = cur.y / tau;
        out.z = cur.z / tau;
        out.s = cur.s / tau;
        const double pres_eq = p ? (prog.A * out.x - prog.b).norm() / (1.0 + norm_b) : 0.0;
        const double pres_cone = (prog.G * out.x + out.s - prog.h).norm() / (1.0 + norm_h);
        out.primal_residual = std::max(pres_eq, pres_cone);
        out.dual_residual = ((p ? RVec(At * out.y) : RVec::Zero(n)) + Gt * out.z + prog.c).norm() /
                            (1.0 + norm_c);
        out.primal_objective = prog.c.dot(out.x);
        out.dual_objective = -(p ? prog.b.dot(out.y) : 0.0) - prog.h.dot(out.z);
        out.gap = out.s.dot(out.z);
        out.relative_gap = out.gap / std::max(1.0, std::abs(out.primal_objective));
    };

    // Near the boundary the KKT solves lose accuracy and residuals can drift
    // back up; the best iterate seen is kept as a fallback.
    ConeSolution best;
    double best_merit = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter <= opts.max_iter; ++iter) {
        sol.iterations = iter;
        fill_solution(it, sol);
        const double merit = std::max({sol.primal_residual, sol.dual_residual, std::abs(sol.relative_gap)});
        if (merit < best_merit) {
            best_merit = merit;
            best = sol;
        }

        const RVec rx = (p ? RVec(At * it.y) : RVec::Zero(n)) + Gt * it.z + prog.c * it.tau;
        const RVec ry = p ? RVec(prog.A * it.x - prog.b * it.tau) : RVec(0);
        const RVec rz = prog.G * it.x + it.s - prog.h * it.tau;
        const double cx = prog.c.dot(it.x);
        const double by_hz = (p ? prog.b.dot(it.y) : 0.0) + prog.h.dot(it.z);
        const double rtau = it.kappa + cx + by_hz;

        if (opts.verbose)
            std::fprintf(stderr, "%3d pres %.2e dres %.2e gap %.2e pobj %+.8e tau %.2e kappa %.2e\n", iter,
                         sol.primal_residual, sol.dual_residual, sol.relative_gap, sol.primal_objective, it.tau,
                         it.kappa);
        if (sol.primal_residual < opts.tol && sol.dual_residual < opts.tol &&
            std::abs(sol.relative_gap) < opts.tol) {
            sol.status = ConeStatus::optimal;
            return sol;
        }
        // Infeasibility certificates from the homogeneous embedding.
        if (by_hz < 0.0) {
            const RVec dual_ray = (p ? RVec(At * it.y) : RVec::Zero(n)) + Gt * it.z;
            if (dual_ray.norm() / -by_hz < opts.tol && it.kappa > it.tau) {
                sol.status = ConeStatus::infeasible;
                sol.y = it.y / -by_hz;
                sol.z = it.z / -by_hz;
                return sol;
            }
        }
        if (cx < 0.0) {
            const double ray_res = std::max(p ? (prog.A * it.x).norm() : 0.0,
                                            (prog.G * it.x + it.s).norm());
            if (ray_res / -cx < opts.tol && it.kappa > it.tau) {
                sol.status = ConeStatus::unbounded;
                sol.x = it.x / -cx;
                sol.s = it.s / -cx;
                return sol;
            }
        }
        if (iter == opts.max_iter)
            break;

        if (!scaling.update(it.s, it.z) || !kkt.factor(scaling))
            break;
        const RVec lambda = scaling.apply_w(it.z);
        const double mu = (it.s.dot(it.z) + it.tau * it.kappa) / static_cast<double>(degree + 1);

        RVec x1, y1, z1;
        kkt.solve(-prog.c, p ? RVec(prog.b) : RVec(0), prog.h, x1, y1, z1);
        const double denom = it.kappa / it.tau + scaling.apply_w(z1).squaredNorm();

        auto newton = [&](double residual_weight, const RVec& ds_target, double dk_target) {
            Direction d;
            const RVec lam_div = jordan_divide(cones, lambda, ds_target);
            RVec x2, y2, z2;
            kkt.solve(-residual_weight * rx, -residual_weight * ry,
                      -residual_weight * rz - scaling.apply_w(lam_div), x2, y2, z2);
            d.dtau = (dk_target / it.tau + residual_weight * rtau + prog.c.dot(x2) +
                      (p ? prog.b.dot(y2) : 0.0) + prog.h.dot(z2)) /
                     denom;
            d.dx = x2 + d.dtau * x1;
            d.dy = y2 + d.dtau * y1;
            d.dz = z2 + d.dtau * z1;
            d.ds = scaling.apply_w(lam_div - scaling.apply_w(d.dz));
            d.dkappa = (dk_target - it.kappa * d.dtau) / it.tau;
            return d;
        };
        auto step_to_boundary = [&](const Direction& d) {
            double a = max_step(cones, it.s, d.ds, 1.0);
            a = max_step(cones, it.z, d.dz, a);
            if (d.dtau < 0.0) a = std::min(a, -it.tau / d.dtau);
            if (d.dkappa < 0.0) a = std::min(a, -it.kappa / d.dkappa);
            return a;
        };

        // Predictor.
        const RVec lam_sq = jordan_product(cones, lambda, lambda);
        const Direction aff = newton(1.0, -lam_sq, -it.tau * it.kappa);
        const double alpha_aff = step_to_boundary(aff);
        const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3), 0.0, 1.0);

        // Corrector.
        const RVec corr = jordan_product(cones, scaling.apply_winv(aff.ds), scaling.apply_w(aff.dz));
        const RVec ds_target = -lam_sq - corr + sigma * mu * e;
        const double dk_target = -it.tau * it.kappa - aff.dtau * aff.dkappa + sigma * mu;
        const Direction dir = newton(1.0 - sigma, ds_target, dk_target);
        const double alpha = std::min(1.0, kStepFraction * step_to_boundary(dir));
        if (!(alpha > 0.0) || !dir.dx.allFinite())
            break;

        it.x += alpha * dir.dx;
        it.y += alpha * dir.dy;
        it.z += alpha * dir.dz;
        it.s += alpha * dir.ds;
        it.tau += alpha * dir.dtau;
        it.kappa += alpha * dir.dkappa;
    }
    if (best_merit < opts.reduced_tol) {
        best.status = ConeStatus::optimal_inaccurate;
        best.iterations = sol.iterations;
        return best;
    }
    sol.status = ConeStatus::max_iter;
    return sol;
}

void dump(const ConeProgram& prog, std::ostream& out)
{
    out.precision(17);
    out << "conic-program v1\n";
    out << "n " << prog.num_vars() << " p " << prog.num_equalities() << " m "
        << prog.num_cone_rows() << "\n";
    out << "cones " << prog.cones.size() << "\n";
    for (const Cone& c : prog.cones)
        out << (c.kind == ConeKind::nonnegative ? "l " : "q ") << c.dim << "\n";
    auto vec_line = [&](const char* tag, const RVec& v) {
        out << tag;
        for (Eigen::Index i = 0; i < v.size(); ++i)
            out << ' ' << v(i);
        out << "\n";
    };
    vec_line("c", prog.c);
    vec_line("b", prog.b);
    vec_line("h", prog.h);
    auto mat_block = [&](const char* tag, const SpMat& mtx) {
        out << tag << ' ' << mtx.nonZeros() << "\n";
        for (Eigen::Index k = 0; k < mtx.outerSize(); ++k)
            for (SpMat::InnerIterator it(mtx, k); it; ++it)
                out << it.row() << ' ' << it.col() << ' ' << it.value() << "\n";
    };
    mat_block("A", prog.A);
    mat_block("G", prog.G);
}

ConeProgram read_dump(std::istream& in)
{
    auto fail = [](const std::string& what) -> void { throw std::runtime_error("read_dump: " + what); };
    std::string tag, version;
    if (!(in >> tag >> version) || tag != "conic-program" || version != "v1")
        fail("bad header");
    Eigen::Index n = 0, p = 0, m = 0;
    std::string tn, tp, tm;
    if (!(in >> tn >> n >> tp >> p >> tm >> m) || tn != "n" || tp != "p" || tm != "m")
        fail("bad size line");
    ConeProgram prog;
    std::size_t ncones = 0;
    if (!(in >> tag >> ncones) || tag != "cones")
        fail("bad cone count");
    for (std::size_t i = 0; i < ncones; ++i) {
        Eigen::Index dim = 0;
        if (!(in >> tag >> dim) || (tag != "l" && tag != "q"))
            fail("bad cone line");
        prog.cones.push_back({tag == "l" ? ConeKind::nonnegative : ConeKind::second_order, dim});
    }
    auto read_vec = [&](const char* expect, Eigen::Index len) {
        RVec v(len);
        if (!(in >> tag) || tag != expect)
            fail(std::string("expected ") + expect);
        for (Eigen::Index i = 0; i < len; ++i)
            if (!(in >> v(i)))
                fail(std::string("short vector ") + expect);
        return v;
    };
    prog.c = read_vec("c", n);
    prog.b = read_vec("b", p);
    prog.h = read_vec("h", m);
    auto read_mat = [&](const char* expect, Eigen::Index rows) {
        std::size_t nnz = 0;
        if (!(in >> tag >> nnz) || tag != expect)
            fail(std::string("expected ") + expect);
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(nnz);
        for (std::size_t k = 0; k < nnz; ++k) {
            Eigen::Index r = 0, c = 0;
            double v = 0.0;
            if (!(in >> r >> c >> v))
                fail(std::string("short matrix ") + expect);
            trips.emplace_back(r, c, v);
        }
        SpMat mtx(rows, n);
        mtx.setFromTriplets(trips.begin(), trips.end());
        return mtx;
    };
    prog.A = read_mat("A", p);
    prog.G = read_mat("G", m);
    prog.validate();
    return prog;
}

// ------------------------------------------------------------------------

AffineExpr real_part(const ComplexAffine& e)
{
    AffineExpr out;
    out.constant = e.constant.real();
    for (const auto& [var, coeff] : e.terms) {
        out.terms.emplace_back(var.re, coeff.real());
        out.terms.emplace_back(var.im, -coeff.imag());
    }
    return out;
}

AffineExpr imag_part(const ComplexAffine& e)
{
    AffineExpr out;
    out.constant = e.constant.imag();
    for (const auto& [var, coeff] : e.terms) {
        out.terms.emplace_back(var.re, coeff.imag());
        out.terms.emplace_back(var.im, coeff.real());
    }
    return out;
}

Eigen::Index ConeProgramBuilder::add_variables(Eigen::Index n)
{
    const Eigen::Index first = num_vars_;
    num_vars_ += n;
    return first;
}

std::vector<ComplexVar> ConeProgramBuilder::add_complex_variables(Eigen::Index n)
{
    const Eigen::Index first = add_variables(2 * n);
    std::vector<ComplexVar> out;
    out.reserve(n);
    for (Eigen::Index i = 0; i < n; ++i)
        out.push_back({first + i, first + n + i});
    return out;
}

void ConeProgramBuilder::set_objective(Eigen::Index var, double coeff)
{
    objective_.emplace_back(var, coeff);
}

void ConeProgramBuilder::add_equality(const AffineExpr& e) { equalities_.push_back(e); }

void ConeProgramBuilder::add_complex_equality(const ComplexAffine& e)
{
    equalities_.push_back(real_part(e));
    equalities_.push_back(imag_part(e));
}

void ConeProgramBuilder::add_nonnegative(const AffineExpr& e)
{
    cone_rows_.push_back({Cone{ConeKind::nonnegative, 1}, {e}});
}

void ConeProgramBuilder::add_soc(const std::vector<AffineExpr>& rows)
{
    if (rows.empty())
        throw std::invalid_argument("add_soc: empty cone");
    cone_rows_.push_back({Cone{ConeKind::second_order, static_cast<Eigen::Index>(rows.size())}, rows});
}

void ConeProgramBuilder::add_complex_soc(const AffineExpr& head,
                                         const std::vector<ComplexAffine>& complex_tail,
                                         const std::vector<AffineExpr>& real_tail)
{
    std::vector<AffineExpr> rows;
    rows.reserve(1 + 2 * complex_tail.size() + real_tail.size());
    rows.push_back(head);
    for (const auto& z : complex_tail) {
        rows.push_back(real_part(z));
        rows.push_back(imag_part(z));
    }
    rows.insert(rows.end(), real_tail.begin(), real_tail.end());
    add_soc(rows);
}

void ConeProgramBuilder::push_row(std::vector<Triplet>& trips, Eigen::Index row,
                                  const AffineExpr& e) const
{
    for (const auto& [idx, coeff] : e.terms) {
        if (idx < 0 || idx >= num_vars_)
            throw std::invalid_argument("ConeProgramBuilder: variable index out of range");
        if (coeff != 0.0)
            trips.emplace_back(row, idx, coeff);
    }
}

ConeProgram ConeProgramBuilder::build() const
{
    ConeProgram prog;
    prog.c = RVec::Zero(num_vars_);
    for (const auto& [idx, coeff] : objective_)
        prog.c(idx) += coeff;

    std::vector<Triplet> trips;
    prog.b.resize(static_cast<Eigen::Index>(equalities_.size()));
    for (std::size_t r = 0; r < equalities_.size(); ++r) {
        push_row(trips, static_cast<Eigen::Index>(r), equalities_[r]);
        prog.b(static_cast<Eigen::Index>(r)) = -equalities_[r].constant;
    }
    prog.A.resize(static_cast<Eigen::Index>(equalities_.size()), num_vars_);
    prog.A.setFromTriplets(trips.begin(), trips.end());

    // s = h - G x with s_row = e(x)  =>  h = constant, G row = -coefficients.
    trips.clear();
    Eigen::Index rows = 0;
    for (const auto& [cone, exprs] : cone_rows_)
        rows += cone.dim;
    prog.h.resize(rows);
    Eigen::Index row = 0;
    for (const auto& [cone, exprs] : cone_rows_) {
        for (const auto& e : exprs) {
            AffineExpr neg = e;
            for (auto& t : neg.terms)
                t.second = -t.second;
            push_row(trips, row, neg);
            prog.h(row) = e.constant;
            ++row;
        }
        // Adjacent orthant rows collapse into a single block.
        if (cone.kind == ConeKind::nonnegative && !prog.cones.empty() &&
            prog.cones.back().kind == ConeKind::nonnegative)
            prog.cones.back().dim += cone.dim;
        else
            prog.cones.push_back(cone);
    }
    prog.G.resize(rows, num_vars_);
    prog.G.setFromTriplets(trips.begin(), trips.end());
    return prog;
}

}  // namespace risisac::conic
