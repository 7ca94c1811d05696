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

#include "risisac/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace risisac {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// A run that aborted on a subproblem still returns its last W-step iterate.
bool has_solution(const RunTrace& tr)
{
    return tr.status != RunStatus::infeasible && !tr.records.empty();
}

// %.10g keeps the body stable across runs and short enough to diff.
std::string fmt(double x)
{
    if (std::isnan(x)) return "";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

void write_line(std::ostream& os, const std::vector<std::string>& fields)
{
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) os << ',';
        os << fields[i];
    }
    os << '\n';
}

}  // namespace

SchemeRun run_scheme(const ScenarioConfig& config, Scheme scheme, std::uint64_t seed)
{
    const Realization real = make_realization(config, seed);
    SchemeRun run;
    run.scheme = scheme;
    run.seed = seed;
    run.result = run_baseline(real.channels, config, scheme, seed);
    return run;
}

std::string to_string(SweepAxis a)
{
    switch (a) {
    case SweepAxis::power: return "power";
    case SweepAxis::ris_elems: return "ris_elems";
    case SweepAxis::sinr_target: return "sinr_target";
    }
    return "?";
}

SweepAxis parse_axis(const std::string& name)
{
    if (name == "power") return SweepAxis::power;
    if (name == "ris_elems") return SweepAxis::ris_elems;
    if (name == "sinr_target") return SweepAxis::sinr_target;
    throw std::invalid_argument("unknown axis '" + name + "' (expected power, ris_elems or sinr_target)");
}

ScenarioConfig apply_axis(const ScenarioConfig& config, SweepAxis axis, double value)
{
    ScenarioConfig out = config;
    switch (axis) {
    case SweepAxis::power:
        if (!(value > 0.0) || !std::isfinite(value))
            throw std::invalid_argument("power sweep value must be positive, got " + fmt(value));
        out.power = value;
        break;
    case SweepAxis::ris_elems:
        if (!(value >= 1.0) || value != std::floor(value) || value > 1e6)
            throw std::invalid_argument("ris_elems sweep value must be a positive integer, got " + fmt(value));
        out.num_elements = static_cast<int>(value);
        break;
    case SweepAxis::sinr_target:
        if (!std::isfinite(value))
            throw std::invalid_argument("sinr_target sweep value must be finite (dB)");
        out.gamma_db = value;
        break;
    }
    out.validate();
    return out;
}

double mean_snr_db(const std::vector<double>& snr_db)
{
    double sum = 0.0;
    int n = 0;
    for (double v : snr_db) {
        if (!std::isfinite(v)) continue;
        sum += db_to_linear(v);
        ++n;
    }
    return n ? linear_to_db(sum / n) : kNaN;
}

std::vector<ConvergenceRow> run_convergence(const ScenarioConfig& config,
                                            const std::vector<Scheme>& schemes,
                                            const std::vector<std::uint64_t>& seeds, int workers)
{
    if (schemes.empty()) throw std::invalid_argument("empty scheme list");
    config.validate();
    const std::string hash = config_hash(config);

    // Job order is scheme-major so the output order never depends on timing.
    std::vector<SchemeRun> runs(schemes.size() * seeds.size());
    parallel_for(runs.size(), workers, [&](std::size_t i) {
        runs[i] = run_scheme(config, schemes[i / seeds.size()], seeds[i % seeds.size()]);
    });

    std::vector<ConvergenceRow> rows;
    for (const SchemeRun& run : runs) {
        const RunTrace& tr = run.result.trace;
        ConvergenceRow base;
        base.config_hash = hash;
        base.scheme = run.scheme;
        base.seed = run.seed;
        base.status = tr.status;
        if (tr.records.empty()) {
            base.snr_db = kNaN;
            base.zeta = kNaN;
            base.rho = kNaN;
            rows.push_back(base);
            continue;
        }
        for (const IterationRecord& rec : tr.records) {
            ConvergenceRow row = base;
            row.iter = rec.iter;
            row.snr_db = rec.sum_snr_db;
            row.zeta = rec.zeta;
            row.rho = rec.rho;
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& config, SweepAxis axis,
                                const std::vector<double>& values,
                                const std::vector<Scheme>& schemes,
                                const std::vector<std::uint64_t>& seeds, int workers)
{
    if (schemes.empty()) throw std::invalid_argument("empty scheme list");
    if (values.empty()) throw std::invalid_argument("empty sweep value list");
    if (seeds.empty()) throw std::invalid_argument("empty seed list");

    std::vector<ScenarioConfig> configs;
    std::vector<std::string> hashes;
    for (double v : values) {
        configs.push_back(apply_axis(config, axis, v));
        hashes.push_back(config_hash(configs.back()));
    }

    const std::size_t per_value = schemes.size() * seeds.size();
    std::vector<SchemeRun> runs(values.size() * per_value);
    parallel_for(runs.size(), workers, [&](std::size_t i) {
        const std::size_t v = i / per_value;
        const std::size_t r = i % per_value;
        runs[i] = run_scheme(configs[v], schemes[r / seeds.size()], seeds[r % seeds.size()]);
    });

    std::vector<SweepRow> rows;
    for (std::size_t v = 0; v < values.size(); ++v) {
        for (std::size_t s = 0; s < schemes.size(); ++s) {
            std::vector<double> finals;
            for (std::size_t j = 0; j < seeds.size(); ++j) {
                const SchemeRun& run = runs[v * per_value + s * seeds.size() + j];
                SweepRow row;
                row.config_hash = hashes[v];
                row.axis = axis;
                row.value = values[v];
                row.scheme = run.scheme;
                row.seed = run.seed;
                row.status = run.result.trace.status;
                row.iterations = run.result.trace.iterations();
                row.sum_snr_db = has_solution(run.result.trace) ? run.result.metrics.weighted_sum_snr_db : kNaN;
                finals.push_back(row.sum_snr_db);
                rows.push_back(row);
            }
            SweepRow mean;
            mean.config_hash = hashes[v];
            mean.axis = axis;
            mean.value = values[v];
            mean.scheme = schemes[s];
            mean.is_mean = true;
            mean.sum_snr_db = mean_snr_db(finals);
            int n_ok = 0;
            for (double f : finals) n_ok += std::isfinite(f) ? 1 : 0;
            mean.iterations = n_ok;
            mean.status = n_ok ? RunStatus::converged : RunStatus::infeasible;
            rows.push_back(mean);
        }
    }
    return rows;
}

const std::vector<std::string> kConvergenceColumns{"config_hash", "scheme", "seed", "iter",
                                                   "snr_db",      "zeta",   "rho",  "status"};
const std::vector<std::string> kSweepColumns{"config_hash", "axis",   "value",      "scheme",
                                             "seed",        "status", "iterations", "sum_snr_db"};

std::string generated_header()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[64];
    std::strftime(buf, sizeof buf, "# generated %Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows)
{
    os << generated_header() << '\n';
    write_line(os, kConvergenceColumns);
    for (const ConvergenceRow& r : rows) {
        write_line(os, {r.config_hash, to_string(r.scheme), std::to_string(r.seed), std::to_string(r.iter),
                        fmt(r.snr_db), fmt(r.zeta), fmt(r.rho), to_string(r.status)});
    }
}

// Mean rows carry seed "mean" and status "aggregate"; their iterations
// field is the number of feasible seeds that entered the mean.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows)
{
    os << generated_header() << '\n';
    write_line(os, kSweepColumns);
    for (const SweepRow& r : rows) {
        write_line(os, {r.config_hash, to_string(r.axis), fmt(r.value), to_string(r.scheme),
                        r.is_mean ? "mean" : std::to_string(r.seed),
                        r.is_mean ? "aggregate" : to_string(r.status), std::to_string(r.iterations),
                        fmt(r.sum_snr_db)});
    }
}

}  // namespace risisac
