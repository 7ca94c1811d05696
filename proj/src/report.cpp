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

#include "risisac/report.hpp"

#include "risisac/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace risisac {

namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

enum class TableKind { convergence, sweep };

TableKind classify(const CsvTable& t, const std::string& source)
{
    if (t.columns == kConvergenceColumns) return TableKind::convergence;
    if (t.columns == kSweepColumns) return TableKind::sweep;

    // Pick the layout sharing the first column name, then report the first
    // position where the header departs from it.
    const bool sweepish = std::find(t.columns.begin(), t.columns.end(), "axis") != t.columns.end();
    const auto& want = sweepish ? kSweepColumns : kConvergenceColumns;
    for (std::size_t i = 0; i < want.size(); ++i) {
        if (i >= t.columns.size())
            throw SchemaError(source + ": missing column '" + want[i] + "'");
        if (t.columns[i] != want[i])
            throw SchemaError(source + ": unexpected column '" + t.columns[i] + "' at position " +
                              std::to_string(i + 1) + " (expected '" + want[i] + "')");
    }
    throw SchemaError(source + ": unexpected column '" + t.columns[want.size()] + "'");
}

// Empty fields denote "no value" and map to NaN.
double number(const std::string& s, const std::string& column, const std::string& source, std::size_t row)
{
    if (s.empty()) return std::nan("");
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw SchemaError(source + ": column '" + column + "' row " + std::to_string(row + 1) +
                      ": not a number: '" + s + "'");
}

json nullable(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double median(std::vector<double> v)
{
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

json gaps_to_proposed(const std::map<std::string, double>& mean_db)
{
    json gaps = json::object();
    const auto it = mean_db.find("proposed");
    if (it == mean_db.end() || !std::isfinite(it->second)) return gaps;
    for (const auto& [scheme, v] : mean_db) {
        if (scheme == "proposed") continue;
        gaps[scheme] = nullable(it->second - v);
    }
    return gaps;
}

json summarize_convergence(const CsvTable& t, const std::string& source)
{
    struct Run {
        int last_iter = 0;
        double final_db = std::nan("");
        std::string status;
    };
    std::map<std::string, std::map<std::string, Run>> by_scheme;  // scheme -> seed -> run
    std::string hash;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        hash = row[0];
        Run& run = by_scheme[row[1]][row[2]];
        const int iter = static_cast<int>(number(row[3], "iter", source, r));
        if (iter >= run.last_iter) {
            run.last_iter = iter;
            run.final_db = number(row[4], "snr_db", source, r);
        }
        run.status = row[7];
    }

    json schemes = json::object();
    std::map<std::string, double> means;
    for (const auto& [scheme, runs] : by_scheme) {
        std::vector<double> iters, finals;
        int converged = 0, feasible = 0;
        for (const auto& [seed, run] : runs) {
            if (run.status == "converged") ++converged;
            if (run.status != "infeasible") {
                ++feasible;
                iters.push_back(run.last_iter);
            }
            finals.push_back(run.final_db);
        }
        const double mean = mean_snr_db(finals);
        means[scheme] = mean;
        schemes[scheme] = {{"runs", runs.size()},
                           {"converged", converged},
                           {"feasible_rate", runs.empty() ? 0.0 : double(feasible) / runs.size()},
                           {"median_iterations", nullable(median(iters))},
                           {"mean_final_snr_db", nullable(mean)}};
    }
    return {{"source", source},
            {"config_hash", hash},
            {"schemes", schemes},
            {"gap_to_proposed_db", gaps_to_proposed(means)}};
}

json summarize_sweep(const CsvTable& t, const std::string& source)
{
    struct Point {
        std::map<std::string, std::vector<double>> finals;  // scheme -> per-seed dB
        std::map<std::string, int> feasible;
        std::string hash;
    };
    std::string axis;
    std::map<double, Point> points;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        if (row[4] == "mean") continue;  // recomputed from the per-seed rows
        axis = row[1];
        Point& p = points[number(row[2], "value", source, r)];
        p.hash = row[0];
        const double v = number(row[7], "sum_snr_db", source, r);
        p.finals[row[3]].push_back(v);
        p.feasible[row[3]] += std::isfinite(v) ? 1 : 0;
    }

    json out = json::array();
    for (const auto& [value, p] : points) {
        json schemes = json::object();
        std::map<std::string, double> means;
        for (const auto& [scheme, finals] : p.finals) {
            const double mean = mean_snr_db(finals);
            means[scheme] = mean;
            schemes[scheme] = {{"seeds", finals.size()},
                               {"feasible_rate", double(p.feasible.at(scheme)) / finals.size()},
                               {"mean_snr_db", nullable(mean)}};
        }
        out.push_back({{"value", value},
                       {"config_hash", p.hash},
                       {"schemes", schemes},
                       {"gap_to_proposed_db", gaps_to_proposed(means)}});
    }
    return {{"source", source}, {"axis", axis}, {"points", out}};
}

}  // namespace

CsvTable parse_csv(const std::string& text, const std::string& source)
{
    CsvTable t;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    bool have_header = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto fields = split(line);
        if (!have_header) {
            t.columns = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != t.columns.size())
            throw std::runtime_error(source + ":" + std::to_string(lineno) + ": expected " +
                                     std::to_string(t.columns.size()) + " fields, got " +
                                     std::to_string(fields.size()));
        t.rows.push_back(std::move(fields));
    }
    return t;
}

json summarize_tables(const std::vector<std::pair<std::string, CsvTable>>& tables)
{
    json out = json::object();
    for (const auto& [source, table] : tables) {
        if (classify(table, source) == TableKind::convergence)
            out["convergence"].push_back(summarize_convergence(table, source));
        else
            out["sweeps"].push_back(summarize_sweep(table, source));
    }
    return out;
}

json emit_report(const std::vector<std::string>& csv_paths)
{
    std::vector<std::pair<std::string, CsvTable>> tables;
    for (const std::string& path : csv_paths) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        tables.emplace_back(path, parse_csv(ss.str(), path));
    }
    return summarize_tables(tables);
}

}  // namespace risisac
