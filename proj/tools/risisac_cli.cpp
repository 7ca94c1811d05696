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

// Experiment harness: `converge`, `sweep` and `report` subcommands.
// Exit codes: 0 success, 1 usage or input error, 2 every run infeasible,
// 3 internal error.

#include "risisac/experiments.hpp"
#include "risisac/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace {

using namespace risisac;

enum Exit { kOk = 0, kUsage = 1, kInfeasibleAll = 2, kInternal = 3 };

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<Scheme> parse_schemes(const std::string& s)
{
    std::vector<Scheme> out;
    for (const auto& name : split_list(s)) out.push_back(parse_scheme(name));
    if (out.empty()) throw UsageError("--schemes: empty scheme list");
    return out;
}

// "1,4,7" or "1-10" or a mix of both.
std::vector<std::uint64_t> parse_seeds(const std::string& s)
{
    std::vector<std::uint64_t> out;
    for (const auto& item : split_list(s)) {
        const auto dash = item.find('-');
        try {
            if (dash == std::string::npos) {
                out.push_back(std::stoull(item));
                continue;
            }
            const std::uint64_t lo = std::stoull(item.substr(0, dash));
            const std::uint64_t hi = std::stoull(item.substr(dash + 1));
            if (hi < lo || hi - lo > 100000) throw UsageError("--seeds: bad range '" + item + "'");
            for (std::uint64_t v = lo; v <= hi; ++v) out.push_back(v);
        } catch (const std::logic_error&) {
            throw UsageError("--seeds: cannot parse '" + item + "'");
        }
    }
    if (out.empty()) throw UsageError("--seeds: empty seed list");
    return out;
}

std::vector<double> parse_values(const std::string& s)
{
    std::vector<double> out;
    for (const auto& item : split_list(s)) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::logic_error&) {
            used = 0;
        }
        if (used != item.size() || item.empty()) throw UsageError("--values: cannot parse '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw UsageError("--values: empty value list");
    return out;
}

ScenarioConfig config_from(const std::string& path)
{
    if (path.empty()) return ScenarioConfig{};
    std::ifstream probe(path);
    if (!probe) throw UsageError("cannot open config file '" + path + "'");
    return load_config(path);
}

template <class Writer>
void write_output(const std::string& out, Writer&& write)
{
    if (out.empty() || out == "-") {
        write(std::cout);
        return;
    }
    std::ofstream os(out);
    if (!os) throw UsageError("cannot open output file '" + out + "'");
    write(os);
    if (!os) throw std::runtime_error("write failed: " + out);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Joint beamforming and RIS phase design experiments"};
    app.require_subcommand(1);

    std::string config_path, schemes = "proposed,no_ris,random_ris,radar_only,radar_only_no_ris";
    std::string seeds = "1", out, axis, values;
    int workers = std::max(1u, std::thread::hardware_concurrency());

    auto* converge = app.add_subcommand("converge", "per-iteration sum-SNR traces");
    auto* sweep = app.add_subcommand("sweep", "final sum-SNR over one parameter axis");
    auto* report = app.add_subcommand("report", "JSON summary of CSVs produced by this tool");

    for (auto* sub : {converge, sweep}) {
        sub->add_option("--config", config_path, "key = value config file (defaults when omitted)");
        sub->add_option("--schemes", schemes, "comma-separated scheme names");
        sub->add_option("--seeds", seeds, "seed list, e.g. 1-10 or 3,5");
        sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--out", out, "output CSV path, '-' for stdout");
    }
    sweep->add_option("--axis", axis, "power | ris_elems | sinr_target")->required();
    sweep->add_option("--values", values, "comma-separated axis values")->required();

    std::vector<std::string> inputs;
    report->add_option("inputs", inputs, "CSV files");
    report->add_option("--out", out, "output JSON path, '-' for stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*converge) {
            const ScenarioConfig cfg = config_from(config_path);
            const auto rows = run_convergence(cfg, parse_schemes(schemes), parse_seeds(seeds), workers);
            write_output(out, [&](std::ostream& os) { write_convergence_csv(os, rows); });
            const bool all_infeasible = std::all_of(rows.begin(), rows.end(), [](const ConvergenceRow& r) {
                return r.status == RunStatus::infeasible;
            });
            return all_infeasible ? kInfeasibleAll : kOk;
        }
        if (*sweep) {
            const ScenarioConfig cfg = config_from(config_path);
            const auto rows = run_sweep(cfg, parse_axis(axis), parse_values(values), parse_schemes(schemes),
                                        parse_seeds(seeds), workers);
            write_output(out, [&](std::ostream& os) { write_sweep_csv(os, rows); });
            const bool all_infeasible = std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) {
                return r.status == RunStatus::infeasible;
            });
            return all_infeasible ? kInfeasibleAll : kOk;
        }
        for (const auto& path : inputs) {
            if (!std::ifstream(path)) throw UsageError("cannot open " + path);
        }
        const auto summary = emit_report(inputs);
        write_output(out, [&](std::ostream& os) { os << summary.dump(2) << '\n'; });
        return kOk;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
}
