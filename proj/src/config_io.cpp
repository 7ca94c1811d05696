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

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace risisac {

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& s)
{
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (trim(s.substr(used)).size() != 0)
        throw std::invalid_argument("trailing characters in number '" + s + "'");
    return v;
}

long long parse_int(const std::string& s)
{
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (trim(s.substr(used)).size() != 0)
        throw std::invalid_argument("trailing characters in integer '" + s + "'");
    return v;
}

bool parse_bool(const std::string& s)
{
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw std::invalid_argument("expected boolean, got '" + s + "'");
}

std::vector<double> parse_list(const std::string& s)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_double(trim(item)));
    return out;
}

// Shortest representation that parses back to the same double.
std::string format_double(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_list(const std::vector<double>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += format_double(v[i]);
    }
    return out;
}

struct Field {
    std::function<void(ScenarioConfig&, const std::string&)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

template <typename T>
Field number_field(T ScenarioConfig::*member)
{
    return {[member](ScenarioConfig& c, const std::string& v) {
                if constexpr (std::is_floating_point_v<T>) c.*member = parse_double(v);
                else c.*member = static_cast<T>(parse_int(v));
            },
            [member](const ScenarioConfig& c) {
                if constexpr (std::is_floating_point_v<T>) return format_double(c.*member);
                else return std::to_string(c.*member);
            }};
}

template <typename T>
Field solver_field(T SolverParams::*member)
{
    return {[member](ScenarioConfig& c, const std::string& v) {
                if constexpr (std::is_same_v<T, bool>) c.solver.*member = parse_bool(v);
                else if constexpr (std::is_floating_point_v<T>) c.solver.*member = parse_double(v);
                else c.solver.*member = static_cast<T>(parse_int(v));
            },
            [member](const ScenarioConfig& c) -> std::string {
                if constexpr (std::is_same_v<T, bool>) return c.solver.*member ? "true" : "false";
                else if constexpr (std::is_floating_point_v<T>) return format_double(c.solver.*member);
                else return std::to_string(c.solver.*member);
            }};
}

Field list_field(std::vector<double> ScenarioConfig::*member)
{
    return {[member](ScenarioConfig& c, const std::string& v) { c.*member = parse_list(v); },
            [member](const ScenarioConfig& c) { return format_list(c.*member); }};
}

// std::map keeps the serialization order canonical.
const std::map<std::string, Field>& fields()
{
    static const std::map<std::string, Field> table = {
        {"num_antennas", number_field(&ScenarioConfig::num_antennas)},
        {"num_elements", number_field(&ScenarioConfig::num_elements)},
        {"num_users", number_field(&ScenarioConfig::num_users)},
        {"power", number_field(&ScenarioConfig::power)},
        {"target_azimuths_deg", list_field(&ScenarioConfig::target_azimuths_deg)},
        {"weights", list_field(&ScenarioConfig::weights)},
        {"d_bs_target", number_field(&ScenarioConfig::d_bs_target)},
        {"d_bs_ris", number_field(&ScenarioConfig::d_bs_ris)},
        {"d_ris_user", number_field(&ScenarioConfig::d_ris_user)},
        {"alpha_br", number_field(&ScenarioConfig::alpha_br)},
        {"alpha_rt", number_field(&ScenarioConfig::alpha_rt)},
        {"alpha_ru", number_field(&ScenarioConfig::alpha_ru)},
        {"alpha_bt", number_field(&ScenarioConfig::alpha_bt)},
        {"alpha_bu", number_field(&ScenarioConfig::alpha_bu)},
        {"pl0_db", number_field(&ScenarioConfig::pl0_db)},
        {"beta_ru_db", number_field(&ScenarioConfig::beta_ru_db)},
        {"beta_other_db", number_field(&ScenarioConfig::beta_other_db)},
        {"sigma_r_sq", number_field(&ScenarioConfig::sigma_r_sq)},
        {"sigma_k_sq", number_field(&ScenarioConfig::sigma_k_sq)},
        {"gamma_db", number_field(&ScenarioConfig::gamma_db)},
        {"rng_seed", number_field(&ScenarioConfig::rng_seed)},
        {"rho_init", solver_field(&SolverParams::rho_init)},
        {"shrink", solver_field(&SolverParams::shrink)},
        {"epsilon", solver_field(&SolverParams::epsilon)},
        {"inner_tol", solver_field(&SolverParams::inner_tol)},
        {"max_inner_rounds", solver_field(&SolverParams::max_inner_rounds)},
        {"max_penalty_rounds", solver_field(&SolverParams::max_penalty_rounds)},
        {"reset_penalty", solver_field(&SolverParams::reset_penalty)},
        {"max_outer_iters", solver_field(&SolverParams::max_outer_iters)},
        {"objective_rel_tol", solver_field(&SolverParams::objective_rel_tol)},
        {"convergence_window", solver_field(&SolverParams::convergence_window)},
        {"rcg_max_iters", solver_field(&SolverParams::rcg_max_iters)},
        {"rcg_grad_tol", solver_field(&SolverParams::rcg_grad_tol)},
        {"conic_tol", solver_field(&SolverParams::conic_tol)},
        {"conic_max_iter", solver_field(&SolverParams::conic_max_iter)},
    };
    return table;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text)
{
    ScenarioConfig config;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw.substr(0, raw.find('#'));
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        const std::string where = "config line " + std::to_string(line_no) + ": ";
        if (eq == std::string::npos)
            throw std::invalid_argument(where + "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = fields().find(key);
        if (it == fields().end())
            throw std::invalid_argument(where + "unknown key '" + key + "'");
        try {
            it->second.set(config, value);
        } catch (const std::exception& e) {
            throw std::invalid_argument(where + key + ": " + e.what());
        }
    }
    config.validate();
    return config;
}

ScenarioConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ScenarioConfig& config)
{
    std::string out;
    for (const auto& [key, field] : fields())
        out += key + " = " + field.get(config) + "\n";
    return out;
}

std::string config_hash(const ScenarioConfig& config)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : serialize_config(config)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace risisac
