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

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace risisac {

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

/// Comment lines ('#') are skipped; the first remaining line is the header.
/// Throws std::runtime_error with the 1-based line number on ragged rows.
CsvTable parse_csv(const std::string& text, const std::string& source = "<input>");

class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Summary of convergence and sweep tables written by this tool:
/// per-scheme gaps to the proposed scheme in dB, iteration counts and
/// feasibility rates. An empty list yields an empty object. Throws
/// SchemaError naming the offending column when a header matches neither
/// table layout.
nlohmann::json emit_report(const std::vector<std::string>& csv_paths);
nlohmann::json summarize_tables(const std::vector<std::pair<std::string, CsvTable>>& tables);

}  // namespace risisac
