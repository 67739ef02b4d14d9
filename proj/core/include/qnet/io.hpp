// Copyright 2026 The qnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// JSON interchange and CSV output. Parsers take the document text plus a
// source label used in diagnostics ("file.json:3:14: ..." for syntax errors,
// "file.json: /edges/2: ..." for content errors) and throw InputError.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qnet/cluster.hpp"
#include "qnet/gaussian.hpp"
#include "qnet/resource.hpp"
#include "qnet/secret_sharing.hpp"

namespace qnet::io {

inline constexpr int kSignificantDigits = 12;

// "{:.12g}".
std::string format_number(double value);
// The double nearest to format_number(value).
double round_significant(double value);

std::string read_text_file(const std::filesystem::path& path);

// {"dim": n, "re": [[...]], "im": [[...]]}
ModeUnitary parse_unitary(std::string_view text, std::string_view source = "<input>");
std::string unitary_to_json(const ModeUnitary& u);

// {"dim": n, "data": [[...]]}
Matrix parse_matrix(std::string_view text, std::string_view source = "<input>");
std::string matrix_to_json(const Matrix& m);

// {"profile_db": [...], "u_sqz": <unitary or "default">, "loss": [...] or scalar,
//  "dark_noise": scalar}. Only profile_db is required.
resource::ResourceSpec parse_resource_spec(std::string_view text, std::string_view source = "<input>");
std::string resource_spec_to_json(const resource::ResourceSpec& spec);

// {"n": n, "edges": [[i, j, weight], ...]}; weight may be omitted.
cluster::Graph parse_graph(std::string_view text, std::string_view source = "<input>");
std::string graph_to_json(const cluster::Graph& graph);

// {"seed", "lambda", "max_evals", "restarts"}; missing keys keep defaults.
cluster::OptimizerConfig parse_optimizer_config(std::string_view text, std::string_view source = "<input>");

// Unitary JSON plus optional "dealer_index" and "secret": {"vx", "vp"}.
sharing::SharingNetwork parse_sharing_network(std::string_view text, std::string_view source = "<input>");
std::string sharing_network_to_json(const sharing::SharingNetwork& net);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  // Throws std::logic_error when the row width differs from the header.
  void add_row(std::vector<std::string> cells);
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct OutputFile {
  std::string name;
  std::string content;
};

// Creates `dir` and writes every file. Callers build the full list first so
// that a failed computation leaves nothing behind.
void write_outputs(const std::filesystem::path& dir, const std::vector<OutputFile>& files);

}  // namespace qnet::io
