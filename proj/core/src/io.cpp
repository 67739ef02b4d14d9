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

#include "qnet/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace qnet::io {

using nlohmann::json;

namespace {

// Content error at a JSON pointer inside `source`.
[[noreturn]] void fail(std::string_view source, std::string_view where, std::string_view what) {
  throw InputError(fmt::format("{}: {}: {}", source, where.empty() ? "/" : where, what));
}

json parse_document(std::string_view text, std::string_view source) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // e.byte is the 1-based offset of the offending character.
    const std::size_t offset = e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, text.size());
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string message = e.what();
    if (const auto pos = message.find("parse error"); pos != std::string::npos) message = message.substr(pos);
    throw InputError(fmt::format("{}:{}:{}: {}", source, line, column, message));
  }
}

std::string child(std::string_view where, std::string_view key) { return fmt::format("{}/{}", where, key); }
std::string child(std::string_view where, std::size_t index) { return fmt::format("{}/{}", where, index); }

double number(const json& j, std::string_view source, std::string_view where) {
  if (!j.is_number()) fail(source, where, fmt::format("expected a number, got {}", j.type_name()));
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(source, where, "number is not finite");
  return v;
}

long long integer(const json& j, std::string_view source, std::string_view where) {
  if (!j.is_number_integer()) fail(source, where, fmt::format("expected an integer, got {}", j.type_name()));
  return j.get<long long>();
}

const json& require(const json& obj, std::string_view key, std::string_view source, std::string_view where) {
  if (!obj.is_object()) fail(source, where, fmt::format("expected an object, got {}", obj.type_name()));
  const auto it = obj.find(key);
  if (it == obj.end()) fail(source, where, fmt::format("missing key \"{}\"", key));
  return *it;
}

const json* optional(const json& obj, std::string_view key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

int dimension(const json& obj, std::string_view source, std::string_view where) {
  const long long n = integer(require(obj, "dim", source, where), source, child(where, "dim"));
  if (n < 1 || n > 4096) fail(source, child(where, "dim"), fmt::format("dimension {} out of range [1, 4096]", n));
  return static_cast<int>(n);
}

Matrix square_rows(const json& j, int n, std::string_view source, std::string_view where) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(n)) {
    fail(source, where, fmt::format("expected an array of {} rows", n));
  }
  Matrix m(n, n);
  for (int r = 0; r < n; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    const std::string rw = child(where, static_cast<std::size_t>(r));
    if (!row.is_array() || row.size() != static_cast<std::size_t>(n)) {
      fail(source, rw, fmt::format("expected a row of {} numbers", n));
    }
    for (int c = 0; c < n; ++c) m(r, c) = number(row[static_cast<std::size_t>(c)], source, child(rw, static_cast<std::size_t>(c)));
  }
  return m;
}

std::vector<double> number_array(const json& j, std::string_view source, std::string_view where) {
  if (!j.is_array()) fail(source, where, fmt::format("expected an array, got {}", j.type_name()));
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], source, child(where, i)));
  return out;
}

json rows_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(round_significant(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json unitary_json(const ModeUnitary& u) {
  return json{{"dim", u.modes()}, {"re", rows_json(u.real())}, {"im", rows_json(u.imag())}};
}

// Lets the matrix constructors' own InputError carry the location.
template <typename Fn>
auto located(std::string_view source, std::string_view where, Fn&& fn) {
  try {
    return fn();
  } catch (const InputError& e) {
    fail(source, where, e.what());
  }
}

ModeUnitary unitary_from(const json& obj, std::string_view source, std::string_view where) {
  const int n = dimension(obj, source, where);
  const Matrix re = square_rows(require(obj, "re", source, where), n, source, child(where, "re"));
  Matrix im = Matrix::Zero(n, n);
  if (const json* j = optional(obj, "im")) im = square_rows(*j, n, source, child(where, "im"));
  return located(source, where, [&] { return ModeUnitary::from_parts(re, im); });
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string format_number(double value) { return fmt::format("{:.12g}", value); }

double round_significant(double value) {
  if (!std::isfinite(value)) return value;
  return std::stod(format_number(value));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

ModeUnitary parse_unitary(std::string_view text, std::string_view source) {
  return unitary_from(parse_document(text, source), source, "");
}

std::string unitary_to_json(const ModeUnitary& u) { return dump(unitary_json(u)); }

Matrix parse_matrix(std::string_view text, std::string_view source) {
  const json doc = parse_document(text, source);
  const int n = dimension(doc, source, "");
  return square_rows(require(doc, "data", source, ""), n, source, "/data");
}

std::string matrix_to_json(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::logic_error("matrix_to_json expects a square matrix");
  return dump(json{{"dim", m.rows()}, {"data", rows_json(m)}});
}

resource::ResourceSpec parse_resource_spec(std::string_view text, std::string_view source) {
  const json doc = parse_document(text, source);
  const std::vector<double> db = number_array(require(doc, "profile_db", source, ""), source, "/profile_db");
  if (db.empty()) fail(source, "/profile_db", "profile is empty");
  for (std::size_t i = 0; i < db.size(); ++i) {
    if (db[i] > 1e-12) fail(source, child("/profile_db", i), fmt::format("{} dB is above the vacuum level", db[i]));
  }
  const int n = static_cast<int>(db.size());
  resource::ResourceSpec spec{SqueezingProfile::from_db(db), resource::default_usqz(n),
                              std::vector<double>(db.size(), 0.0), 0.0};
  if (const json* u = optional(doc, "u_sqz")) {
    if (u->is_string()) {
      if (*u != "default") fail(source, "/u_sqz", "expected a unitary object or \"default\"");
    } else {
      spec.u_sqz = unitary_from(*u, source, "/u_sqz");
    }
  }
  if (const json* loss = optional(doc, "loss")) {
    if (loss->is_array()) {
      spec.loss = number_array(*loss, source, "/loss");
    } else {
      spec.loss.assign(db.size(), number(*loss, source, "/loss"));
    }
  }
  if (const json* dark = optional(doc, "dark_noise")) spec.dark_noise = number(*dark, source, "/dark_noise");
  located(source, "", [&] {
    spec.validate();
    return 0;
  });
  return spec;
}

std::string resource_spec_to_json(const resource::ResourceSpec& spec) {
  json db = json::array();
  for (double v : spec.profile.db()) db.push_back(round_significant(v));
  json loss = json::array();
  for (double v : spec.loss) loss.push_back(round_significant(v));
  return dump(json{{"profile_db", db},
                   {"u_sqz", unitary_json(spec.u_sqz)},
                   {"loss", loss},
                   {"dark_noise", round_significant(spec.dark_noise)}});
}

cluster::Graph parse_graph(std::string_view text, std::string_view source) {
  const json doc = parse_document(text, source);
  const long long n = integer(require(doc, "n", source, ""), source, "/n");
  if (n < 1 || n > 4096) fail(source, "/n", fmt::format("node count {} out of range [1, 4096]", n));
  const json& edges = require(doc, "edges", source, "");
  if (!edges.is_array()) fail(source, "/edges", "expected an array of edges");
  std::vector<cluster::Edge> list;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const std::string where = child("/edges", e);
    const json& edge = edges[e];
    if (!edge.is_array() || edge.size() < 2 || edge.size() > 3) fail(source, where, "expected [i, j] or [i, j, weight]");
    cluster::Edge out{static_cast<int>(integer(edge[0], source, child(where, 0))),
                      static_cast<int>(integer(edge[1], source, child(where, 1)))};
    if (edge.size() == 3) out.weight = number(edge[2], source, child(where, 2));
    list.push_back(out);
  }
  std::string name = "custom";
  if (const json* j = optional(doc, "name"); j != nullptr && j->is_string()) name = j->get<std::string>();
  return located(source, "/edges", [&] { return cluster::Graph::from_edges(static_cast<int>(n), list, name); });
}

std::string graph_to_json(const cluster::Graph& graph) {
  json edges = json::array();
  for (const auto& e : graph.edges()) edges.push_back(json{e.from, e.to, round_significant(e.weight)});
  return dump(json{{"name", graph.name()}, {"n", graph.size()}, {"edges", edges}});
}

cluster::OptimizerConfig parse_optimizer_config(std::string_view text, std::string_view source) {
  const json doc = parse_document(text, source);
  if (!doc.is_object()) fail(source, "", "expected an object");
  cluster::OptimizerConfig config;
  if (const json* j = optional(doc, "seed")) {
    if (!j->is_number_unsigned() && !(j->is_number_integer() && j->get<long long>() >= 0)) {
      fail(source, "/seed", "expected a non-negative integer");
    }
    config.seed = j->get<std::uint64_t>();
  }
  auto int_field = [&](std::string_view key, int& out) {
    if (const json* j = optional(doc, key)) {
      const long long v = integer(*j, source, child("", key));
      if (v < 0 || v > 1'000'000'000) fail(source, child("", key), fmt::format("value {} out of range", v));
      out = static_cast<int>(v);
    }
  };
  int_field("lambda", config.lambda);
  int_field("max_evals", config.max_evals);
  int_field("restarts", config.restarts);
  located(source, "", [&] {
    config.validate();
    return 0;
  });
  return config;
}

sharing::SharingNetwork parse_sharing_network(std::string_view text, std::string_view source) {
  const json doc = parse_document(text, source);
  sharing::SharingNetwork net{unitary_from(doc, source, ""), 0, {}};
  net.dealer_index = net.modes() - 1;
  if (const json* j = optional(doc, "dealer_index")) {
    net.dealer_index = static_cast<int>(integer(*j, source, "/dealer_index"));
  }
  if (const json* j = optional(doc, "secret")) {
    net.secret.vx = number(require(*j, "vx", source, "/secret"), source, "/secret/vx");
    net.secret.vp = number(require(*j, "vp", source, "/secret"), source, "/secret/vp");
  }
  located(source, "", [&] {
    net.validate();
    return 0;
  });
  return net;
}

std::string sharing_network_to_json(const sharing::SharingNetwork& net) {
  json doc = unitary_json(net.unitary);
  doc["dealer_index"] = net.dealer_index;
  doc["secret"] = json{{"vx", round_significant(net.secret.vx)}, {"vp", round_significant(net.secret.vp)}};
  return dump(doc);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) {
    throw std::logic_error(fmt::format("csv row has {} cells, header has {}", cells.size(), header_.size()));
  }
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  auto line = [](const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out += ',';
      out += cells[i];
    }
    return out + '\n';
  };
  std::string out = line(header_);
  for (const auto& row : rows_) out += line(row);
  return out;
}

void write_outputs(const std::filesystem::path& dir, const std::vector<OutputFile>& files) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
  for (const auto& file : files) {
    const auto path = dir / file.name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
    out << file.content;
  }
}

}  // namespace qnet::io
