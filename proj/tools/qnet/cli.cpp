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

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <variant>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "qnet/cluster.hpp"
#include "qnet/homodyne.hpp"
#include "qnet/io.hpp"
#include "qnet/resource.hpp"
#include "qnet/secret_sharing.hpp"

namespace qnet::cli {

namespace {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Tables written as CSV or as a JSON array of row objects.

using Cell = std::variant<std::string, long long, double>;

class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}
  void add(std::vector<Cell> row) { rows_.push_back(std::move(row)); }

  std::string render(const std::string& format) const {
    if (format == "json") {
      Json rows = Json::array();
      for (const auto& row : rows_) {
        Json obj = Json::object();
        for (std::size_t c = 0; c < columns_.size(); ++c) {
          std::visit(
              [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, double>) {
                  obj[columns_[c]] = io::round_significant(v);
                } else {
                  obj[columns_[c]] = v;
                }
              },
              row[c]);
        }
        rows.push_back(std::move(obj));
      }
      return rows.dump(2) + "\n";
    }
    io::CsvTable csv(columns_);
    for (const auto& row : rows_) {
      std::vector<std::string> cells;
      for (const Cell& cell : row) {
        cells.push_back(std::visit(
            [](const auto& v) -> std::string {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, double>) {
                return io::format_number(v);
              } else if constexpr (std::is_same_v<T, long long>) {
                return std::to_string(v);
              } else {
                return v;
              }
            },
            cell));
      }
      csv.add_row(std::move(cells));
    }
    return csv.str();
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

double rounded(double v) { return io::round_significant(v); }

// ---------------------------------------------------------------------------
// Options

struct Common {
  std::string input;
  std::string profile = "builtin";
  std::string out_dir;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  std::optional<double> loss;
  std::optional<double> leading_db;
  int threads = 1;
};

struct ClusterOptions {
  std::string graph = "diagonal_square";
  int nodes = 4;
  std::string optimizer;
  std::string objective = "linear";
  std::optional<int> max_evals;
  bool no_optimize = false;
  bool sweep = false;
  int sweep_points = homodyne::kDefaultSweepPoints;
};

struct SecretOptions {
  std::string mode = "run";
  int grid_points = 31;
  double grid_end = -15.0;
};

// Everything a command produces; nothing touches the disk until the command
// has finished computing.
struct Outcome {
  std::vector<io::OutputFile> files;
  Json options = Json::object();
  std::vector<std::string> inputs;
  std::optional<std::uint64_t> seed;
};

void record_common(Outcome& o, const Common& c, bool uses_input) {
  if (uses_input && !c.input.empty()) {
    o.options["input"] = c.input;
    o.inputs.push_back(c.input);
  }
  o.options["profile"] = c.profile;
  if (c.profile != "builtin" && c.profile != "vacuum") o.inputs.push_back(c.profile);
  o.options["format"] = c.format;
  if (c.seed) o.options["seed"] = std::to_string(*c.seed);
  if (c.loss) o.options["loss"] = io::format_number(*c.loss);
  if (c.leading_db) o.options["leading-db"] = io::format_number(*c.leading_db);
}

std::string table_name(const std::string& base, const std::string& format) {
  return base + (format == "json" ? ".json" : ".csv");
}

// "builtin", "vacuum" or a resource-spec file. `builtin_loss` applies to the
// builtin profiles when --loss is absent.
resource::ResourceSpec resolve_resource(const Common& c, const std::string& source, double builtin_loss) {
  const bool builtin = source == "builtin" || source == "vacuum";
  resource::ResourceSpec spec =
      builtin ? resource::make_resource(source == "builtin" ? resource::paper_profile()
                                                          : SqueezingProfile::uniform(resource::kPaperModes, 1.0),
                                        c.loss.value_or(builtin_loss))
              : io::parse_resource_spec(io::read_text_file(source), source);
  if (!builtin && c.loss) spec.loss.assign(static_cast<std::size_t>(spec.modes()), *c.loss);
  if (c.leading_db) spec.profile = resource::rescale_profile(spec.profile, *c.leading_db);
  spec.validate();
  return spec;
}

double uniform_loss(const resource::ResourceSpec& spec) {
  const auto [lo, hi] = std::minmax_element(spec.loss.begin(), spec.loss.end());
  if (*hi - *lo > 1e-12) throw InputError("secret sharing needs a uniform loss; the resource spec has per-mode loss");
  return *lo;
}

// Quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Json box_stats(const std::vector<double>& values) {
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  return Json{{"mean", rounded(mean)},
              {"min", rounded(quantile(values, 0.0))},
              {"q1", rounded(quantile(values, 0.25))},
              {"median", rounded(quantile(values, 0.5))},
              {"q3", rounded(quantile(values, 0.75))},
              {"max", rounded(quantile(values, 1.0))}};
}

// ---------------------------------------------------------------------------
// resource

Outcome cmd_resource(const Common& c) {
  Outcome o;
  record_common(o, c, true);
  const resource::ResourceSpec spec = resolve_resource(c, c.input.empty() ? c.profile : c.input, 0.0);
  const CovarianceMatrix v = resource::build_pixel_covariance(spec);
  const homodyne::CovarianceBlocks blocks = homodyne::pixel_covariance_blocks(v, true);
  const EigenmodeDecomposition modes = eigenmode_extract(v);

  Table table({"mode", "variance", "variance_db"});
  const std::vector<double> db = modes.profile.db();
  for (int k = 0; k < modes.profile.size(); ++k) {
    table.add({static_cast<long long>(k), modes.profile[static_cast<std::size_t>(k)], db[static_cast<std::size_t>(k)]});
  }
  const Json report{{"modes", spec.modes()},
                    {"squeezed_modes", modes.profile.squeezed_count()},
                    {"leading_db", rounded(db.front())},
                    {"eigenmode_residual", rounded(modes.residual)},
                    {"uncertainty_margin", rounded(v.uncertainty_margin())}};

  o.files = {{"resource_spec.json", io::resource_spec_to_json(spec)},
             {"covariance.json", io::matrix_to_json(v.data())},
             {"amplitude_block.json", io::matrix_to_json(blocks.amplitude)},
             {"phase_block.json", io::matrix_to_json(blocks.phase)},
             {table_name("eigenmodes", c.format), table.render(c.format)},
             {"eigenbasis.json", io::unitary_to_json(modes.basis)},
             {"report.json", dump(report)}};
  return o;
}

// ---------------------------------------------------------------------------
// cluster

Outcome cmd_cluster(const Common& c, const ClusterOptions& k) {
  Outcome o;
  record_common(o, c, true);
  cluster::Graph graph = c.input.empty() ? cluster::builtin_graph(k.graph, k.nodes)
                                         : io::parse_graph(io::read_text_file(c.input), c.input);
  if (c.input.empty()) {
    o.options["graph"] = k.graph;
    o.options["nodes"] = std::to_string(k.nodes);
  }
  o.options["objective"] = k.objective;
  if (k.no_optimize) o.options["no-optimize"] = true;
  if (k.sweep) {
    o.options["sweep"] = true;
    o.options["sweep-points"] = std::to_string(k.sweep_points);
  }

  // Detection loss is part of the measured network for the builtin profiles.
  const resource::ResourceSpec spec = resolve_resource(c, c.profile, resource::kPaperDetectionLoss);
  const int n = graph.size();
  if (spec.modes() < n) {
    throw InputError(fmt::format("graph has {} nodes but the resource has only {} modes", n, spec.modes()));
  }

  cluster::OptimizerConfig config;
  if (!k.optimizer.empty()) {
    config = io::parse_optimizer_config(io::read_text_file(k.optimizer), k.optimizer);
    o.options["optimizer"] = k.optimizer;
    o.inputs.push_back(k.optimizer);
  }
  if (c.seed) config.seed = *c.seed;
  if (k.max_evals) {
    config.max_evals = *k.max_evals;
    o.options["max-evals"] = std::to_string(*k.max_evals);
  }
  config.objective = k.objective == "db" ? cluster::Objective::kDbMean : cluster::Objective::kLinearMean;
  config.threads = c.threads;
  config.validate();
  o.seed = config.seed;

  // The optimizer works on the loss-corrected profile; uniform loss maps the
  // linear objective affinely, so the optimum is the same.
  std::optional<cluster::OptimizationResult> result;
  cluster::OrthogonalFreedom orthogonal = cluster::OrthogonalFreedom::identity(n);
  if (!k.no_optimize && n >= 2) {
    result = cluster::optimize_orthogonal(graph, spec.profile, config);
    orthogonal = result->best;
  }
  const ModeUnitary u_net = orthogonal.apply_to(cluster::cluster_unitary(graph));

  const CovarianceMatrix v_pix = resource::build_pixel_covariance(spec);
  const ModeUnitary u_lo = homodyne::network_lo_unitary(u_net, spec);
  const Vector reference = graph.vacuum_references();

  Table nullifiers({"node", "variance", "variance_db", "vacuum_reference"});
  Table normalized({"node", "lo_variance", "operator_scale"});
  std::vector<double> relative_db;
  std::vector<io::OutputFile> sweeps;
  const std::vector<double> thetas = k.sweep ? homodyne::theta_grid(k.sweep_points) : std::vector<double>{};
  for (int node = 0; node < n; ++node) {
    const cluster::NullifierLO lo = cluster::nullifier_lo(graph, u_lo, node);
    const double measured = homodyne::measure_variance(v_pix, lo.lo);
    const double variance = lo.operator_scale * measured;
    normalized.add({static_cast<long long>(node), measured, lo.operator_scale});
    const double db = variance_to_db(variance / reference(node));
    relative_db.push_back(db);
    nullifiers.add({static_cast<long long>(node), variance, db, reference(node)});
    if (k.sweep) {
      Table sweep({"theta", "variance"});
      for (const auto& p : homodyne::phase_sweep(v_pix, lo.lo, thetas, c.threads)) sweep.add({p.theta, p.variance});
      sweeps.push_back({table_name(fmt::format("sweep_node{}", node), c.format), sweep.render(c.format)});
    }
  }

  Table history({"run", "evaluations", "best_objective", "step"});
  if (result) {
    for (const auto& h : result->history) {
      history.add({static_cast<long long>(h.run), static_cast<long long>(h.evaluations), h.best_objective, h.step});
    }
  }
  Json summary{{"graph", graph.name()},
               {"nodes", n},
               {"objective", k.objective},
               {"objective_value", rounded(cluster::cluster_objective(graph, spec.profile, orthogonal.matrix(),
                                                                      config.objective))},
               {"baseline", rounded(cluster::cluster_objective(graph, spec.profile, Matrix::Identity(n, n),
                                                               config.objective))},
               {"evaluations", result ? result->evaluations : 0},
               {"relative_db", box_stats(relative_db)},
               {"below_shot_noise", std::all_of(relative_db.begin(), relative_db.end(), [](double d) { return d < 0.0; })}};

  o.files = {{table_name("nullifiers", c.format), nullifiers.render(c.format)},
             {table_name("nullifiers_lo", c.format), normalized.render(c.format)},
             {"orthogonal.json", io::matrix_to_json(orthogonal.matrix())},
             {"network_unitary.json", io::unitary_to_json(u_net)},
             {"graph.json", io::graph_to_json(graph)},
             {table_name("history", c.format), history.render(c.format)},
             {"summary.json", dump(summary)}};
  o.files.insert(o.files.end(), sweeps.begin(), sweeps.end());
  return o;
}

// ---------------------------------------------------------------------------
// secret

Json reconstruction_json(const sharing::QuadratureReconstruction& q) {
  auto vec = [](const Vector& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(rounded(v(i)));
    return a;
  };
  return Json{{"player_x", vec(q.player_x)},
              {"player_p", vec(q.player_p)},
              {"dealer", rounded(q.dealer)},
              {"leakage", vec(q.leakage)},
              {"constraint_residual", rounded(q.constraint_residual)}};
}

Outcome cmd_secret(const Common& c, const SecretOptions& s) {
  Outcome o;
  record_common(o, c, true);
  o.options["mode"] = s.mode;
  const sharing::SharingNetwork net = c.input.empty()
                                          ? sharing::default_network()
                                          : io::parse_sharing_network(io::read_text_file(c.input), c.input);
  const resource::ResourceSpec spec = resolve_resource(c, c.profile, 0.0);
  const double loss = uniform_loss(spec);
  if (spec.modes() < net.modes() - 1) {
    throw InputError(fmt::format("network needs {} resource squeezers, the profile has {}", net.modes() - 1,
                                 spec.modes()));
  }

  Json summary{{"mode", s.mode}, {"modes", net.modes()}, {"dealer_index", net.dealer_index}};
  if (s.mode == "run") {
    const auto parties = sharing::protocol_run(net, spec.profile, loss, c.threads);
    Table table({"party", "fidelity_x_var", "fidelity_p_var", "fidelity"});
    Json access = Json::array();
    std::vector<double> f;
    for (const auto& p : parties) {
      table.add({fmt::format("{}", fmt::join(p.party, "-")), p.var_x, p.var_p, p.fidelity});
      f.push_back(p.fidelity);
      const auto sol = sharing::access_party_solve(net, p.party);
      access.push_back(Json{{"party", p.party},
                            {"pivot", sol.pivot},
                            {"x", reconstruction_json(sol.x)},
                            {"p", reconstruction_json(sol.p)}});
    }
    summary["parties"] = parties.size();
    summary["fidelity"] = box_stats(f);
    o.files = {{table_name("fidelities", c.format), table.render(c.format)},
               {"access.json", dump(access)}};
  } else {
    o.options["grid-points"] = std::to_string(s.grid_points);
    o.options["grid-end"] = io::format_number(s.grid_end);
    const std::vector<double> grid = sharing::default_sweep_grid(s.grid_points, s.grid_end);
    const auto rows = sharing::sweep_fidelity(net, spec.profile, grid, loss, c.threads);
    Table table({"leading_db", "f_min", "f_avg", "f_max"});
    for (const auto& r : rows) table.add({r.leading_db, r.f_min, r.f_avg, r.f_max});
    summary["points"] = rows.size();
    summary["last"] = Json{{"leading_db", rounded(rows.back().leading_db)},
                           {"f_min", rounded(rows.back().f_min)},
                           {"f_avg", rounded(rows.back().f_avg)},
                           {"f_max", rounded(rows.back().f_max)}};
    o.files = {{table_name("sweep", c.format), table.render(c.format)}};
  }
  o.files.push_back({"network.json", io::sharing_network_to_json(net)});
  o.files.push_back({"summary.json", dump(summary)});
  return o;
}

// ---------------------------------------------------------------------------
// Driver

void add_common(CLI::App& app, Common& c) {
  app.add_option("--input", c.input, "Input file (resource spec, graph or sharing network JSON)");
  app.add_option("--profile", c.profile, "Squeezing resource: builtin, vacuum or a resource-spec JSON file")
      ->capture_default_str();
  app.add_option("--out-dir", c.out_dir, "Output directory")->required();
  app.add_option("--seed", c.seed, "Random seed");
  app.add_option("--loss", c.loss, "Uniform loss in [0, 1]");
  app.add_option("--leading-db", c.leading_db, "Rescale the profile so its most squeezed mode sits at this dB value");
  app.add_option("--format", c.format, "Table format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--threads", c.threads, "Worker threads (0 = all cores); never changes results")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

std::vector<std::string> replay_args(const std::string& program, const std::string& manifest_path,
                                     const std::string& out_dir, int threads) {
  const std::string text = io::read_text_file(manifest_path);
  Json manifest;
  try {
    manifest = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(fmt::format("{}: {}", manifest_path, e.what()));
  }
  if (!manifest.is_object() || manifest.value("format_version", 0) != kManifestVersion ||
      !manifest.contains("command") || !manifest.contains("options") || !manifest["options"].is_object()) {
    throw InputError(fmt::format("{}: not a version {} run manifest", manifest_path, kManifestVersion));
  }
  std::vector<std::string> args{program, manifest["command"].get<std::string>()};
  for (const auto& [key, value] : manifest["options"].items()) {
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back("--" + key);
    } else if (value.is_string()) {
      args.push_back("--" + key);
      args.push_back(value.get<std::string>());
    } else {
      throw InputError(fmt::format("{}: option '{}' has an unexpected type", manifest_path, key));
    }
  }
  args.push_back("--out-dir");
  args.push_back(out_dir.empty() ? manifest.value("out_dir", std::string(".")) : out_dir);
  args.push_back("--threads");
  args.push_back(std::to_string(threads));
  return args;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"qnet: multimode squeezed resources, cluster networks and secret sharing"};
  app.require_subcommand(1);

  Common common;
  ClusterOptions cluster_opts;
  SecretOptions secret_opts;

  CLI::App* resource_cmd = app.add_subcommand("resource", "Pixel covariance and eigenmode report");
  add_common(*resource_cmd, common);

  CLI::App* cluster_cmd = app.add_subcommand("cluster", "Build, optimize and measure a cluster network");
  add_common(*cluster_cmd, common);
  cluster_cmd->add_option("--graph", cluster_opts.graph, "Builtin graph name")->capture_default_str();
  cluster_cmd->add_option("--nodes", cluster_opts.nodes, "Node count for the builtin graph")->capture_default_str();
  cluster_cmd->add_option("--optimizer", cluster_opts.optimizer, "Optimizer config JSON");
  cluster_cmd->add_option("--objective", cluster_opts.objective, "Mean of linear or dB nullifier variances")
      ->check(CLI::IsMember({"linear", "db"}))
      ->capture_default_str();
  cluster_cmd->add_option("--max-evals", cluster_opts.max_evals, "Total objective evaluations");
  cluster_cmd->add_flag("--no-optimize", cluster_opts.no_optimize, "Keep O = I");
  cluster_cmd->add_flag("--sweep", cluster_opts.sweep, "Write an LO phase sweep for every nullifier");
  cluster_cmd->add_option("--sweep-points", cluster_opts.sweep_points, "Phase grid size")
      ->check(CLI::Range(2, 100000))
      ->capture_default_str();

  CLI::App* secret_cmd = app.add_subcommand("secret", "Secret-sharing fidelities");
  add_common(*secret_cmd, common);
  secret_cmd->add_option("--mode", secret_opts.mode, "Single run or squeezing sweep")
      ->check(CLI::IsMember({"run", "sweep"}))
      ->capture_default_str();
  secret_cmd->add_option("--grid-points", secret_opts.grid_points, "Sweep grid size")
      ->check(CLI::Range(2, 100000))
      ->capture_default_str();
  secret_cmd->add_option("--grid-end", secret_opts.grid_end, "Last sweep level in dB")->capture_default_str();

  std::string manifest_path;
  std::string replay_out;
  int replay_threads = 1;
  CLI::App* replay_cmd = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay_cmd->add_option("manifest", manifest_path, "manifest.json of an earlier run")->required();
  replay_cmd->add_option("--out-dir", replay_out, "Output directory (default: the recorded one)");
  replay_cmd->add_option("--threads", replay_threads, "Worker threads")->check(CLI::NonNegativeNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInput;
  }

  try {
    if (replay_cmd->parsed()) {
      return run(replay_args(args.front(), manifest_path, replay_out, replay_threads), out, err);
    }
    Outcome outcome;
    std::string command;
    if (resource_cmd->parsed()) {
      command = "resource";
      outcome = cmd_resource(common);
    } else if (cluster_cmd->parsed()) {
      command = "cluster";
      outcome = cmd_cluster(common, cluster_opts);
    } else {
      command = "secret";
      outcome = cmd_secret(common, secret_opts);
    }

    Json outputs = Json::array();
    for (const auto& f : outcome.files) outputs.push_back(f.name);
    Json manifest{{"format_version", kManifestVersion},
                  {"command", command},
                  {"options", outcome.options},
                  {"inputs", outcome.inputs},
                  {"seed", outcome.seed ? Json(*outcome.seed) : Json(nullptr)},
                  {"out_dir", common.out_dir},
                  {"outputs", outputs}};
    outcome.files.push_back({"manifest.json", dump(manifest)});
    io::write_outputs(common.out_dir, outcome.files);
    out << fmt::format("{}: wrote {} files to {}\n", command, outcome.files.size(), common.out_dir);
    return kExitOk;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const SingularSystem& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::runtime_error& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace qnet::cli
