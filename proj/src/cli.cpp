// Copyright 2026 The Tailor Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailor/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "tailor/error.hpp"
#include "tailor/io.hpp"

namespace tailor::cli {
namespace {

using Json = nlohmann::ordered_json;

std::string read_text(const fs::path& path) {
  const auto bytes = read_file(path);
  return {reinterpret_cast<const char*>(bytes.data()), bytes.size()};
}

std::string format_float(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

const char* to_string(WardVariant v) {
  return v == WardVariant::kClassical ? "classical" : "paper_literal";
}

const char* to_string(UniquenessAggregation a) {
  return a == UniquenessAggregation::kMean ? "mean" : "sum";
}

std::size_t parse_threads(const Json& value) {
  if (value.is_string() && value.get<std::string>() == "auto") return 0;
  if (value.is_number_integer() && value.get<std::int64_t>() >= 1) {
    return value.get<std::size_t>();
  }
  throw ConfigError("threads must be an integer >= 1 or \"auto\"");
}

std::size_t parse_threads(const std::string& text) {
  if (text == "auto") return 0;
  std::size_t value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || value < 1) {
    throw ConfigError("--threads must be an integer >= 1 or \"auto\"");
  }
  return value;
}

void check_config(const SelectionConfig& config) {
  try {
    config.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

// Writes an output file; failures here are the tool's fault, not the input's.
void write_output(const fs::path& path, const std::string& text) {
  try {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_file_atomic(path, text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("cannot write output: ") + e.what());
  }
}

Dataset load_input(const fs::path& container) {
  if (!fs::exists(container)) throw Error(ErrorKind::kIo, "no such file: " + container.string());
  return load_container(container);
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return kExitInternal;
    default: return kExitBadInput;
  }
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "tailor: bad config: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const Error& e) {
    std::cerr << "tailor: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "tailor: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

Json metrics_object(const PrincipleMetrics& m) {
  Json j;
  j["mean_informativeness"] = m.mean_informativeness;
  j["uniqueness_proxy"] = m.uniqueness_proxy;
  j["representativeness_proxy"] = m.representativeness_proxy;
  j["cluster_coverage"] = m.cluster_coverage;
  j["subset_size"] = m.subset_size;
  return j;
}

}  // namespace

SelectionConfig parse_config(const std::string& json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  SelectionConfig config;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "k") {
        config.k = value.get<double>();
      } else if (key == "lambda") {
        config.lambda = value.get<double>();
      } else if (key == "ward_variant") {
        const auto v = value.get<std::string>();
        if (v == "classical") {
          config.ward_variant = WardVariant::kClassical;
        } else if (v == "paper_literal") {
          config.ward_variant = WardVariant::kPaperLiteral;
        } else {
          throw ConfigError("ward_variant must be \"classical\" or \"paper_literal\"");
        }
      } else if (key == "uniqueness_aggregation") {
        const auto v = value.get<std::string>();
        if (v == "mean") {
          config.uniqueness_aggregation = UniquenessAggregation::kMean;
        } else if (v == "sum") {
          config.uniqueness_aggregation = UniquenessAggregation::kSum;
        } else {
          throw ConfigError("uniqueness_aggregation must be \"mean\" or \"sum\"");
        }
      } else if (key == "threads") {
        config.threads = parse_threads(value);
      } else if (key == "seed") {
        config.seed = value.get<std::uint64_t>();
      } else {
        throw ConfigError("unknown config key \"" + key + "\"");
      }
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("wrong value type: ") + e.what());
  }
  check_config(config);
  return config;
}

SelectionConfig resolve_config(const std::optional<fs::path>& config_path, const Overrides& overrides) {
  SelectionConfig config;
  if (config_path) {
    std::string text;
    try {
      text = read_text(*config_path);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    config = parse_config(text);
  }
  if (overrides.k) config.k = *overrides.k;
  if (overrides.lambda) config.lambda = *overrides.lambda;
  if (overrides.threads) config.threads = *overrides.threads;
  if (overrides.seed) config.seed = *overrides.seed;
  check_config(config);
  return config;
}

SynthSpec parse_synth_spec(const std::string& json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  SynthSpec spec;
  auto reject_unknown = [](const Json& obj, std::initializer_list<const char*> known,
                           const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, value] : obj.items()) {
      bool found = false;
      for (const char* k : known) found = found || key == k;
      if (!found) throw ConfigError("unknown key \"" + key + "\" in " + where);
    }
  };
  try {
    reject_unknown(j, {"tasks"}, "synth spec");
    for (const auto& jt : j.at("tasks")) {
      reject_unknown(jt,
                     {"name", "n_clusters", "samples_per_cluster", "cluster_spread",
                      "duplicate_fraction", "outlier_fraction", "token_rank_profile",
                      "rounds_distribution", "center_scale", "base_scale", "outlier_distance"},
                     "task");
      SynthTask t;
      t.name = jt.at("name").get<std::string>();
      t.n_clusters = jt.value("n_clusters", t.n_clusters);
      t.samples_per_cluster = jt.value("samples_per_cluster", t.samples_per_cluster);
      t.cluster_spread = jt.value("cluster_spread", t.cluster_spread);
      t.duplicate_fraction = jt.value("duplicate_fraction", t.duplicate_fraction);
      t.outlier_fraction = jt.value("outlier_fraction", t.outlier_fraction);
      t.rounds_distribution = jt.value("rounds_distribution", t.rounds_distribution);
      t.center_scale = jt.value("center_scale", t.center_scale);
      t.base_scale = jt.value("base_scale", t.base_scale);
      t.outlier_distance = jt.value("outlier_distance", t.outlier_distance);
      if (jt.contains("token_rank_profile")) {
        const auto& jp = jt.at("token_rank_profile");
        auto& p = t.token_rank_profile;
        if (jp.is_string()) {
          // Shorthand: "rank-1" keeps the defaults but forces rank 1.
          if (jp.get<std::string>() != "rank-1") {
            throw ConfigError("token_rank_profile shorthand must be \"rank-1\"");
          }
          p.min_rank = p.max_rank = 1;
        } else {
          reject_unknown(jp, {"min_tokens", "max_tokens", "dim", "min_rank", "max_rank", "token_scale"},
                         "token_rank_profile");
          p.min_tokens = jp.value("min_tokens", p.min_tokens);
          p.max_tokens = jp.value("max_tokens", p.max_tokens);
          p.dim = jp.value("dim", p.dim);
          p.min_rank = jp.value("min_rank", p.min_rank);
          p.max_rank = jp.value("max_rank", p.max_rank);
          p.token_scale = jp.value("token_scale", p.token_scale);
        }
      }
      spec.tasks.push_back(std::move(t));
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad synth spec: ") + e.what());
  }
  try {
    spec.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

std::string scores_csv(const Scoring& scoring, const Dataset& dataset,
                       const std::vector<SampleId>* selected) {
  std::ostringstream os;
  os << "sample_id,task,rounds,cluster_id,v_inf_raw,v_inf,v_uni,v_rep,v_synergy";
  if (selected) os << ",selected";
  os << '\n';
  for (const auto& s : scoring.samples) {
    os << s.id << ',' << csv_field(dataset.tasks[s.task_id]) << ',' << s.rounds << ','
       << s.cluster_id << ',' << format_float(s.v_inf_raw) << ',' << format_float(s.v_inf) << ','
       << format_float(s.v_uni) << ',' << format_float(s.v_rep) << ','
       << format_float(s.v_synergy);
    if (selected) {
      os << ',' << (std::binary_search(selected->begin(), selected->end(), s.id) ? 1 : 0);
    }
    os << '\n';
  }
  return os.str();
}

std::string selection_json(const SelectionResult& result, const Dataset& dataset,
                           const std::optional<PrincipleMetrics>& metrics) {
  Json j;
  auto& c = j["config"];
  c["k"] = result.config.k;
  c["lambda"] = result.config.lambda;
  c["ward_variant"] = to_string(result.config.ward_variant);
  c["uniqueness_aggregation"] = to_string(result.config.uniqueness_aggregation);
  c["seed"] = result.config.seed;
  j["plan"] = Json::array();
  for (const auto& t : result.plan.tasks) {
    Json row;
    row["task"] = dataset.tasks[t.task];
    row["x_p"] = t.difficulty;
    row["size"] = t.size;
    row["k_p"] = t.share;
    row["count"] = t.count;
    j["plan"].push_back(std::move(row));
  }
  j["selected"] = result.selected;
  j["metrics"] = metrics ? metrics_object(*metrics) : Json(nullptr);
  return j.dump(2) + "\n";
}

std::string metrics_json(const PrincipleMetrics& metrics) {
  return metrics_object(metrics).dump(2) + "\n";
}

std::vector<SampleId> parse_subset(const std::string& text) {
  std::vector<SampleId> ids;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string token = line.substr(first, last - first + 1);
    SampleId id = 0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), id);
    if (ec != std::errc() || end != token.data() + token.size()) {
      throw Error(ErrorKind::kInvalidDataset,
                  "subset line " + std::to_string(line_no) + " is not an id: \"" + token + "\"");
    }
    ids.push_back(id);
  }
  return ids;
}

int cmd_select(const fs::path& container, const SelectionConfig& config, const fs::path& out_dir) {
  return guarded([&] {
    check_config(config);
    const Dataset dataset = load_input(container);
    const Scoring scoring = score(dataset, config);
    const SelectionResult result = select(dataset, scoring, config);
    std::optional<PrincipleMetrics> metrics;
    if (!result.selected.empty()) metrics = evaluate_subset(dataset, scoring, result.selected);
    write_output(out_dir / "selection.json", selection_json(result, dataset, metrics));
    write_output(out_dir / "scores.csv", scores_csv(scoring, dataset, &result.selected));
  });
}

int cmd_score(const fs::path& container, const SelectionConfig& config, const fs::path& out_path) {
  return guarded([&] {
    check_config(config);
    const Dataset dataset = load_input(container);
    write_output(out_path, scores_csv(score(dataset, config), dataset, nullptr));
  });
}

int cmd_synth(const fs::path& spec_path, std::uint64_t seed, const fs::path& out_path) {
  return guarded([&] {
    std::string text;
    try {
      text = read_text(spec_path);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    const SynthSpec spec = parse_synth_spec(text);
    const Dataset dataset = generate(spec, seed);
    try {
      if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
      write_container(dataset, out_path);
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("cannot write output: ") + e.what());
    }
  });
}

int cmd_evaluate(const fs::path& container, const fs::path& subset_path,
                 const SelectionConfig& config, const fs::path& out_path) {
  return guarded([&] {
    check_config(config);
    const Dataset dataset = load_input(container);
    if (!fs::exists(subset_path)) {
      throw Error(ErrorKind::kIo, "no such file: " + subset_path.string());
    }
    const auto subset = parse_subset(read_text(subset_path));
    if (subset.empty()) throw Error(ErrorKind::kInvalidDataset, "subset file lists no ids");
    // Reject unknown ids before the expensive scoring pass.
    std::vector<SampleId> known;
    known.reserve(dataset.samples.size());
    for (const auto& s : dataset.samples) known.push_back(s.id);
    std::sort(known.begin(), known.end());
    for (SampleId id : subset) {
      if (!std::binary_search(known.begin(), known.end(), id)) {
        throw Error(ErrorKind::kUnknownId, std::to_string(id));
      }
    }
    const Scoring scoring = score(dataset, config);
    write_output(out_path, metrics_json(evaluate_subset(dataset, scoring, subset)));
  });
}

int run(int argc, char** argv) {
  CLI::App app{"Coreset selection over token-level feature containers"};
  app.require_subcommand(1);

  struct Common {
    std::optional<fs::path> config;
    std::optional<double> k;
    std::optional<double> lambda;
    std::optional<std::string> threads;
  };
  auto add_common = [](CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "JSON config file");
    cmd->add_option("--k", c.k, "global selection proportion in (0, 1]");
    cmd->add_option("--lambda", c.lambda, "dendrogram cut threshold in (0, 1]");
    cmd->add_option("--threads", c.threads, "worker threads or \"auto\"");
  };

  Common select_opts;
  fs::path select_in;
  fs::path select_out;
  auto* select_cmd = app.add_subcommand("select", "score and select a subset");
  select_cmd->add_option("container", select_in, "DTLR container")->required();
  select_cmd->add_option("--out", select_out, "output directory")->required();
  add_common(select_cmd, select_opts);

  Common score_opts;
  fs::path score_in;
  fs::path score_out;
  auto* score_cmd = app.add_subcommand("score", "write per-sample scores");
  score_cmd->add_option("container", score_in, "DTLR container")->required();
  score_cmd->add_option("--out", score_out, "output CSV path")->required();
  add_common(score_cmd, score_opts);

  Common synth_opts;
  fs::path synth_spec;
  fs::path synth_out;
  std::optional<std::uint64_t> synth_seed;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic container");
  synth_cmd->add_option("spec", synth_spec, "JSON synth spec")->required();
  synth_cmd->add_option("--out", synth_out, "output container path")->required();
  synth_cmd->add_option("--seed", synth_seed, "generator seed");
  synth_cmd->add_option("--config", synth_opts.config, "JSON config file (seed)");
  synth_cmd->add_option("--threads", synth_opts.threads, "accepted for symmetry; generation is sequential");

  Common eval_opts;
  fs::path eval_in;
  fs::path eval_subset;
  fs::path eval_out;
  auto* eval_cmd = app.add_subcommand("evaluate", "principle metrics of a subset");
  eval_cmd->add_option("container", eval_in, "DTLR container")->required();
  eval_cmd->add_option("subset", eval_subset, "file with one sample id per line")->required();
  eval_cmd->add_option("--out", eval_out, "output metrics JSON path")->required();
  add_common(eval_cmd, eval_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadConfig;
  }

  auto config_for = [](const Common& c, std::optional<std::uint64_t> seed = std::nullopt) {
    Overrides o{c.k, c.lambda, std::nullopt, seed};
    if (c.threads) o.threads = parse_threads(*c.threads);
    return resolve_config(c.config, o);
  };

  SelectionConfig config;
  const Common& active = select_cmd->parsed() ? select_opts
                         : score_cmd->parsed() ? score_opts
                         : synth_cmd->parsed() ? synth_opts
                                               : eval_opts;
  if (const int rc = guarded([&] { config = config_for(active, synth_seed); }); rc != kExitOk) {
    return rc;
  }

  if (select_cmd->parsed()) return cmd_select(select_in, config, select_out);
  if (score_cmd->parsed()) return cmd_score(score_in, config, score_out);
  if (synth_cmd->parsed()) return cmd_synth(synth_spec, config.seed, synth_out);
  return cmd_evaluate(eval_in, eval_subset, config, eval_out);
}

}  // namespace tailor::cli
