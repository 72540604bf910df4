//
// gcnx - Copyright 2026 The gcnx Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "gcnx/pipeline.h"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gcnx/checkpoint.h"
#include "gcnx/parallel.h"
#include "gcnx/render.h"

namespace gcnx {

namespace {

using json = nlohmann::ordered_json;

constexpr const char *kSplitNote =
    "random (optionally stratified) split; scaffold split is not provided";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string opt(const std::optional<double> &v) { return v ? fmt(*v) : "NA"; }

void write_file(const std::filesystem::path &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("failed writing " + path.string());
}

void ensure_dir(const std::filesystem::path &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
}

json provenance(const RunConfig &config, const LabeledSet &data) {
  json p;
  p["tool_version"] = kToolVersion;
  p["config_hash"] = config.hash();
  p["seed"] = config.seed;
  p["config"] = json::parse(config.to_json());
  p["data"] = data.provenance;
  p["rows_skipped"] = data.skipped;
  p["rows_dropped_blank_label"] = data.dropped_blank;
  p["split_note"] = kSplitNote;
  return p;
}

std::vector<std::string> header_lines(const RunConfig &config, const LabeledSet &data) {
  return {std::string("tool_version=") + kToolVersion,
          "config_hash=" + config.hash(),
          "seed=" + std::to_string(config.seed),
          "config=" + config.to_json(),
          "data=" + data.provenance,
          "rows_skipped=" + std::to_string(data.skipped)
              + " rows_dropped_blank_label=" + std::to_string(data.dropped_blank),
          std::string("split=") + kSplitNote};
}

std::uint64_t parse_u64(const std::string &s, const std::string &what) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception &) {
    throw UsageError("invalid " + what + " '" + s + "'");
  }
}

std::string safe_name(const std::string &s) {
  std::string out;
  for (char c : s)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return out;
}

struct Loaded {
  Checkpoint checkpoint;
  LabeledSet data;
  std::vector<LabeledGraph> graphs;
};

Loaded load_for_analysis(const RunConfig &config) {
  if (config.checkpoint.empty()) throw UsageError("--checkpoint is required");
  if (!std::filesystem::exists(config.checkpoint))
    throw UsageError("checkpoint not found: " + config.checkpoint.string());
  Loaded l;
  l.checkpoint = load_checkpoint(config.checkpoint);
  l.data = select_split(load_data(config), config);
  l.graphs = to_labeled_graphs(l.data, l.checkpoint.scheme);
  return l;
}

}  // namespace

void RunConfig::validate() const {
  if (data.empty()) throw UsageError("--data is required");
  if (!(tau >= 0.0 && tau <= 1.0)) throw UsageError("--tau must lie in [0, 1]");
  if (!(fidelity_threshold >= 0.0 && fidelity_threshold <= 1.0))
    throw UsageError("--fidelity-threshold must lie in [0, 1]");
  if (min_occurrence < 0) throw UsageError("--min-occurrence must be nonnegative");
  if (top_k < 0) throw UsageError("--top-k must be nonnegative");
  if (epochs < 0) throw UsageError("--epochs must be nonnegative");
  if (!(lr > 0.0)) throw UsageError("--lr must be positive");
  if (layers.empty()) throw UsageError("--layers needs at least one width");
  for (int w : layers)
    if (w <= 0) throw UsageError("--layers widths must be positive");
  if (split != "all" && split != "train" && split != "validation" && split != "test")
    throw UsageError("--split must be all, train, validation or test");
}

std::string RunConfig::to_json() const {
  json j;
  j["subcommand"] = subcommand;
  j["data"] = data;
  j["smiles_column"] = smiles_column;
  j["task_column"] = task_column;
  j["id_column"] = id_column;
  j["checkpoint"] = checkpoint.string();
  json m = json::array();
  for (Method x : methods) m.push_back(std::string(method_name(x)));
  j["methods"] = m;
  j["tau"] = tau;
  j["fidelity_threshold"] = fidelity_threshold;
  j["min_occurrence"] = min_occurrence;
  j["top_k"] = top_k;
  j["seed"] = seed;
  j["render"] = render;
  j["layers"] = layers;
  j["epochs"] = epochs;
  j["lr"] = lr;
  j["class_weighting"] = class_weighting;
  j["stratified"] = stratified;
  j["split"] = split;
  return j.dump();
}

std::string RunConfig::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : to_json()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

LabeledSet load_data(const RunConfig &config) {
  const std::string prefix = "synth:";
  if (config.data.rfind(prefix, 0) == 0) {
    int n = -1;
    std::string motif;
    std::uint64_t seed = config.seed;
    std::stringstream ss(config.data.substr(prefix.size()));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw UsageError("malformed synthetic spec '" + item + "'");
      const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
      if (key == "n")
        n = static_cast<int>(parse_u64(value, "synthetic size"));
      else if (key == "motif")
        motif = value;
      else if (key == "seed")
        seed = parse_u64(value, "synthetic seed");
      else
        throw UsageError("unknown synthetic spec key '" + key + "'");
    }
    if (n < 0 || motif.empty())
      throw UsageError("synthetic data needs n=<count> and motif=<smiles>");
    try {
      return synth_motif_set(n, motif, seed);
    } catch (const ParseError &e) {
      throw UsageError(std::string("invalid motif: ") + e.what());
    }
  }
  if (!std::filesystem::exists(config.data))
    throw UsageError("input file not found: " + config.data);
  return load_csv(config.data, CsvOptions{config.smiles_column, config.task_column,
                                          config.id_column});
}

std::array<LabeledSet, 3> split_data(const LabeledSet &data, const RunConfig &config) {
  SplitSpec spec;
  spec.seed = config.seed;
  spec.stratified = config.stratified;
  return split(data, spec);
}

LabeledSet select_split(const LabeledSet &data, const RunConfig &config) {
  if (config.split == "all") return data;
  auto parts = split_data(data, config);
  LabeledSet out = config.split == "train"        ? parts[0]
                   : config.split == "validation" ? parts[1]
                                                  : parts[2];
  out.skipped = data.skipped;
  out.dropped_blank = data.dropped_blank;
  return out;
}

TrainSummary cmd_train(const RunConfig &config) {
  config.validate();
  const LabeledSet data = load_data(config);
  const auto parts = split_data(data, config);
  const FeaturizationScheme scheme;
  const auto train_graphs = to_labeled_graphs(parts[0], scheme);
  const auto val_graphs = to_labeled_graphs(parts[1], scheme);
  const auto test_graphs = to_labeled_graphs(parts[2], scheme);

  TrainConfig tc;
  tc.epochs = config.epochs;
  tc.learning_rate = config.lr;
  tc.layer_sizes = config.layers;
  tc.seed = config.seed;
  tc.class_weighting = config.class_weighting;
  TrainResult result = train(train_graphs, tc, val_graphs);

  ensure_dir(config.out_dir);
  TrainSummary s;
  s.best_epoch = result.best_epoch;
  s.train = evaluate(result.params, train_graphs);
  s.validation = evaluate(result.params, val_graphs);
  s.test = evaluate(result.params, test_graphs);

  Checkpoint ck{result.params, scheme, tc, kToolVersion, config.hash()};
  s.checkpoint = config.out_dir / "checkpoint.json";
  save_checkpoint(ck, s.checkpoint);

  std::string log;
  for (const auto &h : header_lines(config, data)) log += "# " + h + "\n";
  log += "# split sizes train=" + std::to_string(parts[0].size()) + " validation="
         + std::to_string(parts[1].size()) + " test=" + std::to_string(parts[2].size())
         + "\n";
  log += "epoch,train_loss,train_accuracy,validation_loss,validation_accuracy\n";
  for (const auto &e : result.log)
    log += std::to_string(e.epoch) + "," + fmt(e.train_loss) + "," + fmt(e.train_accuracy)
           + "," + opt(e.validation_loss) + "," + opt(e.validation_accuracy) + "\n";
  auto line = [](const char *name, const EvalMetrics &m) {
    return std::string("# ") + name + ": accuracy=" + fmt(m.accuracy) + " roc_auc="
           + opt(m.roc_auc) + " pr_auc=" + opt(m.pr_auc) + "\n";
  };
  log += "# best_epoch=" + std::to_string(result.best_epoch) + "\n";
  log += line("train", s.train);
  log += line("validation", s.validation);
  log += line("test", s.test);
  s.log = config.out_dir / "train_log.csv";
  write_file(s.log, log);
  return s;
}

ExplainSummary cmd_explain(const RunConfig &config) {
  config.validate();
  const Loaded l = load_for_analysis(config);
  const ModelParams &params = l.checkpoint.params;
  std::vector<Method> methods = config.methods;
  if (methods.empty())
    methods = {Method::kGradient, Method::kCam, Method::kGradCam, Method::kGradCamAvg,
               Method::kEb, Method::kCeb};

  struct PerMolecule {
    std::vector<std::string> lines;
    std::vector<std::pair<std::string, std::string>> files;
  };
  std::vector<PerMolecule> out(l.graphs.size());
  parallel_for(l.graphs.size(), [&](std::size_t i) {
    const auto &entry = l.data.entries[i];
    const auto &g = l.graphs[i].graph;
    const ForwardTrace t = forward(g, params);
    for (Method m : methods) {
      auto [h1, h0] = normalize_pair(explain(m, t, g, params, 1), explain(m, t, g, params, 0));
      out[i].lines.push_back(heatmap_record(h1, entry.id, entry.molecule.source_string));
      out[i].lines.push_back(heatmap_record(h0, entry.id, entry.molecule.source_string));
      if (config.render) {
        const std::string stem = safe_name(entry.id) + "_" + std::string(method_name(m));
        out[i].files.emplace_back(
            stem + ".svg",
            render_svg(entry.molecule, {h1, h0},
                       entry.id + " " + entry.molecule.source_string, config.seed));
        out[i].files.emplace_back(stem + ".dot", render_dot(entry.molecule, h1));
      }
    }
  });

  ensure_dir(config.out_dir);
  ExplainSummary s;
  std::string body = json{{"provenance", provenance(config, l.data)}}.dump() + "\n";
  for (const auto &pm : out)
    for (const auto &line : pm.lines) {
      body += line + "\n";
      ++s.records;
    }
  s.heatmaps = config.out_dir / "heatmaps.jsonl";
  write_file(s.heatmaps, body);
  if (config.render) {
    const auto dir = config.out_dir / "render";
    ensure_dir(dir);
    for (const auto &pm : out)
      for (const auto &[name, content] : pm.files) {
        write_file(dir / name, content);
        if (name.size() > 4 && name.compare(name.size() - 4, 4, ".svg") == 0)
          s.renderings.push_back(dir / name);
      }
  }
  return s;
}

MetricsSummary cmd_metrics(const RunConfig &config) {
  config.validate();
  const Loaded l = load_for_analysis(config);
  const std::vector<Method> methods =
      config.methods.empty() ? default_methods() : config.methods;
  MetricOptions opts;
  opts.fidelity_threshold = config.fidelity_threshold;
  MetricsSummary s;
  s.reports = metric_suite(l.checkpoint.params, l.graphs, methods, opts);
  ensure_dir(config.out_dir);
  s.csv = config.out_dir / "metrics.csv";
  s.json = config.out_dir / "metrics.json";
  write_file(s.csv, metrics_csv(s.reports, header_lines(config, l.data)));
  write_file(s.json, metrics_json(s.reports, provenance(config, l.data).dump()));
  return s;
}

MineSummary cmd_mine(const RunConfig &config) {
  config.validate();
  const Loaded l = load_for_analysis(config);
  const ModelParams &params = l.checkpoint.params;
  const Method method = config.methods.empty() ? Method::kGradCam : config.methods.front();

  std::vector<Heatmap> heatmaps(l.graphs.size());
  std::vector<int> predictions(l.graphs.size());
  parallel_for(l.graphs.size(), [&](std::size_t i) {
    const auto &g = l.graphs[i].graph;
    const ForwardTrace t = forward(g, params);
    Eigen::Index arg;
    t.probabilities.maxCoeff(&arg);
    predictions[i] = static_cast<int>(arg);
    heatmaps[i] =
        normalize_pair(explain(method, t, g, params, 1), explain(method, t, g, params, 0))
            .first;
  });

  MineOptions opts;
  opts.tau = config.tau;
  opts.min_occurrence = config.min_occurrence;
  opts.top_k = config.top_k;
  MineSummary s;
  s.report = mine(l.data.molecules(), l.data.labels(), predictions, heatmaps, opts);

  std::string csv;
  for (const auto &h : header_lines(config, l.data)) csv += "# " + h + "\n";
  csv += "# method=" + std::string(method_name(method)) + " qualifying_molecules="
         + std::to_string(s.report.qualifying_molecules) + " candidates="
         + std::to_string(s.report.candidate_substructures) + " skipped_components="
         + std::to_string(s.report.skipped_components) + "\n";
  csv += "rank,key,smiles,n_atoms,n_explained,n_pos,n_neg,r_e,r_p\n";
  json rows = json::array();
  int rank = 0;
  for (const auto &r : s.report.records) {
    ++rank;
    csv += std::to_string(rank) + ",\"" + r.subgraph.key + "\"," + r.subgraph.rendering
           + "," + std::to_string(r.subgraph.node_count) + ","
           + std::to_string(r.n_explained) + "," + std::to_string(r.n_pos) + ","
           + std::to_string(r.n_neg) + "," + fmt(r.r_e) + "," + fmt(r.r_p) + "\n";
    json row;
    row["rank"] = rank;
    row["key"] = r.subgraph.key;
    row["smiles"] = r.subgraph.rendering;
    row["n_atoms"] = r.subgraph.node_count;
    row["n_explained"] = r.n_explained;
    row["n_pos"] = r.n_pos;
    row["n_neg"] = r.n_neg;
    row["r_e"] = r.r_e;
    row["r_p"] = r.r_p;
    rows.push_back(row);
  }
  const auto avg = s.report.average_r_p();
  csv += "# average_r_p=" + opt(avg) + "\n";

  json j;
  j["provenance"] = provenance(config, l.data);
  j["method"] = std::string(method_name(method));
  j["qualifying_molecules"] = s.report.qualifying_molecules;
  j["candidate_substructures"] = s.report.candidate_substructures;
  j["skipped_components"] = s.report.skipped_components;
  j["substructures"] = rows;
  j["average_r_p"] = avg ? json(*avg) : json(nullptr);

  ensure_dir(config.out_dir);
  s.csv = config.out_dir / "mine.csv";
  s.json = config.out_dir / "mine.json";
  write_file(s.csv, csv);
  write_file(s.json, j.dump(2) + "\n");
  return s;
}

int run_cli(int argc, char **argv) {
  CLI::App app{"Graph convolutional networks with per-atom explanations and "
               "substructure mining"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string methods, layers, seed_text = "0", out_dir = ".", checkpoint;

  auto add_data = [&](CLI::App *sub) {
    sub->add_option("--data", cfg.data,
                    "CSV file or synth:n=<count>,motif=<smiles>[,seed=<seed>]")
        ->required();
    sub->add_option("--smiles-column", cfg.smiles_column, "SMILES column name");
    sub->add_option("--task-column", cfg.task_column, "binary label column name");
    sub->add_option("--id-column", cfg.id_column, "molecule id column name");
    sub->add_option("--seed", seed_text, "seed for splitting, init and layout");
    sub->add_option("--out-dir", out_dir, "output directory");
    sub->add_flag("!--no-stratify", cfg.stratified, "plain random split");
  };
  auto add_analysis = [&](CLI::App *sub) {
    add_data(sub);
    sub->add_option("--checkpoint", checkpoint, "checkpoint written by train")->required();
    sub->add_option("--methods", methods,
                    "comma-separated: gradient,cam,gradcam,gradcam_avg,eb,ceb,null");
    sub->add_option("--split", cfg.split, "all, train, validation or test");
  };

  CLI::App *train_cmd = app.add_subcommand("train", "train a model and write a checkpoint");
  add_data(train_cmd);
  train_cmd->add_option("--layers", layers, "comma-separated layer widths (default 16,32,64)");
  train_cmd->add_option("--epochs", cfg.epochs, "training epochs");
  train_cmd->add_option("--lr", cfg.lr, "Adam learning rate");
  train_cmd->add_flag("!--no-class-weighting", cfg.class_weighting,
                      "unweighted cross-entropy");

  CLI::App *explain_cmd = app.add_subcommand("explain", "write per-atom heatmaps");
  add_analysis(explain_cmd);
  explain_cmd->add_flag("--render", cfg.render, "also write SVG and DOT depictions");

  CLI::App *metrics_cmd =
      app.add_subcommand("metrics", "fidelity, contrastivity and sparsity per method");
  add_analysis(metrics_cmd);
  metrics_cmd->add_option("--fidelity-threshold", cfg.fidelity_threshold,
                           "occlusion threshold on normalized saliency");

  CLI::App *mine_cmd = app.add_subcommand("mine", "rank salient substructures");
  add_analysis(mine_cmd);
  mine_cmd->add_option("--tau", cfg.tau, "activation threshold");
  mine_cmd->add_option("--min-occurrence", cfg.min_occurrence,
                       "keep substructures occurring more than this often");
  mine_cmd->add_option("--top-k", cfg.top_k, "number of ranked substructures");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    cfg.seed = parse_u64(seed_text, "seed");
    cfg.out_dir = out_dir;
    cfg.checkpoint = checkpoint;
    auto split_list = [](const std::string &s) {
      std::vector<std::string> out;
      std::stringstream ss(s);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
      return out;
    };
    for (const auto &m : split_list(methods)) {
      auto parsed = parse_method(m);
      if (!parsed) throw UsageError("unknown method '" + m + "'");
      cfg.methods.push_back(*parsed);
    }
    if (!layers.empty()) {
      cfg.layers.clear();
      for (const auto &w : split_list(layers))
        cfg.layers.push_back(static_cast<int>(parse_u64(w, "layer width")));
    }

    if (train_cmd->parsed()) {
      cfg.subcommand = "train";
      const TrainSummary s = cmd_train(cfg);
      std::cout << "checkpoint: " << s.checkpoint.string() << "\n"
                << "best epoch: " << s.best_epoch << "\n"
                << "test accuracy: " << fmt(s.test.accuracy)
                << " roc_auc: " << opt(s.test.roc_auc) << "\n";
    } else if (explain_cmd->parsed()) {
      cfg.subcommand = "explain";
      const ExplainSummary s = cmd_explain(cfg);
      std::cout << "heatmaps: " << s.heatmaps.string() << " (" << s.records
                << " records)\n";
      if (cfg.render) std::cout << "renderings: " << s.renderings.size() << "\n";
    } else if (metrics_cmd->parsed()) {
      cfg.subcommand = "metrics";
      const MetricsSummary s = cmd_metrics(cfg);
      std::cout << metrics_csv(s.reports);
    } else if (mine_cmd->parsed()) {
      cfg.subcommand = "mine";
      const MineSummary s = cmd_mine(cfg);
      std::cout << "report: " << s.csv.string() << " (" << s.report.records.size()
                << " substructures)\n";
      for (std::size_t k = 0; k < s.report.records.size(); ++k) {
        const auto &r = s.report.records[k];
        std::cout << k + 1 << ". " << r.subgraph.rendering << "  R_e=" << fmt(r.r_e)
                  << " R_p=" << fmt(r.r_p) << " (N_e=" << r.n_explained
                  << ", N_p=" << r.n_pos << ", N_n=" << r.n_neg << ")\n";
      }
    }
  } catch (const ConfigError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace gcnx
