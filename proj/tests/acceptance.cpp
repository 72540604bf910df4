//
// gcnx - Copyright 2026 The gcnx Authors.
// SPDX-License-Identifier: Apache-2.0
//

// Acceptance suite: one PASS/FAIL line per criterion with its measured value
// and the pinned tolerance. Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "gcnx/canonical.h"
#include "gcnx/explain.h"
#include "gcnx/miner.h"
#include "gcnx/pipeline.h"
#include "test_util.h"

namespace fs = std::filesystem;
using namespace gcnx;

namespace {

struct Outcome {
  enum Status { kPass, kFail, kSkip } status;
  std::string detail;
};

Outcome pass_if(bool ok, std::string detail) {
  return {ok ? Outcome::kPass : Outcome::kFail, std::move(detail)};
}

std::string format(const char *fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Instance with every preactivation at least 1e-3 away from the ReLU kink.
struct Instance {
  AttributedGraph graph;
  ModelParams params;
};

Instance smooth_instance(Rng &rng, int n, bool positive) {
  for (;;) {
    Instance in{testing::random_graph(rng, n, 5, positive),
                positive ? testing::random_params(rng, 5, {6, 5, 4}, 2, 0.01, 1.0)
                         : testing::random_params(rng, 5, {6, 5, 4}, 2)};
    if (positive || testing::min_abs_preactivation(forward(in.graph, in.params)) > 1e-3)
      return in;
  }
}

Outcome gradient_correctness() {
  Rng rng(101);
  double worst = 0.0;
  const int kInstances = 60;
  for (int trial = 0; trial < kInstances; ++trial) {
    Instance in = smooth_instance(rng, static_cast<int>(rng.uniform_int(3, 12)), false);
    AttributedGraph &g = in.graph;
    ModelParams &p = in.params;
    const int c = trial % 2;
    ForwardTrace t = forward(g, p);
    Gradients gs = backward(t, g, p, c), gl = backward_loss(t, g, p, c, 0.8);
    auto score = [&] { return forward(g, p).scores(c); };
    auto loss = [&] { return cross_entropy(forward(g, p), c, 0.8); };
    auto check = [&](const Matrix &a, const Matrix &n) {
      worst = std::max(worst, testing::relative_error(a, n));
    };
    for (int l = 0; l < p.n_layers(); ++l) {
      check(gs.layer_weights[l], testing::central_difference(p.layer_weights[l], score));
      check(gl.layer_weights[l], testing::central_difference(p.layer_weights[l], loss));
    }
    check(gs.classifier_weights, testing::central_difference(p.classifier_weights, score));
    check(gl.classifier_weights, testing::central_difference(p.classifier_weights, loss));
    Matrix x = g.node_features();
    check(gs.wrt_input(), testing::central_difference(
                              x, [&] { return forward(g.with_features(x), p).scores(c); }));
    check(gl.wrt_input(), testing::central_difference(x, [&] {
            return cross_entropy(forward(g.with_features(x), p), c, 0.8);
          }));
  }
  return pass_if(worst < 1e-5, format("%d instances, max relative error %.3g (< 1e-5)",
                                      kInstances, worst));
}

Outcome cam_gradcam_equivalence() {
  Rng rng(202);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(1, 15));
    AttributedGraph g = testing::random_graph(rng, n, 5, trial % 2 == 0);
    ModelParams p = testing::random_params(rng, 5, {6, 5, 4}, 2);
    ForwardTrace t = forward(g, p);
    auto [c1, c0] = normalize_pair(cam(t, p, 1), cam(t, p, 0));
    auto [g1, g0] = normalize_pair(grad_cam(t, g, p, 1, 3), grad_cam(t, g, p, 0, 3));
    for (int i = 0; i < n; ++i)
      worst = std::max({worst, std::abs(c1.values[i] - g1.values[i]),
                        std::abs(c0.values[i] - g0.values[i])});
  }
  return pass_if(worst < 1e-10,
                 format("200 instances, max abs difference %.3g (< 1e-10)", worst));
}

Outcome eb_conservation() {
  Rng rng(303);
  double worst = 0.0;
  int degenerate_cases = 0, degenerate_ok = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Instance in = smooth_instance(rng, static_cast<int>(rng.uniform_int(1, 12)), true);
    ForwardTrace t = forward(in.graph, in.params);
    for (int c = 0; c < 2; ++c) {
      // Strictly positive activations need a positive classifier weight to
      // start the pass; rows without one are the degenerate case below.
      in.params.classifier_weights.col(c) = in.params.classifier_weights.col(c).cwiseAbs();
      ExcitationPass pass = excitation_pass(t, in.graph, in.params, c);
      for (const auto &s : pass.stages) worst = std::max(worst, std::abs(s.mass - 1.0));
    }
  }
  // Degenerate denominators: no positive classifier weight, or a layer whose
  // positive weights never meet a positive input.
  for (int trial = 0; trial < 50; ++trial) {
    Instance in = smooth_instance(rng, static_cast<int>(rng.uniform_int(1, 8)), true);
    if (trial % 2 == 0)
      in.params.classifier_weights.col(0).setConstant(-1.0);
    else
      in.params.layer_weights[1] = -in.params.layer_weights[1].cwiseAbs();
    ForwardTrace t = forward(in.graph, in.params);
    ++degenerate_cases;
    try {
      ExcitationPass pass = excitation_pass(t, in.graph, in.params, 0);
      bool zero = true;
      for (double v : pass.node_map) zero &= v == 0.0;
      degenerate_ok += zero && pass.input_probability.minCoeff() >= 0.0;
    } catch (...) {
    }
  }
  return pass_if(worst < 1e-9 && degenerate_ok == degenerate_cases,
                 format("400 passes, max |mass - 1| %.3g (< 1e-9); %d/%d degenerate "
                        "cases transmit zero mass without error",
                        worst, degenerate_ok, degenerate_cases));
}

Outcome permutation_equivariance() {
  Rng rng(404);
  const Method methods[] = {Method::kGradient, Method::kGradCam, Method::kGradCamAvg,
                            Method::kEb, Method::kCeb};
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(2, 14));
    AttributedGraph g = testing::random_graph(rng, n, 5, trial % 2 == 0);
    ModelParams p = testing::random_params(rng, 5, {6, 5, 4}, 2);
    std::vector<int> perm = testing::random_permutation(rng, n);
    AttributedGraph pg = g.permuted(perm);
    ForwardTrace t = forward(g, p), pt = forward(pg, p);
    for (Method m : methods)
      for (int c = 0; c < 2; ++c) {
        Heatmap h = explain(m, t, g, p, c), ph = explain(m, pt, pg, p, c);
        for (int i = 0; i < n; ++i)
          worst = std::max(worst, std::abs(ph.values[i] - h.values[perm[i]]));
      }
  }
  return pass_if(worst <= 1e-12,
                 format("100 pairs x 5 methods x 2 classes, max deviation %.3g (<= 1e-12)",
                        worst));
}

Outcome counting_oracle() {
  Rng rng(505);
  std::vector<Molecule> corpus;
  std::vector<int> labels;
  for (int i = 0; i < 500; ++i) {
    corpus.push_back(testing::random_molecule(rng, static_cast<int>(rng.uniform_int(2, 8))));
    labels.push_back(static_cast<int>(rng.uniform_int(0, 1)));
  }
  // Patterns: connected pieces of corpus molecules, as the miner sees them.
  std::vector<SubstructureGraph> patterns;
  for (int i = 0; i < 500 && patterns.size() < 400; ++i) {
    const Molecule &m = corpus[i];
    std::vector<bool> mask(m.n_atoms());
    for (auto &&b : mask) b = rng.bernoulli(0.7);
    for (const auto &comp : connected_components(m.graph, mask))
      if (comp.size() >= 2) patterns.push_back(SubstructureGraph::induced(m, comp));
  }
  std::vector<std::string> keys;
  for (const auto &p : patterns) keys.push_back(canonical_key(p));

  // Grouping: equal keys exactly when brute force finds an isomorphism.
  long pairs = 0, grouping_errors = 0;
  for (std::size_t a = 0; a < patterns.size(); ++a)
    for (std::size_t b = a + 1; b < patterns.size(); ++b) {
      if (patterns[a].size() != patterns[b].size()) continue;
      ++pairs;
      grouping_errors +=
          (keys[a] == keys[b]) != testing::brute_force_isomorphic(patterns[a], patterns[b]);
    }

  // Containment counts for one representative per key.
  std::map<std::string, std::size_t> reps;
  for (std::size_t i = 0; i < patterns.size(); ++i) reps.emplace(keys[i], i);
  std::vector<SubstructureGraph> targets;
  for (const auto &m : corpus) targets.push_back(SubstructureGraph::from_molecule(m));
  int count_errors = 0, checked = 0;
  for (const auto &[key, idx] : reps) {
    ++checked;
    const CanonicalSubgraph s = make_canonical_subgraph(patterns[idx]);
    OccurrenceCounts expected;
    for (std::size_t i = 0; i < targets.size(); ++i)
      if (testing::brute_force_contains(targets[i], patterns[idx]))
        (labels[i] ? expected.n_pos : expected.n_neg) += 1;
    const OccurrenceCounts got = count_dataset_occurrences(s, corpus, labels);
    count_errors += got.n_pos != expected.n_pos || got.n_neg != expected.n_neg;
  }
  return pass_if(grouping_errors == 0 && count_errors == 0,
                 format("500 molecules; %zu patterns, %ld same-size pairs, %ld grouping "
                        "mismatches; %d substructures counted, %d count mismatches",
                        patterns.size(), pairs, grouping_errors, checked, count_errors));
}

RunConfig synthetic_config(const fs::path &out) {
  RunConfig c;
  c.data = "synth:n=400,motif=NO,seed=7";
  c.seed = 7;
  c.layers = {16, 32, 64};
  c.epochs = 100;
  c.out_dir = out;
  c.checkpoint = out / "checkpoint.json";
  return c;
}

struct EndToEnd {
  TrainSummary train;
  MineSummary mine;
  MetricsSummary metrics;
};

EndToEnd run_end_to_end(const fs::path &out) {
  EndToEnd r;
  RunConfig c = synthetic_config(out);
  c.subcommand = "train";
  r.train = cmd_train(c);
  c.subcommand = "mine";
  c.methods = {Method::kGradCam};
  c.tau = 0.0;
  c.min_occurrence = 10;
  r.mine = cmd_mine(c);
  c.subcommand = "metrics";
  c.methods = default_methods();
  r.metrics = cmd_metrics(c);
  return r;
}

Outcome functional_group_recovery(const EndToEnd &e) {
  const auto &records = e.mine.report.records;
  if (records.empty()) return {Outcome::kFail, "mining returned no substructures"};
  const SubstructureRecord &top = records.front();
  const SubstructureGraph motif = SubstructureGraph::from_molecule(parse_smiles("NO"));
  const bool has_motif = contains_subgraph(top.subgraph.graph, motif);
  return pass_if(e.train.test.accuracy >= 0.95 && has_motif && top.r_p >= 0.9,
                 format("test accuracy %.4f (>= 0.95); rank 1 %s contains motif: %s, "
                        "R_p %.4f (>= 0.9)",
                        e.train.test.accuracy, top.subgraph.rendering.c_str(),
                        has_motif ? "yes" : "no", top.r_p));
}

Outcome metric_directionality(const EndToEnd &e) {
  std::map<std::string, MetricReport> by;
  for (const auto &r : e.metrics.reports) by[r.method] = r;
  const double con_gc = by["gradcam"].contrastivity_mean;
  const double con_g = by["gradient"].contrastivity_mean;
  const double spa_ceb = by["ceb"].sparsity_mean;
  const double spa_gc = by["gradcam"].sparsity_mean;
  return pass_if(con_gc > con_g && spa_ceb > spa_gc,
                 format("contrastivity Grad-CAM %.2f > Gradient %.2f; sparsity c-EB %.2f > "
                        "Grad-CAM %.2f",
                        con_gc, con_g, spa_ceb, spa_gc));
}

Outcome determinism(const fs::path &root) {
  std::vector<std::string> differing;
  std::map<std::string, std::string> first;
  // Both runs share one directory so the configs, which record the
  // checkpoint path, are identical.
  const fs::path out = root / "run";
  for (int run = 0; run < 2; ++run) {
    fs::remove_all(out);
    RunConfig c = synthetic_config(out);
    c.epochs = 20;
    c.subcommand = "train";
    cmd_train(c);
    c.subcommand = "explain";
    c.split = "test";
    cmd_explain(c);
    c.subcommand = "metrics";
    c.split = "all";
    cmd_metrics(c);
    c.subcommand = "mine";
    cmd_mine(c);
    for (const char *f : {"checkpoint.json", "train_log.csv", "heatmaps.jsonl", "metrics.csv",
                          "metrics.json", "mine.csv", "mine.json"}) {
      const std::string bytes = slurp(out / f);
      auto [it, inserted] = first.emplace(f, bytes);
      if (!inserted && (it->second != bytes || bytes.empty())) differing.push_back(f);
    }
  }
  std::string list;
  for (const auto &d : differing) list += " " + d;
  return pass_if(differing.empty(),
                 differing.empty() ? "train, explain, metrics, mine: 7 payload files identical "
                                     "across two runs"
                                   : "differing:" + list);
}

Outcome table_counts() {
  const char *dir = std::getenv("GCNX_DATA_DIR");
  if (!dir) return {Outcome::kSkip, "GCNX_DATA_DIR not set; no public CSVs supplied"};
  struct Expect {
    const char *file, *smiles, *label;
    int pos, neg;
  };
  const Expect expected[] = {{"BBBP.csv", "smiles", "p_np", 1560, 479},
                             {"bace.csv", "mol", "Class", 691, 821},
                             {"tox21.csv", "smiles", "NR-ER", 793, 5399}};
  bool ok = true;
  int found = 0;
  std::string detail;
  for (const Expect &e : expected) {
    const fs::path p = fs::path(dir) / e.file;
    if (!fs::exists(p)) continue;
    ++found;
    CsvOptions opt;
    opt.smiles_column = e.smiles;
    opt.label_column = e.label;
    const LabeledSet s = load_csv(p, opt);
    const int pos = s.count_label(1), neg = s.count_label(0);
    ok &= pos == e.pos && neg == e.neg;
    detail += format("%s %d/%d (expected %d/%d, skipped %d); ", e.file, pos, neg, e.pos, e.neg,
                     s.skipped);
  }
  if (found == 0) return {Outcome::kSkip, std::string("no dataset files in ") + dir};
  return pass_if(ok, detail);
}

}  // namespace

int main() {
  const fs::path root = fs::temp_directory_path() / "gcnx_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);

  struct Criterion {
    int id;
    const char *name;
    double budget_s;  // 0: no runtime bound
    std::function<Outcome()> run;
  };
  std::optional<EndToEnd> e2e;
  auto end_to_end = [&]() -> const EndToEnd & {
    if (!e2e) e2e = run_end_to_end(root / "synthetic");
    return *e2e;
  };

  const std::vector<Criterion> criteria = {
      {1, "gradient correctness", 30.0, gradient_correctness},
      {2, "CAM equals final-layer Grad-CAM", 0.0, cam_gradcam_equivalence},
      {3, "excitation backprop conservation", 0.0, eb_conservation},
      {4, "explainer permutation equivariance", 0.0, permutation_equivariance},
      {5, "subgraph counting oracle", 60.0, counting_oracle},
      {6, "functional-group recovery", 300.0,
       [&] { return functional_group_recovery(end_to_end()); }},
      {7, "metric directionality", 0.0, [&] { return metric_directionality(end_to_end()); }},
      {8, "determinism", 0.0, [&] { return determinism(root / "determinism"); }},
      {9, "dataset class counts", 0.0, table_counts},
  };

  int failures = 0;
  for (const Criterion &c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &ex) {
      o = {Outcome::kFail, std::string("exception: ") + ex.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0.0 && secs > c.budget_s && o.status == Outcome::kPass) {
      o.status = Outcome::kFail;
      o.detail += format(" [runtime %.1fs exceeds %.0fs]", secs, c.budget_s);
    }
    const char *tag = o.status == Outcome::kPass ? "PASS" : o.status == Outcome::kFail ? "FAIL"
                                                                                      : "SKIP";
    failures += o.status == Outcome::kFail;
    std::printf("[%s] criterion %d %s: %s (%.2fs%s)\n", tag, c.id, c.name, o.detail.c_str(),
                secs, c.budget_s > 0.0 ? format(", budget %.0fs", c.budget_s).c_str() : "");
    std::fflush(stdout);
  }
  fs::remove_all(root);
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
