//
// gcnx - Copyright 2026 The gcnx Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <filesystem>
#include <fstream>
#include <set>

#include <gtest/gtest.h>

#include "gcnx/canonical.h"
#include "gcnx/datasets.h"
#include "gcnx/error.h"

namespace gcnx {
namespace {

namespace fs = std::filesystem;

class CsvFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("gcnx_ds_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path write(const std::string &name, const std::string &text) {
    fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
  }
  fs::path dir_;
};

TEST_F(CsvFixture, BadSmilesRowIsSkipped) {
  fs::path p = write("three.csv", "smiles,label\nCCO,1\nC1CC,0\nc1ccccc1,0\n");
  LabeledSet s = load_csv(p, {});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.skipped, 1);
  EXPECT_EQ(s.entries[0].id, "row-1");
  EXPECT_EQ(s.entries[1].id, "row-3");
  EXPECT_EQ(s.count_label(1), 1);
  EXPECT_EQ(s.count_label(0), 1);
  EXPECT_EQ(s.provenance, p.string());
}

TEST_F(CsvFixture, DuplicateIdsAreAnError) {
  fs::path p = write("dup.csv", "name,smiles,label\na,CC,1\nb,CO,0\na,CN,1\n");
  CsvOptions opt;
  opt.id_column = "name";
  EXPECT_THROW(load_csv(p, opt), DataError);
}

TEST_F(CsvFixture, ColumnSelectionQuotesAndBlanks) {
  fs::path p = write("tox.csv",
                     "\xEF\xBB\xBFNR-AR,NR-ER,smiles,mol_id\n"
                     "0,1,\"CC(=O)O\",m1\n"
                     "1,,CCN,m2\n"
                     "0,0,\"C,C\",m3\n"
                     "1,0,CCCl,m4\r\n");
  CsvOptions opt;
  opt.label_column = "NR-ER";
  opt.id_column = "mol_id";
  LabeledSet s = load_csv(p, opt);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.dropped_blank, 1);
  EXPECT_EQ(s.skipped, 1);
  EXPECT_EQ(s.entries[0].id, "m1");
  EXPECT_EQ(s.entries[0].label, 1);
  EXPECT_EQ(s.entries[1].id, "m4");
}

TEST_F(CsvFixture, StructuralErrors) {
  EXPECT_THROW(load_csv(dir_ / "missing.csv", {}), DataError);
  EXPECT_THROW(load_csv(write("empty.csv", ""), {}), DataError);
  EXPECT_THROW(load_csv(write("nocol.csv", "smi,label\nCC,1\n"), {}), DataError);
}

TEST(SplitCsvLine, Quoting) {
  EXPECT_EQ(split_csv_line("a,\"b,c\",\"d\"\"e\","),
            (std::vector<std::string>{"a", "b,c", "d\"e", ""}));
}

TEST(SynthMotifSet, BalancedAndMotifBearing) {
  LabeledSet s = synth_motif_set(100, "NO", 1);
  ASSERT_EQ(s.size(), 100u);
  EXPECT_EQ(s.count_label(1), 50);
  const SubstructureGraph motif = SubstructureGraph::from_molecule(parse_smiles("NO"));
  std::set<std::string> ids;
  for (const auto &e : s.entries) {
    ids.insert(e.id);
    const bool has = contains_subgraph(SubstructureGraph::from_molecule(e.molecule), motif);
    EXPECT_EQ(has, e.label == 1) << write_smiles(e.molecule);
    EXPECT_GE(e.molecule.n_atoms(), 6);
  }
  EXPECT_EQ(ids.size(), 100u);
}

TEST(SynthMotifSet, LargerMotifAndContainment) {
  LabeledSet s = synth_motif_set(60, "C(=O)N", 4);
  const SubstructureGraph motif = SubstructureGraph::from_molecule(parse_smiles("C(=O)N"));
  for (const auto &e : s.entries)
    if (e.label == 1)
      EXPECT_TRUE(contains_subgraph(SubstructureGraph::from_molecule(e.molecule), motif));
}

TEST(SynthMotifSet, DeterministicPerSeed) {
  LabeledSet a = synth_motif_set(50, "NO", 9), b = synth_motif_set(50, "NO", 9);
  LabeledSet c = synth_motif_set(50, "NO", 10);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.entries[i].molecule.bonds, b.entries[i].molecule.bonds);
    EXPECT_EQ(write_smiles(a.entries[i].molecule), write_smiles(b.entries[i].molecule));
    any_diff |= write_smiles(a.entries[i].molecule) != write_smiles(c.entries[i].molecule);
  }
  EXPECT_TRUE(any_diff);
}

TEST(SynthMotifSet, ParseStable) {
  LabeledSet s = synth_motif_set(80, "NO", 2);
  for (const auto &e : s.entries) {
    Molecule back = parse_smiles(write_smiles(e.molecule));
    EXPECT_EQ(canonical_key(SubstructureGraph::from_molecule(back)),
              canonical_key(SubstructureGraph::from_molecule(e.molecule)));
  }
}

TEST(SynthMotifSet, RejectsLargeMotif) {
  EXPECT_THROW(synth_motif_set(10, "CCCCCCC", 1), ConfigError);
}

std::multiset<std::string> ids_of(const LabeledSet &s) {
  std::multiset<std::string> out;
  for (const auto &e : s.entries) out.insert(e.id);
  return out;
}

TEST(Split, SizesPartitionAndSeed) {
  LabeledSet s = synth_motif_set(100, "NO", 3);
  auto parts = split(s, SplitSpec{{0.8, 0.1, 0.1}, 5, false});
  EXPECT_EQ(parts[0].size(), 80u);
  EXPECT_EQ(parts[1].size(), 10u);
  EXPECT_EQ(parts[2].size(), 10u);
  std::multiset<std::string> all;
  for (const auto &p : parts) {
    auto ids = ids_of(p);
    all.insert(ids.begin(), ids.end());
  }
  EXPECT_EQ(all, ids_of(s));
  auto again = split(s, SplitSpec{{0.8, 0.1, 0.1}, 5, false});
  for (int k = 0; k < 3; ++k) EXPECT_EQ(ids_of(again[k]), ids_of(parts[k]));
  auto other = split(s, SplitSpec{{0.8, 0.1, 0.1}, 6, false});
  EXPECT_NE(ids_of(other[0]), ids_of(parts[0]));
}

TEST(Split, StratifiedPreservesRatio) {
  LabeledSet s = synth_motif_set(100, "NO", 3);
  // Relabel to a 90/10 imbalance.
  for (std::size_t i = 0; i < s.size(); ++i) s.entries[i].label = i < 10 ? 1 : 0;
  auto parts = split(s, SplitSpec{{0.8, 0.1, 0.1}, 7, true});
  const double ratios[3] = {0.8, 0.1, 0.1};
  for (int k = 0; k < 3; ++k) {
    EXPECT_LE(std::abs(parts[k].count_label(1) - 10 * ratios[k]), 1.0);
    EXPECT_LE(std::abs(parts[k].count_label(0) - 90 * ratios[k]), 1.0);
  }
}

TEST(Split, TooSmallIsAnError) {
  LabeledSet s = synth_motif_set(9, "NO", 3);
  EXPECT_THROW(split(s, SplitSpec{}), DataError);
  EXPECT_THROW(split(synth_motif_set(20, "NO", 3), SplitSpec{{0.5, 0.1, 0.1}, 0, false}),
               DataError);
}

TEST(ToLabeledGraphs, Featurizes) {
  LabeledSet s = synth_motif_set(10, "NO", 3);
  auto graphs = to_labeled_graphs(s, FeaturizationScheme{});
  ASSERT_EQ(graphs.size(), 10u);
  EXPECT_EQ(graphs[0].graph.feature_width(), 23);
  EXPECT_EQ(graphs[0].label, s.entries[0].label);
}

}  // namespace
}  // namespace gcnx
