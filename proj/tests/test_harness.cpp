#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "distclust/errors.hpp"
#include "distclust/harness.hpp"

using namespace distclust;

namespace {

std::string temp_file(const std::string& name, const std::string& content) {
  const std::string path = testing::TempDir() + name;
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST(Mixture, SizesAndDeterminism) {
  MixtureSpec big;
  big.k = 5;
  big.points_per_cluster = 100 * 1024;
  EXPECT_EQ(gen_gaussian_mixture(big).points.size(), 512000u);
  MixtureSpec small;
  small.k = 3;
  small.points_per_cluster = 640;
  small.d = 8;
  const Mixture a = gen_gaussian_mixture(small), b = gen_gaussian_mixture(small);
  EXPECT_EQ(a.points.size(), 1920u);
  EXPECT_EQ(a.delta, 1920u * 1920u);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].coords, b.points[i].coords);
    for (double v : a.points[i].coords) {
      EXPECT_GE(v, 1.0);
      EXPECT_LE(v, static_cast<double>(a.delta));
      EXPECT_EQ(v, std::round(v));
    }
  }
  small.seed = 2;
  EXPECT_NE(gen_gaussian_mixture(small).points[0].coords, a.points[0].coords);
}

TEST(Partition, RoundRobin) {
  Dataset x;
  for (int i = 0; i < 10; ++i) x.push_back({{double(i + 1)}, 1.0});
  const auto sites = partition_round_robin(x, 3);
  EXPECT_EQ(sites[0].points.size(), 4u);
  EXPECT_EQ(sites[2].points.size(), 3u);
  EXPECT_EQ(sites[1].points[0].coords[0], 2.0);
  EXPECT_EQ(sites[2].site_id, 3);
  EXPECT_EQ(pool_sites(sites).size(), 10u);
}

TEST(Csv, DigitsShape) {
  const Dataset x = load_csv_dataset(std::string(DISTCLUST_DATA_DIR) + "/digits.csv");
  ASSERT_EQ(x.size(), 1797u);
  EXPECT_EQ(x[0].coords.size(), 64u);
}

TEST(Csv, EmptyFileAndErrors) {
  EXPECT_TRUE(load_csv_dataset(temp_file("empty.csv", "")).empty());
  try {
    load_csv_dataset(temp_file("bad.csv", "1,2\n3,4\n5,x\n"));
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(load_csv_dataset(temp_file("ragged.csv", "1,2\n3\n")), StructuralError);
  EXPECT_THROW(load_csv_dataset(testing::TempDir() + "missing.csv"), std::runtime_error);
}

TEST(Csv, ShiftAndWeights) {
  const Dataset x = load_csv_dataset(temp_file("shift.csv", "-2,0.6\n4,3\n"));
  EXPECT_EQ(x[0].coords, (Point{1, 4}));
  EXPECT_EQ(x[1].coords, (Point{7, 6}));
  const Dataset w = load_csv_dataset(temp_file("w.csv", "1,2,0.5\n3,4,2\n"), true);
  EXPECT_EQ(w[1].coords, (Point{3, 4}));
  EXPECT_DOUBLE_EQ(w[0].weight, 0.5);
}

TEST(Eas, RoundingExamples) {
  EXPECT_EQ(eas_round(12, 2), 16);
  EXPECT_EQ(eas_round(0, 2), 0);
  EXPECT_EQ(eas_round(8, 2), 8);
  EXPECT_EQ(eas_round(-3.5, 2), -4);
  Rng rng(1);
  CenterSet c;
  for (int i = 0; i < 50; ++i) c.add({rng.uniform() * 1000 - 500, rng.uniform() * 3});
  const double q = std::pow(2.0, 0.25);
  const CenterSet once = eas_quantize(c, q), twice = eas_quantize(once, q);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(once[i], twice[i]);
}

TEST(Mp, SingleDistinctPoint) {
  const Dataset x(20, WeightedPoint{{5, 5}, 1.0});
  Rng rng(1);
  const auto r = mp_baseline(x, 3, 2, 2, rng);
  EXPECT_EQ(clustering_cost(x, r.centers), 0.0);
  EXPECT_EQ(r.centers.size(), 1u);
}

TEST(Mp, CoverageImproves) {
  MixtureSpec spec;
  spec.k = 4;
  spec.points_per_cluster = 100;
  const Dataset x = gen_gaussian_mixture(spec).points;
  int better = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    const auto r = mp_baseline(x, 4, 2, 2, rng);
    CenterSet first;
    for (std::size_t i = 0; i < 4; ++i) first.add(r.centers[i]);
    better += clustering_cost(x, r.centers) <= clustering_cost(x, first);
  }
  EXPECT_GE(better, 9);
}

TEST(Mp, BitsPlateauInC) {
  const Dataset x = load_csv_dataset(std::string(DISTCLUST_DATA_DIR) + "/digits.csv");
  std::uint64_t prev = 0;
  for (double c : {12.0, 16.0, 20.0}) {
    Rng rng(3);
    const auto r = mp_baseline(x, 10, 2, c, rng);
    if (prev) EXPECT_EQ(r.ledger.total_bits(), prev);
    prev = r.ledger.total_bits();
  }
}

TEST(OptProxy, DistinctPointsAndPlanted) {
  const Dataset x{{{1, 1}, 1.0}, {{9, 9}, 2.0}, {{20, 1}, 1.0}};
  Rng rng(1);
  EXPECT_EQ(opt_proxy(x, 3, 2, rng).cost, 0.0);
  int close = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    MixtureSpec spec;
    spec.k = 4;
    spec.points_per_cluster = 200;
    spec.seed = seed;
    spec.mean_range = 40;
    const Mixture m = gen_gaussian_mixture(spec);
    CenterSet planted;
    planted.points = m.planted;
    Rng r2(seed);
    close += opt_proxy(m.points, 4, 2, r2).cost <= 1.05 * clustering_cost(m.points, planted);
  }
  EXPECT_GE(close, 9);
}

TEST(QualityCheck, ExactAndDoubled) {
  MixtureSpec spec;
  spec.k = 3;
  spec.points_per_cluster = 50;
  const Dataset x = gen_gaussian_mixture(spec).points;
  Rng rng(2);
  const auto probes = build_probes(x, 3, 2, rng);
  EXPECT_GE(probes.size(), 200u);
  for (const auto& p : probes) EXPECT_EQ(p.size(), 3u);
  const auto same = coreset_quality_check(x, x, 0.01, probes);
  EXPECT_TRUE(same.pass);
  EXPECT_EQ(same.max_deviation, 0.0);
  Dataset doubled = x;
  for (auto& p : doubled) p.weight *= 2;
  const auto bad = coreset_quality_check(x, doubled, 0.99, probes);
  EXPECT_FALSE(bad.pass);
  EXPECT_NEAR(bad.max_deviation, 1.0, 1e-12);
}

TEST(Experiment, RowsAndLedgerRecount) {
  MixtureSpec spec;
  spec.k = 3;
  spec.points_per_cluster = 100;
  spec.d = 4;
  const Dataset x = gen_gaussian_mixture(spec).points;
  for (const char* algo : {"mp", "as", "eas", "as-jl", "eas-jl"}) {
    ExperimentConfig cfg;
    cfg.algo = algo;
    cfg.c = 3;
    const ResultRow r = run_experiment(x, cfg);
    EXPECT_EQ(r.bits, r.ledger_recount) << algo;
    EXPECT_GT(r.bits, 0u);
  }
  ExperimentConfig cc;
  cc.algo = "coreset";
  cc.model = "blackboard";
  cc.eps = 0.5;
  const ResultRow r = run_experiment(x, cc);
  EXPECT_EQ(r.bits, r.ledger_recount);
  EXPECT_GT(r.coreset_size, 0u);
  cc.algo = "nope";
  EXPECT_THROW(run_experiment(x, cc), StructuralError);
}

TEST(Experiment, EasIsRoundedAs) {
  const Dataset x = load_csv_dataset(std::string(DISTCLUST_DATA_DIR) + "/digits.csv");
  ExperimentConfig cfg;
  cfg.k = 10;
  cfg.c = 12;
  cfg.algo = "as";
  const ResultRow as = run_experiment(x, cfg);
  cfg.algo = "eas";
  const ResultRow eas = run_experiment(x, cfg);
  EXPECT_EQ(as.bits * 5, eas.bits * 32);
  EXPECT_EQ(as.rounds, eas.rounds);
}

TEST(Experiment, SweepCsvAndDeterminism) {
  MixtureSpec spec;
  spec.k = 3;
  spec.points_per_cluster = 80;
  const Dataset x = gen_gaussian_mixture(spec).points;
  ExperimentConfig cfg;
  cfg.algo = "as";
  std::vector<double> cs;
  for (int c = 20; c >= 11; --c) cs.push_back(c);
  const auto rows = run_sweep(x, cfg, cs);
  ASSERT_EQ(rows.size(), 10u);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(rows[i - 1].config.c, rows[i].config.c);
  const std::string csv = format_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "model,algo,k,z,eps,s,n,d,c,seed,cost,bits,rounds,coreset_size");
  EXPECT_EQ(csv, format_csv(run_sweep(x, cfg, cs)));
  const std::string path = testing::TempDir() + "rows.csv";
  emit_results(rows, path, "csv");
  std::ifstream in(path);
  std::string back((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(back, csv);
  const auto json = nlohmann::json::parse(format_json(rows));
  EXPECT_EQ(json.size(), 10u);
  EXPECT_EQ(json[0]["params"]["algo"], "as");
  EXPECT_THROW(emit_results(rows, "/nonexistent/dir/x.csv", "csv"), std::runtime_error);
}
