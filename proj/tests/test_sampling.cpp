#include <algorithm>
#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "distclust/errors.hpp"
#include "distclust/harness.hpp"
#include "distclust/sampling.hpp"

using namespace distclust;

namespace {

Dataset copies(const Point& p, std::size_t n) { return Dataset(n, WeightedPoint{p, 1.0}); }

Dataset random_points(Rng& rng, std::size_t n, std::size_t d, double span) {
  Dataset x;
  for (std::size_t i = 0; i < n; ++i) {
    Point p(d);
    for (auto& v : p) v = 1 + std::floor(rng.uniform() * span);
    x.push_back({p, 1.0 + static_cast<double>(rng.below(3))});
  }
  return x;
}

}  // namespace

TEST(DiscreteSampler, MatchesMasses) {
  const std::vector<double> mass{1, 0, 3, 4, 2};
  const DiscreteSampler s(mass);
  Rng rng(1);
  std::vector<double> freq(mass.size(), 0);
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) freq[s.draw(rng)] += 1.0 / trials;
  double tv = 0;
  for (std::size_t i = 0; i < mass.size(); ++i) tv += std::fabs(freq[i] - mass[i] / 10.0);
  EXPECT_LE(tv / 2, 0.02);
  EXPECT_EQ(freq[1], 0.0);
}

TEST(AdaptiveSampling, SinglePoint) {
  Rng rng(2);
  const Dataset x = copies({7, 7}, 1);
  const auto r = adaptive_sampling(x, 2, 8, rng);
  ASSERT_EQ(r.centers.size(), 1u);
  EXPECT_EQ(r.centers[0], (Point{7, 7}));
  EXPECT_EQ(clustering_cost(x, r.centers), 0.0);
  EXPECT_THROW(adaptive_sampling(Dataset{}, 2, 3, rng), StructuralError);
}

TEST(AdaptiveSampling, SecondDrawCoversOtherLocation) {
  Dataset x = copies({0, 0}, 10);
  const Dataset far = copies({100, 0}, 10);
  x.insert(x.end(), far.begin(), far.end());
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto r = adaptive_sampling(x, 2, 1, rng);
    ASSERT_EQ(r.centers.size(), 2u);
    EXPECT_EQ(clustering_cost(x, r.centers), 0.0);
  }
}

TEST(AdaptiveSampling, JointLawOfFirstTwoDraws) {
  const Dataset x{{{0}, 1.0}, {{1}, 2.0}, {{3}, 1.0}, {{7}, 3.0}};
  // Exact joint law: first draw by weight, second by weight times squared distance.
  std::map<std::pair<std::size_t, std::size_t>, double> exact;
  const double w = 7.0;
  for (std::size_t i = 0; i < 4; ++i) {
    double norm = 0;
    for (std::size_t j = 0; j < 4; ++j) norm += x[j].weight * std::pow(x[j].coords[0] - x[i].coords[0], 2);
    for (std::size_t j = 0; j < 4; ++j)
      exact[{i, j}] = x[i].weight / w * x[j].weight * std::pow(x[j].coords[0] - x[i].coords[0], 2) / norm;
  }
  Rng rng(5);
  std::map<std::pair<std::size_t, std::size_t>, double> seen;
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) {
    const auto r = adaptive_sampling(x, 2, 1, rng);
    seen[{r.indices[0], r.indices[1]}] += 1.0 / trials;
  }
  double tv = 0;
  for (const auto& [key, p] : exact) tv += std::fabs(p - seen[key]);
  EXPECT_LE(tv / 2, 0.02);
}

TEST(AdaptiveSampling, SizeAndMembership) {
  Rng rng(9);
  const Dataset x = random_points(rng, 300, 3, 50);
  for (int t = 0; t < 20; ++t) {
    const auto r = adaptive_sampling(x, 1, 12, rng);
    EXPECT_LE(r.centers.size(), 13u);
    for (std::size_t i = 0; i < r.centers.size(); ++i) EXPECT_EQ(r.centers[i], x[r.indices[i]].coords);
  }
}

TEST(AdaptiveSampling, BicriteriaRatioOnMixture) {
  int good = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    MixtureSpec spec;
    spec.k = 5;
    spec.points_per_cluster = 200;
    spec.seed = seed;
    const Mixture m = gen_gaussian_mixture(spec);
    Rng rng(seed);
    const double opt = opt_proxy(m.points, 5, 2, rng).cost;
    const auto r = adaptive_sampling(m.points, 2, default_adaptive_rounds(5), rng);
    if (clustering_cost(m.points, r.centers) <= 10 * opt) ++good;
  }
  EXPECT_GE(good, 9);
}

TEST(Sensitivity, SingleClusterUniform) {
  const std::size_t n = 40;
  const double c = 3.0;
  SensitivityStats stats{{static_cast<double>(n)}, {c * n}, c * n, 1};
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(sensitivity(0, c, stats), 1.0 / n, 1e-15);
}

TEST(Sensitivity, SumsToOneUnderExactStats) {
  Rng rng(14);
  for (int t = 0; t < 10; ++t) {
    const Dataset x = random_points(rng, 200, 2, 100);
    CenterSet c;
    c.z = 1.0 + rng.uniform() * 2;
    for (int j = 0; j < 4; ++j) c.add(x[rng.below(x.size())].coords);
    const ClusterStats cs = partition_clusters(x, c);
    if (std::find(cs.sizes.begin(), cs.sizes.end(), 0.0) != cs.sizes.end()) continue;
    if (std::find(cs.costs.begin(), cs.costs.end(), 0.0) != cs.costs.end()) continue;
    const SensitivityStats stats = exact_stats(cs);
    EXPECT_EQ(stats.k, 4.0);
    double sum = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const std::size_t j = cs.assignment[i];
      const double cost = dist_pow(x[i].coords, c[j], c.z);
      const double mu = sensitivity(j, cost, stats);
      EXPECT_GE(mu, 1.0 / (4 * stats.k * stats.cluster_sizes[j]));
      sum += x[i].weight * mu;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST(Sensitivity, DegenerateCases) {
  SensitivityStats zero_size{{0.0, 2.0}, {0.0, 4.0}, 4.0, 2};
  EXPECT_THROW(sensitivity(0, 0.0, zero_size), DegenerateClusterError);
  SensitivityStats zero_total{{2.0}, {0.0}, 0.0, 1};
  EXPECT_THROW(sensitivity(0, 0.0, zero_total), DegenerateClusterError);
  // A covered cluster keeps only the size and average terms.
  SensitivityStats covered{{2.0, 2.0}, {0.0, 8.0}, 8.0, 2};
  EXPECT_DOUBLE_EQ(sensitivity(0, 0.0, covered), 0.25 * (1.0 / 4.0));
}

TEST(SensitivitySampling, CopiesOfOnePoint) {
  Rng rng(3);
  const Dataset x = copies({5, 5}, 37);
  CenterSet c;
  c.add({5, 5});
  const Dataset cs = sensitivity_sampling(x, c, 10, rng);
  double w = 0;
  for (const auto& p : cs) w += p.weight;
  EXPECT_DOUBLE_EQ(w, 37.0);
}

TEST(SensitivitySampling, UnbiasedTotalWeight) {
  Rng rng(6);
  const Dataset x = random_points(rng, 300, 2, 200);
  const double n = total_weight(x);
  const auto bic = adaptive_sampling(x, 2, 12, rng);
  double mean = 0;
  for (int t = 0; t < 200; ++t) {
    double w = 0;
    for (const auto& p : sensitivity_sampling(x, bic.centers, 50, rng)) w += p.weight;
    mean += w / 200;
  }
  EXPECT_NEAR(mean, n, 0.05 * n);
}

TEST(SensitivitySampling, PassesProbeSuite) {
  int pass = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    MixtureSpec spec;
    spec.k = 3;
    spec.points_per_cluster = 167;
    spec.seed = seed + 100;
    Dataset x = gen_gaussian_mixture(spec).points;
    x.resize(500);
    Rng rng(seed);
    const auto bic = adaptive_sampling(x, 2, default_adaptive_rounds(3), rng);
    const Dataset cs = sensitivity_sampling(x, bic.centers, coreset_sample_size(3, 2, 0.2, 8), rng);
    const auto probes = build_probes(x, 3, 2, rng);
    if (coreset_quality_check(x, cs, 0.2, probes).pass) ++pass;
  }
  EXPECT_GE(pass, 8);
}

TEST(SensitivitySampling, SampleSizeFormula) {
  const auto expect = [](double k, double z, double eps, double c) {
    return static_cast<std::size_t>(std::ceil(c * k / std::min(std::pow(eps, 4), std::pow(eps, 2 + z)) *
                                              std::max(1.0, std::log(k / eps))));
  };
  EXPECT_EQ(coreset_sample_size(3, 2, 0.2, 8), expect(3, 2, 0.2, 8));
  EXPECT_EQ(coreset_sample_size(3, 1, 0.5, 1), expect(3, 1, 0.5, 1));
  EXPECT_EQ(coreset_sample_size(1, 2, 0.9, 1), expect(1, 2, 0.9, 1));
}

TEST(Morris, StepExamples) {
  Rng rng(1);
  EXPECT_EQ(morris_step(5, 0, rng), 5u);
  EXPECT_EQ(morris_step(0, 1, rng), 1u);
  for (int t = 0; t < 1000; ++t) {
    const std::uint32_t r = static_cast<std::uint32_t>(rng.below(10));
    EXPECT_GE(morris_step(r, rng.below(1000), rng), r);
  }
}

TEST(Morris, UnbiasedMean) {
  Rng rng(2);
  double mean = 0;
  for (int t = 0; t < 10000; ++t) mean += (std::ldexp(1.0, static_cast<int>(morris_step(0, 100, rng))) - 1) / 10000;
  EXPECT_GE(mean, 90);
  EXPECT_LE(mean, 110);
}

TEST(Morris, StepMatchesSequentialRule) {
  // The skip-ahead step and the one-at-a-time rule share a law; compare means of r.
  Rng a(3), b(4);
  double fast = 0, slow = 0;
  for (int t = 0; t < 4000; ++t) {
    fast += morris_step(0, 500, a);
    std::uint32_t r = 0;
    for (int i = 0; i < 500; ++i)
      if (b.uniform() < std::ldexp(1.0, -static_cast<int>(r))) ++r;
    slow += r;
  }
  EXPECT_NEAR(fast / 4000, slow / 4000, 0.1);
}

TEST(Morris, EstimateAndReplicas) {
  const std::vector<std::uint32_t> zeros{0, 0, 0}, ones{1, 1};
  EXPECT_EQ(morris_estimate(zeros), 0.0);
  EXPECT_EQ(morris_estimate(ones), 1.0);
  EXPECT_EQ(morris_replicas(1), static_cast<std::size_t>(std::ceil(32 * std::log(100.0))));
  Rng rng(10);
  const std::size_t l = morris_replicas(1);
  int inside = 0;
  for (int run = 0; run < 100; ++run) {
    std::vector<std::uint32_t> reg(l);
    for (auto& r : reg) r = morris_step(0, 10000, rng);
    const double est = morris_estimate(reg);
    if (est >= 7500 && est <= 12500) ++inside;
  }
  EXPECT_GE(inside, 95);
}
