#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "distclust/coordinator.hpp"
#include "distclust/errors.hpp"
#include "distclust/harness.hpp"
#include "distclust/sampling.hpp"

using namespace distclust;

namespace {

double norm(const Point& a, const Point& b) { return std::sqrt(dist_pow(a, b, 2)); }

// Worst-case bits of one majority comparison at the given width and delta.
std::uint64_t hpgt_worst_bits(unsigned width, double delta) {
  const unsigned h = fingerprint_bits(width, kBaseComparisonError);
  const auto steps = static_cast<std::uint64_t>(std::ceil(std::log2(width + 1.0)));
  return majority_repetitions(delta) * (steps * (h + 1) + 1);
}

}  // namespace

TEST(Jl, ZeroAndDeterminism) {
  Rng rng(1);
  const JlSketch s = make_jl(64, 16, 100, rng);
  EXPECT_FALSE(s.identity);
  EXPECT_EQ(s.seed.size(), jl_seed_bits(64, 16, 100));
  EXPECT_EQ(jl_seed_bits(64, 16, 100),
            8u * static_cast<std::size_t>(std::ceil(std::log2(16.0 * 100 * 100))) * 6u);
  const Point zero(64, 0.0);
  for (double v : jl_project(s, zero)) EXPECT_EQ(v, 0.0);
  const JlSketch t = jl_from_seed(s.seed, 64, 16);
  Point x(64);
  for (auto& v : x) v = rng.uniform() * 1000;
  EXPECT_EQ(jl_project(s, x), jl_project(t, x));
  EXPECT_TRUE(make_jl(8, 8, 100, rng).identity);
  EXPECT_EQ(jl_dimension(256), 128u);
}

TEST(Jl, PairwiseDistortion) {
  Rng rng(2);
  const std::size_t d = 512, pool = 256;
  const std::size_t d_out = jl_dimension(pool);
  const JlSketch s = make_jl(d, d_out, pool, rng);
  std::vector<Point> pts(pool, Point(d));
  for (auto& p : pts)
    for (auto& v : p) v = std::floor(rng.uniform() * 1000);
  std::vector<Point> proj;
  for (const auto& p : pts) proj.push_back(jl_project(s, p));
  for (int t = 0; t < 1000; ++t) {
    const std::size_t i = rng.below(pool), j = rng.below(pool);
    if (i == j) continue;
    const double r = norm(proj[i], proj[j]) / norm(pts[i], pts[j]);
    EXPECT_GE(r, 0.5);
    EXPECT_LE(r, 1.5);
  }
}

TEST(EfficientCommunication, WorkedExample) {
  Network net(1, 5);
  const SortedViews views({{0, 0}, {8, 0}}, 2);
  const EcContext ctx = make_ec_context(0.5, 0.01, 2, 2, 16, 16);
  const EcResult r = efficient_communication(net.channel(1), 1, views, kCoordinator, Point{5, 3}, ctx);
  EXPECT_EQ(r.approx, (Point{4.625, 3.375}));
  EXPECT_EQ(r.path[0].sign, -1);
  EXPECT_EQ(r.path[0].exponent, 3);
  EXPECT_EQ(r.path[1].sign, 1);
  EXPECT_EQ(r.path[1].exponent, 3);
  EXPECT_GT(net.ledger().total_bits(), 0u);
}

TEST(EfficientCommunication, ExactWhenCoordinatesPresent) {
  Network net(1, 6);
  const SortedViews views({{3, 10}, {7, 2}, {5, 5}}, 2);
  const EcContext ctx = make_ec_context(0.25, 0.01, 2, 3, 100, 100);
  const EcResult r = efficient_communication(net.channel(1), 1, views, kCoordinator, Point{7, 10}, ctx);
  EXPECT_EQ(r.approx, (Point{7, 10}));
  for (const auto& p : r.path) EXPECT_EQ(p.sign, 0);
}

TEST(EfficientCommunication, GuaranteeAndMagnitudeFreeBudget) {
  Rng rng(3);
  const std::size_t ell = 100, d = 8;
  const double delta_grid = 1 << 20, eps = 0.5;
  const EcContext ctx = make_ec_context(eps, 0.01, d, ell, delta_grid, delta_grid);
  const std::uint64_t per_cmp = hpgt_worst_bits(ctx.width, ctx.delta_prime);
  const auto search = [](std::size_t n) { return static_cast<std::uint64_t>(std::ceil(std::log2(n))); };
  const std::uint64_t budget = d * per_cmp * (search(ell + 2) + 2 + search(ctx.grid.size()) + 1);
  int ok = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    std::vector<Point> xs(ell, Point(d));
    const double span = std::ldexp(1.0, 1 + static_cast<int>(rng.below(20)));
    for (auto& p : xs)
      for (auto& v : p) v = 1 + std::floor(rng.uniform() * span);
    Point y(d);
    for (auto& v : y) v = 1 + std::floor(rng.uniform() * span);
    Network net(1, static_cast<std::uint64_t>(t));
    const EcResult r = efficient_communication(net.channel(1), 1, SortedViews(xs, d), kCoordinator, y, ctx);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& x : xs) best = std::min(best, norm(x, y));
    ok += norm(r.approx, y) <= eps * best + 1e-9;
    EXPECT_LE(net.ledger().total_bits(), budget);
  }
  EXPECT_GE(ok, trials * 99 / 100);
}

TEST(EfficientCommunication, DeltaPrime) {
  EXPECT_DOUBLE_EQ(ec_delta_prime(0.01, 8, 100, 1 << 20, 0.5), 0.01 / (8 * (7 + 5 + 1 + 8)));
}

TEST(LocalCoreset, PassthroughAndWeights) {
  Rng rng(4);
  Dataset x;
  for (int i = 0; i < 500; ++i) x.push_back({{1 + std::floor(rng.uniform() * 100), 1 + std::floor(rng.uniform() * 100)}, 1.0});
  EXPECT_EQ(local_coreset(x, 3, 2, 0.2, 8, rng).size(), x.size());
  double mean = 0;
  const int runs = 100;
  for (int t = 0; t < runs; ++t) {
    const Dataset p = local_coreset(x, 3, 2, 0.2, 0.001, rng);
    EXPECT_LT(p.size(), x.size());
    mean += total_weight(p) / runs;
  }
  EXPECT_NEAR(mean, 500.0, 50.0);
}

TEST(LocalCoreset, ProbeSuite) {
  // At n = 500 the default target exceeds n, so the site keeps its data.
  int pass = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    MixtureSpec spec;
    spec.k = 3;
    spec.points_per_cluster = 167;
    spec.seed = seed;
    Dataset x = gen_gaussian_mixture(spec).points;
    x.resize(500);
    Rng rng(seed);
    const Dataset p = local_coreset(x, 3, 2, 0.2, 8, rng);
    pass += coreset_quality_check(x, p, 0.1, build_probes(x, 3, 2, rng)).pass;
  }
  EXPECT_GE(pass, 8);
}

TEST(LocalCoreset, SampledProbeSuite) {
  int pass = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    MixtureSpec spec;
    spec.k = 3;
    spec.points_per_cluster = 4000;
    spec.seed = seed;
    const Dataset x = gen_gaussian_mixture(spec).points;
    Rng rng(seed);
    const Dataset p = local_coreset(x, 3, 2, 0.2, 0.05, rng);
    EXPECT_LT(p.size(), x.size());
    pass += coreset_quality_check(x, p, 0.1, build_probes(x, 3, 2, rng)).pass;
  }
  EXPECT_GE(pass, 4);
}

TEST(CoordinatorPipeline, DistinctPointsSingleSite) {
  std::vector<SiteDataset> sites(1);
  for (int l = 0; l < 3; ++l)
    for (int c = 0; c < 10; ++c) sites[0].points.push_back({{1.0 + 40 * l, 1.0 + 7 * l}, 1.0});
  CoordinatorConfig cfg;
  cfg.k = 3;
  cfg.eps = 0.5;
  const auto r = run_coordinator_pipeline(sites, cfg);
  EXPECT_NEAR(total_weight(r.coreset), 30.0, 30.0 * 0.25);
  for (const auto& p : r.coreset) {
    bool found = false;
    for (const auto& q : sites[0].points) found |= p.coords == q.coords;
    EXPECT_TRUE(found);
  }
  Rng rng(1);
  const auto probes = build_probes(sites[0].points, 3, 2, rng);
  EXPECT_TRUE(coreset_quality_check(sites[0].points, r.coreset, 0.5, probes).pass);
}

TEST(CoordinatorPipeline, RejectsOversizedK) {
  std::vector<SiteDataset> sites(2);
  sites[0].points = {{{1, 1}, 1.0}, {{2, 2}, 1.0}};
  sites[1].points = {{{1, 1}, 1.0}};
  CoordinatorConfig cfg;
  cfg.k = 3;
  EXPECT_THROW(run_coordinator_pipeline(sites, cfg), StructuralError);
}

namespace {

std::vector<SiteDataset> mixture_sites(std::uint64_t seed, std::size_t per, std::size_t d, std::size_t s) {
  MixtureSpec spec;
  spec.k = 3;
  spec.points_per_cluster = per;
  spec.d = d;
  spec.seed = seed;
  return partition_round_robin(gen_gaussian_mixture(spec).points, s);
}

}  // namespace

TEST(CoordinatorPipeline, ChannelIsolationAndExactCenters) {
  const auto sites = mixture_sites(2, 60, 3, 4);
  CoordinatorConfig cfg;
  cfg.k = 3;
  cfg.eps = 0.5;
  const auto r = run_coordinator_pipeline(sites, cfg, CoordinatorStage::Bicriteria);
  for (std::size_t j = 0; j < r.transcripts.size(); ++j)
    for (const auto& e : r.transcripts[j])
      EXPECT_TRUE(e.sender == kCoordinator || e.sender == static_cast<PartyId>(j + 1));
  for (const auto& c : r.bicriteria.points) {
    bool found = false;
    for (const auto& p : r.local_coresets)
      for (const auto& q : p) found |= q.coords == c;
    EXPECT_TRUE(found);
  }
}

TEST(CoordinatorPipeline, OtherSiteDataDoesNotLeakEarly) {
  auto sites = mixture_sites(3, 60, 3, 4);
  CoordinatorConfig cfg;
  cfg.k = 3;
  cfg.eps = 0.5;
  const auto a = run_coordinator_pipeline(sites, cfg, CoordinatorStage::Bicriteria);
  // Same size, different coordinates at site 2.
  for (auto& p : sites[1].points) p.coords[0] = std::max(1.0, p.coords[0] - 5);
  const auto b = run_coordinator_pipeline(sites, cfg, CoordinatorStage::Bicriteria);
  // Site 1's opening messages depend only on its own data and public seeds.
  const auto& ta = a.transcripts[0];
  const auto& tb = b.transcripts[0];
  ASSERT_FALSE(ta.empty());
  EXPECT_EQ(ta.front().kind, "local_size");
  EXPECT_EQ(ta.front().digest, tb.front().digest);
  EXPECT_EQ(a.local_coresets[0].size(), b.local_coresets[0].size());
}

TEST(CoordinatorPipeline, ApproximateAssignmentWithinFactor16) {
  const auto sites = mixture_sites(5, 40, 4, 3);
  CoordinatorConfig cfg;
  cfg.k = 3;
  cfg.eps = 0.5;
  const auto r = run_coordinator_pipeline(sites, cfg, CoordinatorStage::Bicriteria);
  std::vector<Point> true_proj;
  for (const auto& c : r.bicriteria.points) true_proj.push_back(jl_project(r.sketch, c));
  for (std::size_t j = 0; j < sites.size(); ++j) {
    for (const auto& p : r.local_coresets[j]) {
      const Point y = jl_project(r.sketch, p.coords);
      double approx = std::numeric_limits<double>::infinity(), exact = approx;
      for (const auto& c : r.site_centers[j].points) approx = std::min(approx, norm(y, c));
      for (const auto& c : true_proj) exact = std::min(exact, norm(y, c));
      EXPECT_LE(approx, 16 * exact + 1e-6);
      EXPECT_GE(16 * approx + 1e-6, exact);
    }
  }
}

TEST(CoordinatorPipeline, DeterministicAndConserved) {
  const auto sites = mixture_sites(6, 30, 2, 3);
  CoordinatorConfig cfg;
  cfg.k = 2;
  cfg.eps = 0.5;
  cfg.c_m = 1;
  const auto a = run_coordinator_pipeline(sites, cfg);
  const auto b = run_coordinator_pipeline(sites, cfg);
  EXPECT_EQ(a.ledger.dump(), b.ledger.dump());
  std::uint64_t sum = 0;
  for (const auto& rec : a.ledger) sum += rec["bits"].get<std::uint64_t>();
  EXPECT_EQ(sum, a.bits);
  ASSERT_EQ(a.coreset.size(), b.coreset.size());
  for (std::size_t i = 0; i < a.coreset.size(); ++i) EXPECT_EQ(a.coreset[i].coords, b.coreset[i].coords);
}
