#include "distclust/acceptance.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>

#include "distclust/blackboard.hpp"
#include "distclust/coordinator.hpp"
#include "distclust/encoding.hpp"
#include "distclust/fabric.hpp"
#include "distclust/harness.hpp"
#include "distclust/sampling.hpp"

namespace distclust {

namespace {

std::string fmt(double v, int precision = 4) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, precision);
  return std::string(buf, res.ptr);
}

std::string ratio(int hits, int trials) { return std::to_string(hits) + "/" + std::to_string(trials); }

double norm(std::span<const double> a, std::span<const double> b) { return std::sqrt(dist_pow(a, b, 2)); }

Ordering exact_order(std::uint64_t a, std::uint64_t b) {
  return a < b ? Ordering::Less : a > b ? Ordering::Greater : Ordering::Equal;
}

Dataset mixture_points(std::size_t k, std::size_t per, std::size_t d, std::uint64_t seed,
                       std::uint64_t delta = 0) {
  MixtureSpec spec;
  spec.k = k;
  spec.points_per_cluster = per;
  spec.d = d;
  spec.seed = seed;
  spec.delta = delta;
  return gen_gaussian_mixture(spec).points;
}

// Each check fills pass and detail; the runner adds timing.
using Check = void (*)(const AcceptanceOptions&, CriterionResult&);

void power_approx_sandwich(const AcceptanceOptions&, CriterionResult& r) {
  std::size_t failures = 0;
  for (double lambda : {1.5, 2.0}) {
    for (std::uint32_t m = 1; m <= 1000000; ++m) {
      const double dec = power_decode(power_approx(m, lambda), lambda);
      failures += !(m <= dec && dec < lambda * m);
    }
  }
  r.pass = failures == 0;
  r.detail = "failures=" + std::to_string(failures) + " over 2x10^6 values";
}

void lazy_sampling_law(const AcceptanceOptions& o, CriterionResult& r) {
  const std::vector<std::vector<double>> masses{{1, 3}, {4}};
  const std::vector<ExponentCode> codes{power_approx(8, 2), power_approx(4, 2)};
  Blackboard board(o.seed);
  Rng coordinator(derive_seed(o.seed, "lazy", 0));
  std::vector<Rng> site_rngs{Rng(derive_seed(o.seed, "lazy", 1)), Rng(derive_seed(o.seed, "lazy", 2))};
  const std::size_t draws = 100000;
  const auto out = lazy_sampling(board, masses, codes, draws, coordinator, site_rngs);
  std::vector<double> freq(3, 0.0);
  double bottom = 0, hits = 0;
  for (const auto& e : out) {
    if (!e.index) {
      ++bottom;
      continue;
    }
    ++hits;
    freq[e.site == 0 ? *e.index : 2] += 1;
  }
  const double exact[] = {1.0 / 8, 3.0 / 8, 4.0 / 8};
  double tv = 0;
  for (int i = 0; i < 3; ++i) tv += std::fabs(freq[i] / hits - exact[i]);
  tv /= 2;
  const double p_bottom = bottom / static_cast<double>(draws);
  r.pass = p_bottom >= 0.30 && p_bottom <= 0.37 && tv <= 0.02;
  r.detail = "P(bottom)=" + fmt(p_bottom) + " TV=" + fmt(tv);
}

void l1_contract(const AcceptanceOptions& o, CriterionResult& r) {
  const L1Params params{8.0, 0.01};
  const int trials = 1000;
  Rng rng(derive_seed(o.seed, "l1"));
  int single_true = 0, single_false = 0, multi_true = 0, multi_false = 0;
  for (int t = 0; t < trials; ++t) {
    // Site cost D and a stale factor placing the code in one zone.
    const double d = 1.0 + std::floor(std::exp(rng.uniform() * 12));
    Blackboard b1(static_cast<std::uint64_t>(t)), b2(static_cast<std::uint64_t>(t) + trials);
    single_true += l1_sampling(b1, {power_approx(d * (64 + 64 * rng.uniform()), 2)}, {d}, params, rng);
    single_false += !l1_sampling(b2, {power_approx(d * (1 + 2.9 * rng.uniform()), 2)}, {d}, params, rng);
  }
  for (int t = 0; t < trials; ++t) {
    std::vector<double> costs(20);
    for (auto& c : costs) c = rng.uniform() < 0.3 ? 0.0 : std::exp(rng.uniform() * 8);
    if (std::all_of(costs.begin(), costs.end(), [](double c) { return c == 0; })) costs[0] = 1;
    std::vector<ExponentCode> stale, fresh;
    for (double c : costs) {
      stale.push_back(power_approx(64 * c, 2));
      fresh.push_back(power_approx(c * (1 + 2.9 * rng.uniform()), 2));
    }
    Blackboard b1(static_cast<std::uint64_t>(t)), b2(static_cast<std::uint64_t>(t) + trials);
    multi_true += l1_sampling(b1, stale, costs, params, rng);
    multi_false += !l1_sampling(b2, fresh, costs, params, rng);
  }
  const int need = trials * 98 / 100;
  r.pass = std::min({single_true, single_false, multi_true, multi_false}) >= need;
  r.detail = "single true " + ratio(single_true, trials) + " false " + ratio(single_false, trials) +
             ", 20-site true " + ratio(multi_true, trials) + " false " + ratio(multi_false, trials);
}

void greater_than_check(const AcceptanceOptions& o, CriterionResult& r) {
  Blackboard board(o.seed);
  Rng rng(derive_seed(o.seed, "gt"));
  const int trials = 10000;
  int errors = 0;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t a = rng.bits() >> 32, b = rng.bits() >> 32;
    errors += greater_than(board, {1, a}, {2, b}, 32, 0.01) != exact_order(a, b);
  }
  Blackboard hp(o.seed + 1);
  const int calls = 1000;
  for (int t = 0; t < calls; ++t) high_prob_greater_than(hp, {1, rng.bits()}, {2, rng.bits()}, 64, 0.01);
  const double mean_bits = static_cast<double>(hp.ledger().total_bits()) / calls;
  const double err = static_cast<double>(errors) / trials;
  r.pass = err <= 0.02 && mean_bits <= 400.0;
  r.detail = "error=" + fmt(err) + " mean HP bits at m=64=" + fmt(mean_bits);
}

void efficient_communication_check(const AcceptanceOptions& o, CriterionResult& r) {
  Network net(1, o.seed);
  const EcContext worked = make_ec_context(0.5, 0.01, 2, 2, 16, 16);
  const EcResult ex = efficient_communication(net.channel(1), 1, SortedViews({{0, 0}, {8, 0}}, 2),
                                              kCoordinator, Point{5, 3}, worked);
  const bool example_ok = ex.approx == Point{4.625, 3.375};

  Rng rng(derive_seed(o.seed, "ec"));
  const std::size_t ell = 100, d = 8;
  const double eps = 0.5, side = 1 << 20;
  const EcContext ctx = make_ec_context(eps, 0.01, d, ell, side, side);
  const int trials = 1000;
  int ok = 0;
  for (int t = 0; t < trials; ++t) {
    std::vector<Point> xs(ell, Point(d));
    const double span = std::ldexp(1.0, 1 + static_cast<int>(rng.below(20)));
    for (auto& p : xs)
      for (auto& v : p) v = 1 + std::floor(rng.uniform() * span);
    Point y(d);
    for (auto& v : y) v = 1 + std::floor(rng.uniform() * span);
    Network link(1, derive_seed(o.seed, "ec-run", static_cast<std::uint64_t>(t)));
    const EcResult res = efficient_communication(link.channel(1), 1, SortedViews(xs, d), kCoordinator, y, ctx);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& x : xs) best = std::min(best, norm(x, y));
    ok += norm(res.approx, y) <= eps * best + 1e-9;
  }
  r.pass = example_ok && ok >= trials * 99 / 100;
  r.detail = "guarantee " + ratio(ok, trials) + ", worked example (" + fmt(ex.approx[0]) + ", " +
             fmt(ex.approx[1]) + ")";
}

void morris_check(const AcceptanceOptions& o, CriterionResult& r) {
  Rng rng(derive_seed(o.seed, "morris"));
  const int runs = 10000;
  double sum = 0;
  for (int t = 0; t < runs; ++t) sum += std::ldexp(1.0, static_cast<int>(morris_step(0, 100, rng))) - 1;
  const double mean = sum / runs;

  int good = 0;
  bool zero_ok = true;
  const std::size_t s = 50, kq = 10;
  for (std::uint64_t run = 0; run < 10; ++run) {
    Rng gen(derive_seed(o.seed, "dist-morris", run));
    std::vector<std::vector<std::uint64_t>> counts(s, std::vector<std::uint64_t>(kq, 0));
    std::vector<double> truth(kq, 0);
    for (std::size_t j = 0; j < s; ++j)
      for (std::size_t q = 0; q < kq; ++q)
        if (j % 5 != 0) truth[q] += static_cast<double>(counts[j][q] = gen.below(2500));
    Blackboard board(run);
    std::vector<Rng> rngs;
    for (std::size_t j = 0; j < s; ++j) rngs.emplace_back(derive_seed(o.seed + run, "site", j));
    const auto est = dist_morris(board, counts, rngs);
    bool all = true;
    for (std::size_t q = 0; q < kq; ++q) all &= est[q] >= 0.75 * truth[q] && est[q] <= 1.25 * truth[q];
    good += all;
    for (const auto& rec : board.ledger().records())
      if ((rec.sender - 1) % 5 == 0) zero_ok &= rec.bits() <= 4;
  }
  r.pass = mean >= 90 && mean <= 110 && good >= 9 && zero_ok;
  r.detail = "Morris mean=" + fmt(mean) + ", DistMorris runs in band " + ratio(good, 10) +
             ", zero-mass sites <= 4 bits: " + (zero_ok ? "yes" : "no");
}

void bicriteria_quality(const AcceptanceOptions& o, CriterionResult& r) {
  const std::size_t k = 5, s = 8;
  int bb_small = 0, bb_large = 0, coord = 0;
  bool size_ok = true;
  double worst = 0;
  for (std::uint64_t run = 0; run < 10; ++run) {
    const std::uint64_t seed = o.seed + run;
    const Dataset x = mixture_points(k, 2000, 2, seed);
    const auto sites = partition_round_robin(x, s);
    Rng rng(derive_seed(seed, "opt"));
    const double opt = opt_proxy(x, k, 2.0, rng).cost;
    const auto judge = [&](const CenterSet& c, int& hits) {
      const double ratio_to_opt = clustering_cost(x, c) / opt;
      worst = std::max(worst, ratio_to_opt);
      hits += ratio_to_opt <= 10.0;
    };
    BlackboardConfig bc;
    bc.k = k;
    bc.seed = seed;
    const std::size_t cap = 3 * bc.rounds_per_k * k;
    {
      BlackboardSession sess(sites, bc);
      const CenterSet c = sess.bicriteria_small_k();
      size_ok &= c.size() <= cap;
      judge(c, bb_small);
    }
    {
      BlackboardSession sess(sites, bc);
      const CenterSet c = sess.bicriteria_large_k();
      size_ok &= c.size() <= cap;
      judge(c, bb_large);
    }
    CoordinatorConfig cc;
    cc.k = k;
    cc.seed = seed;
    const auto res = run_coordinator_pipeline(sites, cc, CoordinatorStage::Bicriteria);
    size_ok &= res.bicriteria.size() <= 3 * cc.rounds_per_k * k;
    judge(res.bicriteria, coord);
  }
  r.pass = bb_small >= 9 && bb_large >= 9 && coord >= 9 && size_ok;
  r.detail = "cost <= 10 opt: small-k " + ratio(bb_small, 10) + ", large-k " + ratio(bb_large, 10) +
             ", coordinator " + ratio(coord, 10) + "; worst ratio " + fmt(worst) +
             "; |S| <= 3N " + (size_ok ? "always" : "violated");
}

void coreset_guarantee(const AcceptanceOptions& o, CriterionResult& r) {
  using clock = std::chrono::steady_clock;
  int bb = 0, co = 0;
  const auto t0 = clock::now();
  for (std::uint64_t run = 0; run < 10; ++run) {
    const std::uint64_t seed = o.seed + run;
    Dataset x = mixture_points(3, 667, 2, seed);
    x.resize(2000);
    BlackboardConfig cfg;
    cfg.k = 3;
    cfg.eps = 0.2;
    cfg.seed = seed;
    const auto res = run_blackboard_pipeline(partition_round_robin(x, 4), cfg);
    Rng rng(derive_seed(seed, "probes"));
    bb += coreset_quality_check(x, res.coreset.points, cfg.eps, build_probes(x, 3, 2.0, rng)).pass;
  }
  const double bb_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  const auto t1 = clock::now();
  for (std::uint64_t run = 0; run < 10; ++run) {
    const std::uint64_t seed = o.seed + run;
    Dataset x = mixture_points(3, 667, 4, seed);
    x.resize(2000);
    CoordinatorConfig cfg;
    cfg.k = 3;
    cfg.eps = 0.25;
    cfg.seed = seed;
    const auto res = run_coordinator_pipeline(partition_round_robin(x, 8), cfg);
    Rng rng(derive_seed(seed, "probes"));
    co += coreset_quality_check(x, res.coreset, cfg.eps, build_probes(x, 3, 2.0, rng)).pass;
  }
  const double co_seconds = std::chrono::duration<double>(clock::now() - t1).count();
  r.pass = bb >= 8 && co >= 7 && bb_seconds < 300 && co_seconds < 300;
  r.detail = "blackboard " + ratio(bb, 10) + " (" + fmt(bb_seconds, 3) + " s), coordinator " +
             ratio(co, 10) + " (" + fmt(co_seconds, 3) + " s)";
}

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (std::log(xs[i]) - mx) * (std::log(ys[i]) - my);
    sxx += (std::log(xs[i]) - mx) * (std::log(xs[i]) - mx);
  }
  return sxy / sxx;
}

void communication_scaling(const AcceptanceOptions& o, CriterionResult& r) {
  // Blackboard: 50 points per site, more sites.
  std::vector<double> bb_bits;
  for (std::size_t s : {10u, 20u, 40u}) {
    const Dataset x = mixture_points(2, 25 * s, 2, o.seed, 1 << 20);
    BlackboardConfig cfg;
    cfg.k = 3;
    cfg.eps = 0.2;
    cfg.seed = o.seed;
    cfg.delta = 1 << 20;
    bb_bits.push_back(static_cast<double>(run_blackboard_pipeline(partition_round_robin(x, s), cfg).bits));
  }
  const double s_ratio = bb_bits[2] / bb_bits[0];

  // Coordinator: shrink eps at fixed s, k, d and track the bits spent on
  // shipping sampled points and their weights.
  const std::size_t k = 4;
  const auto sites = partition_round_robin(mixture_points(k, 100, 2, o.seed), 4);
  std::vector<double> inv_eps, comp;
  for (double eps : {0.4, 0.2, 0.1}) {
    CoordinatorConfig cfg;
    cfg.k = k;
    cfg.eps = eps;
    cfg.c_m = 0.25;
    cfg.seed = o.seed;
    const auto res = run_coordinator_pipeline(sites, cfg);
    std::uint64_t bits = 0;
    for (const auto& rec : res.ledger) {
      const auto kind = rec.at("kind").get<std::string>();
      if (kind == "ec_point" || kind == "coreset_weights") bits += rec.at("bits").get<std::uint64_t>();
    }
    inv_eps.push_back(1.0 / eps);
    comp.push_back(static_cast<double>(bits));
  }
  const double slope = loglog_slope(inv_eps, comp);
  r.pass = s_ratio <= 6.0 && slope >= 3.0 && slope <= 5.0;
  r.detail = "blackboard bits(40)/bits(10)=" + fmt(s_ratio) + ", coordinator eps slope=" + fmt(slope);
}

Dataset digits_or_stand_in(const AcceptanceOptions& o, bool& stand_in) {
  const std::filesystem::path p = std::filesystem::path(o.data_dir) / "digits.csv";
  stand_in = o.data_dir.empty() || !std::filesystem::exists(p);
  if (!stand_in) return load_csv_dataset(p.string());
  // Same shape: 1797 points in 64 dimensions around 10 components.
  Dataset x = mixture_points(10, 180, 64, o.seed, 17);
  x.resize(1797);
  return x;
}

void experiment_reproduction(const AcceptanceOptions& o, CriterionResult& r) {
  const Dataset mix = mixture_points(3, 640, 8, o.seed + 6);
  std::vector<double> cs;
  for (int c = 1; c <= 10; ++c) cs.push_back(c);
  const int seeds = 5;
  // Mean over seeds at c = 5 and c = 10.
  double as_cost[2] = {0, 0}, as_bits[2] = {0, 0}, jl_cost[2] = {0, 0}, jl_bits[2] = {0, 0};
  for (int t = 0; t < seeds; ++t) {
    ExperimentConfig cfg;
    cfg.k = 3;
    cfg.seed = o.seed + static_cast<std::uint64_t>(t);
    cfg.algo = "as";
    const auto as_rows = run_sweep(mix, cfg, cs);
    cfg.algo = "eas-jl";
    const auto jl_rows = run_sweep(mix, cfg, cs);
    for (int i = 0; i < 2; ++i) {
      const std::size_t at = i == 0 ? 4 : 9;
      as_cost[i] += as_rows[at].cost / seeds;
      as_bits[i] += static_cast<double>(as_rows[at].bits) / seeds;
      jl_cost[i] += jl_rows[at].cost / seeds;
      jl_bits[i] += static_cast<double>(jl_rows[at].bits) / seeds;
    }
  }
  const bool mixture_ok = jl_bits[0] <= as_bits[0] / 4 && jl_bits[1] <= as_bits[1] / 6 &&
                          jl_cost[0] <= 1.15 * as_cost[0] && jl_cost[1] <= 1.15 * as_cost[1];

  bool stand_in = false;
  const Dataset digits = digits_or_stand_in(o, stand_in);
  std::vector<double> dc;
  for (int c = 12; c <= 20; ++c) dc.push_back(c);
  ExperimentConfig cfg;
  cfg.k = 10;
  cfg.seed = o.seed;
  cfg.algo = "mp";
  const auto mp = run_sweep(digits, cfg, dc);
  cfg.algo = "eas";
  const auto eas = run_sweep(digits, cfg, dc);
  bool digits_ok = true;
  double worst_cost = 0;
  for (std::size_t i = 0; i < dc.size(); ++i) {
    digits_ok &= eas[i].bits < mp[i].bits && eas[i].cost < mp[i].cost;
    worst_cost = std::max(worst_cost, eas[i].cost / mp[i].cost);
  }
  r.pass = mixture_ok && digits_ok;
  r.detail = "mixture bits ratio AS/EAS-JL c=5 " + fmt(as_bits[0] / jl_bits[0]) + " c=10 " +
             fmt(as_bits[1] / jl_bits[1]) + ", cost ratio " + fmt(jl_cost[0] / as_cost[0]) + " / " +
             fmt(jl_cost[1] / as_cost[1]) + "; " + (stand_in ? "stand-in digits" : "digits") +
             " EAS beats MP at every c: " + (digits_ok ? "yes" : "no") + " (worst cost ratio " +
             fmt(worst_cost) + ")";
}

void determinism(const AcceptanceOptions& o, CriterionResult& r) {
  const std::string a = determinism_csv(o.seed);
  const std::string b = determinism_csv(o.seed);
  r.pass = a == b;
  r.detail = std::to_string(std::count(a.begin(), a.end(), '\n') - 1) + " rows, " +
             std::to_string(a.size()) + " bytes, identical: " + (r.pass ? "yes" : "no");
}

struct Criterion {
  int id;
  const char* name;
  double limit;
  Check check;
};

const Criterion kCriteria[] = {
    {1, "PowerApprox sandwich", 5, power_approx_sandwich},
    {2, "LazySampling law", 10, lazy_sampling_law},
    {3, "L1Sampling contract", 30, l1_contract},
    {4, "GreaterThan", 30, greater_than_check},
    {5, "EfficientCommunication", 60, efficient_communication_check},
    {6, "Morris/DistMorris", 60, morris_check},
    {7, "Bicriteria quality", 180, bicriteria_quality},
    {8, "End-to-end coreset guarantee", 600, coreset_guarantee},
    {9, "Communication scaling", 300, communication_scaling},
    {10, "Experiment reproduction", 300, experiment_reproduction},
    {11, "Determinism", 600, determinism},
};

}  // namespace

std::string determinism_csv(std::uint64_t seed) {
  const Dataset x = mixture_points(3, 200, 8, seed);
  std::vector<ResultRow> rows;
  ExperimentConfig cfg;
  cfg.k = 3;
  cfg.seed = seed;
  for (const char* algo : {"mp", "as", "eas", "as-jl", "eas-jl"}) {
    cfg.algo = algo;
    for (auto& row : run_sweep(x, cfg, {1, 2, 3})) rows.push_back(std::move(row));
  }
  cfg.algo = "coreset";
  cfg.c = 1;
  cfg.eps = 0.4;
  cfg.c_m = 1;
  for (const char* model : {"blackboard", "coordinator"}) {
    cfg.model = model;
    rows.push_back(run_experiment(x, cfg));
  }
  return format_csv(rows);
}

std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& opts, const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> out;
  for (const auto& c : kCriteria) {
    if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), c.id) == opts.only.end())
      continue;
    CriterionResult r;
    r.id = c.id;
    r.name = c.name;
    r.time_limit = c.limit;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.check(opts, r);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.seconds >= r.time_limit) {
      r.pass = false;
      r.detail += "; over time limit";
    }
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_criterion(const CriterionResult& r) {
  return std::string(r.pass ? "PASS" : "FAIL") + "  criterion " + std::to_string(r.id) + " " +
         r.name + ": " + r.detail + " [" + fmt(r.seconds, 3) + " s / limit " + fmt(r.time_limit, 3) +
         " s]";
}

}  // namespace distclust
