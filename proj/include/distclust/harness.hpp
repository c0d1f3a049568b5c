#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "distclust/fabric.hpp"
#include "distclust/geometry.hpp"
#include "distclust/random.hpp"

namespace distclust {

// ---------------------------------------------------------------------------
// Datasets.

struct MixtureSpec {
  std::size_t k = 5;
  std::size_t points_per_cluster = 100;
  std::size_t d = 2;
  double mean_range = 10.0;   // means uniform in [-mean_range, mean_range]^d
  std::uint64_t delta = 0;    // grid side; 0 means n^2
  std::uint64_t seed = 1;
};

struct Mixture {
  Dataset points;
  std::vector<Point> planted;      // component means on the grid
  std::vector<std::size_t> labels;
  std::uint64_t delta = 0;
  double scale = 1.0;              // grid units per unit of the real-valued draw
};

/// Gaussian components with random positive-definite covariances, mapped
/// by one isotropic affine map onto the integer grid [1, delta]^d.
Mixture gen_gaussian_mixture(const MixtureSpec& spec);

/// Round-robin split into s sites with ids 1..s.
std::vector<SiteDataset> partition_round_robin(const Dataset& points, std::size_t s);
Dataset pool_sites(const std::vector<SiteDataset>& sites);

/// Comma-separated numeric rows. Values are rounded to integers and every
/// column is shifted by one common amount so the smallest entry becomes 1.
/// With `weight_column` the last column is the point weight instead.
Dataset load_csv_dataset(const std::string& path, bool weight_column = false);

/// "synthetic:k=3,per=640,d=8,range=10,seed=7" or a CSV path.
Dataset load_dataset(const std::string& spec, std::uint64_t default_seed);

// ---------------------------------------------------------------------------
// Experiment baselines. Bits are billed on a ledger at fixed per-coordinate
// prices with no framing.

inline constexpr unsigned kRawCoordinateBits = 32;
inline constexpr unsigned kQuantizedCoordinateBits = 5;

struct BaselineResult {
  CenterSet centers;
  BitLedger ledger;
  std::size_t rounds = 0;
};

/// Uniform k candidates per round and a covering radius that doubles each
/// round, for ceil(c log2 n) rounds or until nothing is left to cover.
BaselineResult mp_baseline(const Dataset& points, std::size_t k, double z, double c, Rng& rng);

/// Adaptive sampling with c*k centers in total.
BaselineResult as_baseline(const Dataset& points, std::size_t k, double z, double c, Rng& rng);

/// sign * q^round(log_q |v|) per coordinate, measured from `origin`; zero stays zero.
double eas_round(double v, double q);
CenterSet eas_quantize(const CenterSet& centers, double q, const Point& origin = {});

/// Adaptive sampling run against projected data. Dense Gaussian map to
/// d_prime dimensions; `quantize_q` > 1 rounds each broadcast projected
/// center to powers of q before it steers later draws. The returned
/// centers are the original points that were drawn.
BaselineResult as_jl_baseline(const Dataset& points, std::size_t k, double z, double c,
                              std::size_t d_prime, double quantize_q, Rng& rng);

// ---------------------------------------------------------------------------
// Oracles.

struct OptProxy {
  double cost = 0.0;
  CenterSet best;
  std::vector<CenterSet> solutions;  // one per restart
};

/// D^z seeding followed by 100 rounds of local improvement: Lloyd steps
/// for z = 2, medoid steps otherwise. Best over `restarts`.
OptProxy opt_proxy(const Dataset& points, std::size_t k, double z, Rng& rng,
                   std::size_t restarts = 20, std::size_t iterations = 100);

/// 200 random k-subsets, the proxy solutions, and perturbed copies of them.
std::vector<CenterSet> build_probes(const Dataset& points, std::size_t k, double z, Rng& rng,
                                    std::size_t random_subsets = 200,
                                    const OptProxy* proxy = nullptr);

struct QualityReport {
  bool pass = false;
  double max_deviation = 0.0;
};

QualityReport coreset_quality_check(const Dataset& original, const Dataset& coreset, double eps,
                                    const std::vector<CenterSet>& probes);

// ---------------------------------------------------------------------------
// Experiment driver.

struct ExperimentConfig {
  std::string model = "centralized";   // blackboard | coordinator | centralized
  std::string algo = "as";             // mp | as | eas | as-jl | eas-jl | coreset
  std::size_t k = 3;
  double z = 2.0;
  double eps = 0.2;
  std::size_t s = 4;
  std::size_t d_prime = 0;             // 0 means d / 4 (at least 1)
  double q = 1.189207115002721;        // 2^0.25
  double c = 1.0;
  std::uint64_t seed = 1;
  std::uint64_t delta = 0;
  double c_m = 8.0;
};

struct ResultRow {
  ExperimentConfig config;
  std::size_t n = 0;
  std::size_t d = 0;
  double cost = 0.0;
  std::uint64_t bits = 0;
  std::uint64_t ledger_recount = 0;
  std::size_t rounds = 0;
  std::size_t coreset_size = 0;
};

ResultRow run_experiment(const Dataset& points, const ExperimentConfig& cfg);

/// One row per c value, in increasing c.
std::vector<ResultRow> run_sweep(const Dataset& points, const ExperimentConfig& base,
                                 const std::vector<double>& cs);

std::string format_csv(const std::vector<ResultRow>& rows);
std::string format_json(const std::vector<ResultRow>& rows);
/// format is "csv" or "json"; I/O failures raise std::runtime_error naming the path.
void emit_results(const std::vector<ResultRow>& rows, const std::string& path,
                  const std::string& format);

}  // namespace distclust
