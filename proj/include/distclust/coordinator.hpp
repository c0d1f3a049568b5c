#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "distclust/fabric.hpp"
#include "distclust/geometry.hpp"
#include "distclust/random.hpp"

namespace distclust {

// ---------------------------------------------------------------------------
// Seeded sparse sign projection.

struct JlSketch {
  std::size_t d = 0;
  std::size_t d_out = 0;
  std::size_t sparsity = 0;
  BitString seed;
  bool identity = true;
  // Column c has nonzeros at rows[c*sparsity + r] with value signs[...] / sqrt(sparsity).
  std::vector<std::uint32_t> rows;
  std::vector<std::int8_t> signs;
};

/// ceil(c_j * log2(points)); the caller passes s*k for the pooled set size.
std::size_t jl_dimension(std::size_t pooled_points, double c_j = 16.0);

/// Seed length 8 * ceil(log2(d_out * 100 * pool)) * ceil(log2 d).
std::size_t jl_seed_bits(std::size_t d, std::size_t d_out, std::size_t pool);

/// Reconstructs the matrix from the seed bits; identical at every party.
JlSketch jl_from_seed(const BitString& seed, std::size_t d, std::size_t d_out);
JlSketch jl_identity(std::size_t d);
/// Draws seed bits from `rng`; identity when d_out >= d.
JlSketch make_jl(std::size_t d, std::size_t d_out, std::size_t pool, Rng& rng);

/// Linear map followed by fixed-point quantization.
Point jl_project(const JlSketch& sketch, std::span<const double> x);

// ---------------------------------------------------------------------------
// Approximate point transfer.

/// Per-dimension sorted coordinate values held by the receiving party.
/// Building it is local work and costs no communication.
class SortedViews {
 public:
  SortedViews() = default;
  SortedViews(const std::vector<Point>& points, std::size_t d);
  void insert(std::span<const double> p);
  std::size_t size() const noexcept { return count_; }
  std::size_t dimension() const noexcept { return dims_.size(); }
  const std::vector<std::int64_t>& dim(std::size_t i) const { return dims_[i]; }

 private:
  std::vector<std::vector<std::int64_t>> dims_;
  std::size_t count_ = 0;
};

struct EcContext {
  double eps = 0.5;
  double delta_prime = 0.01;
  std::int64_t bound = 0;   // sentinel magnitude, fixed-point
  std::int64_t offset = 0;  // shift applied before comparisons
  unsigned width = 0;
  std::vector<std::int64_t> grid;   // strictly increasing fixed-point (1+eps)^t
  std::vector<std::int32_t> grid_t;
};

/// delta' = delta / (d * (ceil(log2 l) + ceil(log2 log2 Delta) + ceil(log2(1/eps)) + 8)).
double ec_delta_prime(double delta, std::size_t d, std::size_t ell, double grid_side, double eps);

/// `bound` caps |coordinate| in real units; `grid_side` is Delta.
EcContext make_ec_context(double eps, double delta, std::size_t d, std::size_t ell, double bound,
                          double grid_side);

struct EcCoordinate {
  std::size_t slot = 0;     // position among sentinels and sorted values
  int sign = 0;
  std::int32_t exponent = 0;
};

struct EcResult {
  Point approx;
  std::vector<EcCoordinate> path;
};

/// Delivers an approximation of `y` (held by `sender`) to `holder`, which
/// owns `views`. Per dimension: binary search for the nearest holder value
/// (sentinels +-bound), a three-way test against it, and a binary search
/// over the offset grid, all with high-probability comparisons.
EcResult efficient_communication(Link& link, PartyId holder, const SortedViews& views,
                                 PartyId sender, std::span<const double> y, const EcContext& ctx,
                                 std::string_view kind = "ec");

// ---------------------------------------------------------------------------
// Coordinator-model pipeline.

struct CoordinatorConfig {
  std::size_t k = 3;
  double z = 2.0;
  double eps = 0.25;
  std::uint64_t seed = 1;
  std::uint64_t delta = 0;       // grid side; 0 means the largest coordinate
  std::size_t rounds_per_k = 4;
  double c_m = 8.0;
  double c_local = 8.0;          // local coreset size coefficient
  double c_j = 16.0;
  double center_eps = 0.0;       // 0 means min(0.5, eps^z / 8)
};

/// Local (1+eps/2)-coreset; inputs no larger than the target pass through.
Dataset local_coreset(const Dataset& points, std::size_t k, double z, double eps, double c_local,
                      Rng& rng);

struct CoordinatorResult {
  CenterSet bicriteria;     // exact centers at the coordinator
  Dataset coreset;          // decoded points with weights
  std::size_t sample_size = 0;
  std::uint64_t bits = 0;
  std::size_t rounds = 0;
  nlohmann::json ledger;
  std::vector<std::vector<TranscriptEntry>> transcripts;  // per site
  std::vector<Dataset> local_coresets;
  std::vector<CenterSet> site_centers;  // approximate projected centers per site
  JlSketch sketch;
};

enum class CoordinatorStage { Bicriteria, Coreset };

CoordinatorResult run_coordinator_pipeline(const std::vector<SiteDataset>& sites,
                                           const CoordinatorConfig& cfg,
                                           CoordinatorStage stop_after = CoordinatorStage::Coreset);

}  // namespace distclust
