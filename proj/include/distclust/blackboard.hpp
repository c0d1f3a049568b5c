#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "distclust/encoding.hpp"
#include "distclust/fabric.hpp"
#include "distclust/geometry.hpp"
#include "distclust/random.hpp"

namespace distclust {

/// Grid coordinates in [1, Delta] travel as (value - 1) in index_width(Delta) bits.
void append_grid_point(BitString& out, std::span<const double> coords, std::uint64_t delta);
Point read_grid_point(BitReader& in, std::size_t d, std::uint64_t delta);
std::uint64_t grid_delta(const std::vector<SiteDataset>& sites);

/// One lazy draw: the site chosen by the coordinator and, unless the site
/// answered with bottom, the index of the point it returned.
struct LazyOutcome {
  int site = 0;  // 0-based
  std::optional<std::size_t> index;
};

using PointWriter = std::function<void(BitString&, int site, std::size_t index)>;

/// `batch` lazy draws against fixed masses. The coordinator posts all chosen
/// site indices in one message (sites drawn proportional to the decoded
/// codes); each chosen site answers in one message carrying a flag bit per
/// draw plus, for successes, the point written by `write_point`.
/// masses[j][x] is d_x at site j; codes[j] encodes the stale total of site j.
std::vector<LazyOutcome> lazy_sampling(Blackboard& board,
                                       const std::vector<std::vector<double>>& masses,
                                       const std::vector<ExponentCode>& codes, std::size_t batch,
                                       Rng& coordinator, std::vector<Rng>& site_rngs,
                                       const PointWriter& write_point = {});

struct L1Params {
  double mu = 8.0;
  double delta = 0.01;
};

/// ceil(8 ln(2/delta)).
std::size_t l1_rounds(double delta);

/// Tests whether the stale total exceeds the true total by a large factor.
/// Returns true iff 2mu * T <= N * Dtilde where T sums lambda^{r_j}/p_j over
/// N sampled sites with lambda = mu/4.
bool l1_sampling(Blackboard& board, const std::vector<ExponentCode>& codes,
                 const std::vector<double>& site_costs, const L1Params& params, Rng& coordinator);

/// Distributed Morris counting of N_j = sum_i counts[i][j]. Sites post in
/// order, one per round; unchanged sites post a single 0 bit.
std::vector<double> dist_morris(Blackboard& board,
                                const std::vector<std::vector<std::uint64_t>>& counts,
                                std::vector<Rng>& site_rngs);

/// Public unit for turning real cluster costs into Morris counts: a power of
/// two chosen so that the largest possible cost stays below 2^62 units.
double morris_cost_unit(double n, std::size_t d, double delta, double z);

struct BlackboardConfig {
  std::size_t k = 3;
  double z = 2.0;
  double eps = 0.2;
  std::uint64_t seed = 1;
  std::uint64_t delta = 0;        // grid side; 0 means the largest coordinate
  std::size_t rounds_per_k = 4;   // N = rounds_per_k * k
  double mu = 8.0;
  double c_m = 8.0;
  double offset_eps = 0.0;        // 0 means default_offset_eps
};

struct LargeKStats {
  std::size_t credited = 0;
  std::size_t successes = 0;
  std::size_t batches = 0;
  std::size_t refreshes = 0;
};

struct CoresetResult {
  CenterSet centers;  // reference set the encoded indices point into
  std::vector<EncodedPoint> encoded;
  Dataset points;     // decoded at the receiving party
  OffsetCodec codec;
  std::size_t sample_size = 0;
};

/// One blackboard simulation. Parties: coordinator (0) and sites 1..s; all
/// of them read the board, so S and the posted codes are common knowledge.
class BlackboardSession {
 public:
  BlackboardSession(const std::vector<SiteDataset>& sites, BlackboardConfig cfg);

  Blackboard& board() noexcept { return board_; }
  const CenterSet& centers() const noexcept { return centers_; }
  const std::vector<ExponentCode>& codes() const noexcept { return codes_; }
  double site_cost(std::size_t j) const { return site_cost_[j]; }
  double dtilde(std::size_t j) const { return power_decode(codes_[j], 2.0); }
  std::size_t total_points() const noexcept { return n_; }
  std::uint64_t delta() const noexcept { return delta_; }
  const BlackboardConfig& config() const noexcept { return cfg_; }

  /// Sizes, uniform first center, and every site's initial code.
  void initialize();
  /// Every site recomputes its code and reposts it only if it changed.
  void refresh_codes();

  CenterSet bicriteria_small_k();
  CenterSet bicriteria_large_k();
  const LargeKStats& large_k_stats() const noexcept { return large_k_; }

  /// Sensitivity-sampling coreset against the current centers.
  CoresetResult coreset();

 private:
  void add_center(const Point& p);
  std::size_t lazy_and_add(std::size_t batch);
  std::vector<std::vector<double>> masses() const;

  const std::vector<SiteDataset>* sites_;
  BlackboardConfig cfg_;
  Blackboard board_;
  Rng coordinator_;
  std::vector<Rng> site_rngs_;
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::uint64_t delta_ = 0;
  CenterSet centers_;
  std::vector<std::vector<double>> min_cost_;  // site-local d_x / w(x)
  std::vector<double> site_cost_;
  std::vector<ExponentCode> codes_;
  LargeKStats large_k_;
};

enum class BicriteriaVariant { Auto, SmallK, LargeK };

struct PipelineResult {
  CenterSet bicriteria;
  CoresetResult coreset;
  std::uint64_t bits = 0;
  std::size_t rounds = 0;
  nlohmann::json ledger;
};

/// Initialization, bicriteria, coreset. Auto picks small-k when k <= log2 n.
PipelineResult run_blackboard_pipeline(const std::vector<SiteDataset>& sites,
                                       const BlackboardConfig& cfg,
                                       BicriteriaVariant variant = BicriteriaVariant::Auto);

}  // namespace distclust
