#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "distclust/geometry.hpp"
#include "distclust/random.hpp"

namespace distclust {

/// Index drawn with probability proportional to mass[i]. Requires a positive total.
std::size_t draw_proportional(std::span<const double> mass, Rng& rng);

/// Cumulative masses for repeated draws from one distribution.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(std::span<const double> mass);
  std::size_t draw(Rng& rng) const;
  double total() const noexcept { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

 private:
  std::vector<double> cumulative_;
};

struct AdaptiveResult {
  CenterSet centers;
  std::vector<std::size_t> indices;  // positions in the input
};

/// Default number of adaptive draws after the first: 4k.
inline std::size_t default_adaptive_rounds(std::size_t k) { return 4 * k; }

/// First center proportional to weight, then up to `rounds` centers drawn
/// proportional to w(x) * Cost(x, S) using exact costs. Stops early once
/// every point is covered at zero cost.
AdaptiveResult adaptive_sampling(const Dataset& points, double z, std::size_t rounds, Rng& rng);

struct SensitivityStats {
  std::vector<double> cluster_sizes;
  std::vector<double> cluster_costs;
  double total_cost = 0.0;
  double k = 1.0;
};

SensitivityStats exact_stats(const ClusterStats& stats);

/// 1/4 * (1/(k|C_j|) + cost_x/(k Cost(C_j)) + cost_x/Cost(X) + avg_cost_j/Cost(X)).
/// Terms whose cost denominator is zero are taken as zero; an empty cluster
/// or a zero total cost raises DegenerateClusterError.
double sensitivity(std::size_t j, double cost_x, const SensitivityStats& stats);

/// m independent draws with p(x) proportional to w(x) * mu(x); a draw of x is
/// weighted w(x) / (m p(x)), so total weight is unbiased. If the total cost
/// is zero the covered centers are returned with their cluster weights.
Dataset sensitivity_sampling(const Dataset& points, const CenterSet& centers,
                             std::span<const NearestCenter> assignment,
                             const SensitivityStats& stats, std::size_t m, Rng& rng);

/// Convenience overload computing exact assignment and statistics.
Dataset sensitivity_sampling(const Dataset& points, const CenterSet& centers, std::size_t m,
                             Rng& rng);

/// Coreset size ceil(c_m * k / min(eps^4, eps^(2+z)) * ln(k/eps)).
std::size_t coreset_sample_size(std::size_t k, double z, double eps, double c_m);

/// Applies `count` Morris increments to register r (increment w.p. 2^-r).
std::uint32_t morris_step(std::uint32_t r, std::uint64_t count, Rng& rng);
double morris_estimate(std::span<const std::uint32_t> counters);

/// Replicas per quantity for k' estimated quantities: ceil(32 ln(100 k')).
std::size_t morris_replicas(std::size_t quantities);

}  // namespace distclust
