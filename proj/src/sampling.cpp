#include "distclust/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "distclust/errors.hpp"

namespace distclust {

DiscreteSampler::DiscreteSampler(std::span<const double> mass) {
  cumulative_.reserve(mass.size());
  double run = 0.0;
  for (double m : mass) {
    if (m < 0.0 || std::isnan(m)) throw StructuralError("negative sampling mass");
    run += m;
    cumulative_.push_back(run);
  }
}

std::size_t DiscreteSampler::draw(Rng& rng) const {
  const double t = total();
  if (!(t > 0.0)) throw StructuralError("cannot sample from zero total mass");
  const double u = rng.uniform() * t;
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());
  if (i < cumulative_.size()) return i;
  // u rounded up to the total: take the last entry with positive mass.
  i = cumulative_.size() - 1;
  while (i > 0 && cumulative_[i] == cumulative_[i - 1]) --i;
  return i;
}

std::size_t draw_proportional(std::span<const double> mass, Rng& rng) {
  return DiscreteSampler(mass).draw(rng);
}

AdaptiveResult adaptive_sampling(const Dataset& points, double z, std::size_t rounds, Rng& rng) {
  if (points.empty()) throw StructuralError("adaptive sampling needs a nonempty input");
  AdaptiveResult out;
  out.centers.z = z;
  std::vector<double> mass(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) mass[i] = points[i].weight;
  std::size_t pick = draw_proportional(mass, rng);

  std::vector<double> min_cost(points.size(), std::numeric_limits<double>::infinity());
  for (std::size_t t = 0;; ++t) {
    out.centers.add(points[pick].coords);
    out.indices.push_back(pick);
    if (t == rounds) break;
    update_min_costs(points, points[pick].coords, z, min_cost);
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      mass[i] = points[i].weight * min_cost[i];
      total += mass[i];
    }
    if (!(total > 0.0)) break;
    pick = draw_proportional(mass, rng);
  }
  return out;
}

SensitivityStats exact_stats(const ClusterStats& stats) {
  SensitivityStats s;
  s.cluster_sizes = stats.sizes;
  s.cluster_costs = stats.costs;
  for (double c : stats.costs) s.total_cost += c;
  s.k = static_cast<double>(stats.sizes.size());
  return s;
}

double sensitivity(std::size_t j, double cost_x, const SensitivityStats& stats) {
  if (j >= stats.cluster_sizes.size() || j >= stats.cluster_costs.size())
    throw StructuralError("cluster index out of range");
  const double size = stats.cluster_sizes[j];
  const double cost_j = stats.cluster_costs[j];
  if (!(size > 0.0)) throw DegenerateClusterError("cluster " + std::to_string(j) + " has zero size");
  if (!(stats.total_cost > 0.0)) throw DegenerateClusterError("total cost is zero");
  double mu = 1.0 / (stats.k * size);
  if (cost_j > 0.0) mu += cost_x / (stats.k * cost_j);
  mu += cost_x / stats.total_cost;
  mu += (cost_j / size) / stats.total_cost;
  return 0.25 * mu;
}

Dataset sensitivity_sampling(const Dataset& points, const CenterSet& centers,
                             std::span<const NearestCenter> assignment,
                             const SensitivityStats& stats, std::size_t m, Rng& rng) {
  if (m == 0) throw StructuralError("coreset size must be positive");
  if (assignment.size() != points.size()) throw StructuralError("assignment size mismatch");
  Dataset out;
  if (points.empty()) return out;
  if (!(stats.total_cost > 0.0)) {
    std::vector<double> weight(centers.size(), 0.0);
    for (std::size_t i = 0; i < points.size(); ++i) weight[assignment[i].index] += points[i].weight;
    for (std::size_t j = 0; j < centers.size(); ++j)
      if (weight[j] > 0.0) out.push_back({centers[j], weight[j]});
    return out;
  }
  std::vector<double> mu(points.size()), mass(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    mu[i] = sensitivity(assignment[i].index, assignment[i].cost, stats);
    mass[i] = points[i].weight * mu[i];
  }
  const DiscreteSampler sampler(mass);
  const double z_total = sampler.total();
  out.reserve(m);
  for (std::size_t t = 0; t < m; ++t) {
    const std::size_t i = sampler.draw(rng);
    out.push_back({points[i].coords, z_total / (static_cast<double>(m) * mu[i])});
  }
  return out;
}

Dataset sensitivity_sampling(const Dataset& points, const CenterSet& centers, std::size_t m,
                             Rng& rng) {
  if (points.empty()) return {};
  const ClusterStats cs = partition_clusters(points, centers);
  const auto assignment = assign_all(points, centers);
  return sensitivity_sampling(points, centers, assignment, exact_stats(cs), m, rng);
}

std::size_t coreset_sample_size(std::size_t k, double z, double eps, double c_m) {
  if (!(eps > 0.0 && eps < 1.0)) throw StructuralError("eps must lie in (0,1)");
  const double denom = std::min(std::pow(eps, 4.0), std::pow(eps, 2.0 + z));
  const double kk = static_cast<double>(std::max<std::size_t>(k, 1));
  const double log_term = std::max(1.0, std::log(kk / eps));
  return static_cast<std::size_t>(std::ceil(c_m * kk / denom * log_term));
}

std::uint32_t morris_step(std::uint32_t r, std::uint64_t count, Rng& rng) {
  while (count > 0) {
    if (r == 0) {
      r = 1;
      --count;
      continue;
    }
    // Number of trials up to and including the next success, geometric with
    // success probability 2^-r.
    const double p = std::ldexp(1.0, -static_cast<int>(r));
    const double g = std::floor(std::log(rng.uniform_open_zero()) / std::log1p(-p)) + 1.0;
    if (g > static_cast<double>(count)) break;
    count -= static_cast<std::uint64_t>(g);
    ++r;
  }
  return r;
}

double morris_estimate(std::span<const std::uint32_t> counters) {
  if (counters.empty()) throw StructuralError("morris_estimate needs at least one counter");
  double sum = 0.0;
  for (auto x : counters) sum += std::ldexp(1.0, static_cast<int>(x)) - 1.0;
  return sum / static_cast<double>(counters.size());
}

std::size_t morris_replicas(std::size_t quantities) {
  return static_cast<std::size_t>(
      std::ceil(32.0 * std::log(100.0 * static_cast<double>(std::max<std::size_t>(quantities, 1)))));
}

}  // namespace distclust
