#include "distclust/geometry.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "distclust/errors.hpp"

namespace distclust {
namespace {

void require_centers(const CenterSet& centers) {
  if (centers.empty()) throw StructuralError("center set is empty");
}

void require_same_dim(std::size_t a, std::size_t b) {
  if (a != b) {
    throw StructuralError("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

void check_dimensions(const Dataset& points, const CenterSet& centers) {
  require_centers(centers);
  const std::size_t d = centers[0].size();
  for (const auto& c : centers.points) require_same_dim(c.size(), d);
  for (const auto& p : points) require_same_dim(p.coords.size(), d);
}

inline double dist_pow_unchecked(const double* x, const double* y, std::size_t d, double z) {
  double sq = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double diff = x[i] - y[i];
    sq += diff * diff;
  }
  if (z == 2.0) return sq;
  if (z == 1.0) return std::sqrt(sq);
  return std::pow(std::sqrt(sq), z);
}

inline NearestCenter nearest_unchecked(const double* x, std::size_t d, const CenterSet& centers) {
  NearestCenter best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t j = 0; j < centers.size(); ++j) {
    const double c = dist_pow_unchecked(x, centers[j].data(), d, centers.z);
    if (c < best.cost) best = {j, c};
  }
  return best;
}

ClusterStats aggregate(const Dataset& points, const CenterSet& centers,
                       const std::vector<NearestCenter>& nearest) {
  ClusterStats stats;
  stats.sizes.assign(centers.size(), 0.0);
  stats.costs.assign(centers.size(), 0.0);
  stats.assignment.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [j, c] = nearest[i];
    stats.assignment[i] = j;
    stats.sizes[j] += points[i].weight;
    stats.costs[j] += points[i].weight * c;
  }
  return stats;
}

double weighted_sum(const Dataset& points, const std::vector<NearestCenter>& nearest) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) total += points[i].weight * nearest[i].cost;
  return total;
}

}  // namespace

std::int64_t to_fixed(double v) {
  const double scaled = std::ldexp(v, kFixedBits);
  if (!std::isfinite(scaled) || std::fabs(scaled) >= 0x1.0p62)
    throw StructuralError("value out of fixed-point range");
  return std::llround(scaled);
}

std::size_t dimension_of(const Dataset& points) {
  if (points.empty()) return 0;
  const std::size_t d = points.front().coords.size();
  for (const auto& p : points) require_same_dim(p.coords.size(), d);
  return d;
}

double dist_pow(std::span<const double> x, std::span<const double> y, double z) {
  require_same_dim(x.size(), y.size());
  return dist_pow_unchecked(x.data(), y.data(), x.size(), z);
}

NearestCenter nearest_center(std::span<const double> x, const CenterSet& centers) {
  require_centers(centers);
  for (const auto& c : centers.points) require_same_dim(c.size(), x.size());
  return nearest_unchecked(x.data(), x.size(), centers);
}

double total_weight(const Dataset& points) {
  double w = 0.0;
  for (const auto& p : points) w += p.weight;
  return w;
}

std::vector<NearestCenter> assign_all(const Dataset& points, const CenterSet& centers) {
  check_dimensions(points, centers);
  const std::size_t d = centers[0].size();
  const auto n = static_cast<std::ptrdiff_t>(points.size());
  std::vector<NearestCenter> out(points.size());
#pragma omp parallel for schedule(static) if (n > 2048)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = nearest_unchecked(points[i].coords.data(), d, centers);
  }
  return out;
}

double clustering_cost(const Dataset& points, const CenterSet& centers) {
  return weighted_sum(points, assign_all(points, centers));
}

ClusterStats partition_clusters(const Dataset& points, const CenterSet& centers) {
  return aggregate(points, centers, assign_all(points, centers));
}

void update_min_costs(const Dataset& points, std::span<const double> center, double z,
                      std::span<double> min_cost) {
  require_same_dim(points.size(), min_cost.size());
  for (const auto& p : points) require_same_dim(p.coords.size(), center.size());
  const auto n = static_cast<std::ptrdiff_t>(points.size());
  const std::size_t d = center.size();
#pragma omp parallel for schedule(static) if (n > 2048)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double c = dist_pow_unchecked(points[i].coords.data(), center.data(), d, z);
    if (c < min_cost[i]) min_cost[i] = c;
  }
}

namespace serial {

std::vector<NearestCenter> assign_all(const Dataset& points, const CenterSet& centers) {
  check_dimensions(points, centers);
  const std::size_t d = centers[0].size();
  std::vector<NearestCenter> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(nearest_unchecked(p.coords.data(), d, centers));
  return out;
}

double clustering_cost(const Dataset& points, const CenterSet& centers) {
  return weighted_sum(points, serial::assign_all(points, centers));
}

ClusterStats partition_clusters(const Dataset& points, const CenterSet& centers) {
  return aggregate(points, centers, serial::assign_all(points, centers));
}

void update_min_costs(const Dataset& points, std::span<const double> center, double z,
                      std::span<double> min_cost) {
  require_same_dim(points.size(), min_cost.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double c = dist_pow(points[i].coords, center, z);
    if (c < min_cost[i]) min_cost[i] = c;
  }
}

}  // namespace serial
}  // namespace distclust
