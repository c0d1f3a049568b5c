#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace distclust {

using Point = std::vector<double>;

struct WeightedPoint {
  Point coords;
  double weight = 1.0;
};

using Dataset = std::vector<WeightedPoint>;

struct SiteDataset {
  int site_id = 1;
  Dataset points;
};

/// Ordered center list. The position of a center is its wire identifier,
/// so callers must never reorder an existing set.
struct CenterSet {
  std::vector<Point> points;
  double z = 2.0;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
  const Point& operator[](std::size_t i) const { return points[i]; }
  void add(Point p) { points.push_back(std::move(p)); }
};

struct NearestCenter {
  std::size_t index = 0;
  double cost = 0.0;
};

struct ClusterStats {
  std::vector<double> sizes;  // total weight per center
  std::vector<double> costs;  // total weighted z-cost per center
  std::vector<std::size_t> assignment;
};

/// Communicated scalars are fixed-point integers with this many fractional bits.
inline constexpr int kFixedBits = 24;
std::int64_t to_fixed(double v);
inline double from_fixed(std::int64_t v) { return std::ldexp(static_cast<double>(v), -kFixedBits); }
inline double quantize(double v) { return from_fixed(to_fixed(v)); }

std::size_t dimension_of(const Dataset& points);

/// ||x - y||_2^z. Exact (no square root) for z == 2.
double dist_pow(std::span<const double> x, std::span<const double> y, double z);

/// Lowest index attaining the minimum cost.
NearestCenter nearest_center(std::span<const double> x, const CenterSet& centers);

double total_weight(const Dataset& points);

// Data-parallel kernels. Per-point work runs under OpenMP; every reduction
// is done serially in index order, so results are bit-identical to the
// reference implementations in `serial`.
std::vector<NearestCenter> assign_all(const Dataset& points, const CenterSet& centers);
double clustering_cost(const Dataset& points, const CenterSet& centers);
ClusterStats partition_clusters(const Dataset& points, const CenterSet& centers);

/// min_cost[i] <- min(min_cost[i], dist_pow(points[i], center, z)).
void update_min_costs(const Dataset& points, std::span<const double> center, double z,
                      std::span<double> min_cost);

namespace serial {

std::vector<NearestCenter> assign_all(const Dataset& points, const CenterSet& centers);
double clustering_cost(const Dataset& points, const CenterSet& centers);
ClusterStats partition_clusters(const Dataset& points, const CenterSet& centers);
void update_min_costs(const Dataset& points, std::span<const double> center, double z,
                      std::span<double> min_cost);

}  // namespace serial

}  // namespace distclust
