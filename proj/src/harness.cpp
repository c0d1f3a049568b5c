#include "distclust/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "distclust/blackboard.hpp"
#include "distclust/bitio.hpp"
#include "distclust/coordinator.hpp"
#include "distclust/encoding.hpp"
#include "distclust/errors.hpp"
#include "distclust/sampling.hpp"

namespace distclust {

namespace {

// Lower-triangular L with L L^T = a (row-major, d x d).
std::vector<double> cholesky(const std::vector<double>& a, std::size_t d) {
  std::vector<double> l(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = a[i * d + j];
      for (std::size_t t = 0; t < j; ++t) sum -= l[i * d + t] * l[j * d + t];
      if (i == j) {
        if (sum <= 0.0) throw StructuralError("covariance is not positive definite");
        l[i * d + i] = std::sqrt(sum);
      } else {
        l[i * d + j] = sum / l[j * d + j];
      }
    }
  }
  return l;
}

}  // namespace

Mixture gen_gaussian_mixture(const MixtureSpec& spec) {
  if (spec.k == 0 || spec.points_per_cluster == 0 || spec.d == 0 || !(spec.mean_range > 0.0))
    throw StructuralError("mixture parameters must be positive");
  const std::size_t d = spec.d;
  const std::size_t n = spec.k * spec.points_per_cluster;
  Rng rng(derive_seed(spec.seed, "mixture"));
  std::vector<Point> means(spec.k, Point(d));
  std::vector<std::vector<double>> factors(spec.k);
  for (std::size_t c = 0; c < spec.k; ++c) {
    for (auto& v : means[c]) v = (2.0 * rng.uniform() - 1.0) * spec.mean_range;
    std::vector<double> a(d * d), cov(d * d, 0.0);
    for (auto& v : a) v = rng.normal();
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t t = 0; t < d; ++t) cov[i * d + j] += a[i * d + t] * a[j * d + t];
        cov[i * d + j] /= static_cast<double>(d);
      }
    for (std::size_t i = 0; i < d; ++i) cov[i * d + i] += 0.25;
    factors[c] = cholesky(cov, d);
  }
  std::vector<Point> raw(n, Point(d));
  Mixture out;
  out.labels.resize(n);
  std::vector<double> g(d);
  for (std::size_t i = 0; i < n; ++i) {
    // Components interleave so that any prefix is balanced.
    const std::size_t c = i % spec.k;
    out.labels[i] = c;
    for (auto& v : g) v = rng.normal();
    for (std::size_t r = 0; r < d; ++r) {
      double v = means[c][r];
      for (std::size_t t = 0; t <= r; ++t) v += factors[c][r * d + t] * g[t];
      raw[i][r] = v;
    }
  }
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& p : raw)
    for (double v : p) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  out.delta = spec.delta ? spec.delta : static_cast<std::uint64_t>(n) * n;
  out.scale = hi > lo ? static_cast<double>(out.delta - 1) / (hi - lo) : 1.0;
  const auto to_grid = [&](double v) {
    return std::clamp(1.0 + std::round((v - lo) * out.scale), 1.0, static_cast<double>(out.delta));
  };
  out.points.reserve(n);
  for (const auto& p : raw) {
    Point q(d);
    std::transform(p.begin(), p.end(), q.begin(), to_grid);
    out.points.push_back({std::move(q), 1.0});
  }
  for (const auto& m : means) {
    Point q(d);
    for (std::size_t r = 0; r < d; ++r) q[r] = 1.0 + (m[r] - lo) * out.scale;
    out.planted.push_back(std::move(q));
  }
  return out;
}

std::vector<SiteDataset> partition_round_robin(const Dataset& points, std::size_t s) {
  if (s == 0) throw StructuralError("need at least one site");
  std::vector<SiteDataset> sites(s);
  for (std::size_t j = 0; j < s; ++j) sites[j].site_id = static_cast<int>(j + 1);
  for (std::size_t i = 0; i < points.size(); ++i) sites[i % s].points.push_back(points[i]);
  return sites;
}

Dataset pool_sites(const std::vector<SiteDataset>& sites) {
  Dataset out;
  for (const auto& s : sites) out.insert(out.end(), s.points.begin(), s.points.end());
  return out;
}

Dataset load_csv_dataset(const std::string& path, bool weight_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0, width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (true) {
      const std::size_t end = std::min(line.find(',', pos), line.size());
      std::size_t a = pos, b = end;
      while (a < b && (line[a] == ' ' || line[a] == '\t')) ++a;
      while (b > a && (line[b - 1] == ' ' || line[b - 1] == '\t')) --b;
      double v = 0.0;
      const auto res = std::from_chars(line.data() + a, line.data() + b, v);
      if (a == b || res.ec != std::errc() || res.ptr != line.data() + b || !std::isfinite(v))
        throw ParseError(path, line_no, "non-numeric field '" + line.substr(a, b - a) + "'");
      row.push_back(v);
      if (end == line.size()) break;
      pos = end + 1;
    }
    if (width == 0) width = row.size();
    if (row.size() != width)
      throw StructuralError(path + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(width) + " columns, found " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  Dataset out;
  if (rows.empty()) return out;
  const std::size_t d = weight_column ? width - 1 : width;
  if (d == 0) throw StructuralError(path + ": no coordinate columns");
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& r : rows)
    for (std::size_t i = 0; i < d; ++i) lo = std::min(lo, std::round(r[i]));
  out.reserve(rows.size());
  for (std::size_t li = 0; li < rows.size(); ++li) {
    const auto& r = rows[li];
    WeightedPoint p;
    p.coords.resize(d);
    for (std::size_t i = 0; i < d; ++i) p.coords[i] = std::round(r[i]) - lo + 1.0;
    if (weight_column) {
      p.weight = r[d];
      if (!(p.weight > 0.0)) throw StructuralError(path + ": weights must be positive");
    }
    out.push_back(std::move(p));
  }
  return out;
}

Dataset load_dataset(const std::string& spec, std::uint64_t default_seed) {
  const std::string prefix = "synthetic:";
  if (spec.rfind(prefix, 0) != 0) return load_csv_dataset(spec);
  MixtureSpec m;
  m.seed = default_seed;
  std::stringstream ss(spec.substr(prefix.size()));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw StructuralError("bad synthetic field '" + item + "'");
    const std::string key = item.substr(0, eq), val = item.substr(eq + 1);
    try {
      if (key == "k") m.k = std::stoull(val);
      else if (key == "per") m.points_per_cluster = std::stoull(val);
      else if (key == "d") m.d = std::stoull(val);
      else if (key == "range") m.mean_range = std::stod(val);
      else if (key == "delta") m.delta = std::stoull(val);
      else if (key == "seed") m.seed = std::stoull(val);
      else throw StructuralError("unknown synthetic field '" + key + "'");
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const StructuralError*>(&e)) throw;
      throw StructuralError("bad value in synthetic field '" + item + "'");
    }
  }
  return gen_gaussian_mixture(m).points;
}

// ---------------------------------------------------------------------------

namespace {

std::size_t center_budget(std::size_t k, double c) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(c * static_cast<double>(k))));
}

void require_points(const Dataset& points) {
  if (points.empty()) throw StructuralError("dataset is empty");
}

}  // namespace

BaselineResult mp_baseline(const Dataset& points, std::size_t k, double z, double c, Rng& rng) {
  require_points(points);
  if (!(c >= 1.0)) throw StructuralError("c must be at least 1");
  const std::size_t d = dimension_of(points);
  const double n = static_cast<double>(points.size());
  const auto max_rounds =
      static_cast<std::size_t>(std::max(1.0, std::ceil(c * std::log2(std::max(n, 2.0)))));
  BaselineResult out;
  out.centers.z = z;
  std::vector<std::size_t> alive(points.size());
  std::iota(alive.begin(), alive.end(), 0);
  std::vector<double> nearest(points.size(), std::numeric_limits<double>::infinity());
  double radius = 1.0;
  for (std::size_t t = 0; t < max_rounds && !alive.empty(); ++t) {
    for (std::size_t i = 0; i < k && i < alive.size(); ++i) {
      const std::size_t pick = i + rng.below(alive.size() - i);
      std::swap(alive[i], alive[pick]);
      const Point& p = points[alive[i]].coords;
      out.centers.add(p);
      update_min_costs(points, p, 2.0, nearest);
      out.ledger.bill(1, "mp_center", std::uint64_t{kRawCoordinateBits} * d, 0);
      // Copies of a chosen center stop being candidates at once.
      const auto tail = std::remove_if(alive.begin() + static_cast<std::ptrdiff_t>(i) + 1, alive.end(),
                                       [&](std::size_t j) { return nearest[j] == 0.0; });
      alive.erase(tail, alive.end());
    }
    // Candidates within the current radius of any center are discarded.
    const double r2 = radius * radius;
    std::erase_if(alive, [&](std::size_t i) { return nearest[i] <= r2; });
    radius *= 2.0;
    out.ledger.advance_round();
    ++out.rounds;
  }
  return out;
}

BaselineResult as_baseline(const Dataset& points, std::size_t k, double z, double c, Rng& rng) {
  require_points(points);
  const std::size_t d = dimension_of(points);
  BaselineResult out;
  out.centers = adaptive_sampling(points, z, center_budget(k, c) - 1, rng).centers;
  for (std::size_t i = 0; i < out.centers.size(); ++i) {
    out.ledger.bill(1, "as_center", std::uint64_t{kRawCoordinateBits} * d, 0);
    out.ledger.advance_round();
    ++out.rounds;
  }
  return out;
}

double eas_round(double v, double q) {
  if (!(q > 1.0)) throw StructuralError("quantization base must exceed 1");
  if (v == 0.0) return 0.0;
  const double mag = std::pow(q, static_cast<double>(nearest_exponent(std::fabs(v), q)));
  return v < 0.0 ? -mag : mag;
}

CenterSet eas_quantize(const CenterSet& centers, double q, const Point& origin) {
  CenterSet out;
  out.z = centers.z;
  for (const auto& c : centers.points) {
    if (!origin.empty() && origin.size() != c.size()) throw StructuralError("origin dimension mismatch");
    Point p(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double o = origin.empty() ? 0.0 : origin[i];
      p[i] = o + eas_round(c[i] - o, q);
    }
    out.add(std::move(p));
  }
  return out;
}

BaselineResult as_jl_baseline(const Dataset& points, std::size_t k, double z, double c,
                              std::size_t d_prime, double quantize_q, Rng& rng) {
  require_points(points);
  const std::size_t d = dimension_of(points);
  if (d_prime == 0) throw StructuralError("projection dimension must be positive");
  const bool compact = quantize_q > 1.0;
  // Dense Gaussian map from public randomness; never billed.
  std::vector<double> g(d_prime * d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_prime));
  for (auto& v : g) v = rng.normal() * scale;
  Dataset projected(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    Point y(d_prime, 0.0);
    for (std::size_t r = 0; r < d_prime; ++r)
      for (std::size_t t = 0; t < d; ++t) y[r] += g[r * d + t] * points[i].coords[t];
    projected[i] = {std::move(y), points[i].weight};
  }

  BaselineResult out;
  out.centers.z = z;
  CenterSet sent;  // projected centers as every party decodes them
  sent.z = z;
  std::vector<double> min_cost(points.size(), std::numeric_limits<double>::infinity());
  std::vector<double> mass(points.size());
  const std::size_t budget = center_budget(k, c);
  for (std::size_t t = 0; t < budget; ++t) {
    for (std::size_t i = 0; i < points.size(); ++i)
      mass[i] = projected[i].weight * (t == 0 ? 1.0 : min_cost[i]);
    if (t > 0 && std::accumulate(mass.begin(), mass.end(), 0.0) <= 0.0) break;
    const std::size_t idx = draw_proportional(mass, rng);
    const Point& y = projected[idx].coords;
    Point decoded = y;
    if (!compact) {
      out.ledger.bill(1, "as_jl_center", std::uint64_t{kRawCoordinateBits} * d_prime, 0);
    } else if (sent.empty()) {
      out.ledger.bill(1, "eas_jl_center", std::uint64_t{kRawCoordinateBits} * d_prime, 0);
    } else {
      // Offset from the nearest broadcast center, rounded to powers of q.
      const NearestCenter ref = nearest_center(y, sent);
      for (std::size_t r = 0; r < d_prime; ++r)
        decoded[r] = sent[ref.index][r] + eas_round(y[r] - sent[ref.index][r], quantize_q);
      out.ledger.bill(1, "eas_jl_center",
                      index_width(sent.size()) + std::uint64_t{kQuantizedCoordinateBits} * d_prime,
                      0);
    }
    update_min_costs(projected, decoded, z, min_cost);
    sent.add(std::move(decoded));
    out.centers.add(points[idx].coords);
    out.ledger.advance_round();
    ++out.rounds;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

CenterSet improve(const Dataset& points, CenterSet centers, std::size_t iterations, Rng& rng) {
  const double z = centers.z;
  const std::size_t d = dimension_of(points);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < iterations; ++it) {
    const auto assignment = assign_all(points, centers);
    double cost = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) cost += points[i].weight * assignment[i].cost;
    if (!(cost < prev)) break;
    prev = cost;
    const std::size_t k = centers.size();
    if (z == 2.0) {
      std::vector<Point> sum(k, Point(d, 0.0));
      std::vector<double> w(k, 0.0);
      for (std::size_t i = 0; i < points.size(); ++i) {
        const std::size_t j = assignment[i].index;
        w[j] += points[i].weight;
        for (std::size_t r = 0; r < d; ++r) sum[j][r] += points[i].weight * points[i].coords[r];
      }
      for (std::size_t j = 0; j < k; ++j)
        if (w[j] > 0.0)
          for (std::size_t r = 0; r < d; ++r) centers.points[j][r] = sum[j][r] / w[j];
    } else {
      std::vector<std::vector<std::size_t>> members(k);
      for (std::size_t i = 0; i < points.size(); ++i) members[assignment[i].index].push_back(i);
      for (std::size_t j = 0; j < k; ++j) {
        if (members[j].empty()) continue;
        double best = 0.0;
        for (std::size_t i : members[j]) best += points[i].weight * dist_pow(points[i].coords, centers[j], z);
        // Medoid step over a bounded random candidate pool.
        for (std::size_t trial = 0; trial < std::min<std::size_t>(32, members[j].size()); ++trial) {
          const std::size_t cand = members[j][rng.below(members[j].size())];
          double c = 0.0;
          for (std::size_t i : members[j]) c += points[i].weight * dist_pow(points[i].coords, points[cand].coords, z);
          if (c < best) {
            best = c;
            centers.points[j] = points[cand].coords;
          }
        }
      }
    }
  }
  return centers;
}

}  // namespace

OptProxy opt_proxy(const Dataset& points, std::size_t k, double z, Rng& rng, std::size_t restarts,
                   std::size_t iterations) {
  require_points(points);
  if (k == 0) throw StructuralError("k must be positive");
  OptProxy out;
  out.cost = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
    CenterSet seeds = adaptive_sampling(points, z, k - 1, rng).centers;
    CenterSet sol = improve(points, std::move(seeds), iterations, rng);
    const double cost = clustering_cost(points, sol);
    if (cost < out.cost) {
      out.cost = cost;
      out.best = sol;
    }
    out.solutions.push_back(std::move(sol));
  }
  return out;
}

std::vector<CenterSet> build_probes(const Dataset& points, std::size_t k, double z, Rng& rng,
                                    std::size_t random_subsets, const OptProxy* proxy) {
  require_points(points);
  const std::size_t d = dimension_of(points);
  OptProxy local;
  if (!proxy) {
    local = opt_proxy(points, k, z, rng, 5, 50);
    proxy = &local;
  }
  Point lo(d, std::numeric_limits<double>::infinity()), hi(d, -std::numeric_limits<double>::infinity());
  for (const auto& p : points)
    for (std::size_t r = 0; r < d; ++r) {
      lo[r] = std::min(lo[r], p.coords[r]);
      hi[r] = std::max(hi[r], p.coords[r]);
    }
  std::vector<CenterSet> probes;
  const std::size_t take = std::min(k, points.size());
  std::vector<std::size_t> idx(points.size());
  for (std::size_t t = 0; t < random_subsets; ++t) {
    std::iota(idx.begin(), idx.end(), 0);
    CenterSet c;
    c.z = z;
    for (std::size_t i = 0; i < take; ++i) {
      std::swap(idx[i], idx[i + rng.below(idx.size() - i)]);
      c.add(points[idx[i]].coords);
    }
    probes.push_back(std::move(c));
  }
  const double w = total_weight(points);
  for (const auto& sol : proxy->solutions) {
    probes.push_back(sol);
    const double radius = std::pow(clustering_cost(points, sol) / w, 1.0 / z);
    for (int rep = 0; rep < 2; ++rep) {
      CenterSet plus = sol, minus = sol;
      for (std::size_t j = 0; j < sol.size(); ++j)
        for (std::size_t r = 0; r < d; ++r) {
          const double step = 0.5 * radius * rng.normal() / std::sqrt(static_cast<double>(d));
          plus.points[j][r] = std::clamp(sol[j][r] + step, lo[r], hi[r]);
          minus.points[j][r] = std::clamp(sol[j][r] - step, lo[r], hi[r]);
        }
      probes.push_back(std::move(plus));
      probes.push_back(std::move(minus));
    }
  }
  return probes;
}

QualityReport coreset_quality_check(const Dataset& original, const Dataset& coreset, double eps,
                                    const std::vector<CenterSet>& probes) {
  if (probes.empty()) throw StructuralError("probe set is empty");
  QualityReport rep;
  for (const auto& c : probes) {
    const double a = clustering_cost(original, c);
    const double b = coreset.empty() ? 0.0 : clustering_cost(coreset, c);
    double dev = 0.0;
    if (a > 0.0) dev = std::fabs(b - a) / a;
    else if (b > 0.0) dev = std::numeric_limits<double>::infinity();
    rep.max_deviation = std::max(rep.max_deviation, dev);
  }
  rep.pass = rep.max_deviation <= eps;
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

std::uint64_t recount_json(const nlohmann::json& ledger) {
  std::uint64_t sum = 0;
  for (const auto& r : ledger) sum += r.at("bits").get<std::uint64_t>();
  return sum;
}

void fill_from_baseline(ResultRow& row, const Dataset& points, const BaselineResult& b,
                        const CenterSet& evaluated) {
  row.cost = clustering_cost(points, evaluated);
  row.bits = b.ledger.total_bits();
  row.ledger_recount = b.ledger.recount();
  row.rounds = b.rounds;
}

}  // namespace

ResultRow run_experiment(const Dataset& points, const ExperimentConfig& cfg) {
  require_points(points);
  ResultRow row;
  row.config = cfg;
  row.n = points.size();
  row.d = dimension_of(points);
  Rng rng(derive_seed(cfg.seed, "experiment"));
  const std::string& a = cfg.algo;
  if (a == "mp") {
    auto b = mp_baseline(points, cfg.k, cfg.z, cfg.c, rng);
    b.centers.z = cfg.z;
    fill_from_baseline(row, points, b, b.centers);
  } else if (a == "as" || a == "eas") {
    auto b = as_baseline(points, cfg.k, cfg.z, cfg.c, rng);
    if (a == "as") {
      fill_from_baseline(row, points, b, b.centers);
    } else {
      // Same draws as "as"; only the broadcast precision differs.
      BaselineResult q;
      q.centers = eas_quantize(b.centers, cfg.q);
      for (std::size_t i = 0; i < q.centers.size(); ++i) {
        q.ledger.bill(1, "eas_center", std::uint64_t{kQuantizedCoordinateBits} * row.d, 0);
        q.ledger.advance_round();
      }
      q.rounds = b.rounds;
      fill_from_baseline(row, points, q, q.centers);
    }
  } else if (a == "as-jl" || a == "eas-jl") {
    const std::size_t dp = cfg.d_prime ? cfg.d_prime : std::max<std::size_t>(1, row.d / 4);
    auto b = as_jl_baseline(points, cfg.k, cfg.z, cfg.c, dp, a == "eas-jl" ? cfg.q : 0.0, rng);
    fill_from_baseline(row, points, b, b.centers);
  } else if (a == "coreset") {
    const auto sites = partition_round_robin(points, cfg.s);
    if (cfg.model == "blackboard") {
      BlackboardConfig bc;
      bc.k = cfg.k;
      bc.z = cfg.z;
      bc.eps = cfg.eps;
      bc.seed = cfg.seed;
      bc.delta = cfg.delta;
      bc.c_m = cfg.c_m;
      const auto r = run_blackboard_pipeline(sites, bc);
      row.cost = clustering_cost(points, r.bicriteria);
      row.bits = r.bits;
      row.ledger_recount = recount_json(r.ledger);
      row.rounds = r.rounds;
      row.coreset_size = r.coreset.points.size();
    } else if (cfg.model == "coordinator") {
      CoordinatorConfig cc;
      cc.k = cfg.k;
      cc.z = cfg.z;
      cc.eps = cfg.eps;
      cc.seed = cfg.seed;
      cc.delta = cfg.delta;
      cc.c_m = cfg.c_m;
      const auto r = run_coordinator_pipeline(sites, cc);
      row.cost = clustering_cost(points, r.bicriteria);
      row.bits = r.bits;
      row.ledger_recount = recount_json(r.ledger);
      row.rounds = r.rounds;
      row.coreset_size = r.coreset.size();
    } else {
      throw StructuralError("coreset runs need model blackboard or coordinator");
    }
  } else {
    throw StructuralError("unknown algorithm '" + a + "'");
  }
  return row;
}

std::vector<ResultRow> run_sweep(const Dataset& points, const ExperimentConfig& base,
                                 const std::vector<double>& cs) {
  std::vector<double> sorted = cs;
  std::sort(sorted.begin(), sorted.end());
  std::vector<ResultRow> rows(sorted.size());
  std::exception_ptr failure;
  // Each configuration owns its rng and fabric, so rows are independent.
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    ExperimentConfig cfg = base;
    cfg.c = sorted[i];
    try {
      rows[i] = run_experiment(points, cfg);
    } catch (...) {
#pragma omp critical(sweep_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

namespace {

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string format_csv(const std::vector<ResultRow>& rows) {
  std::string out = "model,algo,k,z,eps,s,n,d,c,seed,cost,bits,rounds,coreset_size\n";
  for (const auto& r : rows) {
    const auto& c = r.config;
    out += c.model + ',' + c.algo + ',' + std::to_string(c.k) + ',' + num(c.z) + ',' + num(c.eps) +
           ',' + std::to_string(c.s) + ',' + std::to_string(r.n) + ',' + std::to_string(r.d) + ',' +
           num(c.c) + ',' + std::to_string(c.seed) + ',' + num(r.cost) + ',' +
           std::to_string(r.bits) + ',' + std::to_string(r.rounds) + ',' +
           std::to_string(r.coreset_size) + '\n';
  }
  return out;
}

std::string format_json(const std::vector<ResultRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    const auto& c = r.config;
    arr.push_back({{"params",
                    {{"model", c.model}, {"algo", c.algo}, {"k", c.k}, {"z", c.z}, {"eps", c.eps},
                     {"s", c.s}, {"n", r.n}, {"d", r.d}, {"c", c.c}, {"seed", c.seed}}},
                   {"cost", r.cost},
                   {"bits", r.bits},
                   {"rounds", r.rounds},
                   {"coreset_size", r.coreset_size}});
  }
  return arr.dump(2) + "\n";
}

void emit_results(const std::vector<ResultRow>& rows, const std::string& path,
                  const std::string& format) {
  std::string text;
  if (format == "csv") text = format_csv(rows);
  else if (format == "json") text = format_json(rows);
  else throw StructuralError("unknown output format '" + format + "'");
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace distclust
