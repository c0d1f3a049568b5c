#include "distclust/coordinator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <bit>

#include "distclust/blackboard.hpp"
#include "distclust/encoding.hpp"
#include "distclust/errors.hpp"
#include "distclust/sampling.hpp"

namespace distclust {

// ---------------------------------------------------------------------------
// Projection.

std::size_t jl_dimension(std::size_t pooled_points, double c_j) {
  const double lg = std::log2(static_cast<double>(std::max<std::size_t>(pooled_points, 2)));
  return static_cast<std::size_t>(std::ceil(c_j * lg));
}

std::size_t jl_seed_bits(std::size_t d, std::size_t d_out, std::size_t pool) {
  const double a = std::ceil(std::log2(static_cast<double>(d_out) * 100.0 *
                                       static_cast<double>(std::max<std::size_t>(pool, 1))));
  const double b = std::ceil(std::log2(static_cast<double>(std::max<std::size_t>(d, 2))));
  return static_cast<std::size_t>(8.0 * a * b);
}

JlSketch jl_identity(std::size_t d) {
  JlSketch s;
  s.d = s.d_out = d;
  s.identity = true;
  return s;
}

JlSketch jl_from_seed(const BitString& seed, std::size_t d, std::size_t d_out) {
  if (d_out == 0 || d == 0) throw StructuralError("projection dimensions must be positive");
  JlSketch s;
  s.d = d;
  s.d_out = d_out;
  s.identity = false;
  s.seed = seed;
  s.sparsity = std::min<std::size_t>(d_out, 8);
  Rng rng(seed.digest());
  s.rows.resize(d * s.sparsity);
  s.signs.resize(d * s.sparsity);
  std::vector<std::uint32_t> perm(d_out);
  for (std::size_t c = 0; c < d; ++c) {
    // Partial Fisher-Yates: distinct rows per column.
    for (std::size_t r = 0; r < d_out; ++r) perm[r] = static_cast<std::uint32_t>(r);
    for (std::size_t r = 0; r < s.sparsity; ++r) {
      const std::size_t pick = r + rng.below(d_out - r);
      std::swap(perm[r], perm[pick]);
      s.rows[c * s.sparsity + r] = perm[r];
      s.signs[c * s.sparsity + r] = (rng.bits() & 1) ? 1 : -1;
    }
  }
  return s;
}

JlSketch make_jl(std::size_t d, std::size_t d_out, std::size_t pool, Rng& rng) {
  if (d_out >= d) return jl_identity(d);
  BitString seed;
  std::size_t bits = jl_seed_bits(d, d_out, pool);
  while (bits > 0) {
    const unsigned chunk = static_cast<unsigned>(std::min<std::size_t>(bits, 64));
    seed.append_bits(rng.bits() >> (64 - chunk), chunk);
    bits -= chunk;
  }
  return jl_from_seed(seed, d, d_out);
}

Point jl_project(const JlSketch& sketch, std::span<const double> x) {
  if (x.size() != sketch.d) throw StructuralError("projection input dimension mismatch");
  if (sketch.identity) {
    Point out(x.begin(), x.end());
    for (auto& v : out) v = quantize(v);
    return out;
  }
  Point out(sketch.d_out, 0.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(sketch.sparsity));
  for (std::size_t c = 0; c < sketch.d; ++c) {
    if (x[c] == 0.0) continue;
    for (std::size_t r = 0; r < sketch.sparsity; ++r)
      out[sketch.rows[c * sketch.sparsity + r]] += sketch.signs[c * sketch.sparsity + r] * x[c];
  }
  for (auto& v : out) v = quantize(v * scale);
  return out;
}

// ---------------------------------------------------------------------------
// EfficientCommunication.

SortedViews::SortedViews(const std::vector<Point>& points, std::size_t d) : dims_(d) {
  for (auto& col : dims_) col.reserve(points.size());
  for (const auto& p : points) {
    if (p.size() != d) throw StructuralError("sorted view dimension mismatch");
    for (std::size_t i = 0; i < d; ++i) dims_[i].push_back(to_fixed(p[i]));
  }
  for (auto& col : dims_) std::sort(col.begin(), col.end());
  count_ = points.size();
}

void SortedViews::insert(std::span<const double> p) {
  if (dims_.empty()) dims_.resize(p.size());
  if (p.size() != dims_.size()) throw StructuralError("sorted view dimension mismatch");
  for (std::size_t i = 0; i < p.size(); ++i) {
    const std::int64_t v = to_fixed(p[i]);
    auto& col = dims_[i];
    col.insert(std::upper_bound(col.begin(), col.end(), v), v);
  }
  ++count_;
}

double ec_delta_prime(double delta, std::size_t d, std::size_t ell, double grid_side, double eps) {
  const double a = std::ceil(std::log2(static_cast<double>(std::max<std::size_t>(ell, 2))));
  const double b = std::ceil(std::log2(std::max(1.0, std::log2(std::max(2.0, grid_side)))));
  const double c = std::max(0.0, std::ceil(std::log2(1.0 / eps)));
  return delta / (static_cast<double>(std::max<std::size_t>(d, 1)) * (a + b + c + 8.0));
}

EcContext make_ec_context(double eps, double delta, std::size_t d, std::size_t ell, double bound,
                          double grid_side) {
  if (!(eps > 0.0 && eps <= 1.0)) throw StructuralError("EC accuracy must lie in (0,1]");
  if (!(delta > 0.0 && delta < 1.0)) throw StructuralError("EC failure probability must lie in (0,1)");
  EcContext ctx;
  ctx.eps = eps;
  ctx.delta_prime = ec_delta_prime(delta, d, ell, grid_side, eps);
  ctx.bound = to_fixed(std::max(bound, 1.0));
  ctx.offset = 8 * ctx.bound;
  ctx.width = static_cast<unsigned>(std::bit_width(static_cast<std::uint64_t>(16 * ctx.bound)));
  if (ctx.width > 64) throw StructuralError("EC comparison width exceeds 64 bits");
  // Offsets are whole fixed-point units in [1, 2*bound].
  const double step = std::log1p(eps);
  auto t = static_cast<std::int32_t>(std::floor(-kFixedBits * std::log(2.0) / step));
  for (;; ++t) {
    const auto g = std::llround(std::ldexp(std::exp(step * t), kFixedBits));
    if (g < 1) continue;
    if (!ctx.grid.empty() && g <= ctx.grid.back()) continue;
    ctx.grid.push_back(g);
    ctx.grid_t.push_back(t);
    if (g >= 2 * ctx.bound) break;
  }
  return ctx;
}

EcResult efficient_communication(Link& link, PartyId holder, const SortedViews& views,
                                 PartyId sender, std::span<const double> y, const EcContext& ctx,
                                 std::string_view kind) {
  const std::size_t d = y.size();
  if (views.dimension() != d) throw StructuralError("EC dimension mismatch");
  // Orders sender's value a against holder's value b.
  const auto cmp = [&](std::int64_t a, std::int64_t b) {
    return high_prob_greater_than(link, {sender, static_cast<std::uint64_t>(a + ctx.offset)},
                                  {holder, static_cast<std::uint64_t>(b + ctx.offset)}, ctx.width,
                                  ctx.delta_prime, kind);
  };
  EcResult res;
  res.approx.resize(d);
  res.path.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    const std::int64_t yv = to_fixed(y[i]);
    if (yv < -ctx.bound || yv > ctx.bound) throw StructuralError("EC input exceeds the sentinel bound");
    const auto& col = views.dim(i);
    const std::size_t slots = col.size() + 2;
    const auto value = [&](std::size_t slot) {
      return slot == 0 ? -ctx.bound : slot == slots - 1 ? ctx.bound : col[slot - 1];
    };
    // Bracket y between two adjacent slots, then keep the nearer one.
    std::size_t lo = 0, hi = slots - 1;
    while (hi - lo > 1) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (cmp(yv, value(mid)) != Ordering::Less) lo = mid; else hi = mid;
    }
    const std::size_t slot = cmp(2 * yv, value(lo) + value(hi)) == Ordering::Greater ? hi : lo;
    const std::int64_t base = value(slot);
    EcCoordinate& step = res.path[i];
    step.slot = slot;
    const Ordering side = cmp(yv, base);
    if (side == Ordering::Equal) {
      res.approx[i] = from_fixed(base);
      continue;
    }
    const int sign = side == Ordering::Greater ? 1 : -1;
    step.sign = sign;
    // |y - base| >= g, asked through a comparison of y against base + sign*g.
    const auto at_least = [&](std::int64_t g) {
      const Ordering o = cmp(yv, base + sign * g);
      return sign > 0 ? o != Ordering::Less : o != Ordering::Greater;
    };
    std::size_t glo = 0, ghi = ctx.grid.size();
    while (ghi - glo > 1) {
      const std::size_t mid = glo + (ghi - glo) / 2;
      if (at_least(ctx.grid[mid])) glo = mid; else ghi = mid;
    }
    std::size_t q = glo;
    if (q + 1 < ctx.grid.size()) {
      const Ordering o = cmp(2 * yv, 2 * base + sign * (ctx.grid[q] + ctx.grid[q + 1]));
      if (sign > 0 ? o == Ordering::Greater : o == Ordering::Less) ++q;
    }
    step.exponent = ctx.grid_t[q];
    res.approx[i] = from_fixed(base + sign * ctx.grid[q]);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Pipeline.

Dataset local_coreset(const Dataset& points, std::size_t k, double z, double eps, double c_local,
                      Rng& rng) {
  if (points.empty()) return {};
  const std::size_t target = coreset_sample_size(k, z, eps / 2.0, c_local);
  if (points.size() <= target) return points;
  const AdaptiveResult bic = adaptive_sampling(points, z, default_adaptive_rounds(k), rng);
  Dataset sample = sensitivity_sampling(points, bic.centers, target, rng);
  // Repeated draws of one point merge into a single weighted point.
  std::sort(sample.begin(), sample.end(),
            [](const WeightedPoint& a, const WeightedPoint& b) { return a.coords < b.coords; });
  Dataset merged;
  for (auto& p : sample) {
    if (!merged.empty() && merged.back().coords == p.coords) merged.back().weight += p.weight;
    else merged.push_back(std::move(p));
  }
  return merged;
}

namespace {

void append_fixed_point(BitString& out, std::span<const double> p, unsigned width) {
  for (double v : p) {
    const std::int64_t f = to_fixed(v);
    if (f < 0 || static_cast<std::uint64_t>(f) >> width) throw StructuralError("point exceeds upload width");
    out.append_bits(static_cast<std::uint64_t>(f), width);
  }
}

Point read_fixed_point(BitReader& in, std::size_t d, unsigned width) {
  Point p(d);
  for (auto& v : p) v = from_fixed(static_cast<std::int64_t>(in.read_bits(width)));
  return p;
}

void append_codes(BitString& out, const std::vector<double>& values) {
  for (double v : values) append_code(out, power_approx(v, 2.0));
}

std::vector<double> read_codes(BitReader& in, std::size_t count) {
  std::vector<double> out(count);
  for (auto& v : out) v = power_decode(read_code(in), 2.0);
  return out;
}

// Everything a site knows: its own data, derived randomness and what
// arrived on its channel.
struct Site {
  PartyId id = 1;
  const Dataset* raw = nullptr;
  Rng rng;
  Dataset local;
  JlSketch sketch;
  std::vector<Point> projected;
  SortedViews views;
  CenterSet approx;
  std::vector<double> min_cost;
  double cost = 0.0;
  std::optional<ExponentCode> sent_code;
  std::vector<NearestCenter> assignment;
  std::vector<double> mu;
  double mu_total = 0.0;
};

struct Coordinator {
  Rng rng;
  std::vector<std::size_t> sizes;
  JlSketch sketch;
  CenterSet exact;
  SortedViews views;
  std::vector<double> dtilde;
};

double local_sensitivity(const NearestCenter& nc, const SensitivityStats& stats) {
  if (stats.total_cost > 0.0) return sensitivity(nc.index, nc.cost, stats);
  return 0.25 / (stats.k * stats.cluster_sizes[nc.index]);
}

}  // namespace

CoordinatorResult run_coordinator_pipeline(const std::vector<SiteDataset>& sites,
                                           const CoordinatorConfig& cfg,
                                           CoordinatorStage stop_after) {
  if (sites.empty()) throw StructuralError("no sites");
  if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) throw StructuralError("eps must lie in (0,1)");
  const std::size_t s = sites.size();
  std::size_t d = 0, n = 0;
  for (const auto& site : sites) {
    n += site.points.size();
    if (!site.points.empty()) {
      const std::size_t dj = dimension_of(site.points);
      if (d != 0 && d != dj) throw StructuralError("sites disagree on dimension");
      d = dj;
    }
  }
  if (n == 0) throw StructuralError("all sites are empty");
  {
    std::vector<Point> distinct;
    for (const auto& site : sites)
      for (const auto& p : site.points) distinct.push_back(p.coords);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (cfg.k > distinct.size()) throw StructuralError("k exceeds the number of distinct points");
  }
  const std::uint64_t delta = cfg.delta ? cfg.delta : grid_delta(sites);
  const double grid_side = static_cast<double>(delta);
  const unsigned upload_width = static_cast<unsigned>(std::bit_width(delta)) + kFixedBits;
  const std::size_t m = coreset_sample_size(cfg.k, cfg.z, cfg.eps, cfg.c_m);
  const double ec_fail = 1.0 / (10.0 * static_cast<double>(s * cfg.k + m));
  const double center_eps = cfg.center_eps > 0.0 ? cfg.center_eps
                                                 : std::min(0.5, std::pow(cfg.eps, cfg.z) / 8.0);

  Network net(static_cast<int>(s), derive_seed(cfg.seed, "public"));
  Coordinator coord{Rng(derive_seed(cfg.seed, "coordinator")), {}, {}, {}, {}, {}};
  coord.exact.z = cfg.z;
  std::vector<Site> site(s);
  for (std::size_t j = 0; j < s; ++j) {
    site[j].id = static_cast<PartyId>(j + 1);
    site[j].raw = &sites[j].points;
    site[j].rng = Rng(derive_seed(cfg.seed, "site", j + 1));
    site[j].approx.z = cfg.z;
  }
  const auto channel = [&](std::size_t j) -> Channel& { return net.channel(static_cast<PartyId>(j + 1)); };

  // Local coresets and their sizes.
  for (auto& st : site) {
    st.local = local_coreset(*st.raw, cfg.k, cfg.z, cfg.eps, cfg.c_local, st.rng);
    BitString msg;
    msg.append_gamma(st.local.size() + 1);
    channel(static_cast<std::size_t>(st.id - 1)).send(st.id, "local_size", std::move(msg));
  }
  coord.sizes.resize(s);
  for (std::size_t j = 0; j < s; ++j) {
    const Message msg = channel(j).receive(kCoordinator);
    BitReader in(msg.payload);
    coord.sizes[j] = in.read_gamma() - 1;
  }
  net.round_barrier();

  // Shared projection.
  const std::size_t d_out = jl_dimension(s * cfg.k, cfg.c_j);
  coord.sketch = make_jl(d, d_out, s * cfg.k + m, coord.rng);
  for (std::size_t j = 0; j < s; ++j) {
    if (!coord.sketch.identity) {
      channel(j).send(kCoordinator, "jl_seed", coord.sketch.seed);
      site[j].sketch = jl_from_seed(channel(j).receive(site[j].id).payload, d, d_out);
    } else {
      site[j].sketch = jl_identity(d);
    }
  }
  if (!coord.sketch.identity) net.round_barrier();
  const double proj_bound = coord.sketch.identity ? grid_side : static_cast<double>(d) * grid_side;
  for (auto& st : site) {
    st.projected.reserve(st.local.size());
    for (const auto& p : st.local) st.projected.push_back(jl_project(st.sketch, p.coords));
    st.views = SortedViews(st.projected, coord.sketch.d_out);
    st.min_cost.assign(st.local.size(), std::numeric_limits<double>::infinity());
  }

  // First center: exact upload from a site chosen by local coreset size.
  const auto upload_exact = [&](std::size_t j, std::size_t idx) {
    BitString msg;
    append_fixed_point(msg, site[j].local[idx].coords, upload_width);
    return msg;
  };
  {
    std::vector<double> mass(coord.sizes.begin(), coord.sizes.end());
    const std::size_t j = draw_proportional(mass, coord.rng);
    channel(j).send(kCoordinator, "first_request", BitString{});
    channel(j).receive(site[j].id);
    std::vector<double> w(site[j].local.size());
    for (std::size_t x = 0; x < w.size(); ++x) w[x] = site[j].local[x].weight;
    channel(j).send(site[j].id, "center_upload", upload_exact(j, draw_proportional(w, site[j].rng)));
    const Message received = channel(j).receive(kCoordinator);
    BitReader in(received.payload);
    coord.exact.add(read_fixed_point(in, d, upload_width));
    coord.views.insert(coord.exact.points.back());
    net.round_barrier();
  }

  // Broadcast of the newest center, then refreshed cost codes.
  std::vector<EcContext> center_ctx(s);
  for (std::size_t j = 0; j < s; ++j)
    center_ctx[j] = make_ec_context(center_eps, ec_fail, coord.sketch.d_out, site[j].local.size(),
                                    proj_bound, grid_side);
  coord.dtilde.assign(s, 0.0);
  const auto broadcast_center = [&](const Point& center) {
    const Point target = jl_project(coord.sketch, center);
    for (std::size_t j = 0; j < s; ++j) {
      Site& st = site[j];
      if (st.local.empty()) continue;
      const EcResult ec = efficient_communication(channel(j), st.id, st.views, kCoordinator, target,
                                                  center_ctx[j], "ec_center");
      st.approx.add(ec.approx);
      std::vector<WeightedPoint> proj(st.projected.size());
      double sum = 0.0;
      for (std::size_t x = 0; x < st.projected.size(); ++x) {
        st.min_cost[x] = std::min(st.min_cost[x], dist_pow(st.projected[x], ec.approx, cfg.z));
        sum += st.local[x].weight * st.min_cost[x];
      }
      st.cost = sum;
    }
    net.round_barrier();
    for (std::size_t j = 0; j < s; ++j) {
      Site& st = site[j];
      const ExponentCode code = power_approx(st.cost, 2.0);
      if (st.sent_code && *st.sent_code == code) continue;
      st.sent_code = code;
      BitString msg;
      append_code(msg, code);
      channel(j).send(st.id, "site_cost", std::move(msg));
      const Message received = channel(j).receive(kCoordinator);
      BitReader in(received.payload);
      coord.dtilde[j] = power_decode(read_code(in), 2.0);
    }
    net.round_barrier();
  };

  broadcast_center(coord.exact.points.back());
  const std::size_t rounds = cfg.rounds_per_k * cfg.k;
  for (std::size_t t = 0; t < rounds; ++t) {
    const DiscreteSampler pick(coord.dtilde);
    if (!(pick.total() > 0.0)) break;
    const std::size_t j = pick.draw(coord.rng);
    channel(j).send(kCoordinator, "lazy_request", BitString{});
    channel(j).receive(site[j].id);
    Site& st = site[j];
    BitString reply;
    std::optional<std::size_t> chosen;
    if (st.cost > 0.0 && st.rng.bernoulli(std::min(1.0, st.cost / coord.dtilde[j]))) {
      std::vector<double> mass(st.local.size());
      for (std::size_t x = 0; x < mass.size(); ++x) mass[x] = st.local[x].weight * st.min_cost[x];
      chosen = draw_proportional(mass, st.rng);
    }
    reply.append_bit(chosen.has_value());
    if (chosen) reply.append(upload_exact(j, *chosen));
    channel(j).send(st.id, "lazy_reply", std::move(reply));
    {
      const Message msg = channel(j).receive(kCoordinator);
      BitReader in(msg.payload);
      if (in.read_bit()) {
        coord.exact.add(read_fixed_point(in, d, upload_width));
        coord.views.insert(coord.exact.points.back());
      }
    }
    net.round_barrier();
    if (chosen) broadcast_center(coord.exact.points.back());
  }

  CoordinatorResult out;
  out.bicriteria = coord.exact;
  out.sketch = coord.sketch;
  const auto finish = [&] {
    out.bits = net.ledger().total_bits();
    out.rounds = net.round();
    out.ledger = net.ledger().to_json();
    for (std::size_t j = 0; j < s; ++j) {
      out.transcripts.push_back(channel(j).transcript());
      out.local_coresets.push_back(site[j].local);
      out.site_centers.push_back(site[j].approx);
    }
  };
  if (stop_after == CoordinatorStage::Bicriteria) {
    finish();
    return out;
  }

  // Cluster statistics against the approximate centers.
  const std::size_t kc = coord.exact.size();
  std::vector<double> total_size(kc, 0.0), total_cost(kc, 0.0);
  for (std::size_t j = 0; j < s; ++j) {
    Site& st = site[j];
    std::vector<double> size(kc, 0.0), cost(kc, 0.0);
    if (!st.local.empty()) {
      st.assignment.resize(st.local.size());
      for (std::size_t x = 0; x < st.local.size(); ++x) {
        st.assignment[x] = nearest_center(st.projected[x], st.approx);
        size[st.assignment[x].index] += st.local[x].weight;
        cost[st.assignment[x].index] += st.local[x].weight * st.assignment[x].cost;
      }
    }
    BitString msg;
    append_codes(msg, size);
    append_codes(msg, cost);
    channel(j).send(st.id, "cluster_stats", std::move(msg));
    const Message received = channel(j).receive(kCoordinator);
    BitReader in(received.payload);
    const auto sz = read_codes(in, kc);
    const auto cs = read_codes(in, kc);
    for (std::size_t l = 0; l < kc; ++l) {
      total_size[l] += sz[l];
      total_cost[l] += cs[l];
    }
  }
  net.round_barrier();

  SensitivityStats stats;
  stats.k = static_cast<double>(kc);
  for (std::size_t j = 0; j < s; ++j) {
    BitString msg;
    append_codes(msg, total_size);
    append_codes(msg, total_cost);
    channel(j).send(kCoordinator, "cluster_totals", std::move(msg));
    const Message received = channel(j).receive(site[j].id);
    BitReader in(received.payload);
    // Every site decodes the same totals.
    stats.cluster_sizes = read_codes(in, kc);
    stats.cluster_costs = read_codes(in, kc);
  }
  stats.total_cost = 0.0;
  for (double c : stats.cluster_costs) stats.total_cost += c;
  net.round_barrier();

  std::vector<double> posted(s, 0.0);
  for (std::size_t j = 0; j < s; ++j) {
    Site& st = site[j];
    st.mu.resize(st.local.size());
    st.mu_total = 0.0;
    for (std::size_t x = 0; x < st.local.size(); ++x) {
      st.mu[x] = st.local[x].weight * local_sensitivity(st.assignment[x], stats);
      st.mu_total += st.mu[x];
    }
    BitString msg;
    append_code(msg, power_approx(st.mu_total, 2.0));
    channel(j).send(st.id, "site_sensitivity", std::move(msg));
    const Message received = channel(j).receive(kCoordinator);
    BitReader in(received.payload);
    posted[j] = power_decode(read_code(in), 2.0);
  }
  net.round_barrier();

  const DiscreteSampler site_pick(posted);
  std::vector<std::size_t> alloc(s, 0);
  for (std::size_t t = 0; t < m; ++t) ++alloc[site_pick.draw(coord.rng)];
  for (std::size_t j = 0; j < s; ++j) {
    BitString msg;
    msg.append_gamma(alloc[j] + 1);
    channel(j).send(kCoordinator, "allocation", std::move(msg));
  }
  net.round_barrier();

  // Sites ship sampled points through EC against the exact centers, then
  // one message of weight codes. A site's weight code covers its local
  // probability only; the coordinator applies its own site probability.
  const EcContext point_ctx = make_ec_context(center_eps, ec_fail, d, kc, grid_side, grid_side);
  const double weight_base = 1.0 + cfg.eps / 2.0;
  out.sample_size = m;
  for (std::size_t j = 0; j < s; ++j) {
    Site& st = site[j];
    const Message request_msg = channel(j).receive(st.id);
    BitReader request(request_msg.payload);
    const std::size_t mj = request.read_gamma() - 1;
    if (mj == 0) continue;
    const DiscreteSampler local(st.mu);
    std::vector<Point> approx;
    BitString weights;
    for (std::size_t c = 0; c < mj; ++c) {
      const std::size_t x = local.draw(st.rng);
      const EcResult ec = efficient_communication(channel(j), kCoordinator, coord.views, st.id,
                                                  st.local[x].coords, point_ctx, "ec_point");
      approx.push_back(ec.approx);
      const double omega = st.local[x].weight * st.mu_total / st.mu[x];
      weights.append_signed_gamma(nearest_exponent(omega, weight_base));
    }
    channel(j).send(st.id, "coreset_weights", std::move(weights));
    const Message received = channel(j).receive(kCoordinator);
    BitReader in(received.payload);
    const double site_prob = posted[j] / site_pick.total();
    for (auto& p : approx) {
      const double omega = std::pow(weight_base, static_cast<double>(in.read_signed_gamma()));
      out.coreset.push_back({std::move(p), omega / (static_cast<double>(m) * site_prob)});
    }
  }
  net.round_barrier();
  finish();
  return out;
}

}  // namespace distclust
