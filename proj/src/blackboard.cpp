#include "distclust/blackboard.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "distclust/errors.hpp"
#include "distclust/sampling.hpp"

namespace distclust {

void append_grid_point(BitString& out, std::span<const double> coords, std::uint64_t delta) {
  const unsigned w = index_width(delta);
  for (double c : coords) {
    const double r = std::round(c);
    if (r != c || r < 1.0 || r > static_cast<double>(delta))
      throw StructuralError("coordinate is not on the grid [1, Delta]");
    out.append_bits(static_cast<std::uint64_t>(r) - 1, w);
  }
}

Point read_grid_point(BitReader& in, std::size_t d, std::uint64_t delta) {
  const unsigned w = index_width(delta);
  Point p(d);
  for (auto& c : p) c = static_cast<double>(in.read_bits(w) + 1);
  return p;
}

std::uint64_t grid_delta(const std::vector<SiteDataset>& sites) {
  double hi = 1.0;
  for (const auto& s : sites)
    for (const auto& p : s.points)
      for (double c : p.coords) hi = std::max(hi, c);
  return static_cast<std::uint64_t>(std::ceil(hi));
}

std::vector<LazyOutcome> lazy_sampling(Blackboard& board,
                                       const std::vector<std::vector<double>>& masses,
                                       const std::vector<ExponentCode>& codes, std::size_t batch,
                                       Rng& coordinator, std::vector<Rng>& site_rngs,
                                       const PointWriter& write_point) {
  const std::size_t s = codes.size();
  if (masses.size() != s || site_rngs.size() != s) throw StructuralError("site count mismatch");
  std::vector<double> dtilde(s);
  for (std::size_t j = 0; j < s; ++j) dtilde[j] = power_decode(codes[j], 2.0);
  const DiscreteSampler pick(dtilde);
  if (!(pick.total() > 0.0)) throw StructuralError("lazy sampling with zero stale mass");

  std::vector<LazyOutcome> out(batch);
  std::vector<std::size_t> hits(s, 0);
  BitString request;
  for (auto& o : out) {
    o.site = static_cast<int>(pick.draw(coordinator));
    ++hits[static_cast<std::size_t>(o.site)];
    request.append_bits(static_cast<std::uint64_t>(o.site), index_width(s));
  }
  board.post(kCoordinator, "lazy_request", std::move(request));
  board.round_barrier();

  for (std::size_t j = 0; j < s; ++j) {
    if (hits[j] == 0) continue;
    double local = 0.0;
    for (double m : masses[j]) local += m;
    const double accept = std::min(1.0, local / dtilde[j]);
    std::optional<DiscreteSampler> local_pick;
    if (local > 0.0) local_pick.emplace(masses[j]);
    BitString reply;
    for (auto& o : out) {
      if (static_cast<std::size_t>(o.site) != j) continue;
      const bool ok = local_pick && site_rngs[j].bernoulli(accept);
      reply.append_bit(ok);
      if (!ok) continue;
      o.index = local_pick->draw(site_rngs[j]);
      if (write_point) write_point(reply, static_cast<int>(j), *o.index);
    }
    board.post(static_cast<PartyId>(j + 1), "lazy_reply", std::move(reply));
  }
  board.round_barrier();
  return out;
}

std::size_t l1_rounds(double delta) {
  return static_cast<std::size_t>(std::ceil(8.0 * std::log(2.0 / delta)));
}

bool l1_sampling(Blackboard& board, const std::vector<ExponentCode>& codes,
                 const std::vector<double>& site_costs, const L1Params& params, Rng& coordinator) {
  const std::size_t s = codes.size();
  if (site_costs.size() != s) throw StructuralError("site count mismatch");
  if (!(params.mu > 1.0)) throw StructuralError("mu must exceed 1");
  const double lambda = params.mu / 4.0;
  const double alpha = 2.0 * params.mu;
  const std::size_t rounds = l1_rounds(params.delta);

  std::vector<double> dtilde(s);
  for (std::size_t j = 0; j < s; ++j) dtilde[j] = power_decode(codes[j], 2.0);
  const DiscreteSampler pick(dtilde);
  const double total = pick.total();
  if (!(total > 0.0)) return false;

  std::vector<std::size_t> chosen(rounds);
  BitString request;
  for (auto& c : chosen) {
    c = pick.draw(coordinator);
    request.append_bits(c, index_width(s));
  }
  board.post(kCoordinator, "l1_request", std::move(request));
  board.round_barrier();

  // A site sampled several times answers once; its code is the same each time.
  std::vector<std::optional<ExponentCode>> answer(s);
  for (std::size_t j : chosen) {
    if (answer[j]) continue;
    answer[j] = power_approx(site_costs[j], lambda);
  }
  for (std::size_t j = 0; j < s; ++j) {
    if (!answer[j]) continue;
    BitString msg;
    append_code(msg, *answer[j]);
    board.post(static_cast<PartyId>(j + 1), "l1_reply", std::move(msg));
  }
  board.round_barrier();

  double t = 0.0;
  for (std::size_t j : chosen) t += power_decode(*answer[j], lambda) * total / dtilde[j];
  return alpha * t <= static_cast<double>(rounds) * total;
}

std::vector<double> dist_morris(Blackboard& board,
                                const std::vector<std::vector<std::uint64_t>>& counts,
                                std::vector<Rng>& site_rngs) {
  if (counts.size() != site_rngs.size()) throw StructuralError("site count mismatch");
  const std::size_t quantities = counts.empty() ? 0 : counts.front().size();
  for (const auto& c : counts)
    if (c.size() != quantities) throw StructuralError("ragged Morris counts");
  const std::size_t l = morris_replicas(quantities);
  std::vector<std::uint32_t> reg(quantities * l, 0);
  const unsigned jw = index_width(quantities), tw = index_width(l);

  for (std::size_t i = 0; i < counts.size(); ++i) {
    struct Update { std::size_t j, t; std::uint32_t inc; };
    std::vector<Update> updates;
    for (std::size_t j = 0; j < quantities; ++j) {
      if (counts[i][j] == 0) continue;
      for (std::size_t t = 0; t < l; ++t) {
        std::uint32_t& r = reg[j * l + t];
        const std::uint32_t next = morris_step(r, counts[i][j], site_rngs[i]);
        if (next != r) updates.push_back({j, t, next - r});
        r = next;
      }
    }
    BitString msg;
    msg.append_bit(!updates.empty());
    if (!updates.empty()) {
      msg.append_gamma(updates.size());
      for (const auto& u : updates) {
        msg.append_gamma(u.inc);
        msg.append_bits(u.j, jw);
        msg.append_bits(u.t, tw);
      }
    }
    board.post(static_cast<PartyId>(i + 1), "morris", std::move(msg));
    board.round_barrier();
  }

  std::vector<double> est(quantities);
  for (std::size_t j = 0; j < quantities; ++j)
    est[j] = morris_estimate(std::span<const std::uint32_t>(reg.data() + j * l, l));
  return est;
}

double morris_cost_unit(double n, std::size_t d, double delta, double z) {
  const double worst_log2 =
      std::log2(std::max(n, 1.0)) + 0.5 * z * std::log2(static_cast<double>(d) * delta * delta);
  const double excess = std::ceil(worst_log2) - 62.0;
  return excess > 0.0 ? std::ldexp(1.0, static_cast<int>(excess)) : 1.0;
}

BlackboardSession::BlackboardSession(const std::vector<SiteDataset>& sites, BlackboardConfig cfg)
    : sites_(&sites), cfg_(cfg), board_(derive_seed(cfg.seed, "public")),
      coordinator_(derive_seed(cfg.seed, "coordinator")) {
  if (sites.empty()) throw StructuralError("no sites");
  if (cfg_.k == 0) throw StructuralError("k must be positive");
  for (std::size_t j = 0; j < sites.size(); ++j) {
    site_rngs_.emplace_back(derive_seed(cfg.seed, "site", j + 1));
    n_ += sites[j].points.size();
    if (!sites[j].points.empty()) {
      const std::size_t dj = sites[j].points.front().coords.size();
      if (d_ != 0 && dj != d_) throw StructuralError("sites disagree on dimension");
      d_ = dj;
      if (dimension_of(sites[j].points) != d_) throw StructuralError("ragged site data");
    }
  }
  if (n_ == 0) throw StructuralError("all sites are empty");
  delta_ = cfg_.delta ? cfg_.delta : grid_delta(sites);
  centers_.z = cfg_.z;
  min_cost_.resize(sites.size());
  for (std::size_t j = 0; j < sites.size(); ++j)
    min_cost_[j].assign(sites[j].points.size(), std::numeric_limits<double>::infinity());
  site_cost_.assign(sites.size(), 0.0);
  codes_.assign(sites.size(), ExponentCode::zero());
}

void BlackboardSession::add_center(const Point& p) {
  centers_.add(p);
  for (std::size_t j = 0; j < sites_->size(); ++j) {
    const Dataset& pts = (*sites_)[j].points;
    if (pts.empty()) continue;
    update_min_costs(pts, p, cfg_.z, min_cost_[j]);
    double sum = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) sum += pts[i].weight * min_cost_[j][i];
    site_cost_[j] = sum;
  }
}

std::vector<std::vector<double>> BlackboardSession::masses() const {
  std::vector<std::vector<double>> out(sites_->size());
  for (std::size_t j = 0; j < sites_->size(); ++j) {
    const Dataset& pts = (*sites_)[j].points;
    out[j].resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) out[j][i] = pts[i].weight * min_cost_[j][i];
  }
  return out;
}

void BlackboardSession::initialize() {
  const std::size_t s = sites_->size();
  std::vector<double> sizes(s);
  for (std::size_t j = 0; j < s; ++j) {
    sizes[j] = static_cast<double>((*sites_)[j].points.size());
    BitString msg;
    msg.append_gamma((*sites_)[j].points.size() + 1);
    board_.post(static_cast<PartyId>(j + 1), "init_size", std::move(msg));
  }
  board_.round_barrier();

  const std::size_t chosen = draw_proportional(sizes, coordinator_);
  BitString pick;
  pick.append_bits(chosen, index_width(s));
  board_.post(kCoordinator, "init_site", std::move(pick));
  board_.round_barrier();

  const Dataset& pts = (*sites_)[chosen].points;
  const Point& x = pts[site_rngs_[chosen].below(pts.size())].coords;
  BitString up;
  append_grid_point(up, x, delta_);
  board_.post(static_cast<PartyId>(chosen + 1), "init_point", std::move(up));
  board_.round_barrier();
  add_center(x);

  for (std::size_t j = 0; j < s; ++j) {
    codes_[j] = power_approx(site_cost_[j], 2.0);
    BitString msg;
    append_code(msg, codes_[j]);
    board_.post(static_cast<PartyId>(j + 1), "site_cost", std::move(msg));
  }
  board_.round_barrier();
}

void BlackboardSession::refresh_codes() {
  for (std::size_t j = 0; j < sites_->size(); ++j) {
    const ExponentCode fresh = power_approx(site_cost_[j], 2.0);
    if (fresh == codes_[j]) continue;
    codes_[j] = fresh;
    BitString msg;
    append_code(msg, fresh);
    board_.post(static_cast<PartyId>(j + 1), "site_cost", std::move(msg));
  }
  board_.round_barrier();
}

std::size_t BlackboardSession::lazy_and_add(std::size_t batch) {
  const auto writer = [this](BitString& out, int site, std::size_t idx) {
    append_grid_point(out, (*sites_)[static_cast<std::size_t>(site)].points[idx].coords, delta_);
  };
  const auto outcomes =
      lazy_sampling(board_, masses(), codes_, batch, coordinator_, site_rngs_, writer);
  std::size_t hits = 0;
  for (const auto& o : outcomes) {
    if (!o.index) continue;
    ++hits;
    add_center((*sites_)[static_cast<std::size_t>(o.site)].points[*o.index].coords);
  }
  return hits;
}

namespace {

bool all_zero(const std::vector<ExponentCode>& codes) {
  return std::all_of(codes.begin(), codes.end(), [](const ExponentCode& c) { return c.is_zero; });
}

}  // namespace

CenterSet BlackboardSession::bicriteria_small_k() {
  if (centers_.empty()) initialize();
  const std::size_t rounds = cfg_.rounds_per_k * cfg_.k;
  for (std::size_t t = 0; t < rounds && !all_zero(codes_); ++t) {
    if (lazy_and_add(1) > 0) refresh_codes();
  }
  return centers_;
}

CenterSet BlackboardSession::bicriteria_large_k() {
  if (centers_.empty()) initialize();
  const std::size_t target = cfg_.rounds_per_k * cfg_.k;
  const double logn = std::max(1.0, std::ceil(std::log2(static_cast<double>(n_))));
  const L1Params l1{cfg_.mu, 1.0 / (100.0 * logn * logn)};
  large_k_ = {};
  std::size_t& credited = large_k_.credited;
  while (credited < target && !all_zero(codes_)) {
    for (unsigned i = 1; credited < target && !all_zero(codes_); ++i) {
      const std::size_t batch =
          std::min<std::size_t>(std::size_t{1} << std::min(i, 40u), target - credited);
      const std::size_t hits = lazy_and_add(batch);
      large_k_.successes += hits;
      ++large_k_.batches;
      const bool stale = l1_sampling(board_, codes_, site_cost_, l1, coordinator_);
      if (!stale) {
        credited += hits;
        continue;
      }
      // Only the first draw of the batch is certainly valid.
      credited += std::min<std::size_t>(1, hits);
      ++large_k_.refreshes;
      refresh_codes();
      break;
    }
  }
  return centers_;
}

CoresetResult BlackboardSession::coreset() {
  if (centers_.empty()) throw StructuralError("coreset needs a posted center set");
  if (!(cfg_.eps > 0.0 && cfg_.eps < 1.0)) throw StructuralError("eps must lie in (0,1)");
  const std::size_t s = sites_->size();
  const std::size_t kc = centers_.size();
  const double unit = morris_cost_unit(static_cast<double>(n_), d_, static_cast<double>(delta_), cfg_.z);

  std::vector<std::vector<NearestCenter>> assign(s);
  std::vector<std::vector<std::uint64_t>> counts(s, std::vector<std::uint64_t>(2 * kc, 0));
  for (std::size_t i = 0; i < s; ++i) {
    const Dataset& pts = (*sites_)[i].points;
    if (pts.empty()) continue;
    assign[i] = assign_all(pts, centers_);
    std::vector<double> cost(kc, 0.0), size(kc, 0.0);
    for (std::size_t x = 0; x < pts.size(); ++x) {
      size[assign[i][x].index] += pts[x].weight;
      cost[assign[i][x].index] += pts[x].weight * assign[i][x].cost;
    }
    for (std::size_t j = 0; j < kc; ++j) {
      counts[i][j] = static_cast<std::uint64_t>(std::ceil(size[j]));
      counts[i][kc + j] = static_cast<std::uint64_t>(std::ceil(cost[j] / unit));
    }
  }
  const std::vector<double> est = dist_morris(board_, counts, site_rngs_);

  SensitivityStats stats;
  stats.k = static_cast<double>(kc);
  stats.cluster_sizes.assign(est.begin(), est.begin() + static_cast<std::ptrdiff_t>(kc));
  for (std::size_t j = 0; j < kc; ++j) {
    stats.cluster_costs.push_back(est[kc + j] * unit);
    stats.total_cost += est[kc + j] * unit;
  }

  CoresetResult res;
  res.centers = centers_;
  res.codec.eps_prime = cfg_.offset_eps > 0.0
                            ? cfg_.offset_eps
                            : default_offset_eps(cfg_.eps, d_, static_cast<double>(n_),
                                                 static_cast<double>(delta_));
  res.codec.weight_base = 1.0 + cfg_.eps / 2.0;

  // Posts one site's encoded points and decodes them as every reader would.
  const auto ship = [&](std::size_t site, const std::vector<EncodedPoint>& batch, bool counted) {
    BitString payload;
    if (counted) payload.append_gamma(batch.size() + 1);
    for (const auto& e : batch) write_encoded_point(payload, e, kc);
    const Message& msg =
        board_.post(static_cast<PartyId>(site + 1), "coreset_points", std::move(payload));
    BitReader in(msg.payload);
    const std::size_t count = counted ? in.read_gamma() - 1 : batch.size();
    for (std::size_t c = 0; c < count; ++c) {
      res.encoded.push_back(read_encoded_point(in, kc, d_));
      res.points.push_back(decode_offset_point(res.encoded.back(), centers_, res.codec));
    }
  };

  if (!(stats.total_cost > 0.0)) {
    // Every point sits on a center: each site ships its per-center counts.
    for (std::size_t i = 0; i < s; ++i) {
      std::vector<EncodedPoint> batch;
      for (std::size_t j = 0; j < kc; ++j) {
        if (counts[i][j] == 0) continue;
        const WeightedPoint on_center{centers_[j], static_cast<double>(counts[i][j])};
        batch.push_back(encode_offset_point(on_center, centers_, res.codec));
      }
      ship(i, batch, true);
    }
    board_.round_barrier();
    res.sample_size = res.points.size();
    return res;
  }

  // Local sensitivities and their site totals.
  std::vector<std::vector<double>> mass(s);
  std::vector<double> site_mu(s, 0.0), posted(s, 0.0);
  for (std::size_t i = 0; i < s; ++i) {
    const Dataset& pts = (*sites_)[i].points;
    mass[i].resize(pts.size());
    for (std::size_t x = 0; x < pts.size(); ++x) {
      mass[i][x] = pts[x].weight * sensitivity(assign[i][x].index, assign[i][x].cost, stats);
      site_mu[i] += mass[i][x];
    }
    const ExponentCode code = power_approx(site_mu[i], 2.0);
    posted[i] = power_decode(code, 2.0);
    BitString msg;
    append_code(msg, code);
    board_.post(static_cast<PartyId>(i + 1), "site_sensitivity", std::move(msg));
  }
  board_.round_barrier();

  const std::size_t m = coreset_sample_size(cfg_.k, cfg_.z, cfg_.eps, cfg_.c_m);
  res.sample_size = m;
  const DiscreteSampler site_pick(posted);
  std::vector<std::size_t> alloc(s, 0);
  for (std::size_t t = 0; t < m; ++t) ++alloc[site_pick.draw(coordinator_)];
  BitString allocation;
  for (std::size_t i = 0; i < s; ++i) allocation.append_gamma(alloc[i] + 1);
  board_.post(kCoordinator, "allocation", std::move(allocation));
  board_.round_barrier();

  for (std::size_t i = 0; i < s; ++i) {
    if (alloc[i] == 0) continue;
    const Dataset& pts = (*sites_)[i].points;
    const DiscreteSampler local(mass[i]);
    const double site_prob = posted[i] / site_pick.total();
    std::vector<EncodedPoint> batch;
    batch.reserve(alloc[i]);
    for (std::size_t c = 0; c < alloc[i]; ++c) {
      const std::size_t x = local.draw(site_rngs_[i]);
      const double p = site_prob * mass[i][x] / site_mu[i];
      const WeightedPoint wp{pts[x].coords, pts[x].weight / (static_cast<double>(m) * p)};
      batch.push_back(encode_offset_point(wp, centers_, res.codec));
    }
    ship(i, batch, false);
  }
  board_.round_barrier();
  return res;
}

PipelineResult run_blackboard_pipeline(const std::vector<SiteDataset>& sites,
                                       const BlackboardConfig& cfg, BicriteriaVariant variant) {
  BlackboardSession session(sites, cfg);
  session.initialize();
  if (variant == BicriteriaVariant::Auto) {
    const double logn = std::log2(std::max<double>(2.0, static_cast<double>(session.total_points())));
    variant = static_cast<double>(cfg.k) <= logn ? BicriteriaVariant::SmallK : BicriteriaVariant::LargeK;
  }
  PipelineResult out;
  out.bicriteria = variant == BicriteriaVariant::SmallK ? session.bicriteria_small_k()
                                                        : session.bicriteria_large_k();
  out.coreset = session.coreset();
  out.bits = session.board().ledger().total_bits();
  out.rounds = session.board().round();
  out.ledger = session.board().ledger().to_json();
  return out;
}

}  // namespace distclust
