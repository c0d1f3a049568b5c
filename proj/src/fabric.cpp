#include "distclust/fabric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "distclust/errors.hpp"
#include "distclust/random.hpp"

namespace distclust {

void BitLedger::bill(PartyId sender, std::string_view kind, std::uint64_t payload_bits,
                     std::uint64_t framing_bits) {
  auto& by_kind = open_[sender];
  auto it = by_kind.find(kind);
  std::size_t pos;
  if (it == by_kind.end()) {
    pos = records_.size();
    records_.push_back({rounds_, sender, std::string(kind), 0, 0, 0});
    by_kind.emplace(std::string(kind), pos);
  } else {
    pos = it->second;
  }
  LedgerRecord& r = records_[pos];
  r.payload_bits += payload_bits;
  r.framing_bits += framing_bits;
  ++r.messages;
  total_ += payload_bits + framing_bits;
}

void BitLedger::advance_round() {
  ++rounds_;
  open_.clear();
}

std::uint64_t BitLedger::recount() const noexcept {
  std::uint64_t sum = 0;
  for (const auto& r : records_) sum += r.bits();
  return sum;
}

std::uint64_t BitLedger::bits_of_kind(std::string_view kind) const {
  std::uint64_t sum = 0;
  for (const auto& r : records_)
    if (r.kind == kind) sum += r.bits();
  return sum;
}

std::uint64_t BitLedger::bits_of_sender(PartyId sender) const {
  std::uint64_t sum = 0;
  for (const auto& r : records_)
    if (r.sender == sender) sum += r.bits();
  return sum;
}

nlohmann::json BitLedger::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : records_) {
    out.push_back({{"round", r.round},
                   {"sender", r.sender},
                   {"kind", r.kind},
                   {"bits", r.bits()},
                   {"payload_bits", r.payload_bits},
                   {"framing_bits", r.framing_bits},
                   {"messages", r.messages}});
  }
  return out;
}

std::uint64_t PublicCoin::next_seed(std::string_view label) {
  auto it = counters_.find(label);
  if (it == counters_.end()) it = counters_.emplace(std::string(label), 0).first;
  return derive_seed(run_seed_, label, it->second++);
}

std::uint64_t framing_bits(std::size_t payload_bits) { return gamma_len(payload_bits + 1); }

const Message& Blackboard::post(PartyId sender, std::string kind, BitString payload) {
  ledger_.bill(sender, kind, payload.size(), framing_bits(payload.size()));
  log_.push_back({ledger_.rounds(), sender, std::move(kind), std::move(payload)});
  return log_.back();
}

void Blackboard::bill_fixed_length(PartyId sender, std::string_view kind, std::uint64_t bits) {
  ledger_.bill(sender, kind, bits, 0);
}

void Channel::check_endpoint(PartyId p) const {
  if (p != kCoordinator && p != site_)
    throw StructuralError("party " + std::to_string(p) + " is not an endpoint of channel " +
                          std::to_string(site_));
}

void Channel::send(PartyId from, std::string kind, BitString payload) {
  check_endpoint(from);
  BitLedger& ledger = network_->mutable_ledger();
  const std::uint64_t frame = framing_bits(payload.size());
  ledger.bill(from, kind, payload.size(), frame);
  transcript_.push_back({ledger.rounds(), from, kind, payload.size() + frame, payload.digest()});
  auto& queue = from == kCoordinator ? to_site_ : to_coordinator_;
  queue.push_back({ledger.rounds(), from, std::move(kind), std::move(payload)});
}

Message Channel::receive(PartyId at) {
  check_endpoint(at);
  auto& queue = at == kCoordinator ? to_coordinator_ : to_site_;
  if (queue.empty())
    throw StructuralError("no pending message for party " + std::to_string(at));
  Message m = std::move(queue.front());
  queue.pop_front();
  return m;
}

bool Channel::has_pending(PartyId at) const {
  check_endpoint(at);
  return !(at == kCoordinator ? to_coordinator_ : to_site_).empty();
}

void Channel::bill_fixed_length(PartyId sender, std::string_view kind, std::uint64_t bits) {
  check_endpoint(sender);
  BitLedger& ledger = network_->mutable_ledger();
  ledger.bill(sender, kind, bits, 0);
  // Back-and-forth fixed-length exchanges collapse into the matching one of
  // the last two transcript entries.
  const std::size_t n = transcript_.size();
  for (std::size_t back = 1; back <= std::min<std::size_t>(2, n); ++back) {
    TranscriptEntry& e = transcript_[n - back];
    if (e.digest == 0 && e.round == ledger.rounds() && e.sender == sender && e.kind == kind) {
      e.bits += bits;
      return;
    }
  }
  transcript_.push_back({ledger.rounds(), sender, std::string(kind), bits, 0});
}

PublicCoin& Channel::coins() { return network_->coins(); }

Network::Network(int sites, std::uint64_t run_seed) : coins_(run_seed) {
  if (sites < 1) throw StructuralError("network needs at least one site");
  channels_.reserve(static_cast<std::size_t>(sites));
  for (int i = 1; i <= sites; ++i) channels_.push_back(std::make_unique<Channel>(*this, i));
}

Channel& Network::channel(PartyId site) {
  if (site < 1 || site > sites()) throw StructuralError("no channel for site " + std::to_string(site));
  return *channels_[static_cast<std::size_t>(site - 1)];
}

const char* to_string(Ordering o) noexcept {
  switch (o) {
    case Ordering::Less: return "Less";
    case Ordering::Equal: return "Equal";
    case Ordering::Greater: return "Greater";
  }
  return "?";
}

unsigned fingerprint_bits(unsigned width, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw StructuralError("delta must lie in (0,1)");
  const double lw = std::log2(static_cast<double>(std::max(width, 2u)));
  const double h = std::ceil(std::log2(lw / delta)) + 2.0;
  return static_cast<unsigned>(std::clamp(h, 1.0, 64.0));
}

namespace {

std::uint64_t prefix(std::uint64_t v, unsigned width, unsigned len) {
  return len == 0 ? 0 : v >> (width - len);
}

// Multiply-shift hash onto h bits; for distinct keys the collision
// probability over a random odd multiplier is at most 2^{1-h}.
std::uint64_t fingerprint(std::uint64_t key, std::uint64_t multiplier, unsigned h) {
  return (multiplier * key) >> (64 - h);
}

}  // namespace

Ordering greater_than(Link& link, GtInput a, GtInput b, unsigned width, double delta,
                      std::string_view kind) {
  if (width > 64) throw StructuralError("comparison width exceeds 64 bits");
  if (width < 64 && ((a.value >> width) != 0 || (b.value >> width) != 0))
    throw StructuralError("comparison input exceeds declared width");
  if (width == 0) return Ordering::Equal;

  const unsigned h = fingerprint_bits(width, delta);
  const std::uint64_t seed = link.coins().next_seed("greater_than");
  std::uint64_t steps = 0;
  unsigned lo = 0, hi = width;  // lo: longest prefix known equal
  while (lo < hi) {
    const unsigned mid = (lo + hi + 1) / 2;
    const std::uint64_t mult = splitmix64(seed + steps) | 1ULL;
    const bool same = fingerprint(prefix(a.value, width, mid), mult, h) ==
                      fingerprint(prefix(b.value, width, mid), mult, h);
    ++steps;
    if (same) lo = mid; else hi = mid - 1;
  }
  link.bill_fixed_length(b.party, kind, steps);
  if (lo == width) {
    link.bill_fixed_length(a.party, kind, steps * h);
    return Ordering::Equal;
  }
  // P reveals its bit just past the common prefix.
  link.bill_fixed_length(a.party, kind, steps * h + 1);
  const bool a_bit = (a.value >> (width - 1 - lo)) & 1ULL;
  return a_bit ? Ordering::Greater : Ordering::Less;
}

std::size_t majority_repetitions(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw StructuralError("delta must lie in (0,1)");
  auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(std::log(1.0 / delta))));
  if (n % 2 == 0) ++n;
  return n;
}

Ordering high_prob_greater_than(Link& link, GtInput a, GtInput b, unsigned width, double delta,
                                std::string_view kind) {
  const std::size_t reps = majority_repetitions(delta);
  std::array<std::size_t, 3> votes{};
  for (std::size_t i = 0; i < reps; ++i)
    ++votes[static_cast<std::size_t>(greater_than(link, a, b, width, kBaseComparisonError, kind))];
  // Plurality; ties prefer Equal, then Less.
  Ordering best = Ordering::Equal;
  for (Ordering o : {Ordering::Less, Ordering::Greater})
    if (votes[static_cast<std::size_t>(o)] > votes[static_cast<std::size_t>(best)]) best = o;
  return best;
}

}  // namespace distclust
