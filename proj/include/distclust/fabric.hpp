#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <deque>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "distclust/bitio.hpp"

namespace distclust {

using PartyId = int;
inline constexpr PartyId kCoordinator = 0;

/// Bits billed to one (round, sender, kind) account. Messages posted with the
/// same key accumulate into one record, so the ledger stays compact even for
/// protocols that exchange millions of fingerprint messages.
struct LedgerRecord {
  std::size_t round = 0;
  PartyId sender = kCoordinator;
  std::string kind;
  std::uint64_t payload_bits = 0;
  std::uint64_t framing_bits = 0;
  std::uint64_t messages = 0;

  std::uint64_t bits() const noexcept { return payload_bits + framing_bits; }
};

class BitLedger {
 public:
  void bill(PartyId sender, std::string_view kind, std::uint64_t payload_bits,
            std::uint64_t framing_bits);

  std::size_t rounds() const noexcept { return rounds_; }
  void advance_round();

  std::uint64_t total_bits() const noexcept { return total_; }
  /// Independent recount over the stored records.
  std::uint64_t recount() const noexcept;
  std::uint64_t bits_of_kind(std::string_view kind) const;
  std::uint64_t bits_of_sender(PartyId sender) const;
  const std::vector<LedgerRecord>& records() const noexcept { return records_; }

  /// [{"round":..,"sender":..,"kind":..,"bits":..,"payload_bits":..,"framing_bits":..,"messages":..}]
  nlohmann::json to_json() const;

 private:
  std::vector<LedgerRecord> records_;
  std::map<PartyId, std::map<std::string, std::size_t, std::less<>>> open_;  // current round only
  std::size_t rounds_ = 0;
  std::uint64_t total_ = 0;
};

/// Shared randomness. Both endpoints of a protocol read the same coins for a
/// given (run seed, label, invocation counter) path; coins are never billed.
class PublicCoin {
 public:
  explicit PublicCoin(std::uint64_t run_seed) : run_seed_(run_seed) {}

  std::uint64_t next_seed(std::string_view label);
  std::uint64_t run_seed() const noexcept { return run_seed_; }

 private:
  std::uint64_t run_seed_;
  std::map<std::string, std::uint64_t, std::less<>> counters_;
};

struct Message {
  std::size_t round = 0;
  PartyId sender = kCoordinator;
  std::string kind;
  BitString payload;
};

/// Framing overhead of a self-delimiting message: gamma(payload length + 1).
std::uint64_t framing_bits(std::size_t payload_bits);

/// Anything a two-party sub-protocol (GreaterThan) can run over.
class Link {
 public:
  virtual ~Link() = default;
  /// Bills a message whose length both endpoints already know from public
  /// protocol state; such messages carry no framing.
  virtual void bill_fixed_length(PartyId sender, std::string_view kind, std::uint64_t bits) = 0;
  virtual PublicCoin& coins() = 0;
};

class Blackboard final : public Link {
 public:
  explicit Blackboard(std::uint64_t run_seed) : coins_(run_seed) {}

  /// Appends a self-delimiting message readable by every party.
  const Message& post(PartyId sender, std::string kind, BitString payload);
  void round_barrier() { ledger_.advance_round(); }
  std::size_t round() const noexcept { return ledger_.rounds(); }

  const std::vector<Message>& log() const noexcept { return log_; }
  const BitLedger& ledger() const noexcept { return ledger_; }

  void bill_fixed_length(PartyId sender, std::string_view kind, std::uint64_t bits) override;
  PublicCoin& coins() override { return coins_; }

 private:
  BitLedger ledger_;
  PublicCoin coins_;
  std::vector<Message> log_;
};

struct TranscriptEntry {
  std::size_t round = 0;
  PartyId sender = kCoordinator;
  std::string kind;
  std::uint64_t bits = 0;
  std::uint64_t digest = 0;

  bool operator==(const TranscriptEntry&) const = default;
};

class Network;

/// Private coordinator <-> site channel. All traffic is billed to the
/// network's shared ledger.
class Channel final : public Link {
 public:
  Channel(Network& network, PartyId site) : network_(&network), site_(site) {}

  PartyId site() const noexcept { return site_; }

  void send(PartyId from, std::string kind, BitString payload);
  /// Pops the oldest undelivered message addressed to `at`.
  Message receive(PartyId at);
  bool has_pending(PartyId at) const;

  const std::vector<TranscriptEntry>& transcript() const noexcept { return transcript_; }

  void bill_fixed_length(PartyId sender, std::string_view kind, std::uint64_t bits) override;
  PublicCoin& coins() override;

 private:
  void check_endpoint(PartyId p) const;

  Network* network_;
  PartyId site_;
  std::deque<Message> to_site_;
  std::deque<Message> to_coordinator_;
  std::vector<TranscriptEntry> transcript_;
};

class Network {
 public:
  Network(int sites, std::uint64_t run_seed);
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  int sites() const noexcept { return static_cast<int>(channels_.size()); }
  /// Channel to site `site` (1-based).
  Channel& channel(PartyId site);

  void round_barrier() { ledger_.advance_round(); }
  std::size_t round() const noexcept { return ledger_.rounds(); }
  const BitLedger& ledger() const noexcept { return ledger_; }
  BitLedger& mutable_ledger() noexcept { return ledger_; }
  PublicCoin& coins() noexcept { return coins_; }

 private:
  BitLedger ledger_;
  PublicCoin coins_;
  std::vector<std::unique_ptr<Channel>> channels_;
};

// ---------------------------------------------------------------------------
// Randomized comparison.

enum class Ordering { Less, Equal, Greater };

const char* to_string(Ordering o) noexcept;

struct GtInput {
  PartyId party = kCoordinator;
  std::uint64_t value = 0;
};

/// Fingerprint length per binary-search step: ceil(log2(log2(width)/delta)) + 2.
unsigned fingerprint_bits(unsigned width, double delta);

/// Compares a (held by a.party) with b (held by b.party), both < 2^width.
/// Binary search over prefix lengths; each step is a public-coin
/// multiply-shift fingerprint equality test. Errs with probability <= delta.
Ordering greater_than(Link& link, GtInput a, GtInput b, unsigned width, double delta,
                      std::string_view kind = "gt");

/// Per-repetition error used inside high_prob_greater_than.
inline constexpr double kBaseComparisonError = 1.0 / 32.0;

/// Number of majority-vote repetitions: ceil(ln(1/delta)), rounded up to odd.
std::size_t majority_repetitions(double delta);

Ordering high_prob_greater_than(Link& link, GtInput a, GtInput b, unsigned width, double delta,
                                std::string_view kind = "gt");

}  // namespace distclust
