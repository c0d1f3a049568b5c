#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace distclust {

/// Number of bits in the Elias-gamma code of n >= 1: 2*floor(log2 n) + 1.
unsigned gamma_len(std::uint64_t n);

/// Bits needed to address `count` distinct values: ceil(log2 count), 0 for count <= 1.
unsigned index_width(std::uint64_t count);

std::uint64_t zigzag(std::int64_t v) noexcept;
std::int64_t unzigzag(std::uint64_t u) noexcept;

/// Bit length of the zig-zag + gamma code of a signed integer.
unsigned signed_gamma_len(std::int64_t v);

/// Append-only bit string, most significant bit first.
class BitString {
 public:
  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  bool operator[](std::size_t i) const { return bits_[i]; }
  bool operator==(const BitString&) const = default;

  void append_bit(bool b) { bits_.push_back(b); }
  /// Low `width` bits of `value`, MSB first. width <= 64.
  void append_bits(std::uint64_t value, unsigned width);
  /// Elias-gamma code of n >= 1.
  void append_gamma(std::uint64_t n);
  /// Zig-zag of v, plus one, gamma coded.
  void append_signed_gamma(std::int64_t v);
  void append(const BitString& other);

  /// FNV-style digest over the bit contents; used for transcript comparisons.
  std::uint64_t digest() const noexcept;

 private:
  std::vector<bool> bits_;
};

class BitReader {
 public:
  explicit BitReader(const BitString& bits) : bits_(&bits) {}

  bool read_bit();
  std::uint64_t read_bits(unsigned width);
  std::uint64_t read_gamma();
  std::int64_t read_signed_gamma();

  std::size_t position() const noexcept { return pos_; }
  bool at_end() const noexcept { return pos_ == bits_->size(); }

 private:
  const BitString* bits_;
  std::size_t pos_ = 0;
};

}  // namespace distclust
