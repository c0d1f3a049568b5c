#include "distclust/bitio.hpp"

#include <bit>

#include "distclust/errors.hpp"

namespace distclust {

unsigned gamma_len(std::uint64_t n) {
  if (n == 0) throw StructuralError("Elias-gamma is undefined for 0");
  return 2 * (std::bit_width(n) - 1) + 1;
}

unsigned index_width(std::uint64_t count) {
  if (count <= 1) return 0;
  return std::bit_width(count - 1);
}

std::uint64_t zigzag(std::int64_t v) noexcept {
  return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}

std::int64_t unzigzag(std::uint64_t u) noexcept {
  return static_cast<std::int64_t>(u >> 1) ^ -static_cast<std::int64_t>(u & 1);
}

unsigned signed_gamma_len(std::int64_t v) { return gamma_len(zigzag(v) + 1); }

void BitString::append_bits(std::uint64_t value, unsigned width) {
  if (width > 64) throw StructuralError("bit field wider than 64");
  for (unsigned i = width; i > 0; --i) bits_.push_back(((value >> (i - 1)) & 1U) != 0);
}

void BitString::append_gamma(std::uint64_t n) {
  if (n == 0) throw StructuralError("Elias-gamma is undefined for 0");
  const unsigned w = std::bit_width(n);
  for (unsigned i = 1; i < w; ++i) bits_.push_back(false);
  append_bits(n, w);
}

void BitString::append_signed_gamma(std::int64_t v) { append_gamma(zigzag(v) + 1); }

void BitString::append(const BitString& other) {
  bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
}

std::uint64_t BitString::digest() const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ bits_.size();
  for (bool b : bits_) {
    h ^= b ? 0x9dU : 0x3bU;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool BitReader::read_bit() {
  if (pos_ >= bits_->size()) throw StructuralError("read past end of bit string");
  return (*bits_)[pos_++];
}

std::uint64_t BitReader::read_bits(unsigned width) {
  std::uint64_t v = 0;
  for (unsigned i = 0; i < width; ++i) v = (v << 1) | (read_bit() ? 1U : 0U);
  return v;
}

std::uint64_t BitReader::read_gamma() {
  unsigned zeros = 0;
  while (!read_bit()) {
    if (++zeros > 63) throw StructuralError("malformed Elias-gamma code");
  }
  return (std::uint64_t{1} << zeros) | read_bits(zeros);
}

std::int64_t BitReader::read_signed_gamma() { return unzigzag(read_gamma() - 1); }

}  // namespace distclust
