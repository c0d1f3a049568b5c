#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "distclust/bitio.hpp"
#include "distclust/geometry.hpp"

namespace distclust {

/// Integer exponent i standing for lambda^i, or the reserved ZERO marker.
struct ExponentCode {
  std::int64_t exponent = 0;
  bool is_zero = false;

  static ExponentCode zero() { return {0, true}; }
  bool operator==(const ExponentCode&) const = default;
};

/// The integer i with m <= lambda^i < lambda*m; ZERO when m == 0.
ExponentCode power_approx(double m, double lambda);
double power_decode(ExponentCode code, double lambda);

/// Nearest power of lambda to m > 0 in log space, ties rounded down.
std::int64_t nearest_exponent(double m, double lambda);

/// Standalone wire form: gamma(1) for ZERO, else gamma(zigzag(i) + 2).
void append_code(BitString& out, ExponentCode code);
ExponentCode read_code(BitReader& in);
unsigned code_len(ExponentCode code);

/// A point stored as its nearest center plus per-coordinate offsets rounded
/// to signed powers of (1 + eps_prime), and a weight rounded to a power of
/// (1 + eps/2).
struct EncodedPoint {
  std::size_t center_index = 0;
  std::vector<std::int8_t> signs;        // -1, 0, +1
  std::vector<std::int64_t> exponents;   // meaningful where sign != 0
  std::int64_t weight_exponent = 0;

  bool operator==(const EncodedPoint&) const = default;
};

struct OffsetCodec {
  double eps_prime = 0.01;    // offset base is 1 + eps_prime
  double weight_base = 1.1;   // 1 + eps/2
};

/// eps / (8 * d * ceil(log2(n * Delta))).
double default_offset_eps(double eps, std::size_t d, double n, double delta);

EncodedPoint encode_offset_point(const WeightedPoint& x, const CenterSet& centers,
                                 const OffsetCodec& codec);
WeightedPoint decode_offset_point(const EncodedPoint& enc, const CenterSet& centers,
                                  const OffsetCodec& codec);

/// Layout: [center index: index_width(|C|) bits] then per coordinate
/// [2-bit sign: 00 zero, 01 plus, 10 minus][signed gamma exponent if sign != 0]
/// then [signed gamma weight exponent].
void write_encoded_point(BitString& out, const EncodedPoint& enc, std::size_t num_centers);
EncodedPoint read_encoded_point(BitReader& in, std::size_t num_centers, std::size_t d);
std::size_t encoded_bits(const EncodedPoint& enc, std::size_t num_centers);

}  // namespace distclust
