#include "distclust/encoding.hpp"

#include <cmath>

#include "distclust/errors.hpp"

namespace distclust {

namespace {

void check_base(double lambda) {
  if (!(lambda > 1.0) || !std::isfinite(lambda)) throw StructuralError("power base must exceed 1");
}

}  // namespace

ExponentCode power_approx(double m, double lambda) {
  check_base(lambda);
  if (m < 0.0 || !std::isfinite(m)) throw StructuralError("power_approx needs a finite m >= 0");
  if (m == 0.0) return ExponentCode::zero();
  auto i = static_cast<std::int64_t>(std::ceil(std::log(m) / std::log(lambda)));
  while (std::pow(lambda, static_cast<double>(i)) < m) ++i;
  while (std::pow(lambda, static_cast<double>(i - 1)) >= m) --i;
  return {i, false};
}

double power_decode(ExponentCode code, double lambda) {
  check_base(lambda);
  return code.is_zero ? 0.0 : std::pow(lambda, static_cast<double>(code.exponent));
}

std::int64_t nearest_exponent(double m, double lambda) {
  check_base(lambda);
  if (!(m > 0.0)) throw StructuralError("nearest_exponent needs m > 0");
  const double t = std::log(m) / std::log(lambda);
  const double lo = std::floor(t);
  return static_cast<std::int64_t>(t - lo <= lo + 1.0 - t ? lo : lo + 1.0);
}

void append_code(BitString& out, ExponentCode code) {
  out.append_gamma(code.is_zero ? 1 : zigzag(code.exponent) + 2);
}

ExponentCode read_code(BitReader& in) {
  const std::uint64_t g = in.read_gamma();
  if (g == 1) return ExponentCode::zero();
  return {unzigzag(g - 2), false};
}

unsigned code_len(ExponentCode code) {
  return gamma_len(code.is_zero ? 1 : zigzag(code.exponent) + 2);
}

double default_offset_eps(double eps, std::size_t d, double n, double delta) {
  const double lg = std::max(1.0, std::ceil(std::log2(std::max(2.0, n * delta))));
  return eps / (8.0 * static_cast<double>(std::max<std::size_t>(d, 1)) * lg);
}

EncodedPoint encode_offset_point(const WeightedPoint& x, const CenterSet& centers,
                                 const OffsetCodec& codec) {
  if (!(codec.eps_prime > 0.0)) throw StructuralError("offset accuracy must be positive");
  if (!(x.weight > 0.0)) throw StructuralError("encoded weight must be positive");
  const NearestCenter nc = nearest_center(x.coords, centers);
  const Point& c = centers[nc.index];
  EncodedPoint enc;
  enc.center_index = nc.index;
  enc.signs.resize(x.coords.size());
  enc.exponents.assign(x.coords.size(), 0);
  const double base = 1.0 + codec.eps_prime;
  for (std::size_t i = 0; i < x.coords.size(); ++i) {
    const double off = x.coords[i] - c[i];
    if (off == 0.0) continue;
    enc.signs[i] = off > 0 ? 1 : -1;
    enc.exponents[i] = nearest_exponent(std::fabs(off), base);
  }
  enc.weight_exponent = nearest_exponent(x.weight, codec.weight_base);
  return enc;
}

WeightedPoint decode_offset_point(const EncodedPoint& enc, const CenterSet& centers,
                                  const OffsetCodec& codec) {
  if (enc.center_index >= centers.size()) throw StructuralError("encoded center index out of range");
  const Point& c = centers[enc.center_index];
  if (c.size() != enc.signs.size()) throw StructuralError("encoded point dimension mismatch");
  WeightedPoint out{c, std::pow(codec.weight_base, static_cast<double>(enc.weight_exponent))};
  const double base = 1.0 + codec.eps_prime;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (enc.signs[i] != 0)
      out.coords[i] += enc.signs[i] * std::pow(base, static_cast<double>(enc.exponents[i]));
  return out;
}

void write_encoded_point(BitString& out, const EncodedPoint& enc, std::size_t num_centers) {
  out.append_bits(enc.center_index, index_width(num_centers));
  for (std::size_t i = 0; i < enc.signs.size(); ++i) {
    const int s = enc.signs[i];
    out.append_bits(s == 0 ? 0b00 : s > 0 ? 0b01 : 0b10, 2);
    if (s != 0) out.append_signed_gamma(enc.exponents[i]);
  }
  out.append_signed_gamma(enc.weight_exponent);
}

EncodedPoint read_encoded_point(BitReader& in, std::size_t num_centers, std::size_t d) {
  EncodedPoint enc;
  enc.center_index = in.read_bits(index_width(num_centers));
  enc.signs.resize(d);
  enc.exponents.assign(d, 0);
  for (std::size_t i = 0; i < d; ++i) {
    const auto tag = in.read_bits(2);
    if (tag == 0b11) throw StructuralError("invalid sign tag in encoded point");
    if (tag == 0b00) continue;
    enc.signs[i] = tag == 0b01 ? 1 : -1;
    enc.exponents[i] = in.read_signed_gamma();
  }
  enc.weight_exponent = in.read_signed_gamma();
  return enc;
}

std::size_t encoded_bits(const EncodedPoint& enc, std::size_t num_centers) {
  std::size_t bits = index_width(num_centers) + signed_gamma_len(enc.weight_exponent);
  for (std::size_t i = 0; i < enc.signs.size(); ++i)
    bits += 2 + (enc.signs[i] != 0 ? signed_gamma_len(enc.exponents[i]) : 0);
  return bits;
}

}  // namespace distclust
