#pragma once

#include <compare>
#include <cstdint>
#include <span>

namespace quest::sss {

__extension__ typedef unsigned __int128 u128;

inline constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

/// Element of a prime field; always reduced into [0, p).
struct FieldElement {
  std::uint64_t value = 0;

  friend auto operator<=>(const FieldElement&, const FieldElement&) = default;
};

class RandomSource;

/// Arithmetic mod a runtime prime. 2^61-1 takes a shift-and-add reduction;
/// any other prime (test primes included) uses a 128-bit remainder.
class PrimeField {
 public:
  explicit PrimeField(std::uint64_t prime = kMersenne61);

  std::uint64_t modulus() const noexcept { return p_; }

  FieldElement from_u64(std::uint64_t v) const noexcept { return {v % p_}; }

  FieldElement add(FieldElement a, FieldElement b) const noexcept {
    std::uint64_t s = a.value + b.value;
    if (s >= p_ || s < a.value) s -= p_;
    return {s};
  }
  FieldElement sub(FieldElement a, FieldElement b) const noexcept {
    return {a.value >= b.value ? a.value - b.value : a.value + (p_ - b.value)};
  }
  FieldElement neg(FieldElement a) const noexcept { return {a.value == 0 ? 0 : p_ - a.value}; }
  FieldElement mul(FieldElement a, FieldElement b) const noexcept {
    return {reduce(static_cast<u128>(a.value) * b.value)};
  }
  FieldElement pow(FieldElement base, std::uint64_t exp) const noexcept;
  /// Throws InterpolationError on zero.
  FieldElement inv(FieldElement a) const;

  /// Sum of pairwise products with a single final reduction.
  FieldElement dot(std::span<const FieldElement> a, std::span<const FieldElement> b) const;

  FieldElement random(RandomSource& rng) const;

  std::uint64_t reduce(u128 x) const noexcept {
    if (mersenne_) {
      // x < 2^126 for any sum of up to 16 products; two folds suffice.
      u128 y = (x & kMersenne61) + (x >> 61);
      std::uint64_t z = static_cast<std::uint64_t>((y & kMersenne61) + (y >> 61));
      return z >= p_ ? z - p_ : z;
    }
    return static_cast<std::uint64_t>(x % p_);
  }

 private:
  std::uint64_t p_;
  bool mersenne_;
};

}  // namespace quest::sss
