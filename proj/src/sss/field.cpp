#include "quest/sss/field.hpp"

#include <algorithm>

#include "quest/errors.hpp"
#include "quest/model.hpp"
#include "quest/sss/rng.hpp"

namespace quest::sss {

PrimeField::PrimeField(std::uint64_t prime) : p_(prime), mersenne_(prime == kMersenne61) {
  if (!is_prime(prime)) throw ConfigError("field modulus " + std::to_string(prime) + " is not prime");
}

FieldElement PrimeField::pow(FieldElement base, std::uint64_t exp) const noexcept {
  FieldElement result{1 % p_};
  while (exp != 0) {
    if (exp & 1) result = mul(result, base);
    base = mul(base, base);
    exp >>= 1;
  }
  return result;
}

FieldElement PrimeField::inv(FieldElement a) const {
  if (a.value == 0) throw InterpolationError("inverse of zero");
  return pow(a, p_ - 2);
}

FieldElement PrimeField::dot(std::span<const FieldElement> a, std::span<const FieldElement> b) const {
  if (a.size() != b.size()) throw ShapeError("dot product of unequal lengths");
  // How many products fit in a u128 accumulator before reducing.
  const std::size_t chunk = mersenne_ ? 32 : (p_ < (std::uint64_t{1} << 62) ? 8 : 1);
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < a.size(); i += chunk) {
    u128 acc = 0;
    const auto end = std::min(a.size(), i + chunk);
    for (std::size_t j = i; j < end; ++j) acc += static_cast<u128>(a[j].value) * b[j].value;
    total = add({total}, {reduce(acc)}).value;
  }
  return {total};
}

FieldElement PrimeField::random(RandomSource& rng) const { return {rng.uniform_below(p_)}; }

}  // namespace quest::sss
