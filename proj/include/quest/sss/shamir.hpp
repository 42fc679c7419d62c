#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "quest/bytes.hpp"
#include "quest/sss/field.hpp"
#include "quest/sss/rng.hpp"

namespace quest::sss {

/// One server's evaluation of a hidden polynomial at x = server_index.
/// `degree` is the degree of that polynomial, carried so every consumer
/// knows how many shares reconstruction needs.
struct Share {
  std::uint32_t server_index = 0;
  FieldElement value;
  std::uint32_t degree = 0;

  friend bool operator==(const Share&, const Share&) = default;
};

struct SharedScalar {
  std::vector<Share> shares;  // shares[i].server_index == i + 1
  std::uint32_t degree = 0;
};

/// Shamir-shares `secret` with a fresh polynomial of the given degree whose
/// non-constant coefficients are uniform over the field.
SharedScalar share_scalar(const PrimeField& field, FieldElement secret, std::uint32_t degree,
                          std::uint32_t n, RandomSource& rng);

/// Shares the polynomial coefficients[0] + coefficients[1] x + ... directly.
SharedScalar share_polynomial(const PrimeField& field, std::span<const FieldElement> coefficients,
                              std::uint32_t n);

/// Lagrange evaluation at x = 0 through the given points.
FieldElement interpolate(const PrimeField& field,
                         std::span<const std::pair<std::uint64_t, FieldElement>> points);

/// Reconstructs from the first degree+1 shares; throws
/// ReconstructionThresholdError when fewer are supplied.
FieldElement reconstruct(const PrimeField& field, std::span<const Share> shares);

/// Precomputed Lagrange weights at zero for a fixed set of evaluation
/// points, for reconstructing many secrets shared over the same servers.
class LagrangeAtZero {
 public:
  LagrangeAtZero(const PrimeField& field, std::span<const std::uint64_t> xs);

  FieldElement combine(std::span<const FieldElement> ys) const;
  std::size_t size() const noexcept { return weights_.size(); }

 private:
  const PrimeField* field_;
  std::vector<FieldElement> weights_;
};

/// Local product of two shares held by the same server; degrees add.
Share share_mul(const PrimeField& field, const Share& a, const Share& b);
/// Local sum of two shares held by the same server; degree is the max.
Share share_add(const PrimeField& field, const Share& a, const Share& b);

/// A run of shares held by one server, all of the same degree.
struct ShareVector {
  std::uint32_t server_index = 0;
  std::uint32_t degree = 0;
  std::vector<FieldElement> values;

  friend bool operator==(const ShareVector&, const ShareVector&) = default;
};

// Wire forms. A share is (server_index: u8, degree: u8, value: u64 LE); a
// share vector is the same prefix, a u32 count, then the values.
void write_share(ByteWriter& w, const Share& s);
Share read_share(ByteReader& r);
void write_share_vector(ByteWriter& w, const ShareVector& v);
ShareVector read_share_vector(ByteReader& r);

}  // namespace quest::sss
