#include "quest/sss/shamir.hpp"

#include <set>

#include "quest/errors.hpp"

namespace quest::sss {

namespace {

void check_server_index(std::uint32_t n) {
  if (n == 0 || n > 255) throw ThresholdError("server count must be in [1, 255]");
}

std::uint8_t narrow_u8(std::uint32_t v, const char* what) {
  if (v > 255) throw FormatError(std::string(what) + " does not fit in one byte");
  return static_cast<std::uint8_t>(v);
}

}  // namespace

SharedScalar share_polynomial(const PrimeField& field, std::span<const FieldElement> coefficients,
                              std::uint32_t n) {
  if (coefficients.empty()) throw ThresholdError("polynomial needs a constant term");
  const auto degree = static_cast<std::uint32_t>(coefficients.size() - 1);
  check_server_index(n);
  if (degree >= n) throw ThresholdError("degree must be below the number of shares");

  SharedScalar out;
  out.degree = degree;
  out.shares.reserve(n);
  for (std::uint32_t x = 1; x <= n; ++x) {
    // Horner evaluation at x.
    FieldElement acc{0};
    const FieldElement fx = field.from_u64(x);
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
      acc = field.add(field.mul(acc, fx), *it);
    }
    out.shares.push_back({x, acc, degree});
  }
  return out;
}

SharedScalar share_scalar(const PrimeField& field, FieldElement secret, std::uint32_t degree,
                          std::uint32_t n, RandomSource& rng) {
  check_server_index(n);
  if (degree >= n) throw ThresholdError("degree must be below the number of shares");
  std::vector<FieldElement> coeffs;
  coeffs.reserve(degree + 1);
  coeffs.push_back(field.from_u64(secret.value));
  for (std::uint32_t i = 0; i < degree; ++i) coeffs.push_back(field.random(rng));
  return share_polynomial(field, coeffs, n);
}

LagrangeAtZero::LagrangeAtZero(const PrimeField& field, std::span<const std::uint64_t> xs)
    : field_(&field) {
  if (xs.empty()) throw InterpolationError("no interpolation points");
  std::set<std::uint64_t> seen;
  for (auto x : xs) {
    if (!seen.insert(x % field.modulus()).second) {
      throw InterpolationError("duplicate x value " + std::to_string(x));
    }
  }
  weights_.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const FieldElement xi = field.from_u64(xs[i]);
    FieldElement num{1}, den{1};
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (j == i) continue;
      const FieldElement xj = field.from_u64(xs[j]);
      num = field.mul(num, field.neg(xj));      // (0 - x_j)
      den = field.mul(den, field.sub(xi, xj));  // (x_i - x_j)
    }
    weights_.push_back(field.mul(num, field.inv(den)));
  }
}

FieldElement LagrangeAtZero::combine(std::span<const FieldElement> ys) const {
  if (ys.size() != weights_.size()) throw ShapeError("point count does not match basis");
  return field_->dot(weights_, ys);
}

FieldElement interpolate(const PrimeField& field,
                         std::span<const std::pair<std::uint64_t, FieldElement>> points) {
  std::vector<std::uint64_t> xs;
  std::vector<FieldElement> ys;
  for (const auto& [x, y] : points) {
    xs.push_back(x);
    ys.push_back(y);
  }
  return LagrangeAtZero(field, xs).combine(ys);
}

FieldElement reconstruct(const PrimeField& field, std::span<const Share> shares) {
  if (shares.empty()) throw ReconstructionThresholdError("no shares");
  const auto degree = shares.front().degree;
  if (shares.size() < degree + 1) {
    throw ReconstructionThresholdError("need " + std::to_string(degree + 1) + " shares, have " +
                                       std::to_string(shares.size()));
  }
  std::vector<std::pair<std::uint64_t, FieldElement>> pts;
  for (std::size_t i = 0; i <= degree; ++i) pts.emplace_back(shares[i].server_index, shares[i].value);
  return interpolate(field, pts);
}

Share share_mul(const PrimeField& field, const Share& a, const Share& b) {
  if (a.server_index != b.server_index) {
    throw CrossServerError("cannot combine shares of servers " + std::to_string(a.server_index) +
                           " and " + std::to_string(b.server_index));
  }
  return {a.server_index, field.mul(a.value, b.value), a.degree + b.degree};
}

Share share_add(const PrimeField& field, const Share& a, const Share& b) {
  if (a.server_index != b.server_index) {
    throw CrossServerError("cannot combine shares of servers " + std::to_string(a.server_index) +
                           " and " + std::to_string(b.server_index));
  }
  return {a.server_index, field.add(a.value, b.value), std::max(a.degree, b.degree)};
}

void write_share(ByteWriter& w, const Share& s) {
  w.u8(narrow_u8(s.server_index, "server_index"));
  w.u8(narrow_u8(s.degree, "degree"));
  w.u64(s.value.value);
}

Share read_share(ByteReader& r) {
  Share s;
  s.server_index = r.u8();
  s.degree = r.u8();
  s.value.value = r.u64();
  return s;
}

void write_share_vector(ByteWriter& w, const ShareVector& v) {
  w.u8(narrow_u8(v.server_index, "server_index"));
  w.u8(narrow_u8(v.degree, "degree"));
  w.u32(static_cast<std::uint32_t>(v.values.size()));
  for (auto e : v.values) w.u64(e.value);
}

ShareVector read_share_vector(ByteReader& r) {
  ShareVector v;
  v.server_index = r.u8();
  v.degree = r.u8();
  const auto n = r.u32();
  if (static_cast<std::uint64_t>(n) * 8 > r.remaining()) throw FormatError("truncated share vector");
  v.values.resize(n);
  for (auto& e : v.values) e.value = r.u64();
  return v;
}

}  // namespace quest::sss
