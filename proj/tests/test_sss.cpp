#include <doctest.h>

#include <random>
#include <set>

#include "fixtures.hpp"
#include "quest/errors.hpp"
#include "quest/sss/field.hpp"
#include "quest/sss/searchable.hpp"
#include "quest/sss/shamir.hpp"

using namespace quest;
using namespace quest::sss;

namespace {

FieldElement reconstruct_fragment_match(const PrimeField& f, const std::vector<SssFragment>& data,
                                        const std::vector<SssFragment>& query, std::size_t k) {
  std::vector<std::pair<std::uint64_t, FieldElement>> pts;
  for (std::size_t i = 0; i < k; ++i) {
    const auto s = string_match(f, data[i], query[i]);
    pts.emplace_back(s.server_index, s.value);
  }
  return interpolate(f, pts);
}

}  // namespace

TEST_CASE("field arithmetic agrees with 128-bit reference on both reduction paths") {
  std::mt19937_64 gen(7);
  for (std::uint64_t p : {kMersenne61, std::uint64_t{1000003}, std::uint64_t{0xFFFFFFFFFFFFFFC5}}) {
    PrimeField f(p);
    for (int i = 0; i < 2000; ++i) {
      const auto a = gen() % p, b = gen() % p;
      CHECK(f.mul({a}, {b}).value == fixtures::mulmod(a, b, p));
      CHECK(f.add({a}, {b}).value == static_cast<std::uint64_t>((static_cast<fixtures::wide>(a) + b) % p));
      CHECK(f.sub(f.add({a}, {b}), {b}).value == a);
      if (a != 0) CHECK(f.mul({a}, f.inv({a})).value == 1);
    }
  }
}

TEST_CASE("dot matches a product-by-product sum") {
  PrimeField f;
  SeededRng rng(3);
  std::vector<FieldElement> a(100), b(100);
  for (auto& x : a) x = f.random(rng);
  for (auto& x : b) x = f.random(rng);
  std::uint64_t acc = 0;
  for (int i = 0; i < 100; ++i) acc = (acc + fixtures::mulmod(a[i].value, b[i].value, kMersenne61)) % kMersenne61;
  CHECK(f.dot(a, b).value == acc);
}

TEST_CASE("inverse of zero is an interpolation error") {
  PrimeField f;
  CHECK_THROWS_AS(f.inv({0}), InterpolationError);
}

TEST_CASE("worked example: forced polynomials give 78, 279, 604 and reconstruct 1") {
  PrimeField f;
  const std::vector<std::uint32_t> y{1};  // "Y" over the two-symbol alphabet {X, Y}
  ScriptedRng owner({2, 8});              // 0 + 2x, 1 + 8x
  ScriptedRng user({3, 7});               // 0 + 3x, 1 + 7x
  const auto data = make_sss(f, y, 3, owner, 2);
  const auto query = make_sss(f, y, 3, user, 2);

  CHECK(data[0].values == std::vector<FieldElement>{{2}, {9}});
  CHECK(data[1].values == std::vector<FieldElement>{{4}, {17}});
  CHECK(data[2].values == std::vector<FieldElement>{{6}, {25}});
  CHECK(query[0].values == std::vector<FieldElement>{{3}, {8}});
  CHECK(query[1].values == std::vector<FieldElement>{{6}, {15}});
  CHECK(query[2].values == std::vector<FieldElement>{{9}, {22}});

  std::vector<std::uint64_t> server_values;
  for (int s = 0; s < 3; ++s) server_values.push_back(string_match(f, data[s], query[s]).value.value);
  CHECK(server_values == std::vector<std::uint64_t>{78, 279, 604});
  CHECK(fixtures::naive_interpolate({{1, 78}, {2, 279}, {3, 604}}, kMersenne61) == 1);
  CHECK(reconstruct_fragment_match(f, data, query, 3).value == 1);
  // The interpolation as printed uses only the Y-bit products.
  CHECK(fixtures::naive_interpolate({{1, 72}, {2, 255}, {3, 550}}, kMersenne61) == 1);
}

TEST_CASE("share and reconstruct round-trips for every degree+1 subset") {
  PrimeField f;
  SeededRng rng(11);
  for (int t = 0; t < 50; ++t) {
    const auto secret = f.random(rng);
    const auto shared = share_scalar(f, secret, 2, 6, rng);
    for (int a = 0; a < 6; ++a)
      for (int b = a + 1; b < 6; ++b)
        for (int c = b + 1; c < 6; ++c) {
          std::vector<Share> sub{shared.shares[a], shared.shares[b], shared.shares[c]};
          CHECK(reconstruct(f, sub) == secret);
        }
  }
}

TEST_CASE("sharing errors") {
  PrimeField f;
  SeededRng rng(1);
  CHECK_THROWS_AS(share_scalar(f, {1}, 3, 3, rng), ThresholdError);
  const auto s = share_scalar(f, {5}, 1, 3, rng);
  CHECK_THROWS_AS(reconstruct(f, std::vector<Share>{s.shares[0]}), ReconstructionThresholdError);
  std::vector<std::pair<std::uint64_t, FieldElement>> dup{{1, {2}}, {1, {3}}};
  CHECK_THROWS_AS(interpolate(f, dup), InterpolationError);
  CHECK_THROWS_AS(share_mul(f, s.shares[0], s.shares[1]), CrossServerError);
}

TEST_CASE("share arithmetic tracks degrees") {
  PrimeField f;
  SeededRng rng(5);
  const auto a = share_scalar(f, {6}, 1, 5, rng);
  const auto b = share_scalar(f, {7}, 1, 5, rng);
  std::vector<Share> prod, sum;
  for (int i = 0; i < 5; ++i) {
    prod.push_back(share_mul(f, a.shares[i], b.shares[i]));
    sum.push_back(share_add(f, a.shares[i], b.shares[i]));
  }
  CHECK(prod[0].degree == 2);
  CHECK(sum[0].degree == 1);
  CHECK(reconstruct(f, prod).value == 42);
  CHECK(reconstruct(f, sum).value == 13);
}

TEST_CASE("unary encoding") {
  CHECK(encode_unary(3, 5) == std::vector<std::uint8_t>{0, 0, 0, 1, 0});
  CHECK_THROWS_AS(encode_unary(16), EncodingError);
  CHECK(hex_symbols("0aF") == std::vector<std::uint32_t>{0, 10, 15});
  CHECK_THROWS_AS(hex_symbols("G"), EncodingError);
}

TEST_CASE("single-symbol string match over all ordered pairs") {
  PrimeField f;
  SeededRng rng(99);
  for (std::uint32_t a = 0; a < 16; ++a) {
    for (std::uint32_t b = 0; b < 16; ++b) {
      const std::vector<std::uint32_t> sa{a}, sb{b};
      const auto d = make_sss(f, sa, 3, rng);
      const auto q = make_sss(f, sb, 3, rng);
      CHECK(reconstruct_fragment_match(f, d, q, 3).value == (a == b ? 1u : 0u));
    }
  }
}

TEST_CASE("three-symbol match times value needs exactly 2l+2 shares") {
  PrimeField f;
  SeededRng rng(1234);
  int needed_more = 0;
  for (int t = 0; t < 200; ++t) {
    std::vector<std::uint32_t> a(3), b(3);
    for (auto& s : a) s = static_cast<std::uint32_t>(rng.uniform_below(16));
    b = a;
    if (t % 2) b[rng.uniform_below(3)] = static_cast<std::uint32_t>(rng.uniform_below(16));
    const auto d = make_sss(f, a, 9, rng);
    const auto q = make_sss(f, b, 9, rng);
    const auto v = share_scalar(f, {777}, 1, 9, rng);
    std::vector<Share> prod;
    for (int s = 0; s < 9; ++s) prod.push_back(share_mul(f, string_match(f, d[s], q[s]), v.shares[s]));
    CHECK(prod[0].degree == 7);
    CHECK(reconstruct(f, prod).value == (a == b ? 777u : 0u));
    std::vector<std::pair<std::uint64_t, FieldElement>> seven;
    for (int s = 0; s < 7; ++s) seven.emplace_back(s + 1, prod[s].value);
    if (a == b && interpolate(f, seven).value != 777) ++needed_more;
  }
  CHECK(needed_more > 0);
}

TEST_CASE("string match rejects mismatched operands") {
  PrimeField f;
  SeededRng rng(2);
  const std::vector<std::uint32_t> s2{1, 2}, s3{1, 2, 3};
  const auto a = make_sss(f, s2, 3, rng);
  const auto b = make_sss(f, s3, 3, rng);
  CHECK_THROWS_AS(string_match(f, a[0], b[0]), ShapeError);
  CHECK_THROWS_AS(string_match(f, a[0], a[1]), CrossServerError);
}

TEST_CASE("fragment and share vectors survive serialization") {
  PrimeField f;
  SeededRng rng(8);
  const std::vector<std::uint32_t> s{4, 0, 15};
  const auto frags = make_sss(f, s, 4, rng);
  ByteWriter w;
  write_fragment(w, frags[2]);
  ShareVector sv{3, 7, {{1}, {2}, {kMersenne61 - 1}}};
  write_share_vector(w, sv);
  write_share(w, Share{5, {9}, 1});
  ByteReader r(w.buffer());
  CHECK(read_fragment(r) == frags[2]);
  CHECK(read_share_vector(r) == sv);
  CHECK(read_share(r) == Share{5, {9}, 1});
  CHECK(r.done());
}

TEST_CASE("degree-1 shares look uniform on a small prime") {
  // Chi-square over all 101 residues.
  constexpr std::uint64_t p = 101;
  PrimeField f(p);
  SeededRng rng(31337);
  std::vector<int> buckets(p, 0);
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto s = share_scalar(f, {42}, 1, 3, rng);
    ++buckets[s.shares[1].value.value];
  }
  double chi = 0;
  const double expected = static_cast<double>(n) / p;
  for (int c : buckets) chi += (c - expected) * (c - expected) / expected;
  CHECK(chi < 149.45);  // 100 dof, 0.999 quantile
}
