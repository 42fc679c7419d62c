#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <vector>

namespace quest::sss {

/// Randomness for polynomial coefficients and protocol nonces.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual std::uint64_t next_u64() = 0;

  /// Uniform in [0, bound) by rejection sampling.
  virtual std::uint64_t uniform_below(std::uint64_t bound);
};

/// Deterministic generator for tests and seeded CLI runs.
class SeededRng final : public RandomSource {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next_u64() override { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// OS-entropy backed CSPRNG (OpenSSL RAND_bytes), buffered.
class SystemRng final : public RandomSource {
 public:
  std::uint64_t next_u64() override;

 private:
  std::vector<std::uint64_t> buffer_;
  std::size_t pos_ = 0;
};

/// Replays a fixed script of values; used to force specific polynomials.
/// uniform_below returns the scripted value unchanged (it must be < bound).
class ScriptedRng final : public RandomSource {
 public:
  explicit ScriptedRng(std::vector<std::uint64_t> script) : script_(script.begin(), script.end()) {}
  std::uint64_t next_u64() override;
  std::uint64_t uniform_below(std::uint64_t bound) override;

 private:
  std::deque<std::uint64_t> script_;
};

}  // namespace quest::sss
