#include "quest/sss/rng.hpp"

#include <openssl/rand.h>

#include "quest/errors.hpp"

namespace quest::sss {

std::uint64_t RandomSource::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw ParameterError("uniform_below(0)");
  // Largest multiple of bound that fits; values above it are rejected.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % bound;
}

std::uint64_t SystemRng::next_u64() {
  if (pos_ == buffer_.size()) {
    buffer_.resize(512);
    if (RAND_bytes(reinterpret_cast<unsigned char*>(buffer_.data()),
                   static_cast<int>(buffer_.size() * sizeof(std::uint64_t))) != 1) {
      throw Error("RAND_bytes failed");
    }
    pos_ = 0;
  }
  return buffer_[pos_++];
}

std::uint64_t ScriptedRng::next_u64() {
  if (script_.empty()) throw Error("scripted randomness exhausted");
  auto v = script_.front();
  script_.pop_front();
  return v;
}

std::uint64_t ScriptedRng::uniform_below(std::uint64_t bound) {
  auto v = next_u64();
  if (v >= bound) throw ParameterError("scripted value out of range");
  return v;
}

}  // namespace quest::sss
