#include "quest/cquest/cipher.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <memory>

#include "quest/errors.hpp"

namespace quest::cquest {

namespace {

std::array<std::uint8_t, 32> labelled_hash(std::string_view label, ByteView key) {
  Bytes input(label.begin(), label.end());
  input.insert(input.end(), key.begin(), key.end());
  std::array<std::uint8_t, 32> out{};
  if (EVP_Digest(input.data(), input.size(), out.data(), nullptr, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 failure");
  }
  return out;
}

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};

void ctr_xor(const std::array<std::uint8_t, 32>& key, const std::uint8_t* iv, ByteView in,
             std::uint8_t* out) {
  std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter> ctx(EVP_CIPHER_CTX_new());
  int len = 0;
  if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_ctr(), nullptr, key.data(), iv) != 1 ||
      EVP_EncryptUpdate(ctx.get(), out, &len, in.data(), static_cast<int>(in.size())) != 1) {
    throw Error("AES-CTR failure");
  }
}

}  // namespace

AttributeKey derive_attribute_key(ByteView s_q, ByteView k_pko, std::uint8_t attribute_id) {
  if (s_q.empty() || s_q.size() != k_pko.size()) {
    throw KeyDerivationError("s_q and k_pko must be non-empty and of equal length");
  }
  AttributeKey k;
  k.key_bytes.resize(s_q.size() + 1);
  for (std::size_t i = 0; i < s_q.size(); ++i) k.key_bytes[i] = s_q[i] ^ k_pko[i];
  k.key_bytes.back() = attribute_id;
  return k;
}

std::array<AttributeKey, 5> derive_keys(ByteView s_q, ByteView k_pko) {
  std::array<AttributeKey, 5> keys;
  for (std::uint8_t i = 0; i < 5; ++i) keys[i] = derive_attribute_key(s_q, k_pko, i + 1);
  return keys;
}

DeterministicCipher::DeterministicCipher(const AttributeKey& key)
    : enc_key_(labelled_hash("quest.enc", key.key_bytes)),
      mac_key_(labelled_hash("quest.mac", key.key_bytes)) {}

Bytes DeterministicCipher::encrypt(ByteView plaintext) const {
  std::uint8_t tag[EVP_MAX_MD_SIZE];
  unsigned tag_len = 0;
  HMAC(EVP_sha256(), mac_key_.data(), static_cast<int>(mac_key_.size()), plaintext.data(),
       plaintext.size(), tag, &tag_len);
  Bytes out(kIvBytes + plaintext.size());
  std::copy(tag, tag + kIvBytes, out.begin());
  ctr_xor(enc_key_, out.data(), plaintext, out.data() + kIvBytes);
  return out;
}

Bytes DeterministicCipher::decrypt(ByteView ciphertext) const {
  if (ciphertext.size() < kIvBytes) throw DecryptionError("ciphertext too short");
  Bytes plain(ciphertext.size() - kIvBytes);
  ctr_xor(enc_key_, ciphertext.data(), ciphertext.subspan(kIvBytes), plain.data());
  std::uint8_t tag[EVP_MAX_MD_SIZE];
  unsigned tag_len = 0;
  HMAC(EVP_sha256(), mac_key_.data(), static_cast<int>(mac_key_.size()), plain.data(),
       plain.size(), tag, &tag_len);
  if (CRYPTO_memcmp(tag, ciphertext.data(), kIvBytes) != 0) {
    throw DecryptionError("ciphertext authentication failed");
  }
  return plain;
}

}  // namespace quest::cquest
