#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "relbc/rng.hpp"

namespace relbc {

// One-time pad key material. Bits are consumed strictly left to right and
// never reused; consumed_prefix marks how many are spent.
struct OneTimePadKey {
    std::vector<std::uint8_t> key_bits;  // one bit per element
    std::size_t consumed_prefix = 0;

    std::size_t remaining() const { return key_bits.size() - consumed_prefix; }
};

OneTimePadKey make_otp_key(std::size_t n_bits, RandomStream& rng);

// XOR against the next unconsumed key segment; advances consumed_prefix.
// Throws std::runtime_error when the key is too short (a pad is never reused).
std::vector<std::uint8_t> otp_encrypt(std::span<const std::uint8_t> plaintext_bits,
                                      OneTimePadKey& key);

// Decryption is the same XOR applied by the holder of an identical key copy.
std::vector<std::uint8_t> otp_decrypt(std::span<const std::uint8_t> ciphertext_bits,
                                      OneTimePadKey& key);

}  // namespace relbc
