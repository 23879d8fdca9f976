#include "relbc/otp.hpp"

#include <stdexcept>

namespace relbc {

OneTimePadKey make_otp_key(std::size_t n_bits, RandomStream& rng) {
    OneTimePadKey key;
    key.key_bits.resize(n_bits);
    for (auto& b : key.key_bits) b = static_cast<std::uint8_t>(rng.bit());
    return key;
}

std::vector<std::uint8_t> otp_encrypt(std::span<const std::uint8_t> plaintext_bits,
                                      OneTimePadKey& key) {
    if (key.remaining() < plaintext_bits.size())
        throw std::runtime_error("one-time pad exhausted: refusing to reuse key bits");
    std::vector<std::uint8_t> out(plaintext_bits.size());
    for (std::size_t i = 0; i < plaintext_bits.size(); ++i)
        out[i] = plaintext_bits[i] ^ key.key_bits[key.consumed_prefix + i];
    key.consumed_prefix += plaintext_bits.size();
    return out;
}

std::vector<std::uint8_t> otp_decrypt(std::span<const std::uint8_t> ciphertext_bits,
                                      OneTimePadKey& key) {
    return otp_encrypt(ciphertext_bits, key);
}

}  // namespace relbc
