#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include <openssl/types.h>

namespace webcas::webid {

/// Normalizes a hex string: strips ASCII whitespace, lowercases, left-pads to
/// whole octets and drops leading zero octets. Throws ValidationError on any
/// other character or an empty result.
std::string canonical_hex(std::string_view text);

class RsaPublicKey {
public:
    /// `modulus_hex` may be in any case, contain whitespace and leading zero octets.
    RsaPublicKey(std::string_view modulus_hex, std::uint64_t exponent);

    const std::string& modulus_hex() const noexcept { return modulus_hex_; }
    std::uint64_t exponent() const noexcept { return exponent_; }
    std::size_t modulus_bits() const noexcept;

    friend bool operator==(const RsaPublicKey&, const RsaPublicKey&) = default;

private:
    std::string modulus_hex_;
    std::uint64_t exponent_;
};

/// Owning handle to an RSA private key.
class PrivateKey {
public:
    /// Fresh 2048-bit key with public exponent 65537.
    static PrivateKey generate_rsa(int bits = 2048);
    static PrivateKey from_pem(std::string_view pem);

    std::string to_pem() const;
    RsaPublicKey public_key() const;
    EVP_PKEY* native() const noexcept { return key_.get(); }

private:
    explicit PrivateKey(EVP_PKEY* key);
    std::shared_ptr<EVP_PKEY> key_;
};

/// Public half of an OpenSSL key, or nullopt-equivalent throw for non-RSA keys.
RsaPublicKey rsa_public_key_of(const EVP_PKEY* key);

}  // namespace webcas::webid
