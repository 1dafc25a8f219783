#include "webcas/webid/key.hpp"

#include <openssl/bio.h>
#include <openssl/bn.h>
#include <openssl/core_names.h>
#include <openssl/evp.h>
#include <openssl/pem.h>
#include <openssl/rsa.h>

#include "webcas/crypto.hpp"
#include "webcas/error.hpp"

namespace webcas::webid {
namespace {

struct BnFree {
    void operator()(BIGNUM* bn) const { BN_free(bn); }
};
using BnPtr = std::unique_ptr<BIGNUM, BnFree>;

struct BioFree {
    void operator()(BIO* bio) const { BIO_free(bio); }
};
using BioPtr = std::unique_ptr<BIO, BioFree>;

std::string bn_to_hex(const BIGNUM* bn) {
    std::string bytes(static_cast<std::size_t>(BN_num_bytes(bn)), '\0');
    BN_bn2bin(bn, reinterpret_cast<unsigned char*>(bytes.data()));
    return canonical_hex(to_hex(bytes));
}

}  // namespace

std::string canonical_hex(std::string_view text) {
    std::string hex;
    hex.reserve(text.size());
    for (const char c : text) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
        if (c >= '0' && c <= '9') hex += c;
        else if (c >= 'a' && c <= 'f') hex += c;
        else if (c >= 'A' && c <= 'F') hex += static_cast<char>(c - 'A' + 'a');
        else throw ValidationError(std::string("invalid hex character '") + c + "'");
    }
    if (hex.empty()) throw ValidationError("empty hex value");
    if (hex.size() % 2 == 1) hex.insert(hex.begin(), '0');
    std::size_t strip = 0;
    while (strip + 2 < hex.size() && hex[strip] == '0' && hex[strip + 1] == '0') strip += 2;
    return hex.substr(strip);
}

RsaPublicKey::RsaPublicKey(std::string_view modulus_hex, std::uint64_t exponent)
    : modulus_hex_(canonical_hex(modulus_hex)), exponent_(exponent) {}

std::size_t RsaPublicKey::modulus_bits() const noexcept {
    if (modulus_hex_ == "00") return 0;
    const char first = modulus_hex_[0];
    const int nibble = first <= '9' ? first - '0' : first - 'a' + 10;
    std::size_t bits = (modulus_hex_.size() - 1) * 4;
    for (int v = nibble; v > 0; v >>= 1) ++bits;
    return bits;
}

PrivateKey::PrivateKey(EVP_PKEY* key) : key_(key, EVP_PKEY_free) {}

PrivateKey PrivateKey::generate_rsa(int bits) {
    EVP_PKEY* key = EVP_RSA_gen(static_cast<unsigned int>(bits));
    if (key == nullptr) throw CryptoError("RSA key generation failed");
    return PrivateKey(key);
}

PrivateKey PrivateKey::from_pem(std::string_view pem) {
    BioPtr bio(BIO_new_mem_buf(pem.data(), static_cast<int>(pem.size())));
    EVP_PKEY* key = PEM_read_bio_PrivateKey(bio.get(), nullptr, nullptr, nullptr);
    if (key == nullptr) throw CryptoError("no private key in PEM data");
    return PrivateKey(key);
}

std::string PrivateKey::to_pem() const {
    BioPtr bio(BIO_new(BIO_s_mem()));
    if (PEM_write_bio_PrivateKey(bio.get(), key_.get(), nullptr, nullptr, 0, nullptr, nullptr) != 1)
        throw CryptoError("cannot encode private key");
    char* data = nullptr;
    const long len = BIO_get_mem_data(bio.get(), &data);
    return std::string(data, static_cast<std::size_t>(len));
}

RsaPublicKey PrivateKey::public_key() const { return rsa_public_key_of(key_.get()); }

RsaPublicKey rsa_public_key_of(const EVP_PKEY* key) {
    if (key == nullptr || EVP_PKEY_get_base_id(key) != EVP_PKEY_RSA) throw CryptoError("not an RSA key");
    BIGNUM* n = nullptr;
    BIGNUM* e = nullptr;
    if (EVP_PKEY_get_bn_param(key, OSSL_PKEY_PARAM_RSA_N, &n) != 1 ||
        EVP_PKEY_get_bn_param(key, OSSL_PKEY_PARAM_RSA_E, &e) != 1) {
        BN_free(n);
        BN_free(e);
        throw CryptoError("cannot read RSA parameters");
    }
    BnPtr modulus(n), exponent(e);
    if (BN_num_bits(exponent.get()) > 64) throw CryptoError("RSA exponent exceeds 64 bits");
    std::uint64_t exp = 0;
    std::string bytes(static_cast<std::size_t>(BN_num_bytes(exponent.get())), '\0');
    BN_bn2bin(exponent.get(), reinterpret_cast<unsigned char*>(bytes.data()));
    for (const char c : bytes) exp = (exp << 8) | static_cast<unsigned char>(c);
    return RsaPublicKey(bn_to_hex(modulus.get()), exp);
}

}  // namespace webcas::webid
