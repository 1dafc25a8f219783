#include "webcas/webid/certificate.hpp"

#include <ctime>
#include <memory>

#include <openssl/asn1.h>
#include <openssl/bio.h>
#include <openssl/evp.h>
#include <openssl/pem.h>
#include <openssl/rand.h>
#include <openssl/x509.h>
#include <openssl/x509v3.h>

#include "webcas/crypto.hpp"
#include "webcas/error.hpp"

namespace webcas::webid {
namespace {

template <auto Fn>
struct Deleter {
    template <typename T>
    void operator()(T* p) const { Fn(p); }
};
using X509Ptr = std::unique_ptr<X509, Deleter<X509_free>>;
using BioPtr = std::unique_ptr<BIO, Deleter<BIO_free>>;
using NamesPtr = std::unique_ptr<GENERAL_NAMES, Deleter<GENERAL_NAMES_free>>;
using ExtPtr = std::unique_ptr<X509_EXTENSION, Deleter<X509_EXTENSION_free>>;

std::chrono::system_clock::time_point to_time_point(const ASN1_TIME* t) {
    std::tm tm{};
    if (t == nullptr || ASN1_TIME_to_tm(t, &tm) != 1) throw CryptoError("invalid certificate time");
    return std::chrono::system_clock::from_time_t(timegm(&tm));
}

std::string asn1_string(const ASN1_STRING* s) {
    return std::string(reinterpret_cast<const char*>(ASN1_STRING_get0_data(s)),
                       static_cast<std::size_t>(ASN1_STRING_length(s)));
}

GENERAL_NAME* make_name(const SanEntry& entry) {
    GENERAL_NAME* name = nullptr;
    if (entry.kind == SanEntry::Kind::Ip) {
        name = GENERAL_NAME_new();
        ASN1_OCTET_STRING* ip = a2i_IPADDRESS(entry.value.c_str());
        if (name == nullptr || ip == nullptr) {
            GENERAL_NAME_free(name);
            throw CryptoError("invalid IP address in SAN: " + entry.value);
        }
        GENERAL_NAME_set0_value(name, GEN_IPADD, ip);
        return name;
    }
    int type = GEN_URI;
    if (entry.kind == SanEntry::Kind::Dns) type = GEN_DNS;
    if (entry.kind == SanEntry::Kind::Email) type = GEN_EMAIL;
    name = GENERAL_NAME_new();
    ASN1_IA5STRING* value = ASN1_IA5STRING_new();
    if (name == nullptr || value == nullptr ||
        ASN1_STRING_set(value, entry.value.data(), static_cast<int>(entry.value.size())) != 1) {
        GENERAL_NAME_free(name);
        ASN1_IA5STRING_free(value);
        throw CryptoError("cannot encode SAN entry");
    }
    GENERAL_NAME_set0_value(name, type, value);
    return name;
}

void add_ext(X509* cert, int nid, const char* value) {
    X509V3_CTX ctx;
    X509V3_set_ctx_nodb(&ctx);
    X509V3_set_ctx(&ctx, cert, cert, nullptr, nullptr, 0);
    ExtPtr ext(X509V3_EXT_conf_nid(nullptr, &ctx, nid, value));
    if (!ext || X509_add_ext(cert, ext.get(), -1) != 1) throw CryptoError("cannot add certificate extension");
}

}  // namespace

WebIdCertificate WebIdCertificate::from_native(const X509* cert) {
    if (cert == nullptr) throw CryptoError("null certificate");
    unsigned char* der = nullptr;
    const int len = i2d_X509(cert, &der);
    if (len <= 0) throw CryptoError("cannot DER-encode certificate");
    std::string bytes(reinterpret_cast<const char*>(der), static_cast<std::size_t>(len));
    OPENSSL_free(der);
    return from_der(std::move(bytes));
}

WebIdCertificate WebIdCertificate::from_der(std::string der) {
    const auto* p = reinterpret_cast<const unsigned char*>(der.data());
    X509Ptr x(d2i_X509(nullptr, &p, static_cast<long>(der.size())));
    if (!x) throw CryptoError("malformed DER certificate");

    WebIdCertificate cert;
    cert.der_ = std::move(der);

    const X509_NAME* subject = X509_get_subject_name(x.get());
    const int idx = X509_NAME_get_index_by_NID(subject, NID_commonName, -1);
    if (idx >= 0) {
        const ASN1_STRING* data = X509_NAME_ENTRY_get_data(X509_NAME_get_entry(subject, idx));
        unsigned char* utf8 = nullptr;
        const int n = ASN1_STRING_to_UTF8(&utf8, data);
        if (n >= 0) {
            cert.common_name_.assign(reinterpret_cast<const char*>(utf8), static_cast<std::size_t>(n));
            OPENSSL_free(utf8);
        }
    }

    NamesPtr names(static_cast<GENERAL_NAMES*>(X509_get_ext_d2i(x.get(), NID_subject_alt_name, nullptr, nullptr)));
    if (names) {
        for (int i = 0; i < sk_GENERAL_NAME_num(names.get()); ++i) {
            const GENERAL_NAME* name = sk_GENERAL_NAME_value(names.get(), i);
            if (name->type != GEN_URI) continue;
            const std::string uri = asn1_string(name->d.uniformResourceIdentifier);
            if (rdf::is_absolute_iri(uri)) cert.san_uris_.emplace_back(uri);
        }
    }

    const EVP_PKEY* key = X509_get0_pubkey(x.get());
    if (key != nullptr && EVP_PKEY_get_base_id(key) == EVP_PKEY_RSA) cert.public_key_ = rsa_public_key_of(key);

    cert.not_before_ = to_time_point(X509_get0_notBefore(x.get()));
    cert.not_after_ = to_time_point(X509_get0_notAfter(x.get()));
    return cert;
}

WebIdCertificate WebIdCertificate::from_pem(std::string_view pem) {
    BioPtr bio(BIO_new_mem_buf(pem.data(), static_cast<int>(pem.size())));
    X509Ptr x(PEM_read_bio_X509(bio.get(), nullptr, nullptr, nullptr));
    if (!x) throw CryptoError("no certificate in PEM data");
    return from_native(x.get());
}

std::string WebIdCertificate::to_pem() const {
    const auto* p = reinterpret_cast<const unsigned char*>(der_.data());
    X509Ptr x(d2i_X509(nullptr, &p, static_cast<long>(der_.size())));
    BioPtr bio(BIO_new(BIO_s_mem()));
    if (!x || PEM_write_bio_X509(bio.get(), x.get()) != 1) throw CryptoError("cannot PEM-encode certificate");
    char* data = nullptr;
    const long len = BIO_get_mem_data(bio.get(), &data);
    return std::string(data, static_cast<std::size_t>(len));
}

std::string WebIdCertificate::fingerprint() const { return sha256_hex(der_); }

WebIdCertificate issue_self_signed(const PrivateKey& key, const CertificateRequest& request) {
    X509Ptr x(X509_new());
    if (!x) throw CryptoError("X509_new failed");
    X509_set_version(x.get(), X509_VERSION_3);

    unsigned char serial_bytes[16];
    if (RAND_bytes(serial_bytes, sizeof serial_bytes) != 1) throw CryptoError("RAND_bytes failed");
    serial_bytes[0] &= 0x7f;
    BIGNUM* serial = BN_bin2bn(serial_bytes, sizeof serial_bytes, nullptr);
    BN_to_ASN1_INTEGER(serial, X509_get_serialNumber(x.get()));
    BN_free(serial);

    X509_gmtime_adj(X509_getm_notBefore(x.get()), 0);
    X509_time_adj_ex(X509_getm_notAfter(x.get()), request.validity_days, 0, nullptr);

    X509_NAME* name = X509_get_subject_name(x.get());
    X509_NAME_add_entry_by_txt(name, "CN", MBSTRING_UTF8,
                               reinterpret_cast<const unsigned char*>(request.common_name.c_str()), -1, -1, 0);
    X509_set_issuer_name(x.get(), name);
    X509_set_pubkey(x.get(), key.native());

    add_ext(x.get(), NID_basic_constraints, "critical,CA:FALSE");
    // A self-signed server certificate doubles as its own trust anchor on the
    // client side, which OpenSSL only accepts with keyCertSign.
    add_ext(x.get(), NID_key_usage,
            request.server ? "critical,digitalSignature,keyEncipherment,keyCertSign"
                           : "critical,digitalSignature,keyEncipherment,keyAgreement");
    add_ext(x.get(), NID_ext_key_usage, request.server ? "serverAuth,clientAuth" : "clientAuth");

    if (!request.san.empty()) {
        NamesPtr names(sk_GENERAL_NAME_new_null());
        for (const SanEntry& entry : request.san) sk_GENERAL_NAME_push(names.get(), make_name(entry));
        if (X509_add1_ext_i2d(x.get(), NID_subject_alt_name, names.get(), 0, X509V3_ADD_DEFAULT) != 1)
            throw CryptoError("cannot add subjectAltName");
    }

    if (X509_sign(x.get(), key.native(), EVP_sha256()) == 0) throw CryptoError("certificate signing failed");
    return WebIdCertificate::from_native(x.get());
}

}  // namespace webcas::webid
